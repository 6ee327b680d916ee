use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::cells::{
    build_activation_history, ActivationHistory, CellKind, DevicePolicy, DriveConfig,
    HistoryConfig, HistorySite, ProgramSettings, SiteStats, WeightNoiseModel,
};
use crate::chain::{MarkovChain1D, RightBoundary, Row};
use crate::devices::{FtjParams, MtjParams, VariationSpec};
use crate::error::{Error, Result};

/// Interior sites listed per table when devices are drawn fresh per trial;
/// with one entry per edge this puts most trials on the interior kind.
const POOLED_INTERIOR_SITES: usize = 4;

/// Outcome of one walk step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepResult {
    NewPos(usize),
    Absorbed,
}

/// Cost charged per executed step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepCost {
    pub time_s: f64,
    pub energy_j: f64,
}

impl Default for StepCost {
    fn default() -> Self {
        let d = DriveConfig::default();
        Self {
            time_s: d.cycle_time_s,
            energy_j: d.energy_per_cycle_j,
        }
    }
}

/// Per-position step law as 32-bit thresholds: a uniform `r < left` moves
/// left, `left <= r < left_right` moves right, anything else stays.
#[derive(Clone, Debug, PartialEq)]
pub struct StepTable {
    thresholds: Vec<(u32, u32)>,
    rows: Vec<Row>,
    absorbing: Option<usize>,
}

fn threshold(p: f64) -> u32 {
    // float-to-int casts saturate, so p = 1 maps to u32::MAX
    (p * 4_294_967_296.0).round() as u32
}

impl StepTable {
    fn new(rows: Vec<Row>, absorbing: Option<usize>) -> Self {
        let thresholds = rows
            .iter()
            .map(|r| (threshold(r.left), threshold(r.left + r.right)))
            .collect();
        Self {
            thresholds,
            rows,
            absorbing,
        }
    }

    /// Next position for the uniform draw `r`.
    #[inline(always)]
    pub(crate) fn advance(&self, pos: usize, r: u32) -> usize {
        let (l, lr) = self.thresholds[pos];
        // branchless: the three outcomes are equally unpredictable
        pos + (r.wrapping_sub(l) < lr.wrapping_sub(l)) as usize - (r < l) as usize
    }

    pub(crate) fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub(crate) fn absorbing(&self) -> Option<usize> {
        self.absorbing
    }
}

/// Which stochastic source drives the walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Software,
    /// Hardware emulation with process variation only.
    HwP,
    /// Hardware emulation with process variation and voltage noise.
    HwPv,
}

impl BackendKind {
    pub const ALL: [BackendKind; 3] = [BackendKind::Software, BackendKind::HwP, BackendKind::HwPv];

    pub fn name(self) -> &'static str {
        match self {
            BackendKind::Software => "software",
            BackendKind::HwP => "hw-p",
            BackendKind::HwPv => "hw-pv",
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BackendKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown backend {s:?} (software, hw-p, hw-pv)")))
    }
}

/// Device and circuit settings of the hardware-emulated backend.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HardwareSettings {
    pub mtj: MtjParams,
    pub ftj: FtjParams,
    pub variation: VariationSpec,
    pub noise: WeightNoiseModel,
    pub drive: DriveConfig,
    /// Divider resistance; the geometric mean of `r_on` and `r_off` if unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_series: Option<f64>,
    pub programming: ProgramSettings,
    /// Activation cycles simulated per table.
    pub history_trials: u64,
    pub policy: DevicePolicy,
}

impl Default for HardwareSettings {
    fn default() -> Self {
        Self {
            mtj: MtjParams::default(),
            ftj: FtjParams::default(),
            variation: VariationSpec::default(),
            noise: WeightNoiseModel::default(),
            drive: DriveConfig::default(),
            r_series: None,
            programming: ProgramSettings::default(),
            history_trials: 50_000,
            policy: DevicePolicy::FreshPerTrial,
        }
    }
}

impl HardwareSettings {
    pub fn r_series(&self) -> f64 {
        self.r_series
            .unwrap_or_else(|| (self.ftj.r_on * self.ftj.r_off).sqrt())
    }

    /// The layers enabled for `kind`: hw-p keeps process variation and drops
    /// voltage noise, hw-pv keeps both.
    pub fn layers_for(&self, kind: BackendKind) -> Result<HardwareSettings> {
        let mut s = self.clone();
        match kind {
            BackendKind::Software => {
                return Err(Error::Config("software backend has no hardware layers".into()))
            }
            BackendKind::HwP => s.noise = WeightNoiseModel::zero(),
            BackendKind::HwPv => {}
        }
        Ok(s)
    }

    fn sites(&self, chain: &MarkovChain1D) -> Vec<HistorySite> {
        let last = chain.n - 1;
        let kind_of = |i: usize| match i {
            0 => CellKind::LeftEdge,
            i if i == last && chain.right_boundary == RightBoundary::Reflecting => CellKind::RightEdge,
            _ => CellKind::Interior,
        };
        let live = match chain.absorbing() {
            Some(a) => a,
            None => chain.n,
        };
        match self.policy {
            DevicePolicy::PerPosition => (0..live).map(|i| HistorySite { index: i, kind: kind_of(i) }).collect(),
            DevicePolicy::FreshPerTrial => {
                let mut sites = vec![HistorySite { index: 0, kind: CellKind::LeftEdge }];
                sites.extend(
                    (1..live)
                        .filter(|&i| kind_of(i) == CellKind::Interior)
                        .take(POOLED_INTERIOR_SITES)
                        .map(|i| HistorySite { index: i, kind: CellKind::Interior }),
                );
                if chain.right_boundary == RightBoundary::Reflecting {
                    sites.push(HistorySite { index: last, kind: CellKind::RightEdge });
                }
                sites
            }
        }
    }

    fn history_config(&self, chain: &MarkovChain1D, device_seed: u64) -> HistoryConfig {
        HistoryConfig {
            sites: self.sites(chain),
            ps_interior: chain.ps,
            ps_edge: chain.ps,
            nominal: self.mtj.clone(),
            ftj: self.ftj.clone(),
            r_series: self.r_series(),
            variation: self.variation.clone(),
            noise: self.noise.clone(),
            drive: self.drive.clone(),
            programming: self.programming.clone(),
            policy: self.policy,
            device_seed,
        }
    }
}

/// Stochastic source of a walk. Both variants step with the same
/// semantics; they differ in where the per-position probabilities come from.
#[derive(Clone, Debug, PartialEq)]
pub enum WalkBackend {
    /// Probabilities straight from the chain.
    Software { table: StepTable },
    /// Probabilities measured from an activation-history table of emulated
    /// devices, fixed for the lifetime of the backend.
    HardwareEmulated {
        table: StepTable,
        device_seed: u64,
        noise: WeightNoiseModel,
        cost: StepCost,
    },
}

impl WalkBackend {
    pub fn software(chain: &MarkovChain1D) -> Self {
        let rows = (0..chain.n).map(|i| chain.row(i)).collect();
        WalkBackend::Software {
            table: StepTable::new(rows, chain.absorbing()),
        }
    }

    /// Builds a hardware table for `chain` and returns it with the activation
    /// history it was measured from.
    ///
    /// With fresh devices per trial every interior (and every edge) site is a
    /// draw from the same device population, so outcomes are pooled per cell
    /// kind and the move probability is split evenly between the two
    /// directions. With per-position devices each site keeps its own raw
    /// frequencies.
    pub fn hardware(
        chain: &MarkovChain1D,
        settings: &HardwareSettings,
        device_seed: u64,
    ) -> Result<(Self, ActivationHistory)> {
        let cfg = settings.history_config(chain, device_seed);
        let history = build_activation_history(&cfg, settings.history_trials)?;
        let rows = match settings.policy {
            DevicePolicy::FreshPerTrial => pooled_rows(chain, &history.sites)?,
            DevicePolicy::PerPosition => per_site_rows(chain, &history.sites)?,
        };
        let backend = WalkBackend::HardwareEmulated {
            table: StepTable::new(rows, chain.absorbing()),
            device_seed,
            noise: settings.noise.clone(),
            cost: StepCost {
                time_s: settings.drive.cycle_time_s,
                energy_j: settings.drive.energy_per_cycle_j,
            },
        };
        Ok((backend, history))
    }

    /// Backend of the given kind; `settings` is ignored for software.
    pub fn for_kind(
        kind: BackendKind,
        chain: &MarkovChain1D,
        settings: &HardwareSettings,
        device_seed: u64,
    ) -> Result<Self> {
        match kind {
            BackendKind::Software => Ok(Self::software(chain)),
            _ => Ok(Self::hardware(chain, &settings.layers_for(kind)?, device_seed)?.0),
        }
    }

    pub(crate) fn table(&self) -> &StepTable {
        match self {
            WalkBackend::Software { table } | WalkBackend::HardwareEmulated { table, .. } => table,
        }
    }

    /// Number of positions.
    pub fn len(&self) -> usize {
        self.table().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Step probabilities at `pos`.
    pub fn row(&self, pos: usize) -> Row {
        self.table().rows[pos]
    }

    pub fn cost(&self) -> StepCost {
        match self {
            WalkBackend::Software { .. } => StepCost::default(),
            WalkBackend::HardwareEmulated { cost, .. } => *cost,
        }
    }
}

fn pooled_rows(chain: &MarkovChain1D, sites: &[SiteStats]) -> Result<Vec<Row>> {
    let pool = |kind: CellKind| -> Result<(f64, f64)> {
        let (stay, n) = sites
            .iter()
            .filter(|s| s.kind == kind)
            .fold((0u64, 0u64), |(a, b), s| (a + s.stay, b + s.trials));
        if n == 0 {
            return Err(Error::Config(format!("activation history has no {kind:?} trials")));
        }
        let ps = stay as f64 / n as f64;
        Ok((ps, 1.0 - ps))
    };
    let has_interior = sites.iter().any(|s| s.kind == CellKind::Interior);
    let (ps_in, mv_in) = if has_interior { pool(CellKind::Interior)? } else { (1.0, 0.0) };
    let (ps_le, mv_le) = pool(CellKind::LeftEdge)?;
    let right_edge = match chain.right_boundary {
        RightBoundary::Reflecting => Some(pool(CellKind::RightEdge)?),
        RightBoundary::Absorbing => None,
    };
    Ok((0..chain.n)
        .map(|i| {
            let template = chain.row(i);
            if Some(i) == chain.absorbing() {
                template
            } else if i == 0 {
                Row { left: 0.0, stay: ps_le, right: mv_le }
            } else if i == chain.n - 1 {
                let (ps, mv) = right_edge.expect("reflecting edge pooled");
                Row { left: mv, stay: ps, right: 0.0 }
            } else {
                Row { left: 0.5 * mv_in, stay: ps_in, right: 0.5 * mv_in }
            }
        })
        .collect())
}

fn per_site_rows(chain: &MarkovChain1D, sites: &[SiteStats]) -> Result<Vec<Row>> {
    (0..chain.n)
        .map(|i| {
            if Some(i) == chain.absorbing() {
                return Ok(chain.row(i));
            }
            let st = sites
                .iter()
                .find(|s| s.index == i)
                .ok_or_else(|| Error::Config(format!("activation history misses position {i}")))?;
            if st.trials == 0 {
                return Err(Error::Config(format!(
                    "position {i} has no trials; raise history_trials above {}",
                    sites.len()
                )));
            }
            let t = st.trials as f64;
            Ok(Row {
                left: st.left as f64 / t,
                stay: st.stay as f64 / t,
                right: st.right as f64 / t,
            })
        })
        .collect()
}

/// One step of the walk from `pos`.
pub fn step<R: RngCore + ?Sized>(pos: usize, backend: &WalkBackend, rng: &mut R) -> Result<StepResult> {
    let table = backend.table();
    if pos >= table.len() || Some(pos) == table.absorbing() {
        return Err(Error::domain(format!(
            "cannot step from position {pos} (chain of {}, absorbing {:?})",
            table.len(),
            table.absorbing()
        )));
    }
    let next = table.advance(pos, rng.next_u32());
    Ok(if Some(next) == table.absorbing() {
        StepResult::Absorbed
    } else {
        StepResult::NewPos(next)
    })
}
