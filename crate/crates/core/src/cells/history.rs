//! Activation-history tables: Monte Carlo runs of the activation cycle with
//! process-perturbed devices and per-event weight noise.
//!
//! Each trial programs its cluster's synapse against the actual devices in
//! that cluster (program-and-verify), then runs one cycle. The resulting
//! per-site outcome frequencies are what the hardware-emulated walk backend
//! steps with.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::activation::{activation_cycle, boundary_cycle, Move, Side};
use super::drive::{calibrate_path, DriveConfig};
use super::neuron::Neuron;
use super::noise::WeightNoiseModel;
use super::synapse::{ProgramSettings, Synapse};
use crate::devices::{sample_device_instance, FtjParams, MtjParams, VariationSpec};
use crate::error::{Error, Result};
use crate::rng::{self, derive_seed};

const TAG_TRIAL_DEVICES: u64 = 0x0074_7269_616c;
const TAG_POSITION_DEVICE: u64 = 0x0070_6f73;
const TAG_CYCLE: u64 = 0x0063_7963_6c65;

/// Role of a chain position in the neuron array.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellKind {
    Interior,
    /// Reflecting edge whose only neighbour is to the right.
    LeftEdge,
    /// Reflecting edge whose only neighbour is to the left.
    RightEdge,
}

/// How device instances are assigned to trials.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DevicePolicy {
    /// Every trial samples a fresh cluster; sites of the same kind are
    /// statistically identical.
    #[default]
    FreshPerTrial,
    /// One device per neuron position, fixed for the whole table.
    PerPosition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistorySite {
    pub index: usize,
    pub kind: CellKind,
}

#[derive(Clone, Debug)]
pub struct HistoryConfig {
    /// Sites visited round-robin: trial `t` runs at `sites[t % sites.len()]`.
    pub sites: Vec<HistorySite>,
    /// Target stay probability of interior cycles.
    pub ps_interior: f64,
    /// Target stay probability of edge cycles.
    pub ps_edge: f64,
    pub nominal: MtjParams,
    pub ftj: FtjParams,
    pub r_series: f64,
    pub variation: VariationSpec,
    pub noise: WeightNoiseModel,
    pub drive: DriveConfig,
    pub programming: ProgramSettings,
    pub policy: DevicePolicy,
    pub device_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistoryRecord {
    pub trial_id: u64,
    pub start_index: usize,
    pub outcome: Move,
    /// Empirical stay frequency of this record's site over the table.
    pub ps_empirical: f64,
    pub device_seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteStats {
    pub index: usize,
    pub kind: CellKind,
    pub trials: u64,
    pub left: u64,
    pub right: u64,
    pub stay: u64,
}

impl SiteStats {
    pub fn p_left(&self) -> f64 {
        self.left as f64 / self.trials as f64
    }
    pub fn p_right(&self) -> f64 {
        self.right as f64 / self.trials as f64
    }
    pub fn p_stay(&self) -> f64 {
        self.stay as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug)]
pub struct ActivationHistory {
    pub records: Vec<HistoryRecord>,
    pub sites: Vec<SiteStats>,
}

struct Cluster {
    left: Option<Neuron>,
    center: Neuron,
    right: Option<Neuron>,
    synapse: Synapse,
    seed: u64,
}

impl HistoryConfig {
    fn validate(&self) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::Config("activation history needs at least one site".into()));
        }
        self.nominal.validate()?;
        self.ftj.validate()?;
        self.variation.validate()?;
        self.noise.validate()?;
        self.drive.validate()
    }

    fn position_device(&self, index: usize) -> MtjParams {
        let seed = derive_seed(self.device_seed, &[TAG_POSITION_DEVICE, index as u64]);
        sample_device_instance(&self.nominal, &self.variation, &mut rng::stream(seed))
    }

    fn build_cluster(&self, site: HistorySite, trial: u64) -> Result<Cluster> {
        let (seed, [l, c, r]) = match self.policy {
            DevicePolicy::FreshPerTrial => {
                let seed = derive_seed(self.device_seed, &[TAG_TRIAL_DEVICES, trial]);
                let mut s = rng::stream(seed);
                let mut draw = || sample_device_instance(&self.nominal, &self.variation, &mut s);
                (seed, [draw(), draw(), draw()])
            }
            DevicePolicy::PerPosition => {
                let seed = derive_seed(self.device_seed, &[TAG_POSITION_DEVICE, site.index as u64]);
                let i = site.index;
                (
                    seed,
                    [
                        self.position_device(i.wrapping_sub(1)),
                        self.position_device(i),
                        self.position_device(i + 1),
                    ],
                )
            }
        };
        let t = self.drive.pulse_width_s;
        let (left, right, cal) = match site.kind {
            CellKind::Interior => {
                let cal = calibrate_path(self.ps_interior, &[&l, &r], 0.0, t, &self.drive)?;
                (Some(l), Some(r), cal)
            }
            CellKind::LeftEdge => {
                let cal = calibrate_path(self.ps_edge, &[&r], self.drive.r_edge_ref, t, &self.drive)?;
                (None, Some(r), cal)
            }
            CellKind::RightEdge => {
                let cal = calibrate_path(self.ps_edge, &[&l], self.drive.r_edge_ref, t, &self.drive)?;
                (Some(l), None, cal)
            }
        };
        let mut synapse = Synapse::new(self.ftj.clone(), self.r_series);
        synapse.program(cal.w, &self.programming)?;
        let idx = site.index;
        Ok(Cluster {
            left: left.map(|p| Neuron::new(idx.wrapping_sub(1), p)),
            center: Neuron::active(idx, c),
            right: right.map(|p| Neuron::new(idx + 1, p)),
            synapse,
            seed,
        })
    }
}

fn run_cycle(cfg: &HistoryConfig, cluster: &Cluster, trial: u64) -> Result<Move> {
    let mut s = rng::stream(derive_seed(cfg.device_seed, &[TAG_CYCLE, trial]));
    let mut center = cluster.center.clone();
    let (syn, noise, drive) = (&cluster.synapse, &cfg.noise, &cfg.drive);
    let out = match (&cluster.left, &cluster.right) {
        (Some(l), Some(r)) => {
            let (mut l, mut r) = (l.clone(), r.clone());
            activation_cycle(&mut l, &mut center, &mut r, syn, noise, drive, &mut s)?
        }
        (None, Some(r)) => {
            let mut r = r.clone();
            boundary_cycle(&mut center, &mut r, Side::Right, syn, noise, drive, &mut s)?
        }
        (Some(l), None) => {
            let mut l = l.clone();
            boundary_cycle(&mut center, &mut l, Side::Left, syn, noise, drive, &mut s)?
        }
        (None, None) => unreachable!("cluster without destinations"),
    };
    Ok(out.result)
}

/// Runs `n_trials` activation cycles and tabulates their outcomes.
///
/// The table depends only on the configuration (including
/// `device_seed`); trials are independent and may run on any thread.
pub fn build_activation_history(cfg: &HistoryConfig, n_trials: u64) -> Result<ActivationHistory> {
    cfg.validate()?;
    if n_trials == 0 {
        return Err(Error::Config("activation history needs n_trials >= 1".into()));
    }
    let n_sites = cfg.sites.len();

    let fixed: Vec<Cluster> = match cfg.policy {
        DevicePolicy::PerPosition => cfg
            .sites
            .iter()
            .map(|&site| cfg.build_cluster(site, 0))
            .collect::<Result<_>>()?,
        DevicePolicy::FreshPerTrial => Vec::new(),
    };

    let raw: Vec<(usize, Move, u64)> = (0..n_trials)
        .into_par_iter()
        .map(|t| {
            let k = (t % n_sites as u64) as usize;
            let fresh;
            let cluster = match cfg.policy {
                DevicePolicy::PerPosition => &fixed[k],
                DevicePolicy::FreshPerTrial => {
                    fresh = cfg.build_cluster(cfg.sites[k], t)?;
                    &fresh
                }
            };
            Ok((k, run_cycle(cfg, cluster, t)?, cluster.seed))
        })
        .collect::<Result<_>>()?;

    let mut sites: Vec<SiteStats> = cfg
        .sites
        .iter()
        .map(|s| SiteStats {
            index: s.index,
            kind: s.kind,
            trials: 0,
            left: 0,
            right: 0,
            stay: 0,
        })
        .collect();
    for &(k, m, _) in &raw {
        let st = &mut sites[k];
        st.trials += 1;
        match m {
            Move::MovedLeft => st.left += 1,
            Move::MovedRight => st.right += 1,
            Move::Stayed => st.stay += 1,
        }
    }
    let records = raw
        .into_iter()
        .enumerate()
        .map(|(t, (k, outcome, device_seed))| HistoryRecord {
            trial_id: t as u64,
            start_index: cfg.sites[k].index,
            outcome,
            ps_empirical: sites[k].p_stay(),
            device_seed,
        })
        .collect();
    Ok(ActivationHistory { records, sites })
}

impl ActivationHistory {
    /// CSV with columns `trial_id,start_index,outcome,ps_empirical,device_seed`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "trial_id,start_index,outcome,ps_empirical,device_seed")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.trial_id,
                r.start_index,
                r.outcome.letter(),
                r.ps_empirical,
                r.device_seed
            )?;
        }
        Ok(())
    }

    /// Stay frequency pooled over all sites.
    pub fn pooled_stay(&self) -> f64 {
        let (stay, n) = self
            .sites
            .iter()
            .fold((0u64, 0u64), |(s, n), st| (s + st.stay, n + st.trials));
        stay as f64 / n as f64
    }
}
