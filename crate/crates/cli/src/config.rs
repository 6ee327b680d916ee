//! TOML run configuration. Every key has a default, so an empty file (or no
//! file) reproduces the reference experiments.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use neuropde::cells::{DevicePolicy, DriveConfig, ProgramSettings, WeightNoiseModel};
use neuropde::devices::{FtjParams, MtjParams, VariationSpec};
use neuropde::pde::{Diffusion2D, SteadyHeat1D};
use neuropde::walk::{Baseline, BackendKind, HardwareSettings};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Accepted max σ² per backend.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Tolerances {
    pub software: f64,
    pub hw_p: f64,
    pub hw_pv: f64,
}

impl Tolerances {
    pub fn get(&self, kind: BackendKind) -> f64 {
        match kind {
            BackendKind::Software => self.software,
            BackendKind::HwP => self.hw_p,
            BackendKind::HwPv => self.hw_pv,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solve1dSection {
    pub l: f64,
    pub n: usize,
    pub f: f64,
    pub dt: f64,
    pub w: u64,
    pub tolerance: Tolerances,
}

impl Default for Solve1dSection {
    fn default() -> Self {
        let p = SteadyHeat1D::default();
        Self {
            l: p.l,
            n: p.n,
            f: p.f,
            dt: p.dt,
            w: p.w,
            tolerance: Tolerances {
                software: 1e-3,
                hw_p: 1e-3,
                hw_pv: 1e-2,
            },
        }
    }
}

impl Solve1dSection {
    pub fn problem(&self) -> SteadyHeat1D {
        SteadyHeat1D {
            l: self.l,
            n: self.n,
            f: self.f,
            dt: self.dt,
            w: self.w,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solve2dSection {
    pub c0: f64,
    pub d: f64,
    pub w: u64,
    /// Solution time in steps of `dt`.
    pub steps: u64,
    pub source: [usize; 2],
    pub l: f64,
    pub n: usize,
    pub dt: f64,
    pub tolerance: Tolerances,
}

impl Default for Solve2dSection {
    fn default() -> Self {
        let p = Diffusion2D::default();
        Self {
            c0: p.c0,
            d: p.d,
            w: p.w,
            steps: p.steps,
            source: [p.source.0, p.source.1],
            l: p.l,
            n: p.n,
            dt: p.dt,
            tolerance: Tolerances {
                software: 1e-2,
                hw_p: 1e-2,
                hw_pv: 1e-2,
            },
        }
    }
}

impl Solve2dSection {
    pub fn problem(&self) -> Diffusion2D {
        Diffusion2D {
            c0: self.c0,
            d: self.d,
            w: self.w,
            steps: self.steps,
            source: (self.source[0], self.source[1]),
            l: self.l,
            n: self.n,
            dt: self.dt,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub w_values: Vec<u64>,
    pub backends: Vec<BackendKind>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            w_values: vec![100, 1_000, 10_000, 100_000],
            backends: BackendKind::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DevicesMcSection {
    /// Weight-noise samples.
    pub samples: u64,
    /// Activation cycles in the exported history.
    pub history_trials: u64,
    /// Upper bound on |mean shift| of the weight factor.
    pub mean_shift_bound: f64,
    /// Upper bound on the weight-factor variance.
    pub variance_bound: f64,
}

impl Default for DevicesMcSection {
    fn default() -> Self {
        Self {
            samples: 50_000,
            history_trials: 50_000,
            mean_shift_bound: 0.0032,
            variance_bound: 1.38e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateSection {
    /// Target stay probability.
    pub ps: f64,
    /// Activation cycles used to verify the operating point.
    pub verify_cycles: u64,
}

impl Default for CalibrateSection {
    fn default() -> Self {
        Self {
            ps: 0.5317,
            verify_cycles: 50_000,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DevicesSection {
    pub mtj: MtjParams,
    pub ftj: FtjParams,
    pub variation: VariationSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellsSection {
    /// Divider resistance (Ω); geometric mean of the FTJ extremes if unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_series: Option<f64>,
    /// Activation cycles per hardware table.
    pub history_trials: u64,
    pub policy: DevicePolicy,
    pub noise: WeightNoiseModel,
    pub drive: DriveConfig,
    pub programming: ProgramSettings,
}

impl Default for CellsSection {
    fn default() -> Self {
        let hw = HardwareSettings::default();
        Self {
            r_series: hw.r_series,
            history_trials: hw.history_trials,
            policy: hw.policy,
            noise: hw.noise,
            drive: hw.drive,
            programming: hw.programming,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    /// Worker threads; all available cores if unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub backend: BackendKind,
    /// Repeats averaged into each reported solution.
    pub runs: usize,
    pub out_dir: PathBuf,
    pub solve_1d: Solve1dSection,
    pub solve_2d: Solve2dSection,
    pub sweep: SweepSection,
    pub devices_mc: DevicesMcSection,
    pub calibrate: CalibrateSection,
    pub devices: DevicesSection,
    pub cells: CellsSection,
    /// Per-step costs of comparison platforms.
    pub baselines: BTreeMap<String, Baseline>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let baselines = [
            ("neuromorphic_low", 34.8e-9, 3.918e-12),
            ("neuromorphic_high", 3.15e-6, 43.25e-12),
        ]
        .into_iter()
        .map(|(name, t, e)| {
            (
                name.to_string(),
                Baseline {
                    time_per_step_s: t,
                    energy_per_step_j: e,
                },
            )
        })
        .collect();
        Self {
            master_seed: 2024,
            workers: None,
            backend: BackendKind::Software,
            runs: 10,
            out_dir: PathBuf::from("out"),
            solve_1d: Solve1dSection::default(),
            solve_2d: Solve2dSection::default(),
            sweep: SweepSection::default(),
            devices_mc: DevicesMcSection::default(),
            calibrate: CalibrateSection::default(),
            devices: DevicesSection::default(),
            cells: CellsSection::default(),
            baselines,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Rejects values that would fail only deep inside a run.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.master_seed > i64::MAX as u64 {
            return Err(CliError::Config(format!("master_seed must be <= {}", i64::MAX)));
        }
        if self.runs == 0 {
            return Err(CliError::Config("runs must be >= 1".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be >= 1".into()));
        }
        self.solve_1d.problem().validate()?;
        self.solve_2d.problem().validate()?;
        let hw = self.hardware();
        hw.mtj.validate()?;
        hw.ftj.validate()?;
        hw.variation.validate()?;
        hw.noise.validate()?;
        hw.drive.validate()?;
        if hw.history_trials == 0 {
            return Err(CliError::Config("cells.history_trials must be >= 1".into()));
        }
        if self.sweep.w_values.is_empty() || self.sweep.w_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Config("sweep.w_values must be non-empty and ascending".into()));
        }
        if self.devices_mc.samples == 0 || self.devices_mc.history_trials == 0 {
            return Err(CliError::Config("devices_mc sample counts must be >= 1".into()));
        }
        if !(self.calibrate.ps > 0.0 && self.calibrate.ps < 1.0) || self.calibrate.verify_cycles == 0 {
            return Err(CliError::Config("calibrate.ps must lie in (0, 1) with verify_cycles >= 1".into()));
        }
        for (name, b) in &self.baselines {
            if !(b.time_per_step_s > 0.0 && b.energy_per_step_j > 0.0) {
                return Err(CliError::Config(format!("baseline {name} needs positive costs")));
            }
        }
        Ok(())
    }

    pub fn workers(&self) -> usize {
        self.workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }

    pub fn hardware(&self) -> HardwareSettings {
        HardwareSettings {
            mtj: self.devices.mtj.clone(),
            ftj: self.devices.ftj.clone(),
            variation: self.devices.variation.clone(),
            noise: self.cells.noise.clone(),
            drive: self.cells.drive.clone(),
            r_series: self.cells.r_series,
            programming: self.cells.programming.clone(),
            history_trials: self.cells.history_trials,
            policy: self.cells.policy,
        }
    }

    /// Short SHA-256 of the config, ignoring settings that cannot change
    /// results (worker count, output directory).
    pub fn hash(&self) -> String {
        let canonical = RunConfig {
            workers: None,
            out_dir: PathBuf::new(),
            ..self.clone()
        };
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        hex::encode(&digest[..8])
    }
}
