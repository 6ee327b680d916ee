//! Repeat-run protocol and convergence sweeps.
//!
//! Run `r` of a plan uses the walk seed derived from `(master_seed, r)`
//! for every backend, so backends are compared on common random numbers.
//! Hardware backends get a fresh device table per run and dimension.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::diffusion::{solve_diffusion_2d, Diffusion2D};
use super::heat::{solve_steady_heat, SteadyHeat1D};
use super::variance::{mean_across_runs, variance, VarianceReport};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::walk::{BackendKind, HardwareSettings, Ledger, WalkBackend};

const TAG_RUN: u64 = 0x0072_756e;
const TAG_DEVICES: u64 = 0x0064_6576;
const TAG_WALKS: u64 = 0x0077_6b73;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunPlan {
    pub runs: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl RunPlan {
    fn validate(&self) -> Result<()> {
        if self.runs == 0 || self.workers == 0 {
            return Err(Error::Config("runs and workers must be >= 1".into()));
        }
        Ok(())
    }

    fn run_seed(&self, r: usize) -> u64 {
        derive_seed(self.master_seed, &[TAG_RUN, r as u64])
    }

    /// Seed of the walks of run `r`.
    pub fn walk_seed(&self, r: usize) -> u64 {
        derive_seed(self.run_seed(r), &[TAG_WALKS])
    }

    /// Seed of the device table of run `r` along dimension `dim`.
    pub fn device_seed(&self, r: usize, dim: usize) -> u64 {
        derive_seed(self.run_seed(r), &[TAG_DEVICES, dim as u64])
    }
}

/// Outcome of a repeated solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub backend: BackendKind,
    /// Solution of every run (row-major for grids).
    pub runs: Vec<Vec<f64>>,
    pub mean: Vec<f64>,
    pub analytical: Vec<f64>,
    pub report: VarianceReport,
    /// Max σ² of each single run against the analytical values.
    pub run_max_sigma2: Vec<f64>,
    pub ledger: Ledger,
}

fn summarize(
    backend: BackendKind,
    runs: Vec<Vec<f64>>,
    analytical: Vec<f64>,
    ledger: Ledger,
) -> Result<RepeatResult> {
    let mean = mean_across_runs(&runs)?;
    let mut report = variance(&mean, &analytical)?;
    report.runs = runs.len();
    let run_max_sigma2 = runs
        .iter()
        .map(|r| variance(r, &analytical).map(|v| v.max))
        .collect::<Result<_>>()?;
    Ok(RepeatResult {
        backend,
        runs,
        mean,
        analytical,
        report,
        run_max_sigma2,
        ledger,
    })
}

fn add(total: &mut Option<Ledger>, l: Ledger) -> Result<()> {
    match total {
        Some(t) => t.merge(&l),
        None => {
            *total = Some(l);
            Ok(())
        }
    }
}

/// The 1D problem solved `plan.runs` times on `kind`.
pub fn repeat_steady_heat(
    p: &SteadyHeat1D,
    kind: BackendKind,
    hw: &HardwareSettings,
    plan: &RunPlan,
) -> Result<RepeatResult> {
    plan.validate()?;
    let chain = p.chain()?;
    let mut runs = Vec::with_capacity(plan.runs);
    let mut ledger = None;
    for r in 0..plan.runs {
        let backend = WalkBackend::for_kind(kind, &chain, hw, plan.device_seed(r, 0))?;
        let (u, l) = solve_steady_heat(p, &backend, plan.walk_seed(r), plan.workers)?;
        log::info!("1d run {r} on {kind}: {} steps", l.steps);
        runs.push(u);
        add(&mut ledger, l)?;
    }
    summarize(kind, runs, p.analytical()?, ledger.expect("runs >= 1"))
}

fn diffusion_backends(
    p: &Diffusion2D,
    kind: BackendKind,
    hw: &HardwareSettings,
    plan: &RunPlan,
    r: usize,
) -> Result<[WalkBackend; 2]> {
    let chain = p.chain()?;
    Ok([
        WalkBackend::for_kind(kind, &chain, hw, plan.device_seed(r, 0))?,
        WalkBackend::for_kind(kind, &chain, hw, plan.device_seed(r, 1))?,
    ])
}

fn repeat_with(
    p: &Diffusion2D,
    kind: BackendKind,
    plan: &RunPlan,
    backends: &[[WalkBackend; 2]],
) -> Result<RepeatResult> {
    let mut runs = Vec::with_capacity(plan.runs);
    let mut ledger = None;
    for (r, [bx, by]) in backends.iter().enumerate() {
        let (sol, l) = solve_diffusion_2d(p, [bx, by], plan.walk_seed(r), plan.workers)?;
        runs.push(sol.values);
        add(&mut ledger, l)?;
    }
    summarize(kind, runs, p.analytical_grid()?, ledger.expect("runs >= 1"))
}

/// The 2D problem solved `plan.runs` times on `kind`.
pub fn repeat_diffusion_2d(
    p: &Diffusion2D,
    kind: BackendKind,
    hw: &HardwareSettings,
    plan: &RunPlan,
) -> Result<RepeatResult> {
    plan.validate()?;
    let backends = (0..plan.runs)
        .map(|r| diffusion_backends(p, kind, hw, plan, r))
        .collect::<Result<Vec<_>>>()?;
    repeat_with(p, kind, plan, &backends)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub w: u64,
    pub backend: BackendKind,
    /// Max σ² of the across-run mean.
    pub max_sigma2: f64,
    pub run_max_sigma2: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn get(&self, w: u64, backend: BackendKind) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.w == w && r.backend == backend)
    }

    /// CSV with columns `w,backend,max_sigma2`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "w,backend,max_sigma2")?;
        for r in &self.rows {
            writeln!(out, "{},{},{:e}", r.w, r.backend, r.max_sigma2)?;
        }
        Ok(())
    }
}

/// Max σ² of the 2D problem for every walker count and backend.
///
/// Device tables are built once per backend, run and dimension and reused
/// for every walker count, so curves differ only through `w`.
pub fn convergence_sweep(
    p: &Diffusion2D,
    w_values: &[u64],
    kinds: &[BackendKind],
    hw: &HardwareSettings,
    plan: &RunPlan,
) -> Result<SweepTable> {
    plan.validate()?;
    if w_values.is_empty() || w_values.windows(2).any(|w| w[0] >= w[1]) || w_values[0] == 0 {
        return Err(Error::Config(format!("sweep walker counts must be ascending and >= 1, got {w_values:?}")));
    }
    let mut rows = Vec::with_capacity(w_values.len() * kinds.len());
    for &kind in kinds {
        let backends = (0..plan.runs)
            .map(|r| diffusion_backends(p, kind, hw, plan, r))
            .collect::<Result<Vec<_>>>()?;
        for &w in w_values {
            let q = Diffusion2D { w, ..p.clone() };
            let res = repeat_with(&q, kind, plan, &backends)?;
            log::info!("sweep w={w} {kind}: max σ² = {:e}", res.report.max);
            rows.push(SweepRow {
                w,
                backend: kind,
                max_sigma2: res.report.max,
                run_max_sigma2: res.run_max_sigma2,
            });
        }
    }
    rows.sort_by_key(|r| (r.w, r.backend));
    Ok(SweepTable { rows })
}
