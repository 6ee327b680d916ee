//! The five experiment pipelines. Each command validates the config, writes
//! its artifacts into the output directory and returns a report; a report
//! with `passed == false` maps to the tolerance exit code.

use std::path::PathBuf;

use neuropde::cells::{
    activation_cycle, calibrate_drive, weight_noise_stats, Calibration, Move, Neuron, NoiseStats, Synapse,
    WeightNoiseModel,
};
use neuropde::pde::{
    convergence_sweep, repeat_diffusion_2d, repeat_steady_heat, RepeatResult, RunPlan, SweepTable,
};
use neuropde::rng::{derive_seed, stream};
use neuropde::walk::{BackendKind, WalkBackend};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{OutDir, Stamp, PLOT2D_SCHEMA_ID};

const TAG_NOISE_MC: u64 = 0x006e_6f69_7365;
const TAG_HISTORY: u64 = 0x6869_7374;
const TAG_VERIFY: u64 = 0x7665_7269_6679;

fn open(cfg: &RunConfig) -> Result<OutDir, CliError> {
    cfg.validate()?;
    OutDir::create(
        &cfg.out_dir,
        Stamp {
            config_hash: cfg.hash(),
            master_seed: cfg.master_seed,
        },
    )
}

fn plan(cfg: &RunConfig) -> RunPlan {
    RunPlan {
        runs: cfg.runs,
        master_seed: cfg.master_seed,
        workers: cfg.workers(),
    }
}

/// Outcome of `solve-1d` or `solve-2d`.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub result: RepeatResult,
    pub tolerance: f64,
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

impl SolveReport {
    pub fn max_sigma2(&self) -> f64 {
        self.result.report.max
    }

    pub fn summary(&self, what: &str) -> String {
        format!(
            "{what} backend={} runs={} steps={} max_sigma2={:e} tolerance={:e} {}",
            self.result.backend,
            self.result.report.runs,
            self.result.ledger.steps,
            self.max_sigma2(),
            self.tolerance,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

fn variance_json(res: &RepeatResult, tolerance: f64, passed: bool) -> serde_json::Value {
    json!({
        "backend": res.backend,
        "runs": res.report.runs,
        "max_sigma2": res.report.max,
        "mean_sigma2": res.report.mean,
        "sigma2": res.report.sigma2,
        "run_max_sigma2": res.run_max_sigma2,
        "tolerance": tolerance,
        "passed": passed,
    })
}

pub fn cmd_solve_1d(cfg: &RunConfig) -> Result<SolveReport, CliError> {
    let out = open(cfg)?;
    let p = cfg.solve_1d.problem();
    let kind = cfg.backend;
    let res = repeat_steady_heat(&p, kind, &cfg.hardware(), &plan(cfg))?;
    let tolerance = cfg.solve_1d.tolerance.get(kind);
    let passed = res.report.max < tolerance;
    let xs = p.chain()?.positions();

    let mut files = vec![out.csv(&format!("solve_1d_{kind}.csv"), |w| {
        use std::io::Write;
        writeln!(w, "x,u_rw_mean,u_an,sigma2")?;
        for (i, x) in xs.iter().enumerate() {
            writeln!(w, "{x},{},{},{}", res.mean[i], res.analytical[i], res.report.sigma2[i])?;
        }
        Ok(())
    })?];
    files.push(out.json(&format!("variance_1d_{kind}.json"), variance_json(&res, tolerance, passed))?);
    let ledger = res.ledger.clone().with_baselines(cfg.baselines.clone());
    files.push(out.json(&format!("ledger_1d_{kind}.json"), ledger.to_json())?);
    Ok(SolveReport {
        result: res,
        tolerance,
        passed,
        files,
    })
}

pub fn cmd_solve_2d(cfg: &RunConfig) -> Result<SolveReport, CliError> {
    let out = open(cfg)?;
    let p = cfg.solve_2d.problem();
    let kind = cfg.backend;
    let res = repeat_diffusion_2d(&p, kind, &cfg.hardware(), &plan(cfg))?;
    let tolerance = cfg.solve_2d.tolerance.get(kind);
    let passed = res.report.max < tolerance;
    let xs = p.chain()?.positions();
    let n = xs.len();

    let mut files = vec![out.csv(&format!("solve_2d_{kind}.csv"), |w| {
        use std::io::Write;
        writeln!(w, "x,y,c_rw,c_an,sigma2")?;
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in xs.iter().enumerate() {
                let k = i * n + j;
                writeln!(w, "{x},{y},{},{},{}", res.mean[k], res.analytical[k], res.report.sigma2[k])?;
            }
        }
        Ok(())
    })?];
    let rows = |v: &[f64]| v.chunks(n).map(<[f64]>::to_vec).collect::<Vec<_>>();
    files.push(out.json(
        &format!("plot_2d_{kind}.json"),
        json!({
            "schema": PLOT2D_SCHEMA_ID,
            "backend": kind,
            "t": p.t(),
            "xs": xs,
            "ys": xs,
            "c_rw": rows(&res.mean),
            "c_an": rows(&res.analytical),
            "max_sigma2": res.report.max,
        }),
    )?);
    files.push(out.json(&format!("variance_2d_{kind}.json"), variance_json(&res, tolerance, passed))?);
    let ledger = res.ledger.clone().with_baselines(cfg.baselines.clone());
    files.push(out.json(&format!("ledger_2d_{kind}.json"), ledger.to_json())?);
    Ok(SolveReport {
        result: res,
        tolerance,
        passed,
        files,
    })
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub table: SweepTable,
    pub files: Vec<PathBuf>,
}

/// Max σ² of the 2D problem over `sweep.w_values` × `sweep.backends`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<SweepReport, CliError> {
    let out = open(cfg)?;
    let table = convergence_sweep(
        &cfg.solve_2d.problem(),
        &cfg.sweep.w_values,
        &cfg.sweep.backends,
        &cfg.hardware(),
        &plan(cfg),
    )?;
    let files = vec![
        out.csv("sweep.csv", |w| table.write_csv(w))?,
        out.json("sweep.json", json!({ "rows": table.rows }))?,
    ];
    Ok(SweepReport { table, files })
}

#[derive(Clone, Debug)]
pub struct DevicesMcReport {
    pub stats: NoiseStats,
    /// Stay frequency of the exported activation history.
    pub pooled_stay: f64,
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

/// Weight-noise statistics and an activation history of the hw-pv devices
/// on the 1D chain.
pub fn cmd_devices_mc(cfg: &RunConfig) -> Result<DevicesMcReport, CliError> {
    let out = open(cfg)?;
    let mc = &cfg.devices_mc;
    let mut rng = stream(derive_seed(cfg.master_seed, &[TAG_NOISE_MC]));
    let samples = usize::try_from(mc.samples).map_err(|_| CliError::Config("devices_mc.samples too large".into()))?;
    let stats = weight_noise_stats(&cfg.cells.noise, samples, &mut rng);
    let passed = stats.mean_shift.abs() < mc.mean_shift_bound && stats.variance < mc.variance_bound;

    let mut hw = cfg.hardware().layers_for(BackendKind::HwPv)?;
    hw.history_trials = mc.history_trials;
    let chain = cfg.solve_1d.problem().chain()?;
    let (_, history) = WalkBackend::hardware(&chain, &hw, derive_seed(cfg.master_seed, &[TAG_HISTORY]))?;
    let pooled_stay = history.pooled_stay();

    let files = vec![
        out.json(
            "weight_noise.json",
            json!({
                "samples": stats.n,
                "mean": stats.mean,
                "mean_shift": stats.mean_shift,
                "variance": stats.variance,
                "mean_shift_bound": mc.mean_shift_bound,
                "variance_bound": mc.variance_bound,
                "passed": passed,
                "history_trials": mc.history_trials,
                "history_pooled_stay": pooled_stay,
                "history_sites": history.sites,
            }),
        )?,
        out.csv("activation_history.csv", |w| history.write_csv(w))?,
    ];
    Ok(DevicesMcReport {
        stats,
        pooled_stay,
        passed,
        files,
    })
}

#[derive(Clone, Debug)]
pub struct CalibrateReport {
    pub target_ps: f64,
    pub calibration: Calibration,
    pub i_ratio: f64,
    /// Weight actually reached by program-and-verify.
    pub programmed_w: f64,
    pub program_pulses: usize,
    /// Stay probability implied by the programmed weight.
    pub expected_ps: f64,
    pub cycles: u64,
    pub measured_ps: f64,
    /// `expected_ps ± 3σ` of the binomial stay count.
    pub ci: (f64, f64),
    pub passed: bool,
    pub files: Vec<PathBuf>,
}

impl CalibrateReport {
    pub fn summary(&self) -> String {
        format!(
            "calibrate ps={} i_drive={:e} A i/i_c0={:.4} w={:.4} v_wr={:.4} V programmed_w={:.4} ({} pulses) \
             expected_ps={:.4} measured_ps={:.4} over {} cycles, 3-sigma CI [{:.4}, {:.4}] {}",
            self.target_ps,
            self.calibration.i_drive,
            self.i_ratio,
            self.calibration.w,
            self.calibration.v_wr,
            self.programmed_w,
            self.program_pulses,
            self.expected_ps,
            self.measured_ps,
            self.cycles,
            self.ci.0,
            self.ci.1,
            if self.passed { "PASS" } else { "FAIL" }
        )
    }
}

/// Drive operating point for `calibrate.ps`, verified by activation cycles
/// on nominal devices without voltage noise.
pub fn cmd_calibrate(cfg: &RunConfig) -> Result<CalibrateReport, CliError> {
    let out = open(cfg)?;
    let hw = cfg.hardware();
    let (mtj, drive) = (&hw.mtj, &hw.drive);
    let target = cfg.calibrate.ps;
    let cal = calibrate_drive(target, mtj, drive.pulse_width_s, drive)?;

    let mut syn = Synapse::new(hw.ftj.clone(), hw.r_series());
    let pulses = syn.program(cal.w, &hw.programming)?;
    let programmed_w = syn.weight();
    let i = syn.output(drive.v_read)? / (2.0 * mtj.r_p + drive.r_access);
    let expected = (-2.0 * drive.pulse_width_s / mtj.mean_switching_time(i)?).exp();

    let cycles = cfg.calibrate.verify_cycles;
    let quiet = WeightNoiseModel::zero();
    let mut rng = stream(derive_seed(cfg.master_seed, &[TAG_VERIFY]));
    let mut stays = 0u64;
    for _ in 0..cycles {
        let mut left = Neuron::new(0, mtj.clone());
        let mut center = Neuron::active(1, mtj.clone());
        let mut right = Neuron::new(2, mtj.clone());
        let o = activation_cycle(&mut left, &mut center, &mut right, &syn, &quiet, drive, &mut rng)?;
        stays += u64::from(o.result == Move::Stayed);
    }
    let measured = stays as f64 / cycles as f64;
    let half = 3.0 * (expected * (1.0 - expected) / cycles as f64).sqrt();
    let ci = (expected - half, expected + half);
    let passed = measured >= ci.0 && measured <= ci.1;

    let report = CalibrateReport {
        target_ps: target,
        calibration: cal,
        i_ratio: cal.i_drive / mtj.i_c0,
        programmed_w,
        program_pulses: pulses,
        expected_ps: expected,
        cycles,
        measured_ps: measured,
        ci,
        passed,
        files: Vec::new(),
    };
    let file = out.json(
        "calibration.json",
        json!({
            "ps": target,
            "i_drive": cal.i_drive,
            "i_over_i_c0": report.i_ratio,
            "w": cal.w,
            "v_wr": cal.v_wr,
            "programmed_w": programmed_w,
            "program_pulses": pulses,
            "expected_ps": expected,
            "verify_cycles": cycles,
            "measured_ps": measured,
            "ci": [ci.0, ci.1],
            "passed": passed,
        }),
    )?;
    Ok(CalibrateReport {
        files: vec![file],
        ..report
    })
}
