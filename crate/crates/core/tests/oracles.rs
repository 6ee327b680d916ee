//! Walk statistics against exact Markov-chain results.

use neuropde::cells::WeightNoiseModel;
use neuropde::chain::{build_chain, MarkovChain1D, RightBoundary};
use neuropde::devices::VariationSpec;
use neuropde::walk::{run_walkers, HardwareSettings, WalkBackend, WalkConfig};
use statrs::distribution::{ChiSquared, ContinuousCDF};

const N: usize = 11;

fn dt() -> f64 {
    0.2375 / (N * N) as f64
}

/// Expected absorption time from every transient state, by solving
/// `(I − Q)·t = 1` with the tridiagonal (Thomas) algorithm.
fn expected_steps(chain: &MarkovChain1D) -> Vec<f64> {
    let p = chain.transition_matrix();
    let m = chain.absorbing().unwrap();
    let (mut c, mut d) = (vec![0.0; m], vec![0.0; m]);
    for i in 0..m {
        let a = if i > 0 { -p[i][i - 1] } else { 0.0 };
        let b = 1.0 - p[i][i];
        let up = if i + 1 < m { -p[i][i + 1] } else { 0.0 };
        let denom = b - a * if i > 0 { c[i - 1] } else { 0.0 };
        c[i] = up / denom;
        d[i] = (1.0 - a * if i > 0 { d[i - 1] } else { 0.0 }) / denom;
    }
    let mut t = vec![0.0; m];
    for i in (0..m).rev() {
        t[i] = d[i] - if i + 1 < m { c[i] * t[i + 1] } else { 0.0 };
    }
    t
}

#[test]
fn passage_row_totals_match_absorption_times() {
    let chain = build_chain(1.0, N, dt(), RightBoundary::Absorbing).unwrap();
    let t = expected_steps(&chain);
    let w = 4000;
    let (out, ledger) = run_walkers(&WalkConfig::steady(w), &WalkBackend::software(&chain), 11, 1).unwrap();
    let pm = out.passage().unwrap();
    let total: u64 = (0..N).map(|i| pm.row_total(i)).sum();
    assert_eq!(total, ledger.steps);
    for (i, &ti) in t.iter().enumerate() {
        let mean = pm.row_total(i) as f64 / w as f64;
        // absorption times are heavy tailed; 5% is several standard errors here
        assert!((mean - ti).abs() < 0.05 * ti, "start {i}: {mean} vs {ti}");
    }
}

fn chi2_p(observed: &[u64], expected: &[f64]) -> f64 {
    let (stat, dof) = observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .fold((0.0, 0usize), |(s, k), (&o, &e)| (s + (o as f64 - e).powi(2) / e, k + 1));
    1.0 - ChiSquared::new((dof - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn ideal_hardware_and_software_share_the_k_step_law() {
    let chain = build_chain(1.0, N, dt(), RightBoundary::Reflecting).unwrap();
    let ideal = HardwareSettings {
        variation: VariationSpec::zero(),
        noise: WeightNoiseModel::zero(),
        history_trials: 200_000,
        ..HardwareSettings::default()
    };
    let (hw, _) = WalkBackend::hardware(&chain, &ideal, 5).unwrap();
    let p = chain.transition_matrix();
    let mut row = vec![0.0; N];
    row[5] = 1.0;
    for _ in 0..5 {
        row = (0..N).map(|j| (0..N).map(|i| row[i] * p[i][j]).sum()).collect();
    }
    let w = 100_000u64;
    let cfg = WalkConfig::time_dependent(w, 5, 5);
    for backend in [WalkBackend::software(&chain), hw] {
        let (out, _) = run_walkers(&cfg, &backend, 19, 1).unwrap();
        let expected: Vec<f64> = row.iter().map(|q| q * w as f64).collect();
        let pval = chi2_p(out.terminal().unwrap(), &expected);
        assert!(pval > 1e-3, "p = {pval}");
    }
}
