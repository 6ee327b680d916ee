//! Parallel random-walk engine, its stochastic backends, and the per-step
//! time/energy ledger.

mod backend;
mod engine;
mod ledger;

pub use backend::{step, BackendKind, HardwareSettings, StepCost, StepResult, StepTable, WalkBackend};
pub use engine::{run_walkers, PassageMatrix, WalkConfig, WalkMode, WalkOutput, DEFAULT_MAX_STEPS};
pub use ledger::{Baseline, BaselineRatio, Ledger, LedgerReport};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::WeightNoiseModel;
    use crate::chain::{build_chain, MarkovChain1D, RightBoundary};
    use crate::devices::VariationSpec;
    use crate::error::Error;
    use crate::rng;
    use proptest::prelude::*;

    fn paper_chain(rb: RightBoundary) -> MarkovChain1D {
        build_chain(2.0, 50, 0.00038, rb).unwrap()
    }

    fn ideal_hardware() -> HardwareSettings {
        HardwareSettings {
            variation: VariationSpec::zero(),
            noise: WeightNoiseModel::zero(),
            ..HardwareSettings::default()
        }
    }

    #[test]
    fn left_edge_never_leaves_grid() {
        let b = WalkBackend::software(&paper_chain(RightBoundary::Absorbing));
        let mut s = rng::stream(1);
        for _ in 0..100_000 {
            match step(0, &b, &mut s).unwrap() {
                StepResult::NewPos(p) => assert!(p <= 1),
                StepResult::Absorbed => panic!("absorbed from 0"),
            }
        }
    }

    #[test]
    fn invalid_positions_are_rejected() {
        let b = WalkBackend::software(&paper_chain(RightBoundary::Absorbing));
        let mut s = rng::stream(1);
        assert!(matches!(step(49, &b, &mut s), Err(Error::Domain(_))));
        assert!(matches!(step(50, &b, &mut s), Err(Error::Domain(_))));
    }

    fn stay_fraction(b: &WalkBackend, pos: usize, n: u64, seed: u64) -> f64 {
        let mut s = rng::stream(seed);
        let stays = (0..n)
            .filter(|_| step(pos, b, &mut s).unwrap() == StepResult::NewPos(pos))
            .count();
        stays as f64 / n as f64
    }

    #[test]
    fn software_stay_fraction_matches_ps() {
        let c = paper_chain(RightBoundary::Absorbing);
        let b = WalkBackend::software(&c);
        let n = 1_000_000;
        let f = stay_fraction(&b, 20, n, 3);
        let ci = 3.0 * (c.ps * (1.0 - c.ps) / n as f64).sqrt();
        assert!((f - c.ps).abs() < ci, "{f} vs {}", c.ps);
    }

    #[test]
    fn ideal_hardware_matches_software() {
        let c = paper_chain(RightBoundary::Absorbing);
        let settings = ideal_hardware();
        let (hw, hist) = WalkBackend::hardware(&c, &settings, 11).unwrap();
        let sw = WalkBackend::software(&c);
        let n = 200_000;
        let (fh, fs) = (stay_fraction(&hw, 20, n, 5), stay_fraction(&sw, 20, n, 6));
        let interior: u64 = hist.sites.iter().filter(|s| s.index > 0).map(|s| s.trials).sum();
        let p = c.ps;
        // the hardware probabilities are themselves estimated from the table
        let se = (p * (1.0 - p) * (2.0 / n as f64 + 1.0 / interior as f64)).sqrt();
        assert!((fh - fs).abs() < 3.0 * se, "{fh} vs {fs}");
        let r = hw.row(20);
        assert_eq!(r.left, r.right);
        assert_eq!(hw.row(0).left, 0.0);
    }

    #[test]
    fn per_position_policy_keeps_raw_site_frequencies() {
        let c = build_chain(2.0, 6, 0.0264, RightBoundary::Absorbing).unwrap();
        let settings = HardwareSettings {
            policy: crate::cells::DevicePolicy::PerPosition,
            history_trials: 5000,
            ..HardwareSettings::default()
        };
        let (hw, hist) = WalkBackend::hardware(&c, &settings, 2).unwrap();
        assert_eq!(hist.sites.len(), 5);
        for st in &hist.sites {
            let r = hw.row(st.index);
            assert_eq!(r.stay, st.p_stay());
            assert_eq!(r.left, st.p_left());
        }
    }

    #[test]
    fn start_at_absorbing_takes_no_steps() {
        let c = build_chain(1.0, 2, 0.01, RightBoundary::Absorbing).unwrap();
        let b = WalkBackend::software(&c);
        let (out, ledger) = run_walkers(&WalkConfig::steady(1), &b, 9, 1).unwrap();
        let pm = out.passage().unwrap();
        assert_eq!(pm.row_total(1), 0);
        assert_eq!(ledger.steps, pm.row_total(0));
        assert!(pm.get(0, 0) >= 1);
    }

    #[test]
    fn rows_count_every_step() {
        let c = build_chain(1.0, 8, 0.004, RightBoundary::Absorbing).unwrap();
        let b = WalkBackend::software(&c);
        let (out, ledger) = run_walkers(&WalkConfig::steady(300), &b, 4, 2).unwrap();
        let pm = out.passage().unwrap();
        let total: u64 = (0..8).map(|i| pm.row_total(i)).sum();
        assert_eq!(total, ledger.steps);
        assert_eq!(pm.row(7).iter().sum::<u64>(), 0);
        // every walker counts its own start
        for i in 0..7 {
            assert!(pm.get(i, i) >= 300);
        }
        let mut csv = Vec::new();
        pm.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv).unwrap().starts_with("i,j,count\n"));
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let c = build_chain(1.0, 12, 0.002, RightBoundary::Absorbing).unwrap();
        let b = WalkBackend::software(&c);
        let cfg = WalkConfig::steady(1000);
        let one = run_walkers(&cfg, &b, 77, 1).unwrap();
        let two = run_walkers(&cfg, &b, 77, 2).unwrap();
        let eight = run_walkers(&cfg, &b, 77, 8).unwrap();
        assert_eq!(one, two);
        assert_eq!(one, eight);
        let other = run_walkers(&cfg, &b, 78, 1).unwrap();
        assert_ne!(one.0, other.0);
    }

    #[test]
    fn mean_absorption_time_matches_fundamental_matrix() {
        // (I − Q)·τ = 1 solved by the Thomas algorithm on the transient block
        let c = build_chain(2.0, 20, 0.0024, RightBoundary::Absorbing).unwrap();
        let m = c.n - 1;
        let p = c.transition_matrix();
        let (mut a, mut bd, mut cu, mut d) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![1.0; m]);
        for i in 0..m {
            bd[i] = 1.0 - p[i][i];
            if i > 0 {
                a[i] = -p[i][i - 1];
            }
            if i + 1 < m {
                cu[i] = -p[i][i + 1];
            }
        }
        for i in 1..m {
            let w = a[i] / bd[i - 1];
            bd[i] -= w * cu[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut tau = vec![0.0; m];
        tau[m - 1] = d[m - 1] / bd[m - 1];
        for i in (0..m - 1).rev() {
            tau[i] = (d[i] - cu[i] * tau[i + 1]) / bd[i];
        }
        let b = WalkBackend::software(&c);
        let w = 10_000;
        let (out, _) = run_walkers(&WalkConfig::steady(w), &b, 1, 1).unwrap();
        let mean = out.passage().unwrap().row_total(0) as f64 / w as f64;
        assert!((mean / tau[0] - 1.0).abs() < 0.1, "{mean} vs {}", tau[0]);
    }

    #[test]
    fn cap_names_the_walker() {
        let c = paper_chain(RightBoundary::Absorbing);
        let b = WalkBackend::software(&c);
        let cfg = WalkConfig {
            max_steps: 3,
            ..WalkConfig::steady(2)
        };
        match run_walkers(&cfg, &b, 1, 1) {
            Err(Error::CapExceeded { start, walker, cap }) => {
                assert_eq!((start, walker, cap), (0, 0, 3));
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn time_dependent_conserves_walkers() {
        let c = paper_chain(RightBoundary::Reflecting);
        let b = WalkBackend::software(&c);
        let (out, ledger) = run_walkers(&WalkConfig::time_dependent(5000, 25, 80), &b, 3, 2).unwrap();
        assert_eq!(out.terminal().unwrap().iter().sum::<u64>(), 5000);
        assert_eq!(ledger.steps, 400_000);
        let absorbing = paper_chain(RightBoundary::Absorbing);
        let b = WalkBackend::software(&absorbing);
        assert!(run_walkers(&WalkConfig::time_dependent(5, 25, 8), &b, 3, 1).is_err());
    }

    #[test]
    fn zero_workers_is_config_error() {
        let b = WalkBackend::software(&paper_chain(RightBoundary::Absorbing));
        assert!(matches!(run_walkers(&WalkConfig::steady(1), &b, 1, 0), Err(Error::Config(_))));
    }

    #[test]
    fn backend_kind_names_round_trip() {
        for k in BackendKind::ALL {
            assert_eq!(k.name().parse::<BackendKind>().unwrap(), k);
        }
        assert!("gpu".parse::<BackendKind>().is_err());
    }

    proptest! {
        #[test]
        fn no_teleports(pos in 0usize..49, seed in any::<u64>()) {
            let b = WalkBackend::software(&paper_chain(RightBoundary::Absorbing));
            let mut s = rng::stream(seed);
            match step(pos, &b, &mut s).unwrap() {
                StepResult::NewPos(p) => prop_assert!(p.abs_diff(pos) <= 1),
                StepResult::Absorbed => prop_assert_eq!(pos, 48),
            }
        }
    }
}
