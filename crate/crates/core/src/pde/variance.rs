use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    /// `|mean_i − analytical_i|²` per position.
    pub sigma2: Vec<f64>,
    pub max: f64,
    pub mean: f64,
    /// Runs averaged into the mean solution.
    pub runs: usize,
}

/// Squared deviation of a (single or across-run mean) solution from the
/// analytical values.
pub fn variance(mean_solution: &[f64], analytical: &[f64]) -> Result<VarianceReport> {
    if mean_solution.len() != analytical.len() {
        return Err(Error::Shape {
            expected: analytical.len(),
            got: mean_solution.len(),
        });
    }
    if analytical.is_empty() {
        return Err(Error::Shape { expected: 1, got: 0 });
    }
    let sigma2: Vec<f64> = mean_solution
        .iter()
        .zip(analytical)
        .map(|(m, a)| (m - a).powi(2))
        .collect();
    let max = sigma2.iter().copied().fold(0.0, f64::max);
    let mean = sigma2.iter().sum::<f64>() / sigma2.len() as f64;
    Ok(VarianceReport {
        sigma2,
        max,
        mean,
        runs: 1,
    })
}

/// Position-wise mean of equally sized runs. Each position is summed in
/// sorted order, so the result does not depend on run order.
pub fn mean_across_runs(runs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = runs
        .first()
        .ok_or(Error::Shape { expected: 1, got: 0 })?;
    if let Some(bad) = runs.iter().find(|r| r.len() != first.len()) {
        return Err(Error::Shape {
            expected: first.len(),
            got: bad.len(),
        });
    }
    let mut column = vec![0.0; runs.len()];
    Ok((0..first.len())
        .map(|i| {
            for (c, r) in column.iter_mut().zip(runs) {
                *c = r[i];
            }
            column.sort_by(f64::total_cmp);
            column.iter().sum::<f64>() / runs.len() as f64
        })
        .collect())
}

/// The σ² report of the across-run mean.
pub fn variance_across_runs(runs: &[Vec<f64>], analytical: &[f64]) -> Result<VarianceReport> {
    let mean = mean_across_runs(runs)?;
    let mut report = variance(&mean, analytical)?;
    report.runs = runs.len();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identical_is_zero_and_offset_is_square() {
        let a = vec![0.5, 1.0, 2.0];
        let r = variance(&a, &a).unwrap();
        assert!(r.sigma2.iter().all(|&s| s == 0.0));
        let shifted: Vec<f64> = a.iter().map(|v| v + 0.01).collect();
        let r = variance(&shifted, &a).unwrap();
        assert!(r.sigma2.iter().all(|&s| (s - 1e-4).abs() < 1e-15));
        assert!((r.max - 1e-4).abs() < 1e-15 && (r.mean - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        assert!(matches!(variance(&[1.0], &[1.0, 2.0]), Err(Error::Shape { .. })));
        assert!(mean_across_runs(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(mean_across_runs(&[]).is_err());
    }

    #[test]
    fn runs_are_counted() {
        let runs = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let r = variance_across_runs(&runs, &[2.0, 3.0]).unwrap();
        assert_eq!(r.runs, 2);
        assert_eq!(r.max, 0.0);
    }

    proptest! {
        #[test]
        fn permuting_runs_changes_nothing(
            runs in prop::collection::vec(prop::collection::vec(-10.0f64..10.0, 4), 1..12),
            rot in 0usize..12,
        ) {
            let an = vec![0.1, 0.2, 0.3, 0.4];
            let a = variance_across_runs(&runs, &an).unwrap();
            let mut shuffled = runs.clone();
            let k = rot % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            let b = variance_across_runs(&shuffled, &an).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn sigma2_is_nonnegative(m in prop::collection::vec(-1e3f64..1e3, 1..20)) {
            let an: Vec<f64> = m.iter().map(|v| v * 0.5 + 1.0).collect();
            let r = variance(&m, &an).unwrap();
            prop_assert!(r.sigma2.iter().all(|&s| s >= 0.0) && r.max >= r.mean);
        }
    }
}
