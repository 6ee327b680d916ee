use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::devices::{truncated_normal, TRUNCATION_SIGMAS};
use crate::error::{Error, Result};

/// Smallest multiplicative factor a draw is clipped to.
const MIN_FACTOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseFamily {
    #[default]
    TruncatedNormal,
    /// Resample uniformly from `samples`.
    Empirical,
}

/// Multiplicative noise on the synapse output voltage.
///
/// The default (`shift = −0.16 %`, `variance = 1e-4`) sits inside the
/// measured bounds of a programmed synapse population (mean shift below
/// 0.32 %, variance below 1.38e-4).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightNoiseModel {
    /// Relative mean shift of the factor.
    pub shift: f64,
    /// Variance of the factor.
    pub variance: f64,
    #[serde(default)]
    pub family: NoiseFamily,
    /// Empirical factor table (used when `family = "empirical"`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<f64>,
}

impl Default for WeightNoiseModel {
    fn default() -> Self {
        Self {
            shift: -0.0016,
            variance: 1.0e-4,
            family: NoiseFamily::TruncatedNormal,
            samples: Vec::new(),
        }
    }
}

impl WeightNoiseModel {
    pub fn zero() -> Self {
        Self {
            shift: 0.0,
            variance: 0.0,
            family: NoiseFamily::TruncatedNormal,
            samples: Vec::new(),
        }
    }

    pub fn empirical(samples: Vec<f64>) -> Self {
        Self {
            shift: 0.0,
            variance: 0.0,
            family: NoiseFamily::Empirical,
            samples,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.family == NoiseFamily::TruncatedNormal && self.shift == 0.0 && self.variance == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shift.is_finite() && self.variance.is_finite() && self.variance >= 0.0) {
            return Err(Error::Config(format!(
                "noise shift/variance must be finite with variance >= 0, got {}/{}",
                self.shift, self.variance
            )));
        }
        if self.family == NoiseFamily::Empirical
            && (self.samples.is_empty() || self.samples.iter().any(|s| !(*s > 0.0)))
        {
            return Err(Error::Config(
                "empirical noise needs a non-empty table of positive factors".into(),
            ));
        }
        Ok(())
    }

    /// Draws one multiplicative factor.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.family {
            NoiseFamily::TruncatedNormal => {
                if self.is_zero() {
                    return 1.0;
                }
                let d = truncated_normal(rng, self.variance.sqrt(), TRUNCATION_SIGMAS);
                (1.0 + self.shift + d).max(MIN_FACTOR)
            }
            NoiseFamily::Empirical => self.samples[rng.random_range(0..self.samples.len())],
        }
    }
}

/// Sample statistics of `n` factor draws.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseStats {
    pub n: usize,
    pub mean: f64,
    /// `mean − 1`.
    pub mean_shift: f64,
    /// Unbiased sample variance.
    pub variance: f64,
}

pub fn weight_noise_stats<R: Rng + ?Sized>(m: &WeightNoiseModel, n: usize, rng: &mut R) -> NoiseStats {
    let draws: Vec<f64> = (0..n).map(|_| m.sample(rng)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    NoiseStats {
        n,
        mean,
        mean_shift: mean - 1.0,
        variance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn zero_model_is_identity() {
        let mut s = rng::stream(3);
        let m = WeightNoiseModel::zero();
        assert!((0..1000).all(|_| m.sample(&mut s) == 1.0));
    }

    #[test]
    fn default_model_within_measured_bounds() {
        let mut s = rng::stream(5);
        let st = weight_noise_stats(&WeightNoiseModel::default(), 50_000, &mut s);
        assert!(st.mean_shift.abs() < 0.0032, "{st:?}");
        assert!(st.variance < 1.38e-4, "{st:?}");
        // and actually noisy
        assert!(st.variance > 0.5e-4);
    }

    #[test]
    fn empirical_draws_come_from_table() {
        let table = vec![0.99, 1.0, 1.02];
        let m = WeightNoiseModel::empirical(table.clone());
        m.validate().unwrap();
        let mut s = rng::stream(8);
        for _ in 0..200 {
            assert!(table.contains(&m.sample(&mut s)));
        }
        assert!(WeightNoiseModel::empirical(vec![]).validate().is_err());
    }
}
