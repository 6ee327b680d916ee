//! Process-variation sampling for MTJ instances.
//!
//! Perturbed geometry propagates to the model parameters through a
//! first-order sensitivity map:
//! - `delta` scales with `t_fl` (switching volume at fixed diameter),
//! - `r_p` changes by `2·Δt_tb/t_tb` (tunnelling dominance),
//! - `r_ap` follows from the perturbed `tmr`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mtj::MtjParams;
use crate::error::{Error, Result};

/// Draws are truncated at this many standard deviations.
pub const TRUNCATION_SIGMAS: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariationFamily {
    #[default]
    TruncatedNormal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VariationSpec {
    /// σ of the free-layer thickness (nm).
    pub sigma_t_fl: f64,
    /// σ of the tunnel-barrier thickness (nm).
    pub sigma_t_tb: f64,
    /// σ of the TMR ratio.
    pub sigma_tmr: f64,
    #[serde(default)]
    pub family: VariationFamily,
}

impl VariationSpec {
    /// No variation: instances equal the nominal device.
    pub fn zero() -> Self {
        Self {
            sigma_t_fl: 0.0,
            sigma_t_tb: 0.0,
            sigma_tmr: 0.0,
            family: VariationFamily::TruncatedNormal,
        }
    }

    /// σ = `fraction` of each nominal value.
    pub fn relative(nominal: &MtjParams, fraction: f64) -> Self {
        Self {
            sigma_t_fl: fraction * nominal.t_fl,
            sigma_t_tb: fraction * nominal.t_tb,
            sigma_tmr: fraction * nominal.tmr,
            family: VariationFamily::TruncatedNormal,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sigma_t_fl == 0.0 && self.sigma_t_tb == 0.0 && self.sigma_tmr == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_t_fl", self.sigma_t_fl),
            ("sigma_t_tb", self.sigma_t_tb),
            ("sigma_tmr", self.sigma_tmr),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!("variation.{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for VariationSpec {
    /// 3 % of the default device's nominal values.
    fn default() -> Self {
        Self::relative(&MtjParams::default(), 0.03)
    }
}

/// Zero-mean normal draw with standard deviation `sigma`, truncated at
/// `±k·sigma` by rejection. Returns exactly 0 when `sigma == 0`.
pub fn truncated_normal<R: Rng + ?Sized>(rng: &mut R, sigma: f64, k: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    loop {
        let z: f64 = rng.sample(StandardNormal);
        if z.abs() <= k {
            return sigma * z;
        }
    }
}

/// Samples one physical device from the nominal design.
pub fn sample_device_instance<R: Rng + ?Sized>(
    nominal: &MtjParams,
    vs: &VariationSpec,
    rng: &mut R,
) -> MtjParams {
    let d_fl = truncated_normal(rng, vs.sigma_t_fl, TRUNCATION_SIGMAS);
    let d_tb = truncated_normal(rng, vs.sigma_t_tb, TRUNCATION_SIGMAS);
    let d_tmr = truncated_normal(rng, vs.sigma_tmr, TRUNCATION_SIGMAS);

    let mut p = nominal.clone();
    if d_fl != 0.0 {
        p.t_fl = nominal.t_fl + d_fl;
        p.delta = nominal.delta * p.t_fl / nominal.t_fl;
    }
    if d_tb != 0.0 {
        p.t_tb = nominal.t_tb + d_tb;
        p.r_p = nominal.r_p * (1.0 + 2.0 * d_tb / nominal.t_tb);
    }
    if d_tmr != 0.0 {
        p.tmr = nominal.tmr + d_tmr;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn zero_spec_returns_nominal() {
        let nominal = MtjParams::default();
        let mut s = rng::stream(1);
        for _ in 0..100 {
            assert_eq!(sample_device_instance(&nominal, &VariationSpec::zero(), &mut s), nominal);
        }
    }

    #[test]
    fn table_sigma_is_three_percent() {
        let vs = VariationSpec::default();
        assert!((vs.sigma_t_fl - 0.039).abs() < 1e-15);
        assert!((vs.sigma_t_tb - 0.0255).abs() < 1e-15);
        assert!((vs.sigma_tmr - 0.06).abs() < 1e-15);
    }

    #[test]
    fn free_layer_statistics_over_fifty_thousand_draws() {
        let nominal = MtjParams::default();
        let vs = VariationSpec::default();
        let mut s = rng::stream(2024);
        let n = 50_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let d = sample_device_instance(&nominal, &vs, &mut s);
            assert!((d.t_fl - 1.3).abs() <= 0.117 + 1e-12);
            assert!((d.t_tb - 0.85).abs() <= 3.0 * 0.0255 + 1e-12);
            assert!((d.tmr - 2.0).abs() <= 0.18 + 1e-12);
            assert!((d.delta / nominal.delta - d.t_fl / nominal.t_fl).abs() < 1e-12);
            assert!(d.r_ap() > d.r_p);
            sum += d.t_fl;
        }
        let mean = sum / n as f64;
        assert!((mean - 1.3).abs() < 3.0 * 0.039 / (n as f64).sqrt(), "{mean}");
    }

    #[test]
    fn negative_sigma_rejected() {
        let mut vs = VariationSpec::zero();
        vs.sigma_tmr = -0.1;
        assert!(vs.validate().is_err());
    }
}
