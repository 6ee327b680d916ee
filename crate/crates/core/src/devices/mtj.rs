//! Stochastic STT-MTJ switching in the thermally activated regime.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// MTJ compact-model parameters.
///
/// Geometry in nm; `tau0` in s; `i_c0` in A; `r_p` in Ω. `tmr` is a ratio
/// (2.0 means 200 %).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MtjParams {
    /// Free-layer thickness (nm).
    pub t_fl: f64,
    /// Critical diameter (nm). Stored for completeness; no equation uses it.
    pub cd: f64,
    /// Tunnel-barrier thickness (nm).
    pub t_tb: f64,
    /// Tunnelling magnetoresistance ratio.
    pub tmr: f64,
    /// Attempt time (s).
    pub tau0: f64,
    /// Thermal stability factor.
    pub delta: f64,
    /// Critical switching current at 0 K (A).
    pub i_c0: f64,
    /// Parallel-state resistance (Ω).
    pub r_p: f64,
}

impl Default for MtjParams {
    fn default() -> Self {
        Self {
            t_fl: 1.3,
            cd: 32.0,
            t_tb: 0.85,
            tmr: 2.0,
            tau0: 1e-9,
            delta: 40.0,
            i_c0: 50e-6,
            r_p: 5e3,
        }
    }
}

/// Magnetisation of the free layer relative to the fixed layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MtjState {
    Parallel,
    AntiParallel,
}

impl MtjParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("t_fl", self.t_fl),
            ("cd", self.cd),
            ("t_tb", self.t_tb),
            ("tmr", self.tmr),
            ("tau0", self.tau0),
            ("delta", self.delta),
            ("i_c0", self.i_c0),
            ("r_p", self.r_p),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("mtj.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Antiparallel resistance `r_p·(1 + tmr)`.
    pub fn r_ap(&self) -> f64 {
        self.r_p * (1.0 + self.tmr)
    }

    pub fn resistance(&self, state: MtjState) -> f64 {
        match state {
            MtjState::Parallel => self.r_p,
            MtjState::AntiParallel => self.r_ap(),
        }
    }

    fn check_current(&self, i: f64) -> Result<()> {
        if i > 0.0 && i < self.i_c0 {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "current {i:e} A outside thermally activated regime (0, {:e})",
                self.i_c0
            )))
        }
    }

    /// Mean switching time `τ(I) = τ₀·exp[Δ(1 − I/I_c0)²]`.
    pub fn mean_switching_time(&self, i: f64) -> Result<f64> {
        self.check_current(i)?;
        let x = 1.0 - i / self.i_c0;
        Ok(self.tau0 * (self.delta * x * x).exp())
    }

    /// Probability of switching within `t` seconds under current `i`.
    pub fn switching_probability(&self, i: f64, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("pulse duration {t:e} s is negative")));
        }
        let tau = self.mean_switching_time(i)?;
        Ok(-(-t / tau).exp_m1())
    }

    /// Draws a switching time from the exponential law with mean `τ(i)`.
    pub fn sample_switch_time<R: Rng + ?Sized>(&self, i: f64, rng: &mut R) -> Result<f64> {
        let tau = self.mean_switching_time(i)?;
        let e: f64 = rng.sample(Exp1);
        Ok(tau * e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    fn p() -> MtjParams {
        MtjParams::default()
    }

    #[test]
    fn zero_current_is_rejected() {
        assert!(matches!(p().mean_switching_time(0.0), Err(Error::Domain(_))));
        assert!(matches!(p().mean_switching_time(-1e-6), Err(Error::Domain(_))));
        assert!(matches!(p().mean_switching_time(50e-6), Err(Error::Domain(_))));
    }

    #[test]
    fn tau_approaches_attempt_time_near_critical_current() {
        let m = p();
        let tau = m.mean_switching_time(m.i_c0 * (1.0 - 1e-9)).unwrap();
        assert!((tau - 1e-9).abs() < 1e-18);
    }

    #[test]
    fn tau_at_eighty_percent_critical_current() {
        let m = p();
        let tau = m.mean_switching_time(0.8 * m.i_c0).unwrap();
        // 40 · 0.2² = 1.6
        assert!((tau - 1.6f64.exp() * 1e-9).abs() < 1e-20);
        assert!((tau - 4.953e-9).abs() < 1e-12);
    }

    #[test]
    fn switching_probability_examples() {
        let m = p();
        let i = 0.8 * m.i_c0;
        assert_eq!(m.switching_probability(i, 0.0).unwrap(), 0.0);
        let tau = m.mean_switching_time(i).unwrap();
        let at_tau = m.switching_probability(i, tau).unwrap();
        assert!((at_tau - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        let at_5ns = m.switching_probability(i, 5e-9).unwrap();
        assert!((at_5ns - 0.6356).abs() < 5e-5, "{at_5ns}");
        assert!(m.switching_probability(i, -1e-9).is_err());
    }

    #[test]
    fn resistances() {
        let m = p();
        assert_eq!(m.resistance(MtjState::Parallel), 5e3);
        assert_eq!(m.resistance(MtjState::AntiParallel), 15e3);
    }

    #[test]
    fn sampled_times_follow_exponential_law() {
        let m = p();
        let i = 0.8 * m.i_c0;
        let tau = m.mean_switching_time(i).unwrap();
        let mut s = rng::stream(42);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut below = 0usize;
        for _ in 0..n {
            let t = m.sample_switch_time(i, &mut s).unwrap();
            sum += t;
            below += (t < tau) as usize;
        }
        let mean = sum / n as f64;
        assert!((mean - tau).abs() < 3.0 * tau / 1e3, "mean {mean}");
        let p_hat = below as f64 / n as f64;
        let p0 = 1.0 - (-1.0f64).exp();
        let ci = 3.0 * (p0 * (1.0 - p0) / n as f64).sqrt();
        assert!((p_hat - p0).abs() < ci, "{p_hat}");
    }

    #[test]
    fn same_seed_same_samples() {
        let m = p();
        let i = 0.7 * m.i_c0;
        let mut a = rng::stream(9);
        let mut b = rng::stream(9);
        for _ in 0..100 {
            assert_eq!(
                m.sample_switch_time(i, &mut a).unwrap(),
                m.sample_switch_time(i, &mut b).unwrap()
            );
        }
    }

    proptest! {
        #[test]
        fn tau_strictly_decreasing(a in 1e-3f64..0.998, d in 1e-4f64..1e-3) {
            let m = p();
            let lo = m.mean_switching_time(a * m.i_c0).unwrap();
            let hi = m.mean_switching_time((a + d) * m.i_c0).unwrap();
            prop_assert!(hi < lo);
        }

        #[test]
        fn probability_is_a_cdf(a in 1e-3f64..0.999, t1 in 0.0f64..1e-6, dt in 0.0f64..1e-6) {
            let m = p();
            let i = a * m.i_c0;
            let p1 = m.switching_probability(i, t1).unwrap();
            let p2 = m.switching_probability(i, t1 + dt).unwrap();
            prop_assert!((0.0..=1.0).contains(&p1));
            prop_assert!(p2 >= p1 && p2 <= 1.0);
        }
    }
}
