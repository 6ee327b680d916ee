//! Ferroelectric tunnel junction with a domain-fraction state variable.
//!
//! The junction is a parallel combination of switched (ON) and unswitched
//! (OFF) domains. Under a programming pulse the switched fraction relaxes
//! exponentially toward 1 (positive bias) or 0 (negative bias) with a
//! creep-law time constant `τ = τ0_p·exp[(U_p/k_BT)·(v_c/|v|)]`, which makes
//! low-voltage reads effectively non-destructive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant (eV/K).
pub const K_B_EV: f64 = 8.617_333_262e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FtjParams {
    /// Barrier thickness (nm).
    pub t_b: f64,
    /// Junction surface radius (nm).
    pub r: f64,
    /// Creep barrier of domain nucleation (eV).
    pub u_n: f64,
    /// Creep barrier of domain-wall propagation (eV).
    pub u_p: f64,
    /// Nucleation attempt time (s).
    pub tau0_n: f64,
    /// Domain-wall attempt time (s).
    pub tau0_p: f64,
    /// LSMO/BTO barrier height, OFF (V).
    pub phi1_off: f64,
    /// LSMO/BTO barrier height, ON (V).
    pub phi1_on: f64,
    /// Co/BTO barrier height, OFF (V).
    pub phi2_off: f64,
    /// Co/BTO barrier height, ON (V).
    pub phi2_on: f64,
    /// Effective electron mass, OFF (units of mₑ).
    pub m_off: f64,
    /// Effective electron mass, ON (units of mₑ).
    pub m_on: f64,
    /// Fully switched resistance (Ω).
    pub r_on: f64,
    /// Unswitched resistance (Ω).
    pub r_off: f64,
    /// Creep reference voltage (V).
    pub v_c: f64,
    /// Temperature (K).
    pub temperature: f64,
}

impl Default for FtjParams {
    fn default() -> Self {
        Self {
            t_b: 2.0,
            r: 175.0,
            u_n: 0.67,
            u_p: 0.52,
            tau0_n: 2.8e-15,
            tau0_p: 9e-14,
            phi1_off: 0.678,
            phi1_on: 0.53,
            phi2_off: 0.978,
            phi2_on: 1.014,
            m_off: 0.931,
            m_on: 0.437,
            r_on: 10e3,
            r_off: 100e3,
            v_c: 1.0,
            temperature: 300.0,
        }
    }
}

impl FtjParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_on > 0.0 && self.r_off > self.r_on && self.r_off.is_finite()) {
            return Err(Error::Config(format!(
                "ftj requires r_off > r_on > 0, got r_on={} r_off={}",
                self.r_on, self.r_off
            )));
        }
        if !(self.u_p > 0.0 && self.u_n > self.u_p) {
            return Err(Error::Config(format!(
                "ftj requires u_n > u_p > 0, got u_n={} u_p={}",
                self.u_n, self.u_p
            )));
        }
        let positive = [
            ("tau0_n", self.tau0_n),
            ("tau0_p", self.tau0_p),
            ("v_c", self.v_c),
            ("temperature", self.temperature),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("ftj.{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Creep-law switching time at bias `v`; infinite at zero bias.
    pub fn switching_time(&self, v: f64) -> f64 {
        if v == 0.0 {
            return f64::INFINITY;
        }
        let kt = K_B_EV * self.temperature;
        self.tau0_p * (self.u_p / kt * self.v_c / v.abs()).exp()
    }
}

/// Switched (down-polarised) domain fraction `s ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FtjState {
    pub s: f64,
}

impl FtjState {
    pub fn new(s: f64) -> Self {
        Self { s: s.clamp(0.0, 1.0) }
    }

    /// Fully up-polarised film.
    pub fn off() -> Self {
        Self { s: 0.0 }
    }
}

/// Applies a rectangular pulse of `v` volts for `t` seconds.
pub fn ftj_apply_pulse(st: FtjState, p: &FtjParams, v: f64, t: f64) -> FtjState {
    if v == 0.0 || !(t > 0.0) {
        return st;
    }
    // fraction of the remaining distance covered during the pulse
    let frac = -(-t / p.switching_time(v)).exp_m1();
    let s = if v > 0.0 {
        st.s + (1.0 - st.s) * frac
    } else {
        st.s - st.s * frac
    };
    FtjState::new(s)
}

/// Parallel-domain resistance `1 / (s/r_on + (1 − s)/r_off)`.
pub fn ftj_resistance(st: FtjState, p: &FtjParams) -> f64 {
    1.0 / (st.s / p.r_on + (1.0 - st.s) / p.r_off)
}

/// Domain fraction that yields resistance `r`, unclamped.
pub(crate) fn fraction_for_resistance(r: f64, p: &FtjParams) -> f64 {
    (1.0 / r - 1.0 / p.r_off) / (1.0 / p.r_on - 1.0 / p.r_off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_bias_leaves_state() {
        let p = FtjParams::default();
        let st = FtjState::new(0.3);
        assert_eq!(ftj_apply_pulse(st, &p, 0.0, 1.0), st);
    }

    #[test]
    fn programming_pulse_at_two_volts() {
        let p = FtjParams::default();
        let tau = p.switching_time(2.0);
        assert!((tau - 2.10e-9).abs() < 0.01e-9, "{tau}");
        let st = ftj_apply_pulse(FtjState::off(), &p, 2.0, 10e-9);
        assert!((st.s - 0.991).abs() < 1e-3, "{}", st.s);
        let erased = ftj_apply_pulse(st, &p, -2.0, 10e-9);
        assert!(erased.s < st.s * 0.01);
    }

    #[test]
    fn read_pulse_does_not_disturb() {
        let p = FtjParams::default();
        let st = FtjState::new(0.5);
        let after = ftj_apply_pulse(st, &p, 0.2, 5e-9);
        assert!((after.s - st.s).abs() < 1e-12);
        // 0.2 V sits ~100 thermal units above the attempt time
        assert!(p.switching_time(0.2) > 1e20);
    }

    #[test]
    fn million_reads_stay_below_bound() {
        let p = FtjParams::default();
        let start = FtjState::new(0.5);
        let mut st = start;
        for _ in 0..1_000_000 {
            st = ftj_apply_pulse(st, &p, 0.2, 5e-9);
        }
        assert!((st.s - start.s).abs() < 1e-6);
    }

    #[test]
    fn resistance_examples() {
        let p = FtjParams::default();
        assert!((ftj_resistance(FtjState::new(0.0), &p) / p.r_off - 1.0).abs() < 1e-12);
        assert!((ftj_resistance(FtjState::new(1.0), &p) / p.r_on - 1.0).abs() < 1e-12);
        let half = ftj_resistance(FtjState::new(0.5), &p);
        assert!((half - 1.0 / (5e-5 + 5e-6)).abs() < 1e-9);
        assert!((half - 18_181.8).abs() < 0.1);
    }

    #[test]
    fn fraction_inverts_resistance() {
        let p = FtjParams::default();
        for s in [0.0, 0.2, 0.5, 0.9, 1.0] {
            let r = ftj_resistance(FtjState::new(s), &p);
            assert!((fraction_for_resistance(r, &p) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn defaults_validate() {
        FtjParams::default().validate().unwrap();
        let mut bad = FtjParams::default();
        bad.r_on = bad.r_off;
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn pulse_sequences_stay_bounded(
            s0 in 0.0f64..=1.0,
            pulses in proptest::collection::vec((-3.0f64..3.0, 0.0f64..50e-9), 0..40),
        ) {
            let p = FtjParams::default();
            let mut st = FtjState::new(s0);
            for (v, t) in pulses {
                let next = ftj_apply_pulse(st, &p, v, t);
                prop_assert!((0.0..=1.0).contains(&next.s));
                if v > 0.0 { prop_assert!(next.s >= st.s); }
                if v < 0.0 { prop_assert!(next.s <= st.s); }
                st = next;
                let r = ftj_resistance(st, &p);
                prop_assert!(r >= p.r_on * (1.0 - 1e-12) && r <= p.r_off * (1.0 + 1e-12));
            }
        }

        #[test]
        fn resistance_strictly_decreasing(s in 0.0f64..0.99, ds in 1e-3f64..0.01) {
            let p = FtjParams::default();
            prop_assert!(ftj_resistance(FtjState::new(s + ds), &p) < ftj_resistance(FtjState::new(s), &p));
        }
    }
}
