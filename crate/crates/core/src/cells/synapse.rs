use serde::{Deserialize, Serialize};

use crate::devices::{fraction_for_resistance, ftj_apply_pulse, ftj_resistance, FtjParams, FtjState};
use crate::error::{Error, Result};

/// Programming-pulse settings for the FTJ write path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProgramSettings {
    /// Programming pulse amplitude (V); sign chosen per pulse.
    pub v_prg: f64,
    /// Longest single pulse (s).
    pub max_pulse_s: f64,
    /// Accepted |w − target|.
    pub tolerance: f64,
    pub max_pulses: usize,
}

impl Default for ProgramSettings {
    fn default() -> Self {
        Self {
            v_prg: 2.0,
            max_pulse_s: 10e-9,
            tolerance: 1e-4,
            max_pulses: 1000,
        }
    }
}

/// FTJ voltage-divider synapse: `Vout = R_ftj / (R_ftj + r_series) · Vin`.
#[derive(Clone, Debug, PartialEq)]
pub struct Synapse {
    pub ftj: FtjState,
    pub params: FtjParams,
    /// Fixed divider resistance (Ω).
    pub r_series: f64,
}

impl Synapse {
    /// A synapse whose FTJ starts fully unswitched.
    pub fn new(params: FtjParams, r_series: f64) -> Self {
        Self {
            ftj: FtjState::off(),
            params,
            r_series,
        }
    }

    /// Default divider: geometric mean of the FTJ's ON and OFF resistances,
    /// which centres the weight range on 0.5.
    pub fn with_geometric_divider(params: FtjParams) -> Self {
        let r = (params.r_on * params.r_off).sqrt();
        Self::new(params, r)
    }

    pub fn resistance(&self) -> f64 {
        ftj_resistance(self.ftj, &self.params)
    }

    pub fn weight(&self) -> f64 {
        let r = self.resistance();
        r / (r + self.r_series)
    }

    /// Output voltage for a read input `vin`. Read pulses are far below the
    /// creep threshold and leave the FTJ state untouched.
    pub fn output(&self, vin: f64) -> Result<f64> {
        if !(vin >= 0.0) {
            return Err(Error::domain(format!("synapse input {vin} V is negative")));
        }
        Ok(self.weight() * vin)
    }

    /// Weights reachable between the fully OFF and fully ON states.
    pub fn achievable_range(&self) -> (f64, f64) {
        let w = |r: f64| r / (r + self.r_series);
        let (a, b) = (w(self.params.r_on), w(self.params.r_off));
        (a.min(b), a.max(b))
    }

    /// Programs the FTJ toward `target_w` with verify-after-pulse, returning
    /// the number of pulses applied. The state is left unchanged on error.
    pub fn program(&mut self, target_w: f64, prg: &ProgramSettings) -> Result<usize> {
        let (lo, hi) = self.achievable_range();
        if !(target_w >= lo && target_w <= hi) {
            return Err(Error::Range {
                target: target_w,
                lo,
                hi,
            });
        }
        let r_target = target_w * self.r_series / (1.0 - target_w);
        let s_target = fraction_for_resistance(r_target, &self.params).clamp(0.0, 1.0);

        let mut st = self.ftj;
        let mut pulses = 0;
        loop {
            let w = {
                let r = ftj_resistance(st, &self.params);
                r / (r + self.r_series)
            };
            if (w - target_w).abs() <= prg.tolerance {
                break;
            }
            if pulses == prg.max_pulses {
                return Err(Error::Calibration(format!(
                    "weight {w} did not reach {target_w} within {pulses} pulses"
                )));
            }
            let (v, remaining) = if s_target > st.s {
                (prg.v_prg, ((1.0 - st.s) / (1.0 - s_target)).ln())
            } else {
                (-prg.v_prg, (st.s / s_target).ln())
            };
            let tau = self.params.switching_time(v);
            let t = (tau * remaining).min(prg.max_pulse_s);
            st = ftj_apply_pulse(st, &self.params, v, t);
            pulses += 1;
        }
        self.ftj = st;
        Ok(pulses)
    }
}
