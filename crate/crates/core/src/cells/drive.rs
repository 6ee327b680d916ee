//! Write-path timing/energy constants and the calibration that maps a target
//! stay probability to a drive current and synapse weight.
//!
//! During a write window of length `T` the drive current flows through every
//! destination MTJ in series. Each switches after an independent exponential
//! time, so the walker stays with probability `exp(−T·Σ 1/τ_k(i))`.
//! The current follows from the synapse output through the linear map
//! `i = v_wr / (Σ R_k + r_access)`.

use serde::{Deserialize, Serialize};

use crate::devices::MtjParams;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveConfig {
    /// Write window (s).
    pub pulse_width_s: f64,
    /// Full activation cycle (s).
    pub cycle_time_s: f64,
    /// Energy charged per activation cycle (J).
    pub energy_per_cycle_j: f64,
    /// Access-transistor resistance in the write path (Ω).
    pub r_access: f64,
    /// Read output of an active neuron, i.e. the synapse input (V).
    pub v_read: f64,
    /// Reference load replacing the missing neighbour MTJ at a grid edge (Ω).
    pub r_edge_ref: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            pulse_width_s: 5e-9,
            cycle_time_s: 10e-9,
            energy_per_cycle_j: 1.451e-12,
            r_access: 1e3,
            v_read: 1.0,
            r_edge_ref: 5e3,
        }
    }
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("pulse_width_s", self.pulse_width_s),
            ("cycle_time_s", self.cycle_time_s),
            ("energy_per_cycle_j", self.energy_per_cycle_j),
            ("v_read", self.v_read),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("drive.{name} must be positive, got {v}")));
            }
        }
        if !(self.r_access >= 0.0 && self.r_edge_ref >= 0.0) {
            return Err(Error::Config("drive resistances must be >= 0".into()));
        }
        if self.pulse_width_s > self.cycle_time_s {
            return Err(Error::Config("write window longer than the cycle".into()));
        }
        Ok(())
    }
}

/// Drive operating point for one write path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Write current (A).
    pub i_drive: f64,
    /// Synapse output voltage that produces `i_drive` (V).
    pub v_wr: f64,
    /// Synapse weight `v_wr / v_read`.
    pub w: f64,
}

fn check_target(ps_target: f64) -> Result<()> {
    if ps_target > 0.0 && ps_target < 1.0 {
        Ok(())
    } else {
        Err(Error::Calibration(format!("stay probability {ps_target} not in (0, 1)")))
    }
}

/// Closed-form calibration for two identical series MTJs:
/// `exp(−2·T/τ(i)) = ps_target`.
pub fn calibrate_drive(
    ps_target: f64,
    p: &MtjParams,
    pulse_t: f64,
    drive: &DriveConfig,
) -> Result<Calibration> {
    check_target(ps_target)?;
    let tau = -2.0 * pulse_t / ps_target.ln();
    let exponent = (tau / p.tau0).ln() / p.delta;
    if !(exponent > 0.0 && exponent < 1.0) {
        return Err(Error::Calibration(format!(
            "stay probability {ps_target} needs τ = {tau:e} s, outside (τ0, τ0·e^Δ)"
        )));
    }
    let i_drive = p.i_c0 * (1.0 - exponent.sqrt());
    let v_wr = i_drive * (2.0 * p.r_p + drive.r_access);
    Ok(Calibration {
        i_drive,
        v_wr,
        w: v_wr / drive.v_read,
    })
}

/// Calibration for an arbitrary set of series destination MTJs, solved by
/// bisection on the total switching rate. `r_extra` is any fixed series
/// resistance besides the MTJs and the access device.
pub fn calibrate_path(
    ps_target: f64,
    mtjs: &[&MtjParams],
    r_extra: f64,
    pulse_t: f64,
    drive: &DriveConfig,
) -> Result<Calibration> {
    check_target(ps_target)?;
    if mtjs.is_empty() {
        return Err(Error::Calibration("write path without MTJs".into()));
    }
    let target_rate = -ps_target.ln() / pulse_t;
    let i_max = mtjs.iter().map(|p| p.i_c0).fold(f64::INFINITY, f64::min);
    // the formula itself is smooth on [0, i_c0]; the open-interval check
    // happens on the result
    let rate = |i: f64| -> f64 {
        mtjs.iter()
            .map(|p| {
                let x = 1.0 - i / p.i_c0;
                1.0 / (p.tau0 * (p.delta * x * x).exp())
            })
            .sum()
    };
    if !(target_rate > rate(0.0) && target_rate < rate(i_max)) {
        return Err(Error::Calibration(format!(
            "stay probability {ps_target} needs a current outside (0, {i_max:e}) A"
        )));
    }
    let (mut lo, mut hi) = (0.0, i_max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rate(mid) < target_rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let i_drive = 0.5 * (lo + hi);
    let r_path: f64 = mtjs.iter().map(|p| p.r_p).sum::<f64>() + r_extra + drive.r_access;
    let v_wr = i_drive * r_path;
    Ok(Calibration {
        i_drive,
        v_wr,
        w: v_wr / drive.v_read,
    })
}
