//! One activation cycle: probabilistic activation, winner-takes-all and
//! self-inhibition.
//!
//! The active neuron's read output passes through its synapse and drives the
//! destination MTJs in series. Every destination draws an exponential
//! switching time at the shared current; the earliest one inside the write
//! window wins and the current monitor cuts the drive at that instant, so no
//! second MTJ can switch. A successful hand-off resets the source neuron.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::drive::DriveConfig;
use super::neuron::Neuron;
use super::noise::WeightNoiseModel;
use super::synapse::Synapse;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    MovedLeft,
    MovedRight,
    Stayed,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::MovedLeft => 'L',
            Move::MovedRight => 'R',
            Move::Stayed => 'S',
        }
    }
}

/// Direction of the only neighbour of an edge neuron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActivationOutcome {
    pub result: Move,
    pub energy_j: f64,
    pub time_s: f64,
}

fn outcome(result: Move, drive: &DriveConfig) -> ActivationOutcome {
    ActivationOutcome {
        result,
        energy_j: drive.energy_per_cycle_j,
        time_s: drive.cycle_time_s,
    }
}

fn write_current<R: Rng + ?Sized>(
    syn: &Synapse,
    noise: &WeightNoiseModel,
    drive: &DriveConfig,
    r_path: f64,
    rng: &mut R,
) -> Result<f64> {
    let v_wr = syn.output(drive.v_read)? * noise.sample(rng);
    Ok(v_wr / r_path)
}

/// Interior cycle. `center` must be active, `left` and `right` inactive.
#[allow(clippy::too_many_arguments)]
pub fn activation_cycle<R: Rng + ?Sized>(
    left: &mut Neuron,
    center: &mut Neuron,
    right: &mut Neuron,
    syn: &Synapse,
    noise: &WeightNoiseModel,
    drive: &DriveConfig,
    rng: &mut R,
) -> Result<ActivationOutcome> {
    if !center.is_active() || left.is_active() || right.is_active() {
        return Err(Error::State(format!(
            "cycle at neuron {} needs an active centre and inactive neighbours",
            center.index
        )));
    }
    let r_path = left.resistance() + right.resistance() + drive.r_access;
    let i = write_current(syn, noise, drive, r_path, rng)?;
    let t_left = left.params.sample_switch_time(i, rng)?;
    let t_right = right.params.sample_switch_time(i, rng)?;

    let (winner, result) = if t_left <= t_right {
        (t_left, Move::MovedLeft)
    } else {
        (t_right, Move::MovedRight)
    };
    if winner >= drive.pulse_width_s {
        return Ok(outcome(Move::Stayed, drive));
    }
    match result {
        Move::MovedLeft => left.activate(),
        _ => right.activate(),
    }
    center.reset();
    Ok(outcome(result, drive))
}

/// Edge cycle with a single destination on `side`; the missing neighbour's
/// MTJ is replaced by the fixed reference load `drive.r_edge_ref`.
#[allow(clippy::too_many_arguments)]
pub fn boundary_cycle<R: Rng + ?Sized>(
    center: &mut Neuron,
    dest: &mut Neuron,
    side: Side,
    syn: &Synapse,
    noise: &WeightNoiseModel,
    drive: &DriveConfig,
    rng: &mut R,
) -> Result<ActivationOutcome> {
    if !center.is_active() || dest.is_active() {
        return Err(Error::State(format!(
            "edge cycle at neuron {} needs an active centre and inactive neighbour",
            center.index
        )));
    }
    let r_path = dest.resistance() + drive.r_edge_ref + drive.r_access;
    let i = write_current(syn, noise, drive, r_path, rng)?;
    let t = dest.params.sample_switch_time(i, rng)?;
    if t >= drive.pulse_width_s {
        return Ok(outcome(Move::Stayed, drive));
    }
    dest.activate();
    center.reset();
    let result = match side {
        Side::Left => Move::MovedLeft,
        Side::Right => Move::MovedRight,
    };
    Ok(outcome(result, drive))
}
