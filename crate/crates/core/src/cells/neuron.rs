use crate::devices::{MtjParams, MtjState};

/// A spin neuron: one MTJ whose antiparallel state marks the walker's
/// current position.
#[derive(Clone, Debug, PartialEq)]
pub struct Neuron {
    pub index: usize,
    pub params: MtjParams,
    pub state: MtjState,
}

impl Neuron {
    /// An inactive neuron.
    pub fn new(index: usize, params: MtjParams) -> Self {
        Self {
            index,
            params,
            state: MtjState::Parallel,
        }
    }

    pub fn active(index: usize, params: MtjParams) -> Self {
        Self {
            index,
            params,
            state: MtjState::AntiParallel,
        }
    }

    pub fn is_active(&self) -> bool {
        self.state == MtjState::AntiParallel
    }

    pub fn activate(&mut self) {
        self.state = MtjState::AntiParallel;
    }

    /// Self-inhibition.
    pub fn reset(&mut self) {
        self.state = MtjState::Parallel;
    }

    pub fn resistance(&self) -> f64 {
        self.params.resistance(self.state)
    }
}
