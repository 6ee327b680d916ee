//! Synapse and neuron behavioural models, the activation cycle, and the
//! calibration that ties device physics to chain transition probabilities.

mod activation;
mod drive;
mod history;
mod neuron;
mod noise;
mod synapse;

pub use activation::{activation_cycle, boundary_cycle, ActivationOutcome, Move, Side};
pub use drive::{calibrate_drive, calibrate_path, Calibration, DriveConfig};
pub use history::{
    build_activation_history, ActivationHistory, CellKind, DevicePolicy, HistoryConfig,
    HistoryRecord, HistorySite, SiteStats,
};
pub use neuron::Neuron;
pub use noise::{weight_noise_stats, NoiseFamily, NoiseStats, WeightNoiseModel};
pub use synapse::{ProgramSettings, Synapse};
