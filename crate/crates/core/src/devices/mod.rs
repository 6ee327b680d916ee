//! Behavioural device models: stochastic MTJ switching, FTJ domain-driven
//! resistance, and process-variation sampling.

mod ftj;
mod mtj;
mod variation;

pub use ftj::{ftj_apply_pulse, ftj_resistance, FtjParams, FtjState, K_B_EV};
pub(crate) use ftj::fraction_for_resistance;
pub use mtj::{MtjParams, MtjState};
pub use variation::{
    sample_device_instance, truncated_normal, VariationFamily, VariationSpec, TRUNCATION_SIGMAS,
};
