//! Problem definitions, Monte Carlo estimators, analytical references, the
//! variance metric, and the repeat/sweep protocol.

mod diffusion;
mod heat;
mod protocol;
mod variance;

pub use diffusion::{analytical_diffusion_2d, density, solve_diffusion_2d, Diffusion2D, DiffusionSolution};
pub use heat::{analytical_steady_heat, solve_steady_heat, steady_heat_estimate, SteadyHeat1D};
pub use protocol::{
    convergence_sweep, repeat_diffusion_2d, repeat_steady_heat, RepeatResult, RunPlan, SweepRow, SweepTable,
};
pub use variance::{mean_across_runs, variance, variance_across_runs, VarianceReport};
