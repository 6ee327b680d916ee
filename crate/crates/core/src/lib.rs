//! Device-to-system simulator of a random-walk PDE solver built from
//! stochastic MTJ neurons and FTJ synapses.
//!
//! Layers, bottom up: [`devices`] (MTJ, FTJ, process variation), [`cells`]
//! (synapse, neuron, activation cycle, activation histories), [`chain`]
//! (transition probabilities), [`walk`] (parallel walk engine and ledger),
//! and [`pde`] (estimators, analytical references, variance, sweeps).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cells;
pub mod chain;
pub mod devices;
pub mod error;
pub mod pde;
pub mod rng;
pub mod walk;

pub use chain::{build_chain, transition_probabilities, MarkovChain1D, RightBoundary};
pub use error::{Error, Result};
pub use pde::{Diffusion2D, RunPlan, SteadyHeat1D, VarianceReport};
pub use walk::{BackendKind, HardwareSettings, Ledger, WalkBackend};
