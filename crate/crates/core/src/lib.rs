//! Adaptive Intelligence Optimizer.
//!
//! A bi-population particle swarm optimizer in which each problem dimension
//! carries a learning automaton that picks its swarm, and each swarm carries a
//! second automaton that picks which of the two populations optimizes it.
//! The crate also ships a plain global-best PSO baseline, five closed-form
//! benchmark functions and an experiment harness (XML configuration, seeded
//! multi-run experiments, CSV convergence curves).

pub mod aio;
pub mod benchfn;
pub mod error;
pub mod harness;
pub mod la;
pub mod pso;

pub use error::{Error, Result};

/// The random stream every run is driven by.
pub type RunRng = rand_chacha::ChaCha8Rng;

/// Builds the canonical random stream for a run seed.
pub fn rng_for_seed(seed: u64) -> RunRng {
    use rand::SeedableRng;
    RunRng::seed_from_u64(seed)
}
