//! Congestion-aware route selection for a fleet of vehicles, compiled to a
//! QUBO (quadratic unconstrained binary optimization) problem.
//!
//! The pipeline is:
//!
//! 1. [`network::Scenario`]: a directed road network with weighted segments,
//!    a set of vehicles and a candidate-route configuration.
//! 2. [`routes::generate_routes`]: `k` candidate routes per vehicle, either
//!    given explicitly or produced by Yen's k-shortest loopless paths.
//! 3. [`qubo`]: per-segment quadratic congestion cost plus a one-hot penalty
//!    per vehicle, assembled into an upper-triangular [`qubo::QuboProblem`].
//! 4. [`samplers`]: an exhaustive oracle, a feasible-space enumerator and a
//!    single-flip simulated annealer, all returning a [`samplers::SampleSet`].
//! 5. [`analysis`]: decoding, solution selection, density reports and model
//!    comparison against a random-choice baseline.
//!
//! Data-parallel loops (annealing reads, enumeration chunks, baseline draws)
//! run on rayon when the `parallel` feature is enabled; see [`exec`].

pub mod analysis;
pub mod error;
pub mod exec;
pub mod export;
mod fmt;
pub mod network;
pub mod qubo;
pub mod routes;
pub mod samplers;

pub use error::{Error, Result};
pub use exec::Execution;
pub use fmt::format_g9;
