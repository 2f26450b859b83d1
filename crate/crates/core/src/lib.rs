//! Age of information and deadline packet loss in a heterogeneous slotted
//! random-access network.
//!
//! One deadline node with a FIFO queue and `N` generate-at-will AoI nodes share
//! a Rayleigh-fading channel to a controller that decodes by SINR capture.
//! [`analytic`] evaluates the two Markov chains in closed form; [`sim`] runs
//! the same system slot by slot; [`harness`] sweeps, compares and serializes.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod harness;
pub mod scenario;
pub mod sim;

pub use analytic::{evaluate_scenario, AnalyticReport, MeanAge};
pub use error::{ConfigIssue, Error, Result};
pub use scenario::{AccessParams, ScenarioConfig};
pub use sim::{run_simulation, SimConfig, SimReport};
