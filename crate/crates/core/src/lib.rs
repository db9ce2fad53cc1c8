//! Weekly antenna scheduling as a time-indexed 0/1 program.
//!
//! The pipeline is: parse or generate an instance ([`ingest`]), split long
//! requests ([`splitter`]), build the program ([`milp`]), solve it with an
//! external MILP solver or the exhaustive oracle ([`solve`]), rebalance
//! objective weights across iterations ([`balance`]) and certify the result
//! independently of the solver ([`evaluate`]).

pub mod balance;
pub mod error;
pub mod evaluate;
pub mod grid;
pub mod ingest;
pub mod instance;
pub mod manifest;
pub mod matrices;
pub mod milp;
pub mod pipeline;
pub mod report;
pub mod schedule;
pub mod solve;
pub mod splitter;

pub use error::{Error, Result};
