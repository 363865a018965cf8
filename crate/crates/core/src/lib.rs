//! Greedy guarantees for monotone submodular maximization when the
//! cardinality budget is uncertain.

pub mod block;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod numeric;
pub mod program;
pub mod rounds;
pub mod setfn;
pub mod suite;
pub mod two_budget;

pub use error::{Error, Result};
