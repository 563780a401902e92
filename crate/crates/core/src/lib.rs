pub mod cli;
pub mod cutlp;
pub mod decomposition;
pub mod error;
pub mod exact;
pub mod graph;
pub mod instances;
pub mod rational;
pub mod rounding;
pub mod simplex;

pub use error::{Error, Result};
pub use rational::{Penalty, Rational};
