//! Matrix functional calculus (exp, log, their Fréchet differentials and the
//! trace form `Q`) and randomized verification of concavity statements and
//! multivariate Golden-Thompson trace inequalities.

pub mod calculus;
pub mod cli;
pub mod error;
pub mod harness;
pub mod inequalities;
pub mod jsonfmt;
pub mod matcore;
pub mod oracle;
pub mod randgen;
pub mod report;
pub mod tracefn;

pub use error::{Error, Result};
