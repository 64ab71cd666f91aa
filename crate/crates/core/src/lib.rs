//! Exact confusion-graph computations for index coding, locally
//! recoverable distributed storage and guessing games on directed graphs.

pub mod bitset;
pub mod cli;
pub mod coding;
pub mod confusion;
pub mod error;
pub mod fracchrom;
pub mod graph;
pub mod guessing;
pub mod independence;
pub mod limits;
pub mod lp;
pub mod rates;

pub use error::{Error, Result};

/// Exact rational numbers with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;
