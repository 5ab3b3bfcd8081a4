pub mod error;
pub mod exponents;
pub mod exterior;
pub mod fixtures;
pub mod flow;
pub mod harness;
pub mod numeric;
pub mod problem;

pub use error::{Error, Result};
pub use problem::ApproximationProblem;
