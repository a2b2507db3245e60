pub mod analysis;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod finite_solver;
pub mod limit_engine;
pub mod model;

pub use error::{Error, Result};
