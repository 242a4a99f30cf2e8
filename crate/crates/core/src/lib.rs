//! Schmidt-game strategies for badly approximable systems of affine forms,
//! built on exact lattice computations and the diagonal flow.

pub mod black;
pub mod diophantine;
pub mod error;
pub mod exec;
pub mod fractal;
pub mod game;
pub mod lattice;
pub mod linalg;
pub mod scalar;
pub mod white;

pub use error::{Error, Result, Violation};
pub use linalg::{Matrix, Vector};
pub use scalar::Scalar;
