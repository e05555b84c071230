//! Curvature functionals, holomorphic map invariants and Bochner-type identity
//! checks for Kähler metrics given on coordinate charts.

pub mod bounds;
pub mod error;
pub mod expr;
pub mod functionals;
pub mod jet;
pub mod geometry;
pub mod identities;
pub mod linalg;
pub mod maps;
pub mod report;
pub mod scenario;
pub mod sampling;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex<f64>;
