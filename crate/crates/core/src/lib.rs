//! Hyperbolic structures on link complements from crossing and edge labels.
//!
//! The pipeline runs diagram → peripheral complex → polynomial system →
//! numerical roots → geometric checks. Fully augmented links additionally
//! get circle packing support.

pub mod complex;
pub mod diagram;
pub mod equations;
pub mod error;
pub mod fal;
pub mod geometry;
pub mod io;
pub mod mobius;
pub mod poly;
pub mod report;
pub mod rotation;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
