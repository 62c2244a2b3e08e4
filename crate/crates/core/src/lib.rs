//! Cochain complexes over exact fields, contractions and acyclic
//! retractions, the three normalization tricks for them, semifree
//! factorizations, and the model-structure liftings and factorizations on
//! cochain complexes, acyclic retractions and contractions.

pub mod complex;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod perturb;
pub mod report;
pub mod retract;
pub mod semifree;

pub use error::{Error, Result};
pub use linalg::{Field, Matrix, Scalar};
