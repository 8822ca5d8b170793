//! Thermodynamic formalism for local homeomorphisms: Hausdorff dimensions of
//! self-similar and graph-directed path spaces, transfer-operator
//! eigenmeasures, and numerical verification of the KMS condition on the
//! associated groupoid algebras.
//!
//! Heavy sweeps run on rayon when the `parallel` feature is enabled (the
//! default); [`par::Execution::Sequential`] forces the single-threaded path.

pub mod dimension;
pub mod error;
pub mod geom;
pub mod groupoid;
pub mod linalg;
pub mod measure;
pub mod par;
pub mod potential;
pub mod shift;

pub use dimension::{
    entropy_from_scaling, graph_dimension, kms_inverse_temperature, moran_dimension, pressure, DimensionResult,
};
pub use error::{Error, Result};
pub use groupoid::{kms_verify_suite, AlgebraElement, Bisection, KmsReport};
pub use measure::{eigenmeasure, transfer_matrix, CylinderMeasure};
pub use par::Execution;
pub use potential::{Potential, RatioList};
pub use shift::{Graph, PathPoint, Word};
