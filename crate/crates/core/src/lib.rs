//! Exact computations on Grassmann schemes over finite fields: subspace
//! enumeration, eigenmatrices, spectral bounds for intersecting families,
//! q-Kneser colorings and the inequality certificates built on them.

pub mod certificates;
pub mod coloring;
pub mod error;
pub mod families;
pub mod format;
pub mod grassmann;
pub mod projective;
pub mod qcombinatorics;
pub mod qfield;
pub mod report;
pub mod spectralbounds;
pub mod spectrum;

pub use error::{Error, Result};
pub use projective::{AmbientSpace, Grassmannian, Subspace};
pub use qfield::{FieldSpec, Scalar};
