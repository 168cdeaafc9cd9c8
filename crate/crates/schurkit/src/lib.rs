//! Schur transform toolkit.
//!
//! Builds the Schur transform on `n` qudits of dimension `d` by cascading
//! Clebsch-Gordan transforms of `U(d)`, checks Schur-Weyl duality numerically,
//! and runs the standard method-of-types applications (spectrum estimation,
//! entanglement concentration, compression, the symmetric-group Fourier
//! transform, generalized phase estimation, channel normal forms) on small
//! dense instances.

pub mod channels;
pub mod characters;
pub mod combinatorics;
pub mod duality_checks;
pub mod error;
pub mod linalg;
pub mod qtypes;
pub mod schur_transform;
pub mod sn_fourier;
pub mod wigner;

pub use combinatorics::{GZPattern, Partition, Weight, YYPath};
pub use error::{Error, Result};
pub use linalg::DenseOperator;
pub use schur_transform::{SchurLabel, SchurLabelCodec, SchurTransform};

/// Default numeric tolerance used when a caller does not supply one.
pub const DEFAULT_TOL: f64 = 1e-10;
