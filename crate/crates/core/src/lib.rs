//! Hurwitz-Radon matrix families, quantum information maskers and the
//! numerical checks that certify them.
//!
//! Composite systems use the A-major index `a * dim_b + b` throughout.

pub mod eig;
pub mod error;
pub mod hr;
pub mod ic;
pub mod masking;
pub mod matrix;
pub mod measures;
pub mod repro;
pub mod rng;
pub mod state;
pub mod tol;

pub use error::{Error, Result};
pub use hr::{build_hr, kappa, kappa_real, kappa_tilde, HrSet};
pub use masking::{Masker, MaskReport};
pub use matrix::{tensor_product, ComplexMatrix, C64};
pub use state::{partial_trace, BipartiteShape, DensityMatrix, Ket, StateKind, Subsystem};
