//! Regularization methods for discrete linear ill-posed inverse problems.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * dense linear algebra, ℓp norms and an SVD facade ([`linalg`]),
//! * forward operators for deblurring, downsampling and masking ([`operators`]),
//! * regularization matrices ([`regmat`]),
//! * SVD diagnostics and spectral filters ([`spectral`]),
//! * closed-form Tikhonov family solvers ([`direct`]),
//! * iterative and nonlinear solvers ([`iterative`]),
//! * regularization-parameter selection ([`paramsel`]),
//! * frequency-domain deconvolution ([`freq`]),
//! * dictionaries, hybrid projection and compressed sensing ([`sparse`]),
//! * regression ([`regression`]).
//!
//! Throughout, λ enters every penalized functional squared, `‖Ax − y‖² + λ²Ω(x)`,
//! except for [`regression::ridge_bias_variance`] which follows the classical
//! unsquared ridge formula.
//!
//! Images are stored row-major in [`ImageGrid`] and vectorized by stacking
//! columns, so pixel `(i, j)` of an `h × w` image lands at index `j·h + i`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod direct;
mod error;
pub mod freq;
pub mod image;
pub mod iterative;
pub mod linalg;
pub mod operators;
pub mod paramsel;
pub mod phantom;
pub mod regmat;
pub mod regression;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
pub use image::ImageGrid;
pub use iterative::{SolveReport, StopReason, StopRule};
pub use linalg::{DenseMatrix, SvdFactors, Vector};
pub use operators::{BoundaryCondition, LinearOperator, Psf, PsfKind};
pub use regmat::RegularizerSpec;
