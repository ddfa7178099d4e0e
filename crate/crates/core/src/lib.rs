//! Numerical radius toolkit for dense complex matrices.
//!
//! * [`matrix`]: the [`CMatrix`] carrier, arithmetic and the JSON wire format.
//! * [`spectral`]: Hermitian eigensolver, SVD, operator norm, PSD functional
//!   calculus and spectral radii.
//! * [`decomp`]: polar decomposition and t-Aluthge transforms.
//! * [`radius`]: certified numerical radius.
//! * [`bounds`]: a catalog of upper bounds on `w(A)`, general `(B, C)` pair
//!   bounds and refinement chains between them.
//! * [`harness`]: random ensembles and the inequality verification sweep.

pub mod bounds;
pub mod decomp;
pub mod error;
pub mod harness;
pub mod matrix;
pub mod par;
pub mod radius;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::{CMatrix, CScalar};
pub use par::Exec;
pub use radius::RadiusEstimate;
