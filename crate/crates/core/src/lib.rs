//! Numerical toolkit for Hardy-type spaces on the unit circle built from
//! rearrangement-invariant gauge norms.
//!
//! * [`spectral`]: grids, Fourier coefficients, Fejér means, Riesz projection,
//!   conjugate functions and Herglotz integrals.
//! * [`gauge`]: gauge norms, their axioms, duals and measurable extension.
//! * [`hardy`]: membership tests, outer functions and inner-outer factorization.
//! * [`subspace`]: cyclic subspaces generated by multiplication by `z`,
//!   classification and bounded approximation.
//! * [`corpus`] and [`format`]: reference functions and file formats.

pub mod corpus;
pub mod error;
pub mod format;
pub mod gauge;
pub mod hardy;
pub mod spectral;
pub mod subspace;

pub use error::{Error, Result};
