//! Generalized multiresolution filter systems.
//!
//! The crate works with multiplicity functions `μ` on the circle, the filter
//! banks ("M-systems") they admit, the unitary matrix field an M-system
//! generates, and the loop group that acts freely and transitively on
//! M-systems over a fixed `μ`. The classical case `μ ≡ 1` is covered by
//! [`wavelet`], which also builds scaling functions, wavelets and frame
//! diagnostics in the frequency domain.
//!
//! All piecewise-constant data uses exact rational breakpoints ([`torus`]).
//! Filter values live in a [`Scalar`] field: [`Exact`] for fixtures whose
//! values are rational multiples of square roots, `Complex64` otherwise.

#![allow(clippy::result_large_err)]

pub mod document;
pub mod error;
pub mod fixtures;
pub mod loopgroup;
pub mod matrix;
pub mod msystem;
pub mod multiplicity;
pub mod random;
pub mod scalar;
pub mod torus;
pub mod wavelet;

pub use error::{GmraError, Result};
pub use loopgroup::LoopElement;
pub use matrix::Matrix;
pub use msystem::{
    DimensionProfile, GeneralizedFilterBank, MSystem, UnitaryField, DEFAULT_TOLERANCE,
};
pub use multiplicity::{ConjugateMultiplicity, MultiplicityFunction};
pub use num_complex::Complex64;
pub use scalar::{Exact, Scalar};
pub use torus::{rat, CellSpan, Partition, PiecewiseFn, Rational, Representative, TorusPoint};
