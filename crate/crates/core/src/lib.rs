//! Exact-arithmetic toolkit for filtered chain complexes over the
//! universal Novikov field.
//!
//! The crate has three layers:
//!
//! - **Field and complexes** ([`novikov`], [`complex`], [`capped`]): exact
//!   mod-2 Novikov scalars with rational exponents and certified truncation
//!   windows; filtered graded complexes; capped orbits and coefficient
//!   extension.
//! - **Spectral algebra** ([`spectral`], [`kunneth`]): nonarchimedean
//!   singular value decomposition, barcodes, spectral invariants, boundary
//!   depth, detection functionals, tensor products and direct sums.
//! - **Models and calculus** ([`models`], [`capacity`]): exact action
//!   spectra of the model Hamiltonians, and a certificate engine for the
//!   capacity inequalities they feed.
//!
//! Everything is exact: exponents are arbitrary-precision rationals, and
//! the only approximation anywhere is an explicit truncation window that
//! each operation propagates.

pub mod capacity;
pub mod capped;
pub mod complex;
pub mod exponent;
pub mod kunneth;
pub mod models;
pub mod novikov;
pub mod oracle;
pub mod spectral;
pub mod synth;

pub use capped::{CappedChain, CappedComplex, CappedGenerator};
pub use complex::{Chain, ComplexError, FilteredComplex, Generator};
pub use exponent::{Exponent, Level};
pub use novikov::NovikovScalar;
