//! Exact computation of two-dimensional tame symbols and reciprocity laws.
//!
//! The library works over two-dimensional local fields `k'((u))((t))` with a
//! finite last residue field, built as precision-tracked iterated Laurent
//! series. It provides:
//!
//! - [`gfield`]: exact finite-field arithmetic with extensions, norms and
//!   roots of unity;
//! - [`laurent`]: precision-tracked Laurent series, iterated once to model
//!   two-dimensional local fields;
//! - [`symbols`]: the valuation pairing, the two-dimensional tame symbol and
//!   the Kummer reciprocity map, computed from the closed formulas;
//! - [`graded`]: graded determinant lines and a second, independent route to
//!   the same symbols through finite determinant computations;
//! - [`surface`]: a model surface (the projective plane), divisors, closed
//!   points, flags and local expansions;
//! - [`reciprocity`]: verifiers for the reciprocity laws around a point,
//!   along a projective curve, and globally, with per-flag evidence reports;
//! - [`central_ext`]: symbol 2-cocycles on monomial matrices, commutators of
//!   lifts and splitting certificates;
//! - [`engine`]: a registry of interchangeable symbol backends (closed
//!   formula vs. determinant lines), selectable by name at runtime.

pub mod central_ext;
pub mod engine;
pub mod error;
pub mod gfield;
pub mod graded;
pub mod laurent;
pub mod parse;
pub mod reciprocity;
pub mod sampling;
pub mod surface;
pub mod symbols;

pub use error::{Error, Result};
pub use gfield::{FieldElement, Fq};
pub use laurent::{TSeries, USeries};
