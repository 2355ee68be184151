//! Registry of interchangeable tame-symbol backends.
//!
//! Two independent routes compute the same maps: the closed formulas of
//! [`crate::symbols`] and the graded determinant lines of [`crate::graded`].
//! Each is registered by name and selected at runtime (`--engine` on the
//! command line); their agreement is part of the acceptance suite, so
//! swapping engines must never change any result.

use crate::error::{Error, Result};
use crate::gfield::FieldElement;
use crate::laurent::{TSeries, USeries};

/// A strategy computing the one- and two-dimensional tame symbols.
pub trait SymbolEngine: Send + Sync {
    /// Registry name.
    fn name(&self) -> &'static str;
    /// One-line description for help output.
    fn describe(&self) -> &'static str;
    /// The one-dimensional tame symbol on k'((u)).
    fn tame1(&self, f: &USeries, g: &USeries) -> Result<FieldElement>;
    /// The two-dimensional tame symbol on k'((u))((t)).
    fn tame2(&self, f: &TSeries, g: &TSeries, h: &TSeries) -> Result<FieldElement>;
}

/// Closed-formula route: valuation pairings and double reductions.
pub struct FormulaEngine;

impl SymbolEngine for FormulaEngine {
    fn name(&self) -> &'static str {
        "formula"
    }
    fn describe(&self) -> &'static str {
        "closed tame-symbol formulas from valuation pairings and reductions"
    }
    fn tame1(&self, f: &USeries, g: &USeries) -> Result<FieldElement> {
        crate::symbols::tame1(f, g)
    }
    fn tame2(&self, f: &TSeries, g: &TSeries, h: &TSeries) -> Result<FieldElement> {
        crate::symbols::tame2_value(f, g, h)
    }
}

/// Determinant-line route: windowed transport determinants on standard
/// lattices with graded braiding corrections.
pub struct DetLineEngine;

impl SymbolEngine for DetLineEngine {
    fn name(&self) -> &'static str {
        "detline"
    }
    fn describe(&self) -> &'static str {
        "graded determinant lines of lattice compressions (commutators of lifts)"
    }
    fn tame1(&self, f: &USeries, g: &USeries) -> Result<FieldElement> {
        crate::graded::one_tate_commutator(f, g)
    }
    fn tame2(&self, f: &TSeries, g: &TSeries, h: &TSeries) -> Result<FieldElement> {
        crate::graded::c3_det(f, g, h)
    }
}

static FORMULA: FormulaEngine = FormulaEngine;
static DETLINE: DetLineEngine = DetLineEngine;

/// All registered engines.
pub fn engines() -> [&'static dyn SymbolEngine; 2] {
    [&FORMULA, &DETLINE]
}

/// Look an engine up by its registry name.
pub fn engine_by_name(name: &str) -> Result<&'static dyn SymbolEngine> {
    engines()
        .into_iter()
        .find(|e| e.name() == name)
        .ok_or_else(|| Error::UnknownEngine(name.to_string()))
}
