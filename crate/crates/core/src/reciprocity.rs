//! Verifiers for the reciprocity laws on the model surface: around a point,
//! along a projective curve, globally, and the curve-level (Weil) product.
//! Every verifier returns a [`SymbolReport`] carrying the per-flag factors,
//! residue degrees and norms, so a failing product localizes the defect.
//! Equality to 1 is exact finite-field equality; there are no tolerances.

use serde::Serialize;

use crate::engine::SymbolEngine;
use crate::error::{Error, Result};
use crate::gfield::{Embedding, FieldElement, Fq};
use crate::laurent::{reduce_mod_m, two_local_const, TSeries};
use crate::surface::{
    closed_points_on_curve, curves_through_point, expand_at_flag, flags_of_curve_at_point,
    restrict_function_to_branch, ClosedPoint, Curve, Flag, RationalFunction,
};
use crate::symbols;

/// One per-flag (or per-point) factor of a reciprocity product.
#[derive(Clone, Debug, Serialize)]
pub struct Contribution {
    /// Flag identifier: point, curve and branch.
    pub id: String,
    /// Residue degree of the point over the base field.
    pub residue_degree: usize,
    /// Local symbol value in the residue field, exact text.
    pub local: String,
    /// Norm of the local value down to the base field, exact text.
    pub normed: String,
    /// Marker for factors that are 1 because all inputs are units with unit
    /// reduction at the flag.
    pub trivial: bool,
}

/// Structured result of a symbol or reciprocity computation.
#[derive(Clone, Debug, Serialize)]
pub struct SymbolReport {
    pub query: String,
    pub contributions: Vec<Contribution>,
    /// Product of the normed local values, exact text.
    pub product: String,
    pub verdict: bool,
    /// Per-curve verdicts for global products.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub per_curve: Vec<(String, bool)>,
}

impl SymbolReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("query: {}\n", self.query));
        for c in &self.contributions {
            let marker = if c.trivial { "  [trivial factor]" } else { "" };
            out.push_str(&format!(
                "flag {}  d={}  local={}  norm={}{}\n",
                c.id, c.residue_degree, c.local, c.normed, marker
            ));
        }
        for (curve, v) in &self.per_curve {
            out.push_str(&format!(
                "curve {}: {}\n",
                curve,
                if *v { "PASS" } else { "FAIL" }
            ));
        }
        out.push_str(&format!("product = {}\n", self.product));
        out.push_str(&format!(
            "verdict = {}\n",
            if self.verdict { "PASS" } else { "FAIL" }
        ));
        out
    }
}

/// The product accumulator: collects contributions and multiplies norms.
struct ReportBuilder {
    query: String,
    contributions: Vec<Contribution>,
    product: FieldElement,
    per_curve: Vec<(String, bool)>,
}

impl ReportBuilder {
    fn new(query: impl Into<String>, base: &Fq) -> ReportBuilder {
        ReportBuilder {
            query: query.into(),
            contributions: Vec::new(),
            product: base.one(),
            per_curve: Vec::new(),
        }
    }

    fn push(
        &mut self,
        id: String,
        degree: usize,
        local: &FieldElement,
        normed: FieldElement,
        trivial: bool,
    ) -> Result<()> {
        self.product = self.product.mul(&normed)?;
        self.contributions.push(Contribution {
            id,
            residue_degree: degree,
            local: local.to_string(),
            normed: normed.to_string(),
            trivial,
        });
        Ok(())
    }

    fn finish(self) -> SymbolReport {
        SymbolReport {
            query: self.query,
            verdict: self.product.is_one(),
            product: self.product.to_string(),
            contributions: self.contributions,
            per_curve: self.per_curve,
        }
    }
}

/// Norm context of a flag: the embedding of the base field into the residue
/// field of the point.
fn flag_norm(flag: &Flag) -> Result<Embedding> {
    Embedding::new(flag.point.base(), flag.point.residue_field())
}

/// True when the expansion is a unit whose reduction is a unit (both
/// valuations zero) — such arguments contribute trivially.
fn is_bi_unit(e: &TSeries) -> Result<bool> {
    if e.valuation()? != 0 {
        return Ok(false);
    }
    Ok(reduce_mod_m(e)?.valuation()? == 0)
}

/// Local normed tame symbol of three expansions at a flag.
fn normed_symbol_at_flag(
    engine: &dyn SymbolEngine,
    flag: &Flag,
    ef: &TSeries,
    eg: &TSeries,
    ea: &TSeries,
) -> Result<(symbols::SymbolValue, bool)> {
    let trivial = is_bi_unit(ef)? && is_bi_unit(eg)? && is_bi_unit(ea)?;
    let local = engine.tame2(ef, eg, ea)?;
    let emb = flag_norm(flag)?;
    let normed = emb.norm(&local)?;
    let mut value = symbols::SymbolValue::new(local);
    value.normed = Some(normed);
    Ok((value, trivial))
}

/// Reciprocity around a point: the product over the branch flags at `pt` of
/// the normed two-dimensional tame symbols of f, g, a.
pub fn around_point(
    engine: &dyn SymbolEngine,
    pt: &ClosedPoint,
    f: &RationalFunction,
    g: &RationalFunction,
    a: &RationalFunction,
) -> Result<SymbolReport> {
    let base = pt.base().clone();
    let mut rb = ReportBuilder::new(format!("point {}", pt.label()), &base);
    let flags = curves_through_point(pt, &[f, g, a])?;
    for flag in &flags {
        let ef = expand_at_flag(f, flag)?;
        let eg = expand_at_flag(g, flag)?;
        let ea = expand_at_flag(a, flag)?;
        let (sv, trivial) = normed_symbol_at_flag(engine, flag, &ef, &eg, &ea)?;
        let normed = sv.normed.clone().expect("normed value is set");
        rb.push(
            flag.label(),
            flag.point.degree(),
            &sv.value,
            normed,
            trivial,
        )?;
    }
    Ok(rb.finish())
}

/// Reciprocity along a projective curve: the product over the contributing
/// closed points of C (including the points at infinity) of the normed tame
/// symbols at the flags {x in C}. Nodal points of C contribute one factor
/// per branch.
pub fn along_curve(
    engine: &dyn SymbolEngine,
    curve: &Curve,
    f: &RationalFunction,
    g: &RationalFunction,
    a: &RationalFunction,
) -> Result<SymbolReport> {
    let base = curve.field().clone();
    let mut rb = ReportBuilder::new(format!("curve {curve}"), &base);
    let pts = closed_points_on_curve(curve, &[f, g, a])?;
    for pt in &pts {
        for flag in flags_of_curve_at_point(curve, pt)? {
            let ef = expand_at_flag(f, &flag)?;
            let eg = expand_at_flag(g, &flag)?;
            let ea = expand_at_flag(a, &flag)?;
            let (sv, trivial) = normed_symbol_at_flag(engine, &flag, &ef, &eg, &ea)?;
            let normed = sv.normed.clone().expect("normed value is set");
            rb.push(flag.label(), pt.degree(), &sv.value, normed, trivial)?;
        }
    }
    Ok(rb.finish())
}

/// The global law: for each curve in the union of the supports of the
/// divisors of f, g, a, the along-curve product is 1; the global verdict is
/// their conjunction (hence the total product is 1).
pub fn global_product(
    engine: &dyn SymbolEngine,
    f: &RationalFunction,
    g: &RationalFunction,
    a: &RationalFunction,
) -> Result<SymbolReport> {
    let base = f.field().clone();
    let mut rb = ReportBuilder::new("global", &base);
    let mut curves: Vec<Curve> = Vec::new();
    for func in [f, g, a] {
        if func.is_zero() {
            return Err(Error::ZeroInput("global product of zero"));
        }
        if func.numerator().total_degree() == Some(0)
            && func.denominator().total_degree() == Some(0)
        {
            continue;
        }
        for (c, _) in crate::surface::divisor(func)? {
            if !curves.contains(&c) {
                curves.push(c);
            }
        }
    }
    curves.sort_by_key(|a| a.key());
    let mut all = true;
    let mut product = base.one();
    for c in &curves {
        let sub = along_curve(engine, c, f, g, a)?;
        all &= sub.verdict;
        rb.per_curve.push((c.to_string(), sub.verdict));
        for contrib in sub.contributions {
            rb.contributions.push(Contribution {
                id: format!("{c} :: {}", contrib.id),
                ..contrib
            });
        }
        product = product.mul(&parse_value(&base, &sub.product)?)?;
    }
    rb.product = product;
    let mut report = rb.finish();
    report.verdict = all && report.verdict;
    Ok(report)
}

fn parse_value(fq: &Fq, text: &str) -> Result<FieldElement> {
    crate::parse::parse_field_element(fq, text)
}

/// Weil reciprocity on a projective curve: the product over its closed
/// points of the normed one-dimensional tame symbols of the restrictions of
/// two functions. The restrictions must be nonzero, i.e. the curve may not
/// divide numerator or denominator.
pub fn weil_on_curve(
    engine: &dyn SymbolEngine,
    curve: &Curve,
    f: &RationalFunction,
    g: &RationalFunction,
) -> Result<SymbolReport> {
    let base = curve.field().clone();
    let mut rb = ReportBuilder::new(format!("weil {curve}"), &base);
    let pts = closed_points_on_curve(curve, &[f, g])?;
    for pt in &pts {
        for flag in flags_of_curve_at_point(curve, pt)? {
            let rf = restrict_function_to_branch(f, &flag)?;
            let rg = restrict_function_to_branch(g, &flag)?;
            let local = engine.tame1(&rf, &rg)?;
            let emb = flag_norm(&flag)?;
            let normed = emb.norm(&local)?;
            let trivial = rf.valuation()? == 0 && rg.valuation()? == 0;
            rb.push(flag.label(), pt.degree(), &local, normed, trivial)?;
        }
    }
    Ok(rb.finish())
}

/// Steinberg identities at a flag: (f, 1-f, h) = 1 and the equal-argument
/// consequence (h, h, f) = (-1, h, f).
pub fn steinberg_check(
    engine: &dyn SymbolEngine,
    f: &RationalFunction,
    h: &RationalFunction,
    flag: &Flag,
) -> Result<bool> {
    let one = RationalFunction::constant(f.field().one());
    let omf = one.sub(f)?;
    if omf.is_zero() {
        return Err(Error::Degenerate("f = 1 makes 1 - f vanish"));
    }
    let ef = expand_at_flag(f, flag)?;
    let eomf = expand_at_flag(&omf, flag)?;
    let eh = expand_at_flag(h, flag)?;
    let first = engine.tame2(&ef, &eomf, &eh)?.is_one();
    let minus_one = two_local_const(flag.residue_field().one().neg());
    let lhs = engine.tame2(&eh, &eh, &ef)?;
    let rhs = engine.tame2(&minus_one, &eh, &ef)?;
    Ok(first && lhs == rhs)
}

/// Direct formula engine used by the default entry points.
pub fn default_engine() -> &'static dyn SymbolEngine {
    crate::engine::engine_by_name("formula").expect("formula engine is registered")
}
