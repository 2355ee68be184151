//! The model surface: the projective plane over a finite field, with
//! curves, closed points, flags, divisors of rational functions, and the
//! expansion maps from the function field into the two-dimensional local
//! field attached to a flag.
//!
//! Affine charts are numbered 0, 1, 2; chart 0 has coordinates
//! (x, y) = (X1/X0, X2/X0) and the line at infinity is X0 = 0. Points at
//! infinity live in the chart of smallest usable index.

pub mod branch;
pub mod factor;
pub mod poly;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfield::{Embedding, FieldElement, Fq};
use crate::laurent::{TSeries, USeries};

use branch::Branch;
use factor::{factor_poly1, factor_poly2, poly2_key, roots_of_exact_degree};
use poly::{resultant_y, Poly1, Poly2};

/// A rational function on the surface: a coprime fraction of bivariate
/// polynomials in the chart-0 coordinates, denominator normalized.
#[derive(Clone, PartialEq)]
pub struct RationalFunction {
    num: Poly2,
    den: Poly2,
}

impl std::fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

impl std::fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == Poly2::one(self.num.field()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl RationalFunction {
    pub fn new(num: Poly2, den: Poly2) -> Result<RationalFunction> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut rf = RationalFunction { num, den };
        rf.normalize()?;
        Ok(rf)
    }

    pub fn from_poly(p: Poly2) -> RationalFunction {
        let fq = p.field().clone();
        RationalFunction {
            num: p,
            den: Poly2::one(&fq),
        }
    }

    pub fn constant(c: FieldElement) -> RationalFunction {
        RationalFunction::from_poly(Poly2::constant(c))
    }

    fn normalize(&mut self) -> Result<()> {
        if self.num.is_zero() {
            self.den = Poly2::one(self.num.field());
            return Ok(());
        }
        let g = self.num.gcd2(&self.den)?;
        if g.total_degree().unwrap_or(0) > 0 {
            self.num = self.num.try_exact_div(&g)?.expect("gcd divides");
            self.den = self.den.try_exact_div(&g)?.expect("gcd divides");
        }
        // make the denominator's leading coefficient 1 in the fixed order
        let key = self
            .den
            .terms()
            .keys()
            .max_by_key(|&&(i, j)| (i + j, i, j))
            .copied()
            .expect("nonzero denominator");
        let lead = self.den.coeff(key.0, key.1);
        let linv = lead.inv()?;
        self.den = self.den.scale(&linv)?;
        self.num = self.num.scale(&linv)?;
        Ok(())
    }

    pub fn field(&self) -> &Fq {
        self.num.field()
    }

    pub fn numerator(&self) -> &Poly2 {
        &self.num
    }

    pub fn denominator(&self) -> &Poly2 {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &RationalFunction) -> Result<RationalFunction> {
        RationalFunction::new(self.num.mul(&other.num)?, self.den.mul(&other.den)?)
    }

    pub fn div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RationalFunction::new(self.num.mul(&other.den)?, self.den.mul(&other.num)?)
    }

    pub fn add(&self, other: &RationalFunction) -> Result<RationalFunction> {
        RationalFunction::new(
            self.num.mul(&other.den)?.add(&other.num.mul(&self.den)?)?,
            self.den.mul(&other.den)?,
        )
    }

    pub fn sub(&self, other: &RationalFunction) -> Result<RationalFunction> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, e: i64) -> Result<RationalFunction> {
        if e == 0 {
            return Ok(RationalFunction::from_poly(Poly2::one(self.field())));
        }
        if self.is_zero() {
            if e < 0 {
                return Err(Error::DivisionByZero);
            }
            return Ok(self.clone());
        }
        let (n, d) = if e > 0 {
            (self.num.pow(e as u32)?, self.den.pow(e as u32)?)
        } else {
            (
                self.den.pow(e.unsigned_abs() as u32)?,
                self.num.pow(e.unsigned_abs() as u32)?,
            )
        };
        RationalFunction::new(n, d)
    }

    /// Numerator/denominator pair in the given chart, with the power of the
    /// chart's infinity coordinate folded in.
    pub fn in_chart(&self, chart: u8) -> Result<(Poly2, Poly2)> {
        if chart == 0 {
            return Ok((self.num.clone(), self.den.clone()));
        }
        let dn = self.num.total_degree().unwrap_or(0) as i64;
        let dd = self.den.total_degree().unwrap_or(0) as i64;
        let mut n = chart_transform(&self.num, chart)?;
        let mut d = chart_transform(&self.den, chart)?;
        let fq = self.field();
        let x = Poly2::var_x(fq);
        if dd >= dn {
            n = n.mul(&x.pow((dd - dn) as u32)?)?;
        } else {
            d = d.mul(&x.pow((dn - dd) as u32)?)?;
        }
        Ok((n, d))
    }
}

/// Transform a chart-0 polynomial of total degree e into the given chart:
/// the dehomogenization of its homogenization.
fn chart_transform(p: &Poly2, chart: u8) -> Result<Poly2> {
    let fq = p.field().clone();
    let Some(e) = p.total_degree() else {
        return Ok(Poly2::zero(&fq));
    };
    let mut out = Poly2::zero(&fq);
    for (&(i, j), c) in p.terms() {
        let k = e - i - j;
        let key = match chart {
            1 => (k, j),
            2 => (k, i),
            _ => (i, j),
        };
        let cur = out.coeff(key.0, key.1).add(c)?;
        out.insert(key, cur);
    }
    Ok(out)
}

/// An irreducible curve on the surface, stored through its chart-0 affine
/// equation (normalized) or as the line at infinity.
#[derive(Clone)]
pub enum Curve {
    LineAtInfinity(Fq),
    Affine(Poly2),
}

impl PartialEq for Curve {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Curve::LineAtInfinity(a), Curve::LineAtInfinity(b)) => a == b,
            (Curve::Affine(a), Curve::Affine(b)) => a == b,
            _ => false,
        }
    }
}

impl std::fmt::Debug for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Curve[{}]", self)
    }
}

impl std::fmt::Display for Curve {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Curve::LineAtInfinity(_) => write!(f, "infinity"),
            Curve::Affine(p) => write!(f, "{p}"),
        }
    }
}

impl Curve {
    /// Build from an affine equation, checking irreducibility over the base
    /// field.
    pub fn from_affine(p: &Poly2) -> Result<Curve> {
        if p.total_degree().unwrap_or(0) == 0 {
            return Err(Error::Unsupported("a curve needs positive degree".into()));
        }
        let fac = factor_poly2(p)?;
        if fac.len() != 1 || fac[0].1 != 1 {
            return Err(Error::Unsupported(format!(
                "curve equation is not irreducible: {p}"
            )));
        }
        Ok(Curve::Affine(p.normalized()?))
    }

    pub fn line_at_infinity(fq: &Fq) -> Curve {
        Curve::LineAtInfinity(fq.clone())
    }

    pub fn field(&self) -> &Fq {
        match self {
            Curve::LineAtInfinity(fq) => fq,
            Curve::Affine(p) => p.field(),
        }
    }

    pub fn degree(&self) -> u32 {
        match self {
            Curve::LineAtInfinity(_) => 1,
            Curve::Affine(p) => p.total_degree().unwrap_or(0),
        }
    }

    /// The affine equation in the given chart; `None` when the curve has no
    /// points in that chart (only the line at infinity in chart 0).
    pub fn affine_eq(&self, chart: u8) -> Result<Option<Poly2>> {
        match self {
            Curve::LineAtInfinity(fq) => {
                if chart == 0 {
                    Ok(None)
                } else {
                    Ok(Some(Poly2::var_x(fq)))
                }
            }
            Curve::Affine(p) => {
                if chart == 0 {
                    Ok(Some(p.clone()))
                } else {
                    Ok(Some(chart_transform(p, chart)?))
                }
            }
        }
    }

    /// Deterministic ordering/identity key.
    pub fn key(&self) -> (u8, Vec<(u32, u32, Vec<u64>)>) {
        match self {
            Curve::LineAtInfinity(_) => (0, Vec::new()),
            Curve::Affine(p) => (1, poly2_key(p)),
        }
    }

    pub fn vanishes_at(&self, pt: &ClosedPoint) -> Result<bool> {
        let Some(aff) = self.affine_eq(pt.chart)? else {
            return Ok(false);
        };
        let emb = pt.embedding()?;
        let affe = aff.map_embed(&emb)?;
        Ok(affe.eval(&pt.x, &pt.y)?.is_zero())
    }
}

/// A closed point of the surface: an affine point of its canonical chart
/// with coordinates in the residue field F_{q^d}, d the degree.
#[derive(Clone)]
pub struct ClosedPoint {
    pub chart: u8,
    pub x: FieldElement,
    pub y: FieldElement,
    base: Fq,
    ext: Fq,
    degree: usize,
    key: Vec<u64>,
}

impl PartialEq for ClosedPoint {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base && self.key == other.key
    }
}

impl std::fmt::Debug for ClosedPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Pt[{}]", self.label())
    }
}

impl ClosedPoint {
    /// Build from chart coordinates over an extension of the base field.
    /// The chart is re-canonicalized to the smallest usable index and the
    /// coordinates are cut down to the exact residue field.
    pub fn new(base: &Fq, chart: u8, x: FieldElement, y: FieldElement) -> Result<ClosedPoint> {
        let host = x.field().clone();
        if host != *y.field() {
            return Err(Error::MismatchedFields(
                x.field().to_string(),
                y.field().to_string(),
            ));
        }
        // projective triple in the host field
        let one = host.one();
        let triple = match chart {
            0 => [one.clone(), x.clone(), y.clone()],
            1 => [x.clone(), one.clone(), y.clone()],
            2 => [x.clone(), y.clone(), one.clone()],
            _ => return Err(Error::Unsupported("chart index out of range".into())),
        };
        // exact degree: Frobenius orbit size of the normalized triple
        let q = base.order();
        let norm = normalize_triple(&triple)?;
        let mut d = 1usize;
        let mut cur = frobenius_triple(&norm, q)?;
        while cur != norm {
            d += 1;
            cur = frobenius_triple(&cur, q)?;
        }
        // cut coordinates down to F_{q^d}
        let ext = Fq::extension(base.characteristic(), base.degree() * d)?;
        let canon_chart = (0..3)
            .find(|&i| !norm[i as usize].is_zero())
            .expect("projective point") as u8;
        let pivot = norm[canon_chart as usize].inv()?;
        let scaled: Vec<FieldElement> =
            norm.iter().map(|c| c.mul(&pivot)).collect::<Result<_>>()?;
        let (cx, cy) = match canon_chart {
            0 => (scaled[1].clone(), scaled[2].clone()),
            1 => (scaled[0].clone(), scaled[2].clone()),
            _ => (scaled[0].clone(), scaled[1].clone()),
        };
        let emb_down = Embedding::new(&ext, &host)?;
        let cx = emb_down.section(&cx)?;
        let cy = emb_down.section(&cy)?;
        // canonical key: minimum over the Frobenius orbit of the encoded triple
        let enc = |t: &[FieldElement; 3]| -> Vec<u64> {
            let mut v = Vec::new();
            for c in t {
                v.push(u64::MAX); // separator
                v.extend_from_slice(c.coeffs());
            }
            v
        };
        let tri_small = match canon_chart {
            0 => [ext.one(), cx.clone(), cy.clone()],
            1 => [cx.clone(), ext.one(), cy.clone()],
            _ => [cx.clone(), cy.clone(), ext.one()],
        };
        let mut key = enc(&tri_small);
        let mut cur = frobenius_triple(&tri_small, q)?;
        for _ in 1..d {
            let e = enc(&cur);
            if e < key {
                key = e;
            }
            cur = frobenius_triple(&cur, q)?;
        }
        Ok(ClosedPoint {
            chart: canon_chart,
            x: cx,
            y: cy,
            base: base.clone(),
            ext,
            degree: d,
            key,
        })
    }

    /// A rational (degree-1) point from base-field chart-0 coordinates.
    pub fn rational(base: &Fq, x: FieldElement, y: FieldElement) -> Result<ClosedPoint> {
        ClosedPoint::new(base, 0, x, y)
    }

    pub fn base(&self) -> &Fq {
        &self.base
    }

    /// The residue field F_{q^d}.
    pub fn residue_field(&self) -> &Fq {
        &self.ext
    }

    /// Residue degree d over the base field.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn key(&self) -> &[u64] {
        &self.key
    }

    pub fn embedding(&self) -> Result<Embedding> {
        Embedding::new(&self.base, &self.ext)
    }

    pub fn label(&self) -> String {
        let one = self.ext.one();
        let (t0, t1, t2) = match self.chart {
            0 => (one.clone(), self.x.clone(), self.y.clone()),
            1 => (self.x.clone(), one.clone(), self.y.clone()),
            _ => (self.x.clone(), self.y.clone(), one.clone()),
        };
        format!("({t0}:{t1}:{t2})")
    }
}

/// The residue degree of a closed point.
pub fn residue_degree(pt: &ClosedPoint) -> usize {
    pt.degree()
}

/// A flag: a closed point on an irreducible curve, with a chosen branch and
/// local coordinates (transversal u, local equation t).
#[derive(Clone)]
pub struct Flag {
    pub point: ClosedPoint,
    pub curve: Curve,
    pub(crate) branch: Arc<Branch>,
}

impl std::fmt::Debug for Flag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Flag[{}]", self.label())
    }
}

impl Flag {
    pub fn label(&self) -> String {
        format!(
            "{}|{}|b{}",
            self.point.label(),
            self.curve,
            self.branch.index
        )
    }

    /// Residue field of the flag's two-dimensional local field.
    pub fn residue_field(&self) -> &Fq {
        self.point.residue_field()
    }

    /// The flag with the other admissible transversal coordinate, when the
    /// branch is smooth and the alternative is transversal: both linear-part
    /// coefficients of the local equation must be units.
    pub fn alternate_transversal(&self) -> Result<Option<Flag>> {
        let eq = &self.branch.local_eq;
        if eq.coeff(1, 0).is_zero() || eq.coeff(0, 1).is_zero() {
            return Ok(None);
        }
        let swapped = eq.swap_xy();
        let branches = Branch::branches_at_origin(&swapped)?;
        if branches.len() != 1 {
            return Ok(None);
        }
        let mut b = branches.into_iter().next().unwrap();
        if b.swapped {
            return Ok(None);
        }
        b.swapped = !self.branch.swapped;
        b.index = self.branch.index;
        Ok(Some(Flag {
            point: self.point.clone(),
            curve: self.curve.clone(),
            branch: Arc::new(b),
        }))
    }
}

fn normalize_triple(t: &[FieldElement; 3]) -> Result<[FieldElement; 3]> {
    let pivot = t
        .iter()
        .find(|c| !c.is_zero())
        .ok_or(Error::ZeroInput("projective point cannot be (0:0:0)"))?;
    let pinv = pivot.inv()?;
    Ok([t[0].mul(&pinv)?, t[1].mul(&pinv)?, t[2].mul(&pinv)?])
}

fn frobenius_triple(t: &[FieldElement; 3], q: u64) -> Result<[FieldElement; 3]> {
    Ok([
        t[0].pow(q as i64)?,
        t[1].pow(q as i64)?,
        t[2].pow(q as i64)?,
    ])
}

/// The complete principal divisor of a nonzero rational function on the
/// projective plane: irreducible components with multiplicities, including
/// the line at infinity with multiplicity deg(den) - deg(num). The
/// degree-weighted multiplicities sum to zero.
pub fn divisor(f: &RationalFunction) -> Result<Vec<(Curve, i64)>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("divisor of zero"));
    }
    let fq = f.field().clone();
    let mut acc: Vec<(Curve, i64)> = Vec::new();
    let mut push = |c: Curve, m: i64| {
        for (d, k) in acc.iter_mut() {
            if *d == c {
                *k += m;
                return;
            }
        }
        acc.push((c, m));
    };
    if f.numerator().total_degree().unwrap_or(0) > 0 {
        for (p, m) in factor_poly2(f.numerator())? {
            push(Curve::Affine(p), m as i64);
        }
    }
    if f.denominator().total_degree().unwrap_or(0) > 0 {
        for (p, m) in factor_poly2(f.denominator())? {
            push(Curve::Affine(p), -(m as i64));
        }
    }
    let dn = f.numerator().total_degree().unwrap_or(0) as i64;
    let dd = f.denominator().total_degree().unwrap_or(0) as i64;
    if dd != dn {
        push(Curve::line_at_infinity(&fq), dd - dn);
    }
    let mut out: Vec<(Curve, i64)> = acc.into_iter().filter(|(_, m)| *m != 0).collect();
    out.sort_by_key(|a| a.0.key());
    Ok(out)
}

/// All intersection points of two distinct irreducible curves.
pub fn intersection_points(c: &Curve, d: &Curve) -> Result<Vec<ClosedPoint>> {
    if c == d {
        return Err(Error::Internal("intersection of a curve with itself"));
    }
    let base = c.field().clone();
    let mut pts: Vec<ClosedPoint> = Vec::new();
    let push = |p: ClosedPoint, pts: &mut Vec<ClosedPoint>| {
        if !pts.contains(&p) {
            pts.push(p);
        }
    };

    // affine intersections in chart 0
    if let (Some(ca), Some(da)) = (c.affine_eq(0)?, d.affine_eq(0)?) {
        for p in affine_intersections(&base, &ca, &da)? {
            push(p, &mut pts);
        }
    }
    // intersections on the line at infinity
    match (c, d) {
        (Curve::LineAtInfinity(_), Curve::Affine(p))
        | (Curve::Affine(p), Curve::LineAtInfinity(_)) => {
            for pt in points_at_infinity(&base, p, None)? {
                push(pt, &mut pts);
            }
        }
        (Curve::Affine(p), Curve::Affine(q)) => {
            for pt in points_at_infinity(&base, p, Some(q))? {
                push(pt, &mut pts);
            }
        }
        _ => {}
    }
    pts.sort_by_key(|a| (a.degree, a.key.clone()));
    Ok(pts)
}

fn affine_intersections(base: &Fq, ca: &Poly2, da: &Poly2) -> Result<Vec<ClosedPoint>> {
    let mut out = Vec::new();
    let cy = ca.deg_y().unwrap_or(0);
    let dy = da.deg_y().unwrap_or(0);
    if cy == 0 && dy == 0 {
        // two unions of vertical lines; distinct irreducibles never share one
        return Ok(out);
    }
    // eliminate y
    let r: Poly1 = if cy == 0 {
        ca.y_coeffs().remove(0)
    } else if dy == 0 {
        da.y_coeffs().remove(0)
    } else {
        resultant_y(ca, da)?
    };
    if r.is_zero() {
        return Err(Error::Internal(
            "distinct irreducible curves cannot share a component",
        ));
    }
    // factor the eliminant first: root searches only enter fields where
    // irreducible factors actually live, so an oversized residue field is a
    // real error rather than a silently dropped point
    for (fac, _) in factor_poly1(&r)? {
        let k = fac.degree().unwrap_or(0);
        if k == 0 {
            continue;
        }
        for alpha in roots_of_exact_degree(&fac, k)? {
            let extk = alpha.field().clone();
            let embk = Embedding::new(base, &extk)?;
            // common roots in y over F_{q^k}
            let cak = substitute_x(ca, &embk, &alpha)?;
            let dak = substitute_x(da, &embk, &alpha)?;
            let g = if cak.is_zero() {
                dak
            } else if dak.is_zero() {
                cak
            } else {
                cak.gcd(&dak)?
            };
            if g.is_zero() {
                // the whole vertical fiber: cannot happen for distinct curves
                return Err(Error::Internal("vertical fiber in both curves"));
            }
            for (gfac, _) in factor_poly1(&g)? {
                let j = gfac.degree().unwrap_or(0);
                if j == 0 {
                    continue;
                }
                for beta in roots_of_exact_degree(&gfac, j)? {
                    // lift alpha into the field of beta
                    let extj = beta.field().clone();
                    let lift = Embedding::new(&extk, &extj)?;
                    let alpha_up = lift.embed(&alpha)?;
                    out.push(ClosedPoint::new(base, 0, alpha_up, beta)?);
                }
            }
        }
    }
    Ok(out)
}

fn substitute_x(p: &Poly2, emb: &Embedding, alpha: &FieldElement) -> Result<Poly1> {
    let ext = emb.big().clone();
    let mut coeffs = Vec::new();
    for yc in p.y_coeffs() {
        coeffs.push(yc.map_embed(emb)?.eval(alpha)?);
    }
    Ok(Poly1::from_coeffs(&ext, coeffs))
}

/// Points at infinity of the affine curve p, optionally filtered by the
/// vanishing of another curve's top form.
fn points_at_infinity(base: &Fq, p: &Poly2, also_on: Option<&Poly2>) -> Result<Vec<ClosedPoint>> {
    let mut out = Vec::new();
    let e = p.total_degree().unwrap_or(0);
    // directions (X1 : X2) = (1 : m): roots of sum_j c_{e-j, j} m^j
    let mut slope_coeffs = vec![base.zero(); e as usize + 1];
    for (i, j, c) in p.top_form() {
        let _ = i;
        slope_coeffs[j as usize] = c;
    }
    let slope_poly = Poly1::from_coeffs(base, slope_coeffs);
    if !slope_poly.is_zero() && slope_poly.degree().unwrap_or(0) > 0 {
        for (fac, _) in factor_poly1(&slope_poly)? {
            let k = fac.degree().unwrap_or(0);
            if k == 0 {
                continue;
            }
            for m in roots_of_exact_degree(&fac, k)? {
                let extk = m.field().clone();
                if let Some(q) = also_on {
                    let qe = top_form_slope_poly(base, q)?;
                    let emb = Embedding::new(base, &extk)?;
                    if !qe.map_embed(&emb)?.eval(&m)?.is_zero() {
                        continue;
                    }
                }
                // chart 1 coordinates (X0/X1, X2/X1) = (0, m)
                out.push(ClosedPoint::new(base, 1, extk.zero(), m)?);
            }
        }
    }
    // the direction (0:0:1): on p iff the coefficient of y^e vanishes
    if p.coeff(0, e).is_zero() {
        let on_other = match also_on {
            None => true,
            Some(q) => {
                let eq = q.total_degree().unwrap_or(0);
                q.coeff(0, eq).is_zero()
            }
        };
        if on_other {
            out.push(ClosedPoint::new(base, 2, base.zero(), base.zero())?);
        }
    }
    Ok(out)
}

fn top_form_slope_poly(base: &Fq, p: &Poly2) -> Result<Poly1> {
    let e = p.total_degree().unwrap_or(0);
    let mut coeffs = vec![base.zero(); e as usize + 1];
    for (_, j, c) in p.top_form() {
        coeffs[j as usize] = c;
    }
    Ok(Poly1::from_coeffs(base, coeffs))
}

/// All closed points of C lying on components of the divisors of the given
/// functions (other than C itself), together with C's points at infinity.
/// Points where none of the functions degenerate are the trivial-factor
/// candidates; the verifiers mark them as such.
pub fn closed_points_on_curve(c: &Curve, funcs: &[&RationalFunction]) -> Result<Vec<ClosedPoint>> {
    let base = c.field().clone();
    let mut comps: Vec<Curve> = vec![Curve::line_at_infinity(&base)];
    for f in funcs {
        if f.is_zero() {
            return Err(Error::ZeroInput("zero function on a curve"));
        }
        for (d, _) in divisor(f)? {
            if !comps.contains(&d) {
                comps.push(d);
            }
        }
    }
    let mut pts: Vec<ClosedPoint> = Vec::new();
    for d in comps {
        if d == *c {
            continue;
        }
        for p in intersection_points(c, &d)? {
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
    }
    pts.sort_by_key(|a| (a.degree, a.key.clone()));
    Ok(pts)
}

/// The branch flags at a closed point of all divisor components of the
/// given functions passing through it. One flag per smooth component, two
/// per ordinary node.
pub fn curves_through_point(pt: &ClosedPoint, funcs: &[&RationalFunction]) -> Result<Vec<Flag>> {
    let mut comps: Vec<Curve> = Vec::new();
    for f in funcs {
        if f.is_zero() {
            return Err(Error::ZeroInput("zero function at a point"));
        }
        for (d, _) in divisor(f)? {
            if !comps.contains(&d) {
                comps.push(d);
            }
        }
    }
    comps.sort_by_key(|a| a.key());
    let mut flags = Vec::new();
    for curve in comps {
        if !curve.vanishes_at(pt)? {
            continue;
        }
        flags.extend(flags_of_curve_at_point(&curve, pt)?);
    }
    Ok(flags)
}

/// The branch flags of one curve at one of its points.
pub fn flags_of_curve_at_point(curve: &Curve, pt: &ClosedPoint) -> Result<Vec<Flag>> {
    let aff = curve
        .affine_eq(pt.chart)?
        .ok_or_else(|| Error::Unsupported("curve has no equation in the point's chart".into()))?;
    let emb = pt.embedding()?;
    let loc = aff.map_embed(&emb)?.translate(&pt.x, &pt.y)?;
    let branches = Branch::branches_at_origin(&loc)?;
    Ok(branches
        .into_iter()
        .map(|b| Flag {
            point: pt.clone(),
            curve: curve.clone(),
            branch: Arc::new(b),
        })
        .collect())
}

/// The image of a nonzero rational function in the two-dimensional local
/// field k(x)((u))((t)) attached to a flag: powers of the curve equation are
/// split off exactly (they carry the t-valuation), the residual numerator
/// and denominator are expanded along the branch, and the result carries
/// regenerators for arbitrary precision.
pub fn expand_at_flag(f: &RationalFunction, flag: &Flag) -> Result<TSeries> {
    if f.is_zero() {
        return Err(Error::ZeroInput("expansion of zero"));
    }
    let chart = flag.point.chart;
    let (mut num, mut den) = f.in_chart(chart)?;
    let caff = flag
        .curve
        .affine_eq(chart)?
        .ok_or_else(|| Error::Unsupported("curve invisible in the flag's chart".into()))?;
    let mut k1 = 0i64;
    while let Some(q) = num.try_exact_div(&caff)? {
        num = q;
        k1 += 1;
    }
    let mut k2 = 0i64;
    while let Some(q) = den.try_exact_div(&caff)? {
        den = q;
        k2 += 1;
    }
    let emb = flag.point.embedding()?;
    let localize = |p: &Poly2| -> Result<Poly2> {
        let l = p.map_embed(&emb)?.translate(&flag.point.x, &flag.point.y)?;
        Ok(if flag.branch.swapped { l.swap_xy() } else { l })
    };
    let cl = localize(&caff)?;
    let nl = localize(&num)?;
    let dl = localize(&den)?;
    let cexp = expand_branch_poly(&cl, &flag.branch)?;
    let nexp = expand_branch_poly(&nl, &flag.branch)?;
    let dexp = expand_branch_poly(&dl, &flag.branch)?;
    let net = cexp.pow(k1 - k2)?;
    net.mul(&nexp)?.mul(&dexp.invert()?)
}

/// Expansion of a polynomial (not divisible by the branch's curve, unless it
/// is the curve equation itself) along a branch: the divided-power Taylor
/// series in the branch offset t, each coefficient a u-series restricted to
/// the branch graph. Exact in t; finitely many t-terms.
fn expand_branch_poly(p: &Poly2, branch: &Branch) -> Result<TSeries> {
    let ext = p.field().clone();
    if p.is_zero() {
        return Err(Error::ZeroInput("expansion of the zero polynomial"));
    }
    let dy = p.deg_y().unwrap_or(0);
    // intersection-theoretic bound on the vanishing order of any nonzero
    // restriction along the branch
    let bound = ((p.total_degree().unwrap_or(0) + 1)
        * (branch.local_eq.total_degree().unwrap_or(1) + 1)
        + 2) as i64;
    let phi = branch.phi()?;
    let mut coeffs = Vec::with_capacity(dy as usize + 1);
    for j in 0..=dy {
        let pj = p.hasse_y(j)?;
        coeffs.push(restrict_to_branch(&pj, &phi, bound)?);
    }
    Ok(TSeries::exact_window(&ext, 0, coeffs))
}

/// The restriction of a polynomial to the branch graph, as a u-series.
/// Zero restrictions are detected exactly through the intersection bound;
/// nonzero ones carry a regenerator that re-evaluates the polynomial on the
/// branch directly, so repeated refinement never compounds precision
/// demands through operation chains.
pub(crate) fn restrict_to_branch(p: &Poly2, phi: &USeries, bound: i64) -> Result<USeries> {
    let ext = p.field().clone();
    if p.is_zero() {
        return Ok(USeries::zero(&ext));
    }
    // exact branch graph (a polynomial): the restriction is exact
    if phi.is_exact() {
        let mut acc = USeries::zero(&ext);
        for yc in p.y_coeffs().iter().rev() {
            acc = acc.mul(phi)?;
            if !yc.is_zero() {
                let xs = USeries::exact_window(&ext, 0, yc.coeffs().to_vec());
                acc = acc.add(&xs)?;
            }
        }
        return Ok(acc);
    }
    let probe_len = bound as usize + 4;
    let w = restriction_window(p, phi, probe_len)?;
    let lead = w.iter().position(|c| !c.is_zero());
    match lead {
        None => {
            // vanishing beyond the intersection bound: identically zero
            Ok(USeries::zero(&ext))
        }
        Some(k) => {
            let coeffs: Vec<FieldElement> = w[k..].to_vec();
            let (p2, phi2) = (p.clone(), phi.clone());
            let regen = std::sync::Arc::new(move |n: usize| {
                let prec = k + n + 2;
                let w = restriction_window(&p2, &phi2, prec)?;
                if w.len() <= k || w[k].is_zero() {
                    return Err(Error::Internal("restriction lead moved under refinement"));
                }
                Ok(crate::laurent::Window {
                    val: k as i64,
                    coeffs: w[k..].to_vec(),
                    exact: false,
                })
            });
            Ok(USeries::approx_with_regen(&ext, k as i64, coeffs, regen))
        }
    }
}

/// Dense evaluation of P(u, phi(u)) keeping coefficients u^0 .. u^{prec-1}.
/// The restriction of a polynomial to a branch graph is a power series, so
/// a window from index 0 is complete knowledge up to prec.
fn restriction_window(p: &Poly2, phi: &USeries, prec: usize) -> Result<Vec<FieldElement>> {
    let ext = p.field().clone();
    let phiw = phi.ensured_through(prec as i64)?;
    let mut phivec = vec![ext.zero(); prec];
    for (k, slot) in phivec.iter_mut().enumerate() {
        *slot = phiw.coeff_at(k as i64)?;
    }
    let mut acc = vec![ext.zero(); prec];
    for yc in p.y_coeffs().iter().rev() {
        // acc = acc * phi + yc, truncated at prec
        let mut next = vec![ext.zero(); prec];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in phivec.iter().enumerate() {
                if i + j >= prec {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                next[i + j] = next[i + j].add(&a.mul(b)?)?;
            }
        }
        for (k, c) in yc.coeffs().iter().enumerate() {
            if k < prec {
                next[k] = next[k].add(c)?;
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// The restriction of a rational function to a branch of a curve, as a
/// u-series. Errors when the curve divides the numerator or denominator.
pub fn restrict_function_to_branch(f: &RationalFunction, flag: &Flag) -> Result<USeries> {
    if f.is_zero() {
        return Err(Error::ZeroInput("restriction of zero"));
    }
    let chart = flag.point.chart;
    let (num, den) = f.in_chart(chart)?;
    let caff = flag
        .curve
        .affine_eq(chart)?
        .ok_or_else(|| Error::Unsupported("curve invisible in the flag's chart".into()))?;
    if num.try_exact_div(&caff)?.is_some() || den.try_exact_div(&caff)?.is_some() {
        return Err(Error::ZeroInput(
            "function has zero or pole along the whole curve",
        ));
    }
    let emb = flag.point.embedding()?;
    let localize = |p: &Poly2| -> Result<Poly2> {
        let l = p.map_embed(&emb)?.translate(&flag.point.x, &flag.point.y)?;
        Ok(if flag.branch.swapped { l.swap_xy() } else { l })
    };
    let nl = localize(&num)?;
    let dl = localize(&den)?;
    let bound = ((num
        .total_degree()
        .unwrap_or(0)
        .max(den.total_degree().unwrap_or(0))
        + 1)
        * (branch_degree(flag) + 1)
        + 2) as i64;
    let phi = flag.branch.phi()?;
    let n = restrict_to_branch(&nl, &phi, bound)?;
    let d = restrict_to_branch(&dl, &phi, bound)?;
    n.mul(&d.invert()?)
}

fn branch_degree(flag: &Flag) -> u32 {
    flag.branch.local_eq.total_degree().unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::reduce_mod_m;

    fn f5() -> Fq {
        Fq::prime(5).unwrap()
    }

    fn x(fq: &Fq) -> Poly2 {
        Poly2::var_x(fq)
    }

    fn y(fq: &Fq) -> Poly2 {
        Poly2::var_y(fq)
    }

    #[test]
    fn divisor_of_coordinates() {
        let fq = f5();
        let fx = RationalFunction::from_poly(x(&fq));
        let d = divisor(&fx).unwrap();
        assert_eq!(d.len(), 2);
        let infs: Vec<i64> = d
            .iter()
            .filter(|(c, _)| matches!(c, Curve::LineAtInfinity(_)))
            .map(|(_, m)| *m)
            .collect();
        assert_eq!(infs, vec![-1]);
        // x/y
        let fxy = RationalFunction::new(x(&fq), y(&fq)).unwrap();
        let d2 = divisor(&fxy).unwrap();
        assert_eq!(d2.len(), 2);
        assert!(d2.iter().all(|(c, _)| matches!(c, Curve::Affine(_))));
        let ms: Vec<i64> = d2.iter().map(|(_, m)| *m).collect();
        assert!(ms.contains(&1) && ms.contains(&-1));
    }

    #[test]
    fn divisor_degree_sum_is_zero() {
        let fq = Fq::prime(7).unwrap();
        // (x^2 + y^2)/x: conic irreducible over F_7
        let conic = x(&fq)
            .mul(&x(&fq))
            .unwrap()
            .add(&y(&fq).mul(&y(&fq)).unwrap())
            .unwrap();
        let f = RationalFunction::new(conic, x(&fq)).unwrap();
        let d = divisor(&f).unwrap();
        let mut sum = 0i64;
        let mut saw_conic = false;
        let mut saw_inf = false;
        for (c, m) in &d {
            sum += c.degree() as i64 * m;
            match c {
                Curve::Affine(p) if p.total_degree() == Some(2) => {
                    saw_conic = true;
                    assert_eq!(*m, 1);
                }
                Curve::LineAtInfinity(_) => {
                    saw_inf = true;
                    assert_eq!(*m, -1);
                }
                _ => {}
            }
        }
        assert!(saw_conic && saw_inf);
        assert_eq!(sum, 0);
    }

    #[test]
    fn closed_points_on_a_line() {
        let fq = f5();
        let c = Curve::from_affine(&y(&fq)).unwrap();
        let fx = RationalFunction::from_poly(x(&fq));
        let fx1 =
            RationalFunction::new(x(&fq).sub(&Poly2::one(&fq)).unwrap(), Poly2::one(&fq)).unwrap();
        let pts = closed_points_on_curve(&c, &[&fx, &fx1]).unwrap();
        // (0,0), (1,0) and the point at infinity of the line y = 0
        assert_eq!(pts.len(), 3);
        assert!(pts.iter().all(|p| p.degree() == 1));
        assert!(pts.iter().any(|p| p.chart != 0));
    }

    #[test]
    fn conic_meets_infinity_in_a_degree_two_point() {
        let fq = Fq::prime(7).unwrap();
        let conic = x(&fq)
            .mul(&x(&fq))
            .unwrap()
            .add(&y(&fq).mul(&y(&fq)).unwrap())
            .unwrap()
            .sub(&Poly2::one(&fq))
            .unwrap();
        let c = Curve::from_affine(&conic).unwrap();
        let fx = RationalFunction::from_poly(x(&fq));
        let pts = closed_points_on_curve(&c, &[&fx]).unwrap();
        // x = 0 meets the conic at (0, ±1); infinity gives a conjugate pair
        let degs: Vec<usize> = pts.iter().map(|p| p.degree()).collect();
        assert!(degs.contains(&1));
        assert!(degs.contains(&2), "degrees found: {degs:?}");
        for p in &pts {
            if p.degree() == 2 {
                assert_eq!(p.residue_field().order(), 49);
            }
        }
    }

    #[test]
    fn flags_at_origin_for_coordinate_lines() {
        let fq = f5();
        let pt = ClosedPoint::rational(&fq, fq.zero(), fq.zero()).unwrap();
        let fx = RationalFunction::from_poly(x(&fq));
        let fy = RationalFunction::from_poly(y(&fq));
        let flags = curves_through_point(&pt, &[&fx, &fy]).unwrap();
        assert_eq!(flags.len(), 2);
        // expansions: x along {y=0} is the transversal u; y is the equation t
        for fl in &flags {
            let ex = expand_at_flag(&fx, fl).unwrap();
            let ey = expand_at_flag(&fy, fl).unwrap();
            match format!("{}", fl.curve).as_str() {
                "y" => {
                    assert_eq!(ex.valuation().unwrap(), 0);
                    assert_eq!(reduce_mod_m(&ex).unwrap().valuation().unwrap(), 1);
                    assert_eq!(ey.valuation().unwrap(), 1);
                }
                "x" => {
                    assert_eq!(ex.valuation().unwrap(), 1);
                    assert_eq!(ey.valuation().unwrap(), 0);
                    assert_eq!(reduce_mod_m(&ey).unwrap().valuation().unwrap(), 1);
                }
                other => panic!("unexpected curve {other}"),
            }
        }
    }

    #[test]
    fn point_not_on_any_component_gives_no_flags() {
        let fq = f5();
        let pt = ClosedPoint::rational(&fq, fq.from_int(2), fq.from_int(3)).unwrap();
        let fx = RationalFunction::from_poly(x(&fq));
        let flags = curves_through_point(&pt, &[&fx]).unwrap();
        assert!(flags.is_empty());
    }

    #[test]
    fn expansion_of_rational_function_geometric_series() {
        let fq = f5();
        let pt = ClosedPoint::rational(&fq, fq.zero(), fq.zero()).unwrap();
        let cy = Curve::from_affine(&y(&fq)).unwrap();
        let flag = flags_of_curve_at_point(&cy, &pt).unwrap().remove(0);
        // x/(x-1) = -u(1 + u + u^2 + ...)
        let f = RationalFunction::new(x(&fq), x(&fq).sub(&Poly2::one(&fq)).unwrap()).unwrap();
        let e = expand_at_flag(&f, &flag).unwrap();
        assert_eq!(e.valuation().unwrap(), 0);
        let r = reduce_mod_m(&e).unwrap().ensured_through(6).unwrap();
        assert!(r.coeff_at(0).unwrap().is_zero());
        for k in 1..6i64 {
            assert_eq!(r.coeff_at(k).unwrap(), fq.from_int(-1), "coefficient {k}");
        }
    }

    #[test]
    fn expansion_t_valuation_matches_divisor_multiplicity() {
        let fq = f5();
        let pt = ClosedPoint::rational(&fq, fq.zero(), fq.zero()).unwrap();
        let cy = Curve::from_affine(&y(&fq)).unwrap();
        let flag = flags_of_curve_at_point(&cy, &pt).unwrap().remove(0);
        // f = y^3 * (x+1) / y: net multiplicity 2 along y = 0
        let f = RationalFunction::new(
            y(&fq)
                .pow(3)
                .unwrap()
                .mul(&x(&fq).add(&Poly2::one(&fq)).unwrap())
                .unwrap(),
            y(&fq),
        )
        .unwrap();
        let e = expand_at_flag(&f, &flag).unwrap();
        assert_eq!(e.valuation().unwrap(), 2);
    }

    #[test]
    fn expansion_multiplicative() {
        let fq = f5();
        let pt = ClosedPoint::rational(&fq, fq.zero(), fq.zero()).unwrap();
        let cy = Curve::from_affine(&y(&fq)).unwrap();
        let flag = flags_of_curve_at_point(&cy, &pt).unwrap().remove(0);
        let f = RationalFunction::new(
            x(&fq).add(&y(&fq)).unwrap(),
            x(&fq).sub(&Poly2::one(&fq)).unwrap(),
        )
        .unwrap();
        let g = RationalFunction::from_poly(y(&fq).add(&Poly2::one(&fq)).unwrap());
        let lhs = expand_at_flag(&f.mul(&g).unwrap(), &flag).unwrap();
        let rhs = expand_at_flag(&f, &flag)
            .unwrap()
            .mul(&expand_at_flag(&g, &flag).unwrap())
            .unwrap();
        assert!(lhs.eq_through(&rhs, 4).unwrap());
    }

    #[test]
    fn residue_degrees() {
        let fq = Fq::prime(7).unwrap();
        let pt = ClosedPoint::rational(&fq, fq.one(), fq.zero()).unwrap();
        assert_eq!(residue_degree(&pt), 1);
        // point at infinity of the line y = 0 is rational
        let c = Curve::from_affine(&y(&fq)).unwrap();
        let fx = RationalFunction::from_poly(x(&fq));
        let pts = closed_points_on_curve(&c, &[&fx]).unwrap();
        let inf: Vec<_> = pts.iter().filter(|p| p.chart != 0).collect();
        assert_eq!(inf.len(), 1);
        assert_eq!(inf[0].degree(), 1);
    }

    #[test]
    fn nodal_branches_at_origin() {
        let fq = f5();
        // y^2 - x^2 - x^3 with functions x, y through the node
        let cubic = y(&fq)
            .mul(&y(&fq))
            .unwrap()
            .sub(&x(&fq).mul(&x(&fq)).unwrap())
            .unwrap()
            .sub(&x(&fq).pow(3).unwrap())
            .unwrap();
        let fcubic = RationalFunction::from_poly(cubic);
        let fx = RationalFunction::from_poly(x(&fq));
        let fy = RationalFunction::from_poly(y(&fq));
        let pt = ClosedPoint::rational(&fq, fq.zero(), fq.zero()).unwrap();
        let flags = curves_through_point(&pt, &[&fx, &fy, &fcubic]).unwrap();
        // two coordinate lines plus two nodal branches
        assert_eq!(flags.len(), 4);
        let nodal: Vec<_> = flags.iter().filter(|f| f.curve.degree() == 3).collect();
        assert_eq!(nodal.len(), 2);
        for fl in nodal {
            let e = expand_at_flag(&fcubic, fl).unwrap();
            assert_eq!(e.valuation().unwrap(), 1, "each branch sees t-order 1");
        }
    }

    #[test]
    fn closed_points_with_constant_functions() {
        let fq = f5();
        let c = Curve::from_affine(&y(&fq)).unwrap();
        let c2 = RationalFunction::constant(fq.from_int(2));
        let pts = closed_points_on_curve(&c, &[&c2]).unwrap();
        // only the candidate at infinity; its contribution is trivially 1
        assert_eq!(pts.len(), 1);
        assert!(pts[0].chart != 0);
    }

    #[test]
    fn chart_transform_consistency() {
        use crate::sampling::Sampler;
        let fq = f5();
        let mut smp = Sampler::new(&fq, 2020);
        for _ in 0..20 {
            let a = smp.nonzero_element();
            let b = smp.element();
            let l = smp.line_through(&a, &b).unwrap();
            let conic = smp.smooth_conic().unwrap();
            let f = RationalFunction::from_poly(l)
                .div(&RationalFunction::from_poly(conic))
                .unwrap();
            // chart-1 coordinates of the affine point (a, b) with a != 0:
            // (1/a, b/a)
            let (n1, d1) = f.in_chart(1).unwrap();
            let ainv = a.inv().unwrap();
            let s = ainv.clone();
            let w = b.mul(&ainv).unwrap();
            let d0 = f.denominator().eval(&a, &b).unwrap();
            let d1v = d1.eval(&s, &w).unwrap();
            if d0.is_zero() || d1v.is_zero() {
                continue;
            }
            let v0 = f.numerator().eval(&a, &b).unwrap().div(&d0).unwrap();
            let v1 = n1.eval(&s, &w).unwrap().div(&d1v).unwrap();
            assert_eq!(v0, v1, "chart transform must preserve values");
        }
    }

    #[test]
    fn divisor_is_a_homomorphism_on_random_pairs() {
        use crate::sampling::Sampler;
        let fq = f5();
        let mut smp = Sampler::new(&fq, 1717);
        for _ in 0..10 {
            let a = smp.element();
            let b = smp.element();
            let l1 = smp.line_through(&a, &b).unwrap();
            let c = smp.smooth_conic().unwrap();
            let f = RationalFunction::from_poly(l1)
                .div(&RationalFunction::from_poly(c.clone()))
                .unwrap();
            let g = RationalFunction::from_poly(c).mul(&f).unwrap();
            let mut sum: Vec<(Curve, i64)> = divisor(&f).unwrap();
            for (d, m) in divisor(&g).unwrap() {
                match sum.iter_mut().find(|(c, _)| *c == d) {
                    Some((_, k)) => *k += m,
                    None => sum.push((d, m)),
                }
            }
            sum.retain(|(_, m)| *m != 0);
            sum.sort_by(|x, y| x.0.key().cmp(&y.0.key()));
            let prod = divisor(&f.mul(&g).unwrap()).unwrap();
            assert_eq!(prod.len(), sum.len());
            for ((c1, m1), (c2, m2)) in prod.iter().zip(&sum) {
                assert!(c1 == c2 && m1 == m2);
            }
            // degree-weighted multiplicity sum vanishes on every sample
            for func in [&f, &g] {
                let total: i64 = divisor(func)
                    .unwrap()
                    .iter()
                    .map(|(c, m)| c.degree() as i64 * m)
                    .sum();
                assert_eq!(total, 0);
            }
        }
    }

    #[test]
    fn expansion_valuation_matches_divisor_multiplicity_on_samples() {
        use crate::sampling::Sampler;
        let fq = f5();
        let mut smp = Sampler::new(&fq, 1818);
        for _ in 0..8 {
            let scene = smp.point_scene().unwrap();
            for func in [&scene.f, &scene.g, &scene.a] {
                let div = divisor(func).unwrap();
                for flag in curves_through_point(&scene.point, &[func]).unwrap() {
                    let mult = div
                        .iter()
                        .find(|(c, _)| *c == flag.curve)
                        .map(|(_, m)| *m)
                        .unwrap_or(0);
                    let e = expand_at_flag(func, &flag).unwrap();
                    assert_eq!(e.valuation().unwrap(), mult);
                }
            }
        }
    }

    #[test]
    fn restriction_to_branch_errors_on_vanishing_function() {
        let fq = f5();
        let pt = ClosedPoint::rational(&fq, fq.zero(), fq.zero()).unwrap();
        let cy = Curve::from_affine(&y(&fq)).unwrap();
        let flag = flags_of_curve_at_point(&cy, &pt).unwrap().remove(0);
        let fy = RationalFunction::from_poly(y(&fq));
        assert!(restrict_function_to_branch(&fy, &flag).is_err());
        let fx = RationalFunction::from_poly(x(&fq));
        let r = restrict_function_to_branch(&fx, &flag).unwrap();
        assert_eq!(r.valuation().unwrap(), 1);
    }
}
