//! Branch parameterizations of a plane curve at a point, by Hensel lifting
//! in the completed local ring. A branch is a graph y = phi(x) (or x =
//! phi(y) when the tangent is vertical) with phi a power series over the
//! residue field, regenerable to any precision.
//!
//! Supported local shapes: smooth points, and ordinary nodes whose two
//! distinct tangents are defined over the residue field. Everything else
//! raises a clear unsupported-geometry error.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfield::{FieldElement, Fq};
use crate::laurent::{Series, USeries, Window, DEFAULT_CAP, DEFAULT_PRECISION};
use crate::surface::poly::Poly2;

/// One branch of a curve through the origin of its local chart.
#[derive(Clone)]
pub struct Branch {
    /// Residue field of the point (coefficients of phi live here).
    pub ext: Fq,
    /// When true the roles of the chart coordinates are swapped: the branch
    /// is the graph x = phi(y) and the transversal coordinate is y.
    pub swapped: bool,
    /// Local curve equation, translated to the origin, in branch
    /// orientation (already swapped when `swapped` is set).
    pub local_eq: Poly2,
    /// Branch index at the point (0 for smooth, 0/1 at a node), used only
    /// for deterministic labels.
    pub index: usize,
    solver: BranchSolver,
}

#[derive(Clone)]
enum BranchSolver {
    /// Smooth graph through the origin: F(0,0) = 0, F_y(0,0) != 0.
    Smooth,
    /// Nodal branch with tangent slope s and unit pivot: phi = s*x + x*psi
    /// where G(x, psi) = F(x, s x + x psi)/x^2 has a simple root psi(0) = 0.
    Node { slope: FieldElement },
}

impl Branch {
    /// All branches of the translated local equation `f_loc` (vanishing at
    /// the origin) over the residue field. The transversal coordinate of
    /// each branch follows the deterministic rule: the first chart
    /// coordinate whose vanishing line is not tangent to the branch.
    pub fn branches_at_origin(f_loc: &Poly2) -> Result<Vec<Branch>> {
        let ext = f_loc.field().clone();
        if !f_loc.coeff(0, 0).is_zero() {
            return Err(Error::Internal("local equation must vanish at the origin"));
        }
        let c10 = f_loc.coeff(1, 0);
        let c01 = f_loc.coeff(0, 1);
        if !c10.is_zero() || !c01.is_zero() {
            // smooth point, tangent line c10*x + c01*y = 0
            let branch = if !c01.is_zero() {
                // the line x = 0 is not the tangent: u = x, graph y = phi(x)
                Branch {
                    ext,
                    swapped: false,
                    local_eq: f_loc.clone(),
                    index: 0,
                    solver: BranchSolver::Smooth,
                }
            } else {
                // tangent is vertical: u = y, graph x = phi(y)
                Branch {
                    ext,
                    swapped: true,
                    local_eq: f_loc.swap_xy(),
                    index: 0,
                    solver: BranchSolver::Smooth,
                }
            };
            return Ok(vec![branch]);
        }
        // lowest-degree form must be a nondegenerate quadratic (ordinary node)
        let q20 = f_loc.coeff(2, 0);
        let q11 = f_loc.coeff(1, 1);
        let q02 = f_loc.coeff(0, 2);
        if q20.is_zero() && q11.is_zero() && q02.is_zero() {
            return Err(Error::Unsupported(
                "singular point of multiplicity at least 3".into(),
            ));
        }
        // tangent directions: roots of q02 s^2 + q11 s + q20 (slope s),
        // plus the vertical direction when q02 = 0
        let mut branches = Vec::new();
        let mut slopes: Vec<FieldElement> = Vec::new();
        let mut vertical = false;
        if q02.is_zero() {
            vertical = true;
            if q11.is_zero() {
                return Err(Error::Unsupported(
                    "double tangent line at a singular point (not an ordinary node)".into(),
                ));
            }
            // remaining direction: q11 s + q20 = 0
            slopes.push(q20.neg().div(&q11)?);
        } else {
            // discriminant of q02 s^2 + q11 s + q20
            let disc = q11.mul(&q11)?.sub(&q20.mul(&q02)?.mul(&ext.from_int(4))?)?;
            if disc.is_zero() {
                return Err(Error::Unsupported(
                    "double tangent line at a singular point (not an ordinary node)".into(),
                ));
            }
            let mut found = Vec::new();
            for e in ext.elements() {
                if q02
                    .mul(&e.mul(&e)?)?
                    .add(&q11.mul(&e)?)?
                    .add(&q20)?
                    .is_zero()
                {
                    found.push(e);
                }
            }
            if found.len() != 2 {
                return Err(Error::Unsupported(
                    "node tangents are not defined over the residue field".into(),
                ));
            }
            found.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
            slopes = found;
        }
        let mut index = 0usize;
        for s in slopes {
            branches.push(Branch {
                ext: ext.clone(),
                swapped: false,
                local_eq: f_loc.clone(),
                index,
                solver: BranchSolver::Node { slope: s },
            });
            index += 1;
        }
        if vertical {
            // swap coordinates; the vertical branch has slope 0 there
            let swapped_eq = f_loc.swap_xy();
            branches.push(Branch {
                ext: ext.clone(),
                swapped: true,
                local_eq: swapped_eq,
                index,
                solver: BranchSolver::Node { slope: ext.zero() },
            });
        }
        Ok(branches)
    }

    /// The branch series phi with at least `n` known coefficients, plus a
    /// regenerator for more. A line has an exactly linear graph.
    pub fn phi(&self) -> Result<USeries> {
        if self.local_eq.total_degree() == Some(1) {
            let c10 = self.local_eq.coeff(1, 0);
            let c01 = self.local_eq.coeff(0, 1);
            let slope = c10.neg().div(&c01)?;
            return Ok(USeries::monomial(slope, 1));
        }
        let this = self.clone();
        let regen = Arc::new(move |n: usize| -> Result<Window<FieldElement>> {
            let w = this.phi_window(n.max(DEFAULT_PRECISION))?;
            Ok(w)
        });
        Series::from_regen(&self.ext, regen, DEFAULT_PRECISION, DEFAULT_CAP)
    }

    /// Window of phi coefficients from index 0 (phi(0) = 0 always, so the
    /// reported window starts at the series valuation).
    fn phi_window(&self, n: usize) -> Result<Window<FieldElement>> {
        let coeffs = match &self.solver {
            BranchSolver::Smooth => newton_graph(&self.local_eq, n)?,
            BranchSolver::Node { slope } => {
                // phi = s x + x psi, G(x, psi) := F(x, s x + x psi)/x^2
                let g = node_reduced_equation(&self.local_eq, slope)?;
                let psi = newton_graph(&g, n)?;
                // assemble s*x + x*psi
                let mut out = vec![self.ext.zero(); n.max(2)];
                out[1] = slope.clone();
                for (k, c) in psi.iter().enumerate() {
                    if k + 1 < out.len() {
                        out[k + 1] = out[k + 1].add(c)?;
                    }
                }
                out.truncate(n.max(2));
                out
            }
        };
        // normalize: drop leading zeros (phi(0) = 0 by construction)
        let mut val = 0i64;
        let mut cs = coeffs;
        while cs.first().map(|c| c.is_zero()) == Some(true) {
            cs.remove(0);
            val += 1;
        }
        if cs.is_empty() {
            // the branch series is identically zero (a coordinate line)
            return Ok(Window {
                val: 0,
                coeffs: Vec::new(),
                exact: true,
            });
        }
        Ok(Window {
            val,
            coeffs: cs,
            exact: false,
        })
    }
}

/// Solve F(x, phi(x)) = 0 mod x^n for the unique power-series graph with
/// phi(0) = 0, given F(0,0) = 0 and F_y(0,0) invertible. Newton iteration
/// with quadratic convergence on truncated series.
fn newton_graph(f: &Poly2, n: usize) -> Result<Vec<FieldElement>> {
    let ext = f.field().clone();
    let fy0 = f.coeff(0, 1);
    if fy0.is_zero() {
        return Err(Error::Internal("Newton pivot must be a unit"));
    }
    let mut prec = 2usize;
    let mut phi = TruncSeries::zeros(&ext, 2);
    while prec < 2 * n {
        prec = (prec * 2).min(2 * n);
        phi.pad(prec);
        let val = eval_poly2(f, &phi, prec)?;
        let dval = eval_poly2_dy(f, &phi, prec)?;
        let corr = val.mul(&dval.invert()?, prec)?;
        phi = phi.sub(&corr)?;
        phi.truncate(prec);
    }
    phi.truncate(n.max(1));
    Ok(phi.c)
}

/// G(x, psi) = F(x, s x + x psi) / x^2, exactly.
fn node_reduced_equation(f: &Poly2, slope: &FieldElement) -> Result<Poly2> {
    let ext = f.field().clone();
    let x = Poly2::var_x(&ext);
    let y_sub = x.scale(slope)?.add(&x.mul(&Poly2::var_y(&ext))?)?; // s x + x psi  (psi plays y)
    let g_full = f.compose(&x, &y_sub)?;
    // divide by x^2 exactly
    let x2 = x.mul(&x)?;
    g_full
        .try_exact_div(&x2)?
        .ok_or(Error::Internal("node equation must be divisible by x^2"))
}

/// Minimal truncated power-series helper for the Newton loop.
#[derive(Clone)]
struct TruncSeries {
    fq: Fq,
    c: Vec<FieldElement>,
}

impl TruncSeries {
    fn zeros(fq: &Fq, n: usize) -> TruncSeries {
        TruncSeries {
            fq: fq.clone(),
            c: vec![fq.zero(); n],
        }
    }

    fn constant(fq: &Fq, v: FieldElement, n: usize) -> TruncSeries {
        let mut s = TruncSeries::zeros(fq, n);
        s.c[0] = v;
        s
    }

    fn pad(&mut self, n: usize) {
        while self.c.len() < n {
            self.c.push(self.fq.zero());
        }
    }

    fn truncate(&mut self, n: usize) {
        self.c.truncate(n);
    }

    fn add(&self, o: &TruncSeries) -> Result<TruncSeries> {
        let n = self.c.len().max(o.c.len());
        let mut out = TruncSeries::zeros(&self.fq, n);
        for k in 0..n {
            let a = self.c.get(k).cloned().unwrap_or_else(|| self.fq.zero());
            let b = o.c.get(k).cloned().unwrap_or_else(|| self.fq.zero());
            out.c[k] = a.add(&b)?;
        }
        Ok(out)
    }

    fn sub(&self, o: &TruncSeries) -> Result<TruncSeries> {
        let n = self.c.len().max(o.c.len());
        let mut out = TruncSeries::zeros(&self.fq, n);
        for k in 0..n {
            let a = self.c.get(k).cloned().unwrap_or_else(|| self.fq.zero());
            let b = o.c.get(k).cloned().unwrap_or_else(|| self.fq.zero());
            out.c[k] = a.sub(&b)?;
        }
        Ok(out)
    }

    fn mul(&self, o: &TruncSeries, n: usize) -> Result<TruncSeries> {
        let mut out = TruncSeries::zeros(&self.fq, n);
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                out.c[i + j] = out.c[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(out)
    }

    fn invert(&self) -> Result<TruncSeries> {
        let n = self.c.len();
        if self.c.is_empty() || self.c[0].is_zero() {
            return Err(Error::Internal("inverting a non-unit series"));
        }
        let l = self.c[0].inv()?;
        let mut out = TruncSeries::zeros(&self.fq, n);
        out.c[0] = l.clone();
        for k in 1..n {
            let mut acc = self.fq.zero();
            for j in 1..=k {
                acc = acc.add(&self.c[j].mul(&out.c[k - j])?)?;
            }
            out.c[k] = l.mul(&acc.neg())?;
        }
        Ok(out)
    }
}

/// Evaluate F(x, s(x)) as a truncated series (x is the series variable).
fn eval_poly2(f: &Poly2, s: &TruncSeries, n: usize) -> Result<TruncSeries> {
    let fq = f.field().clone();
    let mut acc = TruncSeries::zeros(&fq, n);
    for xp in f.y_coeffs().iter().rev() {
        acc = acc.mul(s, n)?;
        // add the univariate polynomial xp as a series
        let mut xs = TruncSeries::zeros(&fq, n);
        for (k, c) in xp.coeffs().iter().enumerate() {
            if k < n {
                xs.c[k] = c.clone();
            }
        }
        acc = acc.add(&xs)?;
    }
    Ok(acc)
}

fn eval_poly2_dy(f: &Poly2, s: &TruncSeries, n: usize) -> Result<TruncSeries> {
    // ordinary y-derivative; used only where it is a unit
    let fq = f.field().clone();
    let mut df = Poly2::zero(&fq);
    for (&(i, j), c) in f.terms() {
        if j == 0 {
            continue;
        }
        let w = c.mul(&fq.from_int(j as i64))?;
        if !w.is_zero() {
            let cur = df.coeff(i, j - 1).add(&w)?;
            df.insert((i, j - 1), cur);
        }
    }
    if df.is_zero() {
        return Ok(TruncSeries::constant(&fq, fq.zero(), n));
    }
    eval_poly2(&df, s, n)
}
