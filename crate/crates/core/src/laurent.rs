//! Precision-tracked Laurent series in one variable over an abstract
//! coefficient ring, iterated once to model two-dimensional local fields
//! `k'((u))((t))` and their rings of integers.
//!
//! A series is either *exact* (a Laurent polynomial, all omitted
//! coefficients are genuinely zero) or an *approximation*: a finite window
//! of known coefficients, optionally with a regenerator — a pure callback
//! that can recompute the window from an exact source at any requested
//! length. Regenerated windows always start at the true valuation, so
//! "zero within precision" and exact zero stay distinguishable.
//!
//! Window lengths start at [`DEFAULT_PRECISION`] and double on demand up to
//! a per-series cap (default [`DEFAULT_CAP`]); past the cap operations fail
//! with [`Error::PrecisionExhausted`] rather than silently truncating.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfield::{FieldElement, Fq};

/// Initial window length per layer.
pub const DEFAULT_PRECISION: usize = 8;
/// Default cap on window length per layer.
pub const DEFAULT_CAP: usize = 128;

/// Coefficient ring interface: exact field elements at the bottom layer,
/// series themselves one layer up.
pub trait Coeff: Clone + Send + Sync + 'static {
    /// Context needed to build constants (the residue field handle).
    type Ctx: Clone + PartialEq + Send + Sync + fmt::Debug + 'static;

    fn ctx_of(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn c_add(&self, other: &Self) -> Result<Self>;
    fn c_sub(&self, other: &Self) -> Result<Self>;
    fn c_neg(&self) -> Self;
    fn c_mul(&self, other: &Self) -> Result<Self>;
    /// Inverse of a unit coefficient (leading coefficients only).
    fn c_inv(&self) -> Result<Self>;
    /// Syntactic zero test: true only when the value is zero beyond doubt
    /// and without any regeneration work.
    fn c_is_exact_zero(&self) -> bool;
    /// Semantic zero test; may regenerate and may fail with precision
    /// exhaustion when the question is undecidable within the cap.
    fn c_decide_zero(&self) -> Result<bool>;
    /// True when the value carries complete information.
    fn c_fully_known(&self) -> bool;
}

impl Coeff for FieldElement {
    type Ctx = Fq;

    fn ctx_of(&self) -> Fq {
        self.field().clone()
    }
    fn zero(ctx: &Fq) -> Self {
        ctx.zero()
    }
    fn one(ctx: &Fq) -> Self {
        ctx.one()
    }
    fn c_add(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }
    fn c_sub(&self, other: &Self) -> Result<Self> {
        self.sub(other)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
    fn c_mul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
    fn c_inv(&self) -> Result<Self> {
        self.inv()
    }
    fn c_is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn c_decide_zero(&self) -> Result<bool> {
        Ok(self.is_zero())
    }
    fn c_fully_known(&self) -> bool {
        true
    }
}

/// A regenerated window: `coeffs[k]` is the coefficient at `val + k`.
/// The contract: `val` is the true valuation and `coeffs[0]` is nonzero,
/// except for the zero series which is `{ val: 0, coeffs: [], exact: true }`.
pub struct Window<C> {
    pub val: i64,
    pub coeffs: Vec<C>,
    pub exact: bool,
}

type Regen<C> = dyn Fn(usize) -> Result<Window<C>> + Send + Sync;

/// A Laurent series with a known coefficient window.
///
/// Invariants: coefficients below `val` are zero; when `exact`, coefficients
/// at and beyond `val + coeffs.len()` are zero as well; otherwise they are
/// unknown and only reachable through the regenerator.
pub struct Series<C: Coeff> {
    ctx: C::Ctx,
    val: i64,
    coeffs: Vec<C>,
    exact: bool,
    regen: Option<Arc<Regen<C>>>,
    cap: usize,
}

impl<C: Coeff> Clone for Series<C> {
    fn clone(&self) -> Self {
        Series {
            ctx: self.ctx.clone(),
            val: self.val,
            coeffs: self.coeffs.clone(),
            exact: self.exact,
            regen: self.regen.clone(),
            cap: self.cap,
        }
    }
}

impl<C: Coeff + fmt::Debug> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Series{{val:{}, coeffs:{:?}, exact:{}, regen:{}}}",
            self.val,
            self.coeffs,
            self.exact,
            self.regen.is_some()
        )
    }
}

/// Inner layer: Laurent series over a finite field, modelling k'((u)).
pub type USeries = Series<FieldElement>;
/// Outer layer: Laurent series in t with u-series coefficients, modelling
/// the two-dimensional local field k'((u))((t)).
pub type TSeries = Series<USeries>;

impl<C: Coeff> Series<C> {
    pub fn ctx(&self) -> &C::Ctx {
        &self.ctx
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    /// The exact zero series.
    pub fn zero(ctx: &C::Ctx) -> Self {
        Series {
            ctx: ctx.clone(),
            val: 0,
            coeffs: Vec::new(),
            exact: true,
            regen: None,
            cap: DEFAULT_CAP,
        }
    }

    pub fn constant(c: C) -> Self {
        let ctx = c.ctx_of();
        if c.c_is_exact_zero() {
            return Self::zero(&ctx);
        }
        Series {
            ctx,
            val: 0,
            coeffs: vec![c],
            exact: true,
            regen: None,
            cap: DEFAULT_CAP,
        }
    }

    pub fn one(ctx: &C::Ctx) -> Self {
        Series::constant(C::one(ctx))
    }

    /// The variable of this layer (u for the inner layer, t for the outer).
    pub fn variable(ctx: &C::Ctx) -> Self {
        Series::monomial(C::one(ctx), 1)
    }

    /// c times the variable to the k-th power, exactly.
    pub fn monomial(c: C, k: i64) -> Self {
        let mut s = Series::constant(c);
        if !s.coeffs.is_empty() {
            s.val = k;
        }
        s
    }

    /// Exact series from a window: all unlisted coefficients are zero.
    pub fn exact_window(ctx: &C::Ctx, val: i64, coeffs: Vec<C>) -> Self {
        let mut s = Series {
            ctx: ctx.clone(),
            val,
            coeffs,
            exact: true,
            regen: None,
            cap: DEFAULT_CAP,
        };
        s.trim_exact();
        s
    }

    /// Approximation backed by a regenerator. The window is fetched eagerly.
    pub fn from_regen(ctx: &C::Ctx, regen: Arc<Regen<C>>, len: usize, cap: usize) -> Result<Self> {
        let w = regen(len.max(1))?;
        Ok(Series {
            ctx: ctx.clone(),
            val: w.val,
            coeffs: w.coeffs,
            exact: w.exact,
            regen: if w.exact { None } else { Some(regen) },
            cap,
        })
    }

    /// Approximation with a fixed window (coefficients past it unknown) and
    /// no regenerator. Test and interchange use.
    pub fn approx_window(ctx: &C::Ctx, val: i64, coeffs: Vec<C>, cap: usize) -> Self {
        Series {
            ctx: ctx.clone(),
            val,
            coeffs,
            exact: false,
            regen: None,
            cap,
        }
    }

    /// Approximation from a known window plus a regenerator for more.
    pub fn approx_with_regen(ctx: &C::Ctx, val: i64, coeffs: Vec<C>, regen: Arc<Regen<C>>) -> Self {
        Series {
            ctx: ctx.clone(),
            val,
            coeffs,
            exact: false,
            regen: Some(regen),
            cap: DEFAULT_CAP,
        }
    }

    fn trim_exact(&mut self) {
        while self.coeffs.first().map(|c| c.c_is_exact_zero()) == Some(true) {
            self.coeffs.remove(0);
            self.val += 1;
        }
        while self.coeffs.last().map(|c| c.c_is_exact_zero()) == Some(true) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.val = 0;
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// True when this is the exact zero series.
    pub fn is_exact_zero(&self) -> bool {
        self.exact && self.coeffs.iter().all(|c| c.c_is_exact_zero())
    }

    /// Exclusive end of the known coefficient range; `None` means all
    /// coefficients are known (exact series).
    pub fn known_end(&self) -> Option<i64> {
        if self.exact {
            None
        } else {
            Some(self.val + self.coeffs.len() as i64)
        }
    }

    /// Coefficient at absolute index i within the known range.
    pub fn coeff_at(&self, i: i64) -> Result<C> {
        if i < self.val {
            return Ok(C::zero(&self.ctx));
        }
        let k = (i - self.val) as usize;
        if k < self.coeffs.len() {
            return Ok(self.coeffs[k].clone());
        }
        if self.exact {
            Ok(C::zero(&self.ctx))
        } else {
            Err(Error::UnknownCoefficient(i))
        }
    }

    /// A copy whose known range reaches at least through index `end - 1`,
    /// regenerating if necessary.
    pub fn ensured_through(&self, end: i64) -> Result<Self> {
        if self.exact || self.val + (self.coeffs.len() as i64) >= end {
            return Ok(self.clone());
        }
        let Some(regen) = &self.regen else {
            return Err(Error::UnknownCoefficient(end - 1));
        };
        let mut want = self.coeffs.len().max(DEFAULT_PRECISION);
        loop {
            let w = regen(want)?;
            let reach = w.val + w.coeffs.len() as i64;
            if w.exact || reach >= end {
                return Ok(Series {
                    ctx: self.ctx.clone(),
                    val: w.val,
                    coeffs: w.coeffs,
                    exact: w.exact,
                    regen: if w.exact { None } else { Some(regen.clone()) },
                    cap: self.cap,
                });
            }
            if want >= self.cap {
                return Err(Error::PrecisionExhausted(self.cap));
            }
            want = (want * 2).min(self.cap);
        }
    }

    /// A copy with at least `n` known coefficients counted from the window
    /// start (or everything, for exact series).
    pub fn ensured_len(&self, n: usize) -> Result<Self> {
        self.ensured_through(self.val + n as i64)
    }

    /// Normal form: either exact zero, or a series whose window starts at
    /// the true valuation with a nonzero leading coefficient. Scans the
    /// window, consults the regenerator, and doubles up to the cap.
    pub fn normalized(&self) -> Result<Self> {
        let mut cur = self.clone();
        let mut window_len = cur.coeffs.len().max(DEFAULT_PRECISION);
        loop {
            // scan the current window for the first certainly-nonzero coefficient
            let mut lead: Option<usize> = None;
            for (k, c) in cur.coeffs.iter().enumerate() {
                if c.c_is_exact_zero() {
                    continue;
                }
                if !c.c_decide_zero()? {
                    lead = Some(k);
                    break;
                }
            }
            if let Some(k) = lead {
                let mut out = cur.clone();
                out.coeffs.drain(..k);
                out.val += k as i64;
                return Ok(out);
            }
            if cur.exact {
                return Ok(Series::zero(&self.ctx).with_cap(self.cap));
            }
            let Some(regen) = &cur.regen else {
                return Err(Error::CannotNormalize);
            };
            if window_len > cur.cap {
                return Err(Error::PrecisionExhausted(cur.cap));
            }
            let w = regen(window_len)?;
            let fresh = Series {
                ctx: cur.ctx.clone(),
                val: w.val,
                coeffs: w.coeffs,
                exact: w.exact,
                regen: if w.exact { None } else { Some(regen.clone()) },
                cap: cur.cap,
            };
            if fresh.coeffs.is_empty() && fresh.exact {
                return Ok(Series::zero(&self.ctx).with_cap(self.cap));
            }
            window_len = (window_len * 2).max(fresh.coeffs.len() + 1);
            cur = fresh;
        }
    }

    /// Semantic zero test.
    pub fn decide_zero(&self) -> Result<bool> {
        Ok(self.normalized()?.is_exact_zero())
    }

    /// Index of the first nonzero coefficient. Errors on zero input and
    /// when zero cannot be ruled out within precision.
    pub fn valuation(&self) -> Result<i64> {
        let n = self.normalized()?;
        if n.is_exact_zero() {
            return Err(Error::ZeroInput("valuation of zero is undefined"));
        }
        Ok(n.val)
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(Error::Incompatible(
                "series over different coefficient contexts",
            ));
        }
        Ok(())
    }

    fn compose_cap(&self, other: &Self) -> usize {
        self.cap.max(other.cap)
    }

    /// True when arbitrarily long windows can be reproduced.
    fn regenerable(&self) -> bool {
        self.exact || self.regen.is_some()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let out = add_windows(self, other)?;
        Ok(self.attach_binary_regen(other, out, BinOp::Add))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let out = add_windows(self, &other.neg())?;
        Ok(self.attach_binary_regen(other, out, BinOp::Sub))
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.coeffs = out.coeffs.iter().map(|c| c.c_neg()).collect();
        if let Some(r) = &self.regen {
            let r = r.clone();
            out.regen = Some(Arc::new(move |n| {
                let w = r(n)?;
                Ok(Window {
                    val: w.val,
                    coeffs: w.coeffs.iter().map(|c| c.c_neg()).collect(),
                    exact: w.exact,
                })
            }));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let out = mul_windows(self, other)?;
        Ok(self.attach_binary_regen(other, out, BinOp::Mul))
    }

    fn attach_binary_regen(&self, other: &Self, mut out: Self, op: BinOp) -> Self {
        if out.exact {
            return out;
        }
        if self.regenerable() && other.regenerable() {
            let a = self.clone();
            let b = other.clone();
            out.regen = Some(Arc::new(move |n| binary_regen(&a, &b, op, n)));
        }
        out
    }

    /// Multiplicative inverse up to precision. The input must be nonzero
    /// within precision (or regenerable down to its true valuation).
    pub fn invert(&self) -> Result<Self> {
        let nf = self.normalized()?;
        if nf.is_exact_zero() {
            return Err(Error::ZeroInput("cannot invert zero"));
        }
        let lead_inv = nf.coeffs[0].c_inv()?;
        // exact monomial: exact inverse
        if nf.exact && nf.coeffs.len() == 1 {
            return Ok(Series::monomial(lead_inv, -nf.val).with_cap(self.cap));
        }
        let len = if nf.exact {
            nf.coeffs.len().max(DEFAULT_PRECISION)
        } else {
            nf.coeffs.len()
        };
        let mut out = invert_window(&nf, len)?;
        if nf.regenerable() {
            let src = nf.clone();
            out.regen = Some(Arc::new(move |n| {
                let s = if src.exact {
                    src.clone()
                } else {
                    src.ensured_len(n)?
                };
                let w = invert_window(&s, n)?;
                Ok(Window {
                    val: w.val,
                    coeffs: w.coeffs,
                    exact: false,
                })
            }));
        }
        Ok(out)
    }

    /// Integer power; negative exponents go through `invert`.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Series::one(&self.ctx).with_cap(self.cap));
        }
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc: Option<Self> = None;
        let mut sq = base;
        loop {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq)?,
                });
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            sq = sq.mul(&sq)?;
        }
        Ok(acc.unwrap())
    }

    /// Multiply by variable^k.
    pub fn shift(&self, k: i64) -> Self {
        let mut out = self.clone();
        if out.is_exact_zero() {
            return out;
        }
        out.val += k;
        if let Some(r) = &self.regen {
            let r = r.clone();
            out.regen = Some(Arc::new(move |n| {
                let w = r(n)?;
                Ok(Window {
                    val: w.val + k,
                    coeffs: w.coeffs,
                    exact: w.exact,
                })
            }));
        }
        out
    }

    /// Known window as (start index, coefficients).
    pub fn window(&self) -> (i64, &[C]) {
        (self.val, &self.coeffs)
    }

    /// Equality of the two series on all indices below `end`, as far as the
    /// windows and caps can certify: a difference whose leading coefficient
    /// cannot be exhibited within the caps counts as equal.
    pub fn eq_through(&self, other: &Self, end: i64) -> Result<bool> {
        let d = self.sub(other)?;
        if d.is_exact_zero() {
            return Ok(true);
        }
        match d.normalized() {
            Ok(n) => {
                if n.is_exact_zero() {
                    Ok(true)
                } else {
                    Ok(n.valuation()? >= end)
                }
            }
            Err(Error::PrecisionExhausted(_)) | Err(Error::CannotNormalize) => Ok(true),
            Err(e) => Err(e),
        }
    }
}

#[derive(Clone, Copy)]
enum BinOp {
    Add,
    Sub,
    Mul,
}

/// Recompute a binary operation at window length >= n from the true
/// valuation of the result; used as the composite regenerator.
fn binary_regen<C: Coeff>(a: &Series<C>, b: &Series<C>, op: BinOp, n: usize) -> Result<Window<C>> {
    let mut len = n.max(DEFAULT_PRECISION);
    let cap = a.compose_cap(b);
    loop {
        let aa = widen(a, len)?;
        let bb = widen(b, len)?;
        let raw = match op {
            BinOp::Add => add_windows(&aa, &bb)?,
            BinOp::Sub => add_windows(&aa, &bb.neg())?,
            BinOp::Mul => mul_windows(&aa, &bb)?,
        };
        // locate the leading certainly-nonzero coefficient
        let mut lead: Option<usize> = None;
        for (k, c) in raw.coeffs.iter().enumerate() {
            if c.c_is_exact_zero() {
                continue;
            }
            if !c.c_decide_zero()? {
                lead = Some(k);
                break;
            }
        }
        match lead {
            Some(k) => {
                let have = raw.coeffs.len() - k;
                if raw.exact || have >= n {
                    return Ok(Window {
                        val: raw.val + k as i64,
                        coeffs: raw.coeffs[k..].to_vec(),
                        exact: raw.exact,
                    });
                }
            }
            None => {
                if raw.exact {
                    return Ok(Window {
                        val: 0,
                        coeffs: Vec::new(),
                        exact: true,
                    });
                }
            }
        }
        if len >= cap {
            return Err(Error::PrecisionExhausted(cap));
        }
        len = (len * 2).min(cap);
    }
}

/// Operand with a window of at least `len` coefficients when possible.
fn widen<C: Coeff>(s: &Series<C>, len: usize) -> Result<Series<C>> {
    if s.exact || s.coeffs.len() >= len || s.regen.is_none() {
        Ok(s.clone())
    } else {
        s.ensured_len(len)
    }
}

fn add_windows<C: Coeff>(a: &Series<C>, b: &Series<C>) -> Result<Series<C>> {
    if a.is_exact_zero() {
        return Ok(b.clone());
    }
    if b.is_exact_zero() {
        return Ok(a.clone());
    }
    let val = a.val.min(b.val);
    let exact = a.exact && b.exact;
    let end = if exact {
        (a.val + a.coeffs.len() as i64).max(b.val + b.coeffs.len() as i64)
    } else {
        match (a.known_end(), b.known_end()) {
            (None, Some(eb)) => eb,
            (Some(ea), None) => ea,
            (Some(ea), Some(eb)) => ea.min(eb),
            (None, None) => unreachable!("inexact pair handled above"),
        }
    };
    let mut coeffs = Vec::new();
    for i in val..end {
        coeffs.push(a.coeff_at(i)?.c_add(&b.coeff_at(i)?)?);
    }
    let mut out = Series {
        ctx: a.ctx.clone(),
        val,
        coeffs,
        exact,
        regen: None,
        cap: a.compose_cap(b),
    };
    if exact {
        out.trim_exact();
    }
    Ok(out)
}

fn mul_windows<C: Coeff>(a: &Series<C>, b: &Series<C>) -> Result<Series<C>> {
    if a.is_exact_zero() || b.is_exact_zero() {
        return Ok(Series::zero(&a.ctx).with_cap(a.compose_cap(b)));
    }
    let exact = a.exact && b.exact;
    let val = a.val + b.val;
    let la = a.coeffs.len();
    let lb = b.coeffs.len();
    // known length of the product window: limited by each inexact factor
    let len = if exact {
        la + lb - 1
    } else {
        let ka = if a.exact { usize::MAX } else { la };
        let kb = if b.exact { usize::MAX } else { lb };
        ka.min(kb)
    };
    let mut coeffs: Vec<C> = (0..len).map(|_| C::zero(&a.ctx)).collect();
    for (i, ca) in a.coeffs.iter().enumerate() {
        if ca.c_is_exact_zero() {
            continue;
        }
        for (j, cb) in b.coeffs.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if cb.c_is_exact_zero() {
                continue;
            }
            coeffs[i + j] = coeffs[i + j].c_add(&ca.c_mul(cb)?)?;
        }
    }
    let mut out = Series {
        ctx: a.ctx.clone(),
        val,
        coeffs,
        exact,
        regen: None,
        cap: a.compose_cap(b),
    };
    if exact {
        out.trim_exact();
    }
    Ok(out)
}

/// Inverse window of a normalized series: as many coefficients as the input
/// window supports, at most `n`.
fn invert_window<C: Coeff>(nf: &Series<C>, n: usize) -> Result<Series<C>> {
    let lead_inv = nf.coeffs[0].c_inv()?;
    let n = n.max(1);
    let mut out: Vec<C> = Vec::with_capacity(n);
    out.push(lead_inv.clone());
    for k in 1..n {
        // g_k = -a_0^{-1} * sum_{j=1..=k} a_j g_{k-j}
        let mut acc = C::zero(&nf.ctx);
        let mut short = false;
        for j in 1..=k {
            let aj = if j < nf.coeffs.len() {
                nf.coeffs[j].clone()
            } else if nf.exact {
                C::zero(&nf.ctx)
            } else {
                short = true;
                break;
            };
            if aj.c_is_exact_zero() {
                continue;
            }
            acc = acc.c_add(&aj.c_mul(&out[k - j])?)?;
        }
        if short {
            break;
        }
        out.push(lead_inv.c_mul(&acc.c_neg())?);
    }
    Ok(Series {
        ctx: nf.ctx.clone(),
        val: -nf.val,
        coeffs: out,
        exact: false,
        regen: None,
        cap: nf.cap,
    })
}

// Series over a field can serve as coefficients one layer up.
impl<C: Coeff> Coeff for Series<C> {
    type Ctx = C::Ctx;

    fn ctx_of(&self) -> C::Ctx {
        self.ctx.clone()
    }
    fn zero(ctx: &C::Ctx) -> Self {
        Series::zero(ctx)
    }
    fn one(ctx: &C::Ctx) -> Self {
        Series::one(ctx)
    }
    fn c_add(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }
    fn c_sub(&self, other: &Self) -> Result<Self> {
        self.sub(other)
    }
    fn c_neg(&self) -> Self {
        self.neg()
    }
    fn c_mul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
    fn c_inv(&self) -> Result<Self> {
        self.invert()
    }
    fn c_is_exact_zero(&self) -> bool {
        self.is_exact_zero()
    }
    fn c_decide_zero(&self) -> Result<bool> {
        self.decide_zero()
    }
    fn c_fully_known(&self) -> bool {
        self.exact
    }
}

// --- two-dimensional local field helpers -----------------------------------

/// The element u of k'((u))((t)): the inner variable as an outer constant.
pub fn two_local_u(fq: &Fq) -> TSeries {
    TSeries::constant(USeries::variable(fq))
}

/// The element t of k'((u))((t)).
pub fn two_local_t(fq: &Fq) -> TSeries {
    TSeries::variable(fq)
}

/// A constant of k' viewed in k'((u))((t)).
pub fn two_local_const(c: FieldElement) -> TSeries {
    TSeries::constant(USeries::constant(c))
}

/// Exact element from monomial data: coefficient times u^i t^j.
pub fn two_local_monomial(c: FieldElement, i: i64, j: i64) -> TSeries {
    if c.is_zero() {
        return TSeries::zero(c.field());
    }
    TSeries::monomial(USeries::monomial(c, i), j)
}

/// The image of f in the first residue field k'((u)); defined only for
/// units of the t-adic valuation ring.
pub fn reduce_mod_m(f: &TSeries) -> Result<USeries> {
    let nf = f.normalized()?;
    if nf.is_exact_zero() {
        return Err(Error::ZeroInput("reduction of zero"));
    }
    if nf.valuation()? != 0 {
        return Err(Error::NonUnitReduction(
            "t-valuation must be 0 to reduce modulo the maximal ideal",
        ));
    }
    nf.coeff_at(0)
}

/// The constant term of the constant term: the image in k'* of a unit with
/// unit reduction.
pub fn reduce_to_last_residue(f: &TSeries) -> Result<FieldElement> {
    let r = reduce_mod_m(f)?;
    let nr = r.normalized()?;
    if nr.is_exact_zero() {
        return Err(Error::ZeroInput("last residue of zero reduction"));
    }
    if nr.valuation()? != 0 {
        return Err(Error::NonUnitReduction(
            "u-valuation of the reduction must be 0",
        ));
    }
    nr.coeff_at(0)
}

/// Substitute u -> phi, t -> psi into f, where phi and psi are expressed in
/// the target coordinates. Convergence requirements:
/// - if f has negative t-exponents or an unknown t-tail, psi must be nonzero
///   with positive t-valuation;
/// - if a t-coefficient of f has negative u-exponents or an unknown u-tail,
///   phi must be topologically small: positive t-valuation, or a t-unit
///   whose reduction has positive u-valuation.
pub fn substitute(f: &TSeries, phi: &TSeries, psi: &TSeries) -> Result<TSeries> {
    let out = substitute_once(f, phi, psi)?;
    if out.is_exact() {
        return Ok(out);
    }
    let mut out = out;
    if f.regenerable() && phi.regenerable() && psi.regenerable() {
        let (f2, phi2, psi2) = (f.clone(), phi.clone(), psi.clone());
        out.regen = Some(Arc::new(move |n| {
            let need = (2 * n).max(DEFAULT_PRECISION);
            let ff = widen(&f2, need)?;
            let raw = substitute_once(&ff, &phi2, &psi2)?;
            let nn = raw.normalized()?;
            if nn.is_exact_zero() {
                return Ok(Window {
                    val: 0,
                    coeffs: Vec::new(),
                    exact: true,
                });
            }
            let nn = if nn.is_exact() {
                nn
            } else {
                nn.ensured_len(n)?
            };
            let (val, coeffs) = nn.window();
            Ok(Window {
                val,
                coeffs: coeffs.to_vec(),
                exact: nn.is_exact(),
            })
        }));
    }
    Ok(out)
}

fn substitute_once(f: &TSeries, phi: &TSeries, psi: &TSeries) -> Result<TSeries> {
    let fq = f.ctx().clone();
    let (fval, fcoeffs) = f.window();
    let needs_psi_positive = fval < 0 || !f.is_exact();
    let mut psi_val: Option<i64> = None;
    if needs_psi_positive {
        let v = psi.valuation().map_err(|_| {
            Error::NotConvergent("t-image must be nonzero for negative or unbounded t-exponents")
        })?;
        if v < 1 {
            return Err(Error::NotConvergent(
                "t-image needs positive t-valuation for negative or unbounded t-exponents",
            ));
        }
        psi_val = Some(v);
    }
    let phi_ok = |needed: bool| -> Result<()> {
        if !needed {
            return Ok(());
        }
        let np = phi.normalized()?;
        if np.is_exact_zero() {
            return Err(Error::NotConvergent("u-image must be nonzero"));
        }
        let tv = np.valuation()?;
        if tv >= 1 {
            return Ok(());
        }
        if tv == 0 {
            let red = reduce_mod_m(&np)?;
            if red.valuation()? >= 1 {
                return Ok(());
            }
        }
        Err(Error::NotConvergent(
            "u-image needs positive valuation for negative or unbounded u-exponents",
        ))
    };

    // evaluate over the t-window by Horner in psi
    let mut acc = TSeries::zero(&fq);
    for cj in fcoeffs.iter().rev() {
        acc = acc.mul(psi)?;
        if cj.c_is_exact_zero() {
            continue;
        }
        let (uval, ucoeffs) = cj.window();
        phi_ok(uval < 0 || !cj.is_exact())?;
        // inner Horner in phi
        let mut inner = TSeries::zero(&fq);
        for c in ucoeffs.iter().rev() {
            inner = inner.mul(phi)?;
            if !c.c_is_exact_zero() {
                inner = inner.add(&two_local_const(c.clone()))?;
            }
        }
        if uval != 0 {
            inner = inner.mul(&phi.pow(uval)?)?;
        }
        acc = acc.add(&inner)?;
    }
    if fval != 0 {
        acc = acc.mul(&psi.pow(fval)?)?;
    }
    // clamp claimed knowledge when f has an unknown t-tail
    if !f.is_exact() {
        let end_f = fval + fcoeffs.len() as i64;
        let claim_end = end_f * psi_val.unwrap_or(1);
        acc = clamp_t_knowledge(acc, claim_end);
    }
    Ok(acc)
}

fn clamp_t_knowledge(mut s: TSeries, end: i64) -> TSeries {
    if s.is_exact_zero() {
        return TSeries {
            ctx: s.ctx.clone(),
            val: end,
            coeffs: Vec::new(),
            exact: false,
            regen: None,
            cap: s.cap,
        };
    }
    let cur_end = s.val + s.coeffs.len() as i64;
    if cur_end > end {
        let keep = (end - s.val).max(0) as usize;
        s.coeffs.truncate(keep);
    }
    s.exact = false;
    s.regen = None;
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f5() -> Fq {
        Fq::prime(5).unwrap()
    }

    fn u_of(fq: &Fq) -> USeries {
        USeries::variable(fq)
    }

    #[test]
    fn series_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<USeries>();
        assert_send_sync::<TSeries>();
        assert_send_sync::<Fq>();
        assert_send_sync::<FieldElement>();
    }

    #[test]
    fn add_cancels_leading_term() {
        let fq = f5();
        let u = u_of(&fq);
        let a = u.add(&u.mul(&u).unwrap()).unwrap(); // u + u^2
        let s = a.add(&u.neg()).unwrap(); // u^2
        assert_eq!(s.valuation().unwrap(), 2);
        assert!(s.is_exact());
    }

    #[test]
    fn t_times_t_inverse_is_one() {
        let fq = f5();
        let t = two_local_t(&fq);
        let p = t.mul(&t.invert().unwrap()).unwrap();
        assert_eq!(p.valuation().unwrap(), 0);
        assert!(reduce_to_last_residue(&p).unwrap().is_one());
    }

    #[test]
    fn exact_product_within_window() {
        let fq = f5();
        let u = u_of(&fq);
        let one = USeries::one(&fq);
        let a = one.add(&u).unwrap(); // 1 + u
        let b = one.sub(&u).unwrap(); // 1 - u
        let p = a.mul(&b).unwrap(); // 1 - u^2
        assert!(p.is_exact());
        assert!(p.coeff_at(0).unwrap().is_one());
        assert!(p.coeff_at(1).unwrap().is_zero());
        assert_eq!(p.coeff_at(2).unwrap(), fq.from_int(-1));
    }

    #[test]
    fn invert_exact_monomial_is_exact() {
        let fq = f5();
        let t = two_local_t(&fq);
        let ti = t.invert().unwrap();
        assert!(ti.is_exact());
        assert_eq!(ti.valuation().unwrap(), -1);
    }

    #[test]
    fn invert_geometric_series() {
        let fq = f5();
        let u = u_of(&fq);
        let a = USeries::one(&fq).add(&u).unwrap(); // 1 + u
        let inv = a.invert().unwrap().ensured_len(12).unwrap();
        for k in 0..12i64 {
            let expect = if k % 2 == 0 {
                fq.from_int(1)
            } else {
                fq.from_int(-1)
            };
            assert_eq!(inv.coeff_at(k).unwrap(), expect, "coefficient {k}");
        }
    }

    #[test]
    fn invert_zero_window_errors() {
        let fq = f5();
        let z = USeries::zero(&fq);
        assert!(z.invert().is_err());
        // inexact all-zero window without regenerator
        let s = USeries::approx_window(&fq, 0, vec![fq.zero(), fq.zero()], DEFAULT_CAP);
        assert!(matches!(s.invert(), Err(Error::CannotNormalize)));
    }

    #[test]
    fn valuations() {
        let fq = f5();
        let t = two_local_t(&fq);
        let u = two_local_u(&fq);
        let unit = two_local_const(fq.from_int(3)).add(&u).unwrap();
        let f = t.pow(3).unwrap().mul(&unit).unwrap();
        assert_eq!(f.valuation().unwrap(), 3);
        assert_eq!(two_local_const(fq.from_int(2)).valuation().unwrap(), 0);
        let g = u_of(&fq).pow(-2).unwrap().add(&USeries::one(&fq)).unwrap();
        assert_eq!(g.valuation().unwrap(), -2);
    }

    #[test]
    fn reduce_mod_m_examples() {
        let fq = f5();
        let t = two_local_t(&fq);
        let u = two_local_u(&fq);
        // 3 + u + t*(1 + u)
        let f = two_local_const(fq.from_int(3))
            .add(&u)
            .unwrap()
            .add(
                &t.mul(&two_local_const(fq.from_int(1)).add(&u).unwrap())
                    .unwrap(),
            )
            .unwrap();
        let r = reduce_mod_m(&f).unwrap();
        assert!(r.coeff_at(0).unwrap() == fq.from_int(3) && r.coeff_at(1).unwrap().is_one());
        assert!(reduce_mod_m(&t).is_err());
        // u^{-1} + t reduces to u^{-1}
        let g = two_local_monomial(fq.one(), -1, 0).add(&t).unwrap();
        let rg = reduce_mod_m(&g).unwrap();
        assert_eq!(rg.valuation().unwrap(), -1);
    }

    #[test]
    fn last_residue_examples() {
        let fq = f5();
        let t = two_local_t(&fq);
        let u = two_local_u(&fq);
        let f = two_local_const(fq.from_int(2))
            .add(&u)
            .unwrap()
            .add(&t)
            .unwrap();
        assert_eq!(reduce_to_last_residue(&f).unwrap(), fq.from_int(2));
        assert!(reduce_to_last_residue(&u.add(&t).unwrap()).is_err());
        let one = two_local_const(fq.one());
        let prod = one.add(&u).unwrap().mul(&one.add(&t).unwrap()).unwrap();
        assert!(reduce_to_last_residue(&prod).unwrap().is_one());
    }

    #[test]
    fn substitute_examples() {
        let fq = f5();
        let t = two_local_t(&fq);
        let u = two_local_u(&fq);
        // f = u, u -> u + t gives u + t
        let s = substitute(&u, &u.add(&t).unwrap(), &t).unwrap();
        assert!(s.eq_through(&u.add(&t).unwrap(), 5).unwrap());
        // f = t, t -> t(1+u) gives t + ut
        let psi = t.mul(&two_local_const(fq.one()).add(&u).unwrap()).unwrap();
        let s2 = substitute(&t, &u, &psi).unwrap();
        assert!(s2.eq_through(&psi, 5).unwrap());
        // f = t^{-1}, t -> u: not convergent
        let fneg = t.pow(-1).unwrap();
        assert!(matches!(
            substitute(&fneg, &u, &u),
            Err(Error::NotConvergent(_))
        ));
    }

    #[test]
    fn regenerator_consistency() {
        let fq = f5();
        let u = u_of(&fq);
        let inv = USeries::one(&fq).add(&u).unwrap().invert().unwrap();
        let w8 = inv.ensured_len(8).unwrap();
        let w32 = inv.ensured_len(32).unwrap();
        for k in 0..8i64 {
            assert_eq!(w8.coeff_at(k).unwrap(), w32.coeff_at(k).unwrap());
        }
    }

    #[test]
    fn composite_regen_reaches_deep_coefficients() {
        let fq = f5();
        let u = u_of(&fq);
        let a = USeries::one(&fq).add(&u).unwrap().invert().unwrap(); // 1/(1+u)
        let b = USeries::one(&fq).sub(&u).unwrap().invert().unwrap(); // 1/(1-u)
        let p = a.mul(&b).unwrap(); // 1/(1-u^2)
        let deep = p.ensured_through(40).unwrap();
        for k in 0..40i64 {
            let expect = if k % 2 == 0 { fq.one() } else { fq.zero() };
            assert_eq!(deep.coeff_at(k).unwrap(), expect, "coefficient {k}");
        }
    }

    #[test]
    fn two_layer_inverse() {
        let fq = f5();
        let t = two_local_t(&fq);
        let u = two_local_u(&fq);
        // (1 + u + t)^{-1} * (1 + u + t) = 1 within precision
        let f = two_local_const(fq.one()).add(&u).unwrap().add(&t).unwrap();
        let p = f.invert().unwrap().mul(&f).unwrap();
        assert!(reduce_to_last_residue(&p).unwrap().is_one());
        let red = reduce_mod_m(&p).unwrap().ensured_len(6).unwrap();
        for k in 1..6i64 {
            assert!(red.coeff_at(k).unwrap().is_zero());
        }
    }

    prop_compose! {
        fn arb_laurent_poly()(val in -3i64..4, coeffs in proptest::collection::vec(0u64..5, 1..6)) -> USeries {
            let fq = Fq::prime(5).unwrap();
            let cs: Vec<FieldElement> = coeffs.iter().map(|&c| fq.from_int(c as i64)).collect();
            USeries::exact_window(&fq, val, cs)
        }
    }

    proptest! {
        #[test]
        fn valuation_is_additive(a in arb_laurent_poly(), b in arb_laurent_poly()) {
            prop_assume!(!a.is_exact_zero() && !b.is_exact_zero());
            let va = a.valuation().unwrap();
            let vb = b.valuation().unwrap();
            let p = a.mul(&b).unwrap();
            prop_assert_eq!(p.valuation().unwrap(), va + vb);
        }

        #[test]
        fn invert_is_involutive_on_window(a in arb_laurent_poly()) {
            prop_assume!(!a.is_exact_zero());
            let back = a.invert().unwrap().invert().unwrap();
            let na = a.normalized().unwrap();
            let end = na.valuation().unwrap() + 6;
            prop_assert!(back.eq_through(&na, end).unwrap());
        }

        #[test]
        fn last_residue_is_multiplicative(a in arb_laurent_poly(), b in arb_laurent_poly()) {
            prop_assume!(!a.is_exact_zero() && !b.is_exact_zero());
            // shift to u-valuation 0 so the reductions are defined
            let ta = TSeries::constant(a.shift(-a.valuation().unwrap()));
            let tb = TSeries::constant(b.shift(-b.valuation().unwrap()));
            let ra = reduce_to_last_residue(&ta).unwrap();
            let rb = reduce_to_last_residue(&tb).unwrap();
            let rp = reduce_to_last_residue(&ta.mul(&tb).unwrap()).unwrap();
            prop_assert_eq!(rp, ra.mul(&rb).unwrap());
        }
    }
}
