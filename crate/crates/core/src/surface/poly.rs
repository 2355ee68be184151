//! Dense univariate and sparse bivariate polynomials over a finite field,
//! with the division, gcd and resultant routines the geometry needs.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gfield::{Embedding, FieldElement, Fq};

/// Dense univariate polynomial, little-endian coefficients, trimmed.
#[derive(Clone, PartialEq)]
pub struct Poly1 {
    fq: Fq,
    c: Vec<FieldElement>,
}

impl fmt::Debug for Poly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly1{:?}", self.c)
    }
}

impl Poly1 {
    pub fn zero(fq: &Fq) -> Poly1 {
        Poly1 {
            fq: fq.clone(),
            c: Vec::new(),
        }
    }

    pub fn constant(c: FieldElement) -> Poly1 {
        let fq = c.field().clone();
        let mut p = Poly1 { fq, c: vec![c] };
        p.trim();
        p
    }

    pub fn var(fq: &Fq) -> Poly1 {
        Poly1 {
            fq: fq.clone(),
            c: vec![fq.zero(), fq.one()],
        }
    }

    pub fn from_coeffs(fq: &Fq, c: Vec<FieldElement>) -> Poly1 {
        let mut p = Poly1 { fq: fq.clone(), c };
        p.trim();
        p
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.c
    }

    fn trim(&mut self) {
        while self.c.last().map(|x| x.is_zero()) == Some(true) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lead(&self) -> Option<&FieldElement> {
        self.c.last()
    }

    pub fn coeff(&self, k: usize) -> FieldElement {
        self.c.get(k).cloned().unwrap_or_else(|| self.fq.zero())
    }

    pub fn add(&self, other: &Poly1) -> Result<Poly1> {
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for k in 0..n {
            c.push(self.coeff(k).add(&other.coeff(k))?);
        }
        Ok(Poly1::from_coeffs(&self.fq, c))
    }

    pub fn sub(&self, other: &Poly1) -> Result<Poly1> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly1 {
        Poly1 {
            fq: self.fq.clone(),
            c: self.c.iter().map(|x| x.neg()).collect(),
        }
    }

    pub fn mul(&self, other: &Poly1) -> Result<Poly1> {
        if self.is_zero() || other.is_zero() {
            return Ok(Poly1::zero(&self.fq));
        }
        let mut c = vec![self.fq.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                c[i + j] = c[i + j].add(&a.mul(b)?)?;
            }
        }
        Ok(Poly1::from_coeffs(&self.fq, c))
    }

    pub fn scale(&self, k: &FieldElement) -> Result<Poly1> {
        let mut c = Vec::with_capacity(self.c.len());
        for a in &self.c {
            c.push(a.mul(k)?);
        }
        Ok(Poly1::from_coeffs(&self.fq, c))
    }

    pub fn pow(&self, e: u32) -> Result<Poly1> {
        let mut acc = Poly1::constant(self.fq.one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Quotient and remainder; the divisor need not be monic.
    pub fn divmod(&self, d: &Poly1) -> Result<(Poly1, Poly1)> {
        let Some(dd) = d.degree() else {
            return Err(Error::DivisionByZero);
        };
        let linv = d.lead().unwrap().inv()?;
        let mut r = self.clone();
        let mut q = vec![self.fq.zero(); self.c.len().saturating_sub(dd)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let f = r.lead().unwrap().mul(&linv)?;
            let shift = rd - dd;
            q[shift] = f.clone();
            // r -= f * x^shift * d
            let mut rc = r.c;
            for (k, dc) in d.c.iter().enumerate() {
                rc[shift + k] = rc[shift + k].sub(&f.mul(dc)?)?;
            }
            r = Poly1::from_coeffs(&self.fq, rc);
        }
        Ok((Poly1::from_coeffs(&self.fq, q), r))
    }

    /// Exact division; errors when the remainder is nonzero.
    pub fn exact_div(&self, d: &Poly1) -> Result<Poly1> {
        let (q, r) = self.divmod(d)?;
        if !r.is_zero() {
            return Err(Error::Internal("inexact polynomial division"));
        }
        Ok(q)
    }

    pub fn gcd(&self, other: &Poly1) -> Result<Poly1> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divmod(&b)?;
            a = b;
            b = r;
        }
        if let Some(l) = a.lead() {
            let linv = l.inv()?;
            a = a.scale(&linv)?;
        }
        Ok(a)
    }

    pub fn derivative(&self) -> Result<Poly1> {
        if self.c.len() <= 1 {
            return Ok(Poly1::zero(&self.fq));
        }
        let mut c = Vec::with_capacity(self.c.len() - 1);
        for (k, a) in self.c.iter().enumerate().skip(1) {
            c.push(a.mul(&self.fq.from_int(k as i64))?);
        }
        Ok(Poly1::from_coeffs(&self.fq, c))
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement> {
        let mut acc = x.field().zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(x)?.add(a)?;
        }
        Ok(acc)
    }

    /// Coefficients mapped along an embedding into an extension.
    pub fn map_embed(&self, emb: &Embedding) -> Result<Poly1> {
        let mut c = Vec::with_capacity(self.c.len());
        for a in &self.c {
            c.push(emb.embed(a)?);
        }
        Ok(Poly1::from_coeffs(emb.big(), c))
    }

    pub fn monic(&self) -> Result<Poly1> {
        match self.lead() {
            None => Ok(self.clone()),
            Some(l) => self.scale(&l.inv()?),
        }
    }
}

/// Sparse bivariate polynomial in (x, y); keys are exponent pairs.
#[derive(Clone, PartialEq)]
pub struct Poly2 {
    fq: Fq,
    terms: BTreeMap<(u32, u32), FieldElement>,
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2[{}]", self)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        // highest total degree first, then lex
        let mut keys: Vec<_> = self.terms.keys().copied().collect();
        keys.sort_by_key(|&(i, j)| (std::cmp::Reverse(i + j), std::cmp::Reverse(i), j));
        for (i, j) in keys {
            let c = &self.terms[&(i, j)];
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut parts = Vec::new();
            if !c.is_one() || (i == 0 && j == 0) {
                parts.push(format!("{c}"));
            }
            if i > 0 {
                parts.push(if i == 1 { "x".into() } else { format!("x^{i}") });
            }
            if j > 0 {
                parts.push(if j == 1 { "y".into() } else { format!("y^{j}") });
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl Poly2 {
    pub fn zero(fq: &Fq) -> Poly2 {
        Poly2 {
            fq: fq.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: FieldElement) -> Poly2 {
        let fq = c.field().clone();
        let mut p = Poly2::zero(&fq);
        p.insert((0, 0), c);
        p
    }

    pub fn one(fq: &Fq) -> Poly2 {
        Poly2::constant(fq.one())
    }

    pub fn var_x(fq: &Fq) -> Poly2 {
        let mut p = Poly2::zero(fq);
        p.insert((1, 0), fq.one());
        p
    }

    pub fn var_y(fq: &Fq) -> Poly2 {
        let mut p = Poly2::zero(fq);
        p.insert((0, 1), fq.one());
        p
    }

    pub fn monomial(c: FieldElement, i: u32, j: u32) -> Poly2 {
        let fq = c.field().clone();
        let mut p = Poly2::zero(&fq);
        p.insert((i, j), c);
        p
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), FieldElement> {
        &self.terms
    }

    pub fn insert(&mut self, key: (u32, u32), c: FieldElement) {
        if c.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).max()
    }

    pub fn deg_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn coeff(&self, i: u32, j: u32) -> FieldElement {
        self.terms
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(|| self.fq.zero())
    }

    pub fn add(&self, other: &Poly2) -> Result<Poly2> {
        let mut out = self.clone();
        for (&k, c) in &other.terms {
            let cur = out.coeff(k.0, k.1).add(c)?;
            out.insert(k, cur);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly2) -> Result<Poly2> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Poly2 {
        let mut out = Poly2::zero(&self.fq);
        for (&k, c) in &self.terms {
            out.insert(k, c.neg());
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Result<Poly2> {
        let mut out = Poly2::zero(&self.fq);
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                let k = (i1 + i2, j1 + j2);
                let cur = out.coeff(k.0, k.1).add(&c1.mul(c2)?)?;
                out.insert(k, cur);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &FieldElement) -> Result<Poly2> {
        let mut out = Poly2::zero(&self.fq);
        for (&key, c) in &self.terms {
            out.insert(key, c.mul(k)?);
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Poly2> {
        let mut acc = Poly2::one(&self.fq);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn eval(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement> {
        let fq = x.field();
        let mut acc = fq.zero();
        for (&(i, j), c) in &self.terms {
            let xa = x.pow(i as i64)?;
            let yb = y.pow(j as i64)?;
            acc = acc.add(&c.mul(&xa)?.mul(&yb)?)?;
        }
        Ok(acc)
    }

    pub fn map_embed(&self, emb: &Embedding) -> Result<Poly2> {
        let mut out = Poly2::zero(emb.big());
        for (&k, c) in &self.terms {
            out.insert(k, emb.embed(c)?);
        }
        Ok(out)
    }

    /// Substitute x -> x + a, y -> y + b.
    pub fn translate(&self, a: &FieldElement, b: &FieldElement) -> Result<Poly2> {
        let fq = &self.fq;
        let xa = Poly2::var_x(fq).add(&Poly2::constant(a.clone()))?;
        let yb = Poly2::var_y(fq).add(&Poly2::constant(b.clone()))?;
        self.compose(&xa, &yb)
    }

    /// Substitute x -> p, y -> q.
    pub fn compose(&self, p: &Poly2, q: &Poly2) -> Result<Poly2> {
        let mut out = Poly2::zero(&self.fq);
        // group by y-power, Horner in y then x
        let dy = self.deg_y().unwrap_or(0);
        let mut ypolys: Vec<Poly2> = vec![Poly2::zero(&self.fq); dy as usize + 1];
        for (&(i, j), c) in &self.terms {
            let cur = ypolys[j as usize].coeff(i, 0).add(c)?;
            ypolys[j as usize].insert((i, 0), cur);
        }
        for xpoly in ypolys.iter().rev() {
            out = out.mul(q)?;
            // evaluate the x-only polynomial at p, Horner
            let dx = xpoly.deg_x().unwrap_or(0);
            let mut inner = Poly2::zero(&self.fq);
            for i in (0..=dx).rev() {
                inner = inner.mul(p)?;
                let c = xpoly.coeff(i, 0);
                if !c.is_zero() {
                    inner = inner.add(&Poly2::constant(c))?;
                }
            }
            out = out.add(&inner)?;
        }
        Ok(out)
    }

    pub fn swap_xy(&self) -> Poly2 {
        let mut out = Poly2::zero(&self.fq);
        for (&(i, j), c) in &self.terms {
            out.insert((j, i), c.clone());
        }
        out
    }

    /// Coefficients of powers of y, each a univariate polynomial in x.
    pub fn y_coeffs(&self) -> Vec<Poly1> {
        let dy = self.deg_y().unwrap_or(0) as usize;
        let dx = self.deg_x().unwrap_or(0) as usize;
        let mut out = vec![Poly1::zero(&self.fq); dy + 1];
        for (&(i, j), c) in &self.terms {
            let mut coeffs = out[j as usize].coeffs().to_vec();
            coeffs.resize(dx + 1, self.fq.zero());
            coeffs[i as usize] = c.clone();
            out[j as usize] = Poly1::from_coeffs(&self.fq, coeffs);
        }
        out
    }

    pub fn from_y_coeffs(fq: &Fq, ycs: &[Poly1]) -> Poly2 {
        let mut out = Poly2::zero(fq);
        for (j, p) in ycs.iter().enumerate() {
            for (i, c) in p.coeffs().iter().enumerate() {
                out.insert((i as u32, j as u32), c.clone());
            }
        }
        out
    }

    /// Ordinary partial derivative in x.
    pub fn deriv_x(&self) -> Result<Poly2> {
        let mut out = Poly2::zero(&self.fq);
        for (&(i, j), c) in &self.terms {
            if i == 0 {
                continue;
            }
            let w = c.mul(&self.fq.from_int(i as i64))?;
            if !w.is_zero() {
                let cur = out.coeff(i - 1, j).add(&w)?;
                out.insert((i - 1, j), cur);
            }
        }
        Ok(out)
    }

    /// Ordinary partial derivative in y.
    pub fn deriv_y(&self) -> Result<Poly2> {
        let mut out = Poly2::zero(&self.fq);
        for (&(i, j), c) in &self.terms {
            if j == 0 {
                continue;
            }
            let w = c.mul(&self.fq.from_int(j as i64))?;
            if !w.is_zero() {
                let cur = out.coeff(i, j - 1).add(&w)?;
                out.insert((i, j - 1), cur);
            }
        }
        Ok(out)
    }

    /// Hasse (divided-power) derivative of order j in y: the coefficient
    /// extraction operator with binomial weights, well defined in any
    /// characteristic.
    pub fn hasse_y(&self, j: u32) -> Result<Poly2> {
        let mut out = Poly2::zero(&self.fq);
        for (&(i, n), c) in &self.terms {
            if n < j {
                continue;
            }
            let b = binomial_in_field(&self.fq, n, j)?;
            if b.is_zero() {
                continue;
            }
            let cur = out.coeff(i, n - j).add(&c.mul(&b)?)?;
            out.insert((i, n - j), cur);
        }
        Ok(out)
    }

    /// Exact division by d, when it divides; `None` otherwise.
    pub fn try_exact_div(&self, d: &Poly2) -> Result<Option<Poly2>> {
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Some(Poly2::zero(&self.fq)));
        }
        // y-free divisor: divide every y-coefficient in F_q[x]
        if d.deg_y() == Some(0) {
            let d1 = d.y_coeffs().remove(0);
            let mut qs = Vec::new();
            for c in self.y_coeffs() {
                let (q, r) = c.divmod(&d1)?;
                if !r.is_zero() {
                    return Ok(None);
                }
                qs.push(q);
            }
            return Ok(Some(Poly2::from_y_coeffs(&self.fq, &qs)));
        }
        // division as polynomials in y over F_q[x]
        let dn = self.y_coeffs();
        let dd = d.y_coeffs();
        let mut rem = dn;
        let mut quo: Vec<Poly1> = Vec::new();
        let degd = dd.len() - 1;
        let dlead = dd.last().unwrap().clone();
        loop {
            while rem.last().map(|p| p.is_zero()) == Some(true) {
                rem.pop();
            }
            if rem.len() <= degd {
                break;
            }
            let degr = rem.len() - 1;
            let rlead = rem.last().unwrap().clone();
            let (qc, qr) = rlead.divmod(&dlead)?;
            if !qr.is_zero() {
                return Ok(None);
            }
            let shift = degr - degd;
            if quo.len() < shift + 1 {
                quo.resize(shift + 1, Poly1::zero(&self.fq));
            }
            quo[shift] = qc.clone();
            for (k, dk) in dd.iter().enumerate() {
                let subtrahend = dk.mul(&qc)?;
                rem[shift + k] = rem[shift + k].sub(&subtrahend)?;
            }
        }
        if rem.iter().all(|p| p.is_zero()) {
            Ok(Some(Poly2::from_y_coeffs(&self.fq, &quo)))
        } else {
            Ok(None)
        }
    }

    /// Content with respect to y: the gcd in `F_q[x]` of the y-coefficients.
    pub fn cont_y(&self) -> Result<Poly1> {
        let mut g = Poly1::zero(&self.fq);
        for c in self.y_coeffs() {
            g = g.gcd(&c)?;
        }
        Ok(g)
    }

    /// Normalize the scalar: divide by the coefficient of the greatest
    /// monomial in graded-lexicographic order (total degree, then x-degree).
    pub fn normalized(&self) -> Result<Poly2> {
        let Some(&key) = self.terms.keys().max_by_key(|&&(i, j)| (i + j, i, j)) else {
            return Ok(self.clone());
        };
        let linv = self.terms[&key].inv()?;
        self.scale(&linv)
    }

    /// Greatest common divisor via the primitive Euclidean algorithm in
    /// `(F_q[x])[y]`, normalized.
    pub fn gcd2(&self, other: &Poly2) -> Result<Poly2> {
        if self.is_zero() {
            return other.normalized();
        }
        if other.is_zero() {
            return self.normalized();
        }
        // y-free cases reduce to univariate gcds
        if self.deg_y() == Some(0) && other.deg_y() == Some(0) {
            let g = self.y_coeffs().remove(0).gcd(&other.y_coeffs().remove(0))?;
            return Poly2::from_y_coeffs(&self.fq, &[g]).normalized();
        }
        if self.deg_y() == Some(0) {
            let g = self.y_coeffs().remove(0).gcd(&other.cont_y()?)?;
            return Poly2::from_y_coeffs(&self.fq, &[g]).normalized();
        }
        if other.deg_y() == Some(0) {
            return other.gcd2(self);
        }
        let cont_a = self.cont_y()?;
        let cont_b = other.cont_y()?;
        let cont_g = cont_a.gcd(&cont_b)?;
        let mut a = self.primitive_y()?;
        let mut b = other.primitive_y()?;
        loop {
            if b.is_zero() {
                break;
            }
            if b.deg_y() == Some(0) {
                // a primitive y-polynomial and a y-free one are coprime in y
                b = Poly2::one(&self.fq);
                std::mem::swap(&mut a, &mut b);
                break;
            }
            let r = pseudo_rem_y(&a, &b)?;
            a = b;
            b = if r.is_zero() { r } else { r.primitive_y()? };
        }
        let g1 = Poly2::from_y_coeffs(&self.fq, &[cont_g]);
        a.mul(&g1)?.normalized()
    }

    fn primitive_y(&self) -> Result<Poly2> {
        let c = self.cont_y()?;
        if c.degree() == Some(0) || c.is_zero() {
            return Ok(self.clone());
        }
        let cp = Poly2::from_y_coeffs(&self.fq, &[c]);
        Ok(self.try_exact_div(&cp)?.expect("content divides"))
    }

    /// The top-degree homogeneous form as a list of (i, j, c) with i+j = d.
    pub fn top_form(&self) -> Vec<(u32, u32, FieldElement)> {
        let Some(d) = self.total_degree() else {
            return Vec::new();
        };
        self.terms
            .iter()
            .filter(|(&(i, j), _)| i + j == d)
            .map(|(&(i, j), c)| (i, j, c.clone()))
            .collect()
    }
}

/// Pseudo-remainder of a by b as polynomials in y over `F_q[x]`.
fn pseudo_rem_y(a: &Poly2, b: &Poly2) -> Result<Poly2> {
    let da = a.deg_y().unwrap_or(0) as i64;
    let db = b.deg_y().unwrap_or(0) as i64;
    if da < db {
        return Ok(a.clone());
    }
    let blead = Poly2::from_y_coeffs(a.field(), &[b.y_coeffs().last().unwrap().clone()]);
    let mut r = a.clone();
    let mut guard = 0;
    loop {
        let dr = match r.deg_y() {
            None => return Ok(r),
            Some(d) => d as i64,
        };
        if dr < db {
            return Ok(r);
        }
        let rl = r.y_coeffs().last().unwrap().clone();
        let rlead = Poly2::from_y_coeffs(a.field(), &[rl]);
        // r = r * blead - rlead * y^{dr-db} * b
        let shift = Poly2::monomial(a.field().one(), 0, (dr - db) as u32);
        r = r.mul(&blead)?.sub(&rlead.mul(&shift)?.mul(b)?)?;
        guard += 1;
        if guard > 200 {
            return Err(Error::Internal("pseudo-division did not terminate"));
        }
    }
}

/// Binomial coefficient C(n, k) as a field element (mod p).
pub fn binomial_in_field(fq: &Fq, n: u32, k: u32) -> Result<FieldElement> {
    if k > n {
        return Ok(fq.zero());
    }
    // Pascal row, exact in the field
    let mut row = vec![fq.one()];
    for _ in 0..n {
        let mut next = vec![fq.one()];
        for w in row.windows(2) {
            next.push(w[0].add(&w[1])?);
        }
        next.push(fq.one());
        row = next;
    }
    Ok(row[k as usize].clone())
}

/// Resultant of a and b with respect to y, an element of `F_q[x]`, computed
/// from the Sylvester matrix by fraction-free (Bareiss) elimination.
pub fn resultant_y(a: &Poly2, b: &Poly2) -> Result<Poly1> {
    let fq = a.field().clone();
    let da = a.deg_y().map(|d| d as usize);
    let db = b.deg_y().map(|d| d as usize);
    let (da, db) = match (da, db) {
        (None, _) | (_, None) => return Err(Error::ZeroInput("resultant of zero")),
        (Some(x), Some(y)) => (x, y),
    };
    if da == 0 && db == 0 {
        return Ok(Poly1::constant(fq.one()));
    }
    if da == 0 {
        // Res_y(a(x), b) = a(x)^{deg_y b}
        let a1 = a.y_coeffs().remove(0);
        return a1.pow(db as u32);
    }
    if db == 0 {
        let b1 = b.y_coeffs().remove(0);
        return b1.pow(da as u32);
    }
    let ac = a.y_coeffs();
    let bc = b.y_coeffs();
    let n = da + db;
    // Sylvester matrix rows: shifts of a (db rows), then shifts of b (da rows)
    let mut m: Vec<Vec<Poly1>> = vec![vec![Poly1::zero(&fq); n]; n];
    for r in 0..db {
        for (k, c) in ac.iter().enumerate() {
            m[r][r + (da - k)] = c.clone();
        }
    }
    for r in 0..da {
        for (k, c) in bc.iter().enumerate() {
            m[db + r][r + (db - k)] = c.clone();
        }
    }
    // Bareiss fraction-free elimination over F_q[x]
    let mut sign_flip = false;
    let mut prev = Poly1::constant(fq.one());
    for k in 0..(n - 1) {
        if m[k][k].is_zero() {
            let mut found = None;
            for r in (k + 1)..n {
                if !m[r][k].is_zero() {
                    found = Some(r);
                    break;
                }
            }
            match found {
                Some(r) => {
                    m.swap(k, r);
                    sign_flip = !sign_flip;
                }
                None => return Ok(Poly1::zero(&fq)),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let t1 = m[k][k].mul(&m[i][j])?;
                let t2 = m[i][k].mul(&m[k][j])?;
                let num = t1.sub(&t2)?;
                m[i][j] = num.exact_div(&prev)?;
            }
            m[i][k] = Poly1::zero(&fq);
        }
        prev = m[k][k].clone();
    }
    let mut det = m[n - 1][n - 1].clone();
    if sign_flip {
        det = det.neg();
    }
    Ok(det)
}
