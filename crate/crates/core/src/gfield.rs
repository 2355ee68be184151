//! Exact finite-field arithmetic: prime fields, extension fields with
//! user-suppliable or default moduli, embeddings into extensions, norms to a
//! declared base field, roots of unity and element orders.
//!
//! Elements carry a handle to their owning field; cross-field arithmetic is
//! an error, never an implicit coercion. The one sanctioned field change is
//! an explicit [`Embedding`].

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Supported desk scale: all field orders stay below 2^20.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Description of a finite field F_{p^d} as `F_p[x]/(modulus)`.
#[derive(Debug, PartialEq, Eq)]
pub struct FiniteField {
    p: u64,
    d: usize,
    /// Monic modulus, little-endian, length d+1. For d = 1 this is x - g
    /// with g the smallest primitive root, so the class of x generates.
    modulus: Vec<u64>,
}

/// Cheaply clonable handle to a [`FiniteField`].
#[derive(Clone)]
pub struct Fq(Arc<FiniteField>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.order())
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree() == 1 {
            write!(f, "F_{}", self.characteristic())
        } else {
            write!(f, "F_{}^{}", self.characteristic(), self.degree())
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Prime factors of n, ascending, without multiplicity.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 2u64;
    while k * k <= n {
        if n.is_multiple_of(k) {
            out.push(k);
            while n.is_multiple_of(k) {
                n /= k;
            }
        }
        k += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// --- dense polynomial arithmetic over F_p, little-endian coefficient vectors ---

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of a modulo the monic polynomial m.
fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mk) in m.iter().enumerate() {
                let idx = shift + k;
                let sub = (lead * mk) % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
    }
    r
}

fn poly_gcd_mod_p(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x: Vec<u64> = a.to_vec();
    let mut y: Vec<u64> = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !y.is_empty() {
        // make y monic for poly_rem
        let lead = *y.last().unwrap();
        let linv = mod_inv(lead, p);
        let monic: Vec<u64> = y.iter().map(|&c| c * linv % p).collect();
        let r = poly_rem(&x, &monic, p);
        x = y;
        y = r;
    }
    x
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

/// x^(p^k) reduced modulo the monic polynomial m, via repeated p-th powers.
fn frobenius_power_of_x(k: usize, m: &[u64], p: u64) -> Vec<u64> {
    let mut cur = vec![0, 1]; // x
    cur = poly_rem(&cur, m, p);
    for _ in 0..k {
        cur = poly_pow_mod(&cur, p, m, p);
    }
    cur
}

fn poly_pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut base = poly_rem(a, m, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul_mod_p(&acc, &base, p), m, p);
        }
        base = poly_rem(&poly_mul_mod_p(&base, &base, p), m, p);
        e >>= 1;
    }
    acc
}

/// Rabin irreducibility test for a monic polynomial of degree d over F_p.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let d = m.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    // x^(p^d) == x mod m
    let xpd = frobenius_power_of_x(d, m, p);
    let mut diff = xpd.clone();
    // subtract x
    if diff.len() < 2 {
        diff.resize(2, 0);
    }
    diff[1] = (diff[1] + p - 1) % p;
    poly_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for r in prime_factors(d as u64) {
        let k = d / r as usize;
        let mut g = frobenius_power_of_x(k, m, p);
        if g.len() < 2 {
            g.resize(2, 0);
        }
        g[1] = (g[1] + p - 1) % p;
        poly_trim(&mut g);
        let gcd = poly_gcd_mod_p(&g, m, p);
        if gcd.len() > 1 {
            return false;
        }
    }
    true
}

/// True when the class of x has multiplicative order p^d - 1 modulo m.
/// Assumes m irreducible.
fn x_is_primitive(m: &[u64], p: u64) -> bool {
    let d = m.len() - 1;
    let q: u64 = p.pow(d as u32);
    for r in prime_factors(q - 1) {
        let e = (q - 1) / r;
        let pw = poly_pow_mod(&[0, 1], e, m, p);
        if pw == vec![1] {
            return false;
        }
    }
    true
}

fn smallest_primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    'outer: for g in 2..p {
        for &r in &factors {
            if mod_pow(g, (p - 1) / r, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    1 // p == 2
}

/// Default modulus for F_{p^d}: the first monic polynomial, in the counter
/// order over little-endian coefficients, that is irreducible with a
/// primitive class of x. Reproducible across runs by construction.
fn default_modulus(p: u64, d: usize) -> Vec<u64> {
    if d == 1 {
        let g = smallest_primitive_root(p);
        return vec![(p - g) % p, 1];
    }
    let mut counter: u64 = 0;
    loop {
        let mut m = Vec::with_capacity(d + 1);
        let mut c = counter;
        for _ in 0..d {
            m.push(c % p);
            c /= p;
        }
        m.push(1);
        counter += 1;
        if c > 0 {
            unreachable!("no primitive polynomial found for p={p}, d={d}");
        }
        if is_irreducible(&m, p) && x_is_primitive(&m, p) {
            return m;
        }
    }
}

impl Fq {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Fq> {
        Fq::extension(p, 1)
    }

    /// F_{p^d} with the library default modulus.
    pub fn extension(p: u64, d: usize) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d == 0 {
            return Err(Error::BadModulus("degree must be at least 1".into()));
        }
        let order = (p as u128).pow(d as u32);
        if order > MAX_FIELD_ORDER as u128 {
            return Err(Error::FieldTooLarge(order));
        }
        let modulus = default_modulus(p, d);
        Ok(Fq(Arc::new(FiniteField { p, d, modulus })))
    }

    /// F_{p^d} with a user-supplied modulus (little-endian, degree d, made monic).
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Fq> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let mut m: Vec<u64> = modulus.iter().map(|&c| c % p).collect();
        poly_trim(&mut m);
        if m.len() < 2 {
            return Err(Error::BadModulus("modulus must have degree >= 1".into()));
        }
        let d = m.len() - 1;
        let order = (p as u128).pow(d as u32);
        if order > MAX_FIELD_ORDER as u128 {
            return Err(Error::FieldTooLarge(order));
        }
        let lead = *m.last().unwrap();
        if lead != 1 {
            let linv = mod_inv(lead, p);
            for c in m.iter_mut() {
                *c = *c * linv % p;
            }
        }
        if d > 1 && !is_irreducible(&m, p) {
            return Err(Error::ReducibleModulus(p));
        }
        Ok(Fq(Arc::new(FiniteField { p, d, modulus: m })))
    }

    /// Field of the given prime-power order with the default modulus.
    pub fn from_order(q: u64) -> Result<Fq> {
        if q < 2 {
            return Err(Error::NotPrime(q));
        }
        let p = prime_factors(q)
            .first()
            .copied()
            .ok_or(Error::NotPrime(q))?;
        let mut d = 0usize;
        let mut n = q;
        while n.is_multiple_of(p) {
            n /= p;
            d += 1;
        }
        if n != 1 {
            return Err(Error::NotPrime(q));
        }
        Fq::extension(p, d)
    }

    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.d
    }

    pub fn order(&self) -> u64 {
        self.0.p.pow(self.0.d as u32)
    }

    /// Little-endian modulus coefficients, length degree + 1.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            c: vec![0; self.0.d],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        let p = self.0.p as i64;
        let mut c = vec![0u64; self.0.d];
        c[0] = n.rem_euclid(p) as u64;
        FieldElement {
            field: self.clone(),
            c,
        }
    }

    /// Element from little-endian coefficients over F_p.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.0.d {
            return Err(Error::BadModulus(format!(
                "element needs {} coefficients, got {}",
                self.0.d,
                coeffs.len()
            )));
        }
        let mut c: Vec<u64> = coeffs.iter().map(|&x| x % self.0.p).collect();
        c.resize(self.0.d, 0);
        Ok(FieldElement {
            field: self.clone(),
            c,
        })
    }

    /// The class of x. Primitive for default moduli with d >= 1.
    pub fn gen_element(&self) -> FieldElement {
        if self.0.d == 1 {
            // modulus x - g: the class of x is g
            let g = (self.0.p - self.0.modulus[0]) % self.0.p;
            return self.from_int(g as i64);
        }
        let mut c = vec![0u64; self.0.d];
        c[1] = 1;
        FieldElement {
            field: self.clone(),
            c,
        }
    }

    /// A multiplicative generator, found by deterministic search.
    pub fn multiplicative_generator(&self) -> FieldElement {
        let g = self.gen_element();
        if !g.is_zero() && g.order_unchecked() == self.order() - 1 {
            return g;
        }
        let q = self.order();
        let mut counter = 1u64;
        loop {
            let mut c = Vec::with_capacity(self.0.d);
            let mut n = counter;
            for _ in 0..self.0.d {
                c.push(n % self.0.p);
                n /= self.0.p;
            }
            counter += 1;
            let e = FieldElement {
                field: self.clone(),
                c,
            };
            if !e.is_zero() && e.order_unchecked() == q - 1 {
                return e;
            }
        }
    }

    /// All elements, in counter order. Desk scale only.
    pub fn elements(&self) -> Vec<FieldElement> {
        let q = self.order();
        let mut out = Vec::with_capacity(q as usize);
        for n in 0..q {
            let mut c = Vec::with_capacity(self.0.d);
            let mut k = n;
            for _ in 0..self.0.d {
                c.push(k % self.0.p);
                k /= self.0.p;
            }
            out.push(FieldElement {
                field: self.clone(),
                c,
            });
        }
        out
    }

    /// All m-th roots of unity. Requires m | q - 1 (Kummer hypothesis).
    pub fn roots_of_unity(&self, m: u64) -> Result<Vec<FieldElement>> {
        let q = self.order();
        if m == 0 || !(q - 1).is_multiple_of(m) {
            return Err(Error::KummerHypothesis { m, q });
        }
        let g = self.multiplicative_generator();
        let h = g.pow(((q - 1) / m) as i64)?;
        let mut out = Vec::with_capacity(m as usize);
        let mut cur = self.one();
        for _ in 0..m {
            out.push(cur.clone());
            cur = cur.mul(&h)?;
        }
        out.sort_by(|a, b| a.c.cmp(&b.c));
        Ok(out)
    }
}

/// An element of a finite field, as a little-endian coefficient vector in
/// the class of x.
#[derive(Clone)]
pub struct FieldElement {
    field: Fq,
    c: Vec<u64>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.c == other.c
    }
}
impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}∈{:?}", self, self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "[")?;
            for (i, ci) in self.c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{ci}")?;
            }
            write!(f, "]")
        }
    }
}

impl FieldElement {
    pub fn field(&self) -> &Fq {
        &self.field
    }

    /// Little-endian coefficients over the prime field.
    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn is_one(&self) -> bool {
        self.c[0] == 1 && self.c[1..].iter().all(|&x| x == 0)
    }

    fn check_field(&self, other: &FieldElement) -> Result<()> {
        if self.field != other.field {
            return Err(Error::MismatchedFields(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_field(other)?;
        let p = self.field.characteristic();
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(FieldElement {
            field: self.field.clone(),
            c,
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_field(other)?;
        let p = self.field.characteristic();
        let c = self
            .c
            .iter()
            .zip(&other.c)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        Ok(FieldElement {
            field: self.field.clone(),
            c,
        })
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.field.characteristic();
        FieldElement {
            field: self.field.clone(),
            c: self.c.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check_field(other)?;
        let p = self.field.characteristic();
        let prod = poly_mul_mod_p(&self.c, &other.c, p);
        let mut r = poly_rem(&prod, self.field.modulus(), p);
        r.resize(self.field.degree(), 0);
        Ok(FieldElement {
            field: self.field.clone(),
            c: r,
        })
    }

    pub fn inv(&self) -> Result<FieldElement> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // q <= 2^20, so inversion by x^(q-2) is cheap and branch-free.
        self.pow_unsigned(self.field.order() - 2)
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement> {
        self.mul(&other.inv()?)
    }

    fn pow_unsigned(&self, mut e: u64) -> Result<FieldElement> {
        let mut acc = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<FieldElement> {
        if e >= 0 {
            self.pow_unsigned(e as u64)
        } else {
            if self.is_zero() {
                return Err(Error::DivisionByZero);
            }
            self.inv()?.pow_unsigned(e.unsigned_abs())
        }
    }

    /// Frobenius x -> x^p applied k times.
    pub fn frobenius(&self, k: usize) -> Result<FieldElement> {
        let mut out = self.clone();
        let p = self.field.characteristic();
        for _ in 0..k {
            out = out.pow_unsigned(p)?;
        }
        Ok(out)
    }

    fn order_unchecked(&self) -> u64 {
        let q = self.field.order();
        let mut ord = q - 1;
        for r in prime_factors(q - 1) {
            while ord.is_multiple_of(r) {
                let cand = self.pow_unsigned(ord / r).unwrap();
                if cand.is_one() {
                    ord /= r;
                } else {
                    break;
                }
            }
        }
        ord
    }

    /// Least n >= 1 with self^n = 1. Errors on zero.
    pub fn multiplicative_order(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroInput("order of zero is undefined"));
        }
        Ok(self.order_unchecked())
    }
}

/// Embedding of F_{q} = F_{p^m} into F_{Q} = F_{p^n} with m | n, realized
/// by a deterministically chosen root of the small modulus in the big field.
/// Carries a section for elements in the image and the relative norm.
pub struct Embedding {
    small: Fq,
    big: Fq,
    root: FieldElement,
    /// d_big x d_small matrix over F_p, columns images of 1, x, x^2, ...
    mat: Vec<Vec<u64>>,
}

impl Embedding {
    pub fn new(small: &Fq, big: &Fq) -> Result<Embedding> {
        if small.characteristic() != big.characteristic() {
            return Err(Error::MismatchedFields(small.to_string(), big.to_string()));
        }
        if !big.degree().is_multiple_of(small.degree()) {
            return Err(Error::Incompatible("degree of subfield must divide"));
        }
        let root = Self::find_root(small, big)?;
        let ds = small.degree();
        let db = big.degree();
        let mut mat = vec![vec![0u64; ds]; db];
        let mut pw = big.one();
        for j in 0..ds {
            for (i, row) in mat.iter_mut().enumerate() {
                row[j] = pw.c[i];
            }
            pw = pw.mul(&root)?;
        }
        Ok(Embedding {
            small: small.clone(),
            big: big.clone(),
            root,
            mat,
        })
    }

    /// Identity embedding of a field into itself.
    pub fn identity(field: &Fq) -> Embedding {
        Embedding::new(field, field).expect("identity embedding")
    }

    /// Deterministic root choice: scan the subfield of the right order for
    /// roots of the small modulus, keep the one with the least coefficient
    /// vector.
    fn find_root(small: &Fq, big: &Fq) -> Result<FieldElement> {
        let p = small.characteristic();
        let qs = small.order();
        if small.degree() == 1 {
            // modulus x - g: the root is the scalar g
            let g = (p - small.modulus()[0]) % p;
            return Ok(big.from_int(g as i64));
        }
        let gen_big = big.multiplicative_generator();
        let qb = big.order();
        let w = gen_big.pow(((qb - 1) / (qs - 1)) as i64)?;
        let msmall = small.modulus();
        let eval = |e: &FieldElement| -> Result<FieldElement> {
            // Horner over the big field
            let mut acc = big.zero();
            for &c in msmall.iter().rev() {
                acc = acc.mul(e)?.add(&big.from_int(c as i64))?;
            }
            Ok(acc)
        };
        let mut best: Option<FieldElement> = None;
        let mut cur = big.one();
        for _ in 0..(qs - 1) {
            if eval(&cur)?.is_zero() {
                match &best {
                    Some(b) if b.c <= cur.c => {}
                    _ => best = Some(cur.clone()),
                }
            }
            cur = cur.mul(&w)?;
        }
        best.ok_or(Error::Internal("no root of subfield modulus found"))
    }

    pub fn small(&self) -> &Fq {
        &self.small
    }

    pub fn big(&self) -> &Fq {
        &self.big
    }

    pub fn embed(&self, e: &FieldElement) -> Result<FieldElement> {
        if *e.field() != self.small {
            return Err(Error::MismatchedFields(
                e.field().to_string(),
                self.small.to_string(),
            ));
        }
        let mut acc = self.big.zero();
        for &c in e.c.iter().rev() {
            acc = acc.mul(&self.root)?.add(&self.big.from_int(c as i64))?;
        }
        Ok(acc)
    }

    /// Inverse of `embed` on its image; errors when the element is not in
    /// the subfield.
    pub fn section(&self, e: &FieldElement) -> Result<FieldElement> {
        if *e.field() != self.big {
            return Err(Error::MismatchedFields(
                e.field().to_string(),
                self.big.to_string(),
            ));
        }
        let p = self.small.characteristic();
        let db = self.big.degree();
        let ds = self.small.degree();
        // Solve mat * v = e by Gaussian elimination over F_p.
        let mut aug: Vec<Vec<u64>> = (0..db)
            .map(|i| {
                let mut row = self.mat[i].clone();
                row.push(e.c[i]);
                row
            })
            .collect();
        let mut pivot_row = 0usize;
        let mut pivots = Vec::new();
        for col in 0..ds {
            let mut sel = None;
            for (r, row) in aug.iter().enumerate().skip(pivot_row) {
                if row[col] != 0 {
                    sel = Some(r);
                    break;
                }
            }
            let Some(sel) = sel else { continue };
            aug.swap(pivot_row, sel);
            let inv = mod_inv(aug[pivot_row][col], p);
            for x in aug[pivot_row].iter_mut() {
                *x = *x * inv % p;
            }
            for r in 0..db {
                if r != pivot_row && aug[r][col] != 0 {
                    let f = aug[r][col];
                    for k in 0..=ds {
                        let sub = f * aug[pivot_row][k] % p;
                        aug[r][k] = (aug[r][k] + p - sub) % p;
                    }
                }
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
        // consistency: rows beyond the pivots must be zero
        for row in aug.iter().skip(pivot_row) {
            if row[ds] != 0 {
                return Err(Error::NotInSubfield);
            }
        }
        let mut v = vec![0u64; ds];
        for &(r, c) in &pivots {
            v[c] = aug[r][ds];
        }
        self.small.from_coeffs(&v)
    }

    /// Relative norm down to the small field: the product of the Frobenius
    /// conjugates over the small field.
    pub fn norm(&self, e: &FieldElement) -> Result<FieldElement> {
        if *e.field() != self.big {
            return Err(Error::MismatchedFields(
                e.field().to_string(),
                self.big.to_string(),
            ));
        }
        if e.is_zero() {
            return Ok(self.small.zero());
        }
        let r = self.big.degree() / self.small.degree();
        let qs = self.small.order();
        let mut acc = self.big.one();
        let mut conj = e.clone();
        for _ in 0..r {
            acc = acc.mul(&conj)?;
            conj = conj.pow_unsigned(qs)?;
        }
        self.section(&acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic_in_f5() {
        let f5 = Fq::prime(5).unwrap();
        let two = f5.from_int(2);
        let four = f5.from_int(4);
        assert_eq!(two.add(&four).unwrap(), f5.from_int(1));
        assert_eq!(two.inv().unwrap(), f5.from_int(3));
    }

    #[test]
    fn extension_with_user_modulus() {
        // F_9 = F_3[a]/(a^2+1): a*a = -1 = 2
        let f9 = Fq::with_modulus(3, &[1, 0, 1]).unwrap();
        let a = f9.gen_element();
        let sq = a.mul(&a).unwrap();
        assert_eq!(sq, f9.from_int(2));
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(matches!(
            Fq::with_modulus(5, &[4, 0, 1]), // x^2 - 4 = (x-2)(x+2)
            Err(Error::ReducibleModulus(5))
        ));
    }

    #[test]
    fn desk_scale_enforced() {
        assert!(matches!(Fq::extension(2, 21), Err(Error::FieldTooLarge(_))));
    }

    #[test]
    fn cross_field_operations_error() {
        let f5 = Fq::prime(5).unwrap();
        let f7 = Fq::prime(7).unwrap();
        assert!(f5.from_int(1).add(&f7.from_int(1)).is_err());
    }

    #[test]
    fn norm_of_identity_and_generator() {
        let f5 = Fq::prime(5).unwrap();
        let f25 = Fq::extension(5, 2).unwrap();
        let emb = Embedding::new(&f5, &f25).unwrap();
        assert_eq!(emb.norm(&f25.one()).unwrap(), f5.one());
        // Nm(g) = g * g^5 = g^6 for a generator g of F_25*
        let g = f25.multiplicative_generator();
        let expected_big = g.mul(&g.pow(5).unwrap()).unwrap();
        let expected = emb.section(&expected_big).unwrap();
        assert_eq!(emb.norm(&g).unwrap(), expected);
    }

    #[test]
    fn norm_surjective_with_even_fibers() {
        // brute force over all 24 units of F_25
        let f5 = Fq::prime(5).unwrap();
        let f25 = Fq::extension(5, 2).unwrap();
        let emb = Embedding::new(&f5, &f25).unwrap();
        let mut counts = std::collections::BTreeMap::new();
        for e in f25.elements() {
            if e.is_zero() {
                continue;
            }
            let n = emb.norm(&e).unwrap();
            assert!(!n.is_zero());
            *counts.entry(n.coeffs().to_vec()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 4, "norm must be surjective onto F_5*");
        for (_, c) in counts {
            assert_eq!(c, 6, "each fiber has (q^2-1)/(q-1) = 6 elements");
        }
    }

    #[test]
    fn norm_is_multiplicative_exhaustive_f25() {
        let f5 = Fq::prime(5).unwrap();
        let f25 = Fq::extension(5, 2).unwrap();
        let emb = Embedding::new(&f5, &f25).unwrap();
        let elems = f25.elements();
        for a in &elems {
            for b in &elems {
                let lhs = emb.norm(&a.mul(b).unwrap()).unwrap();
                let rhs = emb.norm(a).unwrap().mul(&emb.norm(b).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_the_base_field() {
        for (p, ds, db) in [(5u64, 1usize, 2usize), (3, 1, 2), (7, 1, 2), (5, 2, 4)] {
            let small = Fq::extension(p, ds).unwrap();
            let big = Fq::extension(p, db).unwrap();
            let emb = Embedding::new(&small, &big).unwrap();
            let q = small.order();
            let mut fixed = 0usize;
            for e in big.elements() {
                let is_fixed = e.pow(q as i64).unwrap() == e;
                if is_fixed {
                    fixed += 1;
                    // must be in the image of the embedding
                    assert!(emb.section(&e).is_ok());
                }
            }
            assert_eq!(fixed as u64, q);
        }
    }

    #[test]
    fn roots_of_unity_brute_force() {
        let f5 = Fq::prime(5).unwrap();
        let mu4 = f5.roots_of_unity(4).unwrap();
        let mut expected: Vec<_> = f5
            .elements()
            .into_iter()
            .filter(|e| !e.is_zero() && e.pow(4).unwrap().is_one())
            .collect();
        expected.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
        assert_eq!(mu4, expected);
        assert_eq!(mu4.len(), 4);
        // closed under multiplication
        for a in &mu4 {
            for b in &mu4 {
                assert!(mu4.contains(&a.mul(b).unwrap()));
            }
        }
        assert_eq!(f5.roots_of_unity(1).unwrap(), vec![f5.one()]);
        assert!(matches!(
            f5.roots_of_unity(3),
            Err(Error::KummerHypothesis { m: 3, q: 5 })
        ));
    }

    #[test]
    fn element_orders() {
        let f5 = Fq::prime(5).unwrap();
        assert_eq!(f5.one().multiplicative_order().unwrap(), 1);
        assert_eq!(f5.from_int(2).multiplicative_order().unwrap(), 4);
        assert_eq!(f5.from_int(4).multiplicative_order().unwrap(), 2);
        assert!(f5.zero().multiplicative_order().is_err());
        // brute-force oracle on F_9
        let f9 = Fq::extension(3, 2).unwrap();
        for e in f9.elements() {
            if e.is_zero() {
                continue;
            }
            let mut n = 1u64;
            let mut cur = e.clone();
            while !cur.is_one() {
                cur = cur.mul(&e).unwrap();
                n += 1;
            }
            assert_eq!(e.multiplicative_order().unwrap(), n);
        }
    }

    fn arb_field() -> impl Strategy<Value = Fq> {
        prop_oneof![
            Just(Fq::prime(5).unwrap()),
            Just(Fq::prime(7).unwrap()),
            Just(Fq::extension(3, 2).unwrap()),
            Just(Fq::extension(5, 2).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms((field, ia, ib, ic) in arb_field().prop_flat_map(|f| {
            let q = f.order();
            (Just(f), 0..q, 0..q, 0..q)
        })) {
            let elems = field.elements();
            let a = &elems[ia as usize];
            let b = &elems[ib as usize];
            let c = &elems[ic as usize];
            // associativity and commutativity
            prop_assert_eq!(a.add(b).unwrap().add(c).unwrap(), a.add(&b.add(c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(b).unwrap().mul(c).unwrap(), a.mul(&b.mul(c).unwrap()).unwrap());
            prop_assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
            // distributivity
            prop_assert_eq!(
                a.mul(&b.add(c).unwrap()).unwrap(),
                a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap()
            );
            // inverses
            prop_assert!(a.add(&a.neg()).unwrap().is_zero());
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
            }
        }
    }
}
