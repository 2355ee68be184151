//! Closed-formula symbol maps on a two-dimensional local field
//! K = k'((u))((t)): the integer valuation pairing, the sign term, the
//! two-dimensional tame symbol, the one-dimensional tame symbol used as a
//! boundary building block, and the Kummer reciprocity map.
//!
//! All pairings are evaluated at the minimal precision that certifies the
//! leading coefficients involved; the series layer retries with doubled
//! windows on demand and fails deterministically at the cap.

use crate::error::{Error, Result};
use crate::gfield::{FieldElement, Fq};
use crate::laurent::{reduce_mod_m, reduce_to_last_residue, TSeries, USeries};

/// Value of a symbol computation: an element of the last residue field k'*,
/// optionally accompanied by its norm down to a declared base field.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolValue {
    pub value: FieldElement,
    pub normed: Option<FieldElement>,
}

impl SymbolValue {
    pub fn new(value: FieldElement) -> Self {
        SymbolValue {
            value,
            normed: None,
        }
    }
}

/// The integer pairing nu_K(f, g) = nu_{Kbar}( f^{nu(g)} / g^{nu(f)} mod m_K ).
/// Bilinear and antisymmetric on K* x K*.
pub fn nu_pair(f: &TSeries, g: &TSeries) -> Result<i64> {
    let vf = f.valuation()?;
    let vg = g.valuation()?;
    let q = f.pow(vg)?.mul(&g.pow(-vf)?)?;
    let red = reduce_mod_m(&q)?;
    red.valuation()
}

/// The three independent pairings of a triple; the reversed ones follow by
/// antisymmetry. Shared between the sign and the monomial part so precision
/// retries cannot desynchronize them.
struct TriplePairings {
    fg: i64,
    gh: i64,
    hf: i64,
}

impl TriplePairings {
    fn compute(f: &TSeries, g: &TSeries, h: &TSeries) -> Result<Self> {
        Ok(TriplePairings {
            fg: nu_pair(f, g)?,
            gh: nu_pair(g, h)?,
            hf: nu_pair(h, f)?,
        })
    }

    /// Exponent A of the sign (-1)^A.
    fn sign_exponent(&self) -> i64 {
        let (fg, gh, hf) = (self.fg, self.gh, self.hf);
        // nu(f,h) = -hf, nu(g,f) = -fg, nu(h,g) = -gh
        fg * (-hf) + gh * (-fg) + hf * (-gh) + fg * gh * hf
    }
}

/// The sign term of the two-dimensional tame symbol, as an element of k'.
pub fn sign3(f: &TSeries, g: &TSeries, h: &TSeries) -> Result<FieldElement> {
    let pr = TriplePairings::compute(f, g, h)?;
    let fq = residue_field(f);
    Ok(sign_element(&fq, pr.sign_exponent()))
}

fn sign_element(fq: &Fq, exponent: i64) -> FieldElement {
    if exponent.rem_euclid(2) == 0 {
        fq.one()
    } else {
        fq.one().neg()
    }
}

fn residue_field(f: &TSeries) -> Fq {
    f.ctx().clone()
}

/// The two-dimensional tame symbol
/// (f,g,h) = sgn(f,g,h) * f^{nu(g,h)} g^{nu(h,f)} h^{nu(f,g)} mod m_K mod m_Kbar,
/// an element of k'*. Trimultiplicative and antisymmetric.
pub fn tame2(f: &TSeries, g: &TSeries, h: &TSeries) -> Result<SymbolValue> {
    let pr = TriplePairings::compute(f, g, h)?;
    let monomial = f.pow(pr.gh)?.mul(&g.pow(pr.hf)?)?.mul(&h.pow(pr.fg)?)?;
    // The monomial part is always a unit with unit reduction; a failure here
    // is an internal error, not a domain error.
    let r = reduce_to_last_residue(&monomial).map_err(|e| match e {
        Error::NonUnitReduction(_) => Error::Internal("tame symbol monomial must doubly reduce"),
        other => other,
    })?;
    let value = if pr.sign_exponent().rem_euclid(2) == 0 {
        r
    } else {
        r.neg()
    };
    Ok(SymbolValue::new(value))
}

/// Convenience wrapper returning the bare field element.
pub fn tame2_value(f: &TSeries, g: &TSeries, h: &TSeries) -> Result<FieldElement> {
    Ok(tame2(f, g, h)?.value)
}

/// The one-dimensional tame symbol on k'((u)):
/// (f,g) = (-1)^{nu(f)nu(g)} f^{nu(g)} g^{-nu(f)} mod m, in k'*.
pub fn tame1(f: &USeries, g: &USeries) -> Result<FieldElement> {
    let vf = f.valuation()?;
    let vg = g.valuation()?;
    let m = f.pow(vg)?.mul(&g.pow(-vf)?)?;
    let nm = m.normalized()?;
    if nm.is_exact_zero() || nm.valuation()? != 0 {
        return Err(Error::Internal("tame symbol monomial must reduce"));
    }
    let r = nm.coeff_at(0)?;
    Ok(if (vf * vg).rem_euclid(2) == 0 {
        r
    } else {
        r.neg()
    })
}

/// The Kummer reciprocity map for the extension K(a^{1/m}) of K:
/// (f, g) -> (f,g,a)^{(q-1)/m}, landing in the group of m-th roots of unity.
/// Requires m | q - 1 where q is the order of the last residue field.
pub fn kummer_map(f: &TSeries, g: &TSeries, a: &TSeries, m: u64) -> Result<FieldElement> {
    let fq = residue_field(f);
    let q = fq.order();
    if m == 0 || !(q - 1).is_multiple_of(m) {
        return Err(Error::KummerHypothesis { m, q });
    }
    let s = tame2_value(f, g, a)?;
    s.pow(((q - 1) / m) as i64)
}

/// The order l of the class of a in K*/(K*)^m, so that the Galois group of
/// K(a^{1/m})/K is the group of l-th roots of unity.
///
/// The class is determined by the triple (t-valuation mod m, u-valuation of
/// the unit part mod m, last residue modulo m-th powers): the group of
/// principal units is m-divisible because m is prime to the characteristic.
pub fn kummer_galois_order(a: &TSeries, m: u64) -> Result<u64> {
    let fq = residue_field(a);
    let q = fq.order();
    if m == 0 || !(q - 1).is_multiple_of(m) {
        return Err(Error::KummerHypothesis { m, q });
    }
    let na = a.normalized()?;
    if na.is_exact_zero() {
        return Err(Error::ZeroInput("Kummer datum must be nonzero"));
    }
    let alpha = na.valuation()?;
    let lead = na.coeff_at(alpha)?.normalized()?;
    let beta = lead.valuation()?;
    let c = lead.coeff_at(beta)?;

    let ord_int = |v: i64| -> u64 {
        let r = v.rem_euclid(m as i64) as u64;
        m / gcd(m, if r == 0 { m } else { r })
    };
    // least n | m with c^{n (q-1)/m} = 1
    let mut ord_res = m;
    for n in divisors(m) {
        if c.pow((n * ((q - 1) / m)) as i64)?.is_one() {
            ord_res = n;
            break;
        }
    }
    Ok(lcm(lcm(ord_int(alpha), ord_int(beta)), ord_res))
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn divisors(m: u64) -> Vec<u64> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}
