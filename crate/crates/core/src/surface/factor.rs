//! Factorization into irreducible components over the base field.
//!
//! Univariate polynomials are factored by squarefree decomposition,
//! distinct-degree splitting via Frobenius powers, and deterministic
//! equal-degree splitting by exhaustive root search in the matching
//! extension field (roots grouped into Frobenius orbits, minimal polynomials
//! reconstructed exactly).
//!
//! Bivariate polynomials are factored as curve components: linear factors by
//! substitution tests, then a quadratic-factor exhaustive fallback for
//! residuals of total degree 4. Residuals of total degree up to 3 without
//! linear factors are irreducible once the univariate cases are split off.
//! Higher degrees raise a clear error (desk scale).

use crate::error::{Error, Result};
use crate::gfield::{Embedding, FieldElement, Fq, MAX_FIELD_ORDER};
use crate::surface::poly::{Poly1, Poly2};

/// Factor a nonzero univariate polynomial into monic irreducibles with
/// multiplicities (the scalar content is dropped).
pub fn factor_poly1(f: &Poly1) -> Result<Vec<(Poly1, u32)>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("factorization of zero"));
    }
    let mut out: Vec<(Poly1, u32)> = Vec::new();
    let mut rest = f.monic()?;
    while rest.degree().unwrap_or(0) > 0 {
        let sqf = squarefree_part(&rest)?;
        for g in distinct_degree_split(&sqf)? {
            // g is a product of irreducibles of one fixed degree
            for irr in equal_degree_split(&g.0, g.1)? {
                let mut mult = 0u32;
                loop {
                    match rest.divmod(&irr)? {
                        (q, r) if r.is_zero() => {
                            rest = q;
                            mult += 1;
                        }
                        _ => break,
                    }
                }
                if mult > 0 {
                    push_factor(&mut out, irr, mult);
                }
            }
        }
    }
    out.sort_by(|a, b| cmp_poly1(&a.0, &b.0));
    Ok(out)
}

fn push_factor(out: &mut Vec<(Poly1, u32)>, f: Poly1, m: u32) {
    for (g, k) in out.iter_mut() {
        if *g == f {
            *k += m;
            return;
        }
    }
    out.push((f, m));
}

fn cmp_poly1(a: &Poly1, b: &Poly1) -> std::cmp::Ordering {
    let ka: Vec<Vec<u64>> = a.coeffs().iter().map(|c| c.coeffs().to_vec()).collect();
    let kb: Vec<Vec<u64>> = b.coeffs().iter().map(|c| c.coeffs().to_vec()).collect();
    (a.degree(), ka).cmp(&(b.degree(), kb))
}

/// Largest squarefree divisor, characteristic-aware: when the derivative
/// vanishes the polynomial is a p-th power of one with p-th-rooted
/// coefficients.
fn squarefree_part(f: &Poly1) -> Result<Poly1> {
    let fq = f.field().clone();
    let d = f.derivative()?;
    if d.is_zero() {
        // f = h(x^p); p-th roots of coefficients exist and are unique
        let p = fq.characteristic() as usize;
        let proot_exp = fq.order() / fq.characteristic();
        let mut hc = Vec::new();
        for (k, c) in f.coeffs().iter().enumerate() {
            if k % p == 0 {
                hc.push(c.pow(proot_exp as i64)?);
            } else if !c.is_zero() {
                return Err(Error::Internal("derivative zero but not a p-th power"));
            }
        }
        return squarefree_part(&Poly1::from_coeffs(&fq, hc));
    }
    let g = f.gcd(&d)?;
    f.exact_div(&g)?.monic()
}

/// Split a squarefree monic polynomial into (product of its irreducible
/// factors of degree k, k) pieces.
fn distinct_degree_split(f: &Poly1) -> Result<Vec<(Poly1, usize)>> {
    let fq = f.field().clone();
    let q = fq.order();
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly1::var(&fq);
    let mut h = x.clone(); // x^{q^k} mod rest
    let mut k = 0usize;
    while rest.degree().unwrap_or(0) > 0 {
        k += 1;
        if 2 * k > rest.degree().unwrap() {
            // what is left is irreducible
            let d = rest.degree().unwrap();
            out.push((rest.clone(), d));
            break;
        }
        h = poly_pow_mod(&h, q, &rest)?;
        let g = h.sub(&x)?.gcd(&rest)?;
        if g.degree().unwrap_or(0) > 0 {
            out.push((g.clone(), k));
            rest = rest.exact_div(&g)?.monic()?;
            h = h.divmod(&rest)?.1;
        }
    }
    Ok(out)
}

fn poly_pow_mod(base: &Poly1, mut e: u64, m: &Poly1) -> Result<Poly1> {
    let fq = base.field().clone();
    let mut acc = Poly1::constant(fq.one());
    let mut b = base.divmod(m)?.1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&b)?.divmod(m)?.1;
        }
        b = b.mul(&b)?.divmod(m)?.1;
        e >>= 1;
    }
    Ok(acc)
}

/// Split a squarefree product of degree-k irreducibles into its factors by
/// exhaustive root search in F_{q^k} and orbit reconstruction.
fn equal_degree_split(f: &Poly1, k: usize) -> Result<Vec<Poly1>> {
    let deg = f.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    if deg == k {
        return Ok(vec![f.clone()]);
    }
    let fq = f.field().clone();
    let order = (fq.order() as u128).pow(k as u32);
    if order > MAX_FIELD_ORDER as u128 {
        return Err(Error::FieldTooLarge(order));
    }
    let ext = Fq::extension(fq.characteristic(), fq.degree() * k)?;
    let emb = Embedding::new(&fq, &ext)?;
    let fe = f.map_embed(&emb)?;
    let mut rest = f.clone();
    let mut seen_roots: Vec<FieldElement> = Vec::new();
    let mut out = Vec::new();
    for cand in ext.elements() {
        if rest.degree().unwrap_or(0) == 0 {
            break;
        }
        if seen_roots.contains(&cand) {
            continue;
        }
        if !fe.eval(&cand)?.is_zero() {
            continue;
        }
        // reconstruct the minimal polynomial from the Frobenius orbit
        let q = fq.order();
        let mut orbit = vec![cand.clone()];
        let mut cur = cand.pow(q as i64)?;
        while cur != cand {
            orbit.push(cur.clone());
            cur = cur.pow(q as i64)?;
        }
        seen_roots.extend(orbit.iter().cloned());
        let mut minpoly_ext = Poly1::constant(ext.one());
        for r in &orbit {
            let lin = Poly1::from_coeffs(&ext, vec![r.neg(), ext.one()]);
            minpoly_ext = minpoly_ext.mul(&lin)?;
        }
        let mut coeffs = Vec::new();
        for c in minpoly_ext.coeffs() {
            coeffs.push(emb.section(c)?);
        }
        let minpoly = Poly1::from_coeffs(&fq, coeffs);
        rest = rest.exact_div(&minpoly)?.monic()?;
        out.push(minpoly);
    }
    if rest.degree().unwrap_or(0) > 0 {
        return Err(Error::Internal("equal-degree split left a remainder"));
    }
    Ok(out)
}

/// All roots of f in the extension of the base field of degree k, grouped as
/// (root in F_{q^k}, exact degree of the root over F_q). Only roots of exact
/// degree k are returned.
pub fn roots_of_exact_degree(f: &Poly1, k: usize) -> Result<Vec<FieldElement>> {
    let fq = f.field().clone();
    let order = (fq.order() as u128).pow(k as u32);
    if order > MAX_FIELD_ORDER as u128 {
        return Err(Error::FieldTooLarge(order));
    }
    if f.is_zero() {
        return Err(Error::ZeroInput("roots of the zero polynomial"));
    }
    let ext = Fq::extension(fq.characteristic(), fq.degree() * k)?;
    let emb = Embedding::new(&fq, &ext)?;
    let fe = f.map_embed(&emb)?;
    let q = fq.order();
    let mut out = Vec::new();
    for cand in ext.elements() {
        if !fe.eval(&cand)?.is_zero() {
            continue;
        }
        // exact degree = Frobenius orbit size
        let mut n = 1usize;
        let mut cur = cand.pow(q as i64)?;
        while cur != cand {
            n += 1;
            cur = cur.pow(q as i64)?;
        }
        if n == k {
            out.push(cand);
        }
    }
    out.sort_by(|a, b| a.coeffs().cmp(b.coeffs()));
    Ok(out)
}

/// Maximum squarefree residual degree after linear and quadratic extraction;
/// such residuals have irreducible factors of degree at least 3 only, so
/// anything up to degree 5 is itself irreducible.
pub const FACTOR_RESIDUAL_CAP: u32 = 5;

/// Factor a nonzero bivariate polynomial into normalized irreducible
/// components with multiplicities. The scalar content is dropped.
///
/// Strategy: squarefree reduction (characteristic-aware), univariate cases
/// by the univariate factorizer, linear factors by substitution tests,
/// quadratic factors by a filtered exhaustive search, and residual
/// irreducibility for degrees up to [`FACTOR_RESIDUAL_CAP`].
pub fn factor_poly2(f: &Poly2) -> Result<Vec<(Poly2, u32)>> {
    if f.is_zero() {
        return Err(Error::ZeroInput("factorization of zero"));
    }
    let mut out: Vec<(Poly2, u32)> = Vec::new();
    let mut rest = f.normalized()?;
    while rest.total_degree().unwrap_or(0) > 0 {
        let sqf = squarefree_part2(&rest)?;
        for prime in factor_squarefree2(&sqf)? {
            let mut mult = 0u32;
            while let Some(q) = rest.try_exact_div(&prime)? {
                rest = q.normalized()?;
                mult += 1;
            }
            if mult > 0 {
                push2(&mut out, prime, mult);
            }
        }
    }
    out.sort_by(cmp2);
    Ok(out)
}

/// A polynomial divisible by every prime factor of f exactly once.
fn squarefree_part2(f: &Poly2) -> Result<Poly2> {
    let fx = f.deriv_x()?;
    let fy = f.deriv_y()?;
    if fx.is_zero() && fy.is_zero() {
        // f = h(x^p, y^p) is a p-th power of the coefficient-rooted h
        return squarefree_part2(&pth_root2(f)?);
    }
    let g = f.gcd2(&fx)?.gcd2(&fy)?;
    if g.total_degree().unwrap_or(0) == 0 {
        return f.normalized();
    }
    let s = f
        .try_exact_div(&g)?
        .ok_or(Error::Internal("gcd must divide"))?
        .normalized()?;
    // primes whose multiplicity is divisible by p hide entirely inside g
    let hidden = squarefree_part2(&g)?;
    let shared = s.gcd2(&hidden)?;
    let extra = hidden
        .try_exact_div(&shared)?
        .ok_or(Error::Internal("gcd must divide"))?;
    s.mul(&extra)?.normalized()
}

/// Coefficient- and exponent-wise p-th root of a polynomial in x^p, y^p.
fn pth_root2(f: &Poly2) -> Result<Poly2> {
    let fq = f.field().clone();
    let p = fq.characteristic() as u32;
    let root_exp = (fq.order() / fq.characteristic()) as i64;
    let mut out = Poly2::zero(&fq);
    for (&(i, j), c) in f.terms() {
        if i % p != 0 || j % p != 0 {
            return Err(Error::Internal("not a p-th power"));
        }
        out.insert((i / p, j / p), c.pow(root_exp)?);
    }
    Ok(out)
}

/// Factor a squarefree polynomial into irreducible components (without
/// multiplicities).
fn factor_squarefree2(f: &Poly2) -> Result<Vec<Poly2>> {
    let fq = f.field().clone();
    let mut out: Vec<Poly2> = Vec::new();
    let mut rest = f.normalized()?;

    // univariate-in-one-variable pieces reduce to univariate factorization
    let handle_univariate = |rest: &mut Poly2, out: &mut Vec<Poly2>| -> Result<bool> {
        if rest.total_degree().unwrap_or(0) == 0 {
            return Ok(true);
        }
        if rest.deg_y() == Some(0) {
            let p1 = rest.y_coeffs().remove(0);
            for (g, _) in factor_poly1(&p1)? {
                out.push(Poly2::from_y_coeffs(&fq, &[g]).normalized()?);
            }
            *rest = Poly2::one(&fq);
            return Ok(true);
        }
        if rest.deg_x() == Some(0) {
            let swapped = rest.swap_xy();
            let p1 = swapped.y_coeffs().remove(0);
            for (g, _) in factor_poly1(&p1)? {
                out.push(Poly2::from_y_coeffs(&fq, &[g]).swap_xy().normalized()?);
            }
            *rest = Poly2::one(&fq);
            return Ok(true);
        }
        Ok(false)
    };

    if handle_univariate(&mut rest, &mut out)? {
        return Ok(out);
    }
    // split off the x-content (vertical components)
    let cont = rest.cont_y()?;
    if cont.degree().unwrap_or(0) > 0 {
        for (g, _) in factor_poly1(&cont)? {
            out.push(Poly2::from_y_coeffs(&fq, &[g]).normalized()?);
        }
        let cp = Poly2::from_y_coeffs(&fq, &[cont]);
        rest = rest
            .try_exact_div(&cp)?
            .ok_or(Error::Internal("content must divide"))?
            .normalized()?;
    }

    // linear factors x - c (f(c, y) identically zero)
    for c in fq.elements() {
        let lin = Poly2::var_x(&fq).sub(&Poly2::constant(c.clone()))?;
        if let Some(q) = rest.try_exact_div(&lin)? {
            out.push(lin.normalized()?);
            rest = q;
        }
    }
    // linear factors y - (m x + c)
    for m in fq.elements() {
        for c in fq.elements() {
            let rhs = Poly2::var_x(&fq)
                .scale(&m)?
                .add(&Poly2::constant(c.clone()))?;
            let lin = Poly2::var_y(&fq).sub(&rhs)?;
            if let Some(q) = rest.try_exact_div(&lin)? {
                out.push(lin.normalized()?);
                rest = q;
            }
        }
    }

    if handle_univariate(&mut rest, &mut out)? {
        return Ok(out);
    }

    // quadratic factors, filtered exhaustive search, at any degree
    while rest.total_degree().unwrap_or(0) >= 4 {
        match find_quadratic_factor(&rest)? {
            Some((q2, cof)) => {
                out.push(q2.normalized()?);
                rest = cof.normalized()?;
                if handle_univariate(&mut rest, &mut out)? {
                    return Ok(out);
                }
            }
            None => break,
        }
    }

    let d = rest.total_degree().unwrap_or(0);
    if d == 0 {
        return Ok(out);
    }
    if d <= FACTOR_RESIDUAL_CAP {
        // all remaining irreducible factors have degree >= 3, so a residual
        // of degree up to 5 is irreducible
        out.push(rest.normalized()?);
        return Ok(out);
    }
    Err(Error::Unsupported(format!(
        "component factorization: residual of total degree {d} may split into cubics"
    )))
}

fn push2(out: &mut Vec<(Poly2, u32)>, f: Poly2, m: u32) {
    for (g, k) in out.iter_mut() {
        if *g == f {
            *k += m;
            return;
        }
    }
    out.push((f, m));
}

fn cmp2(a: &(Poly2, u32), b: &(Poly2, u32)) -> std::cmp::Ordering {
    poly2_key(&a.0).cmp(&poly2_key(&b.0))
}

/// Deterministic ordering key for normalized polynomials.
pub fn poly2_key(f: &Poly2) -> Vec<(u32, u32, Vec<u64>)> {
    f.terms()
        .iter()
        .map(|(&(i, j), c)| (i + j, i, c.coeffs().to_vec()))
        .collect()
}

/// Search the (normalized) quadratics dividing f, smallest key first.
/// Candidates are pre-filtered by evaluation: a divisor must vanish
/// wherever f vanishes on a probe grid, which rejects almost everything
/// before the exact division.
fn find_quadratic_factor(f: &Poly2) -> Result<Option<(Poly2, Poly2)>> {
    let fq = f.field().clone();
    let elems = fq.elements();
    // probe points where f vanishes
    let mut fzeros = Vec::new();
    for a in &elems {
        for b in &elems {
            if f.eval(a, b)?.is_zero() {
                fzeros.push((a.clone(), b.clone()));
            }
        }
    }
    // points where f does not vanish: a divisor cannot vanish there
    let mut fnonzeros = Vec::new();
    'outer: for a in &elems {
        for b in &elems {
            if !f.eval(a, b)?.is_zero() {
                fnonzeros.push((a.clone(), b.clone()));
                if fnonzeros.len() >= 24 {
                    break 'outer;
                }
            }
        }
    }
    let _ = fzeros;
    // candidates ordered with leading monomial y^2, then xy, then x^2
    let monos: [(u32, u32); 6] = [(0, 2), (1, 1), (2, 0), (0, 1), (1, 0), (0, 0)];
    let q = elems.len();
    for l in 0..3 {
        let free = 5 - l;
        let total = q.pow(free as u32);
        'cand: for mut code in 0..total {
            let mut cand = Poly2::zero(&fq);
            cand.insert(monos[l], fq.one());
            for mono in monos.iter().skip(l + 1) {
                let c = elems[code % q].clone();
                code /= q;
                cand.insert(*mono, c);
            }
            if cand.total_degree() != Some(2) {
                continue;
            }
            for (a, b) in &fnonzeros {
                if cand.eval(a, b)?.is_zero() {
                    continue 'cand;
                }
            }
            if let Some(cof) = f.try_exact_div(&cand)? {
                return Ok(Some((cand, cof)));
            }
        }
    }
    Ok(None)
}
