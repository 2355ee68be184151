//! Deterministic seeded sampling of field elements, local-field elements and
//! geometric scenes. Shared by the property suites, the acceptance suite and
//! the certificate commands; the same seed always yields the same samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::gfield::{FieldElement, Fq};
use crate::laurent::{two_local_monomial, TSeries, USeries};
use crate::surface::poly::Poly2;
use crate::surface::{ClosedPoint, Curve, RationalFunction};

/// Seeded sampler over a fixed residue field.
pub struct Sampler {
    rng: ChaCha8Rng,
    fq: Fq,
    elements: Vec<FieldElement>,
}

impl Sampler {
    pub fn new(fq: &Fq, seed: u64) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fq: fq.clone(),
            elements: fq.elements(),
        }
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Any element, zero included.
    pub fn element(&mut self) -> FieldElement {
        let q = self.elements.len();
        self.elements[self.rng.gen_range(0..q)].clone()
    }

    pub fn nonzero_element(&mut self) -> FieldElement {
        let q = self.elements.len();
        self.elements[self.rng.gen_range(1..q)].clone()
    }

    pub fn int_range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..hi)
    }

    /// A random nonzero Laurent series over the field: a monomial times a
    /// small product of principal units.
    pub fn u_series(&mut self) -> USeries {
        let c = self.nonzero_element();
        let v = self.int_range(-3, 4);
        let mut s = USeries::monomial(c, v);
        for _ in 0..self.int_range(0, 3) {
            let cc = self.element();
            let k = self.int_range(1, 4);
            let term = USeries::one(&self.fq)
                .add(&USeries::monomial(cc, k))
                .expect("same field");
            s = s.mul(&term).expect("same field");
        }
        s
    }

    /// A random nonzero two-dimensional local field element: a monomial
    /// c u^b t^a times a small product of principal units.
    pub fn t_series(&mut self) -> TSeries {
        let c = self.nonzero_element();
        let a = self.int_range(-2, 3);
        let b = self.int_range(-2, 3);
        let mut s = two_local_monomial(c, b, a);
        for _ in 0..self.int_range(0, 3) {
            let cc = self.element();
            let bi = self.int_range(1, 3);
            let ai = self.int_range(0, 2);
            let term = two_local_monomial(self.fq.one(), 0, 0)
                .add(&two_local_monomial(cc, bi, ai))
                .expect("same field");
            s = s.mul(&term).expect("same field");
        }
        s
    }

    // --- geometric scenes ----------------------------------------------

    fn var_x(&self) -> Poly2 {
        Poly2::var_x(&self.fq)
    }

    fn var_y(&self) -> Poly2 {
        Poly2::var_y(&self.fq)
    }

    /// x - alpha translated to the point.
    fn coord_x(&self, alpha: &FieldElement) -> Result<Poly2> {
        self.var_x().sub(&Poly2::constant(alpha.clone()))
    }

    fn coord_y(&self, beta: &FieldElement) -> Result<Poly2> {
        self.var_y().sub(&Poly2::constant(beta.clone()))
    }

    /// A random line through (alpha, beta): either vertical or of a random
    /// slope.
    pub fn line_through(&mut self, alpha: &FieldElement, beta: &FieldElement) -> Result<Poly2> {
        if self.int_range(0, 4) == 0 {
            return self.coord_x(alpha);
        }
        let m = self.element();
        // (y - beta) - m (x - alpha)
        self.coord_y(beta)?.sub(&self.coord_x(alpha)?.scale(&m)?)
    }

    /// A random conic through (alpha, beta), smooth at the point by
    /// construction (its linear part there is y - beta) and smooth globally
    /// (nonzero discriminant of the projective symmetric matrix).
    pub fn smooth_conic_through(
        &mut self,
        alpha: &FieldElement,
        beta: &FieldElement,
    ) -> Result<Poly2> {
        loop {
            let xs = self.coord_x(alpha)?;
            let ys = self.coord_y(beta)?;
            let c1 = self.nonzero_element();
            let c2 = self.element();
            let c3 = self.element();
            let conic = ys
                .add(&xs.mul(&xs)?.scale(&c1)?)?
                .add(&xs.mul(&ys)?.scale(&c2)?)?
                .add(&ys.mul(&ys)?.scale(&c3)?)?;
            if conic_is_smooth(&conic)? {
                return Ok(conic);
            }
        }
    }

    /// A random smooth conic anywhere.
    pub fn smooth_conic(&mut self) -> Result<Poly2> {
        let a = self.element();
        let b = self.element();
        self.smooth_conic_through(&a, &b)
    }

    /// The standard nodal cubic translated so its node sits at the point:
    /// (y-b)^2 - (x-a)^2 - (x-a)^3, tangents split over any odd
    /// characteristic.
    pub fn nodal_cubic_at(&self, alpha: &FieldElement, beta: &FieldElement) -> Result<Poly2> {
        let xs = self.coord_x(alpha)?;
        let ys = self.coord_y(beta)?;
        ys.mul(&ys)?
            .sub(&xs.mul(&xs)?)?
            .sub(&xs.mul(&xs)?.mul(&xs)?)
    }

    fn random_product(&mut self, pool: &[Poly2], max_exp: i64) -> Result<RationalFunction> {
        let mut f = RationalFunction::constant(self.nonzero_element());
        for p in pool {
            let e = self.int_range(-max_exp, max_exp + 1);
            if e == 0 {
                continue;
            }
            f = f.mul(&RationalFunction::from_poly(p.clone()).pow(e)?)?;
        }
        // avoid the degenerate all-skipped constant-only outcome half the time
        if f.numerator().total_degree() == Some(0) && f.denominator().total_degree() == Some(0) {
            let p = &pool[self.rng.gen_range(0..pool.len())];
            f = f.mul(&RationalFunction::from_poly(p.clone()))?;
        }
        Ok(f)
    }

    /// A randomized scene around a rational point: components through the
    /// point are lines, a smooth conic and optionally the nodal cubic with
    /// its node at the point; f, g, a are random signed products.
    pub fn point_scene(&mut self) -> Result<PointScene> {
        let alpha = self.element();
        let beta = self.element();
        let point = ClosedPoint::rational(&self.fq, alpha.clone(), beta.clone())?;
        let mut pool = Vec::new();
        pool.push(self.line_through(&alpha, &beta)?);
        let second = self.line_through(&alpha, &beta)?;
        if !pool.contains(&second) {
            pool.push(second);
        }
        if self.int_range(0, 2) == 0 {
            pool.push(self.smooth_conic_through(&alpha, &beta)?);
        }
        if self.int_range(0, 3) == 0 {
            pool.push(self.nodal_cubic_at(&alpha, &beta)?);
        }
        let f = self.random_product(&pool, 2)?;
        let g = self.random_product(&pool, 2)?;
        let a = self.random_product(&pool, 2)?;
        Ok(PointScene { point, f, g, a })
    }

    /// A randomized scene along a line or a smooth conic; the factor pool
    /// includes the curve itself, lines, and an irreducible vertical-type
    /// quadratic to force closed points of degree 2.
    pub fn curve_scene(&mut self) -> Result<CurveScene> {
        let curve_poly = if self.int_range(0, 2) == 0 {
            let a = self.element();
            let b = self.element();
            self.line_through(&a, &b)?
        } else {
            self.smooth_conic()?
        };
        let curve = Curve::from_affine(&curve_poly)?;
        let mut pool = vec![curve_poly];
        for _ in 0..2 {
            let a = self.element();
            let b = self.element();
            pool.push(self.line_through(&a, &b)?);
        }
        if let Some(q) = self.irreducible_vertical_quadratic()? {
            pool.push(q);
        }
        let f = self.random_product(&pool, 2)?;
        let g = self.random_product(&pool, 2)?;
        let a = self.random_product(&pool, 2)?;
        Ok(CurveScene { curve, f, g, a })
    }

    /// x^2 - n for a non-square n, when the field has one.
    fn irreducible_vertical_quadratic(&mut self) -> Result<Option<Poly2>> {
        let elems = self.fq.elements();
        let squares: Vec<FieldElement> = elems.iter().map(|e| e.mul(e)).collect::<Result<_>>()?;
        for _ in 0..20 {
            let n = self.nonzero_element();
            if !squares.contains(&n) {
                let x = self.var_x();
                return Ok(Some(x.mul(&x)?.sub(&Poly2::constant(n))?));
            }
        }
        Ok(None)
    }

    /// A randomized global scene: functions supported on lines, smooth
    /// conics and at most one nodal cubic (keeping intersection degrees at
    /// desk scale).
    pub fn global_scene(&mut self) -> Result<GlobalScene> {
        let mut pool = Vec::new();
        for _ in 0..2 {
            let a = self.element();
            let b = self.element();
            pool.push(self.line_through(&a, &b)?);
        }
        if self.int_range(0, 2) == 0 {
            pool.push(self.smooth_conic()?);
        }
        if self.int_range(0, 3) == 0 {
            let a = self.element();
            let b = self.element();
            pool.push(self.nodal_cubic_at(&a, &b)?);
        }
        let f = self.random_product(&pool, 2)?;
        let g = self.random_product(&pool, 2)?;
        let a = self.random_product(&pool, 2)?;
        Ok(GlobalScene { f, g, a })
    }
}

/// Smoothness of a conic in odd characteristic: the determinant of the
/// symmetric matrix of the projective quadratic form is nonzero.
pub fn conic_is_smooth(conic: &Poly2) -> Result<bool> {
    let fq = conic.field().clone();
    if conic.total_degree() != Some(2) {
        return Ok(false);
    }
    let half = fq.from_int(2).inv()?;
    let a = conic.coeff(2, 0);
    let b = conic.coeff(1, 1).mul(&half)?;
    let c = conic.coeff(0, 2);
    let d = conic.coeff(1, 0).mul(&half)?;
    let e = conic.coeff(0, 1).mul(&half)?;
    let f = conic.coeff(0, 0);
    // det [[a, b, d], [b, c, e], [d, e, f]]
    let m1 = c.mul(&f)?.sub(&e.mul(&e)?)?;
    let m2 = b.mul(&f)?.sub(&e.mul(&d)?)?;
    let m3 = b.mul(&e)?.sub(&c.mul(&d)?)?;
    let det = a.mul(&m1)?.sub(&b.mul(&m2)?)?.add(&d.mul(&m3)?)?;
    Ok(!det.is_zero())
}

/// Scene data for the around-a-point law.
pub struct PointScene {
    pub point: ClosedPoint,
    pub f: RationalFunction,
    pub g: RationalFunction,
    pub a: RationalFunction,
}

/// Scene data for the along-a-curve law.
pub struct CurveScene {
    pub curve: Curve,
    pub f: RationalFunction,
    pub g: RationalFunction,
    pub a: RationalFunction,
}

/// Scene data for the global law.
pub struct GlobalScene {
    pub f: RationalFunction,
    pub g: RationalFunction,
    pub a: RationalFunction,
}
