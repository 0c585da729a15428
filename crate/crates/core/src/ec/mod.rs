//! Elliptic curves y² = x³ + a4·x + a6 over finite fields of characteristic
//! at least 5: group law, j-invariants, twists, point counting, division
//! polynomials, p-torsion bases, the Frobenius matrix and the extra
//! automorphisms at j = 0 and j = 1728.

mod count;
pub mod divpoly;
mod parse;
mod torsion;

use num_bigint::BigUint;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::ff::{Embedding, Field, Fq};

pub use count::{trace_of_frobenius, trace_over_extension};
pub use divpoly::{division_polynomial, mult_x, mult_x_all, FieldRing, QuotientRing, Ring};
pub use parse::{parse_curve, short_from_long};
pub use torsion::{
    apply_aut, extra_automorphisms, frobenius_matrix, has_full_torsion, torsion_basis, torsion_basis_with, torsion_degree, AutKind,
    CurveAut, FrobMatrix, TorsionBasis,
};

/// A point in affine coordinates or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point<E> {
    /// The neutral element.
    Inf,
    /// (x, y).
    Aff(E, E),
}

impl<E> Point<E> {
    /// x-coordinate of an affine point.
    pub fn x(&self) -> Option<&E> {
        match self {
            Point::Inf => None,
            Point::Aff(x, _) => Some(x),
        }
    }

    /// Whether this is the point at infinity.
    pub fn is_inf(&self) -> bool {
        matches!(self, Point::Inf)
    }
}

/// Point on a curve over `F`.
pub type Pt<F> = Point<<F as Field>::Elem>;

/// Short Weierstrass curve y² = x³ + a4·x + a6.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve<F: Field> {
    /// Base field.
    pub f: F,
    /// Coefficient of x.
    pub a4: F::Elem,
    /// Constant coefficient.
    pub a6: F::Elem,
}

impl<F: Field> Curve<F> {
    /// Curve with the given coefficients; rejects singular curves and p < 5.
    pub fn new(f: &F, a4: F::Elem, a6: F::Elem) -> Result<Self> {
        if f.p() < 5 {
            return Err(Error::InvalidParameter("characteristic must be at least 5".into()));
        }
        let c = Curve { f: f.clone(), a4, a6 };
        if f.is_zero(&c.disc_factor()) {
            return Err(Error::InvalidParameter("singular curve".into()));
        }
        Ok(c)
    }

    /// Curve from integer coefficients.
    pub fn from_i64(f: &F, a4: i64, a6: i64) -> Result<Self> {
        Self::new(f, f.from_i64(a4), f.from_i64(a6))
    }

    /// 4a4³ + 27a6², a nonzero multiple of the discriminant.
    pub fn disc_factor(&self) -> F::Elem {
        let f = &self.f;
        let a43 = f.mul(&f.sqr(&self.a4), &self.a4);
        f.add(&f.mul_i64(&a43, 4), &f.mul_i64(&f.sqr(&self.a6), 27))
    }

    /// x³ + a4·x + a6.
    pub fn rhs(&self, x: &F::Elem) -> F::Elem {
        let f = &self.f;
        f.add(&f.mul(&f.add(&f.sqr(x), &self.a4), x), &self.a6)
    }

    /// Whether the point lies on the curve.
    pub fn contains(&self, pt: &Pt<F>) -> bool {
        match pt {
            Point::Inf => true,
            Point::Aff(x, y) => self.f.sqr(y) == self.rhs(x),
        }
    }

    /// Negation.
    pub fn neg(&self, pt: &Pt<F>) -> Pt<F> {
        match pt {
            Point::Inf => Point::Inf,
            Point::Aff(x, y) => Point::Aff(x.clone(), self.f.neg(y)),
        }
    }

    /// Sum.
    pub fn add(&self, a: &Pt<F>, b: &Pt<F>) -> Pt<F> {
        let f = &self.f;
        let (x1, y1, x2, y2) = match (a, b) {
            (Point::Inf, _) => return b.clone(),
            (_, Point::Inf) => return a.clone(),
            (Point::Aff(x1, y1), Point::Aff(x2, y2)) => (x1, y1, x2, y2),
        };
        let lam = if x1 == x2 {
            if f.is_zero(&f.add(y1, y2)) {
                return Point::Inf;
            }
            let num = f.add(&f.mul_i64(&f.sqr(x1), 3), &self.a4);
            f.div(&num, &f.mul_i64(y1, 2))
        } else {
            f.div(&f.sub(y2, y1), &f.sub(x2, x1))
        };
        let x3 = f.sub(&f.sub(&f.sqr(&lam), x1), x2);
        let y3 = f.sub(&f.mul(&lam, &f.sub(x1, &x3)), y1);
        Point::Aff(x3, y3)
    }

    /// Difference.
    pub fn sub(&self, a: &Pt<F>, b: &Pt<F>) -> Pt<F> {
        self.add(a, &self.neg(b))
    }

    /// Doubling.
    pub fn double(&self, a: &Pt<F>) -> Pt<F> {
        self.add(a, a)
    }

    /// Multiple by a signed machine integer.
    pub fn mul_i64(&self, a: &Pt<F>, k: i64) -> Pt<F> {
        let r = self.mul_big(a, &BigUint::from(k.unsigned_abs()));
        if k < 0 {
            self.neg(&r)
        } else {
            r
        }
    }

    /// Multiple by an unsigned integer (Jacobian coordinates internally).
    pub fn mul_big(&self, a: &Pt<F>, k: &BigUint) -> Pt<F> {
        let (ax, ay) = match a {
            Point::Inf => return Point::Inf,
            Point::Aff(x, y) => (x, y),
        };
        let f = &self.f;
        // (X, Y, Z) with x = X/Z², y = Y/Z³; Z = 0 is infinity
        let mut acc: Option<(F::Elem, F::Elem, F::Elem)> = None;
        for i in (0..k.bits()).rev() {
            if let Some((x, y, z)) = acc.take() {
                acc = self.jac_double(&x, &y, &z);
            }
            if k.bit(i) {
                acc = match acc {
                    None => Some((ax.clone(), ay.clone(), f.one())),
                    Some((x, y, z)) => self.jac_madd(&x, &y, &z, ax, ay),
                };
            }
        }
        match acc {
            None => Point::Inf,
            Some((x, y, z)) => {
                let zi = f.inv(&z).unwrap();
                let zi2 = f.sqr(&zi);
                Point::Aff(f.mul(&x, &zi2), f.mul(&y, &f.mul(&zi2, &zi)))
            }
        }
    }

    fn jac_double(&self, x: &F::Elem, y: &F::Elem, z: &F::Elem) -> Option<(F::Elem, F::Elem, F::Elem)> {
        let f = &self.f;
        if f.is_zero(y) {
            return None;
        }
        let xx = f.sqr(x);
        let yy = f.sqr(y);
        let yyyy = f.sqr(&yy);
        let zz = f.sqr(z);
        let s = f.mul_i64(&f.sub(&f.sub(&f.sqr(&f.add(x, &yy)), &xx), &yyyy), 2);
        let m = f.add(&f.mul_i64(&xx, 3), &f.mul(&self.a4, &f.sqr(&zz)));
        let t = f.sub(&f.sqr(&m), &f.mul_i64(&s, 2));
        let y3 = f.sub(&f.mul(&m, &f.sub(&s, &t)), &f.mul_i64(&yyyy, 8));
        let z3 = f.sub(&f.sub(&f.sqr(&f.add(y, z)), &yy), &zz);
        Some((t, y3, z3))
    }

    fn jac_madd(
        &self,
        x1: &F::Elem,
        y1: &F::Elem,
        z1: &F::Elem,
        x2: &F::Elem,
        y2: &F::Elem,
    ) -> Option<(F::Elem, F::Elem, F::Elem)> {
        let f = &self.f;
        let z1z1 = f.sqr(z1);
        let u2 = f.mul(x2, &z1z1);
        let s2 = f.mul(y2, &f.mul(z1, &z1z1));
        let h = f.sub(&u2, x1);
        let r = f.mul_i64(&f.sub(&s2, y1), 2);
        if f.is_zero(&h) {
            if f.is_zero(&r) {
                return self.jac_double(x1, y1, z1);
            }
            return None;
        }
        let hh = f.sqr(&h);
        let i = f.mul_i64(&hh, 4);
        let j = f.mul(&h, &i);
        let v = f.mul(x1, &i);
        let x3 = f.sub(&f.sub(&f.sqr(&r), &j), &f.mul_i64(&v, 2));
        let y3 = f.sub(&f.mul(&r, &f.sub(&v, &x3)), &f.mul_i64(&f.mul(y1, &j), 2));
        let z3 = f.sub(&f.sub(&f.sqr(&f.add(z1, &h)), &z1z1), &hh);
        Some((x3, y3, z3))
    }

    /// Least k ≥ 0 with [p^k]·a = O, if at most `max`.
    pub fn p_order_exponent(&self, a: &Pt<F>, p: u64, max: u32) -> Option<u32> {
        let mut cur = a.clone();
        for k in 0..=max {
            if cur.is_inf() {
                return Some(k);
            }
            cur = self.mul_i64(&cur, p as i64);
        }
        None
    }

    /// A random affine point (uniform x among those with a point above it).
    pub fn random_point(&self, rng: &mut dyn RngCore) -> Pt<F> {
        let f = &self.f;
        loop {
            let x = f.random(rng);
            if let Some(y) = f.sqrt(&self.rhs(&x)) {
                let y = if rng.next_u32() & 1 == 1 { f.neg(&y) } else { y };
                return Point::Aff(x, y);
            }
        }
    }

    /// All points (small fields only).
    pub fn points(&self) -> Vec<Pt<F>> {
        let f = &self.f;
        let mut out = vec![Point::Inf];
        for x in f.elements() {
            if let Some(y) = f.sqrt(&self.rhs(&x)) {
                out.push(Point::Aff(x.clone(), y.clone()));
                if !f.is_zero(&y) {
                    out.push(Point::Aff(x, f.neg(&y)));
                }
            }
        }
        out
    }

    /// Whether a4 = 0 or a6 = 0 with j ∈ {0, 1728}.
    pub fn is_special(&self) -> Option<u32> {
        if self.f.is_zero(&self.a4) {
            Some(0)
        } else if self.f.is_zero(&self.a6) {
            Some(1728)
        } else {
            None
        }
    }
}

impl Curve<Fq> {
    /// The same curve over a larger field.
    pub fn base_change(&self, emb: &Embedding) -> Curve<Fq> {
        Curve { f: emb.big.clone(), a4: emb.forward(&self.a4), a6: emb.forward(&self.a6) }
    }
}

/// j = 1728·4a4³/(4a4³ + 27a6²).
pub fn j_invariant<F: Field>(e: &Curve<F>) -> F::Elem {
    let f = &e.f;
    let a43 = f.mul_i64(&f.mul(&f.sqr(&e.a4), &e.a4), 4);
    f.div(&f.mul_i64(&a43, 1728), &e.disc_factor())
}

/// A curve with the given j: y² = x³ + 1 for j = 0, y² = x³ + x for j = 1728,
/// otherwise a4 = 3j(1728 − j), a6 = 2j(1728 − j)².
pub fn curve_from_j<F: Field>(f: &F, j: &F::Elem) -> Curve<F> {
    if f.is_zero(j) {
        return Curve::from_i64(f, 0, 1).unwrap();
    }
    let k = f.sub(&f.from_i64(1728), j);
    if f.is_zero(&k) {
        return Curve::from_i64(f, 1, 0).unwrap();
    }
    let a4 = f.mul_i64(&f.mul(j, &k), 3);
    let a6 = f.mul_i64(&f.mul(j, &f.sqr(&k)), 2);
    Curve::new(f, a4, a6).unwrap()
}

/// The twist y² = x³ + a4·d²·x + a6·d³.
pub fn quadratic_twist<F: Field>(e: &Curve<F>, d: &F::Elem) -> Result<Curve<F>> {
    let f = &e.f;
    if f.is_zero(d) {
        return Err(Error::InvalidParameter("twist by zero".into()));
    }
    let d2 = f.sqr(d);
    Curve::new(f, f.mul(&e.a4, &d2), f.mul(&e.a6, &f.mul(&d2, d)))
}

/// The least element (in element order) that is not a square.
pub fn least_non_square<F: Field>(f: &F) -> F::Elem {
    let mut c = vec![0u64; f.degree()];
    loop {
        let x = f.from_coeffs(&c);
        if f.quadratic_character(&x) == -1 {
            return x;
        }
        for d in c.iter_mut() {
            *d += 1;
            if *d < f.p() {
                break;
            }
            *d = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{Fp, Fq};
    use rand::SeedableRng;

    #[test]
    fn known_j_invariants() {
        let f7 = Fp::new(7);
        assert_eq!(j_invariant(&Curve::from_i64(&f7, 1, 0).unwrap()), 6);
        let f11 = Fp::new(11);
        assert_eq!(j_invariant(&Curve::from_i64(&f11, 0, 1).unwrap()), 0);
        let f13 = Fp::new(13);
        assert_eq!(j_invariant(&Curve::from_i64(&f13, 1, 4).unwrap()), 5);
    }

    #[test]
    fn from_j_roundtrip() {
        let f = Fp::new(13);
        for j in 0..13 {
            assert_eq!(j_invariant(&curve_from_j(&f, &j)), j);
        }
    }

    #[test]
    fn group_law_and_jacobian_agree() {
        let f = Fq::prime(97);
        let e = Curve::from_i64(&f, 2, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let p = e.random_point(&mut rng);
        let mut acc = Point::Inf;
        for k in 0..40u32 {
            assert_eq!(acc, e.mul_big(&p, &BigUint::from(k)), "k = {k}");
            assert!(e.contains(&acc));
            acc = e.add(&acc, &p);
        }
        let n = e.points().len() as u64;
        assert!(e.mul_i64(&p, n as i64).is_inf());
    }

    #[test]
    fn twist_keeps_j() {
        let f = Fp::new(13);
        let e = Curve::from_i64(&f, 1, 4).unwrap();
        let t = quadratic_twist(&e, &2).unwrap();
        assert_eq!(j_invariant(&t), 5);
        assert!(quadratic_twist(&e, &0).is_err());
    }
}
