//! Division polynomials over an arbitrary commutative ring.
//!
//! With F = 4(x³ + a4·x + a6), the sequence f_n satisfies ψ_n = f_n for odd n
//! and ψ_n = 2y·f_n for even n, so every f_n is a polynomial in x alone.

use super::Curve;
use crate::ff::{Field, Poly, PolyRing};

/// A commutative ring used as an evaluation context.
pub trait Ring {
    /// Element type.
    type E: Clone;
    /// Zero.
    fn zero(&self) -> Self::E;
    /// One.
    fn one(&self) -> Self::E;
    /// Image of an integer.
    fn from_i64(&self, v: i64) -> Self::E;
    /// Sum.
    fn add(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Difference.
    fn sub(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Product.
    fn mul(&self, a: &Self::E, b: &Self::E) -> Self::E;
    /// Square.
    fn sqr(&self, a: &Self::E) -> Self::E {
        self.mul(a, a)
    }
}

/// A field viewed as a ring.
pub struct FieldRing<'a, F: Field>(pub &'a F);

impl<F: Field> Ring for FieldRing<'_, F> {
    type E = F::Elem;
    fn zero(&self) -> F::Elem {
        self.0.zero()
    }
    fn one(&self) -> F::Elem {
        self.0.one()
    }
    fn from_i64(&self, v: i64) -> F::Elem {
        self.0.from_i64(v)
    }
    fn add(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.add(a, b)
    }
    fn sub(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.sub(a, b)
    }
    fn mul(&self, a: &F::Elem, b: &F::Elem) -> F::Elem {
        self.0.mul(a, b)
    }
}

impl<F: Field> Ring for PolyRing<'_, F> {
    type E = Poly<F>;
    fn zero(&self) -> Poly<F> {
        Vec::new()
    }
    fn one(&self) -> Poly<F> {
        vec![self.f.one()]
    }
    fn from_i64(&self, v: i64) -> Poly<F> {
        self.from_i64s(&[v])
    }
    fn add(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        PolyRing::add(self, a, b)
    }
    fn sub(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        PolyRing::sub(self, a, b)
    }
    fn mul(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        PolyRing::mul(self, a, b)
    }
}

/// F[x]/(m) for a nonzero polynomial m.
pub struct QuotientRing<'a, F: Field> {
    /// Polynomial arithmetic.
    pub r: PolyRing<'a, F>,
    /// Modulus.
    pub m: Poly<F>,
}

impl<F: Field> Ring for QuotientRing<'_, F> {
    type E = Poly<F>;
    fn zero(&self) -> Poly<F> {
        Vec::new()
    }
    fn one(&self) -> Poly<F> {
        self.r.rem(&[self.r.f.one()], &self.m)
    }
    fn from_i64(&self, v: i64) -> Poly<F> {
        self.r.rem(&self.r.from_i64s(&[v]), &self.m)
    }
    fn add(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.r.add(a, b)
    }
    fn sub(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.r.sub(a, b)
    }
    fn mul(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.r.mulmod(a, b, &self.m)
    }
}

/// The values f_0, …, f_n at x, together with F = 4(x³ + a4·x + a6).
pub fn division_sequence<R: Ring>(r: &R, x: &R::E, a4: &R::E, a6: &R::E, n: usize) -> (Vec<R::E>, R::E) {
    let x2 = r.sqr(x);
    let x3 = r.mul(&x2, x);
    let big_f = r.mul(&r.from_i64(4), &r.add(&r.add(&x3, &r.mul(a4, x)), a6));
    let c = |v: i64| r.from_i64(v);
    let a42 = r.sqr(a4);
    let mut f: Vec<R::E> = Vec::with_capacity(n.max(4) + 1);
    f.push(r.zero());
    f.push(r.one());
    f.push(r.one());
    // 3x⁴ + 6a4x² + 12a6x − a4²
    let x4 = r.sqr(&x2);
    let f3 = r.sub(
        &r.add(&r.add(&r.mul(&c(3), &x4), &r.mul(&c(6), &r.mul(a4, &x2))), &r.mul(&c(12), &r.mul(a6, x))),
        &a42,
    );
    f.push(f3);
    // 2(x⁶ + 5a4x⁴ + 20a6x³ − 5a4²x² − 4a4a6x − 8a6² − a4³)
    let x6 = r.mul(&x4, &x2);
    let terms = [
        x6,
        r.mul(&c(5), &r.mul(a4, &x4)),
        r.mul(&c(20), &r.mul(a6, &x3)),
        r.mul(&c(-5), &r.mul(&a42, &x2)),
        r.mul(&c(-4), &r.mul(&r.mul(a4, a6), x)),
        r.mul(&c(-8), &r.sqr(a6)),
        r.mul(&c(-1), &r.mul(&a42, a4)),
    ];
    let mut f4 = r.zero();
    for t in &terms {
        f4 = r.add(&f4, t);
    }
    f.push(r.mul(&c(2), &f4));
    let ff2 = r.sqr(&big_f);
    for k in 5..=n {
        let m = k / 2;
        let v = if k % 2 == 0 {
            let a = r.mul(&f[m + 2], &r.sqr(&f[m - 1]));
            let b = r.mul(&f[m - 2], &r.sqr(&f[m + 1]));
            r.mul(&f[m], &r.sub(&a, &b))
        } else {
            let a = r.mul(&f[m + 2], &r.mul(&r.sqr(&f[m]), &f[m]));
            let b = r.mul(&f[m - 1], &r.mul(&r.sqr(&f[m + 1]), &f[m + 1]));
            if m % 2 == 0 {
                r.sub(&r.mul(&ff2, &a), &b)
            } else {
                r.sub(&a, &r.mul(&ff2, &b))
            }
        };
        f.push(v);
    }
    f.truncate(n + 1);
    (f, big_f)
}

/// x([m]P) as (numerator, denominator) for every m in 1..=m_max, from one
/// division sequence.
pub fn mult_x_all<R: Ring>(r: &R, x: &R::E, a4: &R::E, a6: &R::E, m_max: usize) -> Vec<(R::E, R::E)> {
    let (f, big_f) = division_sequence(r, x, a4, a6, (m_max + 1).max(2));
    (1..=m_max)
        .map(|m| {
            let fm2 = r.sqr(&f[m]);
            let prod = r.mul(&f[m - 1], &f[m + 1]);
            if m % 2 == 1 {
                (r.sub(&r.mul(x, &fm2), &r.mul(&big_f, &prod)), fm2)
            } else {
                let den = r.mul(&big_f, &fm2);
                (r.sub(&r.mul(x, &den), &prod), den)
            }
        })
        .collect()
}

/// x([m]P) as (numerator, denominator) in the ring, from x = x(P).
pub fn mult_x<R: Ring>(r: &R, x: &R::E, a4: &R::E, a6: &R::E, m: usize) -> (R::E, R::E) {
    assert!(m >= 1);
    mult_x_all(r, x, a4, a6, m).pop().unwrap()
}

/// The n-division polynomial in x: f_n for odd n and F·f_n for even n, so
/// that its roots are the x-coordinates of the nonzero n-torsion points.
pub fn division_polynomial<F: Field>(e: &Curve<F>, n: usize) -> Poly<F> {
    assert!(n >= 1);
    let r = PolyRing::new(&e.f);
    let x = r.x();
    let a4 = r.constant(e.a4.clone());
    let a6 = r.constant(e.a6.clone());
    let (f, big_f) = division_sequence(&r, &x, &a4, &a6, n.max(2));
    if n % 2 == 1 {
        f[n].clone()
    } else {
        r.mul(&big_f, &f[n])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::Point;
    use crate::ff::Fp;

    #[test]
    fn psi3_closed_form() {
        let f = Fp::new(101);
        let e = Curve::from_i64(&f, 7, 11).unwrap();
        let r = PolyRing::new(&f);
        assert_eq!(division_polynomial(&e, 3), r.from_i64s(&[-49, 12 * 11, 6 * 7, 0, 3]));
        assert_eq!(division_polynomial(&e, 2), r.from_i64s(&[44, 28, 0, 4]));
    }

    #[test]
    fn degrees_and_torsion_roots() {
        let f = Fp::new(61);
        let e = Curve::from_i64(&f, 3, 5).unwrap();
        let r = PolyRing::new(&f);
        let pts = e.points();
        for n in [3usize, 5, 7, 4, 6] {
            let psi = division_polynomial(&e, n);
            if n % 2 == 1 {
                assert_eq!(psi.len() - 1, (n * n - 1) / 2);
            }
            for pt in &pts {
                if let Point::Aff(x, _) = pt {
                    if e.mul_i64(pt, n as i64).is_inf() {
                        assert_eq!(r.eval(&psi, x), 0, "n = {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn x_multiplication() {
        let f = Fp::new(97);
        let e = Curve::from_i64(&f, 2, 3).unwrap();
        let fr = FieldRing(&f);
        for pt in e.points().into_iter().skip(1).take(20) {
            let Point::Aff(x, _) = &pt else { unreachable!() };
            for m in 1..8usize {
                let (num, den) = mult_x(&fr, x, &e.a4, &e.a6, m);
                match e.mul_i64(&pt, m as i64) {
                    Point::Inf => assert_eq!(den, 0),
                    Point::Aff(xm, _) => assert_eq!(f.div(&num, &den), xm),
                }
            }
        }
    }
}
