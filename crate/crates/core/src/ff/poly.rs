//! Dense univariate polynomials over a [`Field`], low degree first.
//!
//! The zero polynomial is the empty vector; every other polynomial has a
//! nonzero last coefficient.

use num_bigint::BigUint;

use super::Field;

/// Polynomial with coefficients in `F`, low degree first.
pub type Poly<F> = Vec<<F as Field>::Elem>;

/// Polynomial arithmetic over a borrowed field context.
#[derive(Clone, Copy, Debug)]
pub struct PolyRing<'a, F: Field> {
    /// Coefficient field.
    pub f: &'a F,
}

impl<'a, F: Field> PolyRing<'a, F> {
    /// Ring over `f`.
    pub fn new(f: &'a F) -> Self {
        PolyRing { f }
    }

    /// Strip trailing zeros.
    pub fn normalized(&self, mut a: Poly<F>) -> Poly<F> {
        while a.last().is_some_and(|c| self.f.is_zero(c)) {
            a.pop();
        }
        a
    }

    /// Degree, `None` for zero.
    pub fn deg(&self, a: &[F::Elem]) -> Option<usize> {
        a.len().checked_sub(1)
    }

    /// The constant polynomial c.
    pub fn constant(&self, c: F::Elem) -> Poly<F> {
        self.normalized(vec![c])
    }

    /// The polynomial x.
    pub fn x(&self) -> Poly<F> {
        vec![self.f.zero(), self.f.one()]
    }

    /// The monomial x^n.
    pub fn monomial(&self, n: usize) -> Poly<F> {
        let mut v = vec![self.f.zero(); n + 1];
        v[n] = self.f.one();
        v
    }

    /// x − c.
    pub fn linear(&self, c: &F::Elem) -> Poly<F> {
        vec![self.f.neg(c), self.f.one()]
    }

    /// Polynomial from integer coefficients.
    pub fn from_i64s(&self, c: &[i64]) -> Poly<F> {
        self.normalized(c.iter().map(|&v| self.f.from_i64(v)).collect())
    }

    /// Sum.
    pub fn add(&self, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
        let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
        let mut out: Poly<F> = long.to_vec();
        for (o, s) in out.iter_mut().zip(short) {
            *o = self.f.add(o, s);
        }
        self.normalized(out)
    }

    /// Difference.
    pub fn sub(&self, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
        let n = a.len().max(b.len());
        let z = self.f.zero();
        let out = (0..n)
            .map(|i| self.f.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
            .collect();
        self.normalized(out)
    }

    /// Negation.
    pub fn neg(&self, a: &[F::Elem]) -> Poly<F> {
        a.iter().map(|c| self.f.neg(c)).collect()
    }

    /// Scalar multiple.
    pub fn scale(&self, a: &[F::Elem], c: &F::Elem) -> Poly<F> {
        self.normalized(a.iter().map(|x| self.f.mul(x, c)).collect())
    }

    /// Product (schoolbook).
    pub fn mul(&self, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.f.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.f.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.f.add(&out[i + j], &self.f.mul(x, y));
            }
        }
        self.normalized(out)
    }

    /// Square.
    pub fn sqr(&self, a: &[F::Elem]) -> Poly<F> {
        self.mul(a, a)
    }

    /// Quotient and remainder; panics if `b` is zero.
    pub fn divrem(&self, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F>, Poly<F>) {
        assert!(!b.is_empty(), "division by the zero polynomial");
        if a.len() < b.len() {
            return (Vec::new(), a.to_vec());
        }
        let db = b.len() - 1;
        let lead_inv = self.f.inv(&b[db]).unwrap();
        let monic = self.f.is_one(&b[db]);
        let mut r: Poly<F> = a.to_vec();
        let mut q = vec![self.f.zero(); a.len() - db];
        for i in (db..r.len()).rev() {
            if self.f.is_zero(&r[i]) {
                continue;
            }
            let c = if monic { r[i].clone() } else { self.f.mul(&r[i], &lead_inv) };
            for j in 0..db {
                let t = self.f.mul(&c, &b[j]);
                r[i - db + j] = self.f.sub(&r[i - db + j], &t);
            }
            r[i] = self.f.zero();
            q[i - db] = c;
        }
        r.truncate(db);
        (self.normalized(q), self.normalized(r))
    }

    /// Remainder.
    pub fn rem(&self, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
        self.divrem(a, b).1
    }

    /// Exact quotient (asserts zero remainder in debug builds).
    pub fn div_exact(&self, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
        let (q, r) = self.divrem(a, b);
        debug_assert!(r.is_empty(), "inexact division");
        q
    }

    /// Product modulo m.
    pub fn mulmod(&self, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Poly<F> {
        self.rem(&self.mul(a, b), m)
    }

    /// Monic associate (zero stays zero).
    pub fn monic(&self, a: &[F::Elem]) -> Poly<F> {
        match a.last() {
            None => Vec::new(),
            Some(l) => {
                let li = self.f.inv(l).unwrap();
                self.scale(a, &li)
            }
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
        let (mut x, mut y) = (a.to_vec(), b.to_vec());
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Extended gcd (g, s, t) with s·a + t·b = g (g not normalized).
    pub fn xgcd(&self, a: &[F::Elem], b: &[F::Elem]) -> (Poly<F>, Poly<F>, Poly<F>) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1) = (vec![self.f.one()], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![self.f.one()]);
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1);
            let s = self.sub(&s0, &self.mul(&q, &s1));
            let t = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        (r0, s0, t0)
    }

    /// Inverse of a modulo m, if it exists.
    pub fn invmod(&self, a: &[F::Elem], m: &[F::Elem]) -> Option<Poly<F>> {
        let (g, s, _) = self.xgcd(&self.rem(a, m), m);
        if g.len() != 1 {
            return None;
        }
        let gi = self.f.inv(&g[0]).unwrap();
        Some(self.rem(&self.scale(&s, &gi), m))
    }

    /// a^e mod m.
    pub fn powmod(&self, a: &[F::Elem], e: &BigUint, m: &[F::Elem]) -> Poly<F> {
        let base = self.rem(a, m);
        let mut r = self.rem(&[self.f.one()], m);
        for i in (0..e.bits()).rev() {
            r = self.mulmod(&r, &r, m);
            if e.bit(i) {
                r = self.mulmod(&r, &base, m);
            }
        }
        r
    }

    /// Value at a point (Horner).
    pub fn eval(&self, a: &[F::Elem], x: &F::Elem) -> F::Elem {
        let mut acc = self.f.zero();
        for c in a.iter().rev() {
            acc = self.f.add(&self.f.mul(&acc, x), c);
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self, a: &[F::Elem]) -> Poly<F> {
        let out = a.iter().enumerate().skip(1).map(|(i, c)| self.f.mul_i64(c, i as i64)).collect();
        self.normalized(out)
    }

    /// Composition a(b).
    pub fn compose(&self, a: &[F::Elem], b: &[F::Elem]) -> Poly<F> {
        let mut acc: Poly<F> = Vec::new();
        for c in a.iter().rev() {
            acc = self.add(&self.mul(&acc, b), &[c.clone()]);
        }
        acc
    }

    /// Composition a(b) mod m.
    pub fn compose_mod(&self, a: &[F::Elem], b: &[F::Elem], m: &[F::Elem]) -> Poly<F> {
        let mut acc: Poly<F> = Vec::new();
        for c in a.iter().rev() {
            acc = self.add(&self.mulmod(&acc, b, m), &[c.clone()]);
        }
        self.normalized(acc)
    }

    /// ∏ (x − r) over the given roots.
    pub fn from_roots(&self, roots: &[F::Elem]) -> Poly<F> {
        let mut acc = vec![self.f.one()];
        for r in roots {
            acc = self.mul(&acc, &self.linear(r));
        }
        acc
    }

    /// Apply a coefficient map.
    pub fn map_coeffs(&self, a: &[F::Elem], g: impl Fn(&F::Elem) -> F::Elem) -> Poly<F> {
        self.normalized(a.iter().map(g).collect())
    }

    /// Coefficient-wise p^i Frobenius.
    pub fn frob(&self, a: &[F::Elem], i: usize) -> Poly<F> {
        a.iter().map(|c| self.f.frob(c, i)).collect()
    }
}
