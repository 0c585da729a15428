//! Exact arithmetic in F_p and F_{p^k}, univariate polynomials over them,
//! factorization and root extraction.
//!
//! A field is a runtime context implementing [`Field`]; elements are plain
//! values and every operation goes through the context.

mod ext;
mod factor;
mod fp;
mod fq;
pub mod poly;

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigUint;
use rand::RngCore;

pub use ext::{make_ext, Embedding};
pub use factor::{
    ddf, edf, factor, factor_with_rng, is_irreducible, roots, roots_with_rng, squarefree,
    DEFAULT_SEED,
};
pub use fp::Fp;
pub use fq::{Fe, Fq};
pub use poly::{Poly, PolyRing};

/// A finite field of odd characteristic, used as an arithmetic context.
pub trait Field: Clone + Debug + PartialEq + Send + Sync {
    /// Element representation.
    type Elem: Clone + Debug + PartialEq + Eq + Hash + Ord + Send + Sync;

    /// Characteristic.
    fn p(&self) -> u64;
    /// Degree over the prime field.
    fn degree(&self) -> usize;
    /// Additive identity.
    fn zero(&self) -> Self::Elem;
    /// Multiplicative identity.
    fn one(&self) -> Self::Elem;
    /// Image of an integer.
    fn from_i64(&self, v: i64) -> Self::Elem;
    /// Element from coefficients over F_p, low degree first (reduced).
    fn from_coeffs(&self, c: &[u64]) -> Self::Elem;
    /// Coefficients over F_p, low degree first, length `degree()`.
    fn coeffs(&self, a: &Self::Elem) -> Vec<u64>;
    /// Sum.
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Difference.
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Product.
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Negation.
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    /// Zero test.
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// The p^i-power Frobenius.
    fn frob(&self, a: &Self::Elem, i: usize) -> Self::Elem;
    /// Uniform random element.
    fn random(&self, rng: &mut dyn RngCore) -> Self::Elem;

    /// Number of elements.
    fn order(&self) -> BigUint {
        BigUint::from(self.p()).pow(self.degree() as u32)
    }
    /// Number of elements as u128 (saturating).
    fn order_u128(&self) -> u128 {
        let mut q: u128 = 1;
        for _ in 0..self.degree() {
            q = q.saturating_mul(self.p() as u128);
        }
        q
    }
    /// One test.
    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }
    /// Square.
    fn sqr(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }
    /// Quotient; panics on division by zero.
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul(a, &self.inv(b).expect("division by zero"))
    }
    /// Multiple by an integer.
    fn mul_i64(&self, a: &Self::Elem, k: i64) -> Self::Elem {
        self.mul(a, &self.from_i64(k))
    }
    /// Power with a big exponent.
    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.sqr(&r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }
    /// Power with a machine exponent.
    fn pow_u64(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.sqr(&b);
            e >>= 1;
        }
        r
    }
    /// x^q for q a power of the characteristic, by repeated squaring.
    fn frobenius(&self, a: &Self::Elem, q: &BigUint) -> Self::Elem {
        self.pow(a, q)
    }
    /// Quadratic character in {-1, 0, 1}.
    fn quadratic_character(&self, a: &Self::Elem) -> i8 {
        if self.is_zero(a) {
            return 0;
        }
        let e: BigUint = (self.order() - 1u32) >> 1;
        if self.is_one(&self.pow(a, &e)) {
            1
        } else {
            -1
        }
    }
    /// A square root, `None` for non-squares. Deterministic for a given input.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if self.quadratic_character(a) != 1 {
            return None;
        }
        // Split y^2 - a by computing (y + r)^((q-1)/2) in F[y]/(y^2 - a).
        let e: BigUint = (self.order() - 1u32) >> 1;
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(DEFAULT_SEED);
        loop {
            let r = self.random(&mut rng);
            let (mut u0, mut u1) = (self.one(), self.zero());
            for i in (0..e.bits()).rev() {
                let s0 = self.add(&self.sqr(&u0), &self.mul(a, &self.sqr(&u1)));
                let s1 = self.mul_i64(&self.mul(&u0, &u1), 2);
                u0 = s0;
                u1 = s1;
                if e.bit(i) {
                    let t0 = self.add(&self.mul(&u0, &r), &self.mul(a, &u1));
                    let t1 = self.add(&u0, &self.mul(&u1, &r));
                    u0 = t0;
                    u1 = t1;
                }
            }
            // (y + r)^e = u0 + u1 y; if it equals 1 on one root and -1 on the
            // other, gcd gives y = (1 - u0)/u1.
            if self.is_zero(&u1) {
                continue;
            }
            let cand = self.div(&self.sub(&self.one(), &u0), &u1);
            if self.sqr(&cand) == *a {
                return Some(self.canonical_sqrt(cand));
            }
            let cand = self.div(&self.neg(&self.add(&self.one(), &u0)), &u1);
            if self.sqr(&cand) == *a {
                return Some(self.canonical_sqrt(cand));
            }
        }
    }
    /// The smaller (in element order) of `s` and `-s`.
    fn canonical_sqrt(&self, s: Self::Elem) -> Self::Elem {
        let n = self.neg(&s);
        if n < s {
            n
        } else {
            s
        }
    }
    /// All elements, for small fields only.
    fn elements(&self) -> Vec<Self::Elem> {
        let q = self.order_u128();
        assert!(q <= 1 << 24, "field too large to enumerate");
        let p = self.p();
        let k = self.degree();
        let mut out = Vec::with_capacity(q as usize);
        let mut c = vec![0u64; k];
        for _ in 0..q {
            out.push(self.from_coeffs(&c));
            for d in c.iter_mut() {
                *d += 1;
                if *d < p {
                    break;
                }
                *d = 0;
            }
        }
        out
    }
    /// Multiplicative order of a nonzero element (fields with q < 2^64).
    fn mult_order(&self, a: &Self::Elem) -> u64 {
        let n = u64::try_from(self.order_u128() - 1).expect("field too large");
        let mut ord = n;
        for (r, _) in crate::util::factor_u64(n) {
            while ord % r == 0 && self.is_one(&self.pow_u64(a, ord / r)) {
                ord /= r;
            }
        }
        ord
    }
    /// Whether the element lies in the subfield of degree `d`.
    fn in_subfield(&self, a: &Self::Elem, d: usize) -> bool {
        self.frob(a, d) == *a
    }
    /// Absolute trace down to F_p.
    fn trace_to_prime(&self, a: &Self::Elem) -> u64 {
        let mut s = a.clone();
        let mut t = a.clone();
        for _ in 1..self.degree() {
            t = self.frob(&t, 1);
            s = self.add(&s, &t);
        }
        self.coeffs(&s)[0]
    }
}

/// Legendre symbol (a/p) for an odd prime p, via Euler's criterion.
pub fn legendre(a: i64, p: u64) -> i8 {
    let f = Fp::new(p);
    f.quadratic_character(&f.from_i64(a))
}

/// Reduce a signed integer into [0, p).
pub fn modp(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Modular inverse of a mod p (p prime, a not divisible by p).
pub fn inv_mod(a: u64, p: u64) -> u64 {
    crate::util::inv_mod(a, p)
}

/// q as a big integer power of p.
pub fn big_pow(p: u64, k: usize) -> BigUint {
    BigUint::from(p).pow(k as u32)
}
