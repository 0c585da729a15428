//! Exact arithmetic in O_F[X]/(g) for a monic g, used to check that a
//! recognized kernel polynomial divides the division polynomial.
//!
//! An integer of F = Q(√Δ) is stored as (X, Y) meaning (X + Y·√Δ)/2.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::ec::divpoly::{division_sequence, Ring};

type Of = (BigInt, BigInt);

/// O_F[X]/(g) with g monic, elements as coefficient vectors of length deg g.
pub(super) struct OfQuotient {
    delta: BigInt,
    g: Vec<Of>,
}

fn of_mul(delta: &BigInt, a: &Of, b: &Of) -> Of {
    let x = &a.0 * &b.0 + &a.1 * &b.1 * delta;
    let y = &a.0 * &b.1 + &a.1 * &b.0;
    (x / 2, y / 2)
}

fn of_add(a: &Of, b: &Of) -> Of {
    (&a.0 + &b.0, &a.1 + &b.1)
}

fn of_sub(a: &Of, b: &Of) -> Of {
    (&a.0 - &b.0, &a.1 - &b.1)
}

fn of_zero() -> Of {
    (BigInt::zero(), BigInt::zero())
}

impl OfQuotient {
    /// The ring for the monic g given as (X, Y) pairs, lowest degree first.
    pub(super) fn new(delta: i64, g: Vec<Of>) -> Self {
        OfQuotient { delta: BigInt::from(delta), g }
    }

    fn d(&self) -> usize {
        self.g.len() - 1
    }

    fn reduce(&self, mut a: Vec<Of>) -> Vec<Of> {
        let d = self.d();
        for k in (d..a.len()).rev() {
            let c = std::mem::replace(&mut a[k], of_zero());
            if c.0.is_zero() && c.1.is_zero() {
                continue;
            }
            for i in 0..d {
                let t = of_mul(&self.delta, &c, &self.g[i]);
                a[k - d + i] = of_sub(&a[k - d + i], &t);
            }
        }
        a.truncate(d);
        a.resize(d, of_zero());
        a
    }

    /// The class of X.
    pub(super) fn x(&self) -> Vec<Of> {
        self.reduce(vec![of_zero(), (BigInt::from(2), BigInt::zero())])
    }

    /// The class of a constant.
    pub(super) fn constant(&self, c: Of) -> Vec<Of> {
        self.reduce(vec![c])
    }

    /// Whether g divides ψ_n of y² = x³ + a4·x + a6 (n odd).
    pub(super) fn divides_division_polynomial(&self, a4: Of, a6: Of, n: usize) -> bool {
        let x = self.x();
        let (a4, a6) = (self.constant(a4), self.constant(a6));
        let (f, _) = division_sequence(self, &x, &a4, &a6, n);
        f[n].iter().all(|c| c.0.is_zero() && c.1.is_zero())
    }
}

impl Ring for OfQuotient {
    type E = Vec<Of>;
    fn zero(&self) -> Vec<Of> {
        vec![of_zero(); self.d()]
    }
    fn one(&self) -> Vec<Of> {
        self.from_i64(1)
    }
    fn from_i64(&self, v: i64) -> Vec<Of> {
        self.constant((BigInt::from(2 * v), BigInt::zero()))
    }
    fn add(&self, a: &Vec<Of>, b: &Vec<Of>) -> Vec<Of> {
        a.iter().zip(b).map(|(x, y)| of_add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<Of>, b: &Vec<Of>) -> Vec<Of> {
        a.iter().zip(b).map(|(x, y)| of_sub(x, y)).collect()
    }
    fn mul(&self, a: &Vec<Of>, b: &Vec<Of>) -> Vec<Of> {
        let d = self.d();
        let mut prod = vec![of_zero(); (2 * d).max(1)];
        for (i, x) in a.iter().enumerate() {
            if x.0.is_zero() && x.1.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = of_add(&prod[i + j], &of_mul(&self.delta, x, y));
            }
        }
        self.reduce(prod)
    }
}
