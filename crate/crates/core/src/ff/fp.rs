//! Prime fields with machine-word elements.

use rand::RngCore;

use super::Field;

/// The prime field F_p for an odd prime p < 2^32.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Prime field of characteristic `p`; panics if p is not an odd prime below 2^32.
    pub fn new(p: u64) -> Self {
        assert!(p > 2 && p < (1 << 32) && crate::util::is_prime(p), "bad prime {p}");
        Fp { p }
    }
}

impl Field for Fp {
    type Elem = u64;

    fn p(&self) -> u64 {
        self.p
    }
    fn degree(&self) -> usize {
        1
    }
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }
    fn from_coeffs(&self, c: &[u64]) -> u64 {
        c.first().map_or(0, |&v| v % self.p)
    }
    fn coeffs(&self, a: &u64) -> Vec<u64> {
        vec![*a]
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a % self.p == 0 {
            return None;
        }
        let (mut r0, mut r1) = (self.p as i64, (*a % self.p) as i64);
        let (mut s0, mut s1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        Some(s0.rem_euclid(self.p as i64) as u64)
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn frob(&self, a: &u64, _i: usize) -> u64 {
        *a
    }
    fn random(&self, rng: &mut dyn RngCore) -> u64 {
        rng.next_u64() % self.p
    }
    fn quadratic_character(&self, a: &u64) -> i8 {
        if *a % self.p == 0 {
            return 0;
        }
        if self.pow_u64(a, (self.p - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_character() {
        let f = Fp::new(13);
        for a in 1..13 {
            assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
        }
        let squares: Vec<u64> = (1..13u64).map(|a| a * a % 13).collect();
        for a in 1..13u64 {
            assert_eq!(f.quadratic_character(&a) == 1, squares.contains(&a));
        }
        assert_eq!(f.from_i64(-1), 12);
    }

    #[test]
    fn sqrt_roundtrip() {
        let f = Fp::new(97);
        for a in 0..97u64 {
            match f.sqrt(&a) {
                Some(s) => assert_eq!(f.sqr(&s), a),
                None => assert_eq!(f.quadratic_character(&a), -1),
            }
        }
    }
}
