//! Trace of Frobenius: character sums for small fields, Lucas sequences for
//! curves defined over the prime field, baby-step giant-step otherwise.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{least_non_square, quadratic_twist, Curve, Point, Pt};
use crate::ff::{Field, Fp, DEFAULT_SEED};
use crate::util::{factor_u64, lcm};

const ENUM_LIMIT: u128 = 10_000;

/// The trace a with #E(F_q) = q + 1 − a.
pub fn trace_of_frobenius<F: Field>(e: &Curve<F>) -> i64 {
    let f = &e.f;
    let q = f.order_u128();
    assert!(q < 1 << 40, "field too large for point counting");
    if q <= ENUM_LIMIT {
        let s: i64 = f.elements().iter().map(|x| f.quadratic_character(&e.rhs(x)) as i64).sum();
        return -s;
    }
    let k = f.degree();
    let (c4, c6) = (f.coeffs(&e.a4), f.coeffs(&e.a6));
    if k > 1 && c4[1..].iter().chain(&c6[1..]).all(|&c| c == 0) {
        let fp = Fp::new(f.p());
        let ep = Curve::new(&fp, c4[0], c6[0]).unwrap();
        let a = trace_of_frobenius(&ep);
        return trace_over_extension(a, f.p(), k).to_i64().unwrap();
    }
    bsgs_trace(e)
}

/// Trace over F_{q^k} from the trace a over F_q (Lucas sequence).
pub fn trace_over_extension(a: i64, q: u64, k: usize) -> BigInt {
    let (a, q) = (BigInt::from(a), BigInt::from(q));
    let mut prev = BigInt::from(2);
    let mut cur = a.clone();
    for _ in 1..k {
        let next = &a * &cur - &q * &prev;
        prev = cur;
        cur = next;
    }
    if k == 0 {
        prev
    } else {
        cur
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Some m in [lo, hi] with m·P = O.
fn bsgs_annihilator<F: Field>(e: &Curve<F>, pt: &Pt<F>, lo: u64, hi: u64) -> Option<u64> {
    let w = hi - lo + 1;
    let s = isqrt(w) + 1;
    let mut baby: HashMap<F::Elem, u64> = HashMap::new();
    let mut cur: Pt<F> = Point::Inf;
    for j in 0..=s {
        match &cur {
            Point::Inf => {
                if e.mul_big(pt, &BigUint::from(lo)).is_inf() {
                    return Some(lo);
                }
            }
            Point::Aff(x, _) => {
                baby.entry(x.clone()).or_insert(j);
            }
        }
        cur = e.add(&cur, pt);
    }
    let step = e.mul_big(pt, &BigUint::from(s));
    let mut g = e.mul_big(pt, &BigUint::from(lo));
    let mut i = 0;
    while i * s <= w + s {
        if let Point::Aff(x, _) = &g {
            if let Some(&j) = baby.get(x) {
                let base = lo + i * s;
                for m in [base + j, base.wrapping_sub(j)] {
                    if m >= lo && m <= hi && e.mul_big(pt, &BigUint::from(m)).is_inf() {
                        return Some(m);
                    }
                }
            }
        } else {
            let m = lo + i * s;
            if m <= hi {
                return Some(m);
            }
        }
        g = e.add(&g, &step);
        i += 1;
    }
    None
}

fn point_order<F: Field>(e: &Curve<F>, pt: &Pt<F>, multiple: u64) -> u64 {
    let mut ord = multiple;
    for (r, _) in factor_u64(multiple) {
        while ord % r == 0 && e.mul_big(pt, &BigUint::from(ord / r)).is_inf() {
            ord /= r;
        }
    }
    ord
}

fn bsgs_trace<F: Field>(e: &Curve<F>) -> i64 {
    let f = &e.f;
    let q = f.order_u128() as u64;
    let r = 2 * isqrt(q) + 2;
    let (lo, hi) = (q + 1 - r.min(q), q + 1 + r);
    let tw = quadratic_twist(e, &least_non_square(f)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let (mut l1, mut l2) = (1u64, 1u64);
    for _ in 0..64 {
        for (curve, l) in [(e, &mut l1), (&tw, &mut l2)] {
            let pt = curve.random_point(&mut rng);
            let m = bsgs_annihilator(curve, &pt, lo, hi).expect("group order in Hasse interval");
            *l = lcm(*l, point_order(curve, &pt, m));
        }
        // candidates N for E: l1 | N and l2 | 2q + 2 − N
        let mut cands = Vec::new();
        let mut n = lo.div_ceil(l1) * l1;
        while n <= hi {
            if (2 * q + 2 - n) % l2 == 0 {
                cands.push(n);
            }
            n += l1;
        }
        if cands.len() == 1 {
            return (q + 1) as i64 - cands[0] as i64;
        }
    }
    panic!("point counting did not converge");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{make_ext, Fq};

    #[test]
    fn supersingular_examples() {
        let f13 = Fp::new(13);
        assert_eq!(trace_of_frobenius(&Curve::from_i64(&f13, 1, 4).unwrap()), 0);
        let f11 = Fp::new(11);
        assert_eq!(trace_of_frobenius(&Curve::from_i64(&f11, 0, 1).unwrap()), 0);
    }

    #[test]
    fn bsgs_matches_enumeration() {
        // q = 10007 is above the enumeration limit; compare against a direct sum
        let f = Fq::prime(10007);
        for (a4, a6) in [(1, 1), (2, 3), (5, 0), (0, 7)] {
            let e = Curve::from_i64(&f, a4, a6).unwrap();
            let direct: i64 = -f.elements().iter().map(|x| f.quadratic_character(&e.rhs(x)) as i64).sum::<i64>();
            assert_eq!(bsgs_trace(&e), direct);
            assert_eq!(trace_of_frobenius(&e), direct);
        }
    }

    #[test]
    fn lucas_matches_extension_count() {
        let f = Fq::prime(11);
        let e = Curve::from_i64(&f, 1, 3).unwrap();
        let a = trace_of_frobenius(&e);
        let k = make_ext(11, 3).unwrap();
        let ek = Curve::from_i64(&k, 1, 3).unwrap();
        let direct: i64 = -k.elements().iter().map(|x| k.quadratic_character(&ek.rhs(x)) as i64).sum::<i64>();
        assert_eq!(trace_over_extension(a, 11, 3), BigInt::from(direct));
    }
}
