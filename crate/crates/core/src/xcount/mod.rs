//! Closed-form sizes of the fibers X_j of X(F_ℓ) → P¹(F_ℓ), the total
//! #X(F_ℓ), and the scan for distinct CM points with equal reductions.

mod scan;

use crate::ec::{curve_from_j, trace_of_frobenius, Curve};
use crate::error::{Error, Result};
use crate::ff::{legendre, Field, Fq};
use crate::isog::count_rational_p_isogenies;
use crate::util::{is_prime, order_mod};

pub use scan::{collisions_at, default_threads, injectivity_scan, injectivity_scan_with, CollisionRecord};

/// Position of j in P¹(F_ℓ) as far as the table is concerned.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JKind {
    /// The cusp ∞.
    Infinity,
    /// j = 0.
    Zero,
    /// j = 1728.
    T1728,
    /// Any other j.
    Other,
}

/// Data selecting a table row for one curve with the given j.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiberInput {
    /// Kind of j.
    pub j: JKind,
    /// Level.
    pub p: u64,
    /// Characteristic.
    pub ell: u64,
    /// Integer trace of Frobenius (unused at ∞).
    pub a: i64,
}

impl FiberInput {
    /// Trace mod p.
    pub fn a_mod(&self) -> u64 {
        self.a.rem_euclid(self.p as i64) as u64
    }

    /// δ = ((a² − 4ℓ)/p).
    pub fn delta(&self) -> i8 {
        legendre(self.a * self.a - 4 * self.ell as i64, self.p)
    }
}

/// #X_j from the table, first matching row from the top. `i` yields the
/// number of rational p-isogenies and is only called when a row needs it.
pub fn fiber_row(inp: &FiberInput, i: &mut dyn FnMut() -> Result<u64>) -> Result<u64> {
    let (p, l) = (inp.p, inp.ell);
    let a = inp.a_mod();
    let d = inp.delta();
    let a2 = a * a % p;
    let lp = l % p;
    let no_row = || Error::NoRow(format!("{inp:?}"));
    Ok(match inp.j {
        JKind::Infinity => {
            if lp == 1 || lp == p - 1 {
                (p - 1) / 2
            } else {
                0
            }
        }
        JKind::Zero => {
            if l % 3 == 2 {
                match d {
                    1 => (p - 1) / 2,
                    -1 => (p + 3) / 2,
                    _ => return Err(no_row()),
                }
            } else if p % 3 == 1 {
                if a == 0 || a2 == 3 * lp % p {
                    (p - 1) / 6
                } else if a2 == lp || a2 == 4 * lp % p {
                    p * (p - 1) / 6
                } else {
                    0
                }
            } else if a == 0 || a2 == 3 * lp % p {
                (p + 7) / 6
            } else if a2 == lp || a2 == 4 * lp % p {
                (p * p - p + 4) / 6
            } else {
                1
            }
        }
        JKind::T1728 => {
            if p % 4 == 1 {
                match (a != 0, d) {
                    (true, 0) => (p * p - 1) / 4,
                    (true, 1) => 0,
                    (false, -1) => (p + 3) / 2,
                    (false, 1) if l % 4 == 1 => (p * p - 1) / 4,
                    _ => (p - 1) / 2,
                }
            } else {
                match (a != 0, d) {
                    (true, 0) => (p * p + 3) / 4,
                    (true, _) => 1,
                    (false, 1) => (p - 1) / 2,
                    // printed as (p+3)/4, which is not an integer; the geometric count is (p+3)/2
                    (false, -1) if l % 4 == 3 => (p + 3) / 2,
                    _ => (p * p + 3) / 4,
                }
            }
        }
        JKind::Other => match (a != 0, d) {
            (false, 1) => (p - 1) / 2,
            (false, -1) => (p + 3) / 2,
            (true, 1) => 0,
            (true, -1) => 1,
            (true, 0) => {
                let n = i()?;
                if n > 2 {
                    p * (p - 1) / 2
                } else {
                    0
                }
            }
            _ => return Err(no_row()),
        },
    })
}

fn check(p: u64, ell: u64) -> Result<()> {
    if p < 5 || ell < 5 || p == ell || !is_prime(p) || !is_prime(ell) {
        return Err(Error::InvalidParameter(format!("need distinct primes p, ell >= 5, got {p}, {ell}")));
    }
    Ok(())
}

/// A generator of F_ℓ^×.
fn primitive_root(ell: u64) -> u64 {
    (2..ell).find(|&g| order_mod(g, ell) == ell - 1).unwrap_or(1)
}

/// Models of every twist of the curve with j ∈ {0, 1728}, or the single model otherwise.
pub fn twists(f: &Fq, j: u64) -> Vec<Curve<Fq>> {
    let l = f.p();
    let jj = f.from_u64(j % l);
    let base = curve_from_j(f, &jj);
    let n = match base.is_special() {
        Some(0) => 6,
        Some(_) => 4,
        None => return vec![base],
    };
    let g = f.from_u64(primitive_root(l));
    let mut d = f.one();
    let mut out = Vec::new();
    for _ in 0..n {
        let c = match base.is_special() {
            Some(0) => Curve::new(f, f.zero(), d.clone()),
            _ => Curve::new(f, d.clone(), f.zero()),
        };
        out.push(c.expect("nonsingular twist"));
        d = f.mul(&d, &g);
    }
    out
}

/// #X_j for j ∈ F_ℓ (`Some`) or the cusp (`None`).
pub fn fiber_size(p: u64, ell: u64, j: Option<u64>) -> Result<u64> {
    check(p, ell)?;
    let Some(j) = j else {
        return fiber_row(&FiberInput { j: JKind::Infinity, p, ell, a: 0 }, &mut || Ok(0));
    };
    let f = Fq::prime(ell);
    let kind = match j % ell {
        0 => JKind::Zero,
        x if x == 1728 % ell => JKind::T1728,
        _ => JKind::Other,
    };
    let mut value = None;
    for e in twists(&f, j) {
        let inp = FiberInput { j: kind, p, ell, a: trace_of_frobenius(&e) };
        let v = fiber_row(&inp, &mut || count_rational_p_isogenies(&e, p))?;
        match value {
            None => value = Some(v),
            Some(w) if w != v => return Err(Error::NoRow(format!("twists of j = {j} give {w} and {v}"))),
            _ => {}
        }
    }
    value.ok_or_else(|| Error::Invariant("no twist".into()))
}

/// #X(F_ℓ) as the sum of all fiber sizes.
pub fn total_points(p: u64, ell: u64) -> Result<u64> {
    check(p, ell)?;
    let mut total = fiber_size(p, ell, None)?;
    for j in 0..ell {
        total += fiber_size(p, ell, Some(j))?;
    }
    Ok(total)
}

/// The primes dividing some difference of rational CM j-invariants.
pub fn candidate_primes() -> Vec<u64> {
    let mut v: Vec<u64> = (3..=127).filter(|&n| is_prime(n)).collect();
    v.extend([137, 139, 157, 163, 173, 193, 197, 211, 229, 233]);
    v.extend([241, 257, 277, 283, 293, 317, 331, 389, 433, 571, 643, 997]);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_rows() {
        let inp = |j, p, ell, a| FiberInput { j, p, ell, a };
        let never = &mut || -> Result<u64> { panic!("i not needed") };
        assert_eq!(fiber_row(&inp(JKind::Infinity, 5, 11, 0), never).unwrap(), 2);
        assert_eq!(fiber_row(&inp(JKind::T1728, 5, 7, 0), never).unwrap(), 4);
        assert_eq!(fiber_row(&inp(JKind::Other, 7, 13, 0), never).unwrap(), 3);
        assert_eq!(fiber_row(&inp(JKind::Other, 5, 11, 2), &mut || Ok(6)).unwrap(), 10);
        assert_eq!(fiber_row(&inp(JKind::Other, 5, 11, 2), &mut || Ok(1)).unwrap(), 0);
    }

    #[test]
    fn small_totals() {
        assert_eq!(total_points(5, 7).unwrap(), 8);
        assert_eq!(total_points(7, 5).unwrap(), 6);
        assert_eq!(total_points(13, 37).unwrap(), 26);
        assert_eq!(fiber_size(5, 13, Some(5)).unwrap(), 4);
    }

    #[test]
    fn candidate_list() {
        let l = candidate_primes();
        assert!(l.contains(&997) && l.contains(&127) && !l.contains(&131));
        assert_eq!(l.len(), 30 + 10 + 12);
    }
}
