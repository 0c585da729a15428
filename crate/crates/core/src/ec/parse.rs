//! Textual curve specifications.
//!
//! `p=13,k=1,a4=1,a6=4` gives y² = x³ + a4·x + a6 over F_{p^k}; a coefficient
//! may be a bracketed list `[c0,c1,…]` read as c0 + c1·θ + … in the field's
//! generator θ. `a=[a1,a2,a3,a4,a6]` gives a long Weierstrass model instead,
//! which is converted by completing the square and cube. An optional
//! `mod=[m0,…,1]` fixes the modulus of the extension.

use super::Curve;
use crate::error::{Error, Result};
use crate::ff::{make_ext, Fe, Field, Fq};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse { line: 1, msg: msg.into() }
}

/// Split on commas that are not inside brackets.
fn split_top(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_ints(s: &str) -> Result<Vec<i64>> {
    let s = s.trim();
    let inner = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(s);
    split_top(inner)
        .into_iter()
        .map(|t| t.trim().parse::<i64>().map_err(|_| perr(format!("bad integer `{}`", t.trim()))))
        .collect()
}

/// A field element from an integer or an integer list over the generator.
fn parse_elem(f: &Fq, s: &str) -> Result<Fe> {
    let c = parse_ints(s)?;
    if c.len() > f.degree() {
        return Err(perr(format!("coefficient list `{s}` longer than the extension degree")));
    }
    let gen = f.gen();
    let mut acc = f.zero();
    let mut pw = f.one();
    for v in c {
        acc = f.add(&acc, &f.mul(&pw, &f.from_i64(v)));
        pw = f.mul(&pw, &gen);
    }
    Ok(acc)
}

/// Short model of y² + a1xy + a3y = x³ + a2x² + a4x + a6 (characteristic ≥ 5).
pub fn short_from_long(f: &Fq, a: &[Fe; 5]) -> Result<Curve<Fq>> {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = f.add(&f.sqr(a1), &f.mul_i64(a2, 4));
    let b4 = f.add(&f.mul_i64(a4, 2), &f.mul(a1, a3));
    let b6 = f.add(&f.sqr(a3), &f.mul_i64(a6, 4));
    let inv = |n: i64| f.inv(&f.from_i64(n)).ok_or_else(|| perr("characteristic must be at least 5"));
    // y ↦ y − (a1x + a3)/2, then x ↦ x − b2/12
    let s4 = f.sub(&f.mul(&b4, &inv(2)?), &f.mul(&f.sqr(&b2), &inv(48)?));
    let b2_3 = f.mul(&f.sqr(&b2), &b2);
    let s6 = f.add(
        &f.sub(&f.mul(&b6, &inv(4)?), &f.mul(&f.mul(&b2, &b4), &inv(24)?)),
        &f.mul(&b2_3, &inv(864)?),
    );
    Curve::new(f, s4, s6)
}

/// Parse a curve specification.
pub fn parse_curve(spec: &str) -> Result<Curve<Fq>> {
    let (mut p, mut k, mut modulus) = (None, 1usize, None);
    let (mut a4, mut a6, mut long) = (None, None, None);
    for part in split_top(spec.trim()) {
        let (key, val) = part.split_once('=').ok_or_else(|| perr(format!("expected key=value, got `{part}`")))?;
        match key.trim() {
            "p" => p = Some(val.trim().parse::<u64>().map_err(|_| perr("bad characteristic"))?),
            "k" => k = val.trim().parse::<usize>().map_err(|_| perr("bad extension degree"))?,
            "mod" => modulus = Some(parse_ints(val)?),
            "a4" => a4 = Some(val.to_string()),
            "a6" => a6 = Some(val.to_string()),
            "a" => long = Some(val.to_string()),
            other => return Err(perr(format!("unknown key `{other}`"))),
        }
    }
    let p = p.ok_or_else(|| perr("missing p"))?;
    let f = match modulus {
        Some(m) => {
            let m: Vec<u64> = m.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
            Fq::with_modulus(p, &m)?
        }
        None if k == 1 => {
            if !crate::util::is_prime(p) {
                return Err(Error::InvalidParameter(format!("{p} is not prime")));
            }
            Fq::prime(p)
        }
        None => make_ext(p, k)?,
    };
    if let Some(l) = long {
        let parts = {
            let s = l.trim();
            let inner = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(s);
            split_top(inner)
        };
        if parts.len() != 5 {
            return Err(perr("long form needs five coefficients a1,a2,a3,a4,a6"));
        }
        let v: Vec<Fe> = parts.iter().map(|s| parse_elem(&f, s)).collect::<Result<_>>()?;
        return short_from_long(&f, &[v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone(), v[4].clone()]);
    }
    let a4 = parse_elem(&f, a4.as_deref().ok_or_else(|| perr("missing a4"))?)?;
    let a6 = parse_elem(&f, a6.as_deref().ok_or_else(|| perr("missing a6"))?)?;
    Curve::new(&f, a4, a6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::trace_of_frobenius;

    #[test]
    fn short_form() {
        let e = parse_curve("p=13,k=1,a4=1,a6=4").unwrap();
        assert_eq!(e.a4, e.f.from_i64(1));
        let e2 = parse_curve("p=13,k=2,mod=[2,12,1],a4=[1,1],a6=4").unwrap();
        assert_eq!(e2.f.degree(), 2);
        assert_eq!(e2.a4, e2.f.add(&e2.f.one(), &e2.f.gen()));
    }

    #[test]
    fn long_form_121b1_over_f5() {
        let e = parse_curve("p=5,a=[0,-1,1,-7,-10]").unwrap();
        assert_eq!(e.points().len(), 9);
        assert_eq!(trace_of_frobenius(&e), -3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_curve("p=13,a4=1").is_err());
        assert!(parse_curve("p=12,a4=1,a6=1").is_err());
        assert!(parse_curve("p=13,a4=x,a6=1").is_err());
        assert!(parse_curve("p=3,a4=1,a6=1").is_err());
    }
}
