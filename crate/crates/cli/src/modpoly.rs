//! Classical modular polynomial files with lines `[a,b] c`, meaning the
//! monomial c·X^a·Y^b. Only one of each symmetric pair needs to be listed.

use std::collections::BTreeMap;
use std::path::Path;

use necklace::bridge::pearl_set;
use necklace::ec::curve_from_j;
use necklace::ff::{Fq, PolyRing};
use necklace::util::{is_prime, primes_in};
use necklace::{Error, Result};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Φ_p as a sparse coefficient map with a ≥ b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPolyFile {
    /// Level.
    pub p: u64,
    /// Coefficient of X^a·Y^b for a ≥ b.
    pub coeffs: BTreeMap<(usize, usize), BigInt>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_line(line: usize, s: &str) -> Result<(usize, usize, BigInt)> {
    let rest = s.strip_prefix('[').ok_or_else(|| perr(line, "expected `[a,b] c`"))?;
    let (exps, coeff) = rest.split_once(']').ok_or_else(|| perr(line, "missing `]`"))?;
    let (a, b) = exps.split_once(',').ok_or_else(|| perr(line, "expected two exponents"))?;
    let exp = |t: &str| t.trim().parse::<usize>().map_err(|_| perr(line, format!("bad exponent `{}`", t.trim())));
    let coeff = coeff.trim();
    if coeff.is_empty() {
        return Err(perr(line, "missing coefficient"));
    }
    let c = coeff.parse::<BigInt>().map_err(|_| perr(line, format!("bad coefficient `{coeff}`")))?;
    Ok((exp(a)?, exp(b)?, c))
}

impl ModPolyFile {
    /// Parse file contents for level p.
    pub fn parse(p: u64, text: &str) -> Result<Self> {
        let mut coeffs: BTreeMap<(usize, usize), (BigInt, usize)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let s = raw.trim();
            if s.is_empty() || s.starts_with('#') {
                continue;
            }
            let line = i + 1;
            let (a, b, c) = parse_line(line, s)?;
            let key = (a.max(b), a.min(b));
            match coeffs.get(&key) {
                Some((old, at)) if *old != c => {
                    return Err(Error::InvalidParameter(format!(
                        "modular polynomial is not symmetric: X^{a}Y^{b} on line {line} differs from line {at}"
                    )))
                }
                Some(_) => {}
                None => {
                    coeffs.insert(key, (c, line));
                }
            }
        }
        let coeffs: BTreeMap<_, _> = coeffs.into_iter().filter(|(_, (c, _))| !c.is_zero()).map(|(k, (c, _))| (k, c)).collect();
        let top = p as usize + 1;
        if coeffs.keys().any(|&(a, _)| a > top) {
            return Err(Error::InvalidParameter(format!("degree exceeds {top}")));
        }
        if coeffs.get(&(top, 0)) != Some(&BigInt::from(1)) {
            return Err(Error::InvalidParameter(format!("coefficient of X^{top} must be 1")));
        }
        Ok(ModPolyFile { p, coeffs })
    }

    /// Read and parse a file.
    pub fn read(p: u64, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| perr(0, format!("{}: {e}", path.display())))?;
        Self::parse(p, &text)
    }

    /// Coefficient of X^a·Y^b.
    pub fn coeff(&self, a: usize, b: usize) -> BigInt {
        self.coeffs.get(&(a.max(b), a.min(b))).cloned().unwrap_or_default()
    }

    /// Degree in X.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|&(a, _)| a).max().unwrap_or(0)
    }

    /// Number of monomials after symmetric expansion.
    #[cfg(test)]
    pub fn monomials(&self) -> usize {
        self.coeffs.keys().map(|&(a, b)| if a == b { 1 } else { 2 }).sum()
    }

    /// Coefficients of Φ_p(j, Y) mod ℓ, lowest degree first.
    pub fn specialize(&self, ell: u64, j: u64) -> Vec<u64> {
        let l = BigInt::from(ell);
        let d = self.degree();
        let mut jp = vec![1u64; d + 1];
        for a in 1..=d {
            jp[a] = jp[a - 1] * j % ell;
        }
        (0..=d)
            .map(|b| {
                let s: BigInt = (0..=d).map(|a| self.coeff(a, b) * jp[a]).sum();
                ((s % &l + &l) % &l).to_u64().expect("residue fits")
            })
            .collect()
    }

    /// Check over a random prime field chosen from `seed` that the roots of
    /// Φ_p(j(E), Y) are the codomain j-invariants of the p+1 isogenies of E.
    pub fn validate(&self, seed: u64) -> Result<()> {
        let p = self.p;
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!("validation needs an odd prime level, got {p}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let fields: Vec<u64> = primes_in(29, 200).into_iter().filter(|&l| l != p).collect();
        let ell = fields[rng.gen_range(0..fields.len())];
        let j = rng.gen_range(1..ell);
        let f = Fq::prime(ell);
        let e = curve_from_j(&f, &f.from_u64(j));
        let set = pearl_set(&e, p)?;
        let big = &set.iso.big;
        let ring = PolyRing::new(big);
        let phi: Vec<_> = self.specialize(ell, j).iter().map(|&c| set.iso.forward(&f.from_u64(c))).collect();
        let js: Vec<_> = set.pearls.iter().map(|g| g.j.clone()).collect();
        if ring.normalized(phi) != ring.from_roots(&js) {
            return Err(Error::Mismatch(format!(
                "roots of the modular polynomial at j = {j} over F_{ell} are not the codomain j-invariants"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PHI3: &str = "\
[4,0] 1
[3,3] -1
[3,2] 2232
[3,1] -1069956
[3,0] 36864000
[2,2] 2587918086
[2,1] 8900222976000
[2,0] 452984832000000
[1,1] -770845966336000000
[1,0] 1855425871872000000000
";

    #[test]
    fn level_three() {
        let m = ModPolyFile::parse(3, PHI3).unwrap();
        assert_eq!(m.degree(), 4);
        assert_eq!(m.coeffs.len(), 10);
        assert_eq!(m.monomials(), 17);
        assert_eq!(m.coeff(2, 3), BigInt::from(2232));
    }

    #[test]
    fn single_entry_and_errors() {
        assert_eq!(parse_line(1, "[2,1] -1").unwrap(), (2, 1, BigInt::from(-1)));
        assert!(matches!(ModPolyFile::parse(3, "[4,0] 1\n[3,3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ModPolyFile::parse(3, "[4,0] 1\n[2,1]"), Err(Error::Parse { line: 2, .. })));
        let asym = "[4,0] 1\n[2,1] 5\n[1,2] 6\n";
        assert!(matches!(ModPolyFile::parse(3, asym), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn specialization_is_monic_in_y() {
        let m = ModPolyFile::parse(3, PHI3).unwrap();
        let c = m.specialize(101, 7);
        assert_eq!(c.len(), 5);
        assert_eq!(c[4], 1);
    }

    #[test]
    fn validation_against_isogenies() {
        let m = ModPolyFile::parse(3, PHI3).unwrap();
        for seed in 0..4 {
            m.validate(seed).unwrap();
        }
        let bad = ModPolyFile::parse(3, &PHI3.replace("2232", "2233")).unwrap();
        assert!(matches!(bad.validate(0), Err(Error::Mismatch(_))));
    }
}
