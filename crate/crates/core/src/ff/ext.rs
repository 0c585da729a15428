//! Canonical extension fields and embeddings between them.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::{roots, Field, Fp, Fq, PolyRing};
use crate::error::{Error, Result};

fn cache() -> &'static Mutex<HashMap<(u64, usize), Fq>> {
    static C: OnceLock<Mutex<HashMap<(u64, usize), Fq>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The canonical F_{p^k}: modulus is the least monic irreducible of degree k,
/// comparing coefficient vectors lexicographically from the constant term up.
pub fn make_ext(p: u64, k: usize) -> Result<Fq> {
    if p < 3 || p >= 1 << 16 || !crate::util::is_prime(p) || k == 0 {
        return Err(Error::InvalidParameter(format!("no field F_{{{p}^{k}}}")));
    }
    if let Some(f) = cache().lock().unwrap().get(&(p, k)) {
        return Ok(f.clone());
    }
    let f = if k == 1 {
        Fq::prime(p)
    } else {
        let fp = Fp::new(p);
        let mut digits = vec![0u64; k];
        digits[0] = 1;
        loop {
            let mut m = digits.clone();
            m.push(1);
            if m[0] != 0 && super::is_irreducible(&fp, &m) {
                break Fq::unchecked(p, m);
            }
            // increment with digits[0] most significant
            let mut i = k;
            loop {
                i -= 1;
                digits[i] += 1;
                if digits[i] < p {
                    break;
                }
                digits[i] = 0;
            }
        }
    };
    cache().lock().unwrap().insert((p, k), f.clone());
    Ok(f)
}

/// A field embedding `small → big` fixed by the image of the generator.
#[derive(Clone, Debug)]
pub struct Embedding {
    /// Source field.
    pub small: Fq,
    /// Target field.
    pub big: Fq,
    /// Images of θ^i (i < deg small) as F_p-vectors in `big`.
    powers: Vec<Vec<u64>>,
    /// Left inverse of the `powers` matrix.
    left_inv: Vec<Vec<u64>>,
}

impl Embedding {
    /// Embedding sending the generator of `small` to the least root of its
    /// modulus in `big`. Fails if the degree does not divide.
    pub fn new(small: &Fq, big: &Fq) -> Result<Self> {
        let a = small.degree();
        let b = big.degree();
        if small.p() != big.p() || b % a != 0 {
            return Err(Error::InvalidParameter("no embedding between these fields".into()));
        }
        let rho = if a == 1 {
            big.one()
        } else {
            let m: Vec<_> = small.modulus().iter().map(|&c| big.from_u64(c)).collect();
            roots(big, &m).into_iter().next().expect("modulus splits in the larger field")
        };
        Ok(Self::with_image(small, big, rho))
    }

    /// Embedding `mid → big` whose composite with `low → mid` is `low → big`.
    pub fn compatible(low_mid: &Embedding, low_big: &Embedding) -> Result<Self> {
        let (mid, big) = (&low_mid.big, &low_big.big);
        if low_mid.small.degree() == 1 {
            return Embedding::new(mid, big);
        }
        let target = low_big.image_of_gen();
        let via = low_mid.image_of_gen();
        let m: Vec<_> = mid.modulus().iter().map(|&c| big.from_u64(c)).collect();
        roots(big, &m)
            .into_iter()
            .map(|rho| Self::with_image(mid, big, rho))
            .find(|e| e.forward(&via) == target)
            .ok_or_else(|| Error::InvalidParameter("no compatible embedding".into()))
    }

    /// Embedding sending the generator of `small` to `rho` (a root of its modulus).
    pub fn with_image(small: &Fq, big: &Fq, rho: <Fq as Field>::Elem) -> Self {
        let a = small.degree();
        let b = big.degree();
        let p = big.p();
        let mut powers = Vec::with_capacity(a);
        let mut cur = big.one();
        for _ in 0..a {
            powers.push(big.coeffs(&cur));
            cur = big.mul(&cur, &rho);
        }
        // Row-reduce [M | I] where M is b×a with columns `powers`.
        let fp = Fp::new(p);
        let mut rows: Vec<Vec<u64>> = (0..b)
            .map(|i| {
                let mut r: Vec<u64> = (0..a).map(|j| powers[j][i]).collect();
                r.extend((0..b).map(|j| u64::from(i == j)));
                r
            })
            .collect();
        let mut rank = 0;
        for col in 0..a {
            let piv = (rank..b).find(|&r| rows[r][col] != 0).expect("embedding matrix has full rank");
            rows.swap(rank, piv);
            let inv = fp.inv(&rows[rank][col]).unwrap();
            rows[rank].iter_mut().for_each(|v| *v = *v * inv % p);
            for r in 0..b {
                if r != rank && rows[r][col] != 0 {
                    let c = rows[r][col];
                    let src = rows[rank].clone();
                    for (v, s) in rows[r].iter_mut().zip(src) {
                        *v = (*v + p - c * s % p) % p;
                    }
                }
            }
            rank += 1;
        }
        let left_inv = rows[..a].iter().map(|r| r[a..].to_vec()).collect();
        Embedding { small: small.clone(), big: big.clone(), powers, left_inv }
    }

    /// Image of the generator of the small field.
    pub fn image_of_gen(&self) -> <Fq as Field>::Elem {
        if self.powers.len() == 1 {
            return self.big.one();
        }
        self.big.from_coeffs(&self.powers[1])
    }

    /// Map an element into the big field.
    pub fn forward(&self, x: &<Fq as Field>::Elem) -> <Fq as Field>::Elem {
        let p = self.big.p();
        let mut acc = vec![0u64; self.big.degree()];
        for (c, pw) in self.small.coeffs(x).iter().zip(&self.powers) {
            for (a, v) in acc.iter_mut().zip(pw) {
                *a = (*a + c * v) % p;
            }
        }
        self.big.from_coeffs(&acc)
    }

    /// Preimage of an element of the image, `None` otherwise.
    pub fn back(&self, y: &<Fq as Field>::Elem) -> Option<<Fq as Field>::Elem> {
        let p = self.big.p();
        let v = self.big.coeffs(y);
        let c: Vec<u64> =
            self.left_inv.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b % p).sum::<u64>() % p).collect();
        let x = self.small.from_coeffs(&c);
        (self.forward(&x) == *y).then_some(x)
    }

    /// Map a polynomial coefficientwise.
    pub fn forward_poly(&self, a: &[<Fq as Field>::Elem]) -> Vec<<Fq as Field>::Elem> {
        PolyRing::new(&self.big).normalized(a.iter().map(|c| self.forward(c)).collect())
    }

    /// Pull a polynomial back coefficientwise, if all coefficients lie in the image.
    pub fn back_poly(&self, a: &[<Fq as Field>::Elem]) -> Option<Vec<<Fq as Field>::Elem>> {
        a.iter().map(|c| self.back(c)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_f169() {
        let f = make_ext(13, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 3, 1]);
    }

    #[test]
    fn embedding_roundtrip() {
        let s = make_ext(5, 2).unwrap();
        let b = make_ext(5, 4).unwrap();
        let e = Embedding::new(&s, &b).unwrap();
        for x in s.elements() {
            let y = e.forward(&x);
            assert_eq!(e.back(&y), Some(x.clone()));
        }
        for x in s.elements() {
            for y in s.elements().iter().take(7) {
                assert_eq!(e.forward(&s.mul(&x, y)), b.mul(&e.forward(&x), &e.forward(y)));
            }
        }
        assert_eq!(e.back(&b.gen()), None);
    }

    #[test]
    fn compatible_composite() {
        let low = make_ext(5, 2).unwrap();
        let mid = make_ext(5, 4).unwrap();
        let big = make_ext(5, 8).unwrap();
        let lm = Embedding::new(&low, &mid).unwrap();
        let r = roots(&big, &low.modulus().iter().map(|&c| big.from_u64(c)).collect::<Vec<_>>());
        for rho in r {
            let lb = Embedding::with_image(&low, &big, rho);
            let mb = Embedding::compatible(&lm, &lb).unwrap();
            for x in low.elements() {
                assert_eq!(mb.forward(&lm.forward(&x)), lb.forward(&x));
            }
        }
    }
}
