//! Extension fields F_p[θ]/(m(θ)) presented directly over the prime field.

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallvec::SmallVec;

use super::{Field, Fp, PolyRing, DEFAULT_SEED};
use crate::error::{Error, Result};

/// Element of an [`Fq`]: coefficients of 1, θ, θ², … reduced mod p.
pub type Fe = SmallVec<[u32; 4]>;

#[derive(Debug)]
struct Inner {
    p: u64,
    k: usize,
    /// Monic modulus, low degree first, length k + 1.
    modulus: Vec<u64>,
    /// θ^(j·p) for j < k, filled on first use.
    frob: OnceLock<Vec<Fe>>,
    /// Tonelli–Shanks data: q − 1 = 2^s·t and z^t for a non-residue z.
    ts: OnceLock<(u32, BigUint, Fe)>,
}

/// The field F_{p^k} = F_p[θ]/(m) for a monic irreducible m of degree k, p < 2^16.
#[derive(Clone, Debug)]
pub struct Fq {
    inner: Arc<Inner>,
}

impl PartialEq for Fq {
    fn eq(&self, o: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &o.inner)
            || (self.inner.p == o.inner.p && self.inner.modulus == o.inner.modulus)
    }
}
impl Eq for Fq {}

impl Fq {
    /// F_p itself, with modulus θ (so θ = 0).
    pub fn prime(p: u64) -> Self {
        Self::unchecked(p, vec![0, 1])
    }

    /// Extension with the given monic modulus (low degree first); checks irreducibility.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        let fp = Fp::new(p);
        let m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if m.len() < 2 || *m.last().unwrap() != 1 {
            return Err(Error::InvalidParameter("modulus must be monic of degree >= 1".into()));
        }
        if !super::is_irreducible(&fp, &m) {
            return Err(Error::InvalidParameter("modulus is reducible".into()));
        }
        Ok(Self::unchecked(p, m))
    }

    pub(crate) fn unchecked(p: u64, modulus: Vec<u64>) -> Self {
        assert!(p < (1 << 16), "extension fields need p < 2^16");
        let k = modulus.len() - 1;
        Fq { inner: Arc::new(Inner { p, k, modulus, frob: OnceLock::new(), ts: OnceLock::new() }) }
    }

    /// The monic modulus, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    /// The generator θ (for k = 1 this is the root of the modulus, i.e. 0).
    pub fn gen(&self) -> Fe {
        if self.inner.k == 1 {
            return self.from_coeffs(&[self.inner.p - self.inner.modulus[0] % self.inner.p]);
        }
        self.from_coeffs(&[0, 1])
    }

    /// Element from an F_p value.
    pub fn from_u64(&self, v: u64) -> Fe {
        self.from_coeffs(&[v])
    }

    /// The F_p value of an element of the prime subfield.
    pub fn to_prime(&self, a: &Fe) -> Option<u64> {
        if a.iter().skip(1).all(|&c| c == 0) {
            Some(a[0] as u64)
        } else {
            None
        }
    }

    fn frob_table(&self) -> &Vec<Fe> {
        self.inner.frob.get_or_init(|| {
            let t = self.gen();
            let tp = self.pow_u64(&t, self.inner.p);
            let mut out = Vec::with_capacity(self.inner.k);
            let mut cur = self.one();
            for _ in 0..self.inner.k {
                out.push(cur.clone());
                cur = self.mul(&cur, &tp);
            }
            out
        })
    }

    fn ts_data(&self) -> &(u32, BigUint, Fe) {
        self.inner.ts.get_or_init(|| {
            let qm1 = self.order() - 1u32;
            let s = qm1.trailing_zeros().unwrap_or(0) as u32;
            let t = &qm1 >> s;
            let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
            let z = loop {
                let z = self.random(&mut rng);
                if self.quadratic_character(&z) == -1 {
                    break z;
                }
            };
            let zt = self.pow(&z, &t);
            (s, t, zt)
        })
    }

    fn frob1(&self, a: &Fe) -> Fe {
        let k = self.inner.k;
        let p = self.inner.p;
        let tab = self.frob_table();
        let mut acc = vec![0u64; k];
        for (j, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, &t) in tab[j].iter().enumerate() {
                acc[i] += c as u64 * t as u64;
            }
            if j % 1024 == 1023 {
                acc.iter_mut().for_each(|v| *v %= p);
            }
        }
        acc.into_iter().map(|v| (v % p) as u32).collect()
    }
}

impl Field for Fq {
    type Elem = Fe;

    fn p(&self) -> u64 {
        self.inner.p
    }
    fn degree(&self) -> usize {
        self.inner.k
    }
    fn zero(&self) -> Fe {
        SmallVec::from_elem(0, self.inner.k)
    }
    fn one(&self) -> Fe {
        let mut v = self.zero();
        v[0] = 1;
        if self.inner.k == 1 {
            v[0] = (1 % self.inner.p) as u32;
        }
        v
    }
    fn from_i64(&self, v: i64) -> Fe {
        let mut e = self.zero();
        e[0] = v.rem_euclid(self.inner.p as i64) as u32;
        e
    }
    fn from_coeffs(&self, c: &[u64]) -> Fe {
        let k = self.inner.k;
        if c.len() <= k {
            let mut e = self.zero();
            for (i, &v) in c.iter().enumerate() {
                e[i] = (v % self.inner.p) as u32;
            }
            return e;
        }
        let fp = Fp::new(self.inner.p);
        let r = PolyRing::new(&fp).rem(&c.iter().map(|v| v % self.inner.p).collect::<Vec<_>>(), &self.inner.modulus);
        self.from_coeffs(&r)
    }
    fn coeffs(&self, a: &Fe) -> Vec<u64> {
        a.iter().map(|&v| v as u64).collect()
    }
    #[inline]
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        let p = self.inner.p as u32;
        a.iter()
            .zip(b.iter())
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= p {
                    s - p
                } else {
                    s
                }
            })
            .collect()
    }
    #[inline]
    fn sub(&self, a: &Fe, b: &Fe) -> Fe {
        let p = self.inner.p as u32;
        a.iter().zip(b.iter()).map(|(&x, &y)| if x >= y { x - y } else { x + p - y }).collect()
    }
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        let k = self.inner.k;
        let p = self.inner.p;
        if k == 1 {
            let mut e = self.zero();
            e[0] = (a[0] as u64 * b[0] as u64 % p) as u32;
            return e;
        }
        if k == 2 {
            // θ² = -m1 θ - m0
            let (m0, m1) = (self.inner.modulus[0], self.inner.modulus[1]);
            let (a0, a1, b0, b1) = (a[0] as u64, a[1] as u64, b[0] as u64, b[1] as u64);
            let c0 = a0 * b0 % p;
            let c1 = (a0 * b1 + a1 * b0) % p;
            let c2 = a1 * b1 % p;
            let r0 = (c0 + (p - m0) * c2) % p;
            let r1 = (c1 + (p - m1 % p) % p * c2) % p;
            let mut e = self.zero();
            e[0] = r0 as u32;
            e[1] = r1 as u32;
            return e;
        }
        let mut acc: SmallVec<[u64; 16]> = SmallVec::from_elem(0, 2 * k - 1);
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let x = x as u64;
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += x * y as u64;
            }
        }
        let m = &self.inner.modulus;
        for i in (k..2 * k - 1).rev() {
            let c = acc[i] % p;
            if c == 0 {
                continue;
            }
            for j in 0..k {
                if m[j] != 0 {
                    acc[i - k + j] += c * (p - m[j]);
                }
            }
        }
        acc[..k].iter().map(|&v| (v % p) as u32).collect()
    }
    #[inline]
    fn neg(&self, a: &Fe) -> Fe {
        let p = self.inner.p as u32;
        a.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect()
    }
    fn inv(&self, a: &Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return None;
        }
        let p = self.inner.p;
        if self.inner.k == 1 {
            let fp = Fp::new(p);
            return Some(self.from_u64(fp.inv(&(a[0] as u64)).unwrap()));
        }
        let fp = Fp::new(p);
        let r = PolyRing::new(&fp);
        let av: Vec<u64> = r.normalized(a.iter().map(|&v| v as u64).collect());
        let (g, s, _) = r.xgcd(&av, &self.inner.modulus);
        debug_assert!(g.len() == 1);
        let gi = fp.inv(&g[0]).unwrap();
        Some(self.from_coeffs(&r.scale(&s, &gi)))
    }
    #[inline]
    fn is_zero(&self, a: &Fe) -> bool {
        a.iter().all(|&v| v == 0)
    }
    fn frob(&self, a: &Fe, i: usize) -> Fe {
        let k = self.inner.k;
        let mut x = a.clone();
        for _ in 0..(i % k) {
            x = self.frob1(&x);
        }
        x
    }
    fn sqrt(&self, a: &Fe) -> Option<Fe> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        let (s, t, zt) = self.ts_data();
        let e: BigUint = (t - 1u32) >> 1;
        let ae = self.pow(a, &e);
        let mut x = self.mul(&ae, a);
        let mut b = self.mul(&ae, &x);
        let mut c = zt.clone();
        let mut m = *s;
        while !self.is_one(&b) {
            let mut i = 0;
            let mut bb = b.clone();
            while !self.is_one(&bb) {
                bb = self.sqr(&bb);
                i += 1;
                if i == m {
                    return None;
                }
            }
            let mut d = c.clone();
            for _ in 0..(m - i - 1) {
                d = self.sqr(&d);
            }
            x = self.mul(&x, &d);
            c = self.sqr(&d);
            b = self.mul(&b, &c);
            m = i;
        }
        Some(self.canonical_sqrt(x))
    }
    fn random(&self, rng: &mut dyn RngCore) -> Fe {
        let p = self.inner.p;
        (0..self.inner.k).map(|_| (rng.next_u64() % p) as u32).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn f169() -> Fq {
        // θ² − θ + 2
        Fq::with_modulus(13, &[2, 12, 1]).unwrap()
    }

    #[test]
    fn frobenius_of_theta_is_conjugate_root() {
        let f = f169();
        let t = f.gen();
        let t13 = f.frobenius(&t, &BigUint::from(13u32));
        // the other root of θ² − θ + 2 is 1 − θ
        assert_eq!(t13, f.sub(&f.one(), &t));
        assert_eq!(f.frob(&t, 1), t13);
        assert_eq!(f.frob(&t, 2), t);
    }

    #[test]
    fn sqrt_in_extension() {
        let f = Fq::with_modulus(5, &[2, 0, 1, 1]).unwrap();
        let mut squares = 0;
        for a in f.elements() {
            match f.sqrt(&a) {
                Some(r) => {
                    assert_eq!(f.sqr(&r), a);
                    squares += 1;
                }
                None => assert_eq!(f.quadratic_character(&a), -1),
            }
        }
        assert_eq!(squares, 63);
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(Fq::with_modulus(7, &[6, 0, 1]).is_err());
    }

    #[test]
    fn inverse_everywhere() {
        let f = Fq::with_modulus(5, &[2, 0, 1, 1]).unwrap();
        assert_eq!(f.degree(), 3);
        for a in f.elements().into_iter().skip(1) {
            assert!(f.is_one(&f.mul(&a, &f.inv(&a).unwrap())));
        }
    }

    #[test]
    fn prime_subfield_fixed() {
        let f = f169();
        for c in 0..13 {
            let x = f.from_u64(c);
            assert_eq!(f.frob(&x, 1), x);
        }
    }
}
