//! Necklaces on P¹(F_p): 2×2 matrices, the fixed generator γ of F_{p²}^×,
//! cross-ratios, necklace construction and canonical forms, and counting of
//! necklaces stable under a subgroup of PGL₂(F_p).
//!
//! A point of P¹(F_p) is a slope: `Fin(s)` stands for the line through
//! (1, s) and `Inf` for the line through (0, 1). Matrices act on column
//! vectors, so `[[a, b], [c, d]]` sends slope s to (c + d·s)/(a + b·s).

mod necklace;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ff::legendre;
use crate::util::{factor_u64, gcd, inv_mod, is_prime};

pub use necklace::{
    act, antipodal, enumerate_all_necklaces, equiv_any_gamma, lemma_count, lemma_data, necklace_from_generator,
    necklace_from_three_pearls, rational_necklaces, rational_necklaces_group, Necklace, Relation,
};
pub use necklace::orbit_necklace;

/// A point of P¹(F_p) in slope coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProjPoint {
    /// The line spanned by (1, s).
    Fin(u32),
    /// The line spanned by (0, 1).
    Inf,
}

impl ProjPoint {
    /// Slope of the line spanned by the vector (v0, v1).
    pub fn from_vec(p: u64, v0: u64, v1: u64) -> Self {
        let (v0, v1) = (v0 % p, v1 % p);
        assert!(v0 != 0 || v1 != 0, "zero vector has no slope");
        if v0 == 0 {
            ProjPoint::Inf
        } else {
            ProjPoint::Fin((v1 * inv_mod(v0, p) % p) as u32)
        }
    }

    /// A spanning vector: (1, s) or (0, 1).
    pub fn to_vec(self) -> (u64, u64) {
        match self {
            ProjPoint::Fin(s) => (1, s as u64),
            ProjPoint::Inf => (0, 1),
        }
    }

    /// Index in 0..=p with `Inf` last.
    pub fn index(self, p: u64) -> usize {
        match self {
            ProjPoint::Fin(s) => s as usize,
            ProjPoint::Inf => p as usize,
        }
    }

    /// Inverse of [`ProjPoint::index`].
    pub fn from_index(i: usize, p: u64) -> Self {
        if i as u64 == p {
            ProjPoint::Inf
        } else {
            ProjPoint::Fin(i as u32)
        }
    }

    /// All p+1 points in index order.
    pub fn all(p: u64) -> Vec<ProjPoint> {
        (0..=p as usize).map(|i| Self::from_index(i, p)).collect()
    }

    /// Homogeneous coordinates used for cross-ratios: (s, 1) or (1, 0).
    fn affine_vec(self) -> (u64, u64) {
        match self {
            ProjPoint::Fin(s) => (s as u64, 1),
            ProjPoint::Inf => (1, 0),
        }
    }

    fn from_affine_vec(p: u64, x: u64, y: u64) -> Self {
        let (x, y) = (x % p, y % p);
        if y == 0 {
            ProjPoint::Inf
        } else {
            ProjPoint::Fin((x * inv_mod(y, p) % p) as u32)
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Fin(s) => write!(f, "{s}"),
            ProjPoint::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ProjPoint::Fin(v) => s.serialize_u32(*v),
            ProjPoint::Inf => s.serialize_str("inf"),
        }
    }
}

/// A 2×2 matrix over F_p, row-major `[m00, m01, m10, m11]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mat2 {
    /// Modulus.
    pub p: u64,
    /// Entries, row-major.
    pub m: [u64; 4],
}

impl Mat2 {
    /// Matrix from signed entries.
    pub fn new(p: u64, m: [i64; 4]) -> Self {
        Mat2 { p, m: m.map(|v| v.rem_euclid(p as i64) as u64) }
    }

    /// Identity.
    pub fn identity(p: u64) -> Self {
        Self::scalar(p, 1)
    }

    /// Scalar matrix c·I.
    pub fn scalar(p: u64, c: u64) -> Self {
        Mat2 { p, m: [c % p, 0, 0, c % p] }
    }

    /// Product self·o.
    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let p = self.p;
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = o.m;
        Mat2 { p, m: [(a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p] }
    }

    /// Sum.
    pub fn add(&self, o: &Mat2) -> Mat2 {
        let p = self.p;
        let mut m = self.m;
        for (x, y) in m.iter_mut().zip(o.m) {
            *x = (*x + y) % p;
        }
        Mat2 { p, m }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: u64) -> Mat2 {
        let p = self.p;
        Mat2 { p, m: self.m.map(|v| v * (c % p) % p) }
    }

    /// Determinant.
    pub fn det(&self) -> u64 {
        let p = self.p;
        let [a, b, c, d] = self.m;
        (a * d % p + p - b * c % p) % p
    }

    /// Trace.
    pub fn trace(&self) -> u64 {
        (self.m[0] + self.m[3]) % self.p
    }

    /// Power.
    pub fn pow(&self, mut e: u64) -> Mat2 {
        let mut r = Self::identity(self.p);
        let mut b = *self;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            b = b.mul(&b);
            e >>= 1;
        }
        r
    }

    /// Inverse, if invertible.
    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0 {
            return None;
        }
        let di = inv_mod(d, self.p);
        let p = self.p;
        let [a, b, c, dd] = self.m;
        Some(Mat2 { p, m: [dd * di % p, (p - b) * di % p, (p - c) * di % p, a * di % p] })
    }

    /// Whether this is a scalar matrix.
    pub fn is_scalar(&self) -> bool {
        self.m[1] == 0 && self.m[2] == 0 && self.m[0] == self.m[3]
    }

    /// Image of a column vector.
    pub fn apply(&self, v: (u64, u64)) -> (u64, u64) {
        let p = self.p;
        let [a, b, c, d] = self.m;
        ((a * v.0 + b * v.1) % p, (c * v.0 + d * v.1) % p)
    }

    /// Image of a slope.
    pub fn act(&self, s: ProjPoint) -> ProjPoint {
        let (v0, v1) = self.apply(s.to_vec());
        ProjPoint::from_vec(self.p, v0, v1)
    }

    /// Whether M² − t·M + n·I = 0.
    pub fn satisfies(&self, t: u64, n: u64) -> bool {
        let p = self.p;
        let lhs = self.mul(self).add(&self.scale(p - t % p)).add(&Self::scalar(p, n));
        lhs.m == [0; 4]
    }

    /// Multiplicative order in GL₂(F_p).
    pub fn order(&self) -> u64 {
        let p = self.p;
        let n = (p * p - 1) * (p * p - p);
        let mut ord = n;
        for (r, _) in factor_u64(n) {
            while ord % r == 0 && self.pow(ord / r) == Self::identity(p) {
                ord /= r;
            }
        }
        ord
    }
}

/// An element of PGL₂(F_p), stored with its first nonzero entry equal to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pgl2(Mat2);

impl Pgl2 {
    /// Class of an invertible matrix.
    pub fn from_mat(m: Mat2) -> Result<Self> {
        if m.det() == 0 {
            return Err(Error::InvalidParameter("singular matrix".into()));
        }
        let lead = *m.m.iter().find(|&&v| v != 0).unwrap();
        Ok(Pgl2(m.scale(inv_mod(lead, m.p))))
    }

    /// Class of a matrix given by signed entries.
    pub fn new(p: u64, m: [i64; 4]) -> Result<Self> {
        Self::from_mat(Mat2::new(p, m))
    }

    /// Identity.
    pub fn identity(p: u64) -> Self {
        Pgl2(Mat2::identity(p))
    }

    /// The normalized representative.
    pub fn mat(&self) -> Mat2 {
        self.0
    }

    /// Modulus.
    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Product.
    pub fn mul(&self, o: &Pgl2) -> Pgl2 {
        Self::from_mat(self.0.mul(&o.0)).unwrap()
    }

    /// Inverse.
    pub fn inverse(&self) -> Pgl2 {
        Self::from_mat(self.0.inverse().unwrap()).unwrap()
    }

    /// Power.
    pub fn pow(&self, e: u64) -> Pgl2 {
        Self::from_mat(self.0.pow(e)).unwrap()
    }

    /// Image of a slope.
    pub fn act(&self, s: ProjPoint) -> ProjPoint {
        self.0.act(s)
    }

    /// Whether this is the identity.
    pub fn is_identity(&self) -> bool {
        self.0.is_scalar()
    }

    /// Order in PGL₂(F_p).
    pub fn order(&self) -> u64 {
        let mut k = 1;
        let mut x = *self;
        while !x.is_identity() {
            x = x.mul(self);
            k += 1;
        }
        k
    }

    /// Uniform random element.
    pub fn random(p: u64, rng: &mut impl rand::Rng) -> Self {
        loop {
            let m = [0; 4].map(|_: u64| rng.gen_range(0..p) as i64);
            if let Ok(g) = Self::new(p, m) {
                return g;
            }
        }
    }

    /// All elements (small p only).
    pub fn all(p: u64) -> Vec<Pgl2> {
        let mut out = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        let m = Mat2 { p, m: [a, b, c, d] };
                        if m.det() != 0 && *m.m.iter().find(|&&v| v != 0).unwrap() == 1 {
                            out.push(Pgl2(m));
                        }
                    }
                }
            }
        }
        out
    }
}

/// δ(h): the Legendre symbol of tr² − 4·det of any representative.
pub fn delta(h: &Pgl2) -> i8 {
    let m = h.mat();
    let p = m.p;
    let t = m.trace();
    let d = (t * t % p + p * 4 - 4 * m.det() % p) % p;
    legendre(d as i64, p)
}

/// The generator γ of F_{p²}^× by its trace and norm: a root of x² − t·x + n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Gamma {
    /// The prime.
    pub p: u64,
    /// Trace of γ.
    pub t: u64,
    /// Norm of γ.
    pub n: u64,
}

fn quad_mul(p: u64, t: u64, n: u64, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
    // (a0 + a1 X)(b0 + b1 X) with X² = tX − n
    let c0 = a.0 * b.0 % p;
    let c1 = (a.0 * b.1 + a.1 * b.0) % p;
    let c2 = a.1 * b.1 % p;
    ((c0 + (p - n % p) * c2) % p, (c1 + t * c2) % p)
}

fn quad_pow(p: u64, t: u64, n: u64, mut e: u64) -> (u64, u64) {
    let mut r = (1, 0);
    let mut b = (0, 1);
    while e > 0 {
        if e & 1 == 1 {
            r = quad_mul(p, t, n, r, b);
        }
        b = quad_mul(p, t, n, b, b);
        e >>= 1;
    }
    r
}

impl Gamma {
    /// Validated γ: x² − t·x + n irreducible with a root of order p² − 1.
    pub fn new(p: u64, t: u64, n: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not an odd prime")));
        }
        let (t, n) = (t % p, n % p);
        let disc = (t * t % p + 4 * p - 4 * n) % p;
        if legendre(disc as i64, p) != -1 {
            return Err(Error::InvalidParameter(format!("x^2 - {t}x + {n} is reducible mod {p}")));
        }
        let ord = p * p - 1;
        for (r, _) in factor_u64(ord) {
            if quad_pow(p, t, n, ord / r) == (1, 0) {
                return Err(Error::InvalidParameter(format!("x^2 - {t}x + {n} is not primitive mod {p}")));
            }
        }
        Ok(Gamma { p, t, n })
    }
}

/// The least (t, then n) primitive γ for p.
pub fn canonical_gamma(p: u64) -> Result<Gamma> {
    for t in 0..p {
        for n in 1..p {
            if let Ok(g) = Gamma::new(p, t, n) {
                return Ok(g);
            }
        }
    }
    Err(Error::InvalidParameter(format!("no primitive quadratic mod {p}")))
}

/// ξ = t²/(t² − n).
pub fn xi(g: &Gamma) -> Result<u64> {
    let p = g.p;
    if g.t == 0 {
        return Err(Error::InvalidParameter("xi undefined for trace 0".into()));
    }
    let t2 = g.t * g.t % p;
    let den = (t2 + p - g.n) % p;
    if den == 0 {
        return Err(Error::Invariant("t^2 = n for a primitive gamma".into()));
    }
    Ok(t2 * inv_mod(den, p) % p)
}

fn det_h(p: u64, u: (u64, u64), v: (u64, u64)) -> u64 {
    (u.0 * v.1 % p + p - u.1 * v.0 % p) % p
}

/// Cross-ratio [a, b; c, d] = ((a−c)(b−d))/((a−d)(b−c)) with the usual limits at ∞.
pub fn cross_ratio(p: u64, a: ProjPoint, b: ProjPoint, c: ProjPoint, d: ProjPoint) -> Result<ProjPoint> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(Error::InvalidParameter("cross-ratio needs distinct points".into()));
            }
        }
    }
    let [a, b, c, d] = pts.map(|x| x.affine_vec());
    let num = det_h(p, a, c) * det_h(p, b, d) % p;
    let den = det_h(p, a, d) * det_h(p, b, c) % p;
    Ok(ProjPoint::from_affine_vec(p, num, den))
}

/// The point d with [a, b; c, d] = ξ.
pub(crate) fn next_pearl(p: u64, xi: u64, a: ProjPoint, b: ProjPoint, c: ProjPoint) -> ProjPoint {
    let (av, bv, cv) = (a.affine_vec(), b.affine_vec(), c.affine_vec());
    let ac = det_h(p, av, cv);
    let bc = xi * det_h(p, bv, cv) % p;
    let x = (ac * bv.0 % p + p - bc * av.0 % p) % p;
    let y = (ac * bv.1 % p + p - bc * av.1 % p) % p;
    ProjPoint::from_affine_vec(p, x, y)
}

type NecklaceCache = Mutex<HashMap<Gamma, Arc<Vec<Necklace>>>>;

fn all_cache() -> &'static NecklaceCache {
    static C: OnceLock<NecklaceCache> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Whether n is coprime to m.
pub(crate) fn coprime(n: u64, m: u64) -> bool {
    gcd(n, m) == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_gamma_small() {
        let g3 = canonical_gamma(3).unwrap();
        assert_eq!((g3.t, g3.n), (1, 2));
        let g5 = canonical_gamma(5).unwrap();
        // root order 24 by brute force
        let mut x = (0u64, 1u64);
        let mut k = 1;
        while x != (1, 0) {
            x = quad_mul(5, g5.t, g5.n, x, (0, 1));
            k += 1;
        }
        assert_eq!(k, 24);
        assert_eq!(crate::util::order_mod(g5.n, 5), 4);
    }

    #[test]
    fn xi_never_degenerate() {
        for p in [5u64, 7, 11, 13, 17, 47] {
            let x = xi(&canonical_gamma(p).unwrap()).unwrap();
            assert!(x != 0 && x != 1);
        }
    }

    #[test]
    fn pgl2_normalization() {
        let a = Pgl2::new(7, [2, 4, 6, 1]).unwrap();
        assert_eq!(a.mat().m[0], 1);
        assert_eq!(a, Pgl2::new(7, [4, 8, 12, 2]).unwrap());
        assert!(Pgl2::new(7, [1, 2, 2, 4]).is_err());
        assert_eq!(Pgl2::all(5).len(), 120);
    }

    #[test]
    fn slope_action_matches_vectors() {
        let m = Mat2::new(5, [1, 2, 3, 4]);
        for s in ProjPoint::all(5) {
            let (v0, v1) = m.apply(s.to_vec());
            assert_eq!(m.act(s), ProjPoint::from_vec(5, v0, v1));
        }
        assert_eq!(Mat2::new(5, [0, 1, 1, 0]).act(ProjPoint::Fin(0)), ProjPoint::Inf);
    }

    #[test]
    fn delta_classes() {
        assert_eq!(delta(&Pgl2::identity(7)), 0);
        assert_eq!(delta(&Pgl2::new(7, [1, 0, 0, 3]).unwrap()), 1);
        let g = canonical_gamma(7).unwrap();
        let h = Pgl2::new(7, [0, -(g.n as i64), 1, g.t as i64]).unwrap();
        assert_eq!(delta(&h), -1);
    }

    #[test]
    fn cross_ratio_distinctness() {
        use ProjPoint::*;
        assert!(cross_ratio(5, Fin(0), Fin(0), Fin(1), Inf).is_err());
        // [0, 1; ∞, x] is a bijection on the remaining points
        let mut seen: Vec<_> =
            (2..5).map(|x| cross_ratio(5, Fin(0), Fin(1), Inf, Fin(x)).unwrap()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 3);
    }
}
