//! Bases of E[p] over an explicit p-division field, the matrix of Frobenius
//! in such a basis, and the automorphisms [i] and [ζ].

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{trace_of_frobenius, trace_over_extension, Curve, Point, Pt};
use crate::cartan::{Mat2, ProjPoint};
use crate::error::{Error, Result};
use crate::ff::{make_ext, roots, Embedding, Fe, Field, Fq, Poly, PolyRing, DEFAULT_SEED};
use crate::util::{is_prime, lcm};

/// Largest absolute extension degree a torsion field may have.
pub const MAX_TORSION_DEGREE: usize = 400;

/// A basis (P, Q) of E[p] over an extension K of the base field.
#[derive(Clone, Debug)]
pub struct TorsionBasis {
    /// Torsion prime.
    pub p: u64,
    /// The curve over its base field.
    pub base: Curve<Fq>,
    /// Base field into K.
    pub emb: Embedding,
    /// The curve over K.
    pub curve: Curve<Fq>,
    /// First basis point.
    pub pt_p: Pt<Fq>,
    /// Second basis point.
    pub pt_q: Pt<Fq>,
    /// Trace of Frobenius over the base field.
    pub trace: i64,
}

/// Order of X in F_p[X]/(X² − tX + n).
fn x_order(t: u64, n: u64, p: u64) -> u64 {
    let (mut c0, mut c1) = (0u64, 1u64);
    let mut k = 1;
    while !(c0 == 1 && c1 == 0) {
        (c0, c1) = ((p - n % p) * c1 % p, (c0 + t * c1) % p);
        k += 1;
    }
    k
}

fn field_size(f: &Fq) -> u64 {
    f.order_u128() as u64
}

/// Candidate degrees over the base field for K with E[p] ⊆ E(K), smallest first.
fn degree_candidates(a: i64, q: u64, p: u64) -> Vec<u64> {
    let t = a.rem_euclid(p as i64) as u64;
    let n = q % p;
    let e = x_order(t, n, p);
    let disc = (t * t + 4 * (p - n)) % p;
    if disc == 0 {
        vec![e / p, e]
    } else {
        vec![e]
    }
}

/// Smallest degree over the base field of an extension containing E[p].
pub fn torsion_degree(e: &Curve<Fq>, p: u64) -> Result<u64> {
    Ok(torsion_basis(e, p)?.degree())
}

/// A basis of E[p] over the smallest extension containing it.
pub fn torsion_basis(e: &Curve<Fq>, p: u64) -> Result<TorsionBasis> {
    torsion_basis_with(e, p, 1)
}

/// A basis of E[p] over the smallest extension containing E[p] whose degree
/// over the base field is also a multiple of `extra`.
pub fn torsion_basis_with(e: &Curve<Fq>, p: u64, extra: u64) -> Result<TorsionBasis> {
    if !is_prime(p) || p == e.f.p() {
        return Err(Error::InvalidParameter(format!("torsion prime {p} must be a prime other than the characteristic")));
    }
    let q = field_size(&e.f);
    let a = trace_of_frobenius(e);
    let kb = e.f.degree() as u64;
    for d in degree_candidates(a, q, p) {
        let d = lcm(d, extra.max(1));
        let total = (kb * d) as usize;
        if total > MAX_TORSION_DEGREE {
            return Err(Error::InvalidParameter(format!(
                "{p}-torsion field has degree {total} over the prime field (limit {MAX_TORSION_DEGREE})"
            )));
        }
        let big = make_ext(e.f.p(), total)?;
        let emb = Embedding::new(&e.f, &big)?;
        let curve = e.base_change(&emb);
        let t_d = trace_over_extension(a, q, d as usize);
        let n: BigInt = BigInt::from(q).pow(d as u32) + 1 - t_d;
        if let Some((pt_p, pt_q)) = find_basis(&curve, p, &n.to_biguint().unwrap()) {
            return Ok(TorsionBasis { p, base: e.clone(), emb, curve, pt_p, pt_q, trace: a });
        }
    }
    Err(Error::Invariant(format!("no {p}-torsion basis found")))
}

/// Whether E[p] ⊆ E(F_{q^d}) for the base field F_q.
pub fn has_full_torsion(e: &Curve<Fq>, p: u64, d: u64) -> Result<bool> {
    let q = field_size(&e.f);
    let total = e.f.degree() * d as usize;
    if total > MAX_TORSION_DEGREE {
        return Err(Error::InvalidParameter(format!("extension degree {total} over the prime field is too large")));
    }
    let a = trace_of_frobenius(e);
    let n: BigInt = BigInt::from(q).pow(d as u32) + 1 - trace_over_extension(a, q, d as usize);
    let big = make_ext(e.f.p(), total)?;
    let curve = e.base_change(&Embedding::new(&e.f, &big)?);
    Ok(find_basis(&curve, p, &n.to_biguint().unwrap()).is_some())
}

/// Two independent points of order p, given N = #E(K).
fn find_basis(e: &Curve<Fq>, p: u64, n: &BigUint) -> Option<(Pt<Fq>, Pt<Fq>)> {
    let pb = BigUint::from(p);
    let mut m = n.clone();
    let mut v = 0u32;
    while (&m % &pb).is_zero() {
        m /= &pb;
        v += 1;
    }
    if v < 2 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut sylow = || e.mul_big(&e.random_point(&mut rng), &m);
    // start from the sample of largest order among a few
    let mut r1 = Point::Inf;
    let mut k1 = 0;
    for _ in 0..8 {
        let r = sylow();
        let k = e.p_order_exponent(&r, p, v).unwrap();
        if k > k1 {
            (r1, k1) = (r, k);
        }
    }
    if k1 == 0 {
        return None;
    }
    find_basis_from(e, p, v, r1, &mut sylow)
}

fn find_basis_from(
    e: &Curve<Fq>,
    p: u64,
    v: u32,
    r1: Pt<Fq>,
    sylow: &mut dyn FnMut() -> Pt<Fq>,
) -> Option<(Pt<Fq>, Pt<Fq>)> {
    let pb = BigUint::from(p);
    let k1 = e.p_order_exponent(&r1, p, v).unwrap();
    let pt_p = e.mul_big(&r1, &pb.pow(k1 - 1));
    let multiples: Vec<Pt<Fq>> = (0..p).map(|c| e.mul_i64(&pt_p, c as i64)).collect();
    for _ in 0..40 {
        let mut r2 = sylow();
        loop {
            let k = e.p_order_exponent(&r2, p, v).unwrap();
            if k == 0 {
                break;
            }
            if k > k1 {
                return find_basis_from(e, p, v, r2, sylow);
            }
            let t = e.mul_big(&r2, &pb.pow(k - 1));
            match multiples.iter().position(|x| *x == t) {
                None => return Some((pt_p, t)),
                Some(c) => {
                    let shift = e.mul_big(&r1, &(BigUint::from(c as u64) * pb.pow(k1 - k)));
                    r2 = e.sub(&r2, &shift);
                }
            }
        }
    }
    None
}

impl TorsionBasis {
    /// Degree of K over the base field.
    pub fn degree(&self) -> u64 {
        (self.emb.big.degree() / self.emb.small.degree()) as u64
    }

    /// The field K.
    pub fn field(&self) -> &Fq {
        &self.emb.big
    }

    /// u·P + v·Q.
    pub fn combo(&self, u: u64, v: u64) -> Pt<Fq> {
        let e = &self.curve;
        e.add(&e.mul_i64(&self.pt_p, u as i64), &e.mul_i64(&self.pt_q, v as i64))
    }

    /// A generator of the pearl with the given slope: P + sQ or Q.
    pub fn generator(&self, s: ProjPoint) -> Pt<Fq> {
        let (u, v) = s.to_vec();
        self.combo(u, v)
    }

    /// Coordinates (u, v) with t = u·P + v·Q, if t ∈ E[p].
    pub fn dlog(&self, t: &Pt<Fq>) -> Option<(u64, u64)> {
        let e = &self.curve;
        let mut qs: HashMap<Pt<Fq>, u64> = HashMap::new();
        let mut acc = Point::Inf;
        for v in 0..self.p {
            qs.insert(acc.clone(), v);
            acc = e.add(&acc, &self.pt_q);
        }
        let mut cur = t.clone();
        for u in 0..self.p {
            if let Some(&v) = qs.get(&cur) {
                return Some((u, v));
            }
            cur = e.sub(&cur, &self.pt_p);
        }
        None
    }

    /// Matrix (acting on coordinate columns) of a map given on P and Q.
    pub fn matrix_of(&self, img_p: &Pt<Fq>, img_q: &Pt<Fq>) -> Result<Mat2> {
        let err = || Error::Invariant("image is not a p-torsion point".into());
        let (a, c) = self.dlog(img_p).ok_or_else(err)?;
        let (b, d) = self.dlog(img_q).ok_or_else(err)?;
        Ok(Mat2::new(self.p, [a as i64, b as i64, c as i64, d as i64]))
    }

    /// Kernel polynomial over K of the pearl with the given slope.
    pub fn kernel_poly_in_k(&self, s: ProjPoint) -> Poly<Fq> {
        let e = &self.curve;
        let g = self.generator(s);
        let mut xs = Vec::new();
        let mut cur = g.clone();
        for _ in 0..(self.p - 1) / 2 {
            xs.push(cur.x().expect("nonzero torsion point").clone());
            cur = e.add(&cur, &g);
        }
        PolyRing::new(self.field()).from_roots(&xs)
    }

    /// A root of unity of the given order (2 → i with i² = −1, 3 → ζ) in K.
    pub fn root_of_unity(&self, kind: AutKind) -> Option<Fe> {
        let k = self.field();
        let m = match kind {
            AutKind::I => vec![k.one(), k.zero(), k.one()],
            AutKind::Zeta => vec![k.one(), k.one(), k.one()],
        };
        roots(k, &m).into_iter().next()
    }

    /// Matrix of an automorphism in this basis, using the given root in K.
    pub fn aut_matrix(&self, kind: AutKind, root: &Fe) -> Result<Mat2> {
        let f = self.field();
        let apply = |pt: &Pt<Fq>| apply_aut(f, kind, root, pt);
        self.matrix_of(&apply(&self.pt_p), &apply(&self.pt_q))
    }
}

/// The matrix of the q-power Frobenius on E[p] in a torsion basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobMatrix {
    /// Torsion prime.
    pub p: u64,
    /// Matrix acting on coordinate columns (u, v) of u·P + v·Q.
    pub m: Mat2,
    /// Trace of Frobenius over the base field.
    pub trace: i64,
    /// Size of the base field.
    pub q: u64,
}

/// Matrix of the base-field Frobenius in the basis `b`.
pub fn frobenius_matrix(b: &TorsionBasis) -> Result<FrobMatrix> {
    let k = b.field();
    let kb = b.base.f.degree();
    let frob = |pt: &Pt<Fq>| match pt {
        Point::Inf => Point::Inf,
        Point::Aff(x, y) => Point::Aff(k.frob(x, kb), k.frob(y, kb)),
    };
    let m = b.matrix_of(&frob(&b.pt_p), &frob(&b.pt_q))?;
    let q = field_size(&b.base.f);
    let p = b.p;
    if m.trace() != b.trace.rem_euclid(p as i64) as u64 || m.det() != q % p {
        return Err(Error::Invariant("Frobenius matrix has wrong trace or determinant".into()));
    }
    Ok(FrobMatrix { p, m, trace: b.trace, q })
}

/// Which extra automorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AutKind {
    /// [i]: (x, y) ↦ (−x, i·y) on y² = x³ + a4·x.
    I,
    /// [ζ]: (x, y) ↦ (ζ·x, y) on y² = x³ + a6.
    Zeta,
}

/// Image of a point under [i] or [ζ] with the given root of unity.
pub fn apply_aut(f: &Fq, kind: AutKind, root: &Fe, pt: &Pt<Fq>) -> Pt<Fq> {
    match pt {
        Point::Inf => Point::Inf,
        Point::Aff(x, y) => match kind {
            AutKind::I => Point::Aff(f.neg(x), f.mul(root, y)),
            AutKind::Zeta => Point::Aff(f.mul(root, x), y.clone()),
        },
    }
}

/// An extra automorphism, defined over the smallest extension of the base
/// field containing the needed root of unity.
#[derive(Clone, Debug)]
pub struct CurveAut {
    /// Kind of automorphism.
    pub kind: AutKind,
    /// Base field into the field of definition.
    pub emb: Embedding,
    /// The curve over the field of definition.
    pub curve: Curve<Fq>,
    /// i or ζ in the field of definition.
    pub root: Fe,
}

impl CurveAut {
    /// Field of definition.
    pub fn field(&self) -> &Fq {
        &self.emb.big
    }

    /// Image of a point over the field of definition.
    pub fn apply(&self, pt: &Pt<Fq>) -> Pt<Fq> {
        apply_aut(self.field(), self.kind, &self.root, pt)
    }

    /// The kernel polynomial of the image subgroup, for a monic kernel
    /// polynomial over the field of definition.
    pub fn act_on_kernel(&self, g: &[Fe]) -> Poly<Fq> {
        let f = self.field();
        let r = PolyRing::new(f);
        // roots x ↦ −x or x ↦ ζx; the image is c^{-d}·g(c·x) with c = −1 or ζ^{-1}
        let c = match self.kind {
            AutKind::I => f.neg(&f.one()),
            AutKind::Zeta => f.inv(&self.root).unwrap(),
        };
        let mut pw = f.one();
        let scaled: Vec<Fe> = g
            .iter()
            .map(|a| {
                let v = f.mul(a, &pw);
                pw = f.mul(&pw, &c);
                v
            })
            .collect();
        r.monic(&scaled)
    }
}

/// The extra automorphism of a curve with j = 0 ([ζ]) or j = 1728 ([i]).
pub fn extra_automorphisms(e: &Curve<Fq>) -> Result<Vec<CurveAut>> {
    let f = &e.f;
    let kind = match e.is_special() {
        Some(0) => AutKind::Zeta,
        Some(_) => AutKind::I,
        None => return Err(Error::NoExtraAutomorphisms),
    };
    let minpoly = |k: &Fq| match kind {
        AutKind::I => vec![k.one(), k.zero(), k.one()],
        AutKind::Zeta => vec![k.one(), k.one(), k.one()],
    };
    let (big, emb) = match roots(f, &minpoly(f)).is_empty() {
        false => (f.clone(), Embedding::new(f, f)?),
        true => {
            let big = make_ext(f.p(), 2 * f.degree())?;
            let emb = Embedding::new(f, &big)?;
            (big, emb)
        }
    };
    let root = roots(&big, &minpoly(&big)).into_iter().next().expect("root of unity in quadratic extension");
    Ok(vec![CurveAut { kind, curve: e.base_change(&emb), emb, root }])
}

#[cfg(test)]
fn killed(e: &Curve<Fq>, pt: &Pt<Fq>, n: u64) -> bool {
    e.mul_big(pt, &BigUint::from(n)).is_inf()
}
