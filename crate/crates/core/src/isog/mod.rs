//! Kernel polynomials of the p+1 cyclic subgroups of order p, Vélu
//! isogenies, the p-isogeny field, rational p-isogeny counts and
//! endomorphism checks.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ec::{
    division_polynomial, has_full_torsion, mult_x_all, trace_of_frobenius, Curve, FieldRing, Point, Pt,
};
use crate::error::{Error, Result};
use crate::ff::{factor, make_ext, roots, Embedding, Fe, Field, Fq, Poly, PolyRing, DEFAULT_SEED};
use crate::util::{is_prime, lcm, order_mod};

/// Largest absolute degree of a splitting field used by `enumerate_p_subgroups`.
pub const MAX_SPLIT_DEGREE: usize = 240;

/// Monic kernel polynomial of a cyclic subgroup of order p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelPoly {
    /// Order of the subgroup.
    pub p: u64,
    /// Field of the coefficients.
    pub field: Fq,
    /// Coefficients, low degree first, degree (p−1)/2.
    pub poly: Poly<Fq>,
}

impl KernelPoly {
    /// The same polynomial over a larger field.
    pub fn base_change(&self, emb: &Embedding) -> KernelPoly {
        KernelPoly { p: self.p, field: emb.big.clone(), poly: emb.forward_poly(&self.poly) }
    }

    /// Coefficient lists over F_ℓ (low degree first) for output.
    pub fn coeff_lists(&self) -> Vec<Vec<u64>> {
        self.poly.iter().map(|c| self.field.coeffs(c)).collect()
    }
}

fn check_prime(e: &Curve<Fq>, p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) || p == e.f.p() {
        return Err(Error::InvalidParameter(format!("{p} must be an odd prime other than the characteristic")));
    }
    Ok(())
}

/// The set {x([m]P) : 1 ≤ m ≤ (p−1)/2} for x = x(P) of a point of order p.
pub fn subgroup_xs(e: &Curve<Fq>, x: &Fe, p: u64) -> Vec<Fe> {
    let f = &e.f;
    mult_x_all(&FieldRing(f), x, &e.a4, &e.a6, ((p - 1) / 2) as usize)
        .into_iter()
        .map(|(n, d)| f.div(&n, &d))
        .collect()
}

/// Least d dividing `max` with every coefficient in the subfield of degree k·d.
fn descent_degree(f: &Fq, k: usize, max: usize, coeffs: &[&Fe]) -> usize {
    (1..=max)
        .filter(|d| max % d == 0)
        .find(|&d| coeffs.iter().all(|c| f.in_subfield(c, k * d)))
        .unwrap_or(max)
}

/// Pull polynomials over `base_big.big` down to the canonical field of
/// degree k·d, through an embedding compatible with `base_big`.
pub fn descend(base_big: &Embedding, d: usize, polys: &[Poly<Fq>]) -> Result<(Embedding, Vec<Poly<Fq>>)> {
    let base = &base_big.small;
    let small = make_ext(base.p(), base.degree() * d)?;
    let base_small = Embedding::new(base, &small)?;
    let emb = Embedding::compatible(&base_small, base_big)?;
    let out = polys
        .iter()
        .map(|g| emb.back_poly(g).ok_or_else(|| Error::Invariant("coefficient outside the descent field".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok((base_small, out))
}

/// The p+1 kernel polynomials of E, over the p-isogeny field, sorted by
/// coefficients. Roots of ψ_p are clustered by x-only subgroup closure.
pub fn enumerate_p_subgroups(e: &Curve<Fq>, p: u64) -> Result<Vec<KernelPoly>> {
    check_prime(e, p)?;
    let f = &e.f;
    let k = f.degree();
    let psi = division_polynomial(e, p as usize);
    let facs = factor(f, &psi);
    let d = facs.iter().fold(1u64, |acc, (g, _)| lcm(acc, (g.len() - 1) as u64)) as usize;
    if k * d > MAX_SPLIT_DEGREE {
        return Err(Error::InvalidParameter(format!("splitting field of psi_{p} has degree {} (limit {MAX_SPLIT_DEGREE})", k * d)));
    }
    let big = make_ext(f.p(), k * d)?;
    let emb = Embedding::new(f, &big)?;
    let eb = e.base_change(&emb);
    let mut all: BTreeSet<Fe> = BTreeSet::new();
    for (g, _) in &facs {
        all.extend(roots(&big, &emb.forward_poly(g)));
    }
    let r = PolyRing::new(&big);
    let mut seen: BTreeSet<Fe> = BTreeSet::new();
    let mut polys = Vec::new();
    for x0 in &all {
        if seen.contains(x0) {
            continue;
        }
        let xs = subgroup_xs(&eb, x0, p);
        for x in &xs {
            if !all.contains(x) || !seen.insert(x.clone()) {
                return Err(Error::Invariant("subgroup closure left the root set".into()));
            }
        }
        polys.push(r.from_roots(&xs));
    }
    if polys.len() as u64 != p + 1 {
        return Err(Error::Invariant(format!("found {} subgroups of order {p}", polys.len())));
    }
    let coeffs: Vec<&Fe> = polys.iter().flatten().collect();
    let dd = descent_degree(&big, k, d, &coeffs);
    let (base_small, mut polys) = descend(&emb, dd, &polys)?;
    polys.sort();
    Ok(polys.into_iter().map(|poly| KernelPoly { p, field: base_small.big.clone(), poly }).collect())
}

/// A separable isogeny given by Vélu's formulas, normalized so that the
/// pullback of the codomain's invariant differential is the domain's.
#[derive(Clone, Debug)]
pub struct IsogenyStep {
    /// Domain.
    pub domain: Curve<Fq>,
    /// Codomain.
    pub codomain: Curve<Fq>,
    /// Kernel polynomial.
    pub kernel: KernelPoly,
    /// Numerator N of X = N/g².
    num: Poly<Fq>,
}

/// Power sums p1, p2, p3 of the roots of a monic polynomial of degree d.
fn power_sums(f: &Fq, g: &[Fe]) -> (Fe, Fe, Fe) {
    let d = g.len() - 1;
    let c = |i: usize| if i <= d { g[d - i].clone() } else { f.zero() };
    let e1 = f.neg(&c(1));
    let e2 = c(2);
    let e3 = f.neg(&c(3));
    let p1 = e1.clone();
    let p2 = f.sub(&f.sqr(&e1), &f.mul_i64(&e2, 2));
    let p3 = f.add(&f.sub(&f.mul(&f.sqr(&e1), &e1), &f.mul_i64(&f.mul(&e1, &e2), 3)), &f.mul_i64(&e3, 3));
    (p1, p2, p3)
}

/// The codomain and rational map of the isogeny with the given kernel.
pub fn velu_codomain(e: &Curve<Fq>, k: &KernelPoly) -> Result<IsogenyStep> {
    let f = &e.f;
    if *f != k.field {
        return Err(Error::Mismatch("kernel and curve over different fields".into()));
    }
    let d = k.poly.len() - 1;
    let (p1, p2, p3) = power_sums(f, &k.poly);
    let di = d as i64;
    let v = f.add(&f.mul_i64(&p2, 6), &f.mul_i64(&e.a4, 2 * di));
    let w = f.add(
        &f.add(&f.mul_i64(&p3, 10), &f.mul_i64(&f.mul(&e.a4, &p1), 6)),
        &f.mul_i64(&e.a6, 4 * di),
    );
    let a4 = f.sub(&e.a4, &f.mul_i64(&v, 5));
    let a6 = f.sub(&e.a6, &f.mul_i64(&w, 7));
    let codomain = Curve::new(f, a4, a6)?;
    let r = PolyRing::new(f);
    let g = &k.poly;
    let g1 = r.derivative(g);
    let g2 = r.derivative(&g1);
    let cub = vec![e.a6.clone(), e.a4.clone(), f.zero(), f.one()];
    let cub1 = r.derivative(&cub);
    // N = ((2d+1)x − 2p1)g² − 2f'g'g + 4f(g'² − g g'')
    let lin = vec![f.mul_i64(&p1, -2), f.from_i64(2 * di + 1)];
    let t1 = r.mul(&lin, &r.sqr(g));
    let t2 = r.scale(&r.mul(&cub1, &r.mul(&g1, g)), &f.from_i64(2));
    let t3 = r.scale(&r.mul(&cub, &r.sub(&r.sqr(&g1), &r.mul(g, &g2))), &f.from_i64(4));
    let num = r.add(&r.sub(&t1, &t2), &t3);
    Ok(IsogenyStep { domain: e.clone(), codomain, kernel: k.clone(), num })
}

impl IsogenyStep {
    /// Image of a point over the step's field.
    pub fn apply(&self, pt: &Pt<Fq>) -> Pt<Fq> {
        let f = &self.domain.f;
        let r = PolyRing::new(f);
        let Point::Aff(x, y) = pt else { return Point::Inf };
        let g = &self.kernel.poly;
        let gx = r.eval(g, x);
        if f.is_zero(&gx) {
            return Point::Inf;
        }
        let nx = r.eval(&self.num, x);
        let nx1 = r.eval(&r.derivative(&self.num), x);
        let g1x = r.eval(&r.derivative(g), x);
        let gi = f.inv(&gx).unwrap();
        let gi2 = f.sqr(&gi);
        let xx = f.mul(&nx, &gi2);
        // Y = y·(N'g − 2Ng')/g³
        let dn = f.sub(&f.mul(&nx1, &gx), &f.mul_i64(&f.mul(&nx, &g1x), 2));
        let yy = f.mul(y, &f.mul(&dn, &f.mul(&gi2, &gi)));
        Point::Aff(xx, yy)
    }

    /// The same isogeny over a larger field.
    pub fn base_change(&self, emb: &Embedding) -> IsogenyStep {
        IsogenyStep {
            domain: self.domain.base_change(emb),
            codomain: self.codomain.base_change(emb),
            kernel: self.kernel.base_change(emb),
            num: emb.forward_poly(&self.num),
        }
    }
}

/// An isogeny E → E′ followed by the isomorphism E′ → E, (x, y) ↦ (u²x, u³y).
#[derive(Clone, Debug)]
pub struct Endomorphism {
    /// The isogeny part.
    pub step: IsogenyStep,
    /// Isomorphism scalar; the endomorphism pulls ω back to u⁻¹·ω.
    pub u: Fe,
}

impl Endomorphism {
    /// Compose, checking that (x, y) ↦ (u²x, u³y) maps the codomain onto the domain.
    pub fn new(step: IsogenyStep, u: Fe) -> Result<Self> {
        let f = &step.domain.f;
        let u2 = f.sqr(&u);
        let u4 = f.sqr(&u2);
        let u6 = f.mul(&u4, &u2);
        if f.mul(&u4, &step.codomain.a4) != step.domain.a4 || f.mul(&u6, &step.codomain.a6) != step.domain.a6 {
            return Err(Error::Normalization("scalar does not map the codomain onto the domain".into()));
        }
        Ok(Endomorphism { step, u })
    }

    /// Image of a point.
    pub fn apply(&self, pt: &Pt<Fq>) -> Pt<Fq> {
        let f = &self.step.domain.f;
        match self.step.apply(pt) {
            Point::Inf => Point::Inf,
            Point::Aff(x, y) => {
                let u2 = f.sqr(&self.u);
                Point::Aff(f.mul(&u2, &x), f.mul(&f.mul(&u2, &self.u), &y))
            }
        }
    }

    /// The same endomorphism over a larger field.
    pub fn base_change(&self, emb: &Embedding) -> Endomorphism {
        Endomorphism { step: self.step.base_change(emb), u: emb.forward(&self.u) }
    }
}

/// Whether θ² − [t]θ + [n] kills `samples` seeded random points and the extra points.
pub fn verify_endomorphism(
    e: &Curve<Fq>,
    theta: &dyn Fn(&Pt<Fq>) -> Pt<Fq>,
    t: i64,
    n: i64,
    samples: usize,
    extra: &[Pt<Fq>],
) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut pts: Vec<Pt<Fq>> = (0..samples).map(|_| e.random_point(&mut rng)).collect();
    pts.extend(extra.iter().cloned());
    pts.iter().all(|pt| {
        let a = theta(pt);
        let b = theta(&a);
        let s = e.add(&e.sub(&b, &e.mul_i64(&a, t)), &e.mul_i64(pt, n));
        s.is_inf()
    })
}

/// Frobenius data on E[p] from the trace: (a mod p, q mod p, δ).
pub fn frobenius_class(e: &Curve<Fq>, p: u64) -> (u64, u64, i8) {
    let a = trace_of_frobenius(e).rem_euclid(p as i64) as u64;
    let q = (e.f.order_u128() % p as u128) as u64;
    let disc = (a * a + 4 * (p - q)) % p;
    (a, q, crate::ff::legendre(disc as i64, p))
}

/// Whether Frobenius acts on E[p] as a scalar (only possible when δ = 0).
pub fn frobenius_is_scalar(e: &Curve<Fq>, p: u64) -> Result<bool> {
    check_prime(e, p)?;
    let (a, _, delta) = frobenius_class(e, p);
    if delta != 0 {
        return Ok(false);
    }
    let lambda = a * crate::util::inv_mod(2, p) % p;
    has_full_torsion(e, p, order_mod(lambda, p))
}

/// Degree over the base field of the p-isogeny field: the order of the
/// Frobenius image in PGL₂(F_p).
pub fn p_isogeny_field_degree(e: &Curve<Fq>, p: u64) -> Result<u64> {
    check_prime(e, p)?;
    let (t, n, delta) = frobenius_class(e, p);
    if delta == 0 {
        return Ok(if frobenius_is_scalar(e, p)? { 1 } else { p });
    }
    // least k with X^k ∈ F_p in F_p[X]/(X² − tX + n)
    let (mut c0, mut c1) = (0u64, 1u64);
    let mut k = 1;
    while c1 != 0 {
        (c0, c1) = ((p - n) * c1 % p, (c0 + t * c1) % p);
        k += 1;
    }
    Ok(k)
}

/// Number of p-isogenies from E defined over the base field.
pub fn count_rational_p_isogenies(e: &Curve<Fq>, p: u64) -> Result<u64> {
    check_prime(e, p)?;
    let (_, _, delta) = frobenius_class(e, p);
    Ok(match delta {
        1 => 2,
        -1 => 0,
        _ => {
            if frobenius_is_scalar(e, p)? {
                p + 1
            } else {
                1
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ec::j_invariant;

    fn f13_curve() -> Curve<Fq> {
        Curve::from_i64(&Fq::prime(13), 1, 4).unwrap()
    }

    #[test]
    fn six_pearls_on_supersingular_f13() {
        let e = f13_curve();
        let ks = enumerate_p_subgroups(&e, 5).unwrap();
        assert_eq!(ks.len(), 6);
        assert_eq!(ks[0].field.degree(), 2);
        let r = PolyRing::new(&ks[0].field);
        // the product is ψ_5 up to the leading coefficient 5
        let mut prod = vec![ks[0].field.one()];
        for k in &ks {
            assert_eq!(k.poly.len(), 3);
            prod = r.mul(&prod, &k.poly);
        }
        let emb = Embedding::new(&e.f, &ks[0].field).unwrap();
        let psi = emb.forward_poly(&division_polynomial(&e, 5));
        assert_eq!(r.monic(&psi), prod);
        for k in &ks {
            let step = velu_codomain(&e.base_change(&emb), k).unwrap();
            assert_eq!(j_invariant(&step.codomain), ks[0].field.from_i64(5));
        }
    }

    #[test]
    fn velu_is_a_homomorphism() {
        let f = Fq::prime(101);
        let e = Curve::from_i64(&f, 2, 3).unwrap();
        for p in [3u64, 5, 7] {
            let Ok(ks) = enumerate_p_subgroups(&e, p) else { continue };
            let k = &ks[0];
            let eb = e.base_change(&Embedding::new(&f, &k.field).unwrap());
            let step = velu_codomain(&eb, k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..5 {
                let a = eb.random_point(&mut rng);
                let b = eb.random_point(&mut rng);
                let (fa, fb) = (step.apply(&a), step.apply(&b));
                assert!(step.codomain.contains(&fa));
                assert_eq!(step.apply(&eb.add(&a, &b)), step.codomain.add(&fa, &fb));
            }
        }
    }

    #[test]
    fn three_torsion_degree_one() {
        let f = Fq::prime(31);
        let e = Curve::from_i64(&f, 4, 5).unwrap();
        let ks = enumerate_p_subgroups(&e, 3).unwrap();
        assert_eq!(count_rational_p_isogenies(&e, 3).unwrap(), 4);
        assert_eq!(p_isogeny_field_degree(&e, 3).unwrap(), 1);
        assert_eq!(ks.len(), 4);
        assert!(ks.iter().all(|k| k.poly.len() == 2));
    }

    #[test]
    fn isogeny_field_degrees() {
        let e = f13_curve();
        assert_eq!(p_isogeny_field_degree(&e, 5).unwrap(), 2);
        assert_eq!(count_rational_p_isogenies(&e, 5).unwrap(), 0);
        assert_eq!(count_rational_p_isogenies(&e, 7).unwrap(), 2);
    }

    #[test]
    fn scalar_and_frobenius_endomorphisms() {
        let f = Fq::prime(43);
        let e = Curve::from_i64(&f, 5, 7).unwrap();
        let m = 3;
        assert!(verify_endomorphism(&e, &|pt| e.mul_i64(pt, m), 2 * m, m * m, 10, &[]));
        let a = trace_of_frobenius(&e);
        let k = make_ext(43, 2).unwrap();
        let ek = e.base_change(&Embedding::new(&f, &k).unwrap());
        let frob = |pt: &Pt<Fq>| match pt {
            Point::Inf => Point::Inf,
            Point::Aff(x, y) => Point::Aff(k.frob(x, 1), k.frob(y, 1)),
        };
        assert!(verify_endomorphism(&ek, &frob, a, 43, 10, &[]));
        assert!(!verify_endomorphism(&ek, &frob, a + 1, 43, 10, &[]));
    }
}
