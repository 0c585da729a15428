//! Necklaces on concrete curves over finite fields: pearls with slope
//! coordinates, the Frobenius action on them, rational necklaces, points of
//! the modular curve above a j-invariant, and equality of such points.

mod render;

use std::collections::{BTreeSet, HashMap};

use serde_json::{json, Value};

use crate::cartan::{act, canonical_gamma, enumerate_all_necklaces, rational_necklaces, Gamma, Necklace, Pgl2, ProjPoint, Relation};
use crate::ec::{
    curve_from_j, extra_automorphisms, frobenius_matrix, j_invariant, torsion_basis_with, AutKind, Curve, FrobMatrix,
    TorsionBasis,
};
use crate::error::{Error, Result};
use crate::ff::{make_ext, roots, Embedding, Fe, Field, Fq, Poly, PolyRing};
use crate::isog::{descend, velu_codomain, KernelPoly};

pub use render::{render_necklace, DiagramFormat};

/// A pearl: kernel polynomial, slope in the torsion basis, codomain j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeoPearl {
    /// Kernel polynomial over the p-isogeny field.
    pub kernel: KernelPoly,
    /// Slope of the subgroup in the torsion basis.
    pub slope: ProjPoint,
    /// j-invariant of E/C over the p-isogeny field.
    pub j: Fe,
}

/// All pearls of a curve with the data used to build them.
#[derive(Clone, Debug)]
pub struct PearlSet {
    /// The prime.
    pub p: u64,
    /// The curve over its base field.
    pub curve: Curve<Fq>,
    /// Torsion basis over the p-torsion field.
    pub basis: TorsionBasis,
    /// Frobenius on E[p] in the basis.
    pub frob: FrobMatrix,
    /// Base field into the p-isogeny field.
    pub iso: Embedding,
    /// Pearls indexed by `ProjPoint::index`.
    pub pearls: Vec<GeoPearl>,
}

/// Pearls on E from a torsion basis over an extension of degree divisible by `extra`.
pub fn pearl_set_with(e: &Curve<Fq>, p: u64, extra: u64) -> Result<PearlSet> {
    let basis = torsion_basis_with(e, p, extra)?;
    let frob = frobenius_matrix(&basis)?;
    let d = Pgl2::from_mat(frob.m)?.order() as usize;
    let slopes = ProjPoint::all(p);
    let in_k: Vec<Poly<Fq>> = slopes.iter().map(|&s| basis.kernel_poly_in_k(s)).collect();
    let (iso, polys) = descend(&basis.emb, d, &in_k)?;
    let e_iso = e.base_change(&iso);
    let pearls = slopes
        .into_iter()
        .zip(polys)
        .map(|(slope, poly)| {
            let kernel = KernelPoly { p, field: iso.big.clone(), poly };
            let j = j_invariant(&velu_codomain(&e_iso, &kernel)?.codomain);
            Ok(GeoPearl { kernel, slope, j })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PearlSet { p, curve: e.clone(), basis, frob, iso, pearls })
}

/// The p+1 pearls of E.
pub fn pearl_set(e: &Curve<Fq>, p: u64) -> Result<PearlSet> {
    pearl_set_with(e, p, 1)
}

/// The p+1 pearls of E with slope coordinates in one torsion basis.
pub fn pearls(e: &Curve<Fq>, p: u64) -> Result<Vec<GeoPearl>> {
    Ok(pearl_set(e, p)?.pearls)
}

/// Coefficientwise base-field Frobenius of a kernel polynomial.
fn frob_poly(base_degree: usize, k: &KernelPoly) -> Poly<Fq> {
    k.poly.iter().map(|c| k.field.frob(c, base_degree)).collect()
}

impl PearlSet {
    /// Frobenius as an element of PGL₂(F_p) acting on slopes.
    pub fn frobenius(&self) -> Pgl2 {
        Pgl2::from_mat(self.frob.m).expect("Frobenius is invertible")
    }

    /// Pearl with the given slope.
    pub fn pearl(&self, s: ProjPoint) -> &GeoPearl {
        &self.pearls[s.index(self.p)]
    }

    /// Permutation of slopes induced by coefficient Frobenius on kernel polynomials.
    pub fn coefficient_frobenius(&self) -> Result<Vec<ProjPoint>> {
        let by_poly: HashMap<&Poly<Fq>, ProjPoint> = self.pearls.iter().map(|g| (&g.kernel.poly, g.slope)).collect();
        let k = self.curve.f.degree();
        self.pearls
            .iter()
            .map(|g| {
                by_poly
                    .get(&frob_poly(k, &g.kernel))
                    .copied()
                    .ok_or_else(|| Error::Invariant("Frobenius image of a kernel polynomial is not a pearl".into()))
            })
            .collect()
    }

    /// The geometric necklace realizing an abstract one.
    pub fn realize(&self, n: &Necklace) -> GeoNecklace {
        GeoNecklace {
            curve: self.curve.clone(),
            necklace: n.clone(),
            pearls: n.order.iter().map(|&s| self.pearl(s).clone()).collect(),
            field: self.iso.big.clone(),
        }
    }
}

/// Frobenius on pearl coordinates, checked against coefficient Frobenius.
pub fn frobenius_pearl_action(e: &Curve<Fq>, p: u64) -> Result<Pgl2> {
    let set = pearl_set(e, p)?;
    let h = set.frobenius();
    let perm = set.coefficient_frobenius()?;
    if ProjPoint::all(p).into_iter().any(|s| h.act(s) != perm[s.index(p)]) {
        return Err(Error::Invariant("matrix and coefficient Frobenius disagree on pearls".into()));
    }
    Ok(h)
}

/// A necklace on a concrete curve: the abstract necklace and its pearls in order.
#[derive(Clone, Debug)]
pub struct GeoNecklace {
    /// The curve over its base field.
    pub curve: Curve<Fq>,
    /// The abstract necklace on slopes.
    pub necklace: Necklace,
    /// Pearls in necklace order.
    pub pearls: Vec<GeoPearl>,
    /// The p-isogeny field.
    pub field: Fq,
}

/// JSON value of a field element: an integer over a prime field, otherwise its coefficient list.
pub fn elem_json(f: &Fq, a: &Fe) -> Value {
    match f.to_prime(a) {
        Some(v) if f.degree() == 1 => json!(v),
        _ => json!(f.coeffs(a)),
    }
}

/// JSON description of a curve.
pub fn curve_json(e: &Curve<Fq>) -> Value {
    let f = &e.f;
    json!({
        "p": f.p(),
        "k": f.degree(),
        "modulus": f.modulus(),
        "a4": elem_json(f, &e.a4),
        "a6": elem_json(f, &e.a6),
        "j": elem_json(f, &j_invariant(e)),
    })
}

impl GeoNecklace {
    /// The prime.
    pub fn p(&self) -> u64 {
        self.necklace.p
    }

    /// JSON form.
    pub fn to_json(&self) -> Value {
        let f = &self.field;
        let pearls: Vec<Value> = self
            .pearls
            .iter()
            .map(|g| {
                json!({
                    "kernel": g.kernel.poly.iter().map(|c| elem_json(f, c)).collect::<Vec<_>>(),
                    "slope": g.slope,
                    "j": elem_json(f, &g.j),
                })
            })
            .collect();
        json!({
            "curve": curve_json(&self.curve),
            "p": self.necklace.p,
            "gamma": [self.necklace.gamma.0, self.necklace.gamma.1],
            "order": self.necklace.order,
            "pearls": pearls,
            "isogeny_field": { "degree": f.degree(), "modulus": f.modulus() },
        })
    }

    /// Permutation of positions induced by base-field Frobenius on kernel polynomials.
    pub fn frobenius_positions(&self) -> Result<Vec<usize>> {
        let pos: HashMap<&Poly<Fq>, usize> = self.pearls.iter().enumerate().map(|(i, g)| (&g.kernel.poly, i)).collect();
        let k = self.curve.f.degree();
        self.pearls
            .iter()
            .map(|g| {
                pos.get(&frob_poly(k, &g.kernel))
                    .copied()
                    .ok_or_else(|| Error::Invariant("Frobenius image of a kernel polynomial is not a pearl".into()))
            })
            .collect()
    }
}

/// Necklaces on E fixed or flipped by Frobenius, for a given γ.
pub fn rational_geo_necklaces_for(set: &PearlSet, g: &Gamma) -> Result<Vec<GeoNecklace>> {
    Ok(rational_necklaces(&set.frobenius(), g)?.iter().map(|n| set.realize(n)).collect())
}

/// Necklaces on E defined over its base field, for the canonical γ.
pub fn rational_geo_necklaces(e: &Curve<Fq>, p: u64) -> Result<Vec<GeoNecklace>> {
    rational_geo_necklaces_for(&pearl_set(e, p)?, &canonical_gamma(p)?)
}

/// A point of the modular curve over the base field above a j-invariant,
/// as the automorphism orbit of necklaces representing it.
#[derive(Clone, Debug)]
pub struct XPoint {
    /// The j-invariant.
    pub j: Fe,
    /// Necklaces on one curve with this j, permuted by its automorphisms.
    pub orbit: Vec<GeoNecklace>,
}

/// The automorphism [i] or [ζ] of E as an element of PGL₂ on slopes, with
/// pearls computed over a field containing the needed root of unity.
pub fn automorphism_action(e: &Curve<Fq>, p: u64) -> Result<(PearlSet, Pgl2, AutKind)> {
    let aut = extra_automorphisms(e)?.remove(0);
    let extra = (aut.field().degree() / e.f.degree()) as u64;
    let set = pearl_set_with(e, p, extra)?;
    let root = set
        .basis
        .root_of_unity(aut.kind)
        .ok_or_else(|| Error::Invariant("root of unity missing from torsion field".into()))?;
    let a = Pgl2::from_mat(set.basis.aut_matrix(aut.kind, &root)?)?;
    Ok((set, a, aut.kind))
}

/// Points of the modular curve for p over the base field with the given j.
pub fn xpoints_above_j(f: &Fq, j: &Fe, p: u64) -> Result<Vec<XPoint>> {
    xpoints_above_j_for(f, j, &canonical_gamma(p)?)
}

/// As `xpoints_above_j` for a given γ.
pub fn xpoints_above_j_for(f: &Fq, j: &Fe, g: &Gamma) -> Result<Vec<XPoint>> {
    let p = g.p;
    if f.p() < 5 || p < 5 {
        return Err(Error::InvalidParameter("need characteristic and p at least 5".into()));
    }
    let e = curve_from_j(f, j);
    if e.is_special().is_none() {
        let set = pearl_set(&e, p)?;
        return Ok(rational_geo_necklaces_for(&set, g)?
            .into_iter()
            .map(|n| XPoint { j: j.clone(), orbit: vec![n] })
            .collect());
    }
    let (set, a, _) = automorphism_action(&e, p)?;
    let h = set.frobenius();
    let all = enumerate_all_necklaces(g)?;
    let mut done: BTreeSet<Necklace> = BTreeSet::new();
    let mut out = Vec::new();
    for n in all.iter() {
        if done.contains(n) {
            continue;
        }
        let mut orbit: BTreeSet<Necklace> = BTreeSet::new();
        let mut cur = n.clone();
        while orbit.insert(cur.clone()) {
            cur = act(&a, &cur).0;
        }
        done.extend(orbit.iter().cloned());
        let image: BTreeSet<Necklace> = orbit.iter().map(|m| act(&h, m).0).collect();
        if image == orbit {
            out.push(XPoint { j: j.clone(), orbit: orbit.iter().map(|m| set.realize(m)).collect() });
        }
    }
    Ok(out)
}

/// Whether Frobenius maps the necklace to itself.
pub fn is_rational(h: &Pgl2, n: &Necklace) -> bool {
    act(h, n).1 != Relation::Moved
}

/// x ↦ w·x on kernel polynomials: roots scale by w.
fn scale_roots(f: &Fq, g: &[Fe], w: &Fe) -> Poly<Fq> {
    let d = g.len() - 1;
    let mut pw = f.one();
    let mut out = vec![f.zero(); d + 1];
    for i in (0..=d).rev() {
        out[i] = f.mul(&g[i], &pw);
        pw = f.mul(&pw, w);
    }
    out
}

/// Whether two cyclic lists agree up to rotation and reversal.
fn dihedral_eq<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    let m = a.len();
    if m != b.len() {
        return false;
    }
    if m == 0 {
        return true;
    }
    a.iter().enumerate().filter(|(_, x)| **x == b[0]).any(|(s, _)| {
        (0..m).all(|i| a[(s + i) % m] == b[i]) || (0..m).all(|i| a[(s + m - i) % m] == b[i])
    })
}

/// Equality of two points given as necklaces on curves over the same base
/// field: same j, same p-isogeny field, and after an isomorphism of curves
/// (every one is tried, which covers automorphisms) and a Frobenius power,
/// the kernel polynomial lists agree up to rotation and reversal.
pub fn compare_points(a: &GeoNecklace, b: &GeoNecklace) -> Result<bool> {
    if a.p() != b.p() || a.curve.f.p() != b.curve.f.p() {
        return Err(Error::Mismatch("different p or characteristic".into()));
    }
    if a.curve.f != b.curve.f {
        return Err(Error::Mismatch("different base fields".into()));
    }
    if a.necklace.gamma != b.necklace.gamma {
        return Err(Error::Mismatch("necklaces built from different gamma".into()));
    }
    let base = &a.curve.f;
    if j_invariant(&a.curve) != j_invariant(&b.curve) || a.field.degree() != b.field.degree() {
        return Ok(false);
    }
    let (ea, eb) = (&a.curve, &b.curve);
    // w with a4_A = w²·a4_B and a6_A = w³·a6_B
    let (r, special) = match ea.is_special() {
        Some(0) => (6, Some(3)),
        Some(_) => (2, Some(2)),
        None => (1, None),
    };
    let big = make_ext(base.p(), a.field.degree() * r)?;
    let base_big = Embedding::new(base, &big)?;
    let base_iso = Embedding::new(base, &a.field)?;
    let iso_big = Embedding::compatible(&base_iso, &base_big)?;
    let fw = |x: &Fe| base_big.forward(x);
    let ws: Vec<Fe> = match special {
        None => {
            let c4 = big.div(&fw(&ea.a4), &fw(&eb.a4));
            let c6 = big.div(&fw(&ea.a6), &fw(&eb.a6));
            vec![big.div(&c6, &c4)]
        }
        Some(2) => {
            let c = big.div(&fw(&ea.a4), &fw(&eb.a4));
            roots(&big, &[big.neg(&c), big.zero(), big.one()])
        }
        Some(_) => {
            let c = big.div(&fw(&ea.a6), &fw(&eb.a6));
            roots(&big, &[big.neg(&c), big.zero(), big.zero(), big.one()])
        }
    };
    let ka: Vec<Poly<Fq>> = a.pearls.iter().map(|g| iso_big.forward_poly(&g.kernel.poly)).collect();
    let kb: Vec<Poly<Fq>> = b.pearls.iter().map(|g| iso_big.forward_poly(&g.kernel.poly)).collect();
    let steps = big.degree() / base.degree();
    for w in &ws {
        let moved: Vec<Poly<Fq>> = kb.iter().map(|g| scale_roots(&big, g, w)).collect();
        for i in 0..steps {
            let conj: Vec<Poly<Fq>> =
                moved.iter().map(|g| g.iter().map(|c| big.frob(c, i * base.degree())).collect()).collect();
            if dihedral_eq(&ka, &conj) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Monic kernel polynomial of u(C) for an automorphism u over a field
/// containing its root of unity.
pub fn aut_on_kernel(f: &Fq, kind: AutKind, root: &Fe, g: &[Fe]) -> Poly<Fq> {
    let s = match kind {
        AutKind::I => f.neg(&f.one()),
        AutKind::Zeta => root.clone(),
    };
    PolyRing::new(f).monic(&scale_roots(f, g, &s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{lemma_count, lemma_data};
    use crate::ec::trace_of_frobenius;
    use crate::isog::{count_rational_p_isogenies, enumerate_p_subgroups};

    fn f13_curve() -> Curve<Fq> {
        Curve::from_i64(&Fq::prime(13), 1, 4).unwrap()
    }

    #[test]
    fn pearls_match_subgroup_enumeration() {
        let e = f13_curve();
        for p in [3u64, 5, 7] {
            let set = pearl_set(&e, p).unwrap();
            let mut a: Vec<_> = set.pearls.iter().map(|g| g.kernel.poly.clone()).collect();
            a.sort();
            let b: Vec<_> = enumerate_p_subgroups(&e, p).unwrap().into_iter().map(|k| k.poly).collect();
            assert_eq!(a, b, "p = {p}");
        }
    }

    #[test]
    fn frobenius_on_f13_curve() {
        let e = f13_curve();
        let h5 = frobenius_pearl_action(&e, 5).unwrap();
        assert_eq!((h5.order(), crate::cartan::delta(&h5)), (2, -1));
        let h7 = frobenius_pearl_action(&e, 7).unwrap();
        assert_eq!((h7.order(), crate::cartan::delta(&h7)), (2, 1));
    }

    #[test]
    fn rational_necklace_counts() {
        let e = f13_curve();
        assert_eq!(rational_geo_necklaces(&e, 5).unwrap().len(), 4);
        assert_eq!(rational_geo_necklaces(&e, 7).unwrap().len(), 3);
    }

    #[test]
    fn lemma_table_small_sweep() {
        for l in [7u64, 11, 13, 17] {
            let f = Fq::prime(l);
            for a4 in 0..l as i64 {
                for a6 in 0..3 {
                    let Ok(e) = Curve::from_i64(&f, a4, a6) else { continue };
                    let p = 5;
                    let set = pearl_set(&e, p).unwrap();
                    let h = set.frobenius();
                    let (_, delta, _) = lemma_data(&h);
                    let a_zero = trace_of_frobenius(&e) % p as i64 == 0;
                    let ni = count_rational_p_isogenies(&e, p).unwrap();
                    let got = rational_geo_necklaces_for(&set, &canonical_gamma(p).unwrap()).unwrap().len() as u64;
                    if let Some(want) = lemma_count(p, a_zero, delta, ni) {
                        assert_eq!(got, want, "l = {l}, a4 = {a4}, a6 = {a6}");
                    }
                }
            }
        }
    }

    #[test]
    fn xpoint_fibers() {
        let count = |l: u64, j: i64, p: u64| {
            let f = Fq::prime(l);
            xpoints_above_j(&f, &f.from_i64(j), p).unwrap().len()
        };
        assert_eq!(count(7, 6, 5), 4);
        assert_eq!(count(11, 0, 5), 2);
        assert_eq!(count(13, 5, 7), 3);
    }

    #[test]
    fn comparison_is_an_equivalence_on_f13() {
        let e = f13_curve();
        let ns = rational_geo_necklaces(&e, 5).unwrap();
        for (i, a) in ns.iter().enumerate() {
            for (k, b) in ns.iter().enumerate() {
                assert_eq!(compare_points(a, b).unwrap(), i == k);
            }
        }
        // the same necklaces on a scaled model
        let f = &e.f;
        let u = f.from_i64(2);
        let e2 = Curve::new(f, f.mul(&e.a4, &f.pow_u64(&u, 4)), f.mul(&e.a6, &f.pow_u64(&u, 6))).unwrap();
        let ns2 = rational_geo_necklaces(&e2, 5).unwrap();
        for a in &ns {
            assert_eq!(ns2.iter().filter(|b| compare_points(a, b).unwrap()).count(), 1);
        }
    }

    #[test]
    fn dihedral_equality() {
        assert!(dihedral_eq(&[1, 2, 3, 4], &[3, 2, 1, 4]));
        assert!(dihedral_eq(&[1, 2, 3, 4], &[2, 3, 4, 1]));
        assert!(!dihedral_eq(&[1, 2, 3, 4], &[1, 3, 2, 4]));
    }
}
