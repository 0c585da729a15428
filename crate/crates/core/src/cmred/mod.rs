//! Reduction of the rational necklace on a CM elliptic curve over Q.
//!
//! A global endomorphism α of the curve E_D (an automorphism for j = 0, 1728,
//! otherwise an isogeny of small split prime degree q found analytically and
//! verified exactly) is reduced modulo ℓ, and the pearls of the reduced curve
//! are ordered by the action of a + b·α̃ lifting γ.

mod analytic;
mod exact;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::bridge::{pearl_set_with, GeoNecklace, PearlSet};
use crate::cartan::{orbit_necklace, Gamma, Mat2, ProjPoint};
use crate::ec::{apply_aut, j_invariant, AutKind, Curve, Pt};
use crate::error::{Error, Result};
use crate::ff::{legendre, make_ext, modp, roots, Embedding, Fe, Field, Fq};
use crate::isog::{enumerate_p_subgroups, velu_codomain, verify_endomorphism, Endomorphism, KernelPoly};
use crate::util::{inv_mod, is_prime, lcm};

/// Starting precision in bits for the analytic construction.
pub const DEFAULT_PRECISION: usize = 512;
/// Precision at which the analytic construction gives up.
pub const MAX_PRECISION: usize = 1 << 15;

const CM_DATA: &str = include_str!("../../data/cm_curves.csv");

/// An imaginary quadratic order of class number one with its curve over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CmOrder {
    /// Discriminant D = Δ_F·f².
    pub d: i64,
    /// Discriminant of the fraction field.
    pub delta_f: i64,
    /// Conductor.
    pub f: i64,
    /// j-invariant.
    pub j: BigInt,
    /// Fixed model y² = x³ + a4·x + a6.
    pub a4: BigInt,
    /// Fixed model y² = x³ + a4·x + a6.
    pub a6: BigInt,
}

impl CmOrder {
    /// Whether the order has units other than ±1.
    pub fn has_extra_units(&self) -> bool {
        self.d == -3 || self.d == -4
    }
}

/// j = 1728·4a4³/(4a4³ + 27a6²) as a rational.
fn model_j(a4: &BigInt, a6: &BigInt) -> Option<BigRational> {
    let c = BigInt::from(4) * a4 * a4 * a4;
    let den = &c + BigInt::from(27) * a6 * a6;
    (!den.is_zero()).then(|| BigRational::new(BigInt::from(1728) * c, den))
}

/// Parse a CM table in the `D,Delta_F,f,j,a4,a6` format, checking every row.
pub fn parse_cm_table(text: &str) -> Result<Vec<CmOrder>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('D') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: i + 1, msg };
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != 6 {
            return Err(err(format!("expected 6 fields, found {}", cols.len())));
        }
        let ints = cols
            .iter()
            .map(|c| c.parse::<BigInt>().map_err(|e| err(format!("{c}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let small = |k: usize| ints[k].to_i64().ok_or_else(|| err(format!("{} out of range", ints[k])));
        let o = CmOrder { d: small(0)?, delta_f: small(1)?, f: small(2)?, j: ints[3].clone(), a4: ints[4].clone(), a6: ints[5].clone() };
        if o.d >= 0 || o.d != o.delta_f * o.f * o.f {
            return Err(err(format!("D = {} is not Delta_F * f^2 < 0", o.d)));
        }
        if model_j(&o.a4, &o.a6) != Some(BigRational::from(o.j.clone())) {
            return Err(err(format!("model does not have j = {}", o.j)));
        }
        out.push(o);
    }
    Ok(out)
}

/// The thirteen orders, from the shipped data file.
pub fn cm_table() -> &'static [CmOrder] {
    static TABLE: OnceLock<Vec<CmOrder>> = OnceLock::new();
    TABLE.get_or_init(|| parse_cm_table(CM_DATA).expect("shipped CM table is valid"))
}

/// The order with discriminant D.
pub fn cm_order(d: i64) -> Result<CmOrder> {
    cm_table()
        .iter()
        .find(|o| o.d == d)
        .cloned()
        .ok_or_else(|| Error::InvalidParameter(format!("{d} is not a class number one discriminant")))
}

/// Whether E_D carries a rational necklace at p: p ∤ D and (Δ_F/p) = −1.
pub fn has_rational_necklace(o: &CmOrder, p: u64) -> bool {
    p >= 5 && is_prime(p) && o.d % p as i64 != 0 && legendre(o.delta_f, p) == -1
}

/// The orders whose curve has a rational necklace at p.
pub fn cm_points(p: u64) -> Vec<CmOrder> {
    cm_points_in(cm_table(), p)
}

/// The orders of `table` whose curve has a rational necklace at p.
pub fn cm_points_in(table: &[CmOrder], p: u64) -> Vec<CmOrder> {
    table.iter().filter(|o| has_rational_necklace(o, p)).cloned().collect()
}

/// x + y·√Δ_F with rational x, y.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadElem {
    /// Rational part.
    pub x: BigRational,
    /// Coefficient of √Δ_F.
    pub y: BigRational,
}

impl QuadElem {
    /// A rational number.
    pub fn rational(x: BigRational) -> Self {
        QuadElem { x, y: BigRational::zero() }
    }

    /// (X + Y·√Δ_F)/(2·den).
    pub fn from_halves(x: &BigInt, y: &BigInt, den: &BigInt) -> Self {
        let d: BigInt = den * 2;
        QuadElem { x: BigRational::new(x.clone(), d.clone()), y: BigRational::new(y.clone(), d) }
    }

    /// Sum.
    pub fn add(&self, o: &Self) -> Self {
        QuadElem { x: &self.x + &o.x, y: &self.y + &o.y }
    }

    /// Product in Q(√Δ).
    pub fn mul(&self, o: &Self, delta: i64) -> Self {
        let dl = BigRational::from(BigInt::from(delta));
        QuadElem { x: &self.x * &o.x + &self.y * &o.y * dl, y: &self.x * &o.y + &self.y * &o.x }
    }

    /// Conjugate.
    pub fn conj(&self) -> Self {
        QuadElem { x: self.x.clone(), y: -self.y.clone() }
    }

    /// Norm x² − Δ·y².
    pub fn norm(&self, delta: i64) -> BigRational {
        &self.x * &self.x - &self.y * &self.y * BigRational::from(BigInt::from(delta))
    }

    /// Inverse of a nonzero element.
    pub fn inv(&self, delta: i64) -> Self {
        let n = self.norm(delta);
        let c = self.conj();
        QuadElem { x: c.x / &n, y: c.y / n }
    }

    /// Integer power.
    pub fn powi(&self, e: i64, delta: i64) -> Self {
        let base = if e < 0 { self.inv(delta) } else { self.clone() };
        let mut r = QuadElem::rational(BigRational::one());
        for _ in 0..e.unsigned_abs() {
            r = r.mul(&base, delta);
        }
        r
    }

    /// Whether the element is rational.
    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }
}

/// The global endomorphism used to order pearls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EndoKind {
    /// [i] or [ζ] on the model with a4·a6 = 0.
    Aut(AutKind),
    /// α = (t + b·√D)/2 of prime norm q, by its kernel polynomial.
    Isogeny {
        /// Degree.
        q: u64,
        /// Coefficient b.
        b: i64,
        /// Monic kernel polynomial over F on the fixed model, lowest degree first.
        kernel: Vec<QuadElem>,
    },
}

/// A degree-q endomorphism (or automorphism) of E_D with its trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlobalEndo {
    /// The order.
    pub order: CmOrder,
    /// Automorphism or isogeny data.
    pub kind: EndoKind,
    /// Trace t.
    pub t: i64,
    /// Norm (degree).
    pub n: i64,
}

impl GlobalEndo {
    /// α as an element of F; it multiplies the invariant differential by α.
    pub fn alpha(&self) -> QuadElem {
        let half = |v: i64| BigRational::new(v.into(), 2.into());
        match &self.kind {
            // i = √−4/2, ζ = (−1 + √−3)/2
            EndoKind::Aut(_) => QuadElem { x: half(self.t), y: half(1) },
            EndoKind::Isogeny { b, .. } => QuadElem { x: half(self.t), y: half(b * self.order.f) },
        }
    }

    /// The degree q, or None for an automorphism.
    pub fn q(&self) -> Option<u64> {
        match &self.kind {
            EndoKind::Aut(_) => None,
            EndoKind::Isogeny { q, .. } => Some(*q),
        }
    }

    /// Coefficient of √D in 2α.
    pub fn b(&self) -> i64 {
        match &self.kind {
            EndoKind::Aut(_) => 1,
            EndoKind::Isogeny { b, .. } => *b,
        }
    }
}

/// (t, b) with t ≥ 0, b ≥ 1 least and t² − b²·D = 4q, if q splits into principal ideals of O.
pub fn norm_representation(o: &CmOrder, q: u64) -> Option<(i64, i64)> {
    let q = q as i64;
    let mut b = 1;
    while b * b * -o.d <= 4 * q {
        let t2 = 4 * q + b * b * o.d;
        let t = (t2 as f64).sqrt().round() as i64;
        if t * t == t2 && (t - b * o.d).rem_euclid(2) == 0 {
            return Some((t, b));
        }
        b += 1;
    }
    None
}

/// The odd primes q ∤ 2Dℓ of the form N(α), α ∈ O, in increasing order, with (t, b).
pub fn split_primes(o: &CmOrder, ell: u64) -> impl Iterator<Item = (u64, i64, i64)> + '_ {
    (3u64..)
        .filter(move |&q| is_prime(q) && q != ell && o.d % q as i64 != 0)
        .filter_map(move |q| norm_representation(o, q).map(|(t, b)| (q, t, b)))
}

/// The automorphism [i] or [ζ] as a global endomorphism.
pub fn automorphism_endo(o: &CmOrder) -> Result<GlobalEndo> {
    match o.d {
        -4 => Ok(GlobalEndo { order: o.clone(), kind: EndoKind::Aut(AutKind::I), t: 0, n: 1 }),
        -3 => Ok(GlobalEndo { order: o.clone(), kind: EndoKind::Aut(AutKind::Zeta), t: -1, n: 1 }),
        d => Err(Error::InvalidParameter(format!("the order of discriminant {d} has no extra units"))),
    }
}

type EndoCache = Mutex<HashMap<(i64, u64), Arc<GlobalEndo>>>;

fn endo_cache() -> &'static EndoCache {
    static CACHE: OnceLock<EndoCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The endomorphism (t + b·√D)/2 of degree q, found analytically and verified exactly.
pub fn isogeny_endo(o: &CmOrder, q: u64, start_bits: usize) -> Result<Arc<GlobalEndo>> {
    if let Some(e) = endo_cache().lock().expect("cache lock").get(&(o.d, q)) {
        return Ok(e.clone());
    }
    let (t, b) = norm_representation(o, q)
        .filter(|_| q >= 3 && is_prime(q) && o.d % q as i64 != 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{q} is not a split odd prime for D = {}", o.d)))?;
    let inp = analytic::LatticeInput { d: o.d, delta_f: o.delta_f, a4: &o.a4, a6: &o.a6, t, b, q };
    let mut bits = start_bits.max(64);
    let kernel = loop {
        if bits > MAX_PRECISION {
            return Err(Error::Precision(bits / 2));
        }
        if let Ok(r) = analytic::recognize_kernel(&inp, bits) {
            if let Some(k) = verify_recognized(o, q, &r) {
                break k;
            }
        }
        bits *= 2;
    };
    let endo = Arc::new(GlobalEndo { order: o.clone(), kind: EndoKind::Isogeny { q, b, kernel }, t, n: q as i64 });
    Ok(endo_cache().lock().expect("cache lock").entry((o.d, q)).or_insert(endo).clone())
}

/// Exact check that the recognized polynomial divides ψ_q of the rescaled model.
fn verify_recognized(o: &CmOrder, q: u64, r: &analytic::Recognized) -> Option<Vec<QuadElem>> {
    let d = r.coeffs.len() - 1;
    if r.coeffs[d] != (BigInt::from(2), BigInt::zero()) {
        return None;
    }
    let s = BigInt::from(q).pow(r.m);
    let a4 = (&o.a4 * &s * &s * 2, BigInt::zero());
    let a6 = (&o.a6 * &s * &s * &s * 2, BigInt::zero());
    let ring = exact::OfQuotient::new(o.delta_f, r.coeffs.clone());
    if !ring.divides_division_polynomial(a4, a6, q as usize) {
        return None;
    }
    Some(
        r.coeffs
            .iter()
            .enumerate()
            .map(|(i, (x, y))| QuadElem::from_halves(x, y, &s.pow((d - i) as u32)))
            .collect(),
    )
}

/// The default global endomorphism for reduction at ℓ: an automorphism when
/// O has extra units, else the one of least split degree q ∤ 2Dℓ.
pub fn construct_global_endomorphism(o: &CmOrder, ell: u64) -> Result<Arc<GlobalEndo>> {
    construct_endo_with(o, ell, 0, DEFAULT_PRECISION)
}

/// The `shift`-th choice of endomorphism: shift 0 is the default, higher
/// values move to later split primes.
pub fn construct_endo_with(o: &CmOrder, ell: u64, shift: usize, bits: usize) -> Result<Arc<GlobalEndo>> {
    let idx = if o.has_extra_units() {
        if shift == 0 {
            return Ok(Arc::new(automorphism_endo(o)?));
        }
        shift - 1
    } else {
        shift
    };
    let (q, _, _) = split_primes(o, ell).nth(idx).expect("split primes are infinite");
    isogeny_endo(o, q, bits)
}

/// Reduction of an element of O_F[1/n] at a prime above ℓ.
#[derive(Clone, Debug)]
pub struct Residue {
    /// The prime.
    pub ell: u64,
    /// Residue field of F at the chosen prime, or F_ℓ² when ℓ is inert.
    pub field: Fq,
    /// Image of √Δ_F.
    pub sqrt_delta: Fe,
    /// Whether ℓ ramifies in F.
    pub ramified: bool,
}

fn rat_mod(x: &BigRational, ell: u64) -> Result<u64> {
    let l = BigInt::from(ell);
    if x.denom().is_multiple_of(&l) {
        return Err(Error::BadReduction(ell));
    }
    let n = x.numer().mod_floor(&l).to_u64().expect("residue fits");
    let d = x.denom().mod_floor(&l).to_u64().expect("residue fits");
    Ok(n * inv_mod(d, ell) % ell)
}

impl Residue {
    /// The reduction map fixing √Δ_F ↦ the least (or, with `conjugate`, the other) square root.
    pub fn new(delta_f: i64, ell: u64, conjugate: bool) -> Result<Self> {
        if ell < 5 || !is_prime(ell) {
            return Err(Error::InvalidParameter(format!("reduction needs a prime >= 5, got {ell}")));
        }
        if delta_f % ell as i64 == 0 {
            let field = Fq::prime(ell);
            return Ok(Residue { ell, sqrt_delta: field.zero(), field, ramified: true });
        }
        let field = if legendre(delta_f, ell) == 1 { Fq::prime(ell) } else { make_ext(ell, 2)? };
        let mut rs = roots(&field, &[field.from_i64(-delta_f), field.zero(), field.one()]);
        rs.sort();
        let sqrt_delta = rs[usize::from(conjugate)].clone();
        Ok(Residue { ell, field, sqrt_delta, ramified: false })
    }

    /// Image of x + y·√Δ_F; ℓ-integrality of x and y is required.
    pub fn reduce(&self, a: &QuadElem) -> Result<Fe> {
        let f = &self.field;
        let x = f.from_u64(rat_mod(&a.x, self.ell)?);
        let y = f.from_u64(rat_mod(&a.y, self.ell)?);
        Ok(f.add(&x, &f.mul(&y, &self.sqrt_delta)))
    }

    /// Image in F_ℓ of an element whose reduction is known to lie there.
    fn reduce_prime(&self, a: &QuadElem) -> Result<u64> {
        if !self.ramified && !a.is_rational() {
            return Err(Error::BadReduction(self.ell));
        }
        rat_mod(&a.y, self.ell)?;
        rat_mod(&a.x, self.ell)
    }
}

fn valuation(n: &BigInt, ell: u64) -> u32 {
    let l = BigInt::from(ell);
    let mut n = n.clone();
    let mut v = 0;
    while !n.is_zero() && n.is_multiple_of(&l) {
        n /= &l;
        v += 1;
    }
    v
}

/// The reduced endomorphism as a map on points.
#[derive(Clone, Debug)]
pub enum ReducedMap {
    /// An isogeny followed by an isomorphism back to the curve.
    Isogeny(Endomorphism),
    /// [i] or [ζ] with the given root of unity.
    Aut(AutKind, Fe),
}

/// A global endomorphism reduced at ℓ.
#[derive(Clone, Debug)]
pub struct ReducedEndo {
    /// The prime ℓ.
    pub ell: u64,
    /// Good-reduction model over F_ℓ.
    pub curve: Curve<Fq>,
    /// Field of definition of the map.
    pub field: Fq,
    /// The map over `field`.
    pub map: ReducedMap,
    /// Trace.
    pub t: i64,
    /// Degree.
    pub n: i64,
}

impl ReducedEndo {
    /// The curve over the field of definition of the map.
    pub fn curve_over_field(&self) -> Result<Curve<Fq>> {
        Ok(self.curve.base_change(&Embedding::new(&self.curve.f, &self.field)?))
    }

    /// The map over a larger field as a closure.
    pub fn over(&self, emb: &Embedding) -> Box<dyn Fn(&Pt<Fq>) -> Pt<Fq> + '_> {
        match &self.map {
            ReducedMap::Isogeny(e) => {
                let e = e.base_change(emb);
                Box::new(move |pt| e.apply(pt))
            }
            ReducedMap::Aut(kind, root) => {
                let (kind, root, big) = (*kind, emb.forward(root), emb.big.clone());
                Box::new(move |pt| apply_aut(&big, kind, &root, pt))
            }
        }
    }
}

/// Reduce the endomorphism at ℓ on a model with good reduction, checking
/// α̃² − t·α̃ + n = 0 on points.
pub fn reduce_endomorphism(g: &GlobalEndo, ell: u64, conjugate: bool) -> Result<ReducedEndo> {
    let o = &g.order;
    if g.q() == Some(ell) {
        return Err(Error::InvalidParameter(format!("endomorphism degree equals the characteristic {ell}")));
    }
    let res = Residue::new(o.delta_f, ell, conjugate)?;
    let dl = o.delta_f;
    // rescale x by μ so that the model has good reduction
    let disc = BigInt::from(4) * &o.a4 * &o.a4 * &o.a4 + BigInt::from(27) * &o.a6 * &o.a6;
    let v = valuation(&disc, ell) as i64;
    let mu = if v % 6 == 0 {
        QuadElem::rational(BigRational::from(BigInt::from(ell)).pow(-(v / 6) as i32))
    } else if res.ramified && v % 3 == 0 {
        let pi = QuadElem { x: BigRational::zero(), y: BigRational::one() };
        pi.powi(-(v / 3), dl)
    } else {
        return Err(Error::BadReduction(ell));
    };
    let mu2 = mu.mul(&mu, dl);
    let a4 = mu2.mul(&QuadElem::rational(o.a4.clone().into()), dl);
    let a6 = mu2.mul(&mu, dl).mul(&QuadElem::rational(o.a6.clone().into()), dl);
    let fl = Fq::prime(ell);
    let curve = Curve::new(&fl, fl.from_u64(res.reduce_prime(&a4)?), fl.from_u64(res.reduce_prime(&a6)?))
        .map_err(|_| Error::BadReduction(ell))?;
    if j_invariant(&curve) != fl.from_u64(rat_mod(&BigRational::from(o.j.clone()), ell)?) {
        return Err(Error::Invariant("reduced model has the wrong j-invariant".into()));
    }
    let k0 = res.field.clone();
    let over_k0 = curve.base_change(&Embedding::new(&fl, &k0)?);
    let alpha = res.reduce(&g.alpha())?;
    let map = match &g.kind {
        EndoKind::Aut(kind) => ReducedMap::Aut(*kind, alpha),
        EndoKind::Isogeny { q, kernel, .. } => {
            let d = kernel.len() - 1;
            let poly = kernel
                .iter()
                .enumerate()
                .map(|(i, c)| res.reduce(&c.mul(&mu.powi((d - i) as i64, dl), dl)))
                .collect::<Result<Vec<_>>>()?;
            let step = velu_codomain(&over_k0, &KernelPoly { p: *q, field: k0.clone(), poly })?;
            let u = k0.inv(&alpha).ok_or(Error::BadReduction(ell))?;
            ReducedMap::Isogeny(Endomorphism::new(step, u)?)
        }
    };
    let red = ReducedEndo { ell, curve, field: k0.clone(), map, t: g.t, n: g.n };
    let id = Embedding::new(&k0, &k0)?;
    let theta = red.over(&id);
    if !verify_endomorphism(&over_k0, &*theta, g.t, g.n, 6, &[]) {
        return Err(Error::Invariant(format!("reduced endomorphism fails x^2 - {}x + {} at {ell}", g.t, g.n)));
    }
    drop(theta);
    Ok(red)
}

/// (a, b) with a + b·ψ ↦ γ under F_p[ψ] ≅ F_p², where ψ is a root of x² − t·x + n
/// sent to the root with least γ-coefficient.
pub fn gamma_lift(t: i64, n: i64, g: &Gamma) -> Result<(u64, u64)> {
    let p = g.p;
    let (t, n) = (modp(t, p), modp(n, p));
    let d = (t * t % p + 4 * (p - n)) % p;
    let e = (g.t * g.t % p + 4 * (p - g.n)) % p;
    let ratio = d * inv_mod(e, p) % p;
    let c = (1..p)
        .find(|c| c * c % p == ratio)
        .ok_or_else(|| Error::InvalidParameter(format!("x^2 - {t}x + {n} splits mod {p}")))?;
    // root (t + c·(2γ − t_γ))/2 = r0 + c·γ
    let half = inv_mod(2, p);
    let r0 = (t + p - c * g.t % p) % p * half % p;
    let b = inv_mod(c, p);
    let a = (p - r0) * b % p;
    Ok((a, b))
}

/// Options for `cm_reduced_necklace`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CmOptions {
    /// Index of the starting pearl.
    pub start: usize,
    /// F_p^× multiple applied to the lift of γ.
    pub scalar: u64,
    /// Use the other square root of Δ_F modulo ℓ.
    pub conjugate: bool,
    /// Which endomorphism: 0 is the default, higher values use later split primes.
    pub shift: usize,
    /// Starting precision of the analytic construction.
    pub precision: usize,
}

impl Default for CmOptions {
    fn default() -> Self {
        CmOptions { start: 0, scalar: 1, conjugate: false, shift: 0, precision: DEFAULT_PRECISION }
    }
}

/// The reduction at ℓ of the rational necklace on E_D.
#[derive(Clone, Debug)]
pub struct ReducedPoint {
    /// Discriminant of the order.
    pub d: i64,
    /// Level.
    pub p: u64,
    /// Characteristic.
    pub ell: u64,
    /// j mod ℓ.
    pub j: u64,
    /// Degree of the endomorphism used (1 for an automorphism).
    pub q: u64,
    /// The necklace on the reduced curve.
    pub necklace: GeoNecklace,
}

impl ReducedPoint {
    /// The necklace JSON with D, p and ℓ.
    pub fn to_json(&self) -> Value {
        let mut v = self.necklace.to_json();
        if let Value::Object(m) = &mut v {
            m.insert("D".into(), json!(self.d));
            m.insert("ell".into(), json!(self.ell));
            m.insert("j_mod_ell".into(), json!(self.j));
            m.insert("endomorphism_degree".into(), json!(self.q));
        }
        v
    }
}

/// The global endomorphism for `opts`, reduced at ℓ.
pub fn reduced_endo_for(o: &CmOrder, p: u64, ell: u64, opts: &CmOptions) -> Result<(Arc<GlobalEndo>, ReducedEndo)> {
    if !has_rational_necklace(o, p) {
        return Err(Error::InvalidParameter(format!("E_{} has no rational necklace at p = {p}", o.d)));
    }
    if ell == p || ell < 5 || !is_prime(ell) {
        return Err(Error::InvalidParameter(format!("ell = {ell} must be a prime >= 5 different from p")));
    }
    let endo = construct_endo_with(o, ell, opts.shift, opts.precision)?;
    if endo.b() % p as i64 == 0 {
        return Err(Error::InvalidParameter(format!("endomorphism is scalar modulo {p}")));
    }
    let red = reduce_endomorphism(&endo, ell, opts.conjugate)?;
    Ok((endo, red))
}

/// Pearls of the reduced curve with a torsion basis over a field containing
/// the field of definition of the endomorphism.
pub fn reduced_pearl_set(red: &ReducedEndo, p: u64) -> Result<PearlSet> {
    pearl_set_with(&red.curve, p, red.field.degree() as u64)
}

/// The necklace ordered by a + b·α̃ on a pearl set of the reduced curve.
pub fn necklace_on(set: &PearlSet, red: &ReducedEndo, d: i64, g: &Gamma, opts: &CmOptions) -> Result<ReducedPoint> {
    let p = set.p;
    if g.p != p {
        return Err(Error::Mismatch(format!("gamma is for p = {}, not {p}", g.p)));
    }
    if set.curve != red.curve {
        return Err(Error::Mismatch("pearl set is on a different curve".into()));
    }
    let emb = Embedding::compatible(&Embedding::new(&red.curve.f, &red.field)?, &set.basis.emb)?;
    let theta = red.over(&emb);
    let b = &set.basis;
    let m = b.matrix_of(&theta(&b.pt_p), &theta(&b.pt_q))?;
    if !m.satisfies(modp(red.t, p), modp(red.n, p)) {
        return Err(Error::Invariant("endomorphism matrix has the wrong characteristic polynomial".into()));
    }
    let (a, bb) = gamma_lift(red.t, red.n, g)?;
    let scalar = opts.scalar % p;
    if scalar == 0 {
        return Err(Error::InvalidParameter("scalar must be nonzero mod p".into()));
    }
    let h: Mat2 = Mat2::scalar(p, a).add(&m.scale(bb)).scale(scalar);
    let start = ProjPoint::from_index(opts.start % (p as usize + 1), p);
    let necklace = orbit_necklace(&h, g, start);
    if !necklace.is_valid() {
        return Err(Error::Invariant("orbit of the lifted generator is not a necklace".into()));
    }
    let j = red.curve.f.to_prime(&j_invariant(&red.curve)).expect("j lies in the prime field");
    let q = if red.n == 1 { 1 } else { red.n as u64 };
    Ok(ReducedPoint { d, p, ell: red.ell, j, q, necklace: set.realize(&necklace) })
}

/// The reduction at ℓ of the rational necklace on E_D: pearls of the reduced
/// curve ordered by the action of a + b·α̃ lifting γ.
pub fn cm_reduced_necklace(o: &CmOrder, p: u64, ell: u64, g: &Gamma, opts: &CmOptions) -> Result<ReducedPoint> {
    if g.p != p {
        return Err(Error::Mismatch(format!("gamma is for p = {}, not {p}", g.p)));
    }
    let (_, red) = reduced_endo_for(o, p, ell, opts)?;
    let set = reduced_pearl_set(&red, p)?;
    necklace_on(&set, &red, o.d, g, opts)
}

/// All endomorphisms of Ẽ of degree q and trace t, found over finite fields
/// by enumerating q-isogenies with codomain j = j(Ẽ). Advisory only.
pub fn fast_ff_endo_search(curve: &Curve<Fq>, q: u64, t: i64) -> Result<Vec<Endomorphism>> {
    let f = &curve.f;
    if q % f.p() == 0 {
        return Err(Error::InvalidParameter(format!("q = {q} is divisible by the characteristic")));
    }
    let kernels = enumerate_p_subgroups(curve, q)?;
    let Some(k) = kernels.first() else { return Ok(Vec::new()) };
    let deg = lcm(k.field.degree() as u64, 2 * f.degree() as u64) as usize;
    let big = make_ext(f.p(), deg)?;
    let to_big = Embedding::compatible(&Embedding::new(f, &k.field)?, &Embedding::new(f, &big)?)?;
    let e = curve.base_change(&Embedding::new(f, &big)?);
    let j = j_invariant(&e);
    let mut out = Vec::new();
    for k in &kernels {
        let step = velu_codomain(&e, &k.base_change(&to_big))?;
        let c = &step.codomain;
        if j_invariant(c) != j {
            continue;
        }
        // u⁴·a4′ = a4, u⁶·a6′ = a6
        let target = if big.is_zero(&e.a6) {
            let mut m = vec![big.zero(); 5];
            m[4] = c.a4.clone();
            m[0] = big.neg(&e.a4);
            m
        } else if big.is_zero(&e.a4) {
            let mut m = vec![big.zero(); 7];
            m[6] = c.a6.clone();
            m[0] = big.neg(&e.a6);
            m
        } else {
            let u2 = big.div(&big.mul(&e.a6, &c.a4), &big.mul(&e.a4, &c.a6));
            vec![big.neg(&u2), big.zero(), big.one()]
        };
        for u in roots(&big, &target) {
            if let Ok(endo) = Endomorphism::new(step.clone(), u) {
                if verify_endomorphism(&e, &|pt| endo.apply(pt), t, q as i64, 6, &[]) {
                    out.push(endo);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::compare_points;
    use crate::cartan::canonical_gamma;

    #[test]
    fn table_rows() {
        let t = cm_table();
        assert_eq!(t.len(), 13);
        assert!(t.iter().any(|o| o.d == -7 && o.j == BigInt::from(-3375)));
        assert!(t.iter().any(|o| o.d == -163 && o.j == "-262537412640768000".parse::<BigInt>().unwrap()));
    }

    #[test]
    fn rational_necklace_criterion() {
        let o = |d| cm_order(d).unwrap();
        assert!(has_rational_necklace(&o(-7), 5));
        assert!(!has_rational_necklace(&o(-3), 7));
        assert!(has_rational_necklace(&o(-4), 7));
        assert!(!has_rational_necklace(&o(-4), 5));
        assert!(!has_rational_necklace(&o(-7), 7));
        assert_eq!(cm_points(5).len(), 9);
        assert_eq!(cm_points(29).len(), 8);
        assert_eq!(cm_points(37).len(), 4);
    }

    #[test]
    fn least_split_primes() {
        let o = cm_order(-163).unwrap();
        assert_eq!(split_primes(&o, 41).next().unwrap().0, 43);
        assert_eq!(split_primes(&o, 13).next().unwrap(), (41, 1, 1));
        let o = cm_order(-7).unwrap();
        assert_eq!(split_primes(&o, 13).next().unwrap(), (11, 4, 2));
    }

    #[test]
    fn global_endomorphism_of_e7() {
        let o = cm_order(-7).unwrap();
        let g = construct_global_endomorphism(&o, 13).unwrap();
        assert_eq!((g.t, g.n), (4, 11));
        let EndoKind::Isogeny { kernel, .. } = &g.kind else { panic!() };
        assert_eq!(kernel.len(), 6);
        assert!(kernel.iter().any(|c| !c.is_rational()));
    }

    #[test]
    fn quad_arithmetic() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let z = QuadElem { x: r(1, 2), y: r(1, 2) };
        assert_eq!(z.mul(&z.inv(-7), -7), QuadElem::rational(r(1, 1)));
        assert_eq!(z.norm(-7), r(2, 1));
        assert_eq!(z.powi(-2, -7).mul(&z.powi(2, -7), -7), QuadElem::rational(r(1, 1)));
    }

    #[test]
    fn lift_of_gamma() {
        let g = canonical_gamma(7).unwrap();
        for (t, n) in [(0, 1), (2, 11), (-1, 1)] {
            let Ok((a, b)) = gamma_lift(t, n, &g) else { continue };
            // companion matrix of x² − tx + n has a + b·C with the char poly of γ
            let c = Mat2::new(7, [0, -n, 1, t]);
            let h = Mat2::scalar(7, a).add(&c.scale(b));
            assert!(h.satisfies(g.t, g.n));
            assert_ne!(b, 0);
        }
    }

    #[test]
    fn reductions_at_13_for_p5() {
        let g = canonical_gamma(5).unwrap();
        let pt = |d| cm_reduced_necklace(&cm_order(d).unwrap(), 5, 13, &g, &CmOptions::default()).unwrap();
        let (a, b, c) = (pt(-28), pt(-67), pt(-7));
        assert_eq!((a.j, b.j, c.j), (5, 5, 5));
        assert!(compare_points(&a.necklace, &b.necklace).unwrap());
        assert!(!compare_points(&a.necklace, &c.necklace).unwrap());
    }

    #[test]
    fn ramified_reduction() {
        let o = cm_order(-7).unwrap();
        let g = construct_global_endomorphism(&o, 7).unwrap();
        let r = reduce_endomorphism(&g, 7, false).unwrap();
        assert_eq!(j_invariant(&r.curve), r.curve.f.from_u64(1728 % 7));
    }

    #[test]
    fn ordinary_search_finds_the_conjugate_pair() {
        let o = cm_order(-7).unwrap();
        let g = construct_global_endomorphism(&o, 11).unwrap();
        let r = reduce_endomorphism(&g, 11, false).unwrap();
        let found = fast_ff_endo_search(&r.curve, g.n as u64, g.t).unwrap();
        assert_eq!(found.len(), 2);
    }
}
