//! Necklaces: dihedral classes of orderings of P¹(F_p) with constant
//! cross-ratio ξ on consecutive windows.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{all_cache, coprime, delta, next_pearl, xi, Gamma, Mat2, Pgl2, ProjPoint};
use crate::error::{Error, Result};

/// A necklace for a fixed γ, stored as its dihedral-minimal ordering.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Necklace {
    /// The prime.
    pub p: u64,
    /// γ used to define it.
    pub gamma: (u64, u64),
    /// Canonical ordering of the p+1 pearls.
    pub order: Vec<ProjPoint>,
}

fn dihedral_min(order: &[ProjPoint]) -> Vec<ProjPoint> {
    let m = order.len();
    let mut best: Vec<ProjPoint> = order.to_vec();
    let mut cand = Vec::with_capacity(m);
    for rev in [false, true] {
        for k in 0..m {
            cand.clear();
            for i in 0..m {
                let idx = if rev { (k + m - i) % m } else { (k + i) % m };
                cand.push(order[idx]);
            }
            if cand < best {
                best.clone_from(&cand);
            }
        }
    }
    best
}

impl Necklace {
    /// Necklace with the given ordering (not validated), canonicalized.
    pub fn from_order(gamma: &Gamma, order: &[ProjPoint]) -> Self {
        Necklace { p: gamma.p, gamma: (gamma.t, gamma.n), order: dihedral_min(order) }
    }

    /// Position of a pearl in the canonical ordering.
    pub fn position(&self, x: ProjPoint) -> usize {
        self.order.iter().position(|&y| y == x).expect("pearl in necklace")
    }

    /// Whether every window of four consecutive pearls has cross-ratio ξ.
    pub fn is_valid(&self) -> bool {
        let g = Gamma { p: self.p, t: self.gamma.0, n: self.gamma.1 };
        let Ok(x) = xi(&g) else { return false };
        let m = self.order.len();
        (0..m).all(|i| {
            super::cross_ratio(self.p, self.order[i], self.order[(i + 1) % m], self.order[(i + 2) % m], self.order[(i + 3) % m])
                == Ok(ProjPoint::Fin(x as u32))
        })
    }

    /// Image under h.
    pub fn map(&self, h: &Pgl2) -> Necklace {
        let order: Vec<ProjPoint> = self.order.iter().map(|&x| h.act(x)).collect();
        Necklace { p: self.p, gamma: self.gamma, order: dihedral_min(&order) }
    }

    /// JSON form `{"p", "gamma": [t, n], "order": [...]}`.
    pub fn to_json(&self) -> Value {
        json!({ "p": self.p, "gamma": [self.gamma.0, self.gamma.1], "order": self.order })
    }
}

/// The h-orbit necklace, after rescaling h so that its characteristic
/// polynomial is x² − t·x + n.
pub fn necklace_from_generator(h: &Pgl2, g: &Gamma) -> Result<Necklace> {
    let p = g.p;
    let m = h.mat();
    let ok = (1..p).any(|c| {
        let mc = m.scale(c);
        mc.trace() == g.t && mc.det() == g.n
    });
    if !ok {
        return Err(Error::InvalidParameter("no representative has the characteristic polynomial of gamma".into()));
    }
    Ok(orbit_necklace(&m, g, ProjPoint::Fin(0)))
}

/// The orbit (x, h·x, h²·x, …) of a matrix acting freely, canonicalized.
pub fn orbit_necklace(m: &Mat2, g: &Gamma, start: ProjPoint) -> Necklace {
    let mut order = Vec::with_capacity(g.p as usize + 1);
    let mut x = start;
    for _ in 0..=g.p {
        order.push(x);
        x = m.act(x);
    }
    Necklace::from_order(g, &order)
}

/// The unique necklace containing the consecutive run (c0, c1, c2).
pub fn necklace_from_three_pearls(c0: ProjPoint, c1: ProjPoint, c2: ProjPoint, g: &Gamma) -> Result<Necklace> {
    if c0 == c1 || c1 == c2 || c0 == c2 {
        return Err(Error::InvalidParameter("pearls must be distinct".into()));
    }
    let p = g.p;
    let x = xi(g)?;
    let mut order = vec![c0, c1, c2];
    while order.len() < p as usize + 1 {
        let n = order.len();
        let d = next_pearl(p, x, order[n - 3], order[n - 2], order[n - 1]);
        if order.contains(&d) {
            return Err(Error::Invariant("necklace closed early".into()));
        }
        order.push(d);
    }
    let n = order.len();
    if next_pearl(p, x, order[n - 3], order[n - 2], order[n - 1]) != c0 {
        return Err(Error::Invariant("necklace does not close".into()));
    }
    Ok(Necklace::from_order(g, &order))
}

/// All p(p−1)/2 necklaces for γ, sorted.
pub fn enumerate_all_necklaces(g: &Gamma) -> Result<Arc<Vec<Necklace>>> {
    if let Some(v) = all_cache().lock().unwrap().get(g) {
        return Ok(v.clone());
    }
    let p = g.p;
    let c0 = ProjPoint::Fin(0);
    let mut set = BTreeSet::new();
    for c1 in ProjPoint::all(p).into_iter().skip(1) {
        for c2 in ProjPoint::all(p).into_iter().skip(1) {
            if c2 != c1 {
                set.insert(necklace_from_three_pearls(c0, c1, c2, g)?);
            }
        }
    }
    let v = Arc::new(set.into_iter().collect::<Vec<_>>());
    if v.len() as u64 != p * (p - 1) / 2 {
        return Err(Error::Invariant(format!("found {} necklaces for p = {p}", v.len())));
    }
    all_cache().lock().unwrap().insert(*g, v.clone());
    Ok(v)
}

/// How an element relates a necklace to its image.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Relation {
    /// Image equals the necklace and positions are rotated.
    FixedRotation,
    /// Image equals the necklace and positions are reflected.
    FlippedReflection,
    /// Image is a different necklace.
    Moved,
}

/// Image of a necklace under h and the type of the induced permutation.
pub fn act(h: &Pgl2, n: &Necklace) -> (Necklace, Relation) {
    let img = n.map(h);
    if img != *n {
        return (img, Relation::Moved);
    }
    let m = n.order.len();
    let i0 = n.position(h.act(n.order[0]));
    let i1 = n.position(h.act(n.order[1]));
    let rel = if i1 == (i0 + 1) % m { Relation::FixedRotation } else { Relation::FlippedReflection };
    (img, rel)
}

/// Necklaces fixed or flipped by h.
pub fn rational_necklaces(h: &Pgl2, g: &Gamma) -> Result<Vec<Necklace>> {
    rational_necklaces_group(std::slice::from_ref(h), g)
}

/// Necklaces fixed or flipped by every generator of a subgroup.
pub fn rational_necklaces_group(gens: &[Pgl2], g: &Gamma) -> Result<Vec<Necklace>> {
    let all = enumerate_all_necklaces(g)?;
    Ok(all.iter().filter(|n| gens.iter().all(|h| act(h, n).1 != Relation::Moved)).cloned().collect())
}

/// Whether positions i and j are diametrically opposite in a necklace on P¹(F_p).
pub fn antipodal(i: usize, j: usize, p: u64) -> bool {
    let m = p as usize + 1;
    (i + m - j % m) % m == m / 2
}

/// Equality of necklaces built from possibly different γ of the same Cartan:
/// N1 reindexed by i ↦ k·i for some k coprime to p+1 equals N2.
pub fn equiv_any_gamma(n1: &Necklace, n2: &Necklace) -> bool {
    if n1.p != n2.p {
        return false;
    }
    let m = n1.order.len();
    (1..m).filter(|&k| coprime(k as u64, m as u64)).any(|k| {
        let re: Vec<ProjPoint> = (0..m).map(|i| n1.order[(k * i) % m]).collect();
        dihedral_min(&re) == n2.order
    })
}

/// Number of necklaces fixed or flipped by Frobenius, from the trace being zero,
/// δ and the number of rational p-isogenies. `None` where no row applies.
pub fn lemma_count(p: u64, a_zero: bool, delta: i8, n_isog: u64) -> Option<u64> {
    match (a_zero, delta) {
        (true, 1) => Some((p - 1) / 2),
        (true, -1) => Some((p + 3) / 2),
        (false, 1) => Some(0),
        (false, -1) => Some(1),
        (false, 0) if n_isog == p + 1 => Some(p * (p - 1) / 2),
        (false, 0) if n_isog == 1 => Some(0),
        _ => None,
    }
}

/// Lemma row data (trace zero, δ, fixed points on P¹) for a PGL₂ element.
pub fn lemma_data(h: &Pgl2) -> (bool, i8, u64) {
    let p = h.p();
    let fixed = ProjPoint::all(p).into_iter().filter(|&x| h.act(x) == x).count() as u64;
    (h.mat().trace() == 0, delta(h), fixed)
}
