//! Search for distinct CM points of X with equal reductions modulo ℓ.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::fiber_size;
use crate::bridge::compare_points;
use crate::cartan::{canonical_gamma, Gamma};
use crate::cmred::{cm_points_in, cm_reduced_necklace, cm_table, CmOptions, CmOrder, ReducedPoint};
use crate::error::{Error, Result};
use crate::util::is_prime;

/// Two CM points with equal reductions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct CollisionRecord {
    /// Level.
    pub p: u64,
    /// Characteristic.
    pub ell: u64,
    /// Common j mod ℓ.
    pub j: u64,
    /// #X_j over F_ℓ.
    pub x_j: u64,
    /// Number of CM points with this j mod ℓ.
    pub r_j: u64,
    /// Discriminants of the two orders, larger first.
    pub pair: (i64, i64),
}

/// Collisions for one (p, ℓ) among the orders of `table`.
pub fn collisions_at(table: &[CmOrder], p: u64, ell: u64, g: &Gamma, opts: &CmOptions) -> Result<Vec<CollisionRecord>> {
    let mut groups: BTreeMap<u64, Vec<_>> = BTreeMap::new();
    for o in cm_points_in(table, p) {
        let j = o.j.mod_floor(&BigInt::from(ell)).to_u64().expect("residue fits");
        groups.entry(j).or_default().push(o);
    }
    let mut out = Vec::new();
    for (j, group) in groups {
        if group.len() < 2 {
            continue;
        }
        let pts: Vec<ReducedPoint> = group.iter().map(|o| cm_reduced_necklace(o, p, ell, g, opts)).collect::<Result<_>>()?;
        let x_j = fiber_size(p, ell, Some(j))?;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                if compare_points(&pts[a].necklace, &pts[b].necklace)? {
                    let (d1, d2) = (pts[a].d, pts[b].d);
                    out.push(CollisionRecord { p, ell, j, x_j, r_j: group.len() as u64, pair: (d1.max(d2), d1.min(d2)) });
                }
            }
        }
    }
    Ok(out)
}

/// All collisions for p in `ps` and ℓ in `ells`, using the canonical γ for
/// each p, sorted by (p, ℓ, j, pair). Work is spread over `threads` threads.
pub fn injectivity_scan(ps: &[u64], ells: &[u64], threads: usize) -> Result<Vec<CollisionRecord>> {
    injectivity_scan_with(cm_table(), ps, ells, threads, &|p| canonical_gamma(p))
}

/// `injectivity_scan` over the orders of `table` with a chosen γ for each p.
pub fn injectivity_scan_with(
    table: &[CmOrder],
    ps: &[u64],
    ells: &[u64],
    threads: usize,
    gamma: &(dyn Fn(u64) -> Result<Gamma> + Sync),
) -> Result<Vec<CollisionRecord>> {
    let mut tasks = Vec::new();
    for &p in ps {
        if p < 5 || !is_prime(p) {
            return Err(Error::InvalidParameter(format!("p = {p} must be a prime >= 5")));
        }
        let g = gamma(p)?;
        for &ell in ells {
            if ell < 5 || !is_prime(ell) {
                return Err(Error::InvalidParameter(format!("ell = {ell} must be a prime >= 5")));
            }
            if ell != p {
                tasks.push((p, ell, g));
            }
        }
    }
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::new());
    let first_error = Mutex::new(None);
    std::thread::scope(|s| {
        for _ in 0..threads.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((p, ell, g)) = tasks.get(i) else { break };
                match collisions_at(table, *p, *ell, g, &CmOptions::default()) {
                    Ok(v) => results.lock().expect("results lock").extend(v),
                    Err(e) => {
                        first_error.lock().expect("error lock").get_or_insert((i, e));
                    }
                }
            });
        }
    });
    if let Some((_, e)) = first_error.into_inner().expect("error lock") {
        return Err(e);
    }
    let mut v = results.into_inner().expect("results lock");
    v.sort();
    Ok(v)
}

/// Number of worker threads to use by default.
pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}
