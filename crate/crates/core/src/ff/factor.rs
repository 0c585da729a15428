//! Squarefree, distinct-degree and equal-degree (Cantor–Zassenhaus)
//! factorization over finite fields.

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Field, Poly, PolyRing};

/// Default seed for randomized splitting.
pub const DEFAULT_SEED: u64 = 0x6e65_636b_6c61_6365;

fn pth_root<F: Field>(f: &F, a: &[F::Elem]) -> Poly<F> {
    let p = f.p() as usize;
    let k = f.degree();
    a.iter().step_by(p).map(|c| f.frob(c, k - 1)).collect()
}

/// Squarefree decomposition: pairwise coprime squarefree monic parts with multiplicities.
pub fn squarefree<F: Field>(f: &F, a: &[F::Elem]) -> Vec<(Poly<F>, usize)> {
    let r = PolyRing::new(f);
    let a = r.monic(a);
    let mut out = Vec::new();
    if a.len() <= 1 {
        return out;
    }
    let da = r.derivative(&a);
    let mut c = r.gcd(&a, &da);
    let mut w = r.div_exact(&a, &c);
    let mut i = 1;
    while w.len() > 1 {
        let y = r.gcd(&w, &c);
        let z = r.div_exact(&w, &y);
        if z.len() > 1 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = r.div_exact(&c, &w);
    }
    if c.len() > 1 {
        let root = pth_root(f, &c);
        for (g, m) in squarefree(f, &root) {
            out.push((g, m * f.p() as usize));
        }
    }
    out
}

/// Distinct-degree factorization of a squarefree monic polynomial: (product of
/// all irreducible factors of degree d, d).
pub fn ddf<F: Field>(f: &F, a: &[F::Elem]) -> Vec<(Poly<F>, usize)> {
    let r = PolyRing::new(f);
    let q = f.order();
    let mut out = Vec::new();
    let mut rest = r.monic(a);
    let x = r.x();
    let mut h = r.rem(&x, &rest);
    let mut d = 0;
    while rest.len() > 1 {
        d += 1;
        if 2 * d > rest.len() - 1 {
            let deg = rest.len() - 1;
            out.push((rest, deg));
            break;
        }
        h = r.powmod(&h, &q, &rest);
        let g = r.gcd(&r.sub(&h, &x), &rest);
        if g.len() > 1 {
            rest = r.div_exact(&rest, &g);
            h = r.rem(&h, &rest);
            out.push((g, d));
        }
    }
    out
}

/// Equal-degree splitting of a squarefree monic product of degree-d irreducibles.
pub fn edf<F: Field>(f: &F, a: &[F::Elem], d: usize, rng: &mut dyn RngCore) -> Vec<Poly<F>> {
    let r = PolyRing::new(f);
    let a = r.monic(a);
    let n = a.len() - 1;
    if n == d {
        return vec![a];
    }
    let e: BigUint = (f.order().pow(d as u32) - 1u32) >> 1;
    loop {
        let t: Poly<F> = r.normalized((0..n).map(|_| f.random(rng)).collect());
        if t.len() < 2 {
            continue;
        }
        let b = r.sub(&r.powmod(&t, &e, &a), &[f.one()]);
        let g = r.gcd(&b, &a);
        if g.len() > 1 && g.len() < a.len() {
            let h = r.div_exact(&a, &g);
            let mut out = edf(f, &g, d, rng);
            out.extend(edf(f, &h, d, rng));
            return out;
        }
    }
}

fn poly_key<F: Field>(a: &Poly<F>) -> (usize, Vec<F::Elem>) {
    (a.len(), a.clone())
}

/// Complete factorization into monic irreducibles with multiplicities, sorted
/// by degree then coefficients (low degree first). Panics on the zero polynomial.
pub fn factor<F: Field>(f: &F, a: &[F::Elem]) -> Vec<(Poly<F>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    factor_with_rng(f, a, &mut rng)
}

/// [`factor`] with an explicit random source.
pub fn factor_with_rng<F: Field>(f: &F, a: &[F::Elem], rng: &mut dyn RngCore) -> Vec<(Poly<F>, usize)> {
    assert!(!a.is_empty(), "factor of the zero polynomial");
    let mut out = Vec::new();
    for (part, m) in squarefree(f, a) {
        for (g, d) in ddf(f, &part) {
            for h in edf(f, &g, d, rng) {
                out.push((h, m));
            }
        }
    }
    out.sort_by(|x, y| poly_key::<F>(&x.0).cmp(&poly_key::<F>(&y.0)));
    out
}

/// Roots in the coefficient field with multiplicity, sorted. Panics on zero.
pub fn roots<F: Field>(f: &F, a: &[F::Elem]) -> Vec<F::Elem> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    roots_with_rng(f, a, &mut rng)
}

/// [`roots`] with an explicit random source.
pub fn roots_with_rng<F: Field>(f: &F, a: &[F::Elem], rng: &mut dyn RngCore) -> Vec<F::Elem> {
    assert!(!a.is_empty(), "roots of the zero polynomial");
    let r = PolyRing::new(f);
    let q = f.order();
    let mut out = Vec::new();
    for (part, m) in squarefree(f, a) {
        let x = r.x();
        let xq = r.powmod(&x, &q, &part);
        let lin = r.gcd(&r.sub(&xq, &x), &part);
        if lin.len() < 2 {
            continue;
        }
        for g in edf(f, &lin, 1, rng) {
            let root = f.neg(&g[0]);
            for _ in 0..m {
                out.push(root.clone());
            }
        }
    }
    out.sort();
    out
}

/// Irreducibility test (Ben-Or) for a monic polynomial of degree ≥ 1.
pub fn is_irreducible<F: Field>(f: &F, a: &[F::Elem]) -> bool {
    let r = PolyRing::new(f);
    let n = match r.deg(a) {
        None | Some(0) => return false,
        Some(n) => n,
    };
    if n == 1 {
        return true;
    }
    let q = f.order();
    let x = r.x();
    let mut h = r.rem(&x, a);
    for _ in 1..=n / 2 {
        h = r.powmod(&h, &q, a);
        if r.gcd(&r.sub(&h, &x), a).len() > 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{Fp, Fq};

    #[test]
    fn x2_minus_1_over_f7() {
        let f = Fp::new(7);
        let r = PolyRing::new(&f);
        let fac = factor(&f, &r.from_i64s(&[-1, 0, 1]));
        assert_eq!(fac, vec![(vec![1, 1], 1), (vec![6, 1], 1)]);
    }

    #[test]
    fn multiplicities_and_pth_powers() {
        let f = Fp::new(5);
        let r = PolyRing::new(&f);
        // (x+1)^5 (x+2)^2 (x^2+2)
        let mut a = vec![1u64];
        for _ in 0..5 {
            a = r.mul(&a, &[1, 1]);
        }
        a = r.mul(&a, &r.mul(&[2, 1], &[2, 1]));
        a = r.mul(&a, &[2, 0, 1]);
        let fac = factor(&f, &a);
        assert_eq!(fac, vec![(vec![1, 1], 5), (vec![2, 1], 2), (vec![2, 0, 1], 1)]);
    }

    #[test]
    fn modulus_splits_over_its_own_field() {
        let k = Fq::with_modulus(13, &[2, 12, 1]).unwrap();
        let r = PolyRing::new(&k);
        let m: Vec<_> = [2u64, 12, 1].iter().map(|&c| k.from_u64(c)).collect();
        let rts = roots(&k, &m);
        assert_eq!(rts.len(), 2);
        for x in &rts {
            assert!(k.is_zero(&r.eval(&m, x)));
        }
        assert_eq!(k.frob(&rts[0], 1), rts[1]);
    }
}
