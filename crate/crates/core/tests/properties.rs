//! Randomized invariants across the library.

use necklace::bridge::xpoints_above_j;
use necklace::cartan::{canonical_gamma, enumerate_all_necklaces, lemma_count, lemma_data, rational_necklaces, Necklace, Pgl2};
use necklace::cmred::QuadElem;
use necklace::ec::{division_polynomial, frobenius_matrix, torsion_basis, trace_of_frobenius, Curve, Point};
use necklace::ff::{factor, legendre, make_ext, Embedding, Field, Fq, PolyRing};
use necklace::isog::enumerate_p_subgroups;
use necklace::util::{is_prime, pow_mod, primes_in};
use necklace::xcount::fiber_size;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_primes() -> Vec<u64> {
    primes_in(5, 100)
}

/// A nonsingular curve over F_{ℓ^k} from a seed.
fn random_curve(f: &Fq, seed: u64) -> Curve<Fq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        if let Ok(e) = Curve::new(f, f.random(&mut rng), f.random(&mut rng)) {
            return e;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frobenius_has_order_dividing_degree(pi in 0usize..10, k in 1usize..6, seed in any::<u64>()) {
        let p = small_primes()[pi];
        let f = make_ext(p, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = f.random(&mut rng);
        prop_assert_eq!(f.frob(&x, k), x.clone());
        let y = f.random(&mut rng);
        prop_assert_eq!(f.frob(&f.mul(&x, &y), 1), f.mul(&f.frob(&x, 1), &f.frob(&y, 1)));
        prop_assert_eq!(f.frob(&f.add(&x, &y), 1), f.add(&f.frob(&x, 1), &f.frob(&y, 1)));
    }

    #[test]
    fn legendre_is_euler(pi in 0usize..20, a in -1000i64..1000) {
        let p = small_primes()[pi];
        let e = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
        let expect = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
        prop_assert_eq!(legendre(a, p), expect);
    }

    #[test]
    fn hasse_bound_and_point_count(pi in 0usize..20, k in 1usize..3, seed in any::<u64>()) {
        let p = small_primes()[pi];
        let f = make_ext(p, k).unwrap();
        let e = random_curve(&f, seed);
        let a = trace_of_frobenius(&e);
        let q = p.pow(k as u32);
        prop_assert!((a * a) as u64 <= 4 * q);
        if q <= 2000 {
            prop_assert_eq!(e.points().len() as i64, q as i64 + 1 - a);
        }
    }

    #[test]
    fn division_polynomials_vanish_on_torsion(pi in 0usize..23, n in prop::sample::select(vec![3usize, 5, 7]), seed in any::<u64>()) {
        let l = small_primes()[pi];
        prop_assume!(l as usize != n);
        let f = Fq::prime(l);
        let e = random_curve(&f, seed);
        let psi = division_polynomial(&e, n);
        let ring = PolyRing::new(&f);
        for pt in e.points() {
            if let Point::Aff(x, _) = &pt {
                if e.mul_i64(&pt, n as i64).is_inf() {
                    prop_assert!(f.is_zero(&ring.eval(&psi, x)));
                }
            }
        }
    }

    #[test]
    fn quadratic_norm_is_multiplicative(x1 in -50i64..50, y1 in -50i64..50, x2 in -50i64..50, y2 in -50i64..50, di in 0usize..5) {
        let delta = [-3i64, -4, -7, -8, -163][di];
        let r = |v: i64| BigRational::from_integer(BigInt::from(v));
        let a = QuadElem { x: r(x1), y: r(y1) };
        let b = QuadElem { x: r(x2), y: r(y2) };
        prop_assert_eq!(a.mul(&b, delta).norm(delta), a.norm(delta) * b.norm(delta));
        prop_assert_eq!(a.conj().conj(), a.clone());
        if x1 != 0 || y1 != 0 {
            let one = QuadElem::rational(BigRational::one());
            prop_assert_eq!(a.mul(&a.inv(delta), delta), one);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn factorization_reassembles(pi in 0usize..23, c in prop::collection::vec(any::<u64>(), 2..32)) {
        let p = primes_in(3, 100)[pi];
        let f = Fq::prime(p);
        let ring = PolyRing::new(&f);
        let a = ring.normalized(c.iter().map(|&v| f.from_u64(v % p)).collect());
        prop_assume!(ring.deg(&a).unwrap_or(0) >= 1);
        let mut prod = ring.constant(f.one());
        for (g, m) in factor(&f, &a) {
            for _ in 0..m {
                prod = ring.mul(&prod, &g);
            }
        }
        prop_assert_eq!(prod, ring.monic(&a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn frobenius_matrix_satisfies_its_characteristic_polynomial(li in 0usize..12, p in prop::sample::select(vec![3u64, 5, 7]), seed in any::<u64>()) {
        let l = small_primes()[li];
        prop_assume!(l != p);
        let e = random_curve(&Fq::prime(l), seed);
        let b = torsion_basis(&e, p).unwrap();
        let fm = frobenius_matrix(&b).unwrap();
        prop_assert!(fm.m.satisfies(fm.trace.rem_euclid(p as i64) as u64, fm.q % p));
        prop_assert_eq!(fm.m.det(), fm.q % p);
    }

    #[test]
    fn rational_necklace_counts_follow_the_lemma(pi in 0usize..4, seed in any::<u64>()) {
        let p = [5u64, 7, 11, 13][pi];
        let g = canonical_gamma(p).unwrap();
        let h = Pgl2::random(p, &mut ChaCha8Rng::seed_from_u64(seed));
        let (a_zero, delta, fixed) = lemma_data(&h);
        let expected = lemma_count(p, a_zero, delta, fixed);
        prop_assert_eq!(Some(rational_necklaces(&h, &g).unwrap().len() as u64), expected);
    }

    #[test]
    fn necklaces_are_mapped_to_necklaces(pi in 0usize..3, seed in any::<u64>(), idx in any::<usize>(), rot in 0usize..14) {
        let p = [5u64, 7, 11][pi];
        let g = canonical_gamma(p).unwrap();
        let all = enumerate_all_necklaces(&g).unwrap();
        let n = &all[idx % all.len()];
        let h = Pgl2::random(p, &mut ChaCha8Rng::seed_from_u64(seed));
        let image = n.map(&h);
        prop_assert!(image.is_valid());
        prop_assert!(all.contains(&image));
        let m = n.order.len();
        let mut turned: Vec<_> = (0..m).map(|i| n.order[(i + rot) % m]).collect();
        prop_assert_eq!(&Necklace::from_order(&g, &turned), n);
        turned.reverse();
        prop_assert_eq!(&Necklace::from_order(&g, &turned), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn kernel_polynomials_multiply_to_the_division_polynomial(li in 0usize..10, p in prop::sample::select(vec![3u64, 5, 7]), seed in any::<u64>()) {
        let l = small_primes()[li];
        prop_assume!(l != p);
        let f = Fq::prime(l);
        let e = random_curve(&f, seed);
        let ks = enumerate_p_subgroups(&e, p).unwrap();
        prop_assert_eq!(ks.len() as u64, p + 1);
        let big = ks[0].field.clone();
        let emb = Embedding::new(&f, &big).unwrap();
        let ring = PolyRing::new(&big);
        let mut prod = ring.constant(big.one());
        for k in &ks {
            prop_assert_eq!(k.poly.len() as u64, (p - 1) / 2 + 1);
            prod = ring.mul(&prod, &k.poly);
        }
        let psi = PolyRing::new(&f).monic(&division_polynomial(&e, p as usize));
        prop_assert_eq!(prod, emb.forward_poly(&psi));
    }

    #[test]
    fn fibers_match_geometric_points(pi in 0usize..2, li in 0usize..8, j in any::<u64>()) {
        let p = [5u64, 7][pi];
        let l = primes_in(5, 40)[li];
        prop_assume!(l != p && is_prime(l));
        let f = Fq::prime(l);
        let j = j % l;
        let geometric = xpoints_above_j(&f, &f.from_u64(j), p).unwrap().len() as u64;
        prop_assert_eq!(fiber_size(p, l, Some(j)).unwrap(), geometric);
    }
}
