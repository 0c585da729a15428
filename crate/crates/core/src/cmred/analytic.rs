//! Multiprecision evaluation of the Weierstrass ℘-function on a CM lattice and
//! recognition of kernel polynomial coefficients as integers of Q(√Δ_F).

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Arithmetic context at a fixed binary precision.
pub(super) struct Ctx {
    p: usize,
    cc: RefCell<Consts>,
}

/// A complex number.
#[derive(Clone, Debug)]
pub(super) struct C {
    re: BigFloat,
    im: BigFloat,
}

impl Ctx {
    pub(super) fn new(p: usize) -> Result<Self> {
        let cc = Consts::new().map_err(|e| Error::Invariant(format!("float constants: {e:?}")))?;
        Ok(Ctx { p, cc: RefCell::new(cc) })
    }

    fn int(&self, v: &BigInt) -> BigFloat {
        BigFloat::parse(&v.to_string(), Radix::Dec, self.p, RM, &mut self.cc.borrow_mut())
    }

    fn small(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.p)
    }

    fn rat(&self, v: &BigRational) -> BigFloat {
        self.int(v.numer()).div(&self.int(v.denom()), self.p, RM)
    }

    fn pi(&self) -> BigFloat {
        self.cc.borrow_mut().pi(self.p, RM)
    }

    fn real(&self, re: BigFloat) -> C {
        C { re, im: self.small(0) }
    }

    fn add(&self, a: &C, b: &C) -> C {
        C { re: a.re.add(&b.re, self.p, RM), im: a.im.add(&b.im, self.p, RM) }
    }

    fn sub(&self, a: &C, b: &C) -> C {
        C { re: a.re.sub(&b.re, self.p, RM), im: a.im.sub(&b.im, self.p, RM) }
    }

    fn mul(&self, a: &C, b: &C) -> C {
        let p = self.p;
        let re = a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM);
        let im = a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM);
        C { re, im }
    }

    fn scale(&self, a: &C, s: &BigFloat) -> C {
        C { re: a.re.mul(s, self.p, RM), im: a.im.mul(s, self.p, RM) }
    }

    fn div(&self, a: &C, b: &C) -> C {
        let p = self.p;
        let n = b.re.mul(&b.re, p, RM).add(&b.im.mul(&b.im, p, RM), p, RM);
        let conj = C { re: b.re.clone(), im: b.im.neg() };
        let m = self.mul(a, &conj);
        C { re: m.re.div(&n, p, RM), im: m.im.div(&n, p, RM) }
    }

    /// e^z.
    fn exp(&self, z: &C) -> C {
        let mut cc = self.cc.borrow_mut();
        let r = z.re.exp(self.p, RM, &mut cc);
        let c = z.im.cos(self.p, RM, &mut cc);
        let s = z.im.sin(self.p, RM, &mut cc);
        C { re: r.mul(&c, self.p, RM), im: r.mul(&s, self.p, RM) }
    }

    fn sqrt(&self, x: &BigFloat) -> BigFloat {
        x.sqrt(self.p, RM)
    }
}

/// Nearest integer to x.
fn nearest(x: &BigFloat) -> Option<BigInt> {
    let r = x.round(0, RM);
    if r.is_zero() {
        return Some(BigInt::zero());
    }
    let (words, _, sign, e, _) = r.as_raw_parts()?;
    let bits = Word::BITS as usize;
    let mut m = BigUint::zero();
    for w in words.iter().rev() {
        m = (m << bits) + BigUint::from(*w as u64);
    }
    let total = (words.len() * bits) as i64;
    let e = e as i64;
    let m = if e >= total { m << (e - total) as usize } else { m >> (total - e) as usize };
    let v = BigInt::from(m);
    Some(if sign == Sign::Neg { -v } else { v })
}

/// Lattice data of a CM order: D, Δ_F and an integral short Weierstrass model.
pub(super) struct LatticeInput<'a> {
    pub d: i64,
    pub delta_f: i64,
    pub a4: &'a BigInt,
    pub a6: &'a BigInt,
    /// α = (t + b·√D)/2 of norm q.
    pub t: i64,
    pub b: i64,
    pub q: u64,
}

/// x-coordinates of a half set of ker α on the model, as complex numbers.
fn kernel_roots(ctx: &Ctx, inp: &LatticeInput) -> Result<Vec<C>> {
    let p = ctx.p;
    let absd = ctx.small(-inp.d);
    let sd = ctx.sqrt(&absd);
    let pi = ctx.pi();
    let two_pi = pi.mul(&ctx.small(2), p, RM);
    let delta = inp.d.rem_euclid(2);
    let im_tau = sd.div(&ctx.small(2), p, RM);
    let re_tau = ctx.rat(&BigRational::new(delta.into(), 2.into()));
    // q = e^{2πiτ} is real: ±e^{−π√|D|}
    let mut qq = pi.mul(&sd, p, RM).neg().exp(p, RM, &mut ctx.cc.borrow_mut());
    if delta == 1 {
        qq = qq.neg();
    }
    let bits_per_term = std::f64::consts::PI * ((-inp.d) as f64).sqrt() / std::f64::consts::LN_2;
    let terms = ((p as f64 + 128.0) / bits_per_term).ceil() as usize + 4;
    let one = ctx.real(ctx.small(1));
    let qc = ctx.real(qq.clone());
    let mut qn = Vec::with_capacity(terms + 1);
    let mut acc = one.clone();
    for _ in 0..=terms {
        qn.push(acc.clone());
        acc = ctx.mul(&acc, &qc);
    }
    // E4, E6
    let mut s3 = ctx.small(0);
    let mut s5 = ctx.small(0);
    for (n, qk) in qn.iter().enumerate().skip(1) {
        let frac = qk.re.div(&ctx.small(1).sub(&qk.re, p, RM), p, RM);
        let n3 = ctx.small((n as i64).pow(3));
        let n5 = ctx.small((n as i64).pow(5));
        s3 = s3.add(&frac.mul(&n3, p, RM), p, RM);
        s5 = s5.add(&frac.mul(&n5, p, RM), p, RM);
    }
    let e4 = ctx.small(1).add(&s3.mul(&ctx.small(240), p, RM), p, RM);
    let e6 = ctx.small(1).sub(&s5.mul(&ctx.small(504), p, RM), p, RM);
    let tp2 = two_pi.mul(&two_pi, p, RM);
    let tp4 = tp2.mul(&tp2, p, RM);
    let tp6 = tp4.mul(&tp2, p, RM);
    let g2 = tp4.mul(&e4, p, RM).div(&ctx.small(12), p, RM);
    let g3 = tp6.mul(&e6, p, RM).div(&ctx.small(216), p, RM);
    // y² = x³ + a·x + b for (℘, ℘′/2)
    let a = g2.div(&ctx.small(-4), p, RM);
    let b = g3.div(&ctx.small(-4), p, RM);
    // model x = w·℘ with A = w²a, B = w³b
    let (ba, bb) = (ctx.int(inp.a4), ctx.int(inp.a6));
    let w = if inp.a6.is_zero() {
        let r = ba.div(&a, p, RM);
        if r.is_negative() {
            C { re: ctx.small(0), im: ctx.sqrt(&r.neg()) }
        } else {
            ctx.real(ctx.sqrt(&r))
        }
    } else if inp.a4.is_zero() {
        ctx.real(bb.div(&b, p, RM).cbrt(p, RM))
    } else {
        ctx.real(bb.mul(&a, p, RM).div(&ba.mul(&b, p, RM), p, RM))
    };
    // z = k/α = k·ᾱ/q = s + r·τ with ᾱ = (t + bδ)/2 − b·τ
    let q = inp.q as i64;
    let centered = |x: BigRational| {
        let f = (x.clone() + BigRational::new(1.into(), 2.into())).floor();
        x - f
    };
    let mut out = Vec::new();
    for k in 1..=(q - 1) / 2 {
        let s = centered(BigRational::new((k * (inp.t + inp.b * delta) / 2).into(), q.into()));
        let r = centered(BigRational::new((-k * inp.b).into(), q.into()));
        let (sf, rf) = (ctx.rat(&s), ctx.rat(&r));
        let z_re = sf.add(&rf.mul(&re_tau, p, RM), p, RM);
        let z_im = rf.mul(&im_tau, p, RM);
        // u = e^{2πiz}
        let u = ctx.exp(&C { re: z_im.mul(&two_pi, p, RM).neg(), im: z_re.mul(&two_pi, p, RM) });
        let ui = ctx.div(&one, &u);
        let sq = |x: &C| {
            let d = ctx.sub(&one, x);
            ctx.div(x, &ctx.mul(&d, &d))
        };
        let mut sum = ctx.add(&ctx.real(ctx.small(1).div(&ctx.small(12), p, RM)), &sq(&u));
        for qk in qn.iter().skip(1) {
            let t1 = sq(&ctx.mul(qk, &u));
            let t2 = sq(&ctx.mul(qk, &ui));
            let t3 = ctx.scale(&sq(qk), &ctx.small(2));
            sum = ctx.add(&sum, &ctx.sub(&ctx.add(&t1, &t2), &t3));
        }
        // (2πi)² = −4π²
        let wp = ctx.scale(&sum, &tp2.neg());
        out.push(ctx.mul(&w, &wp));
    }
    Ok(out)
}

/// Recognized kernel polynomial: coefficients (X_i, Y_i) of
/// s^{d−i}·c_i = (X_i + Y_i·√Δ_F)/2 with s = q^m, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct Recognized {
    pub m: u32,
    pub coeffs: Vec<(BigInt, BigInt)>,
}

/// Kernel polynomial of α on the model, recognized at `bits` of precision.
pub(super) fn recognize_kernel(inp: &LatticeInput, bits: usize) -> Result<Recognized> {
    let ctx = Ctx::new(bits)?;
    let roots = kernel_roots(&ctx, inp)?;
    let mut c = vec![ctx.real(ctx.small(1))];
    for x in &roots {
        // c ← c·(X − x)
        let mut next = vec![ctx.real(ctx.small(0)); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] = ctx.add(&next[i + 1], ci);
            next[i] = ctx.sub(&next[i], &ctx.mul(ci, x));
        }
        c = next;
    }
    let d = roots.len();
    let sdf = ctx.sqrt(&ctx.small(-inp.delta_f));
    let tol = BigFloat::from_f64(2f64.powi(-32), bits);
    let delta = BigInt::from(inp.delta_f);
    'scale: for m in 0..=4u32 {
        let mut coeffs = Vec::with_capacity(d + 1);
        for (i, ci) in c.iter().enumerate() {
            let s = ctx.int(&BigInt::from(inp.q).pow(m * (d - i) as u32));
            let x = ci.re.mul(&s, bits, RM).mul(&ctx.small(2), bits, RM);
            let y = ci.im.mul(&s, bits, RM).mul(&ctx.small(2), bits, RM).div(&sdf, bits, RM);
            let (Some(xr), Some(yr)) = (nearest(&x), nearest(&y)) else { continue 'scale };
            let close = |v: &BigFloat, r: &BigInt| v.sub(&ctx.int(r), bits, RM).abs().cmp(&tol).is_some_and(|o| o < 0);
            if !close(&x, &xr) || !close(&y, &yr) {
                continue 'scale;
            }
            if !(&xr * &xr - &delta * &yr * &yr).is_multiple_of(&BigInt::from(4)) {
                continue 'scale;
            }
            coeffs.push((xr, yr));
        }
        return Ok(Recognized { m, coeffs });
    }
    Err(Error::Precision(bits))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_to_integers() {
        let ctx = Ctx::new(256).unwrap();
        for v in ["0", "1", "-7", "123456789012345678901234567890", "-340282366920938463463374607431768211457"] {
            let b: BigInt = v.parse().unwrap();
            assert_eq!(nearest(&ctx.int(&b)).unwrap(), b);
        }
        let x = ctx.small(7).div(&ctx.small(2), 256, RM);
        assert_eq!(nearest(&x.add(&ctx.small(1).div(&ctx.small(100), 256, RM), 256, RM)).unwrap(), BigInt::from(4));
    }
}
