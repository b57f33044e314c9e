//! High-precision binary floating point, wrapping `astro_float` behind a
//! context that fixes precision and rounding once.
//!
//! The shifted-series evaluator and the adjoint formula work at a precision
//! of at least 30 decimal guard digits beyond the requested tolerance, so
//! summation rounding is never the dominant error term.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::rational::Rational;

pub struct HpCtx {
    bits: usize,
    rm: RoundingMode,
    consts: RefCell<Consts>,
}

impl HpCtx {
    pub fn new(bits: usize) -> Self {
        HpCtx {
            bits: bits.max(128),
            rm: RoundingMode::ToEven,
            consts: RefCell::new(Consts::new().expect("constants cache")),
        }
    }

    /// Precision giving ~30 decimal digits of headroom beyond `tol`.
    pub fn for_tol(tol: f64) -> Self {
        let digits = (-tol.log10()).max(0.0) + 30.0;
        let bits = (digits * 3.33).ceil() as usize + 64;
        Self::new(bits.clamp(192, 2048).next_multiple_of(64))
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn pi(&self) -> BigFloat {
        self.consts.borrow_mut().pi(self.bits, self.rm)
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_u64(0, self.bits)
    }

    pub fn from_u64(&self, v: u64) -> BigFloat {
        BigFloat::from_u64(v, self.bits)
    }

    pub fn from_i64(&self, v: i64) -> BigFloat {
        BigFloat::from_i64(v, self.bits)
    }

    pub fn from_f64(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.bits)
    }

    pub fn from_bigint(&self, v: &BigInt) -> BigFloat {
        if let Some(small) = v.to_i128() {
            return BigFloat::from_i128(small, self.bits);
        }
        // fold 64-bit limbs most significant first: acc = acc * 2^64 + limb
        let mut acc = self.zero();
        for limb in v.magnitude().iter_u64_digits().rev() {
            acc = ldexp(&acc, 64).add(&self.from_u64(limb), self.bits, self.rm);
        }
        if v.is_negative() {
            acc = acc.neg();
        }
        acc
    }

    pub fn from_rational(&self, v: &Rational) -> BigFloat {
        let num = self.from_bigint(v.numer());
        if v.denom().to_i64() == Some(1) {
            return num;
        }
        num.div(&self.from_bigint(v.denom()), self.bits, self.rm)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, self.rm)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, self.rm)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, self.rm)
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.bits, self.rm)
    }

    /// `a^s` for real `s > 0` with `a > 0`; integral `s` takes the exact
    /// powering path.
    pub fn pow_real(&self, a: &BigFloat, s: f64) -> BigFloat {
        if s >= 0.0 && s.fract() == 0.0 && s <= u32::MAX as f64 {
            return self.powi(a, s as usize);
        }
        let e = self.from_f64(s);
        a.pow(&e, self.bits, self.rm, &mut self.consts.borrow_mut())
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        a.abs()
    }

    /// Nearest `f64`, built from the top 128 mantissa bits.
    pub fn to_f64(&self, a: &BigFloat) -> f64 {
        to_f64(a)
    }
}

/// `a * 2^shift` exactly, by exponent adjustment.
fn ldexp(a: &BigFloat, shift: i32) -> BigFloat {
    let mut out = a.clone();
    if let Some(e) = out.exponent() {
        if !out.is_zero() {
            out.set_exponent(e + shift);
        }
    }
    out
}

pub fn to_f64(a: &BigFloat) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    if a.is_inf_pos() {
        return f64::INFINITY;
    }
    if a.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    match a.as_raw_parts() {
        Some((words, _, sign, exp, _)) => {
            let n = words.len();
            let hi = words[n - 1] as f64;
            let lo = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
            // mantissa interpreted as a fixed-point value in [1/2, 1)
            let m = hi / 2f64.powi(64) + lo / 2f64.powi(128);
            let v = m * 2f64.powi(exp);
            if sign == Sign::Neg {
                -v
            } else {
                v
            }
        }
        None => f64::NAN,
    }
}
