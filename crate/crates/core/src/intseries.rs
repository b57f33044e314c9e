//! Dense truncated power series over the integers.
//!
//! Internal engine behind the eta-quotient constructors. Convolutions run in
//! `i128` when every coefficient of both operands fits in 46 bits, which
//! covers the eta powers used for the built-in forms; anything larger (for
//! example negative eta exponents, whose coefficients grow like partition
//! numbers) takes the `BigInt` path.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Coefficients indexed by exponent; `coeffs.len()` is the truncation order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct IntSeries {
    pub coeffs: Vec<BigInt>,
}

/// Largest |coefficient| admitted to the i128 convolution fast path.
/// (2^52)^2 * 2^17 < 2^122 keeps every partial sum inside i128 for any
/// truncation order up to 131072.
const FAST_LIMIT: i64 = 1 << 52;

impl IntSeries {
    pub fn zero(prec: usize) -> Self {
        IntSeries {
            coeffs: vec![BigInt::zero(); prec],
        }
    }

    pub fn one(prec: usize) -> Self {
        let mut s = Self::zero(prec);
        if prec > 0 {
            s.coeffs[0] = BigInt::one();
        }
        s
    }

    pub fn prec(&self) -> usize {
        self.coeffs.len()
    }

    fn as_small(&self) -> Option<Vec<i64>> {
        let limit = BigInt::from(FAST_LIMIT);
        if self.coeffs.iter().any(|c| c.abs() > limit) {
            return None;
        }
        Some(
            self.coeffs
                .iter()
                .map(|c| i64::try_from(c).expect("bounded above"))
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntSeries) -> IntSeries {
        let prec = self.prec().min(other.prec());
        if let (Some(a), Some(b)) = (self.as_small(), other.as_small()) {
            let mut out = vec![0i128; prec];
            for (i, &ai) in a.iter().enumerate().take(prec) {
                if ai == 0 {
                    continue;
                }
                let ai = ai as i128;
                for (j, &bj) in b.iter().enumerate().take(prec - i) {
                    if bj != 0 {
                        out[i + j] = out[i + j]
                            .checked_add(ai.checked_mul(bj as i128).expect("bounded product"))
                            .expect("bounded sum");
                    }
                }
            }
            return IntSeries {
                coeffs: out.into_iter().map(BigInt::from).collect(),
            };
        }
        let mut out = vec![BigInt::zero(); prec];
        for (i, ai) in self.coeffs.iter().enumerate().take(prec) {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in other.coeffs.iter().enumerate().take(prec - i) {
                if !bj.is_zero() {
                    out[i + j] += ai * bj;
                }
            }
        }
        IntSeries { coeffs: out }
    }

    /// `self^exp` by binary powering, truncated to `self.prec()`.
    pub fn pow(&self, exp: u32) -> IntSeries {
        let mut result = IntSeries::one(self.prec());
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiplicative inverse; requires constant term 1.
    pub fn invert(&self) -> IntSeries {
        assert!(self.coeffs[0].is_one(), "inversion needs constant term 1");
        let prec = self.prec();
        let mut inv = vec![BigInt::zero(); prec];
        inv[0] = BigInt::one();
        for n in 1..prec {
            let mut acc = BigInt::zero();
            for j in 1..=n {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &inv[n - j];
                }
            }
            inv[n] = -acc;
        }
        IntSeries { coeffs: inv }
    }
}

/// `prod_{n>=1} (1 - q^{step*n})` by the pentagonal number theorem.
pub(crate) fn euler_product(step: u64, prec: usize) -> IntSeries {
    let mut s = IntSeries::zero(prec);
    if prec > 0 {
        s.coeffs[0] = BigInt::one();
    }
    let step = step as u128;
    let mut k: u128 = 1;
    loop {
        let e1 = step * k * (3 * k - 1) / 2;
        let e2 = step * k * (3 * k + 1) / 2;
        if e1 >= prec as u128 && e2 >= prec as u128 {
            break;
        }
        let sign = if k % 2 == 1 {
            BigInt::from(-1)
        } else {
            BigInt::one()
        };
        if e1 < prec as u128 {
            s.coeffs[e1 as usize] += &sign;
        }
        if e2 < prec as u128 {
            s.coeffs[e2 as usize] += &sign;
        }
        k += 1;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_product_leading_terms() {
        // 1 - q - q^2 + q^5 + q^7 - q^12 - q^15 + ...
        let f = euler_product(1, 16);
        let want = [1, -1, -1, 0, 0, 1, 0, 1, 0, 0, 0, 0, -1, 0, 0, -1];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(f.coeffs[n], BigInt::from(*w), "coefficient {n}");
        }
    }

    #[test]
    fn invert_is_inverse() {
        let f = euler_product(1, 40);
        let g = f.invert();
        let prod = f.mul(&g);
        assert_eq!(prod, IntSeries::one(40));
        // 1/phi(q) is the partition generating function
        assert_eq!(g.coeffs[5], BigInt::from(7));
        assert_eq!(g.coeffs[10], BigInt::from(42));
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let f = euler_product(1, 30);
        let by_pow = f.pow(5);
        let mut by_mul = IntSeries::one(30);
        for _ in 0..5 {
            by_mul = by_mul.mul(&f);
        }
        assert_eq!(by_pow, by_mul);
    }

    #[test]
    fn bigint_and_fast_paths_agree() {
        // force the slow path by injecting one huge coefficient, then compare
        // against the fast path on the same small data
        let f = euler_product(1, 25);
        let g = euler_product(2, 25);
        let fast = f.mul(&g);
        let mut f_big = f.clone();
        f_big.coeffs[24] = BigInt::from(i64::MAX) * 4; // beyond FAST_LIMIT
        let slow = f_big.mul(&g);
        assert_eq!(fast.coeffs[..24], slow.coeffs[..24]);
    }
}
