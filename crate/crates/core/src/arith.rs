//! Elementary arithmetic functions: divisor power sums, divisor counts,
//! Bernoulli numbers.
//!
//! The memo tables here are guarded by mutexes and behave exactly like
//! recomputation; they only exist because the series constructors and scans
//! ask for the same values over and over.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{rat_int, Rational};

/// `sigma_r(n) = sum of d^r over divisors d of n`. Errors for `n = 0`.
pub fn sigma_power(r: u32, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::SigmaOfZero);
    }
    let mut sum = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            sum += BigInt::from(d).pow(r);
            let e = n / d;
            if e != d {
                sum += BigInt::from(e).pow(r);
            }
        }
        d += 1;
    }
    Ok(sum)
}

/// Number of divisors of `n >= 1`.
pub fn divisor_count(n: u64) -> u64 {
    factorize(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

static SIGMA1_TABLE: Mutex<Vec<u64>> = Mutex::new(Vec::new());

/// `sigma_1(n)` for all `n <= n_max`, sieved once and cached (index 0 is 0).
pub fn sigma1_table(n_max: usize) -> Vec<u64> {
    let mut table = SIGMA1_TABLE.lock().unwrap();
    if table.len() <= n_max {
        let new_max = n_max.max(table.len().saturating_mul(2)).max(64);
        let mut t = vec![0u64; new_max + 1];
        for d in 1..=new_max {
            for multiple in (d..=new_max).step_by(d) {
                t[multiple] += d as u64;
            }
        }
        *table = t;
    }
    table[..=n_max].to_vec()
}

static BERNOULLI_TABLE: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

fn bernoulli_all(k: usize) -> Rational {
    let mut table = BERNOULLI_TABLE.lock().unwrap();
    if table.is_empty() {
        table.push(Rational::one());
    }
    // sum_{j=0}^{k} C(k+1, j) B_j = 0
    while table.len() <= k {
        let m = table.len();
        let mut acc = Rational::zero();
        let mut binom = BigInt::one(); // C(m+1, 0)
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from_integer(binom.clone()) * b;
            binom = binom * BigInt::from(m as i64 + 1 - j as i64) / BigInt::from(j as i64 + 1);
        }
        table.push(-acc / rat_int(m as i64 + 1));
    }
    table[k].clone()
}

/// Exact Bernoulli number `B_k` for even `k >= 2`; other `k` are rejected
/// because nothing here needs them.
pub fn bernoulli(k: u32) -> Result<Rational> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::BernoulliUnsupported { k });
    }
    Ok(bernoulli_all(k as usize))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_power(1, 1).unwrap(), BigInt::from(1));
        // 1 + 2 + 3 + 6
        assert_eq!(sigma_power(1, 6).unwrap(), BigInt::from(12));
        // 1 + 8
        assert_eq!(sigma_power(3, 2).unwrap(), BigInt::from(9));
        assert_eq!(sigma_power(0, 12).unwrap(), BigInt::from(6));
        assert!(matches!(sigma_power(1, 0), Err(Error::SigmaOfZero)));
    }

    #[test]
    fn sigma_table_matches_direct() {
        let table = sigma1_table(50);
        for n in 1..=50u64 {
            assert_eq!(BigInt::from(table[n as usize]), sigma_power(1, n).unwrap());
        }
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisor_count(1), 1);
        assert_eq!(divisor_count(12), 6);
        assert_eq!(divisor_count(2520), 48);
        assert_eq!(divisor_count(97), 2);
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(2).unwrap(), rat(1, 6));
        assert_eq!(bernoulli(4).unwrap(), rat(-1, 30));
        assert_eq!(bernoulli(6).unwrap(), rat(1, 42));
        assert_eq!(bernoulli(12).unwrap(), rat(-691, 2730));
        assert!(bernoulli(3).is_err());
        assert!(bernoulli(0).is_err());
    }
}
