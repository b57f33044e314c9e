//! Constructors for the concrete forms used throughout the crate, the Serre
//! derivative, and the coefficient-growth check.
//!
//! Built-in forms:
//! - `eisenstein(k)`: `E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n`, with `E_2`
//!   flagged quasimodular;
//! - `delta`: the discriminant form, coefficients tau(n);
//! - `eta_quotient`: `q^{e} prod_d prod_n (1 - q^{dn})^{r_d}` with
//!   `e = sum d*r_d / 24`;
//! - `level2_weight2`: `X_2 = 2 V_2 E_2 - E_2`, holomorphic of weight 2 on
//!   level 2;
//! - `delta_10_2`: the normalized cusp form spanning the weight-10 level-2
//!   cuspidal space, built as `eta(z)^8 eta(2z)^8 * X_2`.
//!
//! tau and tau_{10,2} tables are cached process-wide; the caches are
//! observationally pure.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{bernoulli, divisor_count, sigma1_table};
use crate::error::{Error, Result};
use crate::intseries::{euler_product, IntSeries};
use crate::qseries::QExpansion;
use crate::rational::{rat, rat_int, Rational};

// ---------------------------------------------------------------------------
// Eisenstein series
// ---------------------------------------------------------------------------

/// `E_k` to `prec` terms, exact. `k = 2` is flagged quasimodular.
pub fn eisenstein(k: u32, prec: usize) -> Result<QExpansion> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::EisensteinUnsupported { k });
    }
    let prec = prec.max(1);
    let factor = rat_int(-2 * k as i64) / bernoulli(k)?;
    // sieve sigma_{k-1}(n) for n < prec
    let mut sums = vec![BigInt::zero(); prec];
    for d in 1..prec {
        let dp = BigInt::from(d).pow(k - 1);
        for multiple in (d..prec).step_by(d) {
            sums[multiple] += &dp;
        }
    }
    let mut coeffs = vec![Rational::one()];
    coeffs.extend(
        sums.into_iter()
            .skip(1)
            .map(|s| &factor * Rational::from_integer(s)),
    );
    Ok(QExpansion::new(coeffs, k as i64, 1).with_quasimodular_flag(k == 2))
}

// ---------------------------------------------------------------------------
// Eta quotients
// ---------------------------------------------------------------------------

/// Integer-series engine for `q^e prod_d phi(q^d)^{r_d}`; returns the product
/// part (without the `q^e` shift) to `prec` terms.
fn eta_quotient_product(factors: &[(u64, i32)], prec: usize) -> IntSeries {
    let mut acc = IntSeries::one(prec);
    for &(d, r) in factors {
        if r == 0 {
            continue;
        }
        let base = euler_product(d, prec);
        let base = if r < 0 { base.invert() } else { base };
        acc = acc.mul(&base.pow(r.unsigned_abs()));
    }
    acc
}

fn eta_quotient_leading_exponent(factors: &[(u64, i32)]) -> Result<i64> {
    let mut total: i64 = 0;
    for &(d, r) in factors {
        if d == 0 {
            return Err(Error::InvalidEtaQuotient {
                reason: "eta argument multiplier d must be positive".into(),
            });
        }
        total += d as i64 * r as i64;
    }
    if total % 24 != 0 {
        return Err(Error::InvalidEtaQuotient {
            reason: format!("leading exponent {total}/24 is fractional"),
        });
    }
    let e = total / 24;
    if e < 0 {
        return Err(Error::InvalidEtaQuotient {
            reason: format!("leading exponent {e} is negative (pole at infinity)"),
        });
    }
    Ok(e)
}

fn eta_quotient_weight(factors: &[(u64, i32)]) -> Result<i64> {
    let sum: i64 = factors.iter().map(|&(_, r)| r as i64).sum();
    if sum % 2 != 0 {
        return Err(Error::InvalidEtaQuotient {
            reason: "half-integral weight eta quotients are not supported".into(),
        });
    }
    Ok(sum / 2)
}

fn eta_quotient_level(factors: &[(u64, i32)]) -> u64 {
    factors
        .iter()
        .filter(|&&(_, r)| r != 0)
        .map(|&(d, _)| d)
        .fold(1u64, |acc, d| acc.lcm(&d))
}

/// `q^{(sum d r_d)/24} prod_d prod_{n>=1} (1 - q^{dn})^{r_d}` to `prec`
/// terms. The empty quotient is the constant 1.
pub fn eta_quotient(factors: &[(u64, i32)], prec: usize) -> Result<QExpansion> {
    let prec = prec.max(1);
    let e = eta_quotient_leading_exponent(factors)? as usize;
    let weight = eta_quotient_weight(factors)?;
    let level = eta_quotient_level(factors);
    let mut coeffs = vec![Rational::zero(); prec];
    if e < prec {
        let product = eta_quotient_product(factors, prec - e);
        for (n, c) in product.coeffs.into_iter().enumerate() {
            coeffs[e + n] = Rational::from_integer(c);
        }
    }
    Ok(QExpansion::new(coeffs, weight, level).with_cusp_flag(e >= 1))
}

// ---------------------------------------------------------------------------
// Delta and the level-2 forms, with cached coefficient tables
// ---------------------------------------------------------------------------

static TAU_TABLE: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());
static TAU_10_2_TABLE: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());

fn extend_table(
    table: &Mutex<Vec<BigInt>>,
    n_max: usize,
    build: impl Fn(usize) -> Vec<BigInt>,
) -> Vec<BigInt> {
    let mut guard = table.lock().unwrap();
    if guard.len() <= n_max {
        let target = (n_max + 1).max(guard.len() * 2).max(256);
        *guard = build(target);
    }
    guard[..=n_max].to_vec()
}

/// `tau(n)` for `0 <= n <= n_max` (index 0 holds 0).
pub fn tau_table(n_max: usize) -> Vec<BigInt> {
    extend_table(&TAU_TABLE, n_max, |target| {
        // Delta = q * phi(q)^24
        let p24 = euler_product(1, target).pow(24);
        let mut t = vec![BigInt::zero(); target + 1];
        for n in 1..=target {
            t[n] = p24.coeffs[n - 1].clone();
        }
        t
    })
}

/// Ramanujan tau of a single argument.
pub fn tau(n: u64) -> BigInt {
    tau_table(n as usize)[n as usize].clone()
}

/// `tau_{10,2}(n)`, the coefficients of the weight-10 level-2 cusp form, for
/// `0 <= n <= n_max`.
pub fn tau_10_2_table(n_max: usize) -> Vec<BigInt> {
    extend_table(&TAU_10_2_TABLE, n_max, |target| {
        // eta(z)^8 eta(2z)^8 = q * (phi(q) phi(q^2))^8, times X_2
        let base = euler_product(1, target).mul(&euler_product(2, target));
        let d82 = base.pow(8);
        let x2 = level2_weight2_int(target);
        let prod = d82.mul(&x2);
        let mut t = vec![BigInt::zero(); target + 1];
        for n in 1..=target {
            t[n] = prod.coeffs[n - 1].clone();
        }
        t
    })
}

fn level2_weight2_int(prec: usize) -> IntSeries {
    let sig = sigma1_table(prec);
    let mut s = IntSeries::zero(prec.max(1));
    s.coeffs[0] = BigInt::one();
    for n in 1..prec {
        let mut c = BigInt::from(24u32) * BigInt::from(sig[n]);
        if n % 2 == 0 {
            c -= BigInt::from(48u32) * BigInt::from(sig[n / 2]);
        }
        s.coeffs[n] = c;
    }
    s
}

/// The discriminant cusp form, normalized so the `q` coefficient is 1.
pub fn delta(prec: usize) -> QExpansion {
    let prec = prec.max(1);
    let table = tau_table(prec.saturating_sub(1));
    let coeffs = (0..prec)
        .map(|n| Rational::from_integer(table[n].clone()))
        .collect();
    QExpansion::new(coeffs, 12, 1).with_cusp_flag(true)
}

/// Independent construction of delta as `(E_4^3 - E_6^2)/1728`; kept as a
/// cross-check against the eta-product route.
pub fn delta_from_eisenstein(prec: usize) -> QExpansion {
    let e4 = eisenstein(4, prec).expect("k=4 valid");
    let e6 = eisenstein(6, prec).expect("k=6 valid");
    let diff = e4
        .mul(&e4)
        .mul(&e4)
        .sub(&e6.mul(&e6))
        .expect("weights both 12");
    diff.scale(&rat(1, 1728)).with_cusp_flag(true)
}

/// `V_2 Delta`, i.e. `Delta(2z)`, of weight 12 and level 2.
pub fn v2_delta(prec: usize) -> QExpansion {
    delta(prec).v_expand(2)
}

/// `eta(z)^8 eta(2z)^8`, the weight-8 level-2 cusp form.
pub fn delta_8_2(prec: usize) -> QExpansion {
    eta_quotient(&[(1, 8), (2, 8)], prec).expect("valid quotient")
}

/// `X_2 = 2 V_2 E_2 - E_2 = 1 + 24 sum sigma(n) q^n - 48 sum sigma(n) q^{2n}`,
/// a holomorphic weight-2 form on level 2 (the quasimodular parts cancel).
pub fn level2_weight2(prec: usize) -> QExpansion {
    let prec = prec.max(1);
    let ints = level2_weight2_int(prec);
    let coeffs = ints
        .coeffs
        .into_iter()
        .map(Rational::from_integer)
        .collect();
    QExpansion::new(coeffs, 2, 2)
}

/// The normalized generator of the weight-10 level-2 cuspidal space.
pub fn delta_10_2(prec: usize) -> QExpansion {
    let prec = prec.max(1);
    let table = tau_10_2_table(prec.saturating_sub(1));
    let coeffs = (0..prec)
        .map(|n| Rational::from_integer(table[n].clone()))
        .collect();
    QExpansion::new(coeffs, 10, 2).with_cusp_flag(true)
}

// ---------------------------------------------------------------------------
// Serre derivative
// ---------------------------------------------------------------------------

/// `theta_k f = Df - (k/12) E_2 f`, weight `k + 2`, same level. The result is
/// genuinely modular, and cusp forms map to cusp forms.
pub fn serre_derivative(f: &QExpansion, k: i64) -> Result<QExpansion> {
    if f.weight() != k {
        return Err(Error::WeightMismatch {
            left: f.weight(),
            right: k,
        });
    }
    let e2 = eisenstein(2, f.prec())?;
    let correction = e2.mul(f).scale(&rat(-k, 12));
    let sum = f.derive().add(&correction)?;
    Ok(QExpansion::raw(
        sum.coeffs().to_vec(),
        k + 2,
        f.level(),
        f.is_cusp(),
        false,
    ))
}

// ---------------------------------------------------------------------------
// Coefficient growth check
// ---------------------------------------------------------------------------

/// Outcome of [`deligne_check`]: the largest observed `|a(n)| / (d(n) n^{(k-1)/2})`
/// and the first `n` violating the bound, if any.
#[derive(Debug, Clone, Serialize)]
pub struct DeligneReport {
    pub k_ambient: i64,
    pub n_checked: usize,
    pub max_ratio: f64,
    pub argmax: usize,
    pub first_violation: Option<usize>,
}

impl DeligneReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Verifies `|a(n)| <= d(n) n^{(k-1)/2}` for `1 <= n <= n_max`. The
/// comparison squares both sides and runs in exact integer arithmetic.
pub fn deligne_check(f: &QExpansion, k_ambient: i64, n_max: usize) -> Result<DeligneReport> {
    if !f.is_cusp() {
        return Err(Error::NotCuspForm);
    }
    if f.weight() != k_ambient {
        return Err(Error::WeightMismatch {
            left: f.weight(),
            right: k_ambient,
        });
    }
    if k_ambient < 1 {
        return Err(Error::InvalidArgument(format!(
            "ambient weight {k_ambient} must be positive"
        )));
    }
    if n_max >= f.prec() {
        return Err(Error::InsufficientPrecision {
            have: f.prec(),
            need: n_max + 1,
        });
    }
    let mut max_ratio = 0.0f64;
    let mut argmax = 0usize;
    let mut first_violation = None;
    for n in 1..=n_max {
        let c = f.coeff(n);
        if !c.is_integer() {
            return Err(Error::NonIntegralCoefficient { n });
        }
        let a = c.numer();
        let d = divisor_count(n as u64);
        // |a(n)|^2 <= d(n)^2 * n^(k-1), exactly
        let lhs = a * a;
        let rhs = BigInt::from(d * d) * BigInt::from(n).pow(k_ambient as u32 - 1);
        let ratio = {
            let num = lhs.to_f64().unwrap_or(f64::MAX);
            let den = rhs.to_f64().unwrap_or(f64::MAX);
            (num / den).sqrt()
        };
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax = n;
        }
        if lhs > rhs && first_violation.is_none() {
            first_violation = Some(n);
        }
    }
    Ok(DeligneReport {
        k_ambient,
        n_checked: n_max,
        max_ratio,
        argmax,
        first_violation,
    })
}

// ---------------------------------------------------------------------------
// Symbolic form recipes
// ---------------------------------------------------------------------------

use crate::rational::serde_str as rational_serde;

/// Recipe node for a [`FormSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FormKind {
    Eisenstein {
        k: u32,
    },
    EtaQuotient {
        factors: Vec<(u64, i32)>,
    },
    /// The named form `X_2 = 2 V_2 E_2 - E_2`.
    Level2Weight2,
    Product {
        factors: Vec<FormSpec>,
    },
    Scaled {
        #[serde(with = "rational_serde")]
        scalar: Rational,
        form: Box<FormSpec>,
    },
    VShift {
        t: u64,
        form: Box<FormSpec>,
    },
    LinearCombination {
        terms: Vec<WeightedForm>,
    },
}

/// One `coefficient * form` summand of a linear combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedForm {
    #[serde(with = "rational_serde")]
    pub coefficient: Rational,
    pub form: FormSpec,
}

/// A symbolic recipe for a modular form, carrying derived weight, level, and
/// cusp metadata. Supports both q-expansion (here) and point evaluation (in
/// the quadrature module).
///
/// The JSON form is the bare recipe tree (`{"kind": "eta_quotient", ...}`);
/// weight, level, and cusp data are re-derived on load so deserialized
/// values always satisfy the consistency invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct FormSpec {
    kind: FormKind,
    weight: i64,
    level: u64,
    is_cusp: bool,
}

impl Serialize for FormSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.kind.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let kind = FormKind::deserialize(d)?;
        FormSpec::from_kind(kind).map_err(serde::de::Error::custom)
    }
}

impl FormSpec {
    pub fn from_kind(kind: FormKind) -> Result<FormSpec> {
        let (weight, level, is_cusp) = match &kind {
            FormKind::Eisenstein { k } => {
                if *k < 2 || k % 2 != 0 {
                    return Err(Error::EisensteinUnsupported { k: *k });
                }
                (*k as i64, 1, false)
            }
            FormKind::EtaQuotient { factors } => {
                let e = eta_quotient_leading_exponent(factors)?;
                (
                    eta_quotient_weight(factors)?,
                    eta_quotient_level(factors),
                    e >= 1,
                )
            }
            FormKind::Level2Weight2 => (2, 2, false),
            FormKind::Product { factors } => {
                let mut weight = 0i64;
                let mut level = 1u64;
                let mut is_cusp = false;
                for f in factors {
                    weight += f.weight;
                    level = level.lcm(&f.level);
                    is_cusp |= f.is_cusp;
                }
                (weight, level, is_cusp)
            }
            FormKind::Scaled { form, .. } => (form.weight, form.level, form.is_cusp),
            FormKind::VShift { t, form } => {
                if *t < 1 {
                    return Err(Error::InvalidArgument("V_t needs t >= 1".into()));
                }
                (form.weight, form.level * t, form.is_cusp)
            }
            FormKind::LinearCombination { terms } => {
                let Some((first, rest)) = terms.split_first() else {
                    return Err(Error::InvalidArgument(
                        "linear combination needs at least one term".into(),
                    ));
                };
                let first = &first.form;
                let mut level = first.level;
                let mut is_cusp = first.is_cusp;
                for t in rest {
                    let f = &t.form;
                    if f.weight != first.weight {
                        return Err(Error::WeightMismatch {
                            left: first.weight,
                            right: f.weight,
                        });
                    }
                    level = level.lcm(&f.level);
                    is_cusp &= f.is_cusp;
                }
                (first.weight, level, is_cusp)
            }
        };
        Ok(FormSpec {
            kind,
            weight,
            level,
            is_cusp,
        })
    }

    pub fn kind(&self) -> &FormKind {
        &self.kind
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn is_cusp(&self) -> bool {
        self.is_cusp
    }

    pub fn eisenstein(k: u32) -> Result<FormSpec> {
        FormSpec::from_kind(FormKind::Eisenstein { k })
    }

    pub fn eta_quotient(factors: Vec<(u64, i32)>) -> Result<FormSpec> {
        FormSpec::from_kind(FormKind::EtaQuotient { factors })
    }

    pub fn delta() -> FormSpec {
        FormSpec::eta_quotient(vec![(1, 24)]).expect("valid quotient")
    }

    pub fn v_shift(t: u64, form: FormSpec) -> Result<FormSpec> {
        FormSpec::from_kind(FormKind::VShift {
            t,
            form: Box::new(form),
        })
    }

    pub fn v2_delta() -> FormSpec {
        FormSpec::v_shift(2, FormSpec::delta()).expect("valid shift")
    }

    pub fn delta_8_2() -> FormSpec {
        FormSpec::eta_quotient(vec![(1, 8), (2, 8)]).expect("valid quotient")
    }

    pub fn level2_weight2() -> FormSpec {
        FormSpec::from_kind(FormKind::Level2Weight2).expect("valid")
    }

    pub fn delta_10_2() -> FormSpec {
        FormSpec::from_kind(FormKind::Product {
            factors: vec![FormSpec::delta_8_2(), FormSpec::level2_weight2()],
        })
        .expect("valid product")
    }

    /// Expands the recipe to `prec` coefficients.
    pub fn qexpansion(&self, prec: usize) -> Result<QExpansion> {
        let result = match &self.kind {
            FormKind::Eisenstein { k } => eisenstein(*k, prec)?,
            FormKind::EtaQuotient { factors } => eta_quotient(factors, prec)?,
            FormKind::Level2Weight2 => level2_weight2(prec),
            FormKind::Product { factors } => {
                let mut acc: Option<QExpansion> = None;
                for f in factors {
                    let fq = f.qexpansion(prec)?;
                    acc = Some(match acc {
                        None => fq,
                        Some(a) => a.mul(&fq),
                    });
                }
                acc.unwrap_or_else(|| {
                    let mut coeffs = vec![Rational::zero(); prec.max(1)];
                    coeffs[0] = Rational::one();
                    QExpansion::new(coeffs, 0, 1)
                })
            }
            FormKind::Scaled { scalar, form } => form.qexpansion(prec)?.scale(scalar),
            FormKind::VShift { t, form } => form.qexpansion(prec)?.v_expand(*t),
            FormKind::LinearCombination { terms } => {
                let mut acc: Option<QExpansion> = None;
                for t in terms {
                    let part = t.form.qexpansion(prec)?.scale(&t.coefficient);
                    acc = Some(match acc {
                        None => part,
                        Some(a) => a.add(&part)?,
                    });
                }
                acc.expect("validated nonempty")
            }
        };
        // the recipe metadata is authoritative; in particular X_2 and its
        // products are genuinely modular even though E_2 enters the recipe
        if self.is_cusp && !result.coeff(0).is_zero() {
            return Err(Error::InvalidArgument(
                "recipe flagged cuspidal but expansion has nonzero constant term".into(),
            ));
        }
        Ok(QExpansion::raw(
            result.coeffs().to_vec(),
            self.weight,
            self.level,
            self.is_cusp,
            self.is_quasimodular_recipe(),
        ))
    }

    /// Syntactic rule: a recipe is quasimodular if `E_2` occurs anywhere in
    /// it. `X_2` has its own kind precisely because its `E_2` parts cancel.
    fn is_quasimodular_recipe(&self) -> bool {
        match &self.kind {
            FormKind::Eisenstein { k } => *k == 2,
            FormKind::EtaQuotient { .. } | FormKind::Level2Weight2 => false,
            FormKind::Product { factors } => {
                factors.iter().any(|f| f.is_quasimodular_recipe())
            }
            FormKind::Scaled { form, .. } | FormKind::VShift { form, .. } => {
                form.is_quasimodular_recipe()
            }
            FormKind::LinearCombination { terms } => {
                terms.iter().any(|t| t.form.is_quasimodular_recipe())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eisenstein_leading_coefficients() {
        let e2 = eisenstein(2, 5).unwrap();
        assert_eq!(e2.coeff(0), &rat_int(1));
        assert_eq!(e2.coeff(1), &rat_int(-24));
        assert!(e2.is_quasimodular());
        let e4 = eisenstein(4, 5).unwrap();
        assert_eq!(e4.coeff(1), &rat_int(240));
        assert_eq!(e4.coeff(2), &rat_int(2160));
        assert!(!e4.is_quasimodular());
        let e6 = eisenstein(6, 5).unwrap();
        assert_eq!(e6.coeff(1), &rat_int(-504));
        assert!(eisenstein(3, 5).is_err());
        assert!(eisenstein(0, 5).is_err());
    }

    #[test]
    fn delta_first_coefficients() {
        let d = delta(13);
        let want = [
            0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920, 534612, -370944,
        ];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(d.coeff(n), &rat_int(*w), "tau({n})");
        }
        assert!(d.is_cusp());
        assert_eq!(d.weight(), 12);
        assert_eq!(d.level(), 1);
    }

    #[test]
    fn delta_constructions_agree() {
        let via_eta = delta(300);
        let via_eis = delta_from_eisenstein(300);
        assert_eq!(via_eta.coeffs(), via_eis.coeffs());
    }

    #[test]
    fn tau_hecke_multiplicativity() {
        // independent oracle for the high table entries
        let t = tau_table(1000);
        let p = |n: usize| t[n].clone();
        assert_eq!(p(10), &p(2) * &p(5));
        assert_eq!(p(100), &p(4) * &p(25));
        assert_eq!(p(4), &p(2) * &p(2) - BigInt::from(2u64).pow(11));
        assert_eq!(p(25), &p(5) * &p(5) - BigInt::from(5u64).pow(11));
        assert_eq!(p(1000), &p(8) * &p(125));
        assert_eq!(p(10), BigInt::from(-115920));
    }

    #[test]
    fn eta_quotient_delta_8_2() {
        let d82 = delta_8_2(11);
        let want = [0, 1, -8, 12, 64, -210, -96, 1016, -512, -2043, 1680];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(d82.coeff(n), &rat_int(*w), "coefficient {n}");
        }
        assert_eq!(d82.weight(), 8);
        assert_eq!(d82.level(), 2);
        assert!(d82.is_cusp());
    }

    #[test]
    fn eta_quotient_matches_delta() {
        let via_quotient = eta_quotient(&[(1, 24)], 60).unwrap();
        let via_delta = delta(60);
        assert_eq!(via_quotient.coeffs(), via_delta.coeffs());
        assert_eq!(via_quotient.weight(), 12);
    }

    #[test]
    fn eta_quotient_empty_is_one() {
        let one = eta_quotient(&[], 4).unwrap();
        assert_eq!(one.coeff(0), &rat_int(1));
        assert!(one.coeffs()[1..].iter().all(|c| c.is_zero()));
        assert_eq!(one.weight(), 0);
        assert!(!one.is_cusp());
    }

    #[test]
    fn eta_quotient_rejections() {
        // fractional leading exponent
        assert!(matches!(
            eta_quotient(&[(1, 1)], 4),
            Err(Error::InvalidEtaQuotient { .. })
        ));
        // negative leading exponent (pole at infinity)
        assert!(matches!(
            eta_quotient(&[(1, -24)], 4),
            Err(Error::InvalidEtaQuotient { .. })
        ));
        // half-integral weight
        assert!(matches!(
            eta_quotient(&[(24, 1)], 4),
            Err(Error::InvalidEtaQuotient { .. })
        ));
    }

    #[test]
    fn eta_quotient_negative_exponents() {
        // eta(z)^{-24} eta(2z)^{48}: leading exponent (-24 + 96)/24 = 3
        let f = eta_quotient(&[(1, -24), (2, 48)], 8).unwrap();
        assert_eq!(f.weight(), 12);
        assert_eq!(f.level(), 2);
        assert!(f.coeffs()[..3].iter().all(|c| c.is_zero()));
        assert_eq!(f.coeff(3), &rat_int(1));
        assert!(f.is_cusp());
    }

    #[test]
    fn level2_weight2_coefficients() {
        let x2 = level2_weight2(9);
        let want = [1, 24, 24, 96, 24, 144, 96, 192, 24];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(x2.coeff(n), &rat_int(*w), "coefficient {n}");
        }
        assert!(!x2.is_quasimodular());
        assert_eq!(x2.weight(), 2);
        assert_eq!(x2.level(), 2);
    }

    #[test]
    fn delta_10_2_coefficients() {
        let d = delta_10_2(13);
        let want = [
            0, 1, 16, -156, 256, 870, -2496, -952, 4096, 4653, 13920, -56148, -39936,
        ];
        for (n, w) in want.iter().enumerate() {
            assert_eq!(d.coeff(n), &rat_int(*w), "tau_10_2({n})");
        }
        // newform sanity: a_2^2 = 2^{k-2}
        assert_eq!(d.coeff(2) * d.coeff(2), rat_int(256));
        assert!(d.is_cusp());
        assert_eq!(d.weight(), 10);
        assert_eq!(d.level(), 2);
    }

    #[test]
    fn delta_10_2_matches_product_construction() {
        let cached = delta_10_2(40);
        let product = delta_8_2(40).mul(&level2_weight2(40));
        assert_eq!(cached.coeffs(), product.coeffs());
        assert_eq!(product.weight(), 10);
        assert_eq!(product.level(), 2);
        assert!(product.is_cusp());
    }

    #[test]
    fn serre_derivative_annihilates_delta() {
        let d = delta(120);
        let th = serre_derivative(&d, 12).unwrap();
        assert!(th.is_zero_series());
        assert_eq!(th.weight(), 14);
        assert!(th.is_cusp());
        assert!(!th.is_quasimodular());
    }

    #[test]
    fn serre_derivative_of_e4() {
        // theta_4 E_4 = -(1/3) E_6
        let e4 = eisenstein(4, 40).unwrap();
        let th = serre_derivative(&e4, 4).unwrap();
        let target = eisenstein(6, 40).unwrap().scale(&rat(-1, 3));
        assert_eq!(th.coeffs(), target.coeffs());
        assert_eq!(th.weight(), 6);
    }

    #[test]
    fn serre_derivative_of_delta_10_2_leading_terms() {
        let th = serre_derivative(&delta_10_2(30), 10).unwrap();
        assert_eq!(th.coeff(1), &rat(1, 6));
        assert_eq!(th.weight(), 12);
        assert!(th.is_cusp());
    }

    #[test]
    fn serre_derivative_weight_check() {
        assert!(serre_derivative(&delta(10), 10).is_err());
    }

    #[test]
    fn serre_derivative_constant_term_rule() {
        // constant term maps to -k/12 times itself
        let e4 = eisenstein(4, 10).unwrap();
        let th = serre_derivative(&e4, 4).unwrap();
        assert_eq!(th.coeff(0), &rat(-1, 3));
        // leading coefficient of a normalized cusp form maps to 1 - k/12
        let th10 = serre_derivative(&delta_10_2(10), 10).unwrap();
        assert_eq!(th10.coeff(1), &(rat_int(1) - rat(10, 12)));
    }

    #[test]
    fn deligne_check_delta_small() {
        let d = delta(600);
        let report = deligne_check(&d, 12, 500).unwrap();
        assert!(report.passed());
        assert!(report.max_ratio <= 1.0);
        assert!(report.max_ratio > 0.5); // n=1 attains ratio 1
    }

    #[test]
    fn deligne_check_zero_passes() {
        let z = QExpansion::zero(10, 12, 1);
        let report = deligne_check(&z, 12, 9).unwrap();
        assert!(report.passed());
        assert_eq!(report.max_ratio, 0.0);
    }

    #[test]
    fn deligne_check_rejects_violation() {
        let mut coeffs = vec![Rational::zero(); 5];
        coeffs[1] = rat_int(1);
        coeffs[3] = rat_int(1_000_000); // way above d(3) * 3^{5.5}
        let f = QExpansion::new(coeffs, 12, 1).with_cusp_flag(true);
        let report = deligne_check(&f, 12, 4).unwrap();
        assert_eq!(report.first_violation, Some(3));
        assert!(!report.passed());
    }

    #[test]
    fn deligne_check_requires_precision() {
        let d = delta(100);
        assert!(matches!(
            deligne_check(&d, 12, 100),
            Err(Error::InsufficientPrecision { .. })
        ));
    }

    #[test]
    fn formspec_metadata_and_expansion() {
        let spec = FormSpec::delta_10_2();
        assert_eq!(spec.weight(), 10);
        assert_eq!(spec.level(), 2);
        assert!(spec.is_cusp());
        let expansion = spec.qexpansion(13).unwrap();
        assert_eq!(expansion.coeffs(), delta_10_2(13).coeffs());
        assert!(!expansion.is_quasimodular());
    }

    #[test]
    fn formspec_json_round_trip() {
        let specs = [
            FormSpec::delta(),
            FormSpec::v2_delta(),
            FormSpec::delta_10_2(),
            FormSpec::eisenstein(4).unwrap(),
            FormSpec::from_kind(FormKind::Scaled {
                scalar: rat(128, 3),
                form: Box::new(FormSpec::v2_delta()),
            })
            .unwrap(),
        ];
        for spec in specs {
            let json = serde_json::to_string(&spec).unwrap();
            let back: FormSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn formspec_deserialize_rederives_metadata() {
        let json = r#"{"kind":"eta_quotient","factors":[[1,24]]}"#;
        let spec: FormSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.weight(), 12);
        assert_eq!(spec.level(), 1);
        assert!(spec.is_cusp());
        // invalid recipes are rejected on load
        let bad = r#"{"kind":"eta_quotient","factors":[[1,1]]}"#;
        assert!(serde_json::from_str::<FormSpec>(bad).is_err());
    }
}
