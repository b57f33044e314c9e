//! Fourier coefficients of the Petersson adjoint of the Serre derivative.
//!
//! For a cusp form `f = sum a(n) q^n` of weight `k + 2` on `Gamma_0(N)`, the
//! image under the adjoint map is the weight-`k` cusp form with coefficients
//!
//! ```text
//! c(m) = k(k-1) m^{k-1} / (4 pi)^2
//!        * [ (m - k/12) / m^{k+1} * a(m)  +  2k L_{f,m}(k+1) ]
//! ```
//!
//! The prefactor carries no dependence on the index of `Gamma_0(N)`: the
//! adjoint of a linear map does not change when the inner product is rescaled,
//! so neither can its coefficient formula. Mixing the index-normalized inner
//! product into the Poincare-series coefficient extraction (which already
//! cancels it) would shrink every coefficient by `1/mu`; the
//! `mu_factor_sensitivity` test pins the distinction against the exact
//! level-2 data. The numeric path propagates the shifted-series error bound
//! through the positive prefactor; the exact path works in `Q * (1/pi^2)` so
//! that vanishing statements are decided exactly.

use num_bigint::BigInt;
use serde::Serialize;

use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::forms::{delta, tau_10_2_table, tau_table, v2_delta};
use crate::hp::HpCtx;
use crate::lseries::{exact_l_delta, shifted_l, CoeffBound};
use crate::qseries::QExpansion;
use crate::rational::{rat, rational_to_f64, Rational};

/// Index of `Gamma_0(N)` in the full modular group:
/// `N * prod_{p | N} (1 + 1/p)`.
pub fn index_mu(level: u64) -> u64 {
    assert!(level >= 1);
    let mut mu = level;
    for (p, _) in factorize(level) {
        mu = mu / p * (p + 1);
    }
    mu
}

#[derive(Debug, Clone, Serialize)]
pub struct AdjointCoeff {
    pub m: u64,
    pub value: f64,
    pub error_bound: f64,
}

/// A block of adjoint-image coefficients `c(1), ..., c(M)`.
#[derive(Debug, Clone, Serialize)]
pub struct AdjointCoeffs {
    pub k: i64,
    pub level: u64,
    pub mu: u64,
    pub coeffs: Vec<AdjointCoeff>,
    /// Exact values of `c(m) * pi^2`, present when the shifted series has a
    /// closed form (the built-in `Delta` path).
    #[serde(with = "crate::rational::serde_opt_vec_str")]
    pub exact_pi2_scaled: Option<Vec<Rational>>,
}

fn validate_adjoint_input(f: &QExpansion, k: i64, level: u64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "adjoint needs weight k >= 2, got {k}"
        )));
    }
    if level % f.level() != 0 {
        return Err(Error::LevelMismatch {
            form_level: f.level(),
            level,
        });
    }
    Ok(())
}

/// Single coefficient `c(m)` of the adjoint image, with the propagated error
/// bound `prefactor * 2k * (L error bound)`.
pub fn adjoint_coeff(
    f: &QExpansion,
    k: i64,
    level: u64,
    m: u64,
    tol: f64,
    bound: CoeffBound,
) -> Result<AdjointCoeff> {
    validate_adjoint_input(f, k, level)?;
    if f.prec() <= m as usize {
        return Err(Error::PrecisionExhausted {
            have: f.prec(),
            need: m as usize + 1,
        });
    }
    let l = shifted_l(f, k, m, (k + 1) as f64, tol, bound)?;
    let ctx = HpCtx::for_tol(tol);

    // prefactor = k(k-1) m^{k-1} / (16 pi^2), positive for k >= 2
    let pi = ctx.pi();
    let pref = ctx.div(
        &ctx.mul(
            &ctx.from_i64(k * (k - 1)),
            &ctx.powi(&ctx.from_u64(m), (k - 1) as usize),
        ),
        &ctx.mul(&ctx.from_u64(16), &ctx.mul(&pi, &pi)),
    );

    // bracket head (m - k/12)/m^{k+1} * a(m), exact in Q
    let head = Rational::new(BigInt::from(12 * m as i128 - k as i128), BigInt::from(12))
        * f.coeff(m as usize)
        / Rational::from_integer(BigInt::from(m).pow(k as u32 + 1));
    let bracket = ctx.add(
        &ctx.from_rational(&head),
        &ctx.mul(&ctx.from_i64(2 * k), &l.value_hp),
    );
    let value = ctx.mul(&pref, &bracket);
    let pref_f64 = ctx.to_f64(&pref);
    Ok(AdjointCoeff {
        m,
        value: ctx.to_f64(&value),
        error_bound: pref_f64 * 2.0 * k as f64 * l.error_bound,
    })
}

/// Vectorized [`adjoint_coeff`] for `m = 1..=m_max`; `m_max = 0` yields an
/// empty block.
pub fn adjoint_qexp(
    f: &QExpansion,
    k: i64,
    level: u64,
    m_max: u64,
    tol: f64,
    bound: CoeffBound,
) -> Result<AdjointCoeffs> {
    validate_adjoint_input(f, k, level)?;
    let coeffs = (1..=m_max)
        .map(|m| adjoint_coeff(f, k, level, m, tol, bound))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdjointCoeffs {
        k,
        level,
        mu: index_mu(level),
        coeffs,
        exact_pi2_scaled: None,
    })
}

/// Exact `c(m) * pi^2` for `f = Delta`, `k = 10`, `N = 1`, computed through
/// the coefficient formula with the exact L-value. The adjoint image of
/// `Delta` vanishes, so every value is zero; the point is that the zero is
/// *derived*, not asserted.
pub fn adjoint_exact_delta_coeff(m: u64) -> Rational {
    assert!(m >= 1);
    let k: i64 = 10;
    let tau_m = Rational::from_integer(tau_table(m as usize)[m as usize].clone());
    // k(k-1)/16 * m^{k-1}
    let pref = rat(k * (k - 1), 16) * Rational::from_integer(BigInt::from(m).pow(k as u32 - 1));
    let head = Rational::new(BigInt::from(12 * m as i128 - k as i128), BigInt::from(12)) * tau_m
        / Rational::from_integer(BigInt::from(m).pow(k as u32 + 1));
    let bracket = head + rat(2 * k, 1) * exact_l_delta(m);
    pref * bracket
}

/// Exact `c(m) * pi^2` for `m = 1..=m_max` on the `Delta` path.
pub fn adjoint_qexp_exact_delta(m_max: u64) -> Vec<Rational> {
    (1..=m_max).map(adjoint_exact_delta_coeff).collect()
}

// ---------------------------------------------------------------------------
// Recovering tau from numeric L-values
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TauRecovery {
    pub m: u64,
    pub value: f64,
    pub error_bound: f64,
    pub horizon: u64,
}

/// Numeric `tau(m) = -20 m^11 / (m - 5/6) * L_{Delta,m}(11)`, from the
/// numeric series value; the returned interval brackets the true integer.
/// `tol` is the requested absolute accuracy of the recovered value.
pub fn tau_from_l(m: u64, tol: f64) -> Result<TauRecovery> {
    if m < 1 {
        return Err(Error::InvalidArgument("m must be >= 1".into()));
    }
    // factor = 120 m^11 / (6m - 5)
    let factor = Rational::new(
        BigInt::from(120u32) * BigInt::from(m).pow(11),
        BigInt::from(6 * m as i128 - 5),
    );
    let factor_f64 = rational_to_f64(&factor);
    let l_tol = tol / factor_f64;

    // size the expansion to the horizon the L evaluation will need
    let mut prec = 4096usize;
    let l = loop {
        let f = delta(prec);
        match shifted_l(&f, 10, m, 11.0, l_tol, CoeffBound::Deligne) {
            Ok(l) => break l,
            Err(Error::PrecisionExhausted { need, .. }) => {
                if prec > include_cap() {
                    return Err(Error::PrecisionExhausted {
                        have: prec,
                        need,
                    });
                }
                prec = need + 16;
            }
            Err(e) => return Err(e),
        }
    };

    let ctx = HpCtx::for_tol(l_tol);
    let value = ctx.mul(&ctx.from_rational(&-factor), &l.value_hp);
    Ok(TauRecovery {
        m,
        value: ctx.to_f64(&value),
        error_bound: factor_f64 * l.error_bound,
        horizon: l.horizon,
    })
}

/// Hard cap on the internally grown expansion length.
fn include_cap() -> usize {
    1 << 22
}

// ---------------------------------------------------------------------------
// The level-2 coefficient formula
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct BetaCheckRow {
    pub m: u64,
    pub branch: &'static str,
    pub expected: f64,
    pub recovered: f64,
    pub rel_err: f64,
    /// Propagated first-order error: ratio uncertainty plus the L bound
    /// through the prefactor.
    pub error_budget: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BetaCheckReport {
    pub m_max: u64,
    pub norm_ratio: f64,
    pub norm_ratio_err: f64,
    pub rel_tol: f64,
    pub rows: Vec<BetaCheckRow>,
}

impl BetaCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Recovers `tau_{10,2}(m)` for `m <= m_max` from
/// `beta = (5/2^9) * norm_ratio` and the numeric `L_{V_2 Delta, m}(11)`:
///
/// ```text
/// tau_{10,2}(m) = 45 m^9 / (8 beta pi^2)
///                 * [ (m - 5/6)/m^11 * tau(m/2) + 20 L_{V_2 Delta, m}(11) ]
/// ```
///
/// with `tau(m/2) = 0` for odd `m`, where the odd case collapses to
/// `(11520 m^9 / pi^2) * (1/norm_ratio) * L`. `norm_ratio` is
/// `||Delta||^2 / ||Delta_{10,2}||^2` from the quadrature module.
pub fn beta_relation_check(
    m_max: u64,
    l_tol: f64,
    rel_tol: f64,
    norm_ratio: f64,
    norm_ratio_err: f64,
) -> Result<BetaCheckReport> {
    if m_max < 1 {
        return Err(Error::InvalidArgument("m_max must be >= 1".into()));
    }
    if !(norm_ratio > 0.0) {
        return Err(Error::InvalidArgument(
            "norm ratio must be positive".into(),
        ));
    }
    let tau102 = tau_10_2_table(m_max as usize);
    let tau = tau_table((m_max / 2) as usize);
    let beta = 5.0 / 512.0 * norm_ratio;

    // size the V_2 Delta expansion once for the worst shift
    let mut prec = 8192usize;
    let g = loop {
        let g = v2_delta(prec);
        match shifted_l(&g, 10, m_max, 11.0, l_tol, CoeffBound::Deligne) {
            Ok(_) => break g,
            Err(Error::PrecisionExhausted { need, .. }) => {
                if prec > include_cap() {
                    return Err(Error::PrecisionExhausted { have: prec, need });
                }
                prec = need + 16;
            }
            Err(e) => return Err(e),
        }
    };

    let mut rows = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        let l = shifted_l(&g, 10, m, 11.0, l_tol, CoeffBound::Deligne)?;
        let mf = m as f64;
        let head = if m % 2 == 0 {
            let t = &tau[(m / 2) as usize];
            (mf - 5.0 / 6.0) / mf.powi(11) * rational_to_f64(&Rational::from_integer(t.clone()))
        } else {
            0.0
        };
        let pref = 45.0 * mf.powi(9) / (8.0 * beta * std::f64::consts::PI.powi(2));
        let recovered = pref * (head + 20.0 * l.value);
        let expected = rational_to_f64(&Rational::from_integer(tau102[m as usize].clone()));
        let rel_err = (recovered - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        let error_budget =
            recovered.abs() * (norm_ratio_err / norm_ratio) + pref * 20.0 * l.error_bound;
        let pass = rel_err <= rel_tol;
        rows.push(BetaCheckRow {
            m,
            branch: if m % 2 == 0 { "even" } else { "odd" },
            expected,
            recovered,
            rel_err,
            error_budget,
            pass,
        });
    }
    Ok(BetaCheckReport {
        m_max,
        norm_ratio,
        norm_ratio_err,
        rel_tol,
        rows,
    })
}
