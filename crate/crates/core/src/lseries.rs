//! The shifted Dirichlet series `L_{f,m}(s) = sum_{n>=1} a(n+m) sigma(n) / (n+m)^s`
//! for a cusp form `f` of weight `k + 2`, evaluated numerically with a
//! dominating truncation bound, together with the exact closed form the
//! adjoint identity gives for `f = Delta`.
//!
//! ## Tail bound
//!
//! With `|a(v)| <= C d(v) v^{(k+1)/2}`, `sigma(n) <= n (1 + ln n)` and the
//! explicit divisor bound `d(v) <= (48 / 2520^{1/3}) v^{1/3}` (the constant is
//! attained at v = 2520), every term with `v = n + m > U` is at most
//! `C_d C (1 + ln v) / v^rho` where `rho = s - (k+3)/2 - 1/3`. For `rho > 1`
//! an integral comparison bounds the tail by
//! `C_d C U^{1-rho} ((1 + ln U)/(rho-1) + 1/(rho-1)^2)`,
//! which is monotone decreasing in `U`. For `s = k + 1` the requirement
//! `rho > 1` is exactly `k >= 4`, so the evaluator refuses smaller weights
//! rather than inventing a regularization.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{divisor_count, sigma1_table};
use crate::error::{Error, Result};
use crate::forms::tau_table;
use crate::hp::HpCtx;
use crate::qseries::QExpansion;
use crate::rational::{rational_to_f64, Rational};

/// Divisor bound constant: `d(n) <= DIVISOR_BOUND_CONSTANT * n^{1/3}`,
/// attained at `n = 2520` where `d = 48`.
pub const DIVISOR_BOUND_CONSTANT: f64 = 3.5272891064669545; // 48 / 2520^(1/3)

/// Which coefficient-growth hypothesis backs the tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffBound {
    /// `C = 1`, valid for the built-in eigenforms (`Delta`, `Delta_{10,2}`,
    /// and `V_2 Delta` through its `Delta` coefficients).
    Deligne,
    /// `C` estimated from the computed coefficients; the resulting bound is
    /// heuristic for forms that are not eigenforms.
    Empirical,
}

impl CoeffBound {
    pub fn label(self) -> &'static str {
        match self {
            CoeffBound::Deligne => "deligne",
            CoeffBound::Empirical => "heuristic",
        }
    }
}

/// A numerically evaluated special value of `L_{f,m}(s)`.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftedLValue {
    pub m: u64,
    pub s: f64,
    pub value: f64,
    /// Dominates `|value - L_{f,m}(s)|` under the coefficient-bound
    /// hypothesis recorded in `bound_kind`.
    pub error_bound: f64,
    /// Largest `n` included in the sum.
    pub horizon: u64,
    #[serde(with = "crate::rational::serde_opt_str")]
    pub exact: Option<Rational>,
    pub bound_kind: CoeffBound,
    /// The constant `C` in `|a(v)| <= C d(v) v^{(k+1)/2}`.
    pub coeff_constant: f64,
    pub prec_bits: usize,
    #[serde(skip)]
    pub value_hp: BigFloat,
}

fn tail_bound(c: f64, rho: f64, u: f64) -> f64 {
    let r = rho - 1.0;
    DIVISOR_BOUND_CONSTANT * c * u.powf(-r) * ((1.0 + u.ln()) / r + 1.0 / (r * r))
}

/// Empirical `C`: the largest `|a(n)| / (d(n) n^{(k+1)/2})` over the computed
/// coefficients.
fn empirical_constant(f: &QExpansion, half_power_num: i64) -> f64 {
    let mut c: f64 = 0.0;
    for n in 1..f.prec() {
        let a = rational_to_f64(f.coeff(n)).abs();
        if a == 0.0 {
            continue;
        }
        let d = divisor_count(n as u64) as f64;
        let scale = (n as f64).powi(half_power_num as i32).sqrt();
        c = c.max(a / (d * scale));
    }
    c
}

/// Evaluates `L_{f,m}(s)` for a cusp form `f` of weight `k + 2`, truncating
/// adaptively so the tail bound drops below `tol`.
pub fn shifted_l(
    f: &QExpansion,
    k: i64,
    m: u64,
    s: f64,
    tol: f64,
    bound: CoeffBound,
) -> Result<ShiftedLValue> {
    if m < 1 {
        return Err(Error::InvalidArgument("shift m must be >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    if f.weight() != k + 2 {
        return Err(Error::WeightMismatch {
            left: f.weight(),
            right: k + 2,
        });
    }
    if !f.is_cusp() {
        return Err(Error::NotCuspForm);
    }
    if s <= (k as f64 + 5.0) / 2.0 {
        return Err(Error::DivergentRegime {
            reason: format!(
                "s = {s} is outside the half-plane of absolute convergence s > {}",
                (k as f64 + 5.0) / 2.0
            ),
        });
    }
    let rho = s - (k as f64 + 3.0) / 2.0 - 1.0 / 3.0;
    if rho <= 1.0 {
        return Err(Error::DivergentRegime {
            reason: format!(
                "tail majorant diverges: need s > {} (for s = k+1 this means k >= 4)",
                (k as f64 + 3.0) / 2.0 + 4.0 / 3.0
            ),
        });
    }

    let ctx = HpCtx::for_tol(tol);

    let c = match bound {
        CoeffBound::Deligne => 1.0,
        CoeffBound::Empirical => empirical_constant(f, k + 1),
    };
    if c == 0.0 {
        // the zero series: every term vanishes and the bound is exact
        return Ok(ShiftedLValue {
            m,
            s,
            value: 0.0,
            error_bound: 0.0,
            horizon: 0,
            exact: None,
            bound_kind: bound,
            coeff_constant: 0.0,
            prec_bits: ctx.bits(),
            value_hp: ctx.zero(),
        });
    }

    // smallest horizon N with tail(N + m) <= tol
    let cap = f.prec() as u64 - 1;
    if cap < m + 1 {
        return Err(Error::PrecisionExhausted {
            have: f.prec(),
            need: (m + 2) as usize,
        });
    }
    let n_cap = cap - m;
    if tail_bound(c, rho, (n_cap + m) as f64) > tol {
        // report how much precision the target accuracy would have needed
        let mut u = (n_cap + m) as f64;
        while tail_bound(c, rho, u) > tol && u < 1e18 {
            u *= 2.0;
        }
        return Err(Error::PrecisionExhausted {
            have: f.prec(),
            need: u as usize + 1,
        });
    }
    let mut lo = 1u64;
    let mut hi = n_cap;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if tail_bound(c, rho, (mid + m) as f64) <= tol {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let horizon = lo;

    // ascending summation in high precision
    let sigma = sigma1_table(horizon as usize);
    let mut acc = ctx.zero();
    let mut max_abs = 0.0f64;
    for n in 1..=horizon {
        let a = f.coeff((n + m) as usize);
        if a.is_zero() {
            continue;
        }
        let numer = ctx.mul(
            &ctx.from_rational(a),
            &ctx.from_u64(sigma[n as usize]),
        );
        let denom = ctx.pow_real(&ctx.from_u64(n + m), s);
        acc = ctx.add(&acc, &ctx.div(&numer, &denom));
        max_abs = max_abs.max(ctx.to_f64(&ctx.abs(&acc)));
    }

    let rounding_cushion =
        horizon as f64 * max_abs.max(1e-300) * 2f64.powi(-(ctx.bits() as i32) + 8);
    Ok(ShiftedLValue {
        m,
        s,
        value: ctx.to_f64(&acc),
        error_bound: tail_bound(c, rho, (horizon + m) as f64) + rounding_cushion,
        horizon,
        exact: None,
        bound_kind: bound,
        coeff_constant: c,
        prec_bits: ctx.bits(),
        value_hp: acc,
    })
}

/// Exact value of `L_{Delta,m}(11)`: inverting the vanishing of the adjoint
/// image of `Delta` gives `L = -(m - 5/6) tau(m) / (20 m^11)`.
pub fn exact_l_delta(m: u64) -> Rational {
    assert!(m >= 1);
    let tau_m = tau_table(m as usize)[m as usize].clone();
    let num = -(BigInt::from(6 * m as i128 - 5)) * tau_m;
    let den = BigInt::from(120u32) * BigInt::from(m).pow(11);
    Rational::new(num, den)
}

// ---------------------------------------------------------------------------
// Scans
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct BoundScanRow {
    pub m: u64,
    /// `m^{4.5} |L_{Delta,m}(11)|`
    pub entry: f64,
    /// `d(m) / 20`
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundScanReport {
    pub m_max: u64,
    pub rows: Vec<BoundScanRow>,
    pub first_violation: Option<u64>,
}

impl BoundScanReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `m^{4.5} |L_{Delta,m}(11)| <= d(m)/20` for `m <= m_max`. The
/// comparison squares both sides and runs exactly.
pub fn bound_scan(m_max: u64) -> Result<BoundScanReport> {
    if m_max < 1 {
        return Err(Error::InvalidArgument("m_max must be >= 1".into()));
    }
    tau_table(m_max as usize); // warm the cache in one pass
    let mut rows = Vec::with_capacity(m_max as usize);
    let mut first_violation = None;
    for m in 1..=m_max {
        let l = exact_l_delta(m);
        let d = divisor_count(m);
        // m^9 L^2 <= d^2 / 400, exactly
        let lhs = Rational::from_integer(BigInt::from(m).pow(9)) * &l * &l;
        let rhs = Rational::new(BigInt::from(d * d), BigInt::from(400u32));
        let pass = lhs <= rhs;
        if !pass && first_violation.is_none() {
            first_violation = Some(m);
        }
        rows.push(BoundScanRow {
            m,
            entry: rational_to_f64(&lhs).max(0.0).sqrt(),
            limit: d as f64 / 20.0,
            pass,
        });
    }
    Ok(BoundScanReport {
        m_max,
        rows,
        first_violation,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SignScanReport {
    pub m_max: u64,
    /// `m` with `tau(m) != 0` where `sign L_{Delta,m}(11) != -sign tau(m)`.
    pub first_violation: Option<u64>,
    /// Positions where `tau` changes sign relative to its previous nonzero
    /// value.
    pub tau_sign_changes: Vec<u64>,
    /// Same for the L-values; the two lists must coincide.
    pub l_sign_changes: Vec<u64>,
    pub zeros: Vec<u64>,
}

impl SignScanReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none() && self.tau_sign_changes == self.l_sign_changes
    }
}

/// Verifies `sign L_{Delta,m}(11) = -sign tau(m)` for `m <= m_max` and
/// reports the sign-change positions of both sequences.
pub fn sign_scan(m_max: u64) -> Result<SignScanReport> {
    if m_max < 1 {
        return Err(Error::InvalidArgument("m_max must be >= 1".into()));
    }
    let tau = tau_table(m_max as usize);
    let mut first_violation = None;
    let mut tau_sign_changes = Vec::new();
    let mut l_sign_changes = Vec::new();
    let mut zeros = Vec::new();
    let mut prev_tau_sign = 0i8;
    let mut prev_l_sign = 0i8;
    for m in 1..=m_max {
        let t = &tau[m as usize];
        if t.is_zero() {
            zeros.push(m);
            continue;
        }
        let l = exact_l_delta(m);
        let t_sign: i8 = if t.is_positive() { 1 } else { -1 };
        let l_sign: i8 = if l.is_positive() { 1 } else { -1 };
        if l_sign != -t_sign && first_violation.is_none() {
            first_violation = Some(m);
        }
        if prev_tau_sign != 0 && t_sign != prev_tau_sign {
            tau_sign_changes.push(m);
        }
        if prev_l_sign != 0 && l_sign != prev_l_sign {
            l_sign_changes.push(m);
        }
        prev_tau_sign = t_sign;
        prev_l_sign = l_sign;
    }
    Ok(SignScanReport {
        m_max,
        first_violation,
        tau_sign_changes,
        l_sign_changes,
        zeros,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{delta, v2_delta};
    use crate::rational::rat;

    #[test]
    fn exact_values() {
        assert_eq!(exact_l_delta(1), rat(-1, 120));
        assert_eq!(exact_l_delta(2), rat(7, 10240));
        assert_eq!(exact_l_delta(3), rat(-91, 590490));
        assert_eq!(exact_l_delta(10), rat(5313, 10_000_000_000));
    }

    #[test]
    fn numeric_matches_exact_at_m1() {
        let f = delta(3200);
        let l = shifted_l(&f, 10, 1, 11.0, 1e-10, CoeffBound::Deligne).unwrap();
        assert!(l.error_bound <= 1e-10);
        assert!((l.value + 1.0 / 120.0).abs() <= l.error_bound);
        assert!(l.horizon > 100);
        assert_eq!(l.bound_kind, CoeffBound::Deligne);
    }

    #[test]
    fn numeric_matches_exact_several_m() {
        let f = delta(3300);
        for m in [2u64, 3, 7, 50] {
            let l = shifted_l(&f, 10, m, 11.0, 1e-10, CoeffBound::Deligne).unwrap();
            let ex = rational_to_f64(&exact_l_delta(m));
            assert!(
                (l.value - ex).abs() <= l.error_bound,
                "m = {m}: {} vs {ex} (bound {})",
                l.value,
                l.error_bound
            );
        }
    }

    #[test]
    fn zero_series_is_trivial() {
        let z = QExpansion::zero(50, 12, 1);
        let l = shifted_l(&z, 10, 1, 11.0, 1e-10, CoeffBound::Empirical).unwrap();
        assert_eq!(l.value, 0.0);
        assert_eq!(l.error_bound, 0.0);
        assert_eq!(l.horizon, 0);
    }

    #[test]
    fn error_bound_monotone_in_horizon() {
        // with fixed C and rho the tail bound must decrease as U grows
        let mut prev = f64::INFINITY;
        for u in [10.0, 100.0, 1000.0, 10000.0, 100000.0] {
            let b = tail_bound(1.0, 4.0 + 1.0 / 6.0, u);
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn rejects_bad_regimes() {
        let f = delta(100);
        // s inside the divergent region
        assert!(matches!(
            shifted_l(&f, 10, 1, 7.0, 1e-6, CoeffBound::Deligne),
            Err(Error::DivergentRegime { .. })
        ));
        // k < 4: s = k+1 fails the majorant condition
        let d102 = crate::forms::delta_10_2(400);
        // weight-10 input at k = 8 still satisfies the majorant condition
        assert!(shifted_l(&d102, 8, 1, 9.0, 1e-4, CoeffBound::Deligne).is_ok());
        let fake_weight4 = QExpansion::new(
            vec![Rational::zero(), rat(1, 1), rat(1, 1), rat(1, 1)],
            4,
            1,
        )
        .with_cusp_flag(true);
        assert!(matches!(
            shifted_l(&fake_weight4, 2, 1, 3.0, 1e-6, CoeffBound::Empirical),
            Err(Error::DivergentRegime { .. })
        ));
        // weight mismatch
        assert!(matches!(
            shifted_l(&f, 9, 1, 11.0, 1e-6, CoeffBound::Deligne),
            Err(Error::WeightMismatch { .. })
        ));
        // not a cusp form
        let e4 = crate::forms::eisenstein(4, 50).unwrap();
        assert!(matches!(
            shifted_l(&e4, 2, 1, 11.0, 1e-6, CoeffBound::Empirical),
            Err(Error::NotCuspForm)
        ));
    }

    #[test]
    fn precision_exhausted_reports_need() {
        let f = delta(50);
        match shifted_l(&f, 10, 1, 11.0, 1e-12, CoeffBound::Deligne) {
            Err(Error::PrecisionExhausted { have, need }) => {
                assert_eq!(have, 50);
                assert!(need > 1000);
            }
            other => panic!("expected precision exhausted, got {other:?}"),
        }
    }

    #[test]
    fn linearity_within_bounds() {
        let prec = 1500;
        let f = delta(prec);
        let g = v2_delta(prec);
        let alpha = rat(3, 2);
        let beta = rat(-7, 5);
        let combo = f.scale(&alpha).add(&g.scale(&beta)).unwrap();
        let tol = 1e-8;
        let lf = shifted_l(&f, 10, 3, 11.0, tol, CoeffBound::Deligne).unwrap();
        let lg = shifted_l(&g, 10, 3, 11.0, tol, CoeffBound::Deligne).unwrap();
        let lc = shifted_l(&combo, 10, 3, 11.0, tol, CoeffBound::Empirical).unwrap();
        let expect = 1.5 * lf.value - 1.4 * lg.value;
        let budget = lc.error_bound + 1.5 * lf.error_bound + 1.4 * lg.error_bound;
        assert!((lc.value - expect).abs() <= budget);
        assert_eq!(lc.bound_kind.label(), "heuristic");
    }

    #[test]
    fn bound_scan_small() {
        let report = bound_scan(30).unwrap();
        assert!(report.passed());
        assert_eq!(report.rows.len(), 30);
        let row1 = &report.rows[0];
        assert!((row1.entry - 1.0 / 120.0).abs() < 1e-15);
        assert!((row1.limit - 0.05).abs() < 1e-15);
        let row2 = &report.rows[1];
        assert!((row2.entry - 2f64.powf(4.5) * 7.0 / 10240.0).abs() < 1e-12);
    }

    #[test]
    fn sign_scan_small() {
        let report = sign_scan(50).unwrap();
        assert!(report.passed());
        assert!(report.zeros.is_empty());
        // tau: 1, -24 => first sign change at m = 2
        assert_eq!(report.tau_sign_changes.first(), Some(&2));
        assert!(report.tau_sign_changes.len() > 5);
    }

    #[test]
    fn divisor_bound_constant_is_global_max() {
        // d(n) <= C n^{1/3} with equality at 2520; brute force a long prefix
        for n in 1..=100_000u64 {
            let d = divisor_count(n) as f64;
            assert!(
                d <= DIVISOR_BOUND_CONSTANT * (n as f64).cbrt() * (1.0 + 1e-12),
                "n = {n}"
            );
        }
        let at_2520 = 48.0 / 2520f64.cbrt();
        assert!((at_2520 - DIVISOR_BOUND_CONSTANT).abs() < 1e-15);
    }
}
