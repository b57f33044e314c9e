//! End-to-end identity checks. Each criterion returns a [`CriterionOutcome`]
//! with a stable id, so the CLI `verify` command and the acceptance test
//! suite share one implementation.

use std::time::Instant;

use num_traits::Zero;
use serde::Serialize;

use crate::adjoint::{adjoint_qexp, adjoint_qexp_exact_delta, beta_relation_check};
use crate::error::Error;
use crate::forms::{
    delta, delta_10_2, deligne_check, serre_derivative, v2_delta, FormSpec,
};
use crate::lseries::{bound_scan, exact_l_delta, shifted_l, sign_scan, CoeffBound};
use crate::petersson::{
    norm_ratio_10_2, petersson_inner, phi_invariant, ComplexPoint, QuadParams,
};
use crate::qseries::QExpansion;
use crate::rational::{rat, rat_int, rational_to_f64, Rational};
use crate::spaces::{decompose, space_basis};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn run(
    id: &'static str,
    label: &'static str,
    body: impl FnOnce() -> Result<String, String>,
) -> CriterionOutcome {
    let start = Instant::now();
    let (passed, detail) = match body() {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    CriterionOutcome {
        id,
        label,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn err_str(e: Error) -> String {
    e.to_string()
}

/// Builds `Delta` with enough coefficients for every shifted-series call in
/// the block, growing on demand.
fn delta_for_l(mut prec: usize, probe: impl Fn(&QExpansion) -> Result<(), Error>) -> Result<QExpansion, String> {
    for _ in 0..8 {
        let f = delta(prec);
        match probe(&f) {
            Ok(()) => return Ok(f),
            Err(Error::PrecisionExhausted { need, .. }) => prec = need + 16,
            Err(e) => return Err(err_str(e)),
        }
    }
    Err("could not size the expansion".into())
}

/// Exact decomposition of the Serre image of the weight-10 level-2 form.
pub fn criterion_01_exact_decomposition() -> CriterionOutcome {
    run(
        "serre-image-decomposition",
        "theta_10 of the level-2 weight-10 form decomposes as (1/6, 128/3)",
        || {
            let prec = 200;
            let th = serre_derivative(&delta_10_2(prec), 10).map_err(err_str)?;
            let basis = space_basis(12, 2, prec).map_err(err_str)?;
            let coords = decompose(&th, &basis).map_err(err_str)?;
            let want = vec![rat(1, 6), rat(128, 3)];
            if coords == want {
                Ok(format!(
                    "exact coordinates (1/6, 128/3) at precision {prec}"
                ))
            } else {
                Err(format!("got {coords:?}, want {want:?}"))
            }
        },
    )
}

/// The Serre derivative annihilates the discriminant form.
pub fn criterion_02_serre_annihilates_delta() -> CriterionOutcome {
    run(
        "serre-annihilates-delta",
        "theta_12 Delta vanishes to 500 coefficients",
        || {
            let th = serre_derivative(&delta(500), 12).map_err(err_str)?;
            if th.prec() != 500 {
                return Err(format!("expected 500 coefficients, got {}", th.prec()));
            }
            match th.coeffs().iter().position(|c| !c.is_zero()) {
                None => Ok("all 500 coefficients exactly zero".into()),
                Some(n) => Err(format!("coefficient of q^{n} is nonzero")),
            }
        },
    )
}

/// Numeric shifted-series values agree with the exact closed form.
pub fn criterion_03_lvalue_identity() -> CriterionOutcome {
    run(
        "shifted-l-closed-form",
        "L_{Delta,m}(11) matches -(m - 5/6) tau(m) / (20 m^11) for m <= 100",
        || {
            let tol = 1e-10;
            let f = delta_for_l(3200, |f| {
                shifted_l(f, 10, 1, 11.0, tol, CoeffBound::Deligne).map(|_| ())
            })?;
            let mut worst = 0.0f64;
            for m in 1..=100u64 {
                let l = shifted_l(&f, 10, m, 11.0, tol, CoeffBound::Deligne).map_err(err_str)?;
                if l.error_bound > tol {
                    return Err(format!("m = {m}: error bound {} above {tol}", l.error_bound));
                }
                let exact = rational_to_f64(&exact_l_delta(m));
                let diff = (l.value - exact).abs();
                worst = worst.max(diff);
                if diff > tol {
                    return Err(format!("m = {m}: |numeric - exact| = {diff:e}"));
                }
            }
            let l1 = shifted_l(&f, 10, 1, 11.0, tol, CoeffBound::Deligne).map_err(err_str)?;
            if (l1.value + 1.0 / 120.0).abs() > tol {
                return Err(format!("L_(Delta,1)(11) = {} is not -1/120", l1.value));
            }
            Ok(format!(
                "100 values within 1e-10 (worst deviation {worst:.2e}), including -1/120 at m = 1"
            ))
        },
    )
}

/// The adjoint image of `Delta` vanishes: numerically within bounds, exactly
/// on the closed-form path.
pub fn criterion_04_adjoint_vanishing() -> CriterionOutcome {
    run(
        "adjoint-vanishing-delta",
        "adjoint image of Delta is the zero form (numeric and exact paths)",
        || {
            let tol = 1e-10;
            let m_max = 20u64;
            let f = delta_for_l(3200, |f| {
                shifted_l(f, 10, 1, 11.0, tol, CoeffBound::Deligne).map(|_| ())
            })?;
            let block =
                adjoint_qexp(&f, 10, 1, m_max, tol, CoeffBound::Deligne).map_err(err_str)?;
            for c in &block.coeffs {
                if c.value.abs() > c.error_bound {
                    return Err(format!(
                        "m = {}: |c| = {:e} exceeds bound {:e}",
                        c.m,
                        c.value.abs(),
                        c.error_bound
                    ));
                }
            }
            let exact = adjoint_qexp_exact_delta(m_max);
            if let Some(m) = exact.iter().position(|c| !c.is_zero()) {
                return Err(format!("exact path: c({}) != 0", m + 1));
            }
            Ok(format!(
                "|c(m)| within propagated bounds for m <= {m_max}; exact path identically zero"
            ))
        },
    )
}

/// The two Petersson ratios the level-2 identities need.
pub fn criterion_05_petersson_ratios() -> CriterionOutcome {
    run(
        "petersson-ratios",
        "<Delta, V_2 Delta> / ||Delta||^2 = -1/256 and ||V_2 Delta||^2 / ||Delta||^2 = 2^-12",
        || {
            let quad = QuadParams::with_nodes(48);
            let d = FormSpec::delta();
            let v2 = FormSpec::v2_delta();
            let norm = petersson_inner(&d, &d, 12, 1, &quad).map_err(err_str)?;
            let cross = petersson_inner(&d, &v2, 12, 2, &quad).map_err(err_str)?;
            let v2norm = petersson_inner(&v2, &v2, 12, 2, &quad).map_err(err_str)?;

            let r1 = cross.real() / norm.real();
            let want1 = -1.0 / 256.0;
            let rel1 = (r1 - want1).abs() / want1.abs();
            if rel1 > 0.005 {
                return Err(format!("cross ratio {r1} vs {want1}: rel err {rel1:.2e}"));
            }
            let r2 = v2norm.real() / norm.real();
            let want2 = 2f64.powi(-12);
            let rel2 = (r2 - want2).abs() / want2;
            if rel2 > 0.005 {
                return Err(format!("norm ratio {r2} vs {want2}: rel err {rel2:.2e}"));
            }
            Ok(format!(
                "-1/256 within {rel1:.1e} relative, 2^-12 within {rel2:.1e} relative"
            ))
        },
    )
}

/// Recovering the level-2 coefficients from the odd-shift series values and
/// the quadrature norm ratio.
pub fn criterion_06_tau2_roundtrip() -> CriterionOutcome {
    run(
        "level2-tau-roundtrip",
        "tau_{10,2}(m) recovered from 11520 m^9/pi^2 (1/R) times the shifted series, odd m <= 9",
        || {
            let quad = QuadParams::with_nodes(48);
            let (ratio, ratio_err) = norm_ratio_10_2(&quad).map_err(err_str)?;
            let report =
                beta_relation_check(9, 1e-11, 0.01, ratio, ratio_err).map_err(err_str)?;
            let mut worst = 0.0f64;
            for row in report.rows.iter().filter(|r| r.m % 2 == 1) {
                worst = worst.max(row.rel_err);
                if !row.pass {
                    return Err(format!(
                        "m = {}: recovered {} vs exact {} (rel err {:.2e})",
                        row.m, row.recovered, row.expected, row.rel_err
                    ));
                }
            }
            Ok(format!(
                "odd m in 1..=9 recovered within 1% (worst {worst:.1e}); norm ratio {ratio:.6}"
            ))
        },
    )
}

/// The decay bound on the special values.
pub fn criterion_07_asymptotic_bound() -> CriterionOutcome {
    run(
        "lvalue-decay-bound",
        "m^{4.5} |L_{Delta,m}(11)| <= d(m)/20 for m <= 300",
        || {
            let report = bound_scan(300).map_err(err_str)?;
            match report.first_violation {
                None => Ok("all 300 entries below the divisor bound".into()),
                Some(m) => Err(format!("bound violated at m = {m}")),
            }
        },
    )
}

/// Sign opposition between the series values and the coefficients.
pub fn criterion_08_sign_property() -> CriterionOutcome {
    run(
        "lvalue-sign-opposition",
        "sign L_{Delta,m}(11) = -sign tau(m) for m <= 1000",
        || {
            let report = sign_scan(1000).map_err(err_str)?;
            if let Some(m) = report.first_violation {
                return Err(format!("sign mismatch at m = {m}"));
            }
            if report.tau_sign_changes != report.l_sign_changes {
                return Err("sign-change positions of the two sequences differ".into());
            }
            if !report.zeros.is_empty() {
                return Err(format!("unexpected vanishing tau at {:?}", report.zeros));
            }
            Ok(format!(
                "1000 opposite-sign pairs; {} sign changes in both sequences",
                report.tau_sign_changes.len()
            ))
        },
    )
}

/// Coefficient growth: eigenform-sharp bounds for both built-in cusp forms.
pub fn criterion_09_deligne_check() -> CriterionOutcome {
    run(
        "coefficient-growth",
        "|tau(n)| <= d(n) n^{5.5} to 5000 and |tau_{10,2}(n)| <= d(n) n^{4.5} to 2000",
        || {
            let r1 = deligne_check(&delta(5001), 12, 5000).map_err(err_str)?;
            if let Some(n) = r1.first_violation {
                return Err(format!("tau bound violated at n = {n}"));
            }
            let r2 = deligne_check(&delta_10_2(2001), 10, 2000).map_err(err_str)?;
            if let Some(n) = r2.first_violation {
                return Err(format!("tau_10_2 bound violated at n = {n}"));
            }
            Ok(format!(
                "max ratios {:.6} (weight 12) and {:.6} (weight 10, level 2)",
                r1.max_ratio, r2.max_ratio
            ))
        },
    )
}

/// The proportionality constant between the adjoint image of `V_2 Delta` and
/// the weight-10 form equals `(5/2^9) * ||Delta||^2/||Delta_{10,2}||^2`.
pub fn criterion_10_beta_consistency() -> CriterionOutcome {
    run(
        "beta-constancy",
        "c(m)/tau_{10,2}(m) for V_2 Delta is constant and equals (5/2^9) times the norm ratio",
        || {
            let tol = 1e-11;
            let m_max = 10u64;
            let mut prec = 6700usize;
            let g = loop {
                let g = v2_delta(prec);
                match shifted_l(&g, 10, m_max, 11.0, tol, CoeffBound::Deligne) {
                    Ok(_) => break g,
                    Err(Error::PrecisionExhausted { need, .. }) => prec = need + 16,
                    Err(e) => return Err(err_str(e)),
                }
            };
            let block = adjoint_qexp(&g, 10, 2, m_max, tol, CoeffBound::Deligne).map_err(err_str)?;
            let tau102 = crate::forms::tau_10_2_table(m_max as usize);

            let mut ratios = Vec::new();
            for c in &block.coeffs {
                let t = rational_to_f64(&Rational::from_integer(tau102[c.m as usize].clone()));
                ratios.push((c.m, c.value / t, c.error_bound / t.abs()));
            }
            let (_, r1, e1) = ratios[0];
            if r1 <= 0.0 {
                return Err(format!("beta should be positive, got {r1}"));
            }
            for &(m, rm, em) in &ratios[1..] {
                if (rm - r1).abs() > em + e1 {
                    return Err(format!(
                        "ratio at m = {m} is {rm}, at m = 1 it is {r1}; budget {:e}",
                        em + e1
                    ));
                }
            }

            let quad = QuadParams::with_nodes(48);
            let (ratio, _) = norm_ratio_10_2(&quad).map_err(err_str)?;
            let beta_quad = 5.0 / 512.0 * ratio;
            let rel = (r1 - beta_quad).abs() / beta_quad;
            if rel > 0.01 {
                return Err(format!(
                    "beta from adjoint {r1} vs from quadrature {beta_quad}: rel err {rel:.2e}"
                ));
            }
            Ok(format!(
                "constant ratio beta = {r1:.8} matches (5/2^9) * norm ratio within {rel:.1e}"
            ))
        },
    )
}

// deterministic generator for the random checks below
struct SplitMix(u64);

impl SplitMix {
    fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }

    fn next_range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_f64() * (hi - lo + 1) as f64) as i64
    }
}

fn random_series(rng: &mut SplitMix, prec: usize, weight: i64) -> QExpansion {
    let coeffs = (0..prec)
        .map(|_| rat(rng.next_range(-30, 30), rng.next_range(1, 8)))
        .collect();
    QExpansion::new(coeffs, weight, rng.next_range(1, 4) as u64)
}

/// Structural laws plus the level-consistency and determinism checks.
pub fn criterion_11_property_suite() -> CriterionOutcome {
    run(
        "algebra-and-determinism",
        "series ring laws, invariance at random points, level consistency, deterministic output",
        || {
            let mut rng = SplitMix(0x5eed);

            // ring distributivity and the product rule, exactly, on random data
            for _ in 0..25 {
                let prec = 6 + rng.next_range(0, 6) as usize;
                let w = rng.next_range(-4, 12);
                let f = random_series(&mut rng, prec, w);
                let g = random_series(&mut rng, prec, w);
                let hw = rng.next_range(-4, 12);
                let h = random_series(&mut rng, prec, hw);
                let lhs = f.add(&g).map_err(err_str)?.mul(&h);
                let rhs = f.mul(&h).add(&g.mul(&h)).map_err(err_str)?;
                if lhs.coeffs() != rhs.coeffs() {
                    return Err("distributivity failed".into());
                }
                let leibniz_l = f.mul(&h).derive();
                let leibniz_r = f
                    .derive()
                    .mul(&h)
                    .add(&f.mul(&h.derive()))
                    .map_err(err_str)?;
                if leibniz_l.coeffs() != leibniz_r.coeffs() {
                    return Err("product rule failed".into());
                }
                let t = rng.next_range(2, 4) as u64;
                let s = rng.next_range(2, 3) as u64;
                if f.mul(&h).v_expand(t).coeffs() != f.v_expand(t).mul(&h.v_expand(t)).coeffs() {
                    return Err("V_t multiplicativity failed".into());
                }
                if f.v_expand(t).v_expand(s).coeffs() != f.v_expand(t * s).coeffs() {
                    return Err("V_s V_t composition failed".into());
                }
                let dv = f.v_expand(t).derive();
                let vd = f.derive().v_expand(t).scale(&rat_int(t as i64));
                if dv.coeffs() != vd.coeffs() {
                    return Err("D V_t = t V_t D failed".into());
                }
            }

            // invariance of the integrand at 100 random points
            let f = FormSpec::delta();
            let g = FormSpec::v2_delta();
            let tol = 1e-13;
            for i in 0..100 {
                let x = rng.next_f64() - 0.5;
                let y = 0.3 + rng.next_f64() * 1.7;
                let z = num_complex::Complex64::new(x, y);
                let (num, den) = if i % 2 == 0 {
                    // gamma = (1 0; 2 1)
                    (z, 2.0 * z + 1.0)
                } else {
                    // gamma = T = (1 1; 0 1)
                    (z + 1.0, num_complex::Complex64::new(1.0, 0.0))
                };
                let gz = num / den;
                let a = phi_invariant(&f, &g, 12, ComplexPoint::new(z.re, z.im).map_err(err_str)?, tol)
                    .map_err(err_str)?;
                let b = phi_invariant(
                    &f,
                    &g,
                    12,
                    ComplexPoint::new(gz.re, gz.im).map_err(err_str)?,
                    tol,
                )
                .map_err(err_str)?;
                if (a - b).norm() > 1e-8 * a.norm().max(1e-25) {
                    return Err(format!("integrand not invariant at point {i}: {a} vs {b}"));
                }
            }

            // level consistency of ||Delta||^2 across normalizations
            let quad = QuadParams::with_nodes(32);
            let d = FormSpec::delta();
            let n1 = petersson_inner(&d, &d, 12, 1, &quad).map_err(err_str)?;
            let n2 = petersson_inner(&d, &d, 12, 2, &quad).map_err(err_str)?;
            let diff = (n1.real() - n2.real()).abs();
            if diff > n1.est_error + n2.est_error + 1e-18 {
                return Err(format!(
                    "level normalizations disagree: {} vs {} (diff {diff:e})",
                    n1.real(),
                    n2.real()
                ));
            }

            // double-run determinism of rendered reports
            let probe = || -> Result<String, String> {
                let f = delta(700);
                let l = shifted_l(&f, 10, 2, 11.0, 1e-6, CoeffBound::Deligne).map_err(err_str)?;
                let scan = bound_scan(20).map_err(err_str)?;
                Ok(format!(
                    "{}\n{}",
                    serde_json::to_string(&l).map_err(|e| e.to_string())?,
                    serde_json::to_string(&scan).map_err(|e| e.to_string())?
                ))
            };
            if probe()? != probe()? {
                return Err("repeated runs rendered different output".into());
            }

            Ok("ring laws, invariance, level consistency, and determinism all hold".into())
        },
    )
}

/// Runs every criterion in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        criterion_01_exact_decomposition(),
        criterion_02_serre_annihilates_delta(),
        criterion_03_lvalue_identity(),
        criterion_04_adjoint_vanishing(),
        criterion_05_petersson_ratios(),
        criterion_06_tau2_roundtrip(),
        criterion_07_asymptotic_bound(),
        criterion_08_sign_property(),
        criterion_09_deligne_check(),
        criterion_10_beta_consistency(),
        criterion_11_property_suite(),
    ]
}
