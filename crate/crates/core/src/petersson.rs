//! Petersson inner products by quadrature over fundamental-domain translates.
//!
//! The inner product used everywhere carries the `1/mu` normalization:
//!
//! ```text
//! <f, g> = (1/mu) * integral over Gamma_0(N)\H of f(z) conj(g(z)) y^k dx dy / y^2
//! ```
//!
//! A fundamental domain for `Gamma_0(N)` is tiled by right-coset translates
//! `gamma_j F` of the standard domain `F = {|x| <= 1/2, |z| >= 1}`, so the
//! integral becomes a sum of integrals of `Phi(gamma_j z)` over `F`, truncated
//! at height `y = Y` and evaluated by tensor Gauss-Legendre against the curved
//! lower boundary `y = sqrt(1 - x^2)`.
//!
//! Point evaluation of the building blocks goes through their transformation
//! laws: coset translates push quadrature nodes to arbitrarily small `y`,
//! where raw q-series are useless. `eta` reduces with the `T`/`S` relations
//! tracking the multiplier, `E_2` tracks its quasimodular cocycle, and the
//! holomorphic `E_k` rescale by `(cz+d)^-k`.

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::bernoulli;
use crate::error::{Error, Result};
use crate::forms::{FormKind, FormSpec};
use crate::quad::gauss_legendre;
use crate::rational::rational_to_f64;

/// Below this imaginary part, evaluators reduce toward the fundamental
/// domain before summing series.
pub const ETA_Y_MIN: f64 = 0.5;

/// A point `z = x + iy` in the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexPoint {
    pub x: f64,
    pub y: f64,
}

impl ComplexPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) {
            return Err(Error::NotUpperHalfPlane { y });
        }
        Ok(ComplexPoint { x, y })
    }

    fn as_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// `eta(z)` by the pentagonal series after reduction to `y >= 0.5`.
fn eta_series(z: Complex64, tol: f64) -> Complex64 {
    let q = (2.0 * std::f64::consts::PI * I * z).exp();
    let qa = q.norm();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut k: u32 = 1;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        let e2 = k * (3 * k + 1) / 2;
        let term = q.powu(e1) + q.powu(e2);
        sum += if k % 2 == 1 { -term } else { term };
        if qa.powi(e1 as i32) < tol * 1e-3 || k > 200 {
            break;
        }
        k += 1;
    }
    (std::f64::consts::PI * I * z / 12.0).exp() * sum
}

/// Dedekind eta at any point of the upper half-plane, to absolute accuracy
/// about `tol`. For `y < 0.5` the point is moved toward the fundamental
/// domain by `z -> z - round(x)` and `z -> -1/z`, with the multiplier from
/// `eta(z+1) = e^{i pi/12} eta(z)` and `eta(-1/z) = sqrt(-iz) eta(z)`
/// accumulated along the word.
pub fn eta_eval(z: ComplexPoint, tol: f64) -> Complex64 {
    let mut z = z.as_complex();
    let mut factor = Complex64::new(1.0, 0.0);
    let mut guard = 0;
    while z.im < ETA_Y_MIN {
        let n = z.re.round();
        let zp = z - n;
        // eta(z) = e^{i pi n/12} eta(zp), then eta(zp) = eta(-1/zp)/sqrt(-i zp)
        factor *= cis(std::f64::consts::PI * n / 12.0);
        factor /= (-I * zp).sqrt();
        z = -1.0 / zp;
        guard += 1;
        assert!(guard < 2000, "eta reduction did not terminate");
    }
    factor * eta_series(z, tol)
}

fn sigma_f64(r: u32, n: u64) -> f64 {
    let mut sum = 0.0;
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            sum += (d as f64).powi(r as i32);
            let e = n / d;
            if e != d {
                sum += (e as f64).powi(r as i32);
            }
        }
        d += 1;
    }
    sum
}

fn e2_series(z: Complex64, tol: f64) -> Complex64 {
    let q = (2.0 * std::f64::consts::PI * I * z).exp();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut qn = q;
    let mut n = 1u64;
    loop {
        let term = 24.0 * sigma_f64(1, n) * qn;
        sum -= term;
        if term.norm() < tol * 1e-3 || n > 400 {
            break;
        }
        qn *= q;
        n += 1;
    }
    sum
}

/// `E_2(z)` at any point, via the series for `y >= 0.5` and the cocycle
/// `E_2(-1/z) = z^2 E_2(z) - 6iz/pi` otherwise.
pub fn e2_eval(z: ComplexPoint, tol: f64) -> Complex64 {
    let mut z = z.as_complex();
    // E_2(start) = a * E_2(current) + b
    let mut a = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(0.0, 0.0);
    let mut guard = 0;
    while z.im < ETA_Y_MIN {
        let n = z.re.round();
        let zp = z - n;
        // E_2(zp) = E_2(-1/zp)/zp^2 + 6i/(pi zp)
        b += a * 6.0 * I / (std::f64::consts::PI * zp);
        a /= zp * zp;
        z = -1.0 / zp;
        guard += 1;
        assert!(guard < 2000, "E_2 reduction did not terminate");
    }
    a * e2_series(z, tol) + b
}

fn eisenstein_series(k: u32, z: Complex64, tol: f64) -> Complex64 {
    let coeff = rational_to_f64(
        &(crate::rational::rat_int(-2 * k as i64) / bernoulli(k).expect("even k >= 4")),
    );
    let q = (2.0 * std::f64::consts::PI * I * z).exp();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut qn = q;
    let mut n = 1u64;
    loop {
        let term = coeff * sigma_f64(k - 1, n) * qn;
        sum += term;
        if term.norm() < tol * 1e-3 || n > 400 {
            break;
        }
        qn *= q;
        n += 1;
    }
    sum
}

/// `E_k(z)` for even `k >= 4` (weight-`k` modular of level 1).
pub fn eisenstein_eval(k: u32, z: ComplexPoint, tol: f64) -> Result<Complex64> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::EisensteinUnsupported { k });
    }
    let mut z = z.as_complex();
    let mut a = Complex64::new(1.0, 0.0);
    let mut guard = 0;
    while z.im < ETA_Y_MIN {
        let n = z.re.round();
        let zp = z - n;
        // E_k(zp) = E_k(-1/zp) / zp^k
        a /= zp.powi(k as i32);
        z = -1.0 / zp;
        guard += 1;
        assert!(guard < 2000, "E_k reduction did not terminate");
    }
    Ok(a * eisenstein_series(k, z, tol))
}

/// Value of a [`FormSpec`] recipe at a point, composing the evaluators.
pub fn form_eval(spec: &FormSpec, z: ComplexPoint, tol: f64) -> Result<Complex64> {
    match spec.kind() {
        FormKind::Eisenstein { k } => {
            if *k == 2 {
                Ok(e2_eval(z, tol))
            } else {
                eisenstein_eval(*k, z, tol)
            }
        }
        FormKind::EtaQuotient { factors } => {
            let mut acc = Complex64::new(1.0, 0.0);
            for &(d, r) in factors {
                if r == 0 {
                    continue;
                }
                let scaled = ComplexPoint::new(z.x * d as f64, z.y * d as f64)?;
                acc *= eta_eval(scaled, tol).powi(r);
            }
            Ok(acc)
        }
        FormKind::Level2Weight2 => {
            let double = ComplexPoint::new(2.0 * z.x, 2.0 * z.y)?;
            Ok(2.0 * e2_eval(double, tol) - e2_eval(z, tol))
        }
        FormKind::Product { factors } => {
            let mut acc = Complex64::new(1.0, 0.0);
            for f in factors {
                acc *= form_eval(f, z, tol)?;
            }
            Ok(acc)
        }
        FormKind::Scaled { scalar, form } => {
            Ok(rational_to_f64(scalar) * form_eval(form, z, tol)?)
        }
        FormKind::VShift { t, form } => {
            let shifted = ComplexPoint::new(z.x * *t as f64, z.y * *t as f64)?;
            form_eval(form, shifted, tol)
        }
        FormKind::LinearCombination { terms } => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                acc += rational_to_f64(&t.coefficient) * form_eval(&t.form, z, tol)?;
            }
            Ok(acc)
        }
    }
}

/// The weight-`k` invariant integrand `Phi(z) = f(z) conj(g(z)) y^k`.
pub fn phi_invariant(
    f: &FormSpec,
    g: &FormSpec,
    k: i64,
    z: ComplexPoint,
    tol: f64,
) -> Result<Complex64> {
    if f.weight() != k {
        return Err(Error::WeightMismatch {
            left: f.weight(),
            right: k,
        });
    }
    if g.weight() != k {
        return Err(Error::WeightMismatch {
            left: g.weight(),
            right: k,
        });
    }
    let fv = form_eval(f, z, tol)?;
    let gv = form_eval(g, z, tol)?;
    Ok(fv * gv.conj() * z.y.powi(k as i32))
}

// ---------------------------------------------------------------------------
// The quadrature proper
// ---------------------------------------------------------------------------

/// Quadrature parameters: `nodes` per axis at the base refinement level, the
/// truncation height of the fundamental domain, and the point-evaluator
/// tolerance.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadParams {
    pub nodes: usize,
    pub y_cutoff: f64,
    pub eval_tol: f64,
}

impl Default for QuadParams {
    fn default() -> Self {
        QuadParams {
            nodes: 48,
            y_cutoff: 6.0,
            eval_tol: 1e-14,
        }
    }
}

impl QuadParams {
    pub fn with_nodes(nodes: usize) -> Self {
        QuadParams {
            nodes,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeterssonEstimate {
    pub value_re: f64,
    pub value_im: f64,
    /// Node-doubling difference plus the height-cutoff bound. Empirical, not
    /// a proven bound.
    pub est_error: f64,
    pub nodes_base: usize,
    pub nodes_refined: usize,
    pub y_cutoff: f64,
    pub cutoff_bound: f64,
}

impl PeterssonEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.value_re, self.value_im)
    }

    pub fn real(&self) -> f64 {
        self.value_re
    }
}

/// Right-coset representatives of `Gamma_0(N) \ SL_2(Z)` as integer matrices
/// `(a, b, c, d)`.
fn coset_reps(level: u64) -> Result<Vec<[f64; 4]>> {
    match level {
        1 => Ok(vec![[1.0, 0.0, 0.0, 1.0]]),
        2 => Ok(vec![
            [1.0, 0.0, 0.0, 1.0],  // identity
            [0.0, -1.0, 1.0, 0.0], // S
            [0.0, -1.0, 1.0, 1.0], // S T
        ]),
        _ => Err(Error::UnsupportedLevel {
            level,
            supported: vec![1, 2],
        }),
    }
}

fn moebius(m: &[f64; 4], z: Complex64) -> Complex64 {
    (m[0] * z + m[1]) / (m[2] * z + m[3])
}

/// `<f, g>` on `Gamma_0(level)` for `level` in `{1, 2}`, by tensor
/// Gauss-Legendre over the truncated fundamental domain and its coset
/// translates. The estimate carries a node-doubling error plus an analytic
/// bound on the discarded `y > Y` mass.
pub fn petersson_inner(
    f: &FormSpec,
    g: &FormSpec,
    k: i64,
    level: u64,
    quad: &QuadParams,
) -> Result<PeterssonEstimate> {
    if f.weight() != k || g.weight() != k {
        return Err(Error::WeightMismatch {
            left: f.weight(),
            right: if g.weight() != k { g.weight() } else { k },
        });
    }
    let reps = coset_reps(level)?;
    for spec in [f, g] {
        if level % spec.level() != 0 {
            return Err(Error::LevelMismatch {
                form_level: spec.level(),
                level,
            });
        }
    }
    if !f.is_cusp() && !g.is_cusp() {
        return Err(Error::InvalidArgument(
            "need at least one cusp form for a convergent inner product".into(),
        ));
    }
    let mu = crate::adjoint::index_mu(level) as f64;
    let y_top = quad.y_cutoff;
    let tol = quad.eval_tol;

    let phi = |w: Complex64| -> Result<Complex64> {
        let p = ComplexPoint::new(w.re, w.im)?;
        let fv = form_eval(f, p, tol)?;
        let gv = form_eval(g, p, tol)?;
        Ok(fv * gv.conj() * w.im.powi(k as i32))
    };

    let integral = |n: usize| -> Result<Complex64> {
        let (xs, wxs) = gauss_legendre(n);
        let (ys, wys) = gauss_legendre(n);
        let mut total = Complex64::new(0.0, 0.0);
        for rep in &reps {
            for (&xn, &wx) in xs.iter().zip(&wxs) {
                let x = 0.5 * xn; // [-1/2, 1/2]
                let y_lo = (1.0 - x * x).sqrt();
                let half = 0.5 * (y_top - y_lo);
                let mid = 0.5 * (y_top + y_lo);
                for (&yn, &wy) in ys.iter().zip(&wys) {
                    let y = mid + half * yn;
                    let w = moebius(rep, Complex64::new(x, y));
                    total += phi(w)? * (wx * 0.5) * (wy * half) / (y * y);
                }
            }
        }
        Ok(total / mu)
    };

    let n = quad.nodes.max(8);
    let coarse = integral(n / 2)?;
    let base = integral(n)?;
    let refined = integral(2 * n)?;
    let diff_prev = (base - coarse).norm();
    let diff_last = (refined - base).norm();
    let noise_floor = 1e-13 * refined.norm() + 1e-300;
    if diff_last > 0.5 * diff_prev && diff_last > noise_floor {
        return Err(Error::QuadratureNotConverged {
            prev: diff_prev,
            last: diff_last,
        });
    }

    // discarded mass above y = Y: |Phi| on the top edge decays at least like
    // e^{-pi (y - Y)} for cusp pairings at level <= 2 (slowest cusp width 2),
    // so the tail is below max|Phi_top| / (pi Y^2) per coset
    let (xs, _) = gauss_legendre(n);
    let mut top_max = 0.0f64;
    for rep in &reps {
        for &xn in &xs {
            let w = moebius(rep, Complex64::new(0.5 * xn, y_top));
            top_max = top_max.max(phi(w)?.norm());
        }
    }
    let cutoff_bound =
        reps.len() as f64 * top_max / (std::f64::consts::PI * y_top * y_top) / mu;

    Ok(PeterssonEstimate {
        value_re: refined.re,
        value_im: refined.im,
        est_error: diff_last + cutoff_bound,
        nodes_base: n,
        nodes_refined: 2 * n,
        y_cutoff: y_top,
        cutoff_bound,
    })
}

/// `||Delta||^2 / ||Delta_{10,2}||^2`, each norm computed with its own level
/// normalization, with the first-order propagated error.
pub fn norm_ratio_10_2(quad: &QuadParams) -> Result<(f64, f64)> {
    let delta = FormSpec::delta();
    let d102 = FormSpec::delta_10_2();
    let top = petersson_inner(&delta, &delta, 12, 1, quad)?;
    let bottom = petersson_inner(&d102, &d102, 10, 2, quad)?;
    let ratio = top.real() / bottom.real();
    let err = ratio.abs()
        * (top.est_error / top.real().abs() + bottom.est_error / bottom.real().abs());
    Ok((ratio, err))
}

#[cfg(test)]
mod tests {
    use super::*;

    // deterministic xorshift-style generator for test points
    struct SplitMix(u64);
    impl SplitMix {
        fn next_f64(&mut self) -> f64 {
            self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
        }
    }

    #[test]
    fn eta_at_i() {
        // Gamma(1/4) / (2 pi^{3/4}), via the direct q-series oracle
        let v = eta_eval(ComplexPoint::new(0.0, 1.0).unwrap(), 1e-15);
        assert!((v.re - 0.7682254223260566).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn eta_high_on_imaginary_axis() {
        // first pentagonal term dominates: eta(10i) ~ e^{-2 pi 10/24}
        let v = eta_eval(ComplexPoint::new(0.0, 10.0).unwrap(), 1e-16);
        let leading = (-2.0 * std::f64::consts::PI * 10.0 / 24.0).exp();
        let correction = 1.0 - (-2.0 * std::f64::consts::PI * 10.0).exp();
        assert!((v.re - leading * correction).abs() < 1e-18 * leading.abs() + 1e-30);
    }

    #[test]
    fn eta_periodicity() {
        let mut rng = SplitMix(7);
        for _ in 0..20 {
            let x = rng.next_f64() * 4.0 - 2.0;
            let y = 0.05 + rng.next_f64() * 3.0;
            let a = eta_eval(ComplexPoint::new(x + 1.0, y).unwrap(), 1e-14);
            let b = eta_eval(ComplexPoint::new(x, y).unwrap(), 1e-14);
            let ratio = a / b;
            let want = cis(std::f64::consts::PI / 12.0);
            assert!((ratio - want).norm() < 1e-11, "z = {x} + {y}i");
        }
    }

    #[test]
    fn eta_inversion_relation() {
        // eta(-1/z) = sqrt(-iz) eta(z) at low-y points exercises the
        // reduction path on the left and the direct series on the right
        let z = Complex64::new(0.21, 0.17);
        let lhs = eta_eval(ComplexPoint::new((-1.0 / z).re, (-1.0 / z).im).unwrap(), 1e-14);
        let rhs = (-I * z).sqrt() * eta_eval(ComplexPoint::new(z.re, z.im).unwrap(), 1e-14);
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn e2_periodicity_and_limit() {
        let a = e2_eval(ComplexPoint::new(0.37, 0.9).unwrap(), 1e-14);
        let b = e2_eval(ComplexPoint::new(1.37, 0.9).unwrap(), 1e-14);
        assert!((a - b).norm() < 1e-13);
        // E_2 -> 1 as y -> infinity
        let high = e2_eval(ComplexPoint::new(0.0, 40.0).unwrap(), 1e-16);
        assert!((high - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn e2_both_paths_agree() {
        // at y slightly above the switchover, force the transformed path via
        // the inversion law and compare with the direct series
        let z = Complex64::new(0.17, 0.6);
        let direct = e2_eval(ComplexPoint::new(z.re, z.im).unwrap(), 1e-14);
        let w = -1.0 / z;
        let via = (e2_eval(ComplexPoint::new(w.re, w.im).unwrap(), 1e-14) + 6.0 * I * z
            / std::f64::consts::PI)
            / (z * z);
        assert!((direct - via).norm() < 2e-13);
    }

    #[test]
    fn eisenstein_eval_inversion() {
        // E_4(-1/z) = z^4 E_4(z)
        let z = Complex64::new(0.31, 0.8);
        let w = -1.0 / z;
        let lhs = eisenstein_eval(4, ComplexPoint::new(w.re, w.im).unwrap(), 1e-14).unwrap();
        let rhs = z.powi(4)
            * eisenstein_eval(4, ComplexPoint::new(z.re, z.im).unwrap(), 1e-14).unwrap();
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn delta_eval_matches_q_series() {
        // Delta(2i) via eta^24 against the direct q-expansion at q = e^{-4 pi}
        let spec = FormSpec::delta();
        let v = form_eval(&spec, ComplexPoint::new(0.0, 2.0).unwrap(), 1e-15).unwrap();
        let q = (-4.0 * std::f64::consts::PI).exp();
        let tau = crate::forms::tau_table(12);
        let mut direct = 0.0;
        for (n, t) in tau.iter().enumerate().skip(1) {
            direct += rational_to_f64(&crate::rational::Rational::from_integer(t.clone()))
                * q.powi(n as i32);
        }
        assert!((v.re - direct).abs() < 1e-18);
        assert!(v.im.abs() < 1e-20);
    }

    #[test]
    fn v2_delta_is_delta_at_2z() {
        let spec = FormSpec::v2_delta();
        let z = ComplexPoint::new(0.3, 0.7).unwrap();
        let expect = form_eval(
            &FormSpec::delta(),
            ComplexPoint::new(0.6, 1.4).unwrap(),
            1e-14,
        )
        .unwrap();
        let got = form_eval(&spec, z, 1e-14).unwrap();
        assert!((got - expect).norm() < 1e-16);
    }

    #[test]
    fn phi_invariance_under_level2_generator() {
        // gamma = (1 0; 2 1) generates Gamma_0(2) together with T
        let f = FormSpec::delta();
        let g = FormSpec::v2_delta();
        let mut rng = SplitMix(42);
        for _ in 0..10 {
            let x = rng.next_f64() - 0.5;
            let y = 0.4 + rng.next_f64() * 1.5;
            let z = Complex64::new(x, y);
            let gz = z / (2.0 * z + 1.0);
            let a = phi_invariant(&f, &g, 12, ComplexPoint::new(z.re, z.im).unwrap(), 1e-14)
                .unwrap();
            let b = phi_invariant(&f, &g, 12, ComplexPoint::new(gz.re, gz.im).unwrap(), 1e-14)
                .unwrap();
            assert!(
                (a - b).norm() <= 1e-9 * a.norm().max(1e-30),
                "z = {z}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn phi_nonnegative_on_diagonal() {
        let f = FormSpec::delta();
        let z = ComplexPoint::new(0.25, 1.1).unwrap();
        let v = phi_invariant(&f, &f, 12, z, 1e-14).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-18 * v.re);
    }

    #[test]
    fn phi_weight_checks() {
        let f = FormSpec::delta();
        let g = FormSpec::delta_10_2();
        let z = ComplexPoint::new(0.0, 1.0).unwrap();
        assert!(phi_invariant(&f, &g, 12, z, 1e-14).is_err());
    }

    #[test]
    fn delta_norm_matches_reference() {
        // ||Delta||^2 is a classical constant
        let quad = QuadParams::with_nodes(32);
        let d = FormSpec::delta();
        let est = petersson_inner(&d, &d, 12, 1, &quad).unwrap();
        let reference = 1.0353620568043209e-6;
        assert!((est.real() - reference).abs() < 1e-9 * reference);
        assert!(est.value_im.abs() < 1e-20);
        assert!(est.real() > 0.0);
        assert!(est.est_error < 1e-6 * reference);
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = FormSpec::delta();
        let e4 = FormSpec::eisenstein(4).unwrap();
        let quad = QuadParams::with_nodes(8);
        assert!(matches!(
            petersson_inner(&d, &d, 12, 3, &quad),
            Err(Error::UnsupportedLevel { .. })
        ));
        assert!(petersson_inner(&d, &e4, 12, 1, &quad).is_err());
        assert!(matches!(
            petersson_inner(&e4, &e4, 4, 1, &quad),
            Err(Error::InvalidArgument(_))
        ));
        // level-2 form on the level-1 domain
        let v2 = FormSpec::v2_delta();
        assert!(matches!(
            petersson_inner(&d, &v2, 12, 1, &quad),
            Err(Error::LevelMismatch { .. })
        ));
        assert!(ComplexPoint::new(0.0, -1.0).is_err());
    }
}
