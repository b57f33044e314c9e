//! Exact bases for the small cusp-form spaces and exact decomposition.
//!
//! Supported spaces form a closed enumeration: the weight-12 level-1 space
//! (spanned by `Delta`), weight-10 level-2 (`Delta_{10,2}`), weight-12
//! level-2 (`Delta` and `V_2 Delta`), and the zero space at weight 14
//! level 1. Basis elements are normalized with strictly increasing pivot
//! exponents, so decomposition is back-substitution on the pivots followed
//! by an exact verification of every remaining coefficient.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{delta, delta_10_2, v2_delta};
use crate::qseries::QExpansion;
use crate::rational::Rational;

/// Coefficients a decomposition must match beyond the pivot positions.
pub const DECOMPOSE_GUARD: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct SpaceBasis {
    weight: i64,
    level: u64,
    basis: Vec<QExpansion>,
    pivots: Vec<usize>,
}

impl SpaceBasis {
    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QExpansion] {
        &self.basis
    }

    /// Exponent of the leading (pivot) coefficient of each basis element.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn prec(&self) -> usize {
        self.basis.iter().map(QExpansion::prec).min().unwrap_or(usize::MAX)
    }
}

/// The exact basis of `S_k(Gamma_0(N))` for the supported `(k, N)`, each
/// element expanded to `prec` coefficients.
pub fn space_basis(k: i64, level: u64, prec: usize) -> Result<SpaceBasis> {
    let basis: Vec<QExpansion> = match (k, level) {
        (12, 1) => vec![delta(prec)],
        (10, 2) => vec![delta_10_2(prec)],
        (12, 2) => vec![delta(prec), v2_delta(prec)],
        (14, 1) => vec![],
        _ => return Err(Error::UnsupportedSpace { k, level }),
    };
    let pivots = basis
        .iter()
        .map(|f| {
            f.coeffs()
                .iter()
                .position(|c| !c.is_zero())
                .expect("basis elements are nonzero")
        })
        .collect();
    Ok(SpaceBasis {
        weight: k,
        level,
        basis,
        pivots,
    })
}

/// Exact coordinates of `f` in `basis`. Solves on the pivot columns and then
/// requires every further available coefficient of `f` to match the
/// reconstruction exactly; a mismatch means `f` is not in the space.
pub fn decompose(f: &QExpansion, basis: &SpaceBasis) -> Result<Vec<Rational>> {
    if f.weight() != basis.weight() {
        return Err(Error::WeightMismatch {
            left: f.weight(),
            right: basis.weight(),
        });
    }
    if basis.level() % f.level() != 0 {
        return Err(Error::LevelMismatch {
            form_level: f.level(),
            level: basis.level(),
        });
    }
    let need = basis.dim() + DECOMPOSE_GUARD;
    if f.prec() < need {
        return Err(Error::InsufficientPrecision {
            have: f.prec(),
            need,
        });
    }
    let window = f.prec().min(basis.prec());

    // back-substitute on the strictly increasing pivots
    let mut coords = vec![Rational::zero(); basis.dim()];
    let mut residual: Vec<Rational> = f.coeffs()[..window].to_vec();
    for (i, b) in basis.basis().iter().enumerate() {
        let p = basis.pivots()[i];
        let c = &residual[p] / b.coeff(p);
        if !c.is_zero() {
            for n in p..window {
                let bn = b.coeff(n);
                if !bn.is_zero() {
                    residual[n] -= &c * bn;
                }
            }
        }
        coords[i] = c;
    }
    if let Some(n) = residual.iter().position(|c| !c.is_zero()) {
        return Err(Error::NotInSpace { n });
    }
    Ok(coords)
}
