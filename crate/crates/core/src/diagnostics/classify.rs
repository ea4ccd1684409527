use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::nonlinearity::{roots_of_level, BistableStructure, Nonlinearity, RootConfig, RootSet};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    Constant,
    TwoValued,
    ThreeValued,
    /// `⟨f(φ)⟩ = f(m)`: values in `{m, s^*}`.
    BoundaryMSstar,
    /// `⟨f(φ)⟩ = f(M)`: values in `{s_*, M}`.
    BoundarySstarM,
    Indeterminate,
}

impl LimitClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LimitClass::Constant => "constant",
            LimitClass::TwoValued => "two_valued",
            LimitClass::ThreeValued => "three_valued",
            LimitClass::BoundaryMSstar => "boundary_m_sstar",
            LimitClass::BoundarySstarM => "boundary_sstar_m",
            LimitClass::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyConfig<T> {
    /// Tolerance on level residuals and on `k̂ ≈ f(m)`, `k̂ ≈ f(M)`.
    pub class_tol: T,
    /// The run's stationarity threshold; classification refuses states
    /// with residual above `100 ×` this.
    pub stationarity_tol: T,
}

impl<T: Scalar> Default for ClassifyConfig<T> {
    fn default() -> Self {
        Self { class_tol: T::tol_or_eps(1e-6), stationarity_tol: T::tol_or_eps(1e-10) }
    }
}

/// Structure of the final state `φ` of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaLimitReport<T> {
    pub class: LimitClass,
    /// Levels taken by `φ`, ascending.
    pub levels: Vec<T>,
    /// Measure of the cells assigned to each level.
    pub level_measures: Vec<T>,
    pub level_f_values: Vec<T>,
    /// `⟨f(φ)⟩`.
    pub k_hat: T,
    /// `|{φ ≤ m}|, |{m < φ < M}|, |{φ ≥ M}|`.
    pub set_measures: [T; 3],
    /// `|Σ levelᵢ · measureᵢ - ∫u₀|`.
    pub mass_residual: T,
    /// `‖f(φ) - ⟨f(φ)⟩‖_∞`.
    pub stationarity_residual: T,
    /// `max |φ - assigned level|`.
    pub level_residual: T,
}

/// Classifies the last snapshot of `traj`, taken as the ω-limit element.
///
/// The branch follows `k̂ = ⟨f(φ)⟩`: outside `[f(m), f(M)]` the limit is
/// the constant `⟨u₀⟩`; at either end it takes values among the double
/// root pair; strictly inside, cells are assigned to the nearest of the
/// three roots of `f = k̂`.
pub fn classify_omega_limit<T: Scalar>(
    traj: &Trajectory<T>,
    nl: &Nonlinearity<T>,
    bs: &BistableStructure<T>,
    cfg: &ClassifyConfig<T>,
) -> Result<OmegaLimitReport<T>> {
    let phi = traj.last();
    let k_hat = phi.mean_of(|v| nl.f(v));
    let stationarity_residual =
        phi.values().iter().fold(T::zero(), |acc, &v| acc.max((nl.f(v) - k_hat).abs()));
    let limit = T::lit(100.0) * cfg.stationarity_tol;
    if stationarity_residual > limit {
        return Err(Error::NotStationary {
            residual: stationarity_residual.to_f64_lossy(),
            limit: limit.to_f64_lossy(),
        });
    }
    let mass0 = traj.initial().integral();

    let mut set_measures = [T::zero(); 3];
    for (w, v) in phi.cells() {
        let slot = if v <= bs.m {
            0
        } else if v < bs.big_m {
            1
        } else {
            2
        };
        set_measures[slot] = set_measures[slot] + w;
    }

    let near = |a: T, b: T| (a - b).abs() < cfg.class_tol;
    let (candidates, base_class): (Vec<T>, LimitClass) = if near(k_hat, bs.f_m) {
        (vec![bs.m, bs.s_sup_star], LimitClass::BoundaryMSstar)
    } else if near(k_hat, bs.f_big_m) {
        (vec![bs.s_star, bs.big_m], LimitClass::BoundarySstarM)
    } else if k_hat > bs.f_big_m || k_hat < bs.f_m {
        (vec![traj.initial().mean()], LimitClass::Constant)
    } else {
        match roots_of_level(nl, bs, k_hat, &RootConfig::default())? {
            RootSet::Triple(a, b, c) => (vec![a, b, c], LimitClass::TwoValued),
            other => (other.to_vec(), LimitClass::Indeterminate),
        }
    };

    let mut measures = vec![T::zero(); candidates.len()];
    let mut level_residual = T::zero();
    for (w, v) in phi.cells() {
        let mut best = 0;
        for (j, &c) in candidates.iter().enumerate() {
            if (v - c).abs() < (v - candidates[best]).abs() {
                best = j;
            }
        }
        measures[best] = measures[best] + w;
        level_residual = level_residual.max((v - candidates[best]).abs());
    }

    let occupied: Vec<usize> = (0..candidates.len()).filter(|&j| measures[j] > T::zero()).collect();
    let mut class = match base_class {
        LimitClass::TwoValued => match occupied.as_slice() {
            [_] => LimitClass::Constant,
            [0, 2] => LimitClass::TwoValued,
            _ => LimitClass::ThreeValued,
        },
        c => c,
    };
    if level_residual > cfg.class_tol {
        class = LimitClass::Indeterminate;
    }

    let levels: Vec<T> = occupied.iter().map(|&j| candidates[j]).collect();
    let level_measures: Vec<T> = occupied.iter().map(|&j| measures[j]).collect();
    let level_f_values = levels.iter().map(|&l| nl.f(l)).collect();
    let reconstructed = levels.iter().zip(&level_measures).fold(T::zero(), |acc, (&l, &w)| acc + l * w);

    Ok(OmegaLimitReport {
        class,
        levels,
        level_measures,
        level_f_values,
        k_hat,
        set_measures,
        mass_residual: (reconstructed - mass0).abs(),
        stationarity_residual,
        level_residual,
    })
}
