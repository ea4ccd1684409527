//! Lyapunov accounting, long-time checks and ω-limit classification.

mod classify;
mod level_sets;
mod rate;

pub use classify::{classify_omega_limit, ClassifyConfig, LimitClass, OmegaLimitReport};
pub use level_sets::{track_level_sets, trichotomy, LevelSetHistory, Trichotomy, TrichotomyCase};
pub use rate::{fit_rate, max_fprime, RateReport};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::field::{profile_l1_distance, MeasuredField};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Scalar;

/// `E(u) = -∫ F(u)`.
pub fn energy<T: Scalar>(field: &MeasuredField<T>, nl: &Nonlinearity<T>) -> T {
    -field.integral_of(|v| nl.antiderivative(v))
}

/// Largest relative defect of `E(tᵢ) - E(0) = -∫₀^{tᵢ}∫|u_t|²` over the
/// snapshots of `traj`.
pub fn check_dissipation<T: Scalar>(traj: &Trajectory<T>) -> T {
    let e0 = traj.energy[0];
    traj.energy
        .iter()
        .zip(&traj.dissipation)
        .skip(1)
        .map(|(&e, &q)| {
            let de = e - e0;
            (de + q).abs() / (de.abs() + T::epsilon())
        })
        .fold(T::zero(), T::max)
}

/// Largest increase of `E` between consecutive snapshots (zero when the
/// energy is nonincreasing).
pub fn max_energy_increase<T: Scalar>(traj: &Trajectory<T>) -> T {
    traj.energy.windows(2).map(|w| w[1] - w[0]).fold(T::zero(), T::max)
}

/// Largest `|⟨u(tᵢ)⟩ - ⟨u₀⟩|`.
pub fn max_mass_defect<T: Scalar>(traj: &Trajectory<T>) -> T {
    let m0 = traj.mass[0];
    traj.mass.iter().map(|&m| (m - m0).abs()).fold(T::zero(), T::max)
}

fn aligned_len<T: Scalar>(a: &Trajectory<T>, b: &Trajectory<T>) -> Result<usize> {
    let n = a.len().min(b.len());
    let slack = T::tol_or_eps(1e-12);
    for i in 0..n {
        if (a.times[i] - b.times[i]).abs() > slack * (T::one() + a.times[i].abs()) {
            return Err(Error::SnapshotMisaligned);
        }
    }
    Ok(n)
}

/// Samples `pairs` random snapshot pairs `(t, τ)` and returns the largest
/// `| ‖v♯(t) - v♯(τ)‖ - ‖u(t) - u(τ)‖ |`, where `u` is `full` and `v` is
/// `sharp` (or `full` itself when `sharp` is `None`).
pub fn check_isometry<T: Scalar>(
    full: &Trajectory<T>,
    sharp: Option<&Trajectory<T>>,
    pairs: usize,
    seed: u64,
) -> Result<T> {
    let sharp = sharp.unwrap_or(full);
    let n = aligned_len(full, sharp)?;
    let profiles: Vec<_> = sharp.snapshots[..n].iter().map(|s| s.decreasing_rearrangement()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    for _ in 0..pairs {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let lhs = profile_l1_distance(&profiles[i], &profiles[j])?;
        let rhs = full.snapshots[i].l1_distance(&full.snapshots[j])?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Agreement between a run and the run of its rearranged datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RearrangedAgreement<T> {
    /// `max_i ‖u(tᵢ)♯ - v(tᵢ)♯‖_{L¹}`.
    pub max_profile_l1: T,
    /// `max_i |λ_u(tᵢ) - λ_v(tᵢ)|`.
    pub max_lambda_gap: T,
    pub compared_snapshots: usize,
}

pub fn compare_rearranged<T: Scalar>(
    full: &Trajectory<T>,
    sharp: &Trajectory<T>,
) -> Result<RearrangedAgreement<T>> {
    let n = aligned_len(full, sharp)?;
    let mut out = RearrangedAgreement {
        max_profile_l1: T::zero(),
        max_lambda_gap: T::zero(),
        compared_snapshots: n,
    };
    for i in 0..n {
        let d = profile_l1_distance(
            &full.snapshots[i].decreasing_rearrangement(),
            &sharp.snapshots[i].decreasing_rearrangement(),
        )?;
        out.max_profile_l1 = out.max_profile_l1.max(d);
        out.max_lambda_gap = out.max_lambda_gap.max((full.lambda[i] - sharp.lambda[i]).abs());
    }
    Ok(out)
}
