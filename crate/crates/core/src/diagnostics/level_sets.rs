use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::nonlinearity::BistableStructure;
use crate::scalar::Scalar;

/// `|Ω₋(t)|, |Ω₀(t)|, |Ω₊(t)|` with `Ω₋ = {u ≤ m}`, `Ω₀ = {m < u < M}`,
/// `Ω₊ = {u ≥ M}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetHistory<T> {
    pub times: Vec<T>,
    pub measures: Vec<[T; 3]>,
    pub counts: Vec<[usize; 3]>,
    /// No cell ever leaves `Ω₋` or `Ω₊`.
    pub monotone: bool,
    /// First snapshot index at which a cell left `Ω₋` or `Ω₊`.
    pub first_violation: Option<usize>,
}

/// Tracks the three level sets along `traj`. Requires every value to stay
/// within `tol` of `[s_*, s^*]`.
pub fn track_level_sets<T: Scalar>(
    traj: &Trajectory<T>,
    bs: &BistableStructure<T>,
    tol: T,
) -> Result<LevelSetHistory<T>> {
    let slot = |v: T| -> usize {
        if v <= bs.m {
            0
        } else if v < bs.big_m {
            1
        } else {
            2
        }
    };
    let mut hist = LevelSetHistory {
        times: traj.times.clone(),
        measures: Vec::with_capacity(traj.len()),
        counts: Vec::with_capacity(traj.len()),
        monotone: true,
        first_violation: None,
    };
    let mut prev: Option<Vec<usize>> = None;
    for (idx, snap) in traj.snapshots.iter().enumerate() {
        let mut measures = [T::zero(); 3];
        let mut counts = [0usize; 3];
        let mut slots = Vec::with_capacity(snap.len());
        for (w, v) in snap.cells() {
            if v < bs.s_star - tol || v > bs.s_sup_star + tol {
                return Err(Error::HypothesisViolated(format!(
                    "value {v} at t = {} outside [s_*, s^*]",
                    traj.times[idx]
                )));
            }
            let s = slot(v);
            measures[s] = measures[s] + w;
            counts[s] += 1;
            slots.push(s);
        }
        if let Some(p) = &prev {
            let left = p.iter().zip(&slots).any(|(&a, &b)| (a == 0 || a == 2) && a != b);
            if left && hist.monotone {
                hist.monotone = false;
                hist.first_violation = Some(idx);
            }
        }
        prev = Some(slots);
        hist.measures.push(measures);
        hist.counts.push(counts);
    }
    Ok(hist)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrichotomyCase {
    /// All initial values in `[s_*, s^*]`.
    Inner,
    /// All initial values `≤ s_*`.
    Left,
    /// All initial values `≥ s^*`.
    Right,
    /// None of the above.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Trichotomy<T> {
    pub case: TrichotomyCase,
    pub holds: bool,
    /// Largest excursion outside the case's interval.
    pub worst_excursion: T,
}

/// Checks that the region the initial datum starts in (`[s_*, s^*]`,
/// `(-∞, s_*]` or `[s^*, ∞)`) is never left by more than `tol`.
pub fn trichotomy<T: Scalar>(traj: &Trajectory<T>, bs: &BistableStructure<T>, tol: T) -> Trichotomy<T> {
    let u0 = traj.initial();
    let (lo, hi) = (u0.min(), u0.max());
    let (case, a, b) = if lo >= bs.s_star && hi <= bs.s_sup_star {
        (TrichotomyCase::Inner, bs.s_star, bs.s_sup_star)
    } else if hi <= bs.s_star {
        (TrichotomyCase::Left, T::neg_infinity(), bs.s_star)
    } else if lo >= bs.s_sup_star {
        (TrichotomyCase::Right, bs.s_sup_star, T::infinity())
    } else {
        return Trichotomy { case: TrichotomyCase::Mixed, holds: true, worst_excursion: T::zero() };
    };
    let worst = traj
        .snapshots
        .iter()
        .flat_map(|s| s.values().iter().copied())
        .map(|v| (a - v).max(v - b).max(T::zero()))
        .fold(T::zero(), T::max);
    Trichotomy { case, holds: worst <= tol, worst_excursion: worst }
}
