use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Scalar;

/// Window of `‖u(t) - target‖_∞` values used for the log-linear fit.
pub const RATE_WINDOW: (f64, f64) = (1e-10, 1e-2);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport<T> {
    /// Fitted `C₂` in `‖u(t) - target‖_∞ ≈ C₁ e^{-C₂ t}`.
    pub mu_fit: T,
    /// `-max f'` over `[s1, s2]`, the rate the comparison argument guarantees.
    pub mu_theory: T,
    /// Fitted `C₁`; reported only.
    pub c1: T,
    pub window: (T, T),
    pub points: usize,
}

/// `max f'` over `[lo, hi]` by dense sampling plus golden refinement
/// around the best sample.
pub fn max_fprime<T: Scalar>(nl: &Nonlinearity<T>, lo: T, hi: T) -> T {
    let n = 10_000usize;
    let at = |i: usize| lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(n);
    let (best_i, mut best) = (0..=n)
        .map(|i| (i, nl.fprime(at(i))))
        .fold((0, T::neg_infinity()), |acc, x| if x.1 > acc.1 { x } else { acc });
    let (mut a, mut b) = (at(best_i.saturating_sub(1)), at((best_i + 1).min(n)));
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    for _ in 0..100 {
        let c = b - (b - a) * inv_phi;
        let d = a + (b - a) * inv_phi;
        if nl.fprime(c) > nl.fprime(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best = best.max(nl.fprime((a + b) * T::lit(0.5)));
    best
}

/// Log-linear least squares of `‖u(tᵢ) - target‖_∞` over the snapshots
/// where the norm lies in [`RATE_WINDOW`].
pub fn fit_rate<T: Scalar>(traj: &Trajectory<T>, target: T, nl: &Nonlinearity<T>) -> Result<RateReport<T>> {
    let (lo, hi) = (T::lit(RATE_WINDOW.0), T::lit(RATE_WINDOW.1));
    let pts: Vec<(T, T)> = traj
        .times
        .iter()
        .zip(&traj.snapshots)
        .map(|(&t, s)| (t, s.linf_from(target)))
        .filter(|&(_, e)| e >= lo && e <= hi)
        .map(|(t, e)| (t, e.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::WindowEmpty);
    }
    let n = T::from_usize_lossy(pts.len());
    let (st, sy) = pts.iter().fold((T::zero(), T::zero()), |(a, b), &(t, y)| (a + t, b + y));
    let (mt, my) = (st / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((T::zero(), T::zero()), |(a, b), &(t, y)| {
        (a + (t - mt) * (y - my), b + (t - mt) * (t - mt))
    });
    if !(sxx > T::zero()) {
        return Err(Error::WindowEmpty);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mt;
    Ok(RateReport {
        mu_fit: -slope,
        mu_theory: -max_fprime(nl, traj.s1, traj.s2),
        c1: intercept.exp(),
        window: (pts[0].0, pts[pts.len() - 1].0),
        points: pts.len(),
    })
}
