use serde::Serialize;

use super::tableau::solve_until;
use crate::error::{Error, Result};
use crate::nonlinearity::{roots_of_level, Nonlinearity, RootConfig};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy)]
pub struct FunnelConfig<T> {
    pub max_time: T,
    pub tol: T,
}

impl<T: Scalar> Default for FunnelConfig<T> {
    fn default() -> Self {
        Self { max_time: T::lit(1e3), tol: T::tol_or_eps(1e-10) }
    }
}

/// The funnel every characteristic enters once `|λ - k| ≤ δ` has held for
/// `t0` time units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunnelEstimate<T> {
    /// Smallest root of `f = k + δ`.
    pub alpha_minus: T,
    /// Largest root of `f = k - δ`.
    pub alpha_plus: T,
    pub t0: T,
}

/// Computes `α₋`, `α₊` and a time `T₀` after which the barrier solutions
/// `Ż₁ = f(Z₁) - k - δ`, `Z₁(0) = s1` and `Ż₂ = f(Z₂) - k + δ`, `Z₂(0) = s2`
/// satisfy `Z₁ ≥ α₋ - ε` and `Z₂ ≤ α₊ + ε`.
#[allow(clippy::too_many_arguments)]
pub fn funnel_estimate<T: Scalar>(
    k: T,
    delta: T,
    eps: T,
    s1: T,
    s2: T,
    nl: &Nonlinearity<T>,
    cfg: &FunnelConfig<T>,
) -> Result<FunnelEstimate<T>> {
    if !(delta > T::zero() && eps > T::zero() && s1 <= s2) {
        return Err(Error::InvalidConfig("funnel needs δ > 0, ε > 0 and s1 ≤ s2".into()));
    }
    let bs = nl.bistable_structure(s1, s2)?;
    let rc = RootConfig::default();
    let alpha_minus = roots_of_level(nl, &bs, k + delta, &rc)?.min();
    let alpha_plus = roots_of_level(nl, &bs, k - delta, &rc)?.max();
    let (lo_target, hi_target) = (alpha_minus - eps, alpha_plus + eps);
    let rhs = |z: &[T], dz: &mut [T]| {
        dz[0] = nl.f(z[0]) - k - delta;
        dz[1] = nl.f(z[1]) - k + delta;
    };
    let (t0, _) = solve_until(rhs, &[s1, s2], cfg.tol, cfg.max_time, |z| {
        z[0] >= lo_target && z[1] <= hi_target
    })
    .ok_or(Error::BarrierStalls { max_time: cfg.max_time.to_f64_lossy() })?;
    Ok(FunnelEstimate { alpha_minus, alpha_plus, t0 })
}
