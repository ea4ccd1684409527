use serde::{Deserialize, Serialize};

use super::Integrator;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of consecutive snapshots with `‖H(u)‖_∞ < stationarity_tol`
/// after which a run stops early.
pub const STATIONARY_SNAPSHOTS: usize = 10;

/// A run aborts once a value exceeds this multiple of `max(|s1|, |s2|, 1)`.
pub const BLOWUP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig<T> {
    /// Fixed step for `rk4_fixed`, initial step for `rk45_adaptive`.
    pub dt: T,
    pub t_end: T,
    pub integrator: Integrator,
    pub adapt_tol: T,
    /// Threshold on `‖f(u) - ⟨f(u)⟩‖_∞`.
    pub stationarity_tol: T,
    /// Snapshots are taken every `snapshot_stride · dt` units of time.
    pub snapshot_stride: usize,
    pub rng_seed: u64,
}

impl<T: Scalar> Default for SimulationConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(0.01),
            t_end: T::lit(200.0),
            integrator: Integrator::Rk45Adaptive,
            adapt_tol: T::lit(1e-9),
            stationarity_tol: T::lit(1e-10),
            snapshot_stride: 10,
            rng_seed: 0,
        }
    }
}

impl<T: Scalar> SimulationConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("`{name}` must be positive, got {v}")))
            }
        };
        positive("dt", self.dt)?;
        positive("t_end", self.t_end)?;
        positive("adapt_tol", self.adapt_tol)?;
        positive("stationarity_tol", self.stationarity_tol)?;
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidConfig("`snapshot_stride` must be at least 1".into()));
        }
        Ok(())
    }

    /// Time between snapshots.
    pub fn snapshot_interval(&self) -> T {
        self.dt * T::from_usize_lossy(self.snapshot_stride)
    }
}
