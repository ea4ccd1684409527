//! Time integration of `du/dt = H(u) = f(u) - ⟨f(u)⟩`, the characteristic
//! problem `Ẏ = f(Y) - λ(t)`, and the barrier (comparison) machinery.

mod characteristic;
mod config;
mod funnel;
mod integrate;
mod tableau;

pub use characteristic::{comparison_operator, solve_characteristic, CharacteristicSolution};
pub use config::{SimulationConfig, BLOWUP_FACTOR, STATIONARY_SNAPSHOTS};
pub use funnel::{funnel_estimate, FunnelConfig, FunnelEstimate};
pub use integrate::{integrate, solve_rearranged, LambdaRecord, Trajectory};
pub use tableau::Integrator;

use crate::error::Result;
use crate::field::MeasuredField;
use crate::nonlinearity::{
    envelope_for, BistableStructure, EnvelopeConfig, Nonlinearity, NonlinearityKind,
};
use crate::scalar::Scalar;

/// `H(u) = f(u) - ⟨f(u)⟩`, cellwise. The result has zero mean.
pub fn rhs<T: Scalar>(field: &MeasuredField<T>, nl: &Nonlinearity<T>) -> MeasuredField<T> {
    let lambda = field.mean_of(|v| nl.f(v));
    field.map(|v| nl.f(v) - lambda)
}

/// `‖H(u)‖_∞`.
pub fn stationarity_residual<T: Scalar>(field: &MeasuredField<T>, nl: &Nonlinearity<T>) -> T {
    let lambda = field.mean_of(|v| nl.f(v));
    field.values().iter().fold(T::zero(), |acc, &v| acc.max((nl.f(v) - lambda).abs()))
}

/// Bounds `(s1, s2)` for the initial datum from its range `[α, β]`:
/// `(α, β)` when `[α, β]` misses `(s_*, s^*)`, otherwise
/// `(min(α, s_*), max(β, s^*))`.
pub fn choose_bounds<T: Scalar>(u0: &MeasuredField<T>, bs: &BistableStructure<T>) -> (T, T) {
    let (alpha, beta) = (u0.min(), u0.max());
    let misses_core = beta <= bs.s_star || alpha >= bs.s_sup_star;
    if misses_core {
        (alpha, beta)
    } else {
        (alpha.min(bs.s_star), beta.max(bs.s_sup_star))
    }
}

/// Where the invariant bounds of a run came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InvariantBounds<T> {
    Bistable { s1: T, s2: T, structure: BistableStructure<T> },
    Envelope { a: T, b: T },
}

impl<T: Scalar> InvariantBounds<T> {
    pub fn interval(&self) -> (T, T) {
        match *self {
            InvariantBounds::Bistable { s1, s2, .. } => (s1, s2),
            InvariantBounds::Envelope { a, b } => (a, b),
        }
    }

    pub fn structure(&self) -> Option<&BistableStructure<T>> {
        match self {
            InvariantBounds::Bistable { structure, .. } => Some(structure),
            InvariantBounds::Envelope { .. } => None,
        }
    }
}

/// Invariant interval containing `u0`: the bistable bound rule when `f` is
/// bistable, otherwise an envelope `[a, b]` with `f(a) ≥ f ≥ f(b)`.
pub fn invariant_bounds<T: Scalar>(
    u0: &MeasuredField<T>,
    nl: &Nonlinearity<T>,
) -> Result<InvariantBounds<T>> {
    let (alpha, beta) = (u0.min(), u0.max());
    let bistable = || -> Result<InvariantBounds<T>> {
        let structure = nl.bistable_structure(alpha, beta)?;
        let (s1, s2) = choose_bounds(u0, &structure);
        Ok(InvariantBounds::Bistable { s1, s2, structure })
    };
    let envelope = || -> Result<InvariantBounds<T>> {
        let env = envelope_for(nl, alpha, beta, &EnvelopeConfig::default())?;
        Ok(InvariantBounds::Envelope { a: env.a, b: env.b })
    };
    match nl.kind() {
        NonlinearityKind::Bistable => bistable(),
        NonlinearityKind::Multistable => envelope(),
        NonlinearityKind::Custom => bistable().or_else(|_| envelope()),
    }
}
