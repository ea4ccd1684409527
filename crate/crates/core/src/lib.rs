//! Simulation and large-time analysis of the mass-conserving nonlocal ODE
//!
//! ```text
//! u_t = f(u) - <f(u)>,   <g> = (1/|Ω|) ∫_Ω g
//! ```
//!
//! on a finite measure space of cells. The crate is generic over the
//! floating point type; [`Field`], [`Traj`] and friends are the `f64`
//! instantiations used by the CLI, with `f32` twins suffixed `32`.

// `!(a < b)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod initial;
pub mod nonlinearity;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Field = field::MeasuredField<f64>;
pub type Field32 = field::MeasuredField<f32>;
pub type Profile = field::RearrangedProfile<f64>;
pub type Nl = nonlinearity::Nonlinearity<f64>;
pub type Nl32 = nonlinearity::Nonlinearity<f32>;
pub type Structure = nonlinearity::BistableStructure<f64>;
pub type Config = dynamics::SimulationConfig<f64>;
pub type Config32 = dynamics::SimulationConfig<f32>;
pub type Traj = dynamics::Trajectory<f64>;
pub type Traj32 = dynamics::Trajectory<f32>;
