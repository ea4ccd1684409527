//! Functions on a finite measure space: a list of cells, each with a
//! positive measure and a value. Integrals are measure-weighted sums and
//! "almost everywhere" means "in every cell".

mod io;
mod rearrangement;
mod step_fit;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use io::{fmt_sci, read_field_csv, write_field_csv, write_profile_csv};
pub use rearrangement::{profile_l1_distance, DistributionFunction, RearrangedProfile};
pub use step_fit::{step_fit, StepFitReport};

use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum_by, Scalar};

/// A function on Ω sampled as `(measure, value)` cells.
///
/// The cell order is an identity: cell `i` is the same "point" of Ω in
/// every derived field. Fields derived through [`MeasuredField::with_values`]
/// share the measure storage.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredField<T> {
    measures: Arc<[T]>,
    values: Vec<T>,
    total: T,
}

impl<T: Scalar> MeasuredField<T> {
    pub fn new(measures: Vec<T>, values: Vec<T>) -> Result<Self> {
        if measures.len() != values.len() {
            return Err(Error::InvalidField(format!(
                "{} measures for {} values",
                measures.len(),
                values.len()
            )));
        }
        if measures.is_empty() {
            return Err(Error::InvalidField("no cells".into()));
        }
        if let Some(i) = measures.iter().position(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidField(format!("cell {i} has non-positive measure")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("cell {i} has a non-finite value")));
        }
        let total = pairwise_sum_by(measures.len(), &|i| measures[i]);
        Ok(Self { measures: measures.into(), values, total })
    }

    pub fn from_cells(cells: impl IntoIterator<Item = (T, T)>) -> Result<Self> {
        let (measures, values) = cells.into_iter().unzip();
        Self::new(measures, values)
    }

    /// Unit measure per cell.
    pub fn unit_cells(values: Vec<T>) -> Result<Self> {
        Self::new(vec![T::one(); values.len()], values)
    }

    pub fn constant(value: T, cells: usize) -> Result<Self> {
        Self::unit_cells(vec![value; cells])
    }

    /// Same cells, new values.
    ///
    /// # Panics
    /// If `values.len()` differs from the cell count.
    pub fn with_values(&self, values: Vec<T>) -> Self {
        assert_eq!(values.len(), self.values.len(), "cell count mismatch");
        Self { measures: Arc::clone(&self.measures), values, total: self.total }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn measures(&self) -> &[T] {
        &self.measures
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// `|Ω|`.
    pub fn total_measure(&self) -> T {
        self.total
    }

    pub fn cells(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.measures.iter().copied().zip(self.values.iter().copied())
    }

    /// True when both fields live on the same cells.
    pub fn same_cells(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.measures, &other.measures) || self.measures == other.measures
    }

    /// `∫ g(u)`.
    pub fn integral_of(&self, g: impl Fn(T) -> T) -> T {
        pairwise_sum_by(self.len(), &|i| self.measures[i] * g(self.values[i]))
    }

    /// `∫ u`.
    pub fn integral(&self) -> T {
        self.integral_of(|v| v)
    }

    /// `⟨g(u)⟩ = ∫ g(u) / |Ω|`.
    pub fn mean_of(&self, g: impl Fn(T) -> T) -> T {
        self.integral_of(g) / self.total
    }

    /// `⟨u⟩`.
    pub fn mean(&self) -> T {
        self.mean_of(|v| v)
    }

    /// Essential infimum (minimum over cells).
    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Essential supremum.
    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn map(&self, g: impl Fn(T) -> T) -> Self {
        self.with_values(self.values.iter().map(|&v| g(v)).collect())
    }

    /// `Σ wᵢ |aᵢ - bᵢ|`.
    pub fn l1_distance(&self, other: &Self) -> Result<T> {
        if !self.same_cells(other) {
            return Err(Error::CellMismatch);
        }
        Ok(pairwise_sum_by(self.len(), &|i| {
            self.measures[i] * (self.values[i] - other.values[i]).abs()
        }))
    }

    pub fn linf_distance(&self, other: &Self) -> Result<T> {
        if !self.same_cells(other) {
            return Err(Error::CellMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs())))
    }

    /// `‖u - c‖_∞` for a constant `c`.
    pub fn linf_from(&self, c: T) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc.max((v - c).abs()))
    }

    pub fn distribution_function(&self) -> DistributionFunction<T> {
        DistributionFunction::of(self)
    }

    pub fn decreasing_rearrangement(&self) -> RearrangedProfile<T> {
        RearrangedProfile::of(self)
    }

    /// An equimeasurable field on different cells: cells are randomly
    /// permuted and each is split into one to three sub-cells.
    ///
    /// The distribution function is unchanged, so any quantity that depends
    /// on the field only through it (profiles, means, limits) must agree.
    pub fn relayout(&self, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..self.len()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut measures = Vec::with_capacity(self.len() * 2);
        let mut values = Vec::with_capacity(self.len() * 2);
        for i in order {
            let w = self.measures[i];
            match rng.gen_range(1..=3u8) {
                1 => measures.push(w),
                _ => {
                    let frac = T::lit(rng.gen_range(0.2..0.8));
                    let left = w * frac;
                    measures.push(left);
                    values.push(self.values[i]);
                    measures.push(w - left);
                }
            }
            values.push(self.values[i]);
        }
        Self::new(measures, values).expect("relayout keeps positive measures")
    }
}
