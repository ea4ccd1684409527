use std::cmp::Ordering;

use super::MeasuredField;
use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum_by, Scalar};

/// `μ(τ) = |{u > τ}|` tabulated at the distinct values of a field.
///
/// The strict inequality makes `μ` right-continuous; the rearrangement
/// built from it is left-continuous. On a finite cell model both
/// conventions only matter at the breakpoints themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction<T> {
    /// Distinct values, ascending.
    pub thresholds: Vec<T>,
    /// `masses[i] = |{u > thresholds[i]}|`.
    pub masses: Vec<T>,
    pub total_measure: T,
}

impl<T: Scalar> DistributionFunction<T> {
    pub fn of(field: &MeasuredField<T>) -> Self {
        let mut cells: Vec<(T, T)> = field.cells().collect();
        cells.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal));
        let mut thresholds: Vec<T> = Vec::new();
        let mut at_or_below: Vec<T> = Vec::new();
        let mut acc = T::zero();
        for (w, v) in cells {
            acc = acc + w;
            if thresholds.last() == Some(&v) {
                *at_or_below.last_mut().expect("paired") = acc;
            } else {
                thresholds.push(v);
                at_or_below.push(acc);
            }
        }
        let total = field.total_measure();
        let masses = at_or_below.iter().map(|&below| (total - below).max(T::zero())).collect();
        Self { thresholds, masses, total_measure: total }
    }

    /// `μ(τ)` at an arbitrary threshold.
    pub fn mass_above(&self, tau: T) -> T {
        // first threshold > τ; everything from there up lies above τ
        let idx = self.thresholds.partition_point(|&t| t <= tau);
        if idx == 0 {
            self.total_measure
        } else {
            self.masses[idx - 1]
        }
    }
}

/// Nonincreasing step function on `(0, |Ω|)` equimeasurable with a field.
///
/// Segment `k` covers `(y_k, y_{k+1}]` with level `levels[k]`; one segment
/// per cell, so ties produce repeated levels.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangedProfile<T> {
    breakpoints: Vec<T>,
    widths: Vec<T>,
    levels: Vec<T>,
}

impl<T: Scalar> RearrangedProfile<T> {
    /// Sorts cells by value descending; ties keep cell-index order.
    pub fn of(field: &MeasuredField<T>) -> Self {
        let values = field.values();
        let mut order: Vec<usize> = (0..field.len()).collect();
        order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap_or(Ordering::Equal));
        let widths: Vec<T> = order.iter().map(|&i| field.measures()[i]).collect();
        let levels = order.iter().map(|&i| values[i]).collect();
        Self::from_parts(widths, levels)
    }

    /// # Panics
    /// If lengths differ or levels are not nonincreasing.
    pub fn from_parts(widths: Vec<T>, levels: Vec<T>) -> Self {
        assert_eq!(widths.len(), levels.len());
        assert!(levels.windows(2).all(|w| w[0] >= w[1]), "levels must be nonincreasing");
        let mut breakpoints = Vec::with_capacity(widths.len() + 1);
        let mut acc = T::zero();
        breakpoints.push(acc);
        for &w in &widths {
            acc = acc + w;
            breakpoints.push(acc);
        }
        Self { breakpoints, widths, levels }
    }

    /// `0 = y₀ < y₁ < … < y_K = |Ω|`.
    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[T] {
        &self.levels
    }

    pub fn widths(&self) -> &[T] {
        &self.widths
    }

    pub fn total_measure(&self) -> T {
        *self.breakpoints.last().expect("at least y0")
    }

    /// Left-continuous evaluation: `p(y) = levels[k]` for `y ∈ (y_k, y_{k+1}]`.
    pub fn eval(&self, y: T) -> T {
        let k = self.breakpoints.partition_point(|&b| b < y).saturating_sub(1);
        self.levels[k.min(self.levels.len() - 1)]
    }

    /// Measure of `{p > τ}`.
    pub fn mass_above(&self, tau: T) -> T {
        pairwise_sum_by(self.widths.len(), &|k| {
            if self.levels[k] > tau {
                self.widths[k]
            } else {
                T::zero()
            }
        })
    }

    /// The profile as a field on `Ω♯ = (0, |Ω|)`, one cell per segment in
    /// descending order.
    pub fn to_field(&self) -> MeasuredField<T> {
        MeasuredField::new(self.widths.clone(), self.levels.clone())
            .expect("profile segments have positive width")
    }

    /// `∫|p| + (v₁ - v_K)`: an L¹ norm plus the total drop of a monotone step.
    pub fn bv_norm(&self) -> T {
        let l1 = pairwise_sum_by(self.widths.len(), &|k| self.widths[k] * self.levels[k].abs());
        let first = self.levels[0];
        let last = *self.levels.last().expect("nonempty");
        l1 + (first - last)
    }

    pub fn integral_of(&self, g: impl Fn(T) -> T) -> T {
        pairwise_sum_by(self.widths.len(), &|k| self.widths[k] * g(self.levels[k]))
    }
}

/// `∫₀^{|Ω|} |p - q|` on the merged breakpoint grid.
pub fn profile_l1_distance<T: Scalar>(
    p: &RearrangedProfile<T>,
    q: &RearrangedProfile<T>,
) -> Result<T> {
    let (tp, tq) = (p.total_measure(), q.total_measure());
    let scale = T::one() + tp.abs().max(tq.abs());
    if (tp - tq).abs() > T::tol_or_eps(1e-12) * scale {
        return Err(Error::MeasureMismatch { left: tp.to_f64_lossy(), right: tq.to_f64_lossy() });
    }
    if p.widths == q.widths {
        return Ok(pairwise_sum_by(p.widths.len(), &|k| {
            p.widths[k] * (p.levels[k] - q.levels[k]).abs()
        }));
    }
    let (bp, bq) = (&p.breakpoints, &q.breakpoints);
    let (mut i, mut j) = (0usize, 0usize);
    let mut y = T::zero();
    let mut pieces = Vec::with_capacity(bp.len() + bq.len());
    while i < p.levels.len() && j < q.levels.len() {
        let next = bp[i + 1].min(bq[j + 1]);
        pieces.push((next - y) * (p.levels[i] - q.levels[j]).abs());
        y = next;
        if bp[i + 1] <= y {
            i += 1;
        }
        if bq[j + 1] <= y {
            j += 1;
        }
    }
    Ok(pairwise_sum_by(pieces.len(), &|k| pieces[k]))
}
