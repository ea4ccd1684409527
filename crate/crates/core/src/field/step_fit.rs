use std::cmp::Ordering;

use serde::Serialize;

use super::MeasuredField;
use crate::scalar::Scalar;

const LLOYD_ITERATIONS: usize = 100;

/// Weighted 1-D clustering of a field's values into at most `k` levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepFitReport<T> {
    /// Cluster centers, ascending.
    pub levels: Vec<T>,
    /// Measure assigned to each level.
    pub measures: Vec<T>,
    /// `Σ wᵢ |uᵢ - level(i)|`.
    pub residual: T,
}

/// Quantile-seeded weighted Lloyd iteration. Empty or coincident clusters
/// are dropped, so fewer than `max_levels` levels may come back.
pub fn step_fit<T: Scalar>(field: &MeasuredField<T>, max_levels: usize) -> StepFitReport<T> {
    let k = max_levels.max(1);
    let mut pts: Vec<(T, T)> = field.cells().map(|(w, v)| (v, w)).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let total = field.total_measure();

    let mut centers: Vec<T> = (0..k)
        .map(|j| {
            let target = total * (T::from_usize_lossy(j) + T::lit(0.5)) / T::from_usize_lossy(k);
            let mut acc = T::zero();
            for &(v, w) in &pts {
                acc = acc + w;
                if acc >= target {
                    return v;
                }
            }
            pts.last().expect("nonempty field").0
        })
        .collect();
    centers.dedup();

    let assign = |centers: &[T], v: T| -> usize {
        let mut best = 0;
        for (j, &c) in centers.iter().enumerate() {
            if (v - c).abs() < (v - centers[best]).abs() {
                best = j;
            }
        }
        best
    };

    for _ in 0..LLOYD_ITERATIONS {
        let mut sums = vec![T::zero(); centers.len()];
        let mut weights = vec![T::zero(); centers.len()];
        for &(v, w) in &pts {
            let j = assign(&centers, v);
            sums[j] = sums[j] + w * v;
            weights[j] = weights[j] + w;
        }
        let mut next: Vec<T> = sums
            .iter()
            .zip(&weights)
            .filter(|(_, &w)| w > T::zero())
            .map(|(&s, &w)| s / w)
            .collect();
        next.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        next.dedup();
        if next == centers {
            break;
        }
        centers = next;
    }

    let mut measures = vec![T::zero(); centers.len()];
    let mut residual = T::zero();
    for &(v, w) in &pts {
        let j = assign(&centers, v);
        measures[j] = measures[j] + w;
        residual = residual + w * (v - centers[j]).abs();
    }
    StepFitReport { levels: centers, measures, residual }
}
