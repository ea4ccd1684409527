//! Generators for initial data.

use std::fs::File;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{read_field_csv, MeasuredField};
use crate::scalar::Scalar;

/// Initial datum description. Generated fields use unit cell measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData<T> {
    Constant { value: T, n: usize },
    TwoCell { a: T, b: T },
    /// `n` independent uniform draws on `[lo, hi)`.
    UniformRandom { lo: T, hi: T, n: usize, seed: u64 },
    /// `n` equispaced values from `lo` to `hi` inclusive.
    LinearRamp { lo: T, hi: T, n: usize },
    /// `measure,value` CSV.
    FromCsv { path: PathBuf },
}

impl<T: Scalar> InitialData<T> {
    pub fn generate(&self) -> Result<MeasuredField<T>> {
        match self {
            InitialData::Constant { value, n } => MeasuredField::constant(*value, *n),
            InitialData::TwoCell { a, b } => MeasuredField::unit_cells(vec![*a, *b]),
            InitialData::UniformRandom { lo, hi, n, seed } => {
                if !(lo < hi) {
                    return Err(Error::InvalidConfig("uniform_random needs lo < hi".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let values =
                    (0..*n).map(|_| *lo + (*hi - *lo) * T::lit(rng.gen::<f64>())).collect();
                MeasuredField::unit_cells(values)
            }
            InitialData::LinearRamp { lo, hi, n } => {
                if *n < 2 {
                    return Err(Error::InvalidConfig("linear_ramp needs n ≥ 2".into()));
                }
                let last = T::from_usize_lossy(n - 1);
                let values = (0..*n)
                    .map(|i| *lo + (*hi - *lo) * T::from_usize_lossy(i) / last)
                    .collect();
                MeasuredField::unit_cells(values)
            }
            InitialData::FromCsv { path } => {
                let file = File::open(path)
                    .map_err(|e| Error::Csv(format!("{}: {e}", path.display())))?;
                read_field_csv(file)
            }
        }
    }

    /// True when the generator yields pairwise distinct values (with
    /// probability one for random draws).
    pub fn distinct_values(&self) -> bool {
        matches!(self, InitialData::UniformRandom { .. } | InitialData::LinearRamp { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators() {
        let r = InitialData::LinearRamp { lo: -1.0, hi: 1.0, n: 5 }.generate().unwrap();
        assert_eq!(r.values(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        let u = InitialData::UniformRandom { lo: 2.0, hi: 3.0, n: 100, seed: 4 };
        let f = u.generate().unwrap();
        assert!(f.min() >= 2.0 && f.max() < 3.0);
        assert_eq!(f, u.generate().unwrap());
        assert_eq!(InitialData::TwoCell { a: 1.0, b: 2.0 }.generate().unwrap().total_measure(), 2.0);
        assert!(InitialData::<f64>::LinearRamp { lo: 0.0, hi: 1.0, n: 1 }.generate().is_err());
    }
}
