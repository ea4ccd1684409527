use super::integrate::LambdaRecord;
use super::tableau::{combine, Tableau};
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Scalar;

/// `Y(t; s0)` sampled at the nodes of a [`LambdaRecord`].
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicSolution<T> {
    pub s0: T,
    pub times: Vec<T>,
    pub values: Vec<T>,
}

/// Solves `Ẏ = f(Y) - λ(t)`, `Y(0) = s0`, by replaying the recorded steps
/// with their stage values of `λ`, up to the last node not after `t_final`.
///
/// When `s0` is the initial value of a cell of the run that produced the
/// record, the result is that cell's path.
pub fn solve_characteristic<T: Scalar>(
    s0: T,
    record: &LambdaRecord<T>,
    nl: &Nonlinearity<T>,
    t_final: T,
) -> Result<CharacteristicSolution<T>> {
    let end = record.end_time();
    let slack = T::tol_or_eps(1e-12) * (T::one() + end.abs());
    if t_final > end + slack {
        return Err(Error::SpanExceeded { requested: t_final.to_f64_lossy(), available: end.to_f64_lossy() });
    }
    let tab = Tableau::<T>::for_method(record.method);
    let mut k = vec![T::zero(); tab.stages()];
    let mut y = s0;
    let mut times = vec![record.node_times[0]];
    let mut values = vec![y];
    for step in 0..record.steps() {
        if record.node_times[step + 1] > t_final + slack {
            break;
        }
        let h = record.step_sizes[step];
        let lambdas = record.stage(step);
        for j in 0..tab.stages() {
            let yj = combine(y, h, &tab.a[j], |l| k[l]);
            k[j] = nl.f(yj) - lambdas[j];
        }
        y = combine(y, h, &tab.b, |l| k[l]);
        times.push(record.node_times[step + 1]);
        values.push(y);
    }
    Ok(CharacteristicSolution { s0, times, values })
}

/// `𝓛(Z) = Ż - f(Z) + λ(t)` along a sampled path, with `Ż` from
/// second-order finite differences on the (possibly nonuniform) grid.
///
/// Negative values mark a subsolution, positive values a supersolution.
pub fn comparison_operator<T: Scalar>(
    times: &[T],
    path: &[T],
    record: &LambdaRecord<T>,
    nl: &Nonlinearity<T>,
) -> Result<Vec<T>> {
    assert_eq!(times.len(), path.len(), "path and time grid differ in length");
    let derivative = fd_derivative(times, path);
    times
        .iter()
        .zip(path)
        .zip(derivative)
        .map(|((&t, &z), dz)| Ok(dz - nl.f(z) + record.at(t)?))
        .collect()
}

fn fd_derivative<T: Scalar>(t: &[T], z: &[T]) -> Vec<T> {
    let n = t.len();
    match n {
        0 => return Vec::new(),
        1 => return vec![T::zero()],
        2 => {
            let d = (z[1] - z[0]) / (t[1] - t[0]);
            return vec![d, d];
        }
        _ => {}
    }
    let two = T::lit(2.0);
    let three_point = |i0: usize, at: usize| -> T {
        // derivative at t[at] of the quadratic through i0, i0+1, i0+2
        let (x0, x1, x2) = (t[i0], t[i0 + 1], t[i0 + 2]);
        let x = t[at];
        let l0 = (two * x - x1 - x2) / ((x0 - x1) * (x0 - x2));
        let l1 = (two * x - x0 - x2) / ((x1 - x0) * (x1 - x2));
        let l2 = (two * x - x0 - x1) / ((x2 - x0) * (x2 - x1));
        l0 * z[i0] + l1 * z[i0 + 1] + l2 * z[i0 + 2]
    };
    (0..n)
        .map(|i| match i {
            0 => three_point(0, 0),
            i if i == n - 1 => three_point(n - 3, n - 1),
            i => three_point(i - 1, i),
        })
        .collect()
}
