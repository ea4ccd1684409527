use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Explicit Runge–Kutta scheme used to advance a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Classical fourth-order scheme with a fixed step.
    Rk4Fixed,
    /// Dormand–Prince 5(4) with error control.
    Rk45Adaptive,
}

/// Butcher tableau. `err` holds `b - b̂` for embedded pairs.
#[derive(Debug, Clone)]
pub(crate) struct Tableau<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub err: Option<Vec<T>>,
    pub order: usize,
}

impl<T: Scalar> Tableau<T> {
    pub fn for_method(method: Integrator) -> Self {
        match method {
            Integrator::Rk4Fixed => Self::rk4(),
            Integrator::Rk45Adaptive => Self::dormand_prince(),
        }
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    fn conv(rows: &[&[f64]]) -> Vec<Vec<T>> {
        rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect()
    }

    fn rk4() -> Self {
        Self {
            a: Self::conv(&[&[], &[0.5], &[0.0, 0.5], &[0.0, 0.0, 1.0]]),
            b: [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0].iter().map(|&x| T::lit(x)).collect(),
            err: None,
            order: 4,
        }
    }

    fn dormand_prince() -> Self {
        let b = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
        let bhat = [
            5179.0 / 57600.0,
            0.0,
            7571.0 / 16695.0,
            393.0 / 640.0,
            -92097.0 / 339200.0,
            187.0 / 2100.0,
            1.0 / 40.0,
        ];
        Self {
            a: Self::conv(&[
                &[],
                &[0.2],
                &[3.0 / 40.0, 9.0 / 40.0],
                &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
                &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
                &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
                &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
            ]),
            b: b.iter().map(|&x| T::lit(x)).collect(),
            err: Some(b.iter().zip(&bhat).map(|(&x, &y)| T::lit(x - y)).collect()),
            order: 5,
        }
    }
}

/// `y + h Σ coeffs[l] k[l]`; the single place stage and update values are
/// formed, so field runs and scalar replays round identically.
#[inline]
pub(crate) fn combine<T: Scalar>(y: T, h: T, coeffs: &[T], k: impl Fn(usize) -> T) -> T {
    let mut acc = T::zero();
    for (l, &c) in coeffs.iter().enumerate() {
        acc = acc + c * k(l);
    }
    y + h * acc
}

/// Step-size controller shared by every adaptive loop.
pub(crate) fn step_factor<T: Scalar>(err_norm: T, order: usize) -> T {
    let exponent = -T::one() / T::from_usize_lossy(order);
    let raw = if err_norm > T::zero() { T::lit(0.9) * err_norm.powf(exponent) } else { T::lit(5.0) };
    raw.max(T::lit(0.2)).min(T::lit(5.0))
}

/// One adaptive solve of a small system: used for barrier ODEs.
///
/// Advances `y' = rhs(y)` from `t = 0` and returns the first accepted time
/// at which `stop(y)` holds, or `None` past `t_max`.
pub(crate) fn solve_until<T: Scalar>(
    rhs: impl Fn(&[T], &mut [T]),
    y0: &[T],
    tol: T,
    t_max: T,
    stop: impl Fn(&[T]) -> bool,
) -> Option<(T, Vec<T>)> {
    let tab = Tableau::<T>::dormand_prince();
    let n = y0.len();
    let mut y = y0.to_vec();
    if stop(&y) {
        return Some((T::zero(), y));
    }
    let mut t = T::zero();
    let mut h = T::lit(1e-3);
    let mut k = vec![vec![T::zero(); n]; tab.stages()];
    let mut tmp = vec![T::zero(); n];
    let err_w = tab.err.clone().expect("embedded pair");
    while t < t_max {
        for j in 0..tab.stages() {
            for i in 0..n {
                tmp[i] = combine(y[i], h, &tab.a[j], |l| k[l][i]);
            }
            rhs(&tmp, &mut k[j]);
        }
        let mut err = T::zero();
        let mut next = vec![T::zero(); n];
        for i in 0..n {
            next[i] = combine(y[i], h, &tab.b, |l| k[l][i]);
            let e = combine(T::zero(), h, &err_w, |l| k[l][i]);
            err = err.max(e.abs() / (tol * (T::one() + y[i].abs())));
        }
        let factor = step_factor(err, tab.order);
        if err <= T::one() {
            t = t + h;
            y = next;
            if stop(&y) {
                return Some((t, y));
            }
            h = h * factor;
        } else {
            h = h * factor.min(T::one());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableaux_are_consistent() {
        let nodes: [&[f64]; 2] = [&[0.0, 0.5, 0.5, 1.0], &[0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0]];
        for (m, c) in [Integrator::Rk4Fixed, Integrator::Rk45Adaptive].into_iter().zip(nodes) {
            let t = Tableau::<f64>::for_method(m);
            assert!((t.b.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            for (j, row) in t.a.iter().enumerate() {
                assert!((row.iter().sum::<f64>() - c[j]).abs() < 1e-14);
            }
            if let Some(e) = &t.err {
                assert!(e.iter().sum::<f64>().abs() < 1e-14);
            }
        }
    }

    #[test]
    fn solve_until_exponential() {
        let (t, y) = solve_until(|y: &[f64], d: &mut [f64]| d[0] = -y[0], &[1.0], 1e-10, 100.0, |y| y[0] <= 0.5)
            .unwrap();
        assert!((t - 2f64.ln()).abs() < 0.05);
        assert!(y[0] <= 0.5);
        assert!(solve_until(|_: &[f64], d: &mut [f64]| d[0] = 0.0, &[1.0], 1e-10, 1.0, |y| y[0] < 0.0).is_none());
    }
}
