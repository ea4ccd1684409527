use serde::Serialize;

use super::Nonlinearity;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An interval `[a, b]` with `f(a) ≥ f(s) ≥ f(b)` for all `s ∈ [a, b]`.
///
/// Solutions starting inside such an interval stay inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MultistableEnvelope<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> MultistableEnvelope<T> {
    pub fn contains(&self, s: T, slack: T) -> bool {
        self.a - slack <= s && s <= self.b + slack
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EnvelopeConfig<T> {
    /// Give up once an endpoint leaves `[-bound, bound]`.
    pub bound: T,
    /// Sampling step as a fraction of `max(hi - lo, 1)`.
    pub resolution: T,
}

impl<T: Scalar> Default for EnvelopeConfig<T> {
    fn default() -> Self {
        Self { bound: T::lit(1e3), resolution: T::lit(1e-3) }
    }
}

fn sampled_extrema<T: Scalar>(nl: &Nonlinearity<T>, a: T, b: T, h: T) -> (T, T) {
    let (mut hi, mut lo) = (nl.f(a).max(nl.f(b)), nl.f(a).min(nl.f(b)));
    let mut prev = (a, nl.f(a));
    let mut x = a + h;
    while x < b {
        let v = nl.f(x);
        let next = nl.f((x + h).min(b));
        // interior extrema are refined so the envelope test sees the true peak
        if v >= prev.1 && v >= next {
            hi = hi.max(nl.f(golden(|s| nl.f(s), prev.0, (x + h).min(b), T::one())));
        }
        if v <= prev.1 && v <= next {
            lo = lo.min(nl.f(golden(|s| nl.f(s), prev.0, (x + h).min(b), -T::one())));
        }
        hi = hi.max(v);
        lo = lo.min(v);
        prev = (x, v);
        x = x + h;
    }
    (hi, lo)
}

/// Golden-section search for an extremum of `g` on `[lo, hi]`.
/// `sign = 1` maximizes, `sign = -1` minimizes.
fn golden<T: Scalar>(g: impl Fn(T) -> T, mut lo: T, mut hi: T, sign: T) -> T {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let obj = |x: T| sign * g(x);
    let mut c = hi - (hi - lo) * inv_phi;
    let mut d = lo + (hi - lo) * inv_phi;
    let (mut fc, mut fd) = (obj(c), obj(d));
    for _ in 0..200 {
        if (hi - lo).abs() <= T::epsilon() * (T::one() + lo.abs()) * T::lit(4.0) {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - (hi - lo) * inv_phi;
            fc = obj(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + (hi - lo) * inv_phi;
            fd = obj(d);
        }
    }
    let mid = (lo + hi) * T::lit(0.5);
    // keep the best of the candidates
    [mid, lo, hi].into_iter().fold(mid, |best, x| if obj(x) > obj(best) { x } else { best })
}

/// Walks from `start` in direction `dir` until `f` reaches `target`
/// (`sign = 1`: `f ≥ target`, `sign = -1`: `f ≤ target`), then snaps to the
/// nearby local extremum when the stop point sits next to one.
fn walk<T: Scalar>(
    nl: &Nonlinearity<T>,
    start: T,
    dir: T,
    target: T,
    sign: T,
    h: T,
    bound: T,
) -> Option<T> {
    let mut x = start;
    let reached = |v: T| sign * v >= sign * target - T::tol_or_eps(1e-12) * (T::one() + v.abs());
    loop {
        x = x + dir * h;
        if x.abs() > bound {
            return None;
        }
        let here = sign * nl.f(x);
        let local_extremum =
            sign * nl.f(x + dir * h) <= here && sign * nl.f(x - dir * h) <= here;
        if local_extremum {
            let snapped = golden(|s| nl.f(s), x - h, x + h, sign);
            if reached(nl.f(snapped)) {
                return Some(snapped);
            }
        } else if here >= sign * target {
            return Some(x);
        }
    }
}

/// Smallest-effort envelope `[a, b] ⊇ [lo, hi]`, found by expanding
/// outward until `f(a)` dominates and `f(b)` is dominated on `[a, b]`.
pub fn envelope_for<T: Scalar>(
    nl: &Nonlinearity<T>,
    lo: T,
    hi: T,
    cfg: &EnvelopeConfig<T>,
) -> Result<MultistableEnvelope<T>> {
    let not_found = || Error::EnvelopeNotFound {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
        bound: cfg.bound.to_f64_lossy(),
    };
    if !(lo <= hi) {
        return Err(not_found());
    }
    let h = (hi - lo).max(T::one()) * cfg.resolution;
    let slack = |v: T| T::tol_or_eps(1e-12) * (T::one() + v.abs());
    let (mut a, mut b) = (lo, hi);
    for _ in 0..10_000 {
        let (fmax, fmin) = sampled_extrema(nl, a, b, h);
        let ok_a = nl.f(a) >= fmax - slack(fmax);
        let ok_b = nl.f(b) <= fmin + slack(fmin);
        if ok_a && ok_b {
            return Ok(MultistableEnvelope { a, b });
        }
        if !ok_a {
            a = walk(nl, a, -T::one(), fmax, T::one(), h, cfg.bound).ok_or_else(not_found)?;
        }
        if !ok_b {
            b = walk(nl, b, T::one(), fmin, -T::one(), h, cfg.bound).ok_or_else(not_found)?;
        }
    }
    Err(not_found())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Grid oracle for the envelope inequality.
    fn verify(nl: &Nonlinearity<f64>, env: &MultistableEnvelope<f64>) {
        let (fa, fb) = (nl.f(env.a), nl.f(env.b));
        for i in 0..=20_000 {
            let s = env.a + (env.b - env.a) * i as f64 / 20_000.0;
            assert!(fa >= nl.f(s) - 1e-12, "f(a) < f({s})");
            assert!(fb <= nl.f(s) + 1e-12, "f(b) > f({s})");
        }
    }

    #[test]
    fn sine_envelope_is_crest_to_trough() {
        let nl = Nonlinearity::<f64>::sine();
        let env = envelope_for(&nl, -1.0, 1.0, &EnvelopeConfig::default()).unwrap();
        assert!((env.a + 1.5 * PI).abs() < 1e-6, "a = {}", env.a);
        assert!((env.b - 1.5 * PI).abs() < 1e-6, "b = {}", env.b);
        verify(&nl, &env);
        let env = envelope_for(&nl, -2.0, 2.0, &EnvelopeConfig::default()).unwrap();
        verify(&nl, &env);
        assert!(env.a <= -2.0 && env.b >= 2.0);
    }

    #[test]
    fn cubic_envelope_is_the_data_range() {
        let nl = Nonlinearity::<f64>::cubic();
        let env = envelope_for(&nl, -2.0, 2.0, &EnvelopeConfig::default()).unwrap();
        assert_eq!(env, MultistableEnvelope { a: -2.0, b: 2.0 });
        verify(&nl, &env);
        let env = envelope_for(&nl, 0.0, 0.0, &EnvelopeConfig::default()).unwrap();
        assert_eq!(env, MultistableEnvelope { a: 0.0, b: 0.0 });
    }

    #[test]
    fn cubic_inner_range_expands_to_conjugates() {
        let nl = Nonlinearity::<f64>::cubic();
        let env = envelope_for(&nl, -0.5, 0.5, &EnvelopeConfig::default()).unwrap();
        verify(&nl, &env);
        assert!(env.a <= -0.5 && env.b >= 0.5);
    }

    #[test]
    fn increasing_f_has_no_envelope() {
        let nl = Nonlinearity::<f64>::from_fns(
            "linear",
            crate::nonlinearity::NonlinearityKind::Custom,
            |s| s,
            |_| 1.0,
            None,
        );
        let r = envelope_for(&nl, -1.0, 1.0, &EnvelopeConfig { bound: 50.0, ..Default::default() });
        assert!(matches!(r, Err(Error::EnvelopeNotFound { .. })));
    }
}
