use serde::Serialize;

use super::Nonlinearity;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Root-finding parameters.
#[derive(Debug, Clone, Copy)]
pub struct RootConfig<T> {
    /// Acceptance tolerance on root residuals and on level coincidences.
    pub tol: T,
    /// Sign-change scan resolution per bracketing interval.
    pub grid: usize,
    /// Outward bracket expansion gives up beyond this distance.
    pub max_expand: T,
}

impl<T: Scalar> Default for RootConfig<T> {
    fn default() -> Self {
        Self { tol: T::tol_or_eps(1e-12), grid: 10_000, max_expand: T::lit(1e6) }
    }
}

/// Bisection on a sign-changing bracket, refined until the bracket can no
/// longer shrink in `T`. `g(lo)` and `g(hi)` must not share a strict sign.
pub fn bisect<T: Scalar>(g: impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let mut glo = g(lo);
    let ghi = g(hi);
    if glo == T::zero() {
        return lo;
    }
    if ghi == T::zero() {
        return hi;
    }
    debug_assert!(glo.signum() != ghi.signum(), "bisect: no sign change");
    let half = T::lit(0.5);
    for _ in 0..400 {
        let mid = lo + (hi - lo) * half;
        if mid == lo || mid == hi {
            break;
        }
        let gm = g(mid);
        if gm == T::zero() {
            return mid;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    // endpoint with the smaller residual
    if g(lo).abs() <= g(hi).abs() {
        lo
    } else {
        hi
    }
}

/// `(m, M, s_*, s^*)` with `f(m), f(M)` cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BistableStructure<T> {
    /// Local minimum of `f`.
    pub m: T,
    /// Local maximum of `f`.
    pub big_m: T,
    /// `s_* < m` with `f(s_*) = f(M)`.
    pub s_star: T,
    /// `s^* > M` with `f(s^*) = f(m)`.
    pub s_sup_star: T,
    pub f_m: T,
    pub f_big_m: T,
}

impl<T: Scalar> BistableStructure<T> {
    /// Search interval for data in `[lo, hi]`: `[-10, 10]` widened by the data span.
    pub fn default_interval(lo: T, hi: T) -> (T, T) {
        let ten = T::lit(10.0);
        let span = (hi - lo).abs();
        ((lo - span).min(-ten), (hi + span).max(ten))
    }

    pub fn analyze(nl: &Nonlinearity<T>, lo: T, hi: T, cfg: &RootConfig<T>) -> Result<Self> {
        let (m, big_m) = find_critical_points(nl, lo, hi, cfg)?;
        let (s_star, s_sup_star) = find_conjugate_points(nl, m, big_m, cfg)?;
        Ok(Self { m, big_m, s_star, s_sup_star, f_m: nl.f(m), f_big_m: nl.f(big_m) })
    }

    /// `s` in the closed invariant interval `[s_*, s^*]`.
    pub fn in_core(&self, s: T) -> bool {
        self.s_star <= s && s <= self.s_sup_star
    }

    /// `s` in the open interval `(s_*, s^*)`.
    pub fn in_open_core(&self, s: T) -> bool {
        self.s_star < s && s < self.s_sup_star
    }
}

/// Locates `m < M`, the zeros of `f'` where it changes sign `- → +` and
/// `+ → -`, by a sign-change scan and bisection.
///
/// Besides the sign pattern, the tails of `f` on `[lo, hi]` must climb above
/// `f(M)` on the left and drop below `f(m)` on the right, so that the
/// conjugate points exist.
pub fn find_critical_points<T: Scalar>(
    nl: &Nonlinearity<T>,
    lo: T,
    hi: T,
    cfg: &RootConfig<T>,
) -> Result<(T, T)> {
    let fail = |reason: String| Error::NoBistableStructure {
        lo: lo.to_f64_lossy(),
        hi: hi.to_f64_lossy(),
        reason,
    };
    if !(lo < hi) {
        return Err(fail("empty search interval".into()));
    }
    let n = cfg.grid.max(2);
    let at = |i: usize| lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(n);

    // (bracket_lo, bracket_hi, rising)
    let mut changes: Vec<(T, T, bool)> = Vec::new();
    let mut last: Option<(T, T)> = None;
    let mut first_sign = None;
    for i in 0..=n {
        let x = at(i);
        let d = nl.fprime(x);
        if d == T::zero() {
            continue;
        }
        if first_sign.is_none() {
            first_sign = Some(d > T::zero());
        }
        if let Some((px, pd)) = last {
            if pd.signum() != d.signum() {
                changes.push((px, x, d > T::zero()));
            }
        }
        last = Some((x, d));
    }
    if changes.len() != 2 {
        return Err(fail(format!("f' has {} sign changes, expected 2", changes.len())));
    }
    if first_sign != Some(false) || !changes[0].2 || changes[1].2 {
        return Err(fail("f' sign pattern is not (-, +, -)".into()));
    }
    let fp = |s: T| nl.fprime(s);
    let m = bisect(fp, changes[0].0, changes[0].1);
    let big_m = bisect(fp, changes[1].0, changes[1].1);
    if !(nl.f(lo) > nl.f(big_m)) || !(nl.f(hi) < nl.f(m)) {
        return Err(fail("tails of f do not pass the critical values".into()));
    }
    Ok((m, big_m))
}

/// Expands from `from` in direction `dir` (±1) until `pred` holds.
fn expand_until<T: Scalar>(
    from: T,
    dir: T,
    initial: T,
    max: T,
    pred: impl Fn(T) -> bool,
) -> Option<T> {
    let mut step = initial.max(T::one());
    loop {
        let x = from + dir * step;
        if pred(x) {
            return Some(x);
        }
        if step > max {
            return None;
        }
        step = step * T::lit(2.0);
    }
}

/// `s_* < m` solving `f(s) = f(M)` and `s^* > M` solving `f(s) = f(m)`.
pub fn find_conjugate_points<T: Scalar>(
    nl: &Nonlinearity<T>,
    m: T,
    big_m: T,
    cfg: &RootConfig<T>,
) -> Result<(T, T)> {
    let (fm, fbig) = (nl.f(m), nl.f(big_m));
    let width = big_m - m;
    let left = expand_until(m, -T::one(), width, cfg.max_expand, |x| nl.f(x) > fbig).ok_or(
        Error::RootBracketFailure { level: fbig.to_f64_lossy(), side: "left of m" },
    )?;
    let right = expand_until(big_m, T::one(), width, cfg.max_expand, |x| nl.f(x) < fm).ok_or(
        Error::RootBracketFailure { level: fm.to_f64_lossy(), side: "right of M" },
    )?;
    let s_star = bisect(|s| nl.f(s) - fbig, left, m);
    let s_sup_star = bisect(|s| nl.f(s) - fm, big_m, right);
    Ok((s_star, s_sup_star))
}

/// Solutions of `f(s) = k` for a bistable `f`, in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RootSet<T> {
    Single(T),
    /// `k = f(M)` gives `{s_*, M}`; `k = f(m)` gives `{m, s^*}`.
    Pair(T, T),
    Triple(T, T, T),
}

impl<T: Scalar> RootSet<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match *self {
            RootSet::Single(a) => vec![a],
            RootSet::Pair(a, b) => vec![a, b],
            RootSet::Triple(a, b, c) => vec![a, b, c],
        }
    }

    pub fn min(&self) -> T {
        self.to_vec()[0]
    }

    pub fn max(&self) -> T {
        *self.to_vec().last().expect("nonempty root set")
    }
}

/// Roots of `f(s) = k`, using the structure to place brackets.
pub fn roots_of_level<T: Scalar>(
    nl: &Nonlinearity<T>,
    bs: &BistableStructure<T>,
    k: T,
    cfg: &RootConfig<T>,
) -> Result<RootSet<T>> {
    let g = |s: T| nl.f(s) - k;
    let near = |a: T, b: T| (a - b).abs() <= cfg.tol * (T::one() + b.abs());
    if near(k, bs.f_big_m) {
        return Ok(RootSet::Pair(bs.s_star, bs.big_m));
    }
    if near(k, bs.f_m) {
        return Ok(RootSet::Pair(bs.m, bs.s_sup_star));
    }
    if k > bs.f_big_m {
        let width = bs.big_m - bs.m;
        let left = expand_until(bs.s_star, -T::one(), width, cfg.max_expand, |x| nl.f(x) > k)
            .ok_or(Error::RootBracketFailure { level: k.to_f64_lossy(), side: "left of s_*" })?;
        return Ok(RootSet::Single(bisect(g, left, bs.s_star)));
    }
    if k < bs.f_m {
        let width = bs.big_m - bs.m;
        let right = expand_until(bs.s_sup_star, T::one(), width, cfg.max_expand, |x| nl.f(x) < k)
            .ok_or(Error::RootBracketFailure { level: k.to_f64_lossy(), side: "right of s^*" })?;
        return Ok(RootSet::Single(bisect(g, bs.s_sup_star, right)));
    }
    Ok(RootSet::Triple(
        bisect(g, bs.s_star, bs.m),
        bisect(g, bs.m, bs.big_m),
        bisect(g, bs.big_m, bs.s_sup_star),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic_structure() -> BistableStructure<f64> {
        Nonlinearity::cubic().bistable_structure(-1.0, 1.0).unwrap()
    }

    #[test]
    fn cubic_critical_points_match_closed_form() {
        let nl = Nonlinearity::<f64>::cubic();
        let (m, big_m) = find_critical_points(&nl, -10.0, 10.0, &RootConfig::default()).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((m + r).abs() < 1e-12);
        assert!((big_m - r).abs() < 1e-12);
    }

    #[test]
    fn shifted_cubic_has_same_structure() {
        let a = cubic_structure();
        let b = Nonlinearity::cubic().shifted(0.1).bistable_structure(-1.0, 1.0).unwrap();
        for (x, y) in [(a.m, b.m), (a.big_m, b.big_m), (a.s_star, b.s_star), (a.s_sup_star, b.s_sup_star)] {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }

    #[test]
    fn sine_is_not_bistable() {
        let nl = Nonlinearity::<f64>::sine();
        let pi = std::f64::consts::PI;
        let err = find_critical_points(&nl, -pi, pi, &RootConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoBistableStructure { .. }));
        let err = find_critical_points(&nl, -10.0, 10.0, &RootConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoBistableStructure { .. }));
    }

    #[test]
    fn cubic_conjugate_points_match_factorization() {
        // s³ - s + 2/(3√3) = (s - 1/√3)² (s + 2/√3)
        let bs = cubic_structure();
        let r3 = 3f64.sqrt();
        assert!((bs.s_star + 2.0 / r3).abs() < 1e-12);
        assert!((bs.s_sup_star - 2.0 / r3).abs() < 1e-12);
        assert!((bs.f_big_m - 2.0 / (3.0 * r3)).abs() < 1e-15);
        // odd symmetry
        assert!((bs.s_sup_star + bs.s_star).abs() < 1e-12);
        let nl = Nonlinearity::<f64>::cubic();
        assert!((nl.f(bs.s_star) - nl.f(bs.big_m)).abs() <= 1e-12);
        assert!((nl.f(bs.s_sup_star) - nl.f(bs.m)).abs() <= 1e-12);
        assert!(nl.fprime(bs.m).abs() <= 1e-12 && nl.fprime(bs.big_m).abs() <= 1e-12);
    }

    #[test]
    fn conjugate_bracket_failure() {
        // f' changes sign like a bistable term but the left tail flattens
        let nl = Nonlinearity::<f64>::from_fns(
            "flat-tail",
            super::super::NonlinearityKind::Custom,
            |s| (s - s * s * s) / (1.0 + s * s * s * s),
            |s| {
                let d = 1.0 + s.powi(4);
                ((1.0 - 3.0 * s * s) * d - (s - s.powi(3)) * 4.0 * s.powi(3)) / (d * d)
            },
            None,
        );
        let bs = RootConfig { max_expand: 1e3, ..RootConfig::default() };
        let r = find_conjugate_points(&nl, -0.5, 0.5, &bs);
        assert!(matches!(r, Err(Error::RootBracketFailure { .. })));
    }

    #[test]
    fn roots_of_level_examples() {
        let nl = Nonlinearity::<f64>::cubic();
        let bs = cubic_structure();
        let cfg = RootConfig::default();
        match roots_of_level(&nl, &bs, 0.0, &cfg).unwrap() {
            RootSet::Triple(a, b, c) => {
                assert!((a + 1.0).abs() < 1e-12 && b.abs() < 1e-12 && (c - 1.0).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        let r3 = 3f64.sqrt();
        match roots_of_level(&nl, &bs, 2.0 / (3.0 * r3), &cfg).unwrap() {
            RootSet::Pair(a, b) => {
                assert!((a + 2.0 / r3).abs() < 1e-12 && (b - 1.0 / r3).abs() < 1e-12)
            }
            other => panic!("{other:?}"),
        }
        // oracle: plain bisection of u - u³ - 0.5 on (-3, -1)
        let oracle = {
            let (mut lo, mut hi) = (-3.0f64, -1.0f64);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid - mid.powi(3) - 0.5 > 0.0 {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            0.5 * (lo + hi)
        };
        match roots_of_level(&nl, &bs, 0.5, &cfg).unwrap() {
            RootSet::Single(a) => {
                assert!(a < bs.s_star);
                assert!((a - oracle).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        match roots_of_level(&nl, &bs, -0.5, &cfg).unwrap() {
            RootSet::Single(a) => assert!((a + oracle).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_roots_over_interior_levels() {
        let nl = Nonlinearity::<f64>::cubic();
        let bs = cubic_structure();
        let cfg = RootConfig::default();
        let delta = 1e-3;
        for i in 0..=100 {
            let k = bs.f_m + delta + (bs.f_big_m - bs.f_m - 2.0 * delta) * i as f64 / 100.0;
            let RootSet::Triple(a, b, c) = roots_of_level(&nl, &bs, k, &cfg).unwrap() else {
                panic!("expected three roots at {k}");
            };
            assert!(a < bs.m && bs.m < b && b < bs.big_m && bs.big_m < c);
            for r in [a, b, c] {
                assert!((nl.f(r) - k).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_closure() {
        let nl = Nonlinearity::<f64>::cubic();
        let bs = cubic_structure();
        let rs = roots_of_level(&nl, &bs, bs.f_big_m, &RootConfig::default()).unwrap();
        assert_eq!(rs, RootSet::Pair(bs.s_star, bs.big_m));
    }

    #[test]
    fn f32_structure() {
        let bs = Nonlinearity::<f32>::cubic().bistable_structure(-1.0, 1.0).unwrap();
        assert!((bs.m + 1.0 / 3f32.sqrt()).abs() < 1e-5);
        assert!((bs.s_sup_star - 2.0 / 3f32.sqrt()).abs() < 1e-3);
    }
}
