use crate::scalar::Scalar;

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` (either orientation).
pub fn adaptive_simpson<T: Scalar>(f: impl Fn(T) -> T, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let two = T::lit(2.0);
    let (fa, fb) = (f(a), f(b));
    let c = (a + b) / two;
    let fc = f(c);
    let whole = simpson(a, b, fa, fc, fb);
    refine(&f, a, b, fa, fc, fb, whole, tol, MAX_DEPTH)
}

fn simpson<T: Scalar>(a: T, b: T, fa: T, fc: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fc + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<T: Scalar>(
    f: &impl Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fc: T,
    fb: T,
    whole: T,
    tol: T,
    depth: u32,
) -> T {
    let two = T::lit(2.0);
    let c = (a + b) / two;
    let (d, e) = ((a + c) / two, (c + b) / two);
    let (fd, fe) = (f(d), f(e));
    let left = simpson(a, c, fa, fd, fc);
    let right = simpson(c, b, fc, fe, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        left + right + delta / T::lit(15.0)
    } else {
        refine(f, a, c, fa, fd, fc, left, tol / two, depth - 1)
            + refine(f, c, b, fc, fe, fb, right, tol / two, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_and_kinked() {
        let v = adaptive_simpson(|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-11);
        let v = adaptive_simpson(|x: f64| x.abs(), -1.0, 2.0, 1e-12);
        assert!((v - 2.5).abs() < 1e-11);
        let v = adaptive_simpson(|x: f64| x, 1.0, 0.0, 1e-12);
        assert!((v + 0.5).abs() < 1e-14);
    }
}
