//! The reaction term `f`, its derivative and antiderivative, and the
//! structural constants extracted from it.

mod envelope;
mod quadrature;
mod structure;

use std::fmt;
use std::sync::Arc;

pub use envelope::{envelope_for, EnvelopeConfig, MultistableEnvelope};
pub use quadrature::adaptive_simpson;
pub use structure::{
    bisect, find_conjugate_points, find_critical_points, roots_of_level, BistableStructure,
    RootConfig, RootSet,
};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Tolerance used for the quadrature-backed antiderivative.
pub const ANTIDERIVATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NonlinearityKind {
    Bistable,
    Multistable,
    Custom,
}

#[derive(Clone)]
enum Antiderivative<T> {
    Closed(ScalarFn<T>),
    /// `F(s) = ∫₀ˢ f` by adaptive Simpson.
    Quadrature,
}

/// A scalar reaction term with its derivative and antiderivative (`F(0) = 0`).
#[derive(Clone)]
pub struct Nonlinearity<T> {
    name: String,
    kind: NonlinearityKind,
    f: ScalarFn<T>,
    fprime: ScalarFn<T>,
    antiderivative: Antiderivative<T>,
}

impl<T> fmt::Debug for Nonlinearity<T> {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish_non_exhaustive()
    }
}

impl<T: Scalar> Nonlinearity<T> {
    /// Builds a nonlinearity from closures. When `antiderivative` is `None`
    /// it is evaluated by quadrature.
    pub fn from_fns<F, D>(
        name: impl Into<String>,
        kind: NonlinearityKind,
        f: F,
        fprime: D,
        antiderivative: Option<ScalarFn<T>>,
    ) -> Self
    where
        F: Fn(T) -> T + Send + Sync + 'static,
        D: Fn(T) -> T + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind,
            f: Arc::new(f),
            fprime: Arc::new(fprime),
            antiderivative: match antiderivative {
                Some(g) => Antiderivative::Closed(g),
                None => Antiderivative::Quadrature,
            },
        }
    }

    /// `f(u) = u - u³`.
    pub fn cubic() -> Self {
        let three = T::lit(3.0);
        let quarter = T::lit(0.25);
        let half = T::lit(0.5);
        Self::from_fns(
            "cubic",
            NonlinearityKind::Bistable,
            |s: T| s - s * s * s,
            move |s: T| T::one() - three * s * s,
            Some(Arc::new(move |s: T| {
                let s2 = s * s;
                half * s2 - quarter * s2 * s2
            })),
        )
    }

    /// `f(u) = sin u`, with `F(s) = 1 - cos s`.
    pub fn sine() -> Self {
        Self::from_fns(
            "sine",
            NonlinearityKind::Multistable,
            |s: T| s.sin(),
            |s: T| s.cos(),
            Some(Arc::new(|s: T| T::one() - s.cos())),
        )
    }

    pub fn piecewise_polynomial(poly: PiecewisePolynomial<T>) -> Self {
        let poly = Arc::new(poly);
        let p1 = Arc::clone(&poly);
        Self::from_fns(
            "custom",
            NonlinearityKind::Custom,
            move |s| p1.eval(s),
            move |s| poly.eval_derivative(s),
            None,
        )
    }

    /// `f + c`. The derivative, and hence every critical point, is unchanged.
    pub fn shifted(&self, c: T) -> Self {
        let f = Arc::clone(&self.f);
        let antiderivative = match &self.antiderivative {
            Antiderivative::Closed(g) => {
                let g = Arc::clone(g);
                Antiderivative::Closed(Arc::new(move |s| g(s) + c * s))
            }
            Antiderivative::Quadrature => Antiderivative::Quadrature,
        };
        Self {
            name: format!("{}{:+}", self.name, c),
            kind: self.kind,
            f: Arc::new(move |s| f(s) + c),
            fprime: Arc::clone(&self.fprime),
            antiderivative,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    #[inline]
    pub fn f(&self, s: T) -> T {
        (self.f)(s)
    }

    #[inline]
    pub fn fprime(&self, s: T) -> T {
        (self.fprime)(s)
    }

    /// `F(s) = ∫₀ˢ f(σ) dσ`.
    pub fn antiderivative(&self, s: T) -> T {
        match &self.antiderivative {
            Antiderivative::Closed(g) => g(s),
            Antiderivative::Quadrature => {
                adaptive_simpson(|x| self.f(x), T::zero(), s, T::tol_or_eps(ANTIDERIVATIVE_TOL))
            }
        }
    }

    /// Analyzes the bistable structure on the default search interval for
    /// data in `[lo, hi]`.
    pub fn bistable_structure(&self, lo: T, hi: T) -> Result<BistableStructure<T>> {
        let (a, b) = BistableStructure::<T>::default_interval(lo, hi);
        BistableStructure::analyze(self, a, b, &RootConfig::default())
    }
}

/// Piecewise polynomial in absolute powers of `s`.
///
/// `pieces[0]` applies on `(-∞, breaks[0])`, `pieces[i]` on
/// `[breaks[i-1], breaks[i])`, the last one on `[breaks[last], ∞)`.
/// Coefficients are in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial<T> {
    breaks: Vec<T>,
    pieces: Vec<Vec<T>>,
}

impl<T: Scalar> PiecewisePolynomial<T> {
    /// Validates the layout and the C¹ matching at every breakpoint.
    pub fn new(breaks: Vec<T>, pieces: Vec<Vec<T>>) -> Result<Self> {
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::InvalidConfig(format!(
                "piecewise polynomial needs {} pieces for {} breaks, got {}",
                breaks.len() + 1,
                breaks.len(),
                pieces.len()
            )));
        }
        if pieces.iter().any(|p| p.is_empty()) {
            return Err(Error::InvalidConfig("empty polynomial piece".into()));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig("breaks must be strictly increasing".into()));
        }
        let poly = Self { breaks, pieces };
        let tol = T::tol_or_eps(1e-9);
        for (i, &x) in poly.breaks.iter().enumerate() {
            let (l, r) = (&poly.pieces[i], &poly.pieces[i + 1]);
            let scale = T::one() + horner(l, x).abs();
            if (horner(l, x) - horner(r, x)).abs() > tol * scale {
                return Err(Error::InvalidConfig(format!("piece values disagree at break {x}")));
            }
            let dscale = T::one() + horner_derivative(l, x).abs();
            if (horner_derivative(l, x) - horner_derivative(r, x)).abs() > tol * dscale {
                return Err(Error::InvalidConfig(format!(
                    "piece derivatives disagree at break {x}"
                )));
            }
        }
        Ok(poly)
    }

    fn piece(&self, s: T) -> &[T] {
        let idx = self.breaks.partition_point(|&b| b <= s);
        &self.pieces[idx]
    }

    pub fn eval(&self, s: T) -> T {
        horner(self.piece(s), s)
    }

    pub fn eval_derivative(&self, s: T) -> T {
        horner_derivative(self.piece(s), s)
    }
}

fn horner<T: Scalar>(coeffs: &[T], s: T) -> T {
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * s + c)
}

fn horner_derivative<T: Scalar>(coeffs: &[T], s: T) -> T {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(T::zero(), |acc, (k, &c)| acc * s + c * T::from_usize_lossy(k))
}
