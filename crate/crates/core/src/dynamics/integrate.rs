use super::config::{SimulationConfig, BLOWUP_FACTOR, STATIONARY_SNAPSHOTS};
use super::tableau::{combine, step_factor, Integrator, Tableau};
use super::{invariant_bounds, InvariantBounds};
use crate::diagnostics::energy;
use crate::error::{Error, Result};
use crate::field::MeasuredField;
use crate::nonlinearity::Nonlinearity;
use crate::scalar::{pairwise_sum_by, Scalar};

/// `λ` as seen by the integrator: the nonlocal term at every stage of every
/// accepted step. Replaying these values through the same tableau
/// reproduces any cell's path exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaRecord<T> {
    pub method: Integrator,
    /// Step start times, plus the final time.
    pub node_times: Vec<T>,
    /// `λ(t_n) = ⟨f(u(t_n))⟩` at each node.
    pub node_lambda: Vec<T>,
    pub step_sizes: Vec<T>,
    /// Row-major `[step][stage]`.
    pub stage_lambda: Vec<T>,
}

impl<T: Scalar> LambdaRecord<T> {
    fn new(method: Integrator, t0: T, lambda0: T) -> Self {
        Self {
            method,
            node_times: vec![t0],
            node_lambda: vec![lambda0],
            step_sizes: Vec::new(),
            stage_lambda: Vec::new(),
        }
    }

    /// `λ ≡ value` sampled on a uniform RK4 grid over `[0, t_end]`.
    pub fn constant(value: T, dt: T, t_end: T) -> Self {
        let mut rec = Self::new(Integrator::Rk4Fixed, T::zero(), value);
        let steps = (t_end / dt).ceil().to_usize().unwrap_or(0);
        for n in 0..steps {
            let t = T::from_usize_lossy(n) * dt;
            let h = dt.min(t_end - t);
            rec.push(h, &[value; 4], t + h, value);
        }
        rec
    }

    /// The same record with `λ` replaced by `λ + delta` everywhere. Paths
    /// replayed against it are sub- (`delta > 0`) or supersolutions
    /// (`delta < 0`) of the original characteristic problem.
    pub fn shifted(&self, delta: T) -> Self {
        let mut out = self.clone();
        out.node_lambda.iter_mut().for_each(|l| *l = *l + delta);
        out.stage_lambda.iter_mut().for_each(|l| *l = *l + delta);
        out
    }

    fn push(&mut self, h: T, stages: &[T], t_next: T, lambda_next: T) {
        self.step_sizes.push(h);
        self.stage_lambda.extend_from_slice(stages);
        self.node_times.push(t_next);
        self.node_lambda.push(lambda_next);
    }

    pub fn stages_per_step(&self) -> usize {
        Tableau::<T>::for_method(self.method).stages()
    }

    pub fn steps(&self) -> usize {
        self.step_sizes.len()
    }

    pub fn end_time(&self) -> T {
        *self.node_times.last().expect("record has t0")
    }

    pub fn stage(&self, step: usize) -> &[T] {
        let s = self.stages_per_step();
        &self.stage_lambda[step * s..(step + 1) * s]
    }

    /// Linear interpolation of the node values.
    pub fn at(&self, t: T) -> Result<T> {
        let (first, last) = (self.node_times[0], self.end_time());
        let slack = T::tol_or_eps(1e-12) * (T::one() + last.abs());
        if t < first - slack || t > last + slack {
            return Err(Error::SpanExceeded { requested: t.to_f64_lossy(), available: last.to_f64_lossy() });
        }
        let idx = self.node_times.partition_point(|&x| x < t);
        if idx == 0 {
            return Ok(self.node_lambda[0]);
        }
        if idx >= self.node_times.len() {
            return Ok(*self.node_lambda.last().expect("nonempty"));
        }
        let (t0, t1) = (self.node_times[idx - 1], self.node_times[idx]);
        let (l0, l1) = (self.node_lambda[idx - 1], self.node_lambda[idx]);
        let w = (t - t0) / (t1 - t0);
        Ok(l0 + (l1 - l0) * w)
    }
}

/// A computed trajectory with per-snapshot diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub snapshots: Vec<MeasuredField<T>>,
    /// `λ(tᵢ) = ⟨f(u(tᵢ))⟩`.
    pub lambda: Vec<T>,
    /// `E(u(tᵢ)) = -∫ F(u(tᵢ))`.
    pub energy: Vec<T>,
    /// `∫₀^{tᵢ} ∫_Ω |u_t|²`, integrated with the scheme's own weights.
    pub dissipation: Vec<T>,
    /// `⟨u(tᵢ)⟩`.
    pub mass: Vec<T>,
    /// `‖H(u(tᵢ))‖_∞`.
    pub residual: Vec<T>,
    pub s1: T,
    pub s2: T,
    pub bounds: InvariantBounds<T>,
    pub lambda_record: LambdaRecord<T>,
    /// Stopped early because the state became stationary.
    pub stationary: bool,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl<T: Scalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn initial(&self) -> &MeasuredField<T> {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &MeasuredField<T> {
        self.snapshots.last().expect("trajectory has the initial snapshot")
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("nonempty")
    }

    /// Smallest and largest value over all snapshots.
    pub fn value_range(&self) -> (T, T) {
        self.snapshots
            .iter()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), s| (lo.min(s.min()), hi.max(s.max())))
    }
}

struct StageWork<T> {
    k: Vec<Vec<T>>,
    tmp: Vec<T>,
    fbuf: Vec<T>,
}

/// Writes `H(y)` into `out` and returns `(λ, ∫ H²)`.
fn eval_stage<T: Scalar>(
    nl: &Nonlinearity<T>,
    measures: &[T],
    total: T,
    y: &[T],
    fbuf: &mut [T],
    out: &mut [T],
) -> (T, T) {
    for (fv, &v) in fbuf.iter_mut().zip(y) {
        *fv = nl.f(v);
    }
    let lambda = pairwise_sum_by(y.len(), &|i| measures[i] * fbuf[i]) / total;
    for (o, &fv) in out.iter_mut().zip(fbuf.iter()) {
        *o = fv - lambda;
    }
    let dissipation = pairwise_sum_by(y.len(), &|i| measures[i] * out[i] * out[i]);
    (lambda, dissipation)
}

struct Recorder<'a, T> {
    nl: &'a Nonlinearity<T>,
    traj: Trajectory<T>,
    quiet: usize,
    stationarity_tol: T,
}

impl<'a, T: Scalar> Recorder<'a, T> {
    /// Records a snapshot; returns true once the run has been stationary
    /// for long enough.
    fn snapshot(&mut self, t: T, field: MeasuredField<T>, q: T) -> bool {
        let lambda = field.mean_of(|v| self.nl.f(v));
        let residual = field
            .values()
            .iter()
            .fold(T::zero(), |acc, &v| acc.max((self.nl.f(v) - lambda).abs()));
        let t_ = &mut self.traj;
        t_.times.push(t);
        t_.lambda.push(lambda);
        t_.energy.push(energy(&field, self.nl));
        t_.dissipation.push(q);
        t_.mass.push(field.mean());
        t_.residual.push(residual);
        t_.snapshots.push(field);
        if residual < self.stationarity_tol {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        self.quiet >= STATIONARY_SNAPSHOTS
    }
}

/// Integrates `du/dt = f(u) - ⟨f(u)⟩` from `u0` until `cfg.t_end` or until
/// `‖H(u)‖_∞ < cfg.stationarity_tol` holds on ten consecutive snapshots.
///
/// `λ` is recomputed from every stage state, so each stage slope has zero
/// mean and `⟨u⟩` is conserved up to rounding.
pub fn integrate<T: Scalar>(
    u0: &MeasuredField<T>,
    nl: &Nonlinearity<T>,
    cfg: &SimulationConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let bounds = invariant_bounds(u0, nl)?;
    let (s1, s2) = bounds.interval();
    let limit = T::lit(BLOWUP_FACTOR) * s1.abs().max(s2.abs()).max(T::one());

    let tab = Tableau::<T>::for_method(cfg.integrator);
    let n = u0.len();
    let measures = u0.measures().to_vec();
    let total = u0.total_measure();
    let lambda0 = u0.mean_of(|v| nl.f(v));

    let mut rec = Recorder {
        nl,
        traj: Trajectory {
            times: Vec::new(),
            snapshots: Vec::new(),
            lambda: Vec::new(),
            energy: Vec::new(),
            dissipation: Vec::new(),
            mass: Vec::new(),
            residual: Vec::new(),
            s1,
            s2,
            bounds,
            lambda_record: LambdaRecord::new(cfg.integrator, T::zero(), lambda0),
            stationary: false,
            accepted_steps: 0,
            rejected_steps: 0,
        },
        quiet: 0,
        stationarity_tol: cfg.stationarity_tol,
    };
    if rec.snapshot(T::zero(), u0.clone(), T::zero()) {
        rec.traj.stationary = true;
        return Ok(rec.traj);
    }

    let mut work = StageWork {
        k: vec![vec![T::zero(); n]; tab.stages()],
        tmp: vec![T::zero(); n],
        fbuf: vec![T::zero(); n],
    };
    let mut u = u0.values().to_vec();
    let mut next = vec![T::zero(); n];
    let mut stage_lambda = vec![T::zero(); tab.stages()];
    let mut q = T::zero();
    let mut t = T::zero();

    let interval = cfg.snapshot_interval();
    let mut snapshot_index = 1usize;
    let mut h_prop = cfg.dt;
    let min_step = T::epsilon() * T::lit(16.0);

    loop {
        let mut t_out = (T::from_usize_lossy(snapshot_index) * interval).min(cfg.t_end);
        if cfg.t_end - t_out <= T::lit(64.0) * T::epsilon() * (T::one() + cfg.t_end.abs()) {
            t_out = cfg.t_end;
        }
        let nominal = match cfg.integrator {
            Integrator::Rk4Fixed => cfg.dt,
            Integrator::Rk45Adaptive => h_prop,
        };
        // land exactly on snapshot times; absorb rounding slivers
        let remaining = t_out - t;
        let sliver = (nominal * T::lit(1e-6)).max(T::lit(64.0) * T::epsilon() * (T::one() + t_out.abs()));
        let h = if remaining <= nominal + sliver { remaining } else { nominal };
        let clipped = h < nominal;
        if !(h > min_step * (T::one() + t.abs())) && t < t_out {
            return Err(Error::InvalidConfig(format!("step size underflow at t = {t}")));
        }

        let mut q_incr = T::zero();
        for (j, stage) in stage_lambda.iter_mut().enumerate() {
            {
                let (done, _) = work.k.split_at(j);
                for i in 0..n {
                    work.tmp[i] = combine(u[i], h, &tab.a[j], |l| done[l][i]);
                }
            }
            let (lambda, diss) =
                eval_stage(nl, &measures, total, &work.tmp, &mut work.fbuf, &mut work.k[j]);
            *stage = lambda;
            q_incr = q_incr + tab.b[j] * diss;
        }
        let mut err_norm = T::zero();
        for i in 0..n {
            next[i] = combine(u[i], h, &tab.b, |l| work.k[l][i]);
            if let Some(e) = &tab.err {
                let est = combine(T::zero(), h, e, |l| work.k[l][i]);
                err_norm = err_norm.max(est.abs() / (cfg.adapt_tol * (T::one() + u[i].abs())));
            }
        }

        if cfg.integrator == Integrator::Rk45Adaptive {
            let factor = step_factor(err_norm, tab.order);
            if !(err_norm <= T::one()) {
                rec.traj.rejected_steps += 1;
                h_prop = h * factor.min(T::lit(0.9));
                continue;
            }
            if !clipped {
                h_prop = h * factor;
            } else if factor < T::one() {
                h_prop = h_prop * factor;
            }
        }

        std::mem::swap(&mut u, &mut next);
        q = q + h * q_incr;
        let landed = h == remaining;
        t = if landed { t_out } else { t + h };
        rec.traj.accepted_steps += 1;

        if let Some(&bad) = u.iter().find(|v| !(v.abs() <= limit)) {
            return Err(Error::BlowupDetected {
                t: t.to_f64_lossy(),
                value: bad.to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            });
        }
        let lambda_next = pairwise_sum_by(n, &|i| measures[i] * nl.f(u[i])) / total;
        rec.traj.lambda_record.push(h, &stage_lambda, t, lambda_next);

        if landed {
            snapshot_index += 1;
            let stop = rec.snapshot(t, u0.with_values(u.clone()), q);
            if stop {
                rec.traj.stationary = true;
                break;
            }
            if t >= cfg.t_end {
                break;
            }
        }
    }
    Ok(rec.traj)
}

/// Integrates the same problem on `Ω♯ = (0, |Ω|)` starting from the
/// decreasing rearrangement of `u0`. Its snapshots are the rearrangements
/// of the full run's snapshots.
pub fn solve_rearranged<T: Scalar>(
    u0: &MeasuredField<T>,
    nl: &Nonlinearity<T>,
    cfg: &SimulationConfig<T>,
) -> Result<Trajectory<T>> {
    integrate(&u0.decreasing_rearrangement().to_field(), nl, cfg)
}
