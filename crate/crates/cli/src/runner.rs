use nonlocal_flow::diagnostics::{
    check_dissipation, check_isometry, classify_omega_limit, compare_rearranged, fit_rate, max_mass_defect,
    track_level_sets, trichotomy, ClassifyConfig, LimitClass, OmegaLimitReport, RateReport, RearrangedAgreement,
    Trichotomy, TrichotomyCase,
};
use nonlocal_flow::dynamics::{integrate, solve_rearranged, InvariantBounds};
use nonlocal_flow::nonlinearity::{envelope_for, EnvelopeConfig};
use nonlocal_flow::{Error, Field, Nl, Structure, Traj};
use serde::Serialize;

use crate::scenario::{Check, Scenario};

pub const MASS_TOL: f64 = 1e-12;
pub const BOUNDS_SLACK: f64 = 1e-9;
pub const DISSIPATION_TOL: f64 = 1e-6;
pub const STATIONARITY_TOL: f64 = 1e-8;
pub const CLASS_TOL: f64 = 1e-6;
pub const CONSTANT_LIMIT_TOL: f64 = 1e-6;
pub const CONSTANT_LIMIT_TIME: f64 = 50.0;
pub const RATE_FRACTION: f64 = 0.9;
pub const ISOMETRY_TOL: f64 = 1e-9;
pub const ISOMETRY_PAIRS: usize = 50;
/// Rearranged-run agreement is required within this multiple of `adapt_tol`.
pub const REARRANGED_FACTOR: f64 = 10.0;
pub const LAYOUT_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Measured quantity; `null` when it could not be computed.
    pub value: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub kind: &'static str,
    pub s1: f64,
    pub s2: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub nonlinearity: String,
    pub cells: usize,
    pub total_measure: f64,
    pub mean_u0: f64,
    pub bounds: BoundsReport,
    pub structure: Option<Structure>,
    pub final_time: f64,
    pub stationary: bool,
    pub snapshots: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub final_residual: f64,
    pub passed: bool,
    pub failures: Vec<&'static str>,
    pub checks: Vec<CheckResult>,
    pub omega_limit: Option<OmegaLimitReport<f64>>,
    pub rate: Option<RateReport<f64>>,
    pub rearranged: Option<RearrangedAgreement<f64>>,
    pub trichotomy: Option<Trichotomy<f64>>,
    /// Limit levels of the run and of its relayouts, in that order.
    pub layout_levels: Option<Vec<Vec<f64>>>,
}

pub struct RunOutput {
    pub scenario: Scenario,
    pub u0: Field,
    pub traj: Traj,
    pub report: Report,
}

/// Integrates the scenario and evaluates its checks. Errors are failures of
/// the main integration; a failing check is reported, not returned.
pub fn run_scenario(sc: &Scenario) -> Result<RunOutput, Error> {
    let nl = sc.nonlinearity_fn().map_err(Error::InvalidConfig)?;
    let u0 = sc.initial_field().map_err(Error::InvalidConfig)?;
    let traj = integrate(&u0, &nl, &sc.sim)?;
    let structure = match traj.bounds.structure() {
        Some(bs) => Ok(*bs),
        None => nl.bistable_structure(u0.min(), u0.max()).map_err(|e| e.to_string()),
    };
    let bounds = match traj.bounds {
        InvariantBounds::Bistable { s1, s2, .. } => BoundsReport { kind: "bistable", s1, s2 },
        InvariantBounds::Envelope { a, b } => BoundsReport { kind: "envelope", s1: a, s2: b },
    };
    let mut report = Report {
        name: sc.name.clone(),
        nonlinearity: nl.name().to_string(),
        cells: u0.len(),
        total_measure: u0.total_measure(),
        mean_u0: u0.mean(),
        bounds,
        structure: structure.as_ref().ok().copied(),
        final_time: traj.final_time(),
        stationary: traj.stationary,
        snapshots: traj.len(),
        accepted_steps: traj.accepted_steps,
        rejected_steps: traj.rejected_steps,
        final_residual: *traj.residual.last().expect("trajectory has a snapshot"),
        passed: true,
        failures: Vec::new(),
        checks: Vec::new(),
        omega_limit: None,
        rate: None,
        rearranged: None,
        trichotomy: None,
        layout_levels: None,
    };
    let ctx = Ctx { sc, nl: &nl, u0: &u0, traj: &traj, structure };
    for &check in &sc.checks {
        let r = ctx.evaluate(check, &mut report);
        if !r.passed {
            report.passed = false;
            report.failures.push(r.name);
        }
        report.checks.push(r);
    }
    Ok(RunOutput { scenario: sc.clone(), u0, traj, report })
}

struct Ctx<'a> {
    sc: &'a Scenario,
    nl: &'a Nl,
    u0: &'a Field,
    traj: &'a Traj,
    structure: Result<Structure, String>,
}

fn result(name: &'static str, value: f64, tolerance: f64, passed: bool, detail: String) -> CheckResult {
    CheckResult { name, passed, value: Some(value), tolerance, detail }
}

fn below(name: &'static str, value: f64, tolerance: f64, detail: String) -> CheckResult {
    result(name, value, tolerance, value <= tolerance, detail)
}

fn failed(name: &'static str, tolerance: f64, detail: String) -> CheckResult {
    CheckResult { name, passed: false, value: None, tolerance, detail }
}

fn excursion(traj: &Traj, a: f64, b: f64) -> f64 {
    let (lo, hi) = traj.value_range();
    (a - lo).max(hi - b).max(0.0)
}

impl Ctx<'_> {
    fn classify(&self, traj: &Traj, bs: &Structure) -> Result<OmegaLimitReport<f64>, Error> {
        let cfg = ClassifyConfig { class_tol: CLASS_TOL, stationarity_tol: self.sc.sim.stationarity_tol };
        classify_omega_limit(traj, self.nl, bs, &cfg)
    }

    fn evaluate(&self, check: Check, report: &mut Report) -> CheckResult {
        let name = check.as_str();
        let traj = self.traj;
        let bs = match (&self.structure, check) {
            (Ok(bs), _) => Some(bs),
            (Err(e), Check::Classify | Check::LevelSets | Check::Trichotomy | Check::LayoutInvariance) => {
                return failed(name, 0.0, format!("needs a bistable structure: {e}"));
            }
            (Err(_), _) => None,
        };
        match check {
            Check::Mass => below(name, max_mass_defect(traj), MASS_TOL, "max |<u(t)> - <u0>|".into()),
            Check::Bounds => below(
                name,
                excursion(traj, traj.s1, traj.s2),
                BOUNDS_SLACK,
                format!("values in [{:e}, {:e}]", traj.s1, traj.s2),
            ),
            Check::Dissipation => below(
                name,
                check_dissipation(traj),
                DISSIPATION_TOL,
                "max relative defect of E(t) - E(0) + Q(t)".into(),
            ),
            Check::Stationarity => {
                let r = *traj.residual.last().expect("nonempty");
                below(name, r, STATIONARITY_TOL, format!("||f(u) - <f(u)>||_inf at t = {:e}", traj.final_time()))
            }
            Check::Classify => {
                let bs = bs.expect("checked above");
                match self.classify(traj, bs) {
                    Ok(r) => {
                        let out = self.judge_class(name, &r, bs);
                        report.omega_limit = Some(r);
                        out
                    }
                    Err(e) => failed(name, CLASS_TOL, e.to_string()),
                }
            }
            Check::ConstantLimit => {
                let idx = traj.times.iter().rposition(|&t| t <= CONSTANT_LIMIT_TIME * (1.0 + 1e-12)).unwrap_or(0);
                below(
                    name,
                    traj.snapshots[idx].linf_from(self.u0.mean()),
                    CONSTANT_LIMIT_TOL,
                    format!("||u - <u0>||_inf at t = {:e}", traj.times[idx]),
                )
            }
            Check::Rate => match fit_rate(traj, self.u0.mean(), self.nl) {
                Ok(r) => {
                    let threshold = RATE_FRACTION * r.mu_theory;
                    let ok = r.mu_theory > 0.0 && r.mu_fit >= threshold;
                    let detail = format!("fitted rate over {} points vs {RATE_FRACTION} * {:e}", r.points, r.mu_theory);
                    report.rate = Some(r);
                    result(name, r.mu_fit, threshold, ok, detail)
                }
                Err(e) => failed(name, 0.0, e.to_string()),
            },
            Check::Isometry => match check_isometry(traj, None, ISOMETRY_PAIRS, self.sc.sim.rng_seed) {
                Ok(v) => below(name, v, ISOMETRY_TOL, format!("{ISOMETRY_PAIRS} random snapshot pairs")),
                Err(e) => failed(name, ISOMETRY_TOL, e.to_string()),
            },
            Check::Rearranged => {
                let tol = REARRANGED_FACTOR * self.sc.sim.adapt_tol;
                match solve_rearranged(self.u0, self.nl, &self.sc.sim).and_then(|s| compare_rearranged(traj, &s)) {
                    Ok(a) => {
                        report.rearranged = Some(a);
                        below(
                            name,
                            a.max_profile_l1,
                            tol,
                            format!("L1 gap of rearranged snapshots over {} snapshots", a.compared_snapshots),
                        )
                    }
                    Err(e) => failed(name, tol, e.to_string()),
                }
            }
            Check::LevelSets => match track_level_sets(traj, bs.expect("checked above"), BOUNDS_SLACK) {
                Ok(h) => {
                    let bad = h
                        .counts
                        .windows(2)
                        .filter(|w| w[1][0] < w[0][0] || w[1][1] > w[0][1] || w[1][2] < w[0][2])
                        .count();
                    let leaves = usize::from(!h.monotone);
                    let detail = match h.first_violation {
                        Some(i) => format!("a cell left the outer sets at snapshot {i}"),
                        None => format!("final counts {:?}", h.counts.last().expect("nonempty")),
                    };
                    result(name, (bad + leaves) as f64, 0.0, bad + leaves == 0, detail)
                }
                Err(e) => failed(name, 0.0, e.to_string()),
            },
            Check::Envelope => {
                let env = match traj.bounds {
                    InvariantBounds::Envelope { a, b } => Ok((a, b)),
                    InvariantBounds::Bistable { .. } => {
                        envelope_for(self.nl, self.u0.min(), self.u0.max(), &EnvelopeConfig::default())
                            .map(|e| (e.a, e.b))
                    }
                };
                match env {
                    Ok((a, b)) => {
                        below(name, excursion(traj, a, b), BOUNDS_SLACK, format!("envelope [{a:e}, {b:e}]"))
                    }
                    Err(e) => failed(name, BOUNDS_SLACK, e.to_string()),
                }
            }
            Check::Trichotomy => {
                let t = trichotomy(traj, bs.expect("checked above"), BOUNDS_SLACK);
                report.trichotomy = Some(t);
                let detail = format!("{:?} case", t.case).to_lowercase();
                result(name, t.worst_excursion, BOUNDS_SLACK, t.holds && t.case != TrichotomyCase::Mixed, detail)
            }
            Check::LayoutInvariance => self.layout_invariance(name, bs.expect("checked above"), report),
        }
    }

    fn judge_class(&self, name: &'static str, r: &OmegaLimitReport<f64>, bs: &Structure) -> CheckResult {
        let class_ok = match self.sc.expect_class {
            Some(c) => c == r.class,
            None => r.class != LimitClass::Indeterminate,
        };
        let mut detail = format!("class {}", r.class.as_str());
        if !class_ok {
            if let Some(c) = self.sc.expect_class {
                detail.push_str(&format!(", expected {}", c.as_str()));
            }
        }
        if r.class != LimitClass::TwoValued {
            return result(name, r.level_residual, CLASS_TOL, class_ok && r.level_residual <= CLASS_TOL, detail);
        }
        let (lo, hi) = (r.levels[0], r.levels[1]);
        let gap = (r.level_f_values[0] - r.level_f_values[1]).abs();
        let closure = r.mass_residual / self.u0.total_measure();
        let placed = bs.s_star < lo && lo < bs.m && bs.big_m < hi && hi < bs.s_sup_star;
        if !placed {
            detail.push_str(", levels outside (s_*, m) and (M, s^*)");
        }
        let value = gap.max(closure).max(r.level_residual);
        result(name, value, CLASS_TOL, class_ok && placed && value <= CLASS_TOL, detail)
    }

    fn layout_invariance(&self, name: &'static str, bs: &Structure, report: &mut Report) -> CheckResult {
        let seed = self.sc.sim.rng_seed;
        let mut runs = vec![self.classify(self.traj, bs)];
        for s in [seed.wrapping_mul(2).wrapping_add(1), seed.wrapping_mul(2).wrapping_add(2)] {
            let field = self.u0.relayout(s);
            runs.push(integrate(&field, self.nl, &self.sc.sim).and_then(|t| self.classify(&t, bs)));
        }
        let runs: Vec<OmegaLimitReport<f64>> = match runs.into_iter().collect() {
            Ok(r) => r,
            Err(e) => return failed(name, LAYOUT_TOL, e.to_string()),
        };
        let levels: Vec<Vec<f64>> = runs.iter().map(|r| r.levels.clone()).collect();
        report.layout_levels = Some(levels.clone());
        let same_shape = runs.iter().all(|r| r.class == runs[0].class && r.levels.len() == runs[0].levels.len());
        if !same_shape || runs[0].class == LimitClass::Indeterminate {
            let classes: Vec<_> = runs.iter().map(|r| r.class.as_str()).collect();
            return failed(name, LAYOUT_TOL, format!("classes differ across layouts: {classes:?}"));
        }
        let mut gap = 0.0f64;
        for other in &levels[1..] {
            for (a, b) in levels[0].iter().zip(other) {
                gap = gap.max((a - b).abs());
            }
        }
        below(name, gap, LAYOUT_TOL, format!("{} relayouts of u0", levels.len() - 1))
    }
}
