//! Forward evolution of the initial-boundary value problems started from the
//! upper barrier at `tau = -m`, sandwich checks and Cauchy comparisons in `m`.

mod analysis;
mod scheme;
mod sources;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use analysis::{
    calibrate_sandwich, cauchy_in_m, sandwich_check, sandwich_tolerance, tracking_error, CauchyReport,
    SandwichCalibration, SandwichReport, SandwichSample, CALIBRATION_SAFETY,
};
pub use scheme::{
    fitted_denominator, implicit_euler_conformal, implicit_euler_pressure, Gauge, NewtonOutcome, NewtonSettings,
    StepStats, Stepper, TimeScheme, Workspace,
};
pub use sources::{CylinderSolution, PressureSource, SphereSolution, TravelingWaveSolution};

use crate::barriers::{AncientParams, Barriers, CertificationReport, Verdict};
use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    /// The run starts at `tau = -m`.
    pub m: f64,
    pub tau_end: f64,
    /// Half-width `X` of the domain `[-X, X]`.
    pub x_half: f64,
    pub dx: f64,
    pub dtau: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub max_halvings: u32,
    pub scheme: TimeScheme,
    pub gauge: Gauge,
    /// Snapshots are stored at `tau_end - j * snapshot_interval`.
    pub snapshot_interval: f64,
    /// Sandwich diagnostics are recorded at this cadence (aligned like snapshots).
    pub check_interval: f64,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            m: 30.0,
            tau_end: -10.0,
            x_half: 80.0,
            dx: 0.05,
            dtau: 0.01,
            newton_tol: 1e-12,
            newton_max_iter: 30,
            max_halvings: 10,
            scheme: TimeScheme::ImplicitEuler,
            gauge: Gauge::Conformal,
            snapshot_interval: 1.0,
            check_interval: 0.1,
        }
    }
}

fn steps_in(span: f64, step: f64, what: &str) -> Result<usize> {
    let n = (span / step).round();
    if !(n >= 1.0) || (n * step - span).abs() > 1e-9 * span.abs().max(1.0) {
        return Err(Error::Config(format!(
            "{what} {span} is not a whole multiple of {step}"
        )));
    }
    Ok(n as usize)
}

impl EvolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0) || !(self.tau_end > -self.m) {
            return Err(Error::Config(format!(
                "need m > 0 and tau_end > -m, got m = {}, tau_end = {}",
                self.m, self.tau_end
            )));
        }
        if !(self.dx > 0.0) || !(self.dtau > 0.0) || !(self.x_half > 4.0 * self.dx) {
            return Err(Error::Config(format!(
                "invalid grid: X = {}, dx = {}, dtau = {}",
                self.x_half, self.dx, self.dtau
            )));
        }
        if !(self.dtau < 1.0) {
            return Err(Error::Config(
                "dtau must be < 1 for the discrete maximum principle".into(),
            ));
        }
        if !(self.newton_tol > 0.0) || self.newton_max_iter == 0 {
            return Err(Error::Config("invalid Newton settings".into()));
        }
        steps_in(self.tau_end + self.m, self.dtau, "time window")?;
        steps_in(2.0 * self.x_half, self.dx, "domain width")?;
        steps_in(self.snapshot_interval, self.dtau, "snapshot interval")?;
        steps_in(self.check_interval, self.dtau, "check interval")?;
        Ok(())
    }

    pub fn steps(&self) -> usize {
        ((self.tau_end + self.m) / self.dtau).round() as usize
    }

    pub fn nodes(&self) -> usize {
        (2.0 * self.x_half / self.dx).round() as usize + 1
    }

    pub fn newton(&self) -> NewtonSettings {
        NewtonSettings {
            tol: self.newton_tol,
            max_iter: self.newton_max_iter,
        }
    }

    fn cadence(&self, interval: f64) -> usize {
        (interval / self.dtau).round() as usize
    }
}

/// Snapshots of a field on a uniform grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceTimeField {
    pub gauge: Gauge,
    pub model: ModelParams,
    pub x_min: f64,
    pub dx: f64,
    pub nodes: usize,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl SpaceTimeField {
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.x(i)).collect()
    }

    /// Conformal factor at snapshot `j`.
    pub fn phi(&self, j: usize) -> Vec<f64> {
        match self.gauge {
            Gauge::Conformal => self.values[j].clone(),
            Gauge::Pressure => self.values[j]
                .iter()
                .map(|&u| self.model.phi_from_pressure(u))
                .collect(),
        }
    }

    /// Pressure at snapshot `j`.
    pub fn pressure(&self, j: usize) -> Vec<f64> {
        match self.gauge {
            Gauge::Pressure => self.values[j].clone(),
            Gauge::Conformal => self.values[j]
                .iter()
                .map(|&f| self.model.pressure_from_phi(f))
                .collect(),
        }
    }

    pub fn to_gauge(&self, gauge: Gauge) -> Self {
        let values = (0..self.times.len())
            .map(|j| match gauge {
                Gauge::Conformal => self.phi(j),
                Gauge::Pressure => self.pressure(j),
            })
            .collect();
        Self {
            gauge,
            values,
            times: self.times.clone(),
            ..*self
        }
    }

    /// Index of the snapshot at `tau`, if any.
    pub fn find_time(&self, tau: f64) -> Option<usize> {
        self.times.iter().position(|t| (t - tau).abs() < 1e-9)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.nodes == other.nodes && (self.x_min - other.x_min).abs() < 1e-12 && (self.dx - other.dx).abs() < 1e-15
    }
}

/// Diagnostics recorded during a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepDiag {
    pub tau: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    /// `u(0, tau) - 1`.
    pub center_excess: f64,
    pub newton_iterations: usize,
    pub halvings: u32,
    pub upper_violation: Option<f64>,
    pub lower_violation: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvolveRun {
    pub config: EvolveConfig,
    pub params: Option<AncientParams>,
    pub certified: bool,
    pub field: SpaceTimeField,
    pub diagnostics: Vec<StepDiag>,
    pub sandwich: Option<SandwichReport>,
}

fn sample_in_gauge(source: &dyn PressureSource, x: f64, tau: f64, gauge: Gauge, model: &ModelParams) -> Result<f64> {
    let e = source.excess(x, tau)?;
    Ok(match gauge {
        Gauge::Conformal => crate::barriers::phi_from_excess(e, model),
        Gauge::Pressure => 1.0 + e,
    })
}

/// Samples `source` at `tau` on the grid of `config`.
pub fn sample_source(
    source: &dyn PressureSource,
    config: &EvolveConfig,
    model: &ModelParams,
    tau: f64,
) -> Result<Vec<f64>> {
    let n = config.nodes();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = -config.x_half + i as f64 * config.dx;
            sample_in_gauge(source, x, tau, config.gauge, model)
        })
        .collect()
}

/// The stepped variable: `ln phi` in conformal gauge, `u` in pressure gauge.
fn state_from_excess(e: f64, gauge: Gauge, model: &ModelParams) -> f64 {
    match gauge {
        Gauge::Conformal => -e.ln_1p() / model.pm1,
        Gauge::Pressure => 1.0 + e,
    }
}

fn field_from_state(state: &[f64], gauge: Gauge) -> Vec<f64> {
    match gauge {
        Gauge::Conformal => state.iter().map(|w| w.exp()).collect(),
        Gauge::Pressure => state.to_vec(),
    }
}

fn center_excess(state: &[f64], gauge: Gauge, model: &ModelParams) -> f64 {
    let mid = state[state.len() / 2];
    match gauge {
        Gauge::Conformal => (-model.pm1 * mid).exp_m1(),
        Gauge::Pressure => mid - 1.0,
    }
}

/// Per-check callback returning `(upper, lower)` sandwich violations, if any.
pub type CheckFn<'a> = dyn Fn(f64, &[f64]) -> Result<Option<(f64, f64)>> + Sync + 'a;

/// Evolves from `source` at `-m` with Dirichlet data from `source` at `+-X`.
/// `check` is called on the check cadence and may return sandwich violations.
pub fn evolve_from_source(
    config: &EvolveConfig,
    model: &ModelParams,
    source: &dyn PressureSource,
    check: &CheckFn,
) -> Result<(SpaceTimeField, Vec<StepDiag>)> {
    config.validate()?;
    let gauge = config.gauge;
    let x_half = config.x_half;
    let boundary = |tau: f64| -> Result<(f64, f64)> {
        Ok((
            state_from_excess(source.excess(-x_half, tau)?, gauge, model),
            state_from_excess(source.excess(x_half, tau)?, gauge, model),
        ))
    };
    let mut stepper = Stepper::new(
        gauge,
        config.scheme,
        config.dx,
        *model,
        config.newton(),
        config.max_halvings,
        &boundary,
    );
    let steps = config.steps();
    let snap_every = config.cadence(config.snapshot_interval);
    let check_every = config.cadence(config.check_interval);
    let tau_at = |j: usize| -config.m + j as f64 * config.dtau;

    let mut field = SpaceTimeField {
        gauge,
        model: *model,
        x_min: -config.x_half,
        dx: config.dx,
        nodes: config.nodes(),
        times: Vec::new(),
        values: Vec::new(),
    };
    let mut diags = Vec::new();
    let mut current = (0..config.nodes())
        .into_par_iter()
        .map(|i| {
            let x = -config.x_half + i as f64 * config.dx;
            Ok(state_from_excess(source.excess(x, -config.m)?, gauge, model))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut record = |j: usize, state: &[f64], stats: StepStats, field: &mut SpaceTimeField| -> Result<()> {
        let tau = tau_at(j);
        let from_end = steps - j;
        let snap = j == 0 || from_end.is_multiple_of(snap_every);
        let checked = j == 0 || from_end.is_multiple_of(check_every);
        if !snap && !checked {
            return Ok(());
        }
        let values = field_from_state(state, gauge);
        if snap {
            field.times.push(tau);
            field.values.push(values.clone());
        }
        if checked {
            let violations = check(tau, &values)?;
            let (lo, hi) = values
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
            let (phi_min, phi_max) = match gauge {
                Gauge::Conformal => (lo, hi),
                Gauge::Pressure => (model.phi_from_pressure(hi), model.phi_from_pressure(lo)),
            };
            diags.push(StepDiag {
                tau,
                phi_min,
                phi_max,
                center_excess: center_excess(state, gauge, model),
                newton_iterations: stats.newton_iterations,
                halvings: stats.halvings,
                upper_violation: violations.map(|v| v.0),
                lower_violation: violations.map(|v| v.1),
            });
        }
        Ok(())
    };
    record(0, &current, StepStats::default(), &mut field)?;
    let mut worst = StepStats::default();
    for j in 1..=steps {
        let (next, stats) = stepper.advance(&current, tau_at(j - 1), config.dtau)?;
        worst.newton_iterations = worst.newton_iterations.max(stats.newton_iterations);
        worst.halvings = worst.halvings.max(stats.halvings);
        current = next;
        record(j, &current, worst, &mut field)?;
        if (steps - j).is_multiple_of(check_every) {
            worst = StepStats::default();
        }
    }
    Ok((field, diags))
}

/// Checks that `report` certifies `params` on the window of `config`.
pub fn check_certificate(
    report: &CertificationReport,
    params: &AncientParams,
    model: &ModelParams,
    config: &EvolveConfig,
) -> Result<()> {
    if report.verdict != Verdict::Pass {
        return Err(Error::Uncertified(format!(
            "certification verdict is {:?}",
            report.verdict
        )));
    }
    let r = &report.params;
    let same = r.lambda == params.lambda
        && r.lambda2 == params.lambda2
        && r.h == params.h
        && r.h2 == params.h2
        && r.k == params.k
        && r.q == params.q;
    if !same || report.n != model.n {
        return Err(Error::Uncertified(
            "certificate was issued for different parameters".into(),
        ));
    }
    if config.tau_end > report.cert_box.tau_max + 1e-12 {
        return Err(Error::Uncertified(format!(
            "tau_end = {} is past the certified horizon {}",
            config.tau_end, report.cert_box.tau_max
        )));
    }
    if -config.m < report.cert_box.tau_min - 1e-12 {
        return Err(Error::Uncertified(format!(
            "start time {} is before the certified window [{}, {}]",
            -config.m, report.cert_box.tau_min, report.cert_box.tau_max
        )));
    }
    Ok(())
}

/// Initial field `w+(., -m)` for certified parameters.
pub fn initialize(config: &EvolveConfig, barriers: &Barriers, report: &CertificationReport) -> Result<SpaceTimeField> {
    config.validate()?;
    check_certificate(report, &barriers.params, &barriers.model, config)?;
    let values = sample_source(barriers, config, &barriers.model, -config.m)?;
    Ok(SpaceTimeField {
        gauge: config.gauge,
        model: barriers.model,
        x_min: -config.x_half,
        dx: config.dx,
        nodes: config.nodes(),
        times: vec![-config.m],
        values: vec![values],
    })
}

fn run_between_barriers(
    config: &EvolveConfig,
    barriers: &Barriers,
    calibration: &SandwichCalibration,
    certified: bool,
) -> Result<EvolveRun> {
    config.validate()?;
    if !calibration.matches(config) {
        return Err(Error::Config(
            "sandwich calibration was measured on a different discretization or window".into(),
        ));
    }
    let model = barriers.model;
    let tol = calibration.tol_sand;
    let xs: Vec<f64> = (0..config.nodes())
        .map(|i| -config.x_half + i as f64 * config.dx)
        .collect();
    let check = |tau: f64, values: &[f64]| -> Result<Option<(f64, f64)>> {
        let s = analysis::sandwich_sample(barriers, &xs, values, config.gauge, tau)?;
        Ok(Some((s.upper_violation, s.lower_violation)))
    };
    let (field, diagnostics) = evolve_from_source(config, &model, barriers, &check)?;
    let sandwich = analysis::sandwich_from_diagnostics(&diagnostics, tol);
    Ok(EvolveRun {
        config: *config,
        params: Some(barriers.params),
        certified,
        field,
        diagnostics,
        sandwich: Some(sandwich),
    })
}

/// Evolves `u_m` between the barriers; requires a passing certificate.
pub fn evolve(
    config: &EvolveConfig,
    barriers: &Barriers,
    report: &CertificationReport,
    calibration: &SandwichCalibration,
) -> Result<EvolveRun> {
    config.validate()?;
    check_certificate(report, &barriers.params, &barriers.model, config)?;
    run_between_barriers(config, barriers, calibration, true)
}

/// Evolves data sampled from an exact solution with its own boundary values.
/// Exact solutions need no barrier certificate, so the run counts as
/// certified for the curvature monitor.
pub fn evolve_exact(config: &EvolveConfig, model: &ModelParams, source: &dyn PressureSource) -> Result<EvolveRun> {
    let none = |_: f64, _: &[f64]| -> Result<Option<(f64, f64)>> { Ok(None) };
    let (field, diagnostics) = evolve_from_source(config, model, source, &none)?;
    Ok(EvolveRun {
        config: *config,
        params: None,
        certified: true,
        field,
        diagnostics,
        sandwich: None,
    })
}

/// Same as [`evolve`] without a certificate, for control runs such as `q = 0`.
/// The result is marked uncertified.
pub fn evolve_uncertified(
    config: &EvolveConfig,
    barriers: &Barriers,
    calibration: &SandwichCalibration,
) -> Result<EvolveRun> {
    run_between_barriers(config, barriers, calibration, false)
}
