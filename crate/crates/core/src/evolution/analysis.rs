use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    evolve_from_source, CylinderSolution, EvolveConfig, Gauge, PressureSource, SpaceTimeField, StepDiag,
    TravelingWaveSolution,
};
use crate::barriers::{phi_from_excess, Barriers};
use crate::error::{Error, Result};

/// Factor applied to the largest observed exact-solution tracking error.
pub const CALIBRATION_SAFETY: f64 = 2.0;

/// Constant `C` of `tol_sand = C (dtau + dx^2)`, measured by evolving the
/// exact solutions that make up the barriers (both traveling waves and the
/// cylinder) on the configuration of the sandwich run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichCalibration {
    pub config: EvolveConfig,
    pub wave_error: f64,
    pub reflected_error: f64,
    pub cylinder_error: f64,
    pub safety: f64,
    pub constant: f64,
    pub tol_sand: f64,
}

impl SandwichCalibration {
    /// Whether the calibration was measured on the same discretization and
    /// window as `config`.
    pub fn matches(&self, config: &EvolveConfig) -> bool {
        let c = &self.config;
        c.m == config.m
            && c.tau_end == config.tau_end
            && c.x_half == config.x_half
            && c.dx == config.dx
            && c.dtau == config.dtau
            && c.scheme == config.scheme
            && c.gauge == config.gauge
    }
}

pub fn sandwich_tolerance(config: &EvolveConfig, constant: f64) -> f64 {
    constant * (config.dtau + config.dx * config.dx)
}

/// Runs the three exact-solution tracking studies for the barriers `b` on
/// `config` and derives `tol_sand`.
pub fn calibrate_sandwich(config: &EvolveConfig, b: &Barriers) -> Result<SandwichCalibration> {
    config.validate()?;
    let mut cfg = *config;
    cfg.snapshot_interval = config.check_interval;
    let model = b.model;
    let params = b.params;
    let wave = TravelingWaveSolution {
        profile: b.left.clone(),
        h: params.h,
        reflected: false,
    };
    let reflected = TravelingWaveSolution {
        profile: b.right.clone(),
        h: params.h2,
        reflected: true,
    };
    let cylinder = CylinderSolution { k: params.k, model };
    let sources: [&dyn PressureSource; 3] = [&wave, &reflected, &cylinder];
    let none = |_: f64, _: &[f64]| -> Result<Option<(f64, f64)>> { Ok(None) };
    let errors = sources
        .par_iter()
        .map(|src| {
            let (field, _) = evolve_from_source(&cfg, &model, *src, &none)?;
            tracking_error(&field, *src)
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    let constant = CALIBRATION_SAFETY * worst / (config.dtau + config.dx * config.dx);
    Ok(SandwichCalibration {
        config: *config,
        wave_error: errors[0],
        reflected_error: errors[1],
        cylinder_error: errors[2],
        safety: CALIBRATION_SAFETY,
        constant,
        tol_sand: sandwich_tolerance(config, constant),
    })
}

/// Relative violations of `w- <= u <= w+` at one time, measured on the
/// conformal factor: `max (phi(w+) - phi)_+ / phi(w+)` and
/// `max (phi - phi(w-))_+ / phi(w-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichSample {
    pub tau: f64,
    pub upper_violation: f64,
    pub lower_violation: f64,
    pub upper_x: f64,
    pub lower_x: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub tol_sand: f64,
    pub max_upper_violation: f64,
    pub max_lower_violation: f64,
    pub worst_upper_tau: f64,
    pub worst_lower_tau: f64,
    pub checked_times: usize,
    pub pass: bool,
}

pub(super) fn sandwich_sample(
    b: &Barriers,
    xs: &[f64],
    values: &[f64],
    gauge: Gauge,
    tau: f64,
) -> Result<SandwichSample> {
    let model = b.model;
    let per_node: Vec<(f64, f64)> = xs
        .par_iter()
        .zip(values.par_iter())
        .map(|(&x, &v)| {
            let e = b.eval(x, tau)?;
            let phi = match gauge {
                Gauge::Conformal => v,
                Gauge::Pressure => model.phi_from_pressure(v),
            };
            let phi_plus = phi_from_excess(e.wplus_excess, &model);
            let phi_minus = phi_from_excess(e.wminus_excess, &model);
            Ok((
                ((phi_plus - phi) / phi_plus).max(0.0),
                ((phi - phi_minus) / phi_minus).max(0.0),
            ))
        })
        .collect::<Result<_>>()?;
    let mut s = SandwichSample {
        tau,
        upper_violation: 0.0,
        lower_violation: 0.0,
        upper_x: f64::NAN,
        lower_x: f64::NAN,
    };
    for (&x, &(up, lo)) in xs.iter().zip(&per_node) {
        if up > s.upper_violation {
            s.upper_violation = up;
            s.upper_x = x;
        }
        if lo > s.lower_violation {
            s.lower_violation = lo;
            s.lower_x = x;
        }
    }
    Ok(s)
}

fn summarize(samples: impl Iterator<Item = (f64, f64, f64)>, tol: f64) -> SandwichReport {
    let mut r = SandwichReport {
        tol_sand: tol,
        max_upper_violation: 0.0,
        max_lower_violation: 0.0,
        worst_upper_tau: f64::NAN,
        worst_lower_tau: f64::NAN,
        checked_times: 0,
        pass: true,
    };
    for (tau, up, lo) in samples {
        r.checked_times += 1;
        if up >= r.max_upper_violation {
            r.max_upper_violation = up;
            r.worst_upper_tau = tau;
        }
        if lo >= r.max_lower_violation {
            r.max_lower_violation = lo;
            r.worst_lower_tau = tau;
        }
    }
    r.pass = r.max_upper_violation <= tol && r.max_lower_violation <= tol;
    r
}

pub(super) fn sandwich_from_diagnostics(diags: &[StepDiag], tol: f64) -> SandwichReport {
    summarize(
        diags
            .iter()
            .filter_map(|d| Some((d.tau, d.upper_violation?, d.lower_violation?))),
        tol,
    )
}

/// Sandwich margins on every snapshot of `field`.
pub fn sandwich_check(field: &SpaceTimeField, b: &Barriers, tol: f64) -> Result<(SandwichReport, Vec<SandwichSample>)> {
    let xs = field.xs();
    let samples = field
        .times
        .iter()
        .zip(&field.values)
        .map(|(&tau, v)| sandwich_sample(b, &xs, v, field.gauge, tau))
        .collect::<Result<Vec<_>>>()?;
    let report = summarize(
        samples.iter().map(|s| (s.tau, s.upper_violation, s.lower_violation)),
        tol,
    );
    Ok((report, samples))
}

/// Largest relative error in `phi` against an exact solution over all snapshots.
pub fn tracking_error(field: &SpaceTimeField, exact: &dyn PressureSource) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for j in 0..field.times.len() {
        let tau = field.times[j];
        let phi = field.phi(j);
        for (i, f) in phi.iter().enumerate() {
            let e = phi_from_excess(exact.excess(field.x(i), tau)?, &field.model);
            worst = worst.max((f / e - 1.0).abs());
        }
    }
    Ok(worst)
}

/// Pairwise sup-distances of pressure fields started at different `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub start_times: Vec<f64>,
    pub window_x: f64,
    pub common_times: Vec<f64>,
    /// `D_{i,i+1}` for consecutive runs, ordered by start time from latest.
    pub consecutive: Vec<f64>,
    /// `D_12 > D_23 > ...`
    pub contracting: bool,
}

/// Sup of `|u_i - u_j|` over `[-x0, x0]` and all snapshot times shared by
/// the runs. Runs must share the spatial grid.
pub fn cauchy_in_m(runs: &[&SpaceTimeField], x0: f64) -> Result<CauchyReport> {
    if runs.len() < 2 {
        return Err(Error::Config("need at least two runs to compare".into()));
    }
    let base = runs[0];
    for r in runs {
        if !r.same_grid(base) {
            return Err(Error::Config("runs do not share the spatial grid".into()));
        }
    }
    let x_max = base.x(base.nodes - 1);
    if !(x0 > 0.0 && x0 < x_max) {
        return Err(Error::Config(format!(
            "window half-width {x0} must lie inside the domain half-width {x_max}"
        )));
    }
    let mut order: Vec<&SpaceTimeField> = runs.to_vec();
    // latest start (smallest m) first
    order.sort_by(|a, b| b.times[0].total_cmp(&a.times[0]));
    let start = order[0].times[0];
    let common: Vec<f64> = order[0]
        .times
        .iter()
        .copied()
        .filter(|&t| t >= start - 1e-9 && order.iter().all(|r| r.find_time(t).is_some()))
        .collect();
    if common.is_empty() {
        return Err(Error::Config("runs share no snapshot times".into()));
    }
    let idx: Vec<usize> = (0..base.nodes).filter(|&i| base.x(i).abs() <= x0 + 1e-12).collect();
    let consecutive = order
        .windows(2)
        .map(|pair| {
            let mut d: f64 = 0.0;
            for &t in &common {
                let (a, b) = (
                    pair[0].pressure(pair[0].find_time(t).unwrap()),
                    pair[1].pressure(pair[1].find_time(t).unwrap()),
                );
                for &i in &idx {
                    d = d.max((a[i] - b[i]).abs());
                }
            }
            d
        })
        .collect::<Vec<f64>>();
    let contracting = consecutive.windows(2).all(|w| w[1] < w[0]);
    Ok(CauchyReport {
        start_times: order.iter().map(|r| r.times[0]).collect(),
        window_x: x0,
        common_times: common,
        consecutive,
        contracting,
    })
}
