//! One implicit time step in either gauge, solved by Newton's method with a
//! tridiagonal Jacobian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::tridiag::solve_in_place;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    /// `phi`, solving `(phi^p)_tau = phi_xx + phi^p - phi`.
    Conformal,
    /// `u = phi^{-(p-1)}`, solving `p u_tau = u u_xx - p/(p-1) u_x^2 + (p-1)(u^2 - u)`.
    Pressure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    ImplicitEuler,
    /// Richardson extrapolation of one full and two half implicit Euler steps.
    ExtrapolatedEuler,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
}

/// Scratch buffers reused across steps.
#[derive(Debug, Default)]
pub struct Workspace {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    scratch: Vec<f64>,
}

/// Denominator of the conformal-gauge Laplacian, `2(cosh dx - 1)`, which
/// makes the three-point stencil exact on `e^{+-x}`.
pub fn fitted_denominator(dx: f64) -> f64 {
    2.0 * (dx.cosh() - 1.0)
}

/// Outcome of one Newton solve.
#[derive(Debug, Clone, Copy)]
pub struct NewtonOutcome {
    pub iterations: usize,
    pub last_update: f64,
}

/// Values of `phi - 1` and `phi^p - 1` (or `phi` and `phi^p`) from `w = ln phi`,
/// in whichever form keeps full precision: deviations from 1 where
/// `phi >= 1/2`, the values themselves in the decaying tails.
#[inline]
fn log_terms(w: f64, p: f64) -> (f64, f64) {
    if w > -std::f64::consts::LN_2 {
        (w.exp_m1(), (p * w).exp_m1())
    } else {
        (w.exp(), (p * w).exp())
    }
}

#[inline]
fn is_bulk(w: f64) -> bool {
    w > -std::f64::consts::LN_2
}

/// Implicit Euler step in conformal gauge on the log variable `w = ln phi`.
/// `next` holds the initial guess with the new boundary values in its
/// first and last entries.
pub fn implicit_euler_conformal(
    prev: &[f64],
    next: &mut [f64],
    dtau: f64,
    dx: f64,
    model: &ModelParams,
    newton: &NewtonSettings,
    ws: &mut Workspace,
) -> std::result::Result<NewtonOutcome, f64> {
    let n = prev.len();
    let inner = n - 2;
    let den = fitted_denominator(dx);
    let p = model.p;
    for buf in [&mut ws.lower, &mut ws.diag, &mut ws.upper, &mut ws.rhs] {
        buf.clear();
        buf.resize(inner, 0.0);
    }
    let mut last = f64::INFINITY;
    for iter in 1..=newton.max_iter {
        for i in 1..n - 1 {
            let w = next[i];
            let (a, b) = log_terms(w, p);
            // time term phi^p - phi_old^p in the precision of node i
            let old = if is_bulk(w) {
                (p * prev[i]).exp_m1()
            } else {
                (p * prev[i]).exp()
            };
            // all three stencil values in the same form
            let lap = if is_bulk(next[i - 1].max(w).max(next[i + 1])) {
                (next[i - 1].exp_m1() - 2.0 * w.exp_m1() + next[i + 1].exp_m1()) / den
            } else {
                (next[i - 1].exp() - 2.0 * w.exp() + next[i + 1].exp()) / den
            };
            let g = (b - old) - dtau * (lap + b - a);
            let (phi, phi_p) = (w.exp(), (p * w).exp());
            ws.diag[i - 1] = p * phi_p * (1.0 - dtau) + dtau * phi * (2.0 / den + 1.0);
            ws.lower[i - 1] = -dtau * next[i - 1].exp() / den;
            ws.upper[i - 1] = -dtau * next[i + 1].exp() / den;
            ws.rhs[i - 1] = -g;
        }
        solve_in_place(&ws.lower, &ws.diag, &ws.upper, &mut ws.rhs, &mut ws.scratch);
        let mut worst: f64 = 0.0;
        for i in 1..n - 1 {
            let d = ws.rhs[i - 1];
            if !d.is_finite() {
                return Err(f64::INFINITY);
            }
            worst = worst.max(d.abs());
            next[i] += d;
        }
        last = worst;
        if worst < newton.tol {
            return Ok(NewtonOutcome {
                iterations: iter,
                last_update: worst,
            });
        }
    }
    Err(last)
}

/// Implicit Euler step in pressure gauge with the standard three-point stencil.
pub fn implicit_euler_pressure(
    prev: &[f64],
    next: &mut [f64],
    dtau: f64,
    dx: f64,
    model: &ModelParams,
    newton: &NewtonSettings,
    ws: &mut Workspace,
) -> std::result::Result<NewtonOutcome, f64> {
    let n = prev.len();
    let inner = n - 2;
    let (p, pm1) = (model.p, model.pm1);
    let c = p / pm1;
    let dx2 = dx * dx;
    for buf in [&mut ws.lower, &mut ws.diag, &mut ws.upper, &mut ws.rhs] {
        buf.clear();
        buf.resize(inner, 0.0);
    }
    let mut last = f64::INFINITY;
    for iter in 1..=newton.max_iter {
        for i in 1..n - 1 {
            let u = next[i];
            let d2 = (next[i - 1] - 2.0 * u + next[i + 1]) / dx2;
            let d1 = (next[i + 1] - next[i - 1]) / (2.0 * dx);
            let f = u * d2 - c * d1 * d1 + pm1 * (u * u - u);
            let g = p * (u - prev[i]) / dtau - f;
            ws.diag[i - 1] = p / dtau - (d2 - 2.0 * u / dx2 + pm1 * (2.0 * u - 1.0));
            ws.lower[i - 1] = -(u / dx2 + c * d1 / dx);
            ws.upper[i - 1] = -(u / dx2 - c * d1 / dx);
            ws.rhs[i - 1] = -g;
        }
        solve_in_place(&ws.lower, &ws.diag, &ws.upper, &mut ws.rhs, &mut ws.scratch);
        let mut worst: f64 = 0.0;
        for i in 1..n - 1 {
            let updated = next[i] + ws.rhs[i - 1];
            if !(updated > 0.0) || !updated.is_finite() {
                return Err(f64::INFINITY);
            }
            worst = worst.max((ws.rhs[i - 1] / next[i]).abs());
            next[i] = updated;
        }
        last = worst;
        if worst < newton.tol {
            return Ok(NewtonOutcome {
                iterations: iter,
                last_update: worst,
            });
        }
    }
    Err(last)
}

/// Stepper state shared by the evolution driver.
pub struct Stepper<'a> {
    pub gauge: Gauge,
    pub scheme: TimeScheme,
    pub dx: f64,
    pub model: ModelParams,
    pub newton: NewtonSettings,
    pub max_halvings: u32,
    /// Boundary values `(left, right)` of the stepped variable (`ln phi` or `u`).
    pub boundary: &'a (dyn Fn(f64) -> Result<(f64, f64)> + Sync),
    ws: Workspace,
}

/// Statistics of one macro step.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub newton_iterations: usize,
    pub halvings: u32,
}

impl<'a> Stepper<'a> {
    pub fn new(
        gauge: Gauge,
        scheme: TimeScheme,
        dx: f64,
        model: ModelParams,
        newton: NewtonSettings,
        max_halvings: u32,
        boundary: &'a (dyn Fn(f64) -> Result<(f64, f64)> + Sync),
    ) -> Self {
        Self {
            gauge,
            scheme,
            dx,
            model,
            newton,
            max_halvings,
            boundary,
            ws: Workspace::default(),
        }
    }

    fn single(&mut self, prev: &[f64], tau: f64, dtau: f64) -> Result<std::result::Result<(Vec<f64>, usize), f64>> {
        let (left, right) = (self.boundary)(tau + dtau)?;
        let mut next = prev.to_vec();
        let last = next.len() - 1;
        next[0] = left;
        next[last] = right;
        let out = match self.gauge {
            Gauge::Conformal => {
                implicit_euler_conformal(prev, &mut next, dtau, self.dx, &self.model, &self.newton, &mut self.ws)
            }
            Gauge::Pressure => {
                implicit_euler_pressure(prev, &mut next, dtau, self.dx, &self.model, &self.newton, &mut self.ws)
            }
        };
        Ok(out.map(|o| (next, o.iterations)))
    }

    /// Implicit Euler over `dtau`, splitting into halves on Newton failure.
    fn euler(&mut self, prev: &[f64], tau: f64, dtau: f64, depth: u32, stats: &mut StepStats) -> Result<Vec<f64>> {
        match self.single(prev, tau, dtau)? {
            Ok((next, iters)) => {
                stats.newton_iterations = stats.newton_iterations.max(iters);
                Ok(next)
            }
            Err(residual) => {
                if depth >= self.max_halvings {
                    return Err(Error::NewtonDivergence {
                        tau,
                        halvings: depth as usize,
                        residual,
                    });
                }
                stats.halvings = stats.halvings.max(depth + 1);
                let mid = self.euler(prev, tau, 0.5 * dtau, depth + 1, stats)?;
                self.euler(&mid, tau + 0.5 * dtau, 0.5 * dtau, depth + 1, stats)
            }
        }
    }

    /// Advances `prev` from `tau` to `tau + dtau`.
    pub fn advance(&mut self, prev: &[f64], tau: f64, dtau: f64) -> Result<(Vec<f64>, StepStats)> {
        let mut stats = StepStats::default();
        let next = match self.scheme {
            TimeScheme::ImplicitEuler => self.euler(prev, tau, dtau, 0, &mut stats)?,
            TimeScheme::ExtrapolatedEuler => {
                let full = self.euler(prev, tau, dtau, 0, &mut stats)?;
                let mid = self.euler(prev, tau, 0.5 * dtau, 0, &mut stats)?;
                let half = self.euler(&mid, tau + 0.5 * dtau, 0.5 * dtau, 0, &mut stats)?;
                let conformal = self.gauge == Gauge::Conformal;
                half.iter()
                    .zip(&full)
                    .map(|(h, f)| {
                        let e = 2.0 * h - f;
                        // the log variable has no sign constraint
                        if conformal || e > 0.0 {
                            e
                        } else {
                            *h
                        }
                    })
                    .collect()
            }
        };
        Ok((next, stats))
    }
}
