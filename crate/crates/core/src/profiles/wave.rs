//! Traveling-wave solitons `psi'' + lambda (psi^p)' + psi^p - psi = 0` by
//! shooting along the unstable manifold of the origin.
//!
//! The integration runs in two phases. Left of the point where `psi = 1/2`
//! the state is `(psi, psi')`; right of it the state is `(eta, eta')` with
//! `eta = 1 - psi`, so that the exponentially small tail `1 - psi` keeps full
//! relative precision all the way to the end of the grid.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{barenblatt_constant, gamma_exponent};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ode::{Control, Dopri5};

/// Amplitude of the linearized seed `psi = psi' = eps` at the left end of the grid.
pub const SEED_AMPLITUDE: f64 = 1e-8;

const SHOOT_RTOL: f64 = 1e-13;
const CENTER_TOL: f64 = 1e-10;
const PLATEAU_FLATNESS: f64 = 1e-4;
const PLATEAU_FRACTION: f64 = 0.25;

/// Uniform grid in the wave variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveGrid {
    pub min: f64,
    pub max: f64,
    pub dy: f64,
}

impl WaveGrid {
    /// Snaps `max` to the last node of the uniform grid.
    pub fn new(min: f64, max: f64, dy: f64) -> Result<Self> {
        if !(dy > 0.0) || !(max > min) {
            return Err(Error::Config(format!(
                "invalid wave grid [{min}, {max}] with dy = {dy}"
            )));
        }
        let cells = ((max - min) / dy).round().max(1.0);
        Ok(Self {
            min,
            max: min + cells * dy,
            dy,
        })
    }

    /// Default grid: `[-30, max(60, 30/gamma + 10)]` at spacing 0.01.
    pub fn for_speed(lambda: f64, model: &ModelParams) -> Result<Self> {
        let gamma = gamma_exponent(lambda, model)?.gamma;
        let tail = if lambda == 1.0 {
            60.0
        } else {
            (30.0 / gamma + 10.0).ceil().max(60.0)
        };
        Self::new(-30.0, tail, 0.01)
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.dy).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, i: usize) -> f64 {
        self.min + i as f64 * self.dy
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.node(i)).collect()
    }
}

/// Value and first two derivatives of `psi` at a point, with `eta = 1 - psi`
/// carried separately for precision near the cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveJet {
    pub psi: f64,
    pub eta: f64,
    pub dpsi: f64,
    pub ddpsi: f64,
}

/// `(v - 1, v', v'')` for a pressure profile.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PressureJet1 {
    pub excess: f64,
    pub d1: f64,
    pub d2: f64,
}

impl PressureJet1 {
    pub fn value(&self) -> f64 {
        1.0 + self.excess
    }
}

/// `psi^p - psi`, evaluated through `eta` on the cylinder side.
fn reaction(psi: f64, eta: f64, model: &ModelParams) -> f64 {
    if psi < 0.5 {
        psi.powf(model.p) - psi
    } else {
        (1.0 - eta) * (model.pm1 * (-eta).ln_1p()).exp_m1()
    }
}

impl WaveJet {
    /// Converts to the pressure `v = psi^{-(p-1)}`.
    pub fn pressure(&self, model: &ModelParams) -> PressureJet1 {
        let lnpsi = if self.psi < 0.5 {
            self.psi.ln()
        } else {
            (-self.eta).ln_1p()
        };
        let excess = if self.psi < 0.5 {
            (-model.pm1 * lnpsi).exp() - 1.0
        } else {
            (-model.pm1 * lnpsi).exp_m1()
        };
        let psi_mp = (-model.p * lnpsi).exp();
        PressureJet1 {
            excess,
            d1: -model.pm1 * psi_mp * self.dpsi,
            d2: model.pm1 * psi_mp * (model.p * self.dpsi * self.dpsi / self.psi - self.ddpsi),
        }
    }

    /// The three terms `[psi'', lambda p psi^{p-1} psi', psi^p - psi]` of the wave ODE.
    pub fn ode_terms(&self, lambda: f64, model: &ModelParams) -> [f64; 3] {
        [
            self.ddpsi,
            lambda * model.p * self.psi.powf(model.pm1) * self.dpsi,
            reaction(self.psi, self.eta, model),
        ]
    }

    /// Residual of the wave ODE divided by the sum of absolute term sizes.
    pub fn relative_residual(&self, lambda: f64, model: &ModelParams) -> f64 {
        let t = self.ode_terms(lambda, model);
        let scale = t.iter().map(|x| x.abs()).sum::<f64>();
        if scale == 0.0 {
            0.0
        } else {
            (t[0] + t[1] + t[2]).abs() / scale
        }
    }
}

/// Quintic Hermite interpolation on one cell; returns `(f, f', f'')`.
#[allow(clippy::too_many_arguments)]
fn quintic(t: f64, h: f64, f0: f64, d0: f64, s0: f64, f1: f64, d1: f64, s1: f64) -> (f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    let h3 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    let h5 = 0.5 * (t3 - 2.0 * t4 + t5);

    let g0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    let g1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    let g2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    let g3 = -g0;
    let g4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    let g5 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);

    let k0 = -60.0 * t + 180.0 * t2 - 120.0 * t3;
    let k1 = -36.0 * t + 96.0 * t2 - 60.0 * t3;
    let k2 = 0.5 * (2.0 - 18.0 * t + 36.0 * t2 - 20.0 * t3);
    let k3 = -k0;
    let k4 = -24.0 * t + 84.0 * t2 - 60.0 * t3;
    let k5 = 0.5 * (6.0 * t - 24.0 * t2 + 20.0 * t3);

    let (hd0, hd1) = (h * d0, h * d1);
    let (hs0, hs1) = (h * h * s0, h * h * s1);
    let f = f0 * h0 + hd0 * h1 + hs0 * h2 + f1 * h3 + hd1 * h4 + hs1 * h5;
    let df = (f0 * g0 + hd0 * g1 + hs0 * g2 + f1 * g3 + hd1 * g4 + hs1 * g5) / h;
    let ddf = (f0 * k0 + hd0 * k1 + hs0 * k2 + f1 * k3 + hd1 * k4 + hs1 * k5) / (h * h);
    (f, df, ddf)
}

/// A solved traveling-wave profile, normalized by `psi(0) = 1/2`.
///
/// Evaluation inside the grid is quintic Hermite on `(psi, psi', psi'')`
/// (the second derivative at the nodes comes from the ODE); outside the grid
/// the analytic tails `A e^y` and `1 - C e^{-gamma y}` take over.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub lambda: f64,
    pub model: ModelParams,
    /// Tail exponent actually realized by the profile: the smaller root for
    /// `lambda > 1`, `p - 1` for the Barenblatt wave.
    pub gamma: f64,
    /// `C` in `1 - psi ~ C e^{-gamma y}`.
    pub c_decay: f64,
    /// `A` in `psi ~ A e^y` as `y -> -inf`.
    pub left_amplitude: f64,
    pub closed_form: bool,
    pub grid: WaveGrid,
    pub psi: Vec<f64>,
    pub eta: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub ddpsi: Vec<f64>,
    pub v: Vec<f64>,
    /// `v - 1` at the nodes; `v` itself rounds to 1 deep in the right tail.
    pub v_excess: Vec<f64>,
    /// Largest relative ODE residual of the interpolant at cell midpoints.
    pub interp_error: f64,
    /// `|psi(0) - 1/2|` after re-centering.
    pub center_error: f64,
    pub seed: f64,
    pub steps: usize,
}

impl WaveProfile {
    /// Solves for the wave of speed `lambda`; `lambda = 1` returns the
    /// Barenblatt closed form.
    pub fn solve(lambda: f64, model: &ModelParams, grid: WaveGrid) -> Result<Self> {
        if lambda == 1.0 {
            return Ok(Self::barenblatt(model, grid));
        }
        let exponent = gamma_exponent(lambda, model)?;
        let gamma = exponent.gamma;
        if grid.min > -20.0 {
            return Err(Error::Config(format!(
                "wave grid must start at or below -20, got {}",
                grid.min
            )));
        }
        if grid.max < 30.0 / gamma {
            return Err(Error::Config(format!(
                "wave grid must extend to 30/gamma = {:.3}, got {}",
                30.0 / gamma,
                grid.max
            )));
        }
        let nodes = grid.nodes();
        let m = *model;
        let lp = lambda * m.p;

        // phase A: (psi, psi') from the seed until psi first reaches 1/2
        let left_rhs = move |_: f64, s: &[f64; 2]| -> [f64; 2] {
            let psi = s[0];
            let psi_pm1 = psi.powf(m.pm1);
            [s[1], -lp * psi_pm1 * s[1] - psi * psi_pm1 + psi]
        };
        let solver = Dopri5 {
            rtol: SHOOT_RTOL,
            atol: 1e-300,
            h_max: grid.dy,
            ..Dopri5::default()
        };

        let mut seed = SEED_AMPLITUDE;
        let mut steps = 0;
        let mut left = None;
        for _ in 0..8 {
            let mut failure: Option<(f64, f64, f64, &'static str)> = None;
            let sol = solver.integrate(left_rhs, grid.min, [seed, seed], &nodes[1..], |y, s| {
                if !(s[0] > 0.0) || !(s[0] < 1.0) {
                    failure = Some((y, s[0], s[1], "psi left (0, 1) before reaching 1/2"));
                    Control::Stop
                } else if !(s[1] > 0.0) {
                    failure = Some((y, s[0], s[1], "psi stopped increasing"));
                    Control::Stop
                } else if s[0] >= 0.5 {
                    Control::Stop
                } else {
                    Control::Continue
                }
            })?;
            steps += sol.steps;
            if let Some((y, psi, dpsi, reason)) = failure {
                return Err(Error::Shooting {
                    reason: reason.into(),
                    y,
                    psi,
                    dpsi,
                    seed,
                    steps,
                });
            }
            if !sol.stopped {
                let (y, s) = (*sol.t.last().unwrap(), *sol.y.last().unwrap());
                return Err(Error::Shooting {
                    reason: "psi never reached 1/2 on the grid".into(),
                    y,
                    psi: s[0],
                    dpsi: s[1],
                    seed,
                    steps,
                });
            }
            let mut psi = vec![seed];
            let mut dpsi = vec![seed];
            for s in &sol.y {
                psi.push(s[0]);
                dpsi.push(s[1]);
            }
            let ddpsi: Vec<f64> = psi
                .iter()
                .zip(&dpsi)
                .map(|(&p, &d)| left_rhs(0.0, &[p, d])[1])
                .collect();
            let crossing = locate_half(&grid, &psi, &dpsi, &ddpsi);
            let done = crossing.abs() < CENTER_TOL;
            left = Some((psi, dpsi));
            if done {
                break;
            }
            // translation invariance: psi_new(y) = psi_old(y + y*)
            seed *= crossing.exp();
        }
        let (mut psi, mut dpsi) = left.expect("at least one shooting pass");

        // phase B: (eta, eta') from the first node with psi >= 1/2
        let start = psi.len() - 1;
        let right_rhs = move |_: f64, s: &[f64; 2]| -> [f64; 2] {
            let eta = s[0];
            let psi = 1.0 - eta;
            [s[1], -lp * psi.powf(m.pm1) * s[1] + reaction(psi, eta, &m)]
        };
        let mut eta: Vec<f64> = psi.iter().map(|p| 1.0 - p).collect();
        let mut failure: Option<(f64, f64, f64, &'static str)> = None;
        let y0 = nodes[start];
        let state0 = [1.0 - psi[start], -dpsi[start]];
        let right_solver = Dopri5 {
            atol: 1e-300,
            ..solver.clone()
        };
        let sol = right_solver.integrate(right_rhs, y0, state0, &nodes[start + 1..], |y, s| {
            if !(s[0] > 0.0) || !(s[0] < 1.0) {
                failure = Some((y, 1.0 - s[0], -s[1], "psi left (0, 1) past the center"));
                Control::Stop
            } else if !(s[1] < 0.0) {
                failure = Some((y, 1.0 - s[0], -s[1], "psi stopped increasing"));
                Control::Stop
            } else {
                Control::Continue
            }
        })?;
        steps += sol.steps;
        if let Some((y, p, d, reason)) = failure {
            return Err(Error::Shooting {
                reason: reason.into(),
                y,
                psi: p,
                dpsi: d,
                seed,
                steps,
            });
        }
        for s in &sol.y {
            eta.push(s[0]);
            psi.push(1.0 - s[0]);
            dpsi.push(-s[1]);
        }
        let ddpsi: Vec<f64> = (0..psi.len())
            .map(|i| {
                if i <= start {
                    left_rhs(0.0, &[psi[i], dpsi[i]])[1]
                } else {
                    -right_rhs(0.0, &[eta[i], -dpsi[i]])[1]
                }
            })
            .collect();

        // right tail plateau of (1 - psi) e^{gamma y}
        let n = nodes.len();
        let window = ((n as f64) * PLATEAU_FRACTION).ceil() as usize;
        let mut worst: f64 = 0.0;
        for i in n - window..n {
            let slope = gamma - dpsi[i] / eta[i];
            worst = worst.max(slope.abs());
        }
        if !(worst < PLATEAU_FLATNESS) {
            return Err(Error::AsymptoticsFit(format!(
                "(1 - psi) e^(gamma y) is not flat over the last {:.0}% of the grid \
                 (max log-slope {worst:.3e} >= {PLATEAU_FLATNESS:e}); enlarge y_max beyond {}",
                100.0 * PLATEAU_FRACTION,
                grid.max
            )));
        }
        let c_decay = (eta[n - 1].ln() + gamma * nodes[n - 1]).exp();
        let left_amplitude = psi[0] * (-nodes[0]).exp();

        let mut profile = Self {
            lambda,
            model: m,
            gamma,
            c_decay,
            left_amplitude,
            closed_form: false,
            grid,
            psi,
            eta,
            dpsi,
            ddpsi,
            v: Vec::new(),
            v_excess: Vec::new(),
            interp_error: 0.0,
            center_error: 0.0,
            seed,
            steps,
        };
        profile.fill_pressure();
        profile.interp_error = profile.midpoint_residual();
        profile.center_error = (profile.eval(0.0).psi - 0.5).abs();
        Ok(profile)
    }

    /// Barenblatt wave sampled on `grid`; evaluation uses the closed form.
    pub fn barenblatt(model: &ModelParams, grid: WaveGrid) -> Self {
        let mut profile = Self {
            lambda: 1.0,
            model: *model,
            gamma: model.pm1,
            c_decay: barenblatt_constant(model) / model.pm1,
            left_amplitude: barenblatt_constant(model).powf(-1.0 / model.pm1),
            closed_form: true,
            grid,
            psi: Vec::new(),
            eta: Vec::new(),
            dpsi: Vec::new(),
            ddpsi: Vec::new(),
            v: Vec::new(),
            v_excess: Vec::new(),
            interp_error: 0.0,
            center_error: 0.0,
            seed: 0.0,
            steps: 0,
        };
        for y in grid.nodes() {
            let j = profile.eval(y);
            profile.psi.push(j.psi);
            profile.eta.push(j.eta);
            profile.dpsi.push(j.dpsi);
            profile.ddpsi.push(j.ddpsi);
        }
        profile.fill_pressure();
        profile.center_error = (profile.eval(0.0).psi - 0.5).abs();
        profile
    }

    fn fill_pressure(&mut self) {
        self.v_excess = (0..self.psi.len())
            .map(|i| self.node_jet(i).pressure(&self.model).excess)
            .collect();
        self.v = self.v_excess.iter().map(|e| 1.0 + e).collect();
    }

    /// Stored jet at node `i`.
    pub fn node_jet(&self, i: usize) -> WaveJet {
        WaveJet {
            psi: self.psi[i],
            eta: self.eta[i],
            dpsi: self.dpsi[i],
            ddpsi: self.ddpsi[i],
        }
    }

    fn barenblatt_jet(&self, y: f64) -> WaveJet {
        let m = &self.model;
        let e = barenblatt_constant(m) * (-m.pm1 * y).exp();
        let log1pe = e.ln_1p();
        let psi = (-log1pe / m.pm1).exp();
        let eta = -(-log1pe / m.pm1).exp_m1();
        let r = e / (1.0 + e);
        WaveJet {
            psi,
            eta,
            dpsi: psi * r,
            ddpsi: psi * r * (e - m.pm1) / (1.0 + e),
        }
    }

    /// `psi` and its derivatives at any `y`.
    pub fn eval(&self, y: f64) -> WaveJet {
        if self.closed_form {
            return self.barenblatt_jet(y);
        }
        let g = &self.grid;
        if y < g.min {
            let psi = self.left_amplitude * y.exp();
            return WaveJet {
                psi,
                eta: 1.0 - psi,
                dpsi: psi,
                ddpsi: psi,
            };
        }
        if y > g.max {
            let eta = self.c_decay * (-self.gamma * y).exp();
            return WaveJet {
                psi: 1.0 - eta,
                eta,
                dpsi: self.gamma * eta,
                ddpsi: -self.gamma * self.gamma * eta,
            };
        }
        let n = self.psi.len();
        let i = (((y - g.min) / g.dy).floor() as usize).min(n - 2);
        let t = (y - g.node(i)) / g.dy;
        if self.psi[i] < 0.5 {
            let (psi, dpsi, ddpsi) = quintic(
                t,
                g.dy,
                self.psi[i],
                self.dpsi[i],
                self.ddpsi[i],
                self.psi[i + 1],
                self.dpsi[i + 1],
                self.ddpsi[i + 1],
            );
            WaveJet {
                psi,
                eta: 1.0 - psi,
                dpsi,
                ddpsi,
            }
        } else {
            let (eta, deta, ddeta) = quintic(
                t,
                g.dy,
                self.eta[i],
                -self.dpsi[i],
                -self.ddpsi[i],
                self.eta[i + 1],
                -self.dpsi[i + 1],
                -self.ddpsi[i + 1],
            );
            WaveJet {
                psi: 1.0 - eta,
                eta,
                dpsi: -deta,
                ddpsi: -ddeta,
            }
        }
    }

    pub fn psi_at(&self, y: f64) -> f64 {
        self.eval(y).psi
    }

    /// Pressure jet `(v - 1, v', v'')` at `y`.
    pub fn pressure_jet(&self, y: f64) -> PressureJet1 {
        self.eval(y).pressure(&self.model)
    }

    pub fn pressure_at(&self, y: f64) -> f64 {
        1.0 + self.pressure_jet(y).excess
    }

    fn midpoint_residual(&self) -> f64 {
        let g = &self.grid;
        (0..self.psi.len() - 1)
            .map(|i| {
                self.eval(g.node(i) + 0.5 * g.dy)
                    .relative_residual(self.lambda, &self.model)
            })
            .fold(0.0, f64::max)
    }

    pub fn sidecar(&self) -> WaveSidecar {
        WaveSidecar {
            lambda: self.lambda,
            p: self.model.p,
            n: self.model.n,
            gamma: self.gamma,
            c: self.c_decay,
            left_amplitude: self.left_amplitude,
            closed_form: self.closed_form,
            ygrid: self.grid,
            interp_error: self.interp_error,
            center_error: self.center_error,
        }
    }

    /// Writes `<stem>.csv` (`y,psi,v`) and `<stem>.json`.
    pub fn write_files(&self, stem: &Path) -> Result<()> {
        let csv = stem.with_extension("csv");
        let mut w = std::io::BufWriter::new(std::fs::File::create(csv)?);
        writeln!(w, "y,psi,v")?;
        for (i, (psi, v)) in self.psi.iter().zip(&self.v).enumerate() {
            writeln!(w, "{},{:e},{:e}", self.grid.node(i), psi, v)?;
        }
        w.flush()?;
        let json = serde_json::to_string_pretty(&self.sidecar())?;
        std::fs::write(stem.with_extension("json"), json)?;
        Ok(())
    }
}

/// JSON companion of the profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveSidecar {
    pub lambda: f64,
    pub p: f64,
    pub n: u32,
    pub gamma: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub left_amplitude: f64,
    pub closed_form: bool,
    pub ygrid: WaveGrid,
    pub interp_error: f64,
    pub center_error: f64,
}

/// Position where the phase-A samples cross 1/2, by bisection on the
/// Hermite interpolant of the last cell.
fn locate_half(grid: &WaveGrid, psi: &[f64], dpsi: &[f64], ddpsi: &[f64]) -> f64 {
    let i = psi.len() - 1;
    if i == 0 {
        return grid.node(0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    let cell = |t: f64| {
        quintic(
            t,
            grid.dy,
            psi[i - 1],
            dpsi[i - 1],
            ddpsi[i - 1],
            psi[i],
            dpsi[i],
            ddpsi[i],
        )
        .0
    };
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if cell(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    grid.node(i - 1) + 0.5 * (lo + hi) * grid.dy
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_reproduces_quintics() {
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x.powi(3) - 0.25 * x.powi(4) + 0.1 * x.powi(5);
        let df = |x: f64| 2.0 - 2.0 * x + 1.5 * x * x - x.powi(3) + 0.5 * x.powi(4);
        let ddf = |x: f64| -2.0 + 3.0 * x - 3.0 * x * x + 2.0 * x.powi(3);
        let (a, h) = (0.3, 0.7);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let x = a + t * h;
            let (v, d, s) = quintic(t, h, f(a), df(a), ddf(a), f(a + h), df(a + h), ddf(a + h));
            assert!((v - f(x)).abs() < 1e-13);
            assert!((d - df(x)).abs() < 1e-12);
            assert!((s - ddf(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn grid_snaps_to_nodes() {
        let g = WaveGrid::new(-30.0, 60.004, 0.01).unwrap();
        assert_eq!(g.len(), 9001);
        assert!((g.max - 60.0).abs() < 1e-9);
        assert!(WaveGrid::new(1.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn barenblatt_profile_is_normalized() {
        let m = ModelParams::new(4).unwrap();
        let grid = WaveGrid::for_speed(1.0, &m).unwrap();
        let prof = WaveProfile::solve(1.0, &m, grid).unwrap();
        assert!(prof.closed_form);
        assert!(prof.center_error < 1e-15);
        assert_eq!(prof.gamma, m.pm1);
        let j = prof.eval(0.0);
        assert!((j.pressure(&m).value() - 4.0).abs() < 1e-12);
        assert!(j.relative_residual(1.0, &m) < 1e-13);
    }

    #[test]
    fn rejects_short_grids() {
        let m = ModelParams::new(4).unwrap();
        let g = WaveGrid::new(-10.0, 200.0, 0.01).unwrap();
        assert!(matches!(WaveProfile::solve(2.0, &m, g), Err(Error::Config(_))));
        let g = WaveGrid::new(-30.0, 40.0, 0.01).unwrap();
        assert!(matches!(WaveProfile::solve(2.0, &m, g), Err(Error::Config(_))));
        let g = WaveGrid::new(-30.0, 200.0, 0.01).unwrap();
        assert!(matches!(WaveProfile::solve(0.5, &m, g), Err(Error::Domain(_))));
    }

    #[test]
    fn solved_profile_invariants() {
        let m = ModelParams::new(4).unwrap();
        let grid = WaveGrid::for_speed(2.0, &m).unwrap();
        let prof = WaveProfile::solve(2.0, &m, grid).unwrap();
        assert!(prof.center_error < 1e-9, "center {}", prof.center_error);
        for i in 0..prof.psi.len() {
            assert!(prof.psi[i] > 0.0 && prof.eta[i] > 0.0);
            assert!(prof.dpsi[i] > 0.0);
            assert!(prof.v_excess[i] > 0.0);
            assert!((prof.v[i] * prof.psi[i].powf(m.pm1) - 1.0).abs() < 1e-12);
            if i > 0 {
                assert!(prof.psi[i] >= prof.psi[i - 1] && prof.eta[i] < prof.eta[i - 1]);
                assert!(prof.v_excess[i] < prof.v_excess[i - 1]);
            }
        }
        assert!(prof.interp_error < 1e-8, "interp {}", prof.interp_error);
        // the tails join the interpolant continuously
        let right = prof.grid.max;
        let a = prof.eval(right - 1e-9);
        let b = prof.eval(right + 1e-9);
        assert!((a.eta / b.eta - 1.0).abs() < 1e-6);
        let left = prof.grid.min;
        let a = prof.eval(left + 1e-9);
        let b = prof.eval(left - 1e-9);
        assert!((a.psi / b.psi - 1.0).abs() < 1e-6);
    }
}
