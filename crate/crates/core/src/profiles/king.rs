//! King solutions `u = xi(tau) + zeta(tau) cosh((p-1) x)` and their ODE system
//!
//! `p xi' = p(p-1) zeta^2 + (p-1)(xi^2 - xi)`, `p zeta' = (p-1) zeta (-1 + (p+1) xi)`.
//!
//! The integration variable is `(xi - 1, zeta)` so that backward trajectories
//! approaching the fixed point `(1, 0)` keep full relative precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::ode::{Control, Dopri5};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KingState {
    pub tau: f64,
    pub xi: f64,
    pub zeta: f64,
    /// `xi - 1`, kept separately since it decays to zero backward in time.
    pub xi_excess: f64,
}

impl KingState {
    pub fn new(tau: f64, xi: f64, zeta: f64) -> Result<Self> {
        Self::from_excess(tau, xi - 1.0, zeta)
    }

    pub fn from_excess(tau: f64, xi_excess: f64, zeta: f64) -> Result<Self> {
        if !(xi_excess >= 0.0) || !(zeta >= 0.0) {
            return Err(Error::Domain(format!(
                "King state needs xi >= 1 and zeta >= 0, got xi - 1 = {xi_excess}, zeta = {zeta}"
            )));
        }
        Ok(Self {
            tau,
            xi: 1.0 + xi_excess,
            zeta,
            xi_excess,
        })
    }

    /// Pressure `xi + zeta cosh((p-1) x)`.
    pub fn pressure(&self, x: f64, model: &ModelParams) -> f64 {
        self.xi + self.zeta * (model.pm1 * x).cosh()
    }
}

/// Right-hand side in `(xi - 1, zeta)`.
pub fn king_rhs(e: f64, zeta: f64, model: &ModelParams) -> [f64; 2] {
    let (p, pm1) = (model.p, model.pm1);
    [
        pm1 * zeta * zeta + pm1 / p * (1.0 + e) * e,
        pm1 / p * zeta * (p + (p + 1.0) * e),
    ]
}

fn solver(cap: Option<f64>) -> Dopri5 {
    Dopri5 {
        rtol: 1e-12,
        atol: 1e-300,
        blowup_cap: cap,
        ..Dopri5::default()
    }
}

/// Advances one state by `dtau` (negative for backward).
pub fn king_step(state: &KingState, dtau: f64, model: &ModelParams) -> Result<KingState> {
    let m = *model;
    let out = solver(None).integrate(
        move |_, s: &[f64; 2]| king_rhs(s[0], s[1], &m),
        state.tau,
        [state.xi_excess, state.zeta],
        &[state.tau + dtau],
        |_, _| Control::Continue,
    )?;
    let s = out.y.last().copied().unwrap_or([state.xi_excess, state.zeta]);
    if out.blew_up || !s[0].is_finite() {
        return Err(Error::Integrator(format!(
            "King trajectory blew up before tau = {}",
            state.tau + dtau
        )));
    }
    KingState::from_excess(state.tau + dtau, s[0], s[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KingTrajectory {
    pub states: Vec<KingState>,
    /// Set when `xi` crossed the cap; the trajectory stops there.
    pub blew_up: bool,
}

/// Integrates from `state` to `tau_end` sampling `samples` equally spaced
/// outputs. `xi_cap` truncates forward blow-up.
pub fn king_integrate(
    state: &KingState,
    tau_end: f64,
    samples: usize,
    xi_cap: f64,
    model: &ModelParams,
) -> Result<KingTrajectory> {
    if samples < 2 {
        return Err(Error::Config("King trajectory needs at least 2 samples".into()));
    }
    let m = *model;
    let span = tau_end - state.tau;
    let outputs: Vec<f64> = (1..samples)
        .map(|i| state.tau + span * i as f64 / (samples - 1) as f64)
        .collect();
    let out = solver(Some(xi_cap - 1.0)).integrate(
        move |_, s: &[f64; 2]| king_rhs(s[0], s[1], &m),
        state.tau,
        [state.xi_excess, state.zeta],
        &outputs,
        |_, _| Control::Continue,
    )?;
    let mut states = vec![*state];
    for (t, s) in out.t.iter().zip(&out.y) {
        if s[0] + 1.0 > xi_cap {
            break;
        }
        states.push(KingState::from_excess(*t, s[0], s[1])?);
    }
    Ok(KingTrajectory {
        states,
        blew_up: out.blew_up,
    })
}

/// Regression slopes of `ln(xi - 1)` and `ln zeta` against `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KingExponents {
    pub xi_slope: f64,
    pub zeta_slope: f64,
    pub xi_target: f64,
    pub zeta_target: f64,
    pub xi_rel_err: f64,
    pub zeta_rel_err: f64,
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let sxx = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<f64>();
    sxy / sxx
}

/// Fits the backward exponents on the `fraction` of samples with the most
/// negative `tau`. Targets are `(p-1)/p` and `p-1`.
pub fn fit_king_exponents(traj: &KingTrajectory, fraction: f64, model: &ModelParams) -> Result<KingExponents> {
    let mut states = traj.states.clone();
    states.sort_by(|a, b| a.tau.total_cmp(&b.tau));
    let take = ((states.len() as f64 * fraction).ceil() as usize).min(states.len());
    let window = &states[..take];
    let xi_pts: Vec<(f64, f64)> = window
        .iter()
        .filter(|s| s.xi_excess > 0.0)
        .map(|s| (s.tau, s.xi_excess.ln()))
        .collect();
    let zeta_pts: Vec<(f64, f64)> = window
        .iter()
        .filter(|s| s.zeta > 0.0)
        .map(|s| (s.tau, s.zeta.ln()))
        .collect();
    if xi_pts.len() < 3 || zeta_pts.len() < 3 {
        return Err(Error::AsymptoticsFit(
            "too few positive samples of xi - 1 and zeta for a slope fit".into(),
        ));
    }
    let xi_target = model.pm1 / model.p;
    let zeta_target = model.pm1;
    let xi_slope = slope(&xi_pts);
    let zeta_slope = slope(&zeta_pts);
    Ok(KingExponents {
        xi_slope,
        zeta_slope,
        xi_target,
        zeta_target,
        xi_rel_err: (xi_slope / xi_target - 1.0).abs(),
        zeta_rel_err: (zeta_slope / zeta_target - 1.0).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::cylinder;

    #[test]
    fn fixed_point_is_stationary() {
        let m = ModelParams::new(5).unwrap();
        assert_eq!(king_rhs(0.0, 0.0, &m), [0.0, 0.0]);
        let s = KingState::new(-3.0, 1.0, 0.0).unwrap();
        let t = king_step(&s, 2.0, &m).unwrap();
        assert_eq!((t.xi, t.zeta), (1.0, 0.0));
    }

    #[test]
    fn zeta_zero_slice_is_the_cylinder() {
        let m = ModelParams::new(4).unwrap();
        let k = 0.3;
        let tau0 = -4.0;
        let s = KingState::new(tau0, cylinder(tau0, k, &m).unwrap(), 0.0).unwrap();
        let traj = king_integrate(&s, 0.5, 50, 1e6, &m).unwrap();
        for st in &traj.states {
            let exact = cylinder(st.tau, k, &m).unwrap();
            assert!((st.xi / exact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_states_below_the_cylinder() {
        assert!(KingState::new(0.0, 0.9, 0.0).is_err());
        assert!(KingState::new(0.0, 1.1, -1e-3).is_err());
    }

    #[test]
    fn forward_blow_up_truncates() {
        let m = ModelParams::new(4).unwrap();
        let s = KingState::new(0.0, 1.5, 0.1).unwrap();
        let traj = king_integrate(&s, 10.0, 100, 1e3, &m).unwrap();
        assert!(traj.blew_up);
        assert!(traj.states.iter().all(|s| s.xi <= 1e3));
    }
}
