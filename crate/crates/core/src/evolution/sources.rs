use std::sync::Arc;

use crate::barriers::Barriers;
use crate::error::Result;
use crate::model::ModelParams;
use crate::profiles::{cylinder_excess, SphereSteady, WaveProfile};

/// A pressure field `u(x, tau)` given through its excess `u - 1`, used for
/// initial and boundary data.
pub trait PressureSource: Sync {
    fn excess(&self, x: f64, tau: f64) -> Result<f64>;
}

impl PressureSource for Barriers {
    /// The upper barrier `w+`.
    fn excess(&self, x: f64, tau: f64) -> Result<f64> {
        Ok(self.eval(x, tau)?.wplus_excess)
    }
}

/// `v_lambda(x - lambda tau + h)`, or `v_lambda(-x - lambda tau + h)` when reflected.
#[derive(Debug, Clone)]
pub struct TravelingWaveSolution {
    pub profile: Arc<WaveProfile>,
    pub h: f64,
    pub reflected: bool,
}

impl PressureSource for TravelingWaveSolution {
    fn excess(&self, x: f64, tau: f64) -> Result<f64> {
        let s = if self.reflected { -x } else { x };
        Ok(self.profile.pressure_jet(s - self.profile.lambda * tau + self.h).excess)
    }
}

/// The spatially constant solution `xi_k(tau)`.
#[derive(Debug, Clone, Copy)]
pub struct CylinderSolution {
    pub k: f64,
    pub model: ModelParams,
}

impl PressureSource for CylinderSolution {
    fn excess(&self, _x: f64, tau: f64) -> Result<f64> {
        cylinder_excess(tau, self.k, &self.model)
    }
}

/// The round steady state.
#[derive(Debug, Clone, Copy)]
pub struct SphereSolution {
    pub steady: SphereSteady,
    pub model: ModelParams,
}

impl PressureSource for SphereSolution {
    fn excess(&self, x: f64, _tau: f64) -> Result<f64> {
        Ok((-self.model.pm1 * self.steady.value(x).ln()).exp_m1())
    }
}
