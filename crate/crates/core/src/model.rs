use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension-dependent constants of the cylindrical-gauge equation
/// `(phi^p)_tau = phi_xx + phi^p - phi`.
///
/// The constant rescaling that normalizes the two coefficients of the
/// unnormalized cylindrical equation is fixed once and for all; every
/// quantity in this crate lives in the normalized gauge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    pub p: f64,
    /// `p - 1 = 4 / (n - 2)`, computed directly rather than by subtraction.
    pub pm1: f64,
}

impl ModelParams {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("dimension must be >= 3, got {n}")));
        }
        let nf = n as f64;
        Ok(Self {
            n,
            p: (nf + 2.0) / (nf - 2.0),
            pm1: 4.0 / (nf - 2.0),
        })
    }

    /// `x^p`, using repeated multiplication when `p` is an integer.
    pub fn pow_p(&self, x: f64) -> f64 {
        if self.p.fract() == 0.0 {
            x.powi(self.p as i32)
        } else {
            x.powf(self.p)
        }
    }

    /// `(p - 1) / p`, the growth rate of the cylinder excess.
    pub fn cylinder_rate(&self) -> f64 {
        self.pm1 / self.p
    }

    /// Exponent `2 / (n - 2) = (p - 1) / 2` relating the conformal factor to
    /// the warping function `rho = phi^(2/(n-2))`.
    pub fn warp_exponent(&self) -> f64 {
        0.5 * self.pm1
    }

    /// Conversion from pressure `u` to conformal factor `phi = u^(-1/(p-1))`.
    pub fn phi_from_pressure(&self, u: f64) -> f64 {
        (-u.ln() / self.pm1).exp()
    }

    /// Conversion from conformal factor to pressure `u = phi^(-(p-1))`.
    pub fn pressure_from_phi(&self, phi: f64) -> f64 {
        (-self.pm1 * phi.ln()).exp()
    }

    /// `1 - phi` computed from the pressure excess `u - 1` without cancellation.
    pub fn phi_deficit_from_pressure_excess(&self, excess: f64) -> f64 {
        -(-(excess.ln_1p()) / self.pm1).exp_m1()
    }
}
