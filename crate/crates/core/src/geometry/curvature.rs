use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::fitted_denominator;
use crate::model::ModelParams;

fn check_positive(phi: &[f64]) -> Result<()> {
    if phi.len() < 3 {
        return Err(Error::Config("curvature needs at least three grid nodes".into()));
    }
    if let Some((i, f)) = phi.iter().enumerate().find(|(_, f)| !(**f > 0.0) || !f.is_finite()) {
        return Err(Error::Domain(format!(
            "conformal factor must be positive, got {f} at node {i}"
        )));
    }
    Ok(())
}

/// `R~ = phi^{-p} (phi - phi_xx)` on the interior nodes `1..len-1`, with the
/// three-point `phi_xx` over the fitted denominator `2(cosh dx - 1)`, which
/// is exact on `e^{+-x}` and keeps the tips resolved.
pub fn scalar_curvature_normalized(phi: &[f64], dx: f64, model: &ModelParams) -> Result<Vec<f64>> {
    check_positive(phi)?;
    let dx2 = fitted_denominator(dx);
    Ok(phi
        .windows(3)
        .map(|w| {
            let f = w[1];
            let fxx = (w[0] - 2.0 * f + w[2]) / dx2;
            (f - fxx) / model.pow_p(f)
        })
        .collect())
}

/// Sectional curvatures `(K_rad, K_tan)` of `phi^{4/(n-2)} g_cyl` in the
/// normalized gauge, on the interior nodes `1..len-1`.
///
/// With `rho = phi^{2/(n-2)}` and arclength `ds = rho dx_cyl`, where the
/// unnormalized cylinder coordinate is `x_cyl = (p-1)/2 x`,
/// `K_rad = -rho_ss / rho` and `K_tan = (1 - rho_s^2) / rho^2`. In terms of
/// `L = ln phi`: `rho_s = L_x` and `rho_ss rho = (2/(p-1)) L_xx`.
/// Derivatives are central differences of `L`.
pub fn sectional_curvatures(phi: &[f64], dx: f64, model: &ModelParams) -> Result<(Vec<f64>, Vec<f64>)> {
    check_positive(phi)?;
    let s = 0.5 * model.pm1;
    let logs: Vec<f64> = phi.iter().map(|f| f.ln()).collect();
    let mut k_rad = Vec::with_capacity(phi.len() - 2);
    let mut k_tan = Vec::with_capacity(phi.len() - 2);
    for i in 1..phi.len() - 1 {
        let l1 = (logs[i + 1] - logs[i - 1]) / (2.0 * dx);
        let l2 = (logs[i + 1] - 2.0 * logs[i] + logs[i - 1]) / (dx * dx);
        let rho2 = (model.pm1 * logs[i]).exp();
        k_rad.push(-l2 / (s * rho2));
        k_tan.push((1.0 - l1 * l1) / rho2);
    }
    Ok((k_rad, k_tan))
}

/// `sqrt(4(n-1) K_rad^2 + 2(n-1)(n-2) K_tan^2)`.
pub fn tensor_norm(k_rad: f64, k_tan: f64, n: u32) -> f64 {
    let n = n as f64;
    (4.0 * (n - 1.0) * k_rad * k_rad + 2.0 * (n - 1.0) * (n - 2.0) * k_tan * k_tan).sqrt()
}

/// Scalar curvature assembled from the sectional curvatures,
/// `2(n-1) K_rad + (n-1)(n-2) K_tan`.
pub fn trace_from_sectional(k_rad: f64, k_tan: f64, n: u32) -> f64 {
    let n = n as f64;
    2.0 * (n - 1.0) * k_rad + (n - 1.0) * (n - 2.0) * k_tan
}

/// Ratio of the trace of the sectional curvatures to `R~`, measured on the
/// cylinder `phi = 1`.
pub fn fit_trace_constant(model: &ModelParams) -> Result<f64> {
    let phi = [1.0; 3];
    let r = scalar_curvature_normalized(&phi, 0.1, model)?[0];
    let (kr, kt) = sectional_curvatures(&phi, 0.1, model)?;
    Ok(trace_from_sectional(kr[0], kt[0], model.n) / r)
}

/// Curvature profiles of one snapshot, restricted to the interior nodes
/// where `rho^2 = phi^{p-1}` is at least the floor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub tau: f64,
    pub x: Vec<f64>,
    pub r_tilde: Vec<f64>,
    pub k_rad: Vec<f64>,
    pub k_tan: Vec<f64>,
    pub tensor: Vec<f64>,
}

/// Per-snapshot suprema over the resolved nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorms {
    pub tau: f64,
    pub r_tilde: f64,
    pub k_rad: f64,
    pub k_tan: f64,
    /// `max(|K_rad|, |K_tan|)`.
    pub sectional: f64,
    pub tensor: f64,
}

impl CurvatureProfile {
    pub fn compute(tau: f64, x_min: f64, dx: f64, phi: &[f64], rho2_floor: f64, model: &ModelParams) -> Result<Self> {
        let r = scalar_curvature_normalized(phi, dx, model)?;
        let (kr, kt) = sectional_curvatures(phi, dx, model)?;
        let mut out = Self {
            tau,
            x: vec![],
            r_tilde: vec![],
            k_rad: vec![],
            k_tan: vec![],
            tensor: vec![],
        };
        for j in 0..r.len() {
            let i = j + 1;
            if phi[i].powf(model.pm1) < rho2_floor {
                continue;
            }
            out.x.push(x_min + i as f64 * dx);
            out.r_tilde.push(r[j]);
            out.k_rad.push(kr[j]);
            out.k_tan.push(kt[j]);
            out.tensor.push(tensor_norm(kr[j], kt[j], model.n));
        }
        Ok(out)
    }

    pub fn sup_norms(&self) -> SupNorms {
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let (k_rad, k_tan) = (sup(&self.k_rad), sup(&self.k_tan));
        SupNorms {
            tau: self.tau,
            r_tilde: sup(&self.r_tilde),
            k_rad,
            k_tan,
            sectional: k_rad.max(k_tan),
            tensor: sup(&self.tensor),
        }
    }

    pub fn is_finite(&self) -> bool {
        [&self.r_tilde, &self.k_rad, &self.k_tan, &self.tensor]
            .iter()
            .all(|v| v.iter().all(|x| x.is_finite()))
    }
}
