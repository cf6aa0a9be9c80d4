use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// A radial conformal factor `phi_hat(r)` at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialSlice {
    pub t: f64,
    pub r: Vec<f64>,
    pub phi_hat: Vec<f64>,
}

/// A cylindrical conformal factor `phi(x)` at time `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylindricalSlice {
    pub tau: f64,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::Config(format!("sample arrays differ in length ({a} vs {b})")));
    }
    Ok(())
}

/// `phi(x, tau) = (T - t)^{-1/(p-1)} r^{2/(p-1)} phi_hat(r, t)` with
/// `x = ln r` and `tau = -ln(T - t)`.
pub fn cylindrical_from_radial(slice: &RadialSlice, big_t: f64, model: &ModelParams) -> Result<CylindricalSlice> {
    check_lengths(slice.r.len(), slice.phi_hat.len())?;
    let gap = big_t - slice.t;
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("need T > t (T = {big_t}, t = {})", slice.t)));
    }
    let k = 1.0 / model.pm1;
    let mut x = Vec::with_capacity(slice.r.len());
    let mut phi = Vec::with_capacity(slice.r.len());
    for (&r, &f) in slice.r.iter().zip(&slice.phi_hat) {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        let lr = r.ln();
        x.push(lr);
        phi.push(f * (k * (2.0 * lr - gap.ln())).exp());
    }
    Ok(CylindricalSlice { tau: -gap.ln(), x, phi })
}

/// Inverse of [`cylindrical_from_radial`].
pub fn radial_from_cylindrical(slice: &CylindricalSlice, big_t: f64, model: &ModelParams) -> Result<RadialSlice> {
    check_lengths(slice.x.len(), slice.phi.len())?;
    let gap = (-slice.tau).exp();
    let k = 1.0 / model.pm1;
    let (r, phi_hat) = slice
        .x
        .iter()
        .zip(&slice.phi)
        .map(|(&x, &f)| (x.exp(), f * (-k * (2.0 * x - gap.ln())).exp()))
        .unzip();
    Ok(RadialSlice {
        t: big_t - gap,
        r,
        phi_hat,
    })
}

/// Constants relating the cylindrical equation
/// `(phi^p)_tau = phi_xx + phi^p / alpha - beta phi` to the normalized
/// equation `(phi^p)_tau = phi_xx + phi^p - phi`.
///
/// Normalized variables are `x~ = x / length`, `tau~ = tau / time` and
/// `phi~ = phi / amplitude`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeConstants {
    /// `(p - 1) / p`.
    pub alpha: f64,
    /// `(n - 2)^2 / 4`.
    pub beta: f64,
    /// `(alpha beta)^{1/(p-1)}`.
    pub amplitude: f64,
    /// `1 / sqrt(beta) = (p - 1) / 2`.
    pub length: f64,
    /// `alpha`.
    pub time: f64,
}

impl GaugeConstants {
    pub fn new(model: &ModelParams) -> Self {
        let alpha = model.pm1 / model.p;
        let nm2 = model.n as f64 - 2.0;
        let beta = 0.25 * nm2 * nm2;
        Self {
            alpha,
            beta,
            amplitude: (alpha * beta).powf(1.0 / model.pm1),
            length: 2.0 / nm2,
            time: alpha,
        }
    }

    /// Factor between the metric `phi~^{4/(n-2)} g_cyl` of the normalized
    /// gauge and the metric of the unnormalized one; curvatures scale by
    /// its inverse.
    pub fn metric_scale(&self) -> f64 {
        self.alpha * self.beta
    }

    pub fn to_normalized(&self, x: f64, tau: f64, phi: f64) -> (f64, f64, f64) {
        (x / self.length, tau / self.time, phi / self.amplitude)
    }

    pub fn from_normalized(&self, x: f64, tau: f64, phi: f64) -> (f64, f64, f64) {
        (x * self.length, tau * self.time, phi * self.amplitude)
    }
}

/// Polar window around the tip of the wave with speed `lambda` and shift `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarWindow {
    pub lambda: f64,
    pub h: f64,
    pub tau: f64,
    /// Radius `M`; samples are allowed up to `|y| = 2M`.
    pub m: f64,
}

impl PolarWindow {
    /// `x_M(tau) = lambda tau - h + (2/(p-1)) ln 2M`, the image of `|y| = 2M`.
    pub fn x_bar(&self, model: &ModelParams) -> f64 {
        self.lambda * self.tau - self.h + 2.0 / model.pm1 * (2.0 * self.m).ln()
    }

    /// Cylindrical position of the polar radius `r`.
    pub fn x_of_radius(&self, r: f64, model: &ModelParams) -> f64 {
        2.0 / model.pm1 * r.ln() + self.lambda * self.tau - self.h
    }
}

/// Polar profile `phi_hat(y) = Phi(z) |y|^{-2/(p-1)}` with `|y| = e^{(p-1) z / 2}`
/// and `Phi(z) = phi(z + lambda tau - h)`, from a normalized cylindrical
/// field sampled on a uniform grid.
pub fn polar_frame(
    x_min: f64,
    dx: f64,
    phi: &[f64],
    window: &PolarWindow,
    radii: &[f64],
    model: &ModelParams,
) -> Result<Vec<f64>> {
    if phi.len() < 4 {
        return Err(Error::Config("polar frame needs at least four grid nodes".into()));
    }
    if phi.iter().any(|&f| !(f > 0.0)) {
        return Err(Error::Domain("conformal factor must be positive".into()));
    }
    let x_max = x_min + (phi.len() - 1) as f64 * dx;
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r <= 2.0 * window.m) {
                return Err(Error::Domain(format!(
                    "polar radius {r} outside (0, 2M] with M = {}",
                    window.m
                )));
            }
            let x = window.x_of_radius(r, model);
            if x < x_min || x > x_max {
                return Err(Error::Range(format!(
                    "polar radius {r} maps to x = {x:.4}, outside the grid [{x_min}, {x_max}]"
                )));
            }
            let z = x - window.lambda * window.tau + window.h;
            Ok((log_interp(x_min, dx, phi, x) - z).exp())
        })
        .collect()
}

/// Cubic Lagrange interpolation of `ln phi` on the four nodes around `x`.
fn log_interp(x_min: f64, dx: f64, phi: &[f64], x: f64) -> f64 {
    let n = phi.len();
    let s = (x - x_min) / dx;
    let i0 = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let t = s - i0 as f64;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        for k in 0..4 {
            if k != j {
                w *= (t - k as f64) / (j as f64 - k as f64);
            }
        }
        acc += w * phi[i0 + j].ln();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylindrical_change_round_trip() {
        let m = ModelParams::new(5).unwrap();
        let slice = RadialSlice {
            t: -3.0,
            r: vec![0.01, 0.5, 1.0, 7.0, 300.0],
            phi_hat: vec![2.0, 1.1, 0.3, 1e-3, 4e-7],
        };
        let cyl = cylindrical_from_radial(&slice, 1.5, &m).unwrap();
        assert!((cyl.tau + 4.5f64.ln()).abs() < 1e-15);
        let back = radial_from_cylindrical(&cyl, 1.5, &m).unwrap();
        assert!((back.t - slice.t).abs() < 1e-12);
        for i in 0..slice.r.len() {
            assert!((back.r[i] / slice.r[i] - 1.0).abs() < 1e-12);
            assert!((back.phi_hat[i] / slice.phi_hat[i] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cylindrical_change_rejects_bad_input() {
        let m = ModelParams::new(4).unwrap();
        let bad_r = RadialSlice {
            t: 0.0,
            r: vec![0.0],
            phi_hat: vec![1.0],
        };
        assert!(matches!(
            cylindrical_from_radial(&bad_r, 1.0, &m),
            Err(Error::Domain(_))
        ));
        let late = RadialSlice {
            t: 2.0,
            r: vec![1.0],
            phi_hat: vec![1.0],
        };
        assert!(matches!(cylindrical_from_radial(&late, 1.0, &m), Err(Error::Domain(_))));
    }

    #[test]
    fn power_law_maps_to_constant() {
        let m = ModelParams::new(6).unwrap();
        let r: Vec<f64> = (1..20).map(|i| 0.3 * i as f64).collect();
        let phi_hat = r.iter().map(|r| 0.7 * r.powf(-2.0 / m.pm1)).collect();
        let cyl = cylindrical_from_radial(&RadialSlice { t: 0.0, r, phi_hat }, 2.0, &m).unwrap();
        for f in &cyl.phi {
            assert!((f / cyl.phi[0] - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn gauge_constants_normalize_the_equation() {
        for n in [3, 4, 5, 8] {
            let m = ModelParams::new(n).unwrap();
            let g = GaugeConstants::new(&m);
            assert!((g.length - 0.5 * m.pm1).abs() < 1e-15);
            assert!((g.amplitude.powf(m.pm1) - g.alpha * g.beta).abs() < 1e-13);
            let (x, t, f) = g.to_normalized(1.3, -2.0, 0.4);
            let (x2, t2, f2) = g.from_normalized(x, t, f);
            assert!((x2 - 1.3).abs() < 1e-15 && (t2 + 2.0).abs() < 1e-15 && (f2 - 0.4).abs() < 1e-15);
        }
    }

    #[test]
    fn polar_radius_doubles_with_z_shift() {
        let m = ModelParams::new(4).unwrap();
        let w = PolarWindow {
            lambda: 2.0,
            h: 0.5,
            tau: -3.0,
            m: 4.0,
        };
        let shift = w.x_of_radius(2.0, &m) - w.x_of_radius(1.0, &m);
        assert!((shift - 2.0 * 2f64.ln() / m.pm1).abs() < 1e-14);
        assert!((w.x_of_radius(8.0, &m) - w.x_bar(&m)).abs() < 1e-14);
    }

    #[test]
    fn polar_frame_of_exponential_is_constant() {
        let m = ModelParams::new(4).unwrap();
        let w = PolarWindow {
            lambda: 2.0,
            h: 0.0,
            tau: -5.0,
            m: 2.0,
        };
        let (x_min, dx) = (-40.0, 0.05);
        let phi: Vec<f64> = (0..1201)
            .map(|i| {
                let x = x_min + i as f64 * dx;
                0.8 * (x - w.lambda * w.tau).exp()
            })
            .collect();
        let vals = polar_frame(x_min, dx, &phi, &w, &[0.1, 1.0, 3.9], &m).unwrap();
        for v in vals {
            assert!((v - 0.8).abs() < 1e-12);
        }
        assert!(matches!(
            polar_frame(x_min, dx, &phi, &w, &[4.5], &m),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            polar_frame(x_min, dx, &phi, &w, &[1e-30], &m),
            Err(Error::Range(_))
        ));
    }
}
