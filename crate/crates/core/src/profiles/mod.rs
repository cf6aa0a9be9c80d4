//! Special solutions: decay exponents, the Barenblatt wave, cylinders, the
//! round sphere, King's closed form and the traveling-wave shooting solver.

mod king;
mod wave;

pub use king::{fit_king_exponents, king_integrate, king_rhs, king_step, KingExponents, KingState, KingTrajectory};
pub use wave::{PressureJet1, WaveGrid, WaveJet, WaveProfile, WaveSidecar, SEED_AMPLITUDE};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Roots of `gamma^2 - lambda p gamma + (p - 1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayExponent {
    /// The smaller root, i.e. the decay rate of generic waves with `lambda > 1`.
    pub gamma: f64,
    pub larger_root: f64,
    /// Set at `lambda = 1`, where the Barenblatt profile decays with the
    /// exponent `p - 1` instead of the smaller root.
    pub barenblatt_realizes_pm1: bool,
}

/// Decay exponent of the right tail of the traveling wave with speed `lambda`.
pub fn gamma_exponent(lambda: f64, model: &ModelParams) -> Result<DecayExponent> {
    if !(lambda >= 1.0) {
        return Err(Error::Domain(format!("lambda must be >= 1, got {lambda}")));
    }
    let lp = lambda * model.p;
    // lambda^2 p^2 - 4(p - 1) = (lambda p - 2)^2 + 4 p (lambda - 1)
    let disc = (lp - 2.0).powi(2) + 4.0 * model.p * (lambda - 1.0);
    let larger = 0.5 * (lp + disc.sqrt());
    // Vieta avoids the cancellation in (lp - sqrt(disc)) / 2
    let smaller = model.pm1 / larger;
    Ok(DecayExponent {
        gamma: smaller,
        larger_root: larger,
        barenblatt_realizes_pm1: lambda == 1.0,
    })
}

/// `c_p = 2^(p-1) - 1`, fixed by `psi_1(0) = 1/2`.
pub fn barenblatt_constant(model: &ModelParams) -> f64 {
    (model.pm1 * std::f64::consts::LN_2).exp_m1()
}

/// Pressure of the explicit `lambda = 1` wave, `v_1(y) = 1 + c_p e^{-(p-1) y}`.
pub fn barenblatt(y: f64, model: &ModelParams) -> f64 {
    1.0 + barenblatt_constant(model) * (-model.pm1 * y).exp()
}

/// Conformal profile `psi_1 = v_1^{-1/(p-1)}`.
pub fn barenblatt_psi(y: f64, model: &ModelParams) -> f64 {
    let e = barenblatt_constant(model) * (-model.pm1 * y).exp();
    (-(e.ln_1p()) / model.pm1).exp()
}

/// Pressure jet `(v_1 - 1, v_1', v_1'')`.
pub fn barenblatt_pressure_jet(y: f64, model: &ModelParams) -> PressureJet1 {
    let e = barenblatt_constant(model) * (-model.pm1 * y).exp();
    PressureJet1 {
        excess: e,
        d1: -model.pm1 * e,
        d2: model.pm1 * model.pm1 * e,
    }
}

/// Time at which `xi_k` blows up, `(p/(p-1)) ln(1/k)`; `+inf` for `k = 0`.
pub fn cylinder_blowup_time(k: f64, model: &ModelParams) -> f64 {
    if k <= 0.0 {
        f64::INFINITY
    } else {
        -k.ln() / model.cylinder_rate()
    }
}

fn cylinder_check(tau: f64, k: f64, model: &ModelParams) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("cylinder parameter k must be >= 0, got {k}")));
    }
    let s = k * (model.cylinder_rate() * tau).exp();
    if s >= 1.0 {
        return Err(Error::Range(format!(
            "cylinder xi_k with k = {k} blows up at tau = {}, evaluated at {tau}",
            cylinder_blowup_time(k, model)
        )));
    }
    Ok(s)
}

/// Spatially constant pressure solution `xi_k(tau) = 1 / (1 - k e^{(p-1) tau / p})`.
pub fn cylinder(tau: f64, k: f64, model: &ModelParams) -> Result<f64> {
    let s = cylinder_check(tau, k, model)?;
    Ok(1.0 / (1.0 - s))
}

/// `xi_k(tau) - 1`, accurate when the excess is tiny.
pub fn cylinder_excess(tau: f64, k: f64, model: &ModelParams) -> Result<f64> {
    let s = cylinder_check(tau, k, model)?;
    Ok(s / (1.0 - s))
}

/// Parameters of the round steady state `phi_S = A sech^m(b x)`.
#[derive(Debug, Clone, Copy)]
pub struct SphereSteady {
    pub amplitude: f64,
    pub power: f64,
    pub rate: f64,
}

impl SphereSteady {
    pub fn new(model: &ModelParams) -> Self {
        let m = 0.5 * (model.n as f64 - 2.0);
        Self {
            amplitude: ((m + 1.0) / m).powf(1.0 / model.pm1),
            power: m,
            rate: 1.0 / m,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.amplitude * sech(self.rate * x).powf(self.power)
    }

    /// `(phi, phi_x, phi_xx)`.
    pub fn jet(&self, x: f64) -> (f64, f64, f64) {
        let s = sech(self.rate * x);
        let t = (self.rate * x).tanh();
        let m = self.power;
        let base = self.amplitude * s.powf(m);
        let d1 = -m * self.rate * base * t;
        let d2 = base * (1.0 - (m + 1.0) / m * s * s);
        (base, d1, d2)
    }
}

fn sech(x: f64) -> f64 {
    let ax = x.abs();
    if ax > 700.0 {
        0.0
    } else {
        1.0 / ax.cosh()
    }
}

/// Closed-form steady state of `phi_xx + phi^p - phi = 0` (the round sphere).
pub fn sphere_steady(x: f64, model: &ModelParams) -> f64 {
    SphereSteady::new(model).value(x)
}

fn king_denominator(r: f64, b: f64) -> f64 {
    let r2 = r * r;
    1.0 + 2.0 * b * r2 + r2 * r2
}

/// Radial King profile `(a / (1 + 2 b r^2 + r^4))^{(n-2)/4}`.
pub fn king_closed_form(r: f64, a: f64, b: f64, model: &ModelParams) -> Result<f64> {
    let d = king_denominator(r, b);
    if !(a > 0.0) || !(d > 0.0) || r < 0.0 {
        return Err(Error::Domain(format!(
            "King closed form needs a > 0, r >= 0 and 1 + 2br^2 + r^4 > 0 (a = {a}, r = {r}, denominator = {d})"
        )));
    }
    Ok((a / d).powf(0.25 * (model.n as f64 - 2.0)))
}

/// Pressure polynomial `a^{-1} (1 + 2 b r^2 + r^4)` of the King solution.
pub fn king_pressure(r: f64, a: f64, b: f64) -> Result<f64> {
    let d = king_denominator(r, b);
    if !(a > 0.0) || !(d > 0.0) || r < 0.0 {
        return Err(Error::Domain(format!(
            "King pressure needs a > 0, r >= 0 and a positive polynomial (a = {a}, r = {r})"
        )));
    }
    Ok(d / a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: u32) -> ModelParams {
        ModelParams::new(n).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let m = model(3);
        let g1 = gamma_exponent(1.0, &m).unwrap();
        assert!((g1.gamma - 1.0).abs() < 1e-15);
        assert!((g1.larger_root - 4.0).abs() < 1e-14);
        assert!(g1.barenblatt_realizes_pm1);
        let g2 = gamma_exponent(2.0, &m).unwrap();
        // (10 - sqrt(84)) / 2, which loses a few digits to cancellation
        let expected = (10.0 - 84f64.sqrt()) / 2.0;
        assert!((g2.gamma - expected).abs() < 1e-13);
        let q = g2.gamma * g2.gamma - 10.0 * g2.gamma + 4.0;
        assert!(q.abs() < 1e-14);
        assert!((g2.gamma - 0.417424).abs() < 1e-6);
        assert!(!g2.barenblatt_realizes_pm1);
    }

    #[test]
    fn gamma_rejects_slow_waves() {
        assert!(matches!(gamma_exponent(0.5, &model(4)), Err(Error::Domain(_))));
        assert!(gamma_exponent(f64::NAN, &model(4)).is_err());
    }

    #[test]
    fn gamma_decreases_with_speed() {
        let m = model(4);
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let g = gamma_exponent(1.0 + 0.1 * i as f64, &m).unwrap().gamma;
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn barenblatt_normalization() {
        let m = model(3);
        assert!((barenblatt(0.0, &m) - 16.0).abs() < 1e-12);
        assert!((barenblatt_psi(0.0, &m) - 0.5).abs() < 1e-15);
        assert!((barenblatt(60.0, &m) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_examples() {
        let m = model(4);
        assert_eq!(cylinder(-3.0, 0.0, &m).unwrap(), 1.0);
        assert_eq!(cylinder(37.0, 0.0, &m).unwrap(), 1.0);
        assert!((cylinder(0.0, 0.5, &m).unwrap() - 2.0).abs() < 1e-15);
        let tb = cylinder_blowup_time(0.5, &m);
        assert!(matches!(cylinder(tb, 0.5, &m), Err(Error::Range(_))));
        assert!(matches!(cylinder(tb + 1.0, 0.5, &m), Err(Error::Range(_))));
        assert!(cylinder(tb - 1e-3, 0.5, &m).is_ok());
    }

    #[test]
    fn cylinder_second_order_expansion() {
        let m = model(4);
        let a = m.cylinder_rate();
        let k = 0.7;
        for &tau in &[-10.0, -15.0, -20.0] {
            let rem = cylinder_excess(tau, k, &m).unwrap() - k * (a * tau).exp();
            let ratio = rem / (2.0 * a * tau).exp();
            // remainder / e^{2 a tau} -> k^2
            assert!((ratio - k * k).abs() < 1e-3, "tau={tau} ratio={ratio}");
        }
    }

    #[test]
    fn sphere_n6_matches_closed_form() {
        let m = model(6);
        for i in -20..=20 {
            let x = i as f64;
            let s = 1.0 / (0.5 * x).cosh();
            assert!((sphere_steady(x, &m) - 1.5 * s * s).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_is_even_and_decreasing() {
        let m = model(5);
        let mut prev = sphere_steady(0.0, &m);
        for i in 1..200 {
            let x = 0.1 * i as f64;
            assert_eq!(sphere_steady(x, &m), sphere_steady(-x, &m));
            let v = sphere_steady(x, &m);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn king_closed_form_basics() {
        let m = model(4);
        let (a, b) = (2.5, 0.3);
        assert!((king_closed_form(0.0, a, b, &m).unwrap() - a.powf(0.5)).abs() < 1e-15);
        for i in 0..30 {
            let r = 0.2 * i as f64;
            let phi = king_closed_form(r, a, b, &m).unwrap();
            let u = king_pressure(r, a, b).unwrap();
            assert!((u * phi.powf(m.pm1) - 1.0).abs() < 1e-13);
        }
        // b = -2 makes the quartic negative at r = 1
        assert!(matches!(king_closed_form(1.0, a, -2.0, &m), Err(Error::Domain(_))));
        assert!(king_pressure(1.0, -1.0, 0.0).is_err());
    }
}
