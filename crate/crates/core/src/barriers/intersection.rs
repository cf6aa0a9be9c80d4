use serde::{Deserialize, Serialize};

use super::Barriers;
use crate::error::{Error, Result};

/// The point where the two wave blocks of `w+` are equal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoint {
    pub tau: f64,
    pub x: f64,
    /// Leading-order prediction from the wave tails.
    pub predicted: f64,
    /// Common value of `w1 - 1 = w3 - 1` at the root.
    pub excess: f64,
}

impl Barriers {
    fn log_gap(&self, x: f64, tau: f64) -> f64 {
        let (z, zbar) = self.wave_arguments(x, tau);
        self.left.pressure_jet(z).excess.ln() - self.right.pressure_jet(zbar).excess.ln()
    }

    /// `((gamma - gamma')/p) tau + (ln(C/C') + h' gamma' - h gamma)/(gamma + gamma')`.
    pub fn predicted_intersection(&self, tau: f64) -> f64 {
        let (g, g2) = (self.left.gamma, self.right.gamma);
        let (c, c2) = (self.left.c_decay, self.right.c_decay);
        let ps = &self.params;
        (g - g2) / self.model.p * tau + ((c / c2).ln() + ps.h2 * g2 - ps.h * g) / (g + g2)
    }
}

/// Solves `w1 = w3` by bisection on `ln(w1 - 1) - ln(w3 - 1)`, which is
/// strictly decreasing in `x`.
pub fn intersection_point(b: &Barriers, tau: f64) -> Result<IntersectionPoint> {
    let predicted = b.predicted_intersection(tau);
    let gap = |x: f64| b.log_gap(x, tau);
    let (mut lo, mut hi) = (predicted - 1.0, predicted + 1.0);
    let mut width = 1.0;
    let mut bracketed = false;
    for _ in 0..60 {
        let (glo, ghi) = (gap(lo), gap(hi));
        if !glo.is_finite() || !ghi.is_finite() {
            break;
        }
        if glo >= 0.0 && ghi <= 0.0 {
            bracketed = true;
            break;
        }
        width *= 2.0;
        if glo < 0.0 {
            lo = predicted - width;
        }
        if ghi > 0.0 {
            hi = predicted + width;
        }
    }
    if !bracketed {
        return Err(Error::Bracketing(format!(
            "no sign change of ln(w1 - 1) - ln(w3 - 1) around x = {predicted} at tau = {tau}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gap(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = 0.5 * (lo + hi);
    let (z, _) = b.wave_arguments(x, tau);
    Ok(IntersectionPoint {
        tau,
        x,
        predicted,
        excess: b.left.pressure_jet(z).excess,
    })
}

/// Measured and predicted exponential rate of `w1(x(tau), tau) - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRate {
    pub tau: f64,
    pub measured: f64,
    /// `d = (gamma gamma' + p - 1)/p`.
    pub predicted: f64,
}

impl DecayRate {
    pub fn relative_error(&self) -> f64 {
        (self.measured / self.predicted - 1.0).abs()
    }
}

/// Central difference of `ln(w1(x(tau), tau) - 1)` in `tau`.
pub fn decay_rate(b: &Barriers, tau: f64, dtau: f64) -> Result<DecayRate> {
    let plus = intersection_point(b, tau + dtau)?;
    let minus = intersection_point(b, tau - dtau)?;
    let measured = (plus.excess.ln() - minus.excess.ln()) / (2.0 * dtau);
    let (g, g2, p) = (b.left.gamma, b.right.gamma, b.model.p);
    Ok(DecayRate {
        tau,
        measured,
        predicted: (g * g2 + p - 1.0) / p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barriers::AncientParams;
    use crate::model::ModelParams;

    #[test]
    fn symmetric_parameters_meet_at_zero() {
        let m = ModelParams::new(4).unwrap();
        let b = Barriers::new(AncientParams::symmetric(2.0, 0.5, 1.0, 0.2, -10.0).unwrap(), m).unwrap();
        for tau in [-40.0, -20.0, -5.0] {
            let ip = intersection_point(&b, tau).unwrap();
            assert!(ip.x.abs() < 1e-9, "{ip:?}");
            assert!(ip.predicted.abs() < 1e-12);
        }
    }
}
