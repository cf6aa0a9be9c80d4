//! Adaptive Dormand–Prince 5(4) integrator for small autonomous-size systems.
//!
//! Steps are clipped so that every requested output abscissa is hit exactly;
//! no interpolation is involved in the returned samples.

use crate::error::{Error, Result};

/// Decision returned by the output observer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    /// Largest step allowed, in absolute value.
    pub h_max: f64,
    pub max_steps: usize,
    /// Abort with `blew_up = true` once any component exceeds this magnitude.
    pub blowup_cap: Option<f64>,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
            blowup_cap: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OdeOutput<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub steps: usize,
    pub rejected: usize,
    /// Observer requested a stop.
    pub stopped: bool,
    pub blew_up: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl Dopri5 {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrate `y' = f(t, y)` from `(t0, y0)` through the monotone sequence
    /// `outputs` (increasing or decreasing). The observer sees every output
    /// sample and may stop the integration early.
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: [f64; N],
        outputs: &[f64],
        mut observe: O,
    ) -> Result<OdeOutput<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N]) -> Control,
    {
        let mut out = OdeOutput {
            t: Vec::with_capacity(outputs.len()),
            y: Vec::with_capacity(outputs.len()),
            steps: 0,
            rejected: 0,
            stopped: false,
            blew_up: false,
        };
        if outputs.is_empty() {
            return Ok(out);
        }
        let dir = if outputs[outputs.len() - 1] >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        let span = (outputs[outputs.len() - 1] - t0).abs().max(1e-300);
        let mut h = (1e-3 * span).min(self.h_max).max(1e-12);

        for &target in outputs {
            if (target - t) * dir < 0.0 {
                return Err(Error::Integrator(format!(
                    "output {target} is not monotone from t = {t}"
                )));
            }
            while (target - t) * dir > 0.0 {
                if out.steps + out.rejected >= self.max_steps {
                    return Err(Error::Integrator(format!(
                        "step budget {} exhausted at t = {t}",
                        self.max_steps
                    )));
                }
                let remaining = (target - t).abs();
                let hstep = h.min(remaining).min(self.h_max);
                let last = hstep >= remaining;
                let hs = dir * hstep;

                let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
                let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
                let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
                let k5 = f(
                    t + C5 * hs,
                    &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                );
                let k6 = f(
                    t + hs,
                    &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
                );
                let ynew = axpy(&y, hs, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
                let tnew = if last { target } else { t + hs };
                let k7 = f(tnew, &ynew);

                let mut err = 0.0;
                for i in 0..N {
                    let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                    let sc = self.atol + self.rtol * y[i].abs().max(ynew[i].abs());
                    err += (e / sc).powi(2);
                }
                let err = (err / N as f64).sqrt();

                if !err.is_finite() {
                    out.rejected += 1;
                    h = 0.1 * hstep;
                    if h < 1e-14 * span {
                        return Err(Error::Integrator(format!("non-finite state near t = {t}")));
                    }
                    continue;
                }
                let fac = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if err <= 1.0 {
                    t = tnew;
                    y = ynew;
                    k1 = k7;
                    out.steps += 1;
                    if let Some(cap) = self.blowup_cap {
                        if y.iter().any(|v| v.abs() > cap) {
                            out.blew_up = true;
                            out.t.push(t);
                            out.y.push(y);
                            return Ok(out);
                        }
                    }
                    // A clipped final step says nothing about the admissible size.
                    if !last {
                        h = hstep * fac;
                    }
                } else {
                    out.rejected += 1;
                    h = hstep * fac.min(1.0);
                    if h < 1e-14 * span {
                        return Err(Error::Integrator(format!("step size underflow near t = {t}")));
                    }
                }
            }
            out.t.push(t);
            out.y.push(y);
            if observe(t, &y) == Control::Stop {
                out.stopped = true;
                break;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_is_accurate() {
        let solver = Dopri5::with_tolerances(1e-12, 1e-14);
        let outs: Vec<f64> = (1..=100).map(|i| i as f64 * 0.1).collect();
        let sol = solver
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                0.0,
                [1.0, 0.0],
                &outs,
                |_, _| Control::Continue,
            )
            .unwrap();
        for (t, y) in sol.t.iter().zip(&sol.y) {
            assert!((y[0] - t.cos()).abs() < 1e-10, "t={t}");
        }
        assert_eq!(sol.t.len(), 100);
        assert_eq!(*sol.t.last().unwrap(), 10.0);
    }

    #[test]
    fn backward_integration() {
        let solver = Dopri5::with_tolerances(1e-12, 0.0);
        let outs = [-1.0, -5.0, -10.0];
        let sol = solver
            .integrate(
                |_, y: &[f64; 1]| [0.5 * y[0]],
                0.0,
                [1.0],
                &outs,
                |_, _| Control::Continue,
            )
            .unwrap();
        for (t, y) in sol.t.iter().zip(&sol.y) {
            assert!((y[0] / (0.5 * t).exp() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn blowup_is_flagged() {
        let solver = Dopri5 {
            blowup_cap: Some(1e6),
            ..Dopri5::with_tolerances(1e-8, 1e-12)
        };
        // y' = y^2, y(0) = 1 blows up at t = 1
        let sol = solver
            .integrate(
                |_, y: &[f64; 1]| [y[0] * y[0]],
                0.0,
                [1.0],
                &[2.0],
                |_, _| Control::Continue,
            )
            .unwrap();
        assert!(sol.blew_up);
        assert!(*sol.t.last().unwrap() < 1.0);
    }

    #[test]
    fn observer_can_stop() {
        let solver = Dopri5::default();
        let outs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let sol = solver
            .integrate(
                |_, y: &[f64; 1]| [y[0]],
                0.0,
                [1.0],
                &outs,
                |t, _| {
                    if t >= 3.0 {
                        Control::Stop
                    } else {
                        Control::Continue
                    }
                },
            )
            .unwrap();
        assert!(sol.stopped);
        assert_eq!(sol.t.len(), 3);
    }
}
