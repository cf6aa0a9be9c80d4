//! Sub- and supersolution barriers built from two traveling waves and a
//! shrinking cylinder, and the pressure operator
//! `L(w) = w w_xx - p/(p-1) w_x^2 + (p-1)(w^2 - w) - p w_tau`.

mod certify;
mod intersection;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use certify::{
    certify_supersolution, find_q, CertBox, CertGrid, CertificationReport, QSearch, QSearchStep, RegionMax, Verdict,
};
pub use intersection::{decay_rate, intersection_point, DecayRate, IntersectionPoint};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::profiles::{cylinder_blowup_time, cylinder_excess, PressureJet1, WaveGrid, WaveProfile};

/// The five parameters of the family plus the supersolution margin `q` and
/// the horizon `tau0` on which `q` is certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AncientParams {
    pub lambda: f64,
    pub lambda2: f64,
    pub h: f64,
    pub h2: f64,
    pub k: f64,
    pub q: f64,
    pub tau0: f64,
}

impl AncientParams {
    /// Speeds must be at least 1 (1 selects the Barenblatt wave), `k >= 0`,
    /// `q >= 0` (`q = 0` is allowed for control runs) and `tau0 < 0`.
    pub fn new(lambda: f64, lambda2: f64, h: f64, h2: f64, k: f64, q: f64, tau0: f64) -> Result<Self> {
        let p = Self {
            lambda,
            lambda2,
            h,
            h2,
            k,
            q,
            tau0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn symmetric(lambda: f64, h: f64, k: f64, q: f64, tau0: f64) -> Result<Self> {
        Self::new(lambda, lambda, h, h, k, q, tau0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 1.0 && self.lambda2 >= 1.0) {
            return Err(Error::Domain(format!(
                "wave speeds must be >= 1, got {} and {}",
                self.lambda, self.lambda2
            )));
        }
        if !(self.k >= 0.0) {
            return Err(Error::Domain(format!("k must be >= 0, got {}", self.k)));
        }
        if !(self.q >= 0.0) {
            return Err(Error::Domain(format!("q must be >= 0, got {}", self.q)));
        }
        if !(self.tau0 < 0.0) {
            return Err(Error::Domain(format!("tau0 must be < 0, got {}", self.tau0)));
        }
        if !(self.h.is_finite() && self.h2.is_finite()) {
            return Err(Error::Domain("shifts h, h' must be finite".into()));
        }
        Ok(())
    }

    /// Swaps the roles of the two waves.
    pub fn reflected(&self) -> Self {
        Self {
            lambda: self.lambda2,
            lambda2: self.lambda,
            h: self.h2,
            h2: self.h,
            ..*self
        }
    }

    pub fn with_q(&self, q: f64) -> Self {
        Self { q, ..*self }
    }
}

/// A pressure value with its first derivatives, stored as `(w - 1, w_x, w_xx, w_tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PressureJet {
    pub excess: f64,
    pub dx: f64,
    pub dxx: f64,
    pub dtau: f64,
}

impl PressureJet {
    pub fn value(&self) -> f64 {
        1.0 + self.excess
    }

    /// `phi = w^{-1/(p-1)}` without forming `w` when it is huge.
    pub fn phi(&self, model: &ModelParams) -> f64 {
        phi_from_excess(self.excess, model)
    }
}

/// `w^{-1/(p-1)}` from `w - 1`.
pub fn phi_from_excess(excess: f64, model: &ModelParams) -> f64 {
    (-excess.ln_1p() / model.pm1).exp()
}

/// `L(w)` and the sum of absolute values of its four terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorValue {
    pub value: f64,
    pub scale: f64,
}

impl OperatorValue {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.value / self.scale
        }
    }
}

/// `L(w)` from a pointwise jet.
pub fn pressure_operator(jet: &PressureJet, model: &ModelParams) -> Result<OperatorValue> {
    let w = 1.0 + jet.excess;
    let terms = [
        w * jet.dxx,
        -model.p / model.pm1 * jet.dx * jet.dx,
        model.pm1 * w * jet.excess,
        -model.p * jet.dtau,
    ];
    let value: f64 = terms.iter().sum();
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    if !value.is_finite() || !scale.is_finite() {
        return Err(Error::Evaluation(format!("non-finite operator input {jet:?}")));
    }
    Ok(OperatorValue { value, scale })
}

/// `L(w)` at an interior sample of a field, with central differences in `x`
/// and a supplied `w_tau`.
pub fn pressure_operator_samples(
    left: f64,
    center: f64,
    right: f64,
    dx: f64,
    dtau_value: f64,
    model: &ModelParams,
) -> Result<OperatorValue> {
    let jet = PressureJet {
        excess: center - 1.0,
        dx: (right - left) / (2.0 * dx),
        dxx: (right - 2.0 * center + left) / (dx * dx),
        dtau: dtau_value,
    };
    pressure_operator(&jet, model)
}

/// The seven terms of the operator applied to `w+`, grouped so that the
/// single-block identities cancel exactly:
///
/// `(w3)_xx (w1 + w2 - 1)`, `(w1)_xx (w3 + w2 - 1)`, `-2p/(p-1) (w1)_x (w3)_x`,
/// `2(p-1)(w1 - 1)(w3 - 1)`, `2(p-1) w2 (w1 + w3 - 2)`,
/// `-p q lambda T' (w1)_x`, `p q lambda' T' (w3)_x` with `T = tau e^{(p-1) tau / p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LwTerms {
    pub terms: [f64; 7],
}

impl LwTerms {
    pub fn value(&self) -> f64 {
        self.terms.iter().sum()
    }

    pub fn scale(&self) -> f64 {
        self.terms.iter().map(|t| t.abs()).sum()
    }

    /// The two `q` terms; both are `<= 0` once `tau < -p/(p-1)`.
    pub fn q_terms(&self) -> f64 {
        self.terms[5] + self.terms[6]
    }

    pub fn relative(&self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            0.0
        } else {
            self.value() / s
        }
    }
}

/// Block values of both barriers at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierEval {
    pub x: f64,
    pub tau: f64,
    /// Slowed wave arguments used by `w+`.
    pub z: f64,
    pub zbar: f64,
    /// `w1`, `w2 = xi_k - 1`, `w3`.
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub wminus: f64,
    pub wplus: f64,
    /// `w+ - 1 = (w1 - 1) + w2 + (w3 - 1)`.
    pub wplus_excess: f64,
    pub wminus_excess: f64,
}

/// Everything needed to evaluate `w-`, `w+` and `L(w+)`.
#[derive(Debug, Clone)]
pub struct Barriers {
    pub params: AncientParams,
    pub model: ModelParams,
    pub left: Arc<WaveProfile>,
    pub right: Arc<WaveProfile>,
}

struct Blocks {
    z: f64,
    zbar: f64,
    j1: PressureJet1,
    j3: PressureJet1,
    w2: f64,
    dz_dtau: f64,
    dzbar_dtau: f64,
    tprime: f64,
}

impl Barriers {
    /// Solves both wave profiles on their default grids.
    pub fn new(params: AncientParams, model: ModelParams) -> Result<Self> {
        params.validate()?;
        let left = Arc::new(WaveProfile::solve(
            params.lambda,
            &model,
            WaveGrid::for_speed(params.lambda, &model)?,
        )?);
        let right = if params.lambda2 == params.lambda {
            left.clone()
        } else {
            Arc::new(WaveProfile::solve(
                params.lambda2,
                &model,
                WaveGrid::for_speed(params.lambda2, &model)?,
            )?)
        };
        Ok(Self {
            params,
            model,
            left,
            right,
        })
    }

    pub fn from_profiles(params: AncientParams, left: Arc<WaveProfile>, right: Arc<WaveProfile>) -> Result<Self> {
        params.validate()?;
        if left.lambda != params.lambda || right.lambda != params.lambda2 {
            return Err(Error::Config(format!(
                "profile speeds ({}, {}) do not match parameters ({}, {})",
                left.lambda, right.lambda, params.lambda, params.lambda2
            )));
        }
        if left.model != right.model {
            return Err(Error::Config("profiles were solved for different n".into()));
        }
        Ok(Self {
            params,
            model: left.model,
            left,
            right,
        })
    }

    /// Same profiles, different parameters with equal speeds.
    pub fn with_params(&self, params: AncientParams) -> Result<Self> {
        Self::from_profiles(params, self.left.clone(), self.right.clone())
    }

    /// Barriers for the swapped parameters (`x -> -x`).
    pub fn reflected(&self) -> Self {
        Self {
            params: self.params.reflected(),
            model: self.model,
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    /// Largest decay exponent the barriers contain.
    pub fn min_gamma(&self) -> f64 {
        self.left.gamma.min(self.right.gamma)
    }

    fn check_time(&self, tau: f64) -> Result<()> {
        if self.params.k > 0.0 && tau >= cylinder_blowup_time(self.params.k, &self.model) {
            return Err(Error::Range(format!(
                "tau = {tau} is at or past the cylinder blow-up time"
            )));
        }
        Ok(())
    }

    fn blocks(&self, x: f64, tau: f64) -> Result<Blocks> {
        self.check_time(tau)?;
        let a = self.model.cylinder_rate();
        let ps = &self.params;
        let s = (a * tau).exp();
        let slow = 1.0 - ps.q * s;
        let tprime = s * (1.0 + a * tau);
        let z = x - ps.lambda * tau * slow + ps.h;
        let zbar = -x - ps.lambda2 * tau * slow + ps.h2;
        Ok(Blocks {
            z,
            zbar,
            j1: self.left.pressure_jet(z),
            j3: self.right.pressure_jet(zbar),
            w2: cylinder_excess(tau, ps.k, &self.model)?,
            dz_dtau: -ps.lambda * (1.0 - ps.q * tprime),
            dzbar_dtau: -ps.lambda2 * (1.0 - ps.q * tprime),
            tprime,
        })
    }

    /// Excess `w- - 1` of the subsolution, the max of three exact solutions.
    pub fn lower_excess(&self, x: f64, tau: f64) -> Result<f64> {
        self.check_time(tau)?;
        let ps = &self.params;
        let e1 = self.left.pressure_jet(x - ps.lambda * tau + ps.h).excess;
        let e3 = self.right.pressure_jet(-x - ps.lambda2 * tau + ps.h2).excess;
        let w2 = cylinder_excess(tau, ps.k, &self.model)?;
        Ok(e1.max(w2).max(e3))
    }

    pub fn lower_barrier(&self, x: f64, tau: f64) -> Result<f64> {
        Ok(1.0 + self.lower_excess(x, tau)?)
    }

    pub fn upper_barrier(&self, x: f64, tau: f64) -> Result<f64> {
        Ok(1.0 + self.upper_jet(x, tau)?.excess)
    }

    pub fn eval(&self, x: f64, tau: f64) -> Result<BarrierEval> {
        let b = self.blocks(x, tau)?;
        let wminus_excess = self.lower_excess(x, tau)?;
        let wplus_excess = (b.j1.excess + b.j3.excess) + b.w2;
        Ok(BarrierEval {
            x,
            tau,
            z: b.z,
            zbar: b.zbar,
            w1: b.j1.value(),
            w2: b.w2,
            w3: b.j3.value(),
            wminus: 1.0 + wminus_excess,
            wplus: 1.0 + wplus_excess,
            wplus_excess,
            wminus_excess,
        })
    }

    /// `w+` with analytic derivatives in `x` and `tau`.
    pub fn upper_jet(&self, x: f64, tau: f64) -> Result<PressureJet> {
        let b = self.blocks(x, tau)?;
        let a = self.model.cylinder_rate();
        Ok(PressureJet {
            excess: (b.j1.excess + b.j3.excess) + b.w2,
            dx: b.j1.d1 - b.j3.d1,
            dxx: b.j1.d2 + b.j3.d2,
            dtau: (b.j1.d1 * b.dz_dtau + b.j3.d1 * b.dzbar_dtau) + a * (1.0 + b.w2) * b.w2,
        })
    }

    /// Grouped terms of `L(w+)`.
    pub fn lw_terms(&self, x: f64, tau: f64) -> Result<LwTerms> {
        let b = self.blocks(x, tau)?;
        let m = &self.model;
        let ps = &self.params;
        let (e1, e3, w2) = (b.j1.excess, b.j3.excess, b.w2);
        let (w1x, w1xx) = (b.j1.d1, b.j1.d2);
        let (w3x, w3xx) = (-b.j3.d1, b.j3.d2);
        let terms = [
            w3xx * (e1 + w2),
            w1xx * (e3 + w2),
            -2.0 * m.p / m.pm1 * w1x * w3x,
            2.0 * m.pm1 * e1 * e3,
            2.0 * m.pm1 * w2 * (e1 + e3),
            -m.p * ps.q * ps.lambda * b.tprime * w1x,
            m.p * ps.q * ps.lambda2 * b.tprime * w3x,
        ];
        if terms.iter().any(|t| !t.is_finite()) {
            return Err(Error::Evaluation(format!(
                "non-finite L(w+) terms at x = {x}, tau = {tau}"
            )));
        }
        Ok(LwTerms { terms })
    }

    /// `L(w+)` through the grouped terms.
    pub fn operator_upper(&self, x: f64, tau: f64) -> Result<OperatorValue> {
        let t = self.lw_terms(x, tau)?;
        Ok(OperatorValue {
            value: t.value(),
            scale: t.scale(),
        })
    }

    /// Wave arguments `(z, zbar)` of `w+`.
    pub fn wave_arguments(&self, x: f64, tau: f64) -> (f64, f64) {
        let a = self.model.cylinder_rate();
        let ps = &self.params;
        let slow = 1.0 - ps.q * (a * tau).exp();
        (x - ps.lambda * tau * slow + ps.h, -x - ps.lambda2 * tau * slow + ps.h2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{cylinder, SphereSteady};

    fn barriers(lambda: f64, lambda2: f64, k: f64, q: f64) -> Barriers {
        let m = ModelParams::new(4).unwrap();
        Barriers::new(AncientParams::new(lambda, lambda2, 0.3, -0.2, k, q, -10.0).unwrap(), m).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(AncientParams::new(0.9, 2.0, 0.0, 0.0, 0.0, 0.1, -1.0).is_err());
        assert!(AncientParams::new(2.0, 2.0, 0.0, 0.0, -1.0, 0.1, -1.0).is_err());
        assert!(AncientParams::new(2.0, 2.0, 0.0, 0.0, 1.0, -0.1, -1.0).is_err());
        assert!(AncientParams::new(2.0, 2.0, 0.0, 0.0, 1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn operator_vanishes_on_exact_solutions() {
        let m = ModelParams::new(4).unwrap();
        let one = PressureJet::default();
        assert_eq!(pressure_operator(&one, &m).unwrap().value, 0.0);

        // cylinder
        let (k, tau) = (0.7, -2.0);
        let xi = cylinder(tau, k, &m).unwrap();
        let jet = PressureJet {
            excess: xi - 1.0,
            dx: 0.0,
            dxx: 0.0,
            dtau: m.cylinder_rate() * xi * (xi - 1.0),
        };
        assert!(pressure_operator(&jet, &m).unwrap().value.abs() < 1e-12);

        // traveling wave v(x - lambda tau + h)
        let b = barriers(2.0, 2.0, 0.0, 0.0);
        for i in 0..200 {
            let y = -20.0 + 0.2 * i as f64;
            let j = b.left.pressure_jet(y);
            let jet = PressureJet {
                excess: j.excess,
                dx: j.d1,
                dxx: j.d2,
                dtau: -2.0 * j.d1,
            };
            let r = pressure_operator(&jet, &m).unwrap().relative();
            assert!(r.abs() < 1e-8, "y = {y}: {r:e}");
        }

        // sphere steady state
        let s = SphereSteady::new(&m);
        for i in 0..100 {
            let x = -10.0 + 0.2 * i as f64;
            let (phi, d1, d2) = s.jet(x);
            let u = phi.powf(-m.pm1);
            let ux = -m.pm1 * u / phi * d1;
            let uxx = -m.pm1 * u / phi * d2 + m.pm1 * (m.pm1 + 1.0) * u / (phi * phi) * d1 * d1;
            let jet = PressureJet {
                excess: u - 1.0,
                dx: ux,
                dxx: uxx,
                dtau: 0.0,
            };
            assert!(pressure_operator(&jet, &m).unwrap().relative().abs() < 1e-12);
        }
    }

    #[test]
    fn grouped_terms_match_direct_operator() {
        let b = barriers(2.0, 3.0, 0.5, 0.4);
        let m = b.model;
        for i in 0..60 {
            let x = -15.0 + 0.5 * i as f64;
            for tau in [-12.0, -6.0, -3.0] {
                let direct = pressure_operator(&b.upper_jet(x, tau).unwrap(), &m).unwrap();
                let grouped = b.lw_terms(x, tau).unwrap();
                let err = (direct.value - grouped.value()).abs();
                assert!(
                    err <= 1e-7 * direct.scale,
                    "x={x} tau={tau}: {err:e} vs {:e}",
                    direct.scale
                );
            }
        }
    }

    #[test]
    fn barrier_structure() {
        let b = barriers(2.0, 3.0, 0.5, 0.4);
        for i in 0..400 {
            let x = -40.0 + 0.2 * i as f64;
            let e = b.eval(x, -8.0).unwrap();
            assert!(e.wplus >= e.wminus);
            assert!(e.wplus >= e.w1.max(e.w2 + 1.0).max(e.w3));
            let t = b.lw_terms(x, -8.0).unwrap();
            assert!(t.terms[5] <= 0.0 && t.terms[6] <= 0.0);
        }
    }

    #[test]
    fn reflection_equivariance() {
        let b = barriers(2.0, 3.0, 0.5, 0.4);
        let r = b.reflected();
        for i in 0..50 {
            let x = -10.0 + 0.4 * i as f64;
            let (e, f) = (b.eval(x, -5.0).unwrap(), r.eval(-x, -5.0).unwrap());
            assert_eq!(e.wplus, f.wplus);
            assert_eq!(e.wminus, f.wminus);
        }
    }

    #[test]
    fn symmetric_lower_barrier_is_even_and_cylindrical_at_center() {
        let m = ModelParams::new(4).unwrap();
        let b = Barriers::new(AncientParams::symmetric(2.0, 0.0, 1.0, 0.3, -10.0).unwrap(), m).unwrap();
        for i in 0..40 {
            let x = 0.5 * i as f64;
            assert_eq!(b.lower_barrier(x, -7.0).unwrap(), b.lower_barrier(-x, -7.0).unwrap());
        }
        let tau = -30.0;
        let xi = cylinder(tau, 1.0, &m).unwrap();
        assert_eq!(b.lower_barrier(0.0, tau).unwrap(), xi);
    }

    #[test]
    fn blow_up_is_a_range_error() {
        let b = barriers(2.0, 2.0, 1.0, 0.1);
        assert!(matches!(b.eval(0.0, 0.0), Err(Error::Range(_))));
    }
}
