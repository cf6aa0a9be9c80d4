use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coords::GaugeConstants;
use super::curvature::{fit_trace_constant, CurvatureProfile, SupNorms};
use crate::barriers::Verdict;
use crate::error::{Error, Result};
use crate::evolution::{EvolveRun, SpaceTimeField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorSettings {
    /// Nodes with `phi^{p-1}` below this are left out of the profiles.
    pub rho2_floor: f64,
    /// Fraction of the snapshots, counted from the earliest, that defines the plateau.
    pub plateau_fraction: f64,
    /// Allowed growth of the tensor norm over the plateau.
    pub growth_factor: f64,
}

impl Default for MonitorSettings {
    fn default() -> Self {
        Self {
            rho2_floor: 1e-8,
            plateau_fraction: 0.25,
            growth_factor: 2.0,
        }
    }
}

/// Normalization recorded with every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeHeader {
    /// `(2(n-1) K_rad + (n-1)(n-2) K_tan) / R~`, fitted on the cylinder.
    pub trace_constant: f64,
    /// Curvatures of the unnormalized gauge are these divided by `metric_scale`.
    pub metric_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub n: u32,
    pub gauge: GaugeHeader,
    pub settings: MonitorSettings,
    pub times: Vec<f64>,
    pub profiles: Vec<CurvatureProfile>,
    pub sup_norms: Vec<SupNorms>,
    /// Largest tensor norm over the early snapshots.
    pub plateau: f64,
    pub max_tensor: f64,
    pub verdict: Verdict,
}

/// Curvature profiles of every snapshot of `field`.
pub fn curvature_report(field: &SpaceTimeField, settings: &MonitorSettings) -> Result<CurvatureReport> {
    let model = field.model;
    if field.times.is_empty() {
        return Err(Error::Config("field has no snapshots".into()));
    }
    let profiles = (0..field.times.len())
        .into_par_iter()
        .map(|j| {
            CurvatureProfile::compute(
                field.times[j],
                field.x_min,
                field.dx,
                &field.phi(j),
                settings.rho2_floor,
                &model,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let sup_norms: Vec<SupNorms> = profiles.iter().map(|p| p.sup_norms()).collect();
    let gauge = GaugeHeader {
        trace_constant: fit_trace_constant(&model)?,
        metric_scale: GaugeConstants::new(&model).metric_scale(),
    };

    let mut order: Vec<usize> = (0..sup_norms.len()).collect();
    order.sort_by(|&a, &b| sup_norms[a].tau.total_cmp(&sup_norms[b].tau));
    let early = ((order.len() as f64 * settings.plateau_fraction).ceil() as usize).clamp(1, order.len());
    let plateau = order[..early].iter().map(|&j| sup_norms[j].tensor).fold(0.0, f64::max);
    let max_tensor = sup_norms.iter().map(|s| s.tensor).fold(0.0, f64::max);
    let finite = profiles.iter().all(|p| p.is_finite() && !p.x.is_empty());
    let verdict = if !finite || order.len() < 2 {
        Verdict::Inconclusive
    } else if max_tensor <= settings.growth_factor * plateau {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CurvatureReport {
        n: model.n,
        gauge,
        settings: *settings,
        times: field.times.clone(),
        profiles,
        sup_norms,
        plateau,
        max_tensor,
        verdict,
    })
}

/// Type-I monitor of a certified evolution run: the tensor norm may not grow
/// beyond `growth_factor` times its early-time plateau.
pub fn type1_monitor(run: &EvolveRun, settings: &MonitorSettings) -> Result<CurvatureReport> {
    if !run.certified {
        return Err(Error::Uncertified(
            "the type-I monitor needs a certified evolution run".into(),
        ));
    }
    curvature_report(&run.field, settings)
}
