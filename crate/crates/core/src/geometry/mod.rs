//! Coordinate changes between radial, cylindrical and polar gauges, and
//! curvature monitors for conformally flat rotationally symmetric metrics.

mod coords;
mod curvature;
mod monitor;

pub use coords::{
    cylindrical_from_radial, polar_frame, radial_from_cylindrical, CylindricalSlice, GaugeConstants, PolarWindow,
    RadialSlice,
};
pub use curvature::{
    fit_trace_constant, scalar_curvature_normalized, sectional_curvatures, tensor_norm, trace_from_sectional,
    CurvatureProfile, SupNorms,
};
pub use monitor::{curvature_report, type1_monitor, CurvatureReport, GaugeHeader, MonitorSettings};
