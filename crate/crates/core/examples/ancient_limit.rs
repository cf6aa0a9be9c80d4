//! Runs started further back in time approach a common limit: the sup
//! distance between consecutive start times shrinks.

use rayon::prelude::*;
use yamabe_ancients::barriers::{AncientParams, Barriers};
use yamabe_ancients::evolution::{
    calibrate_sandwich, cauchy_in_m, evolve_uncertified, EvolveConfig, EvolveRun, TimeScheme,
};
use yamabe_ancients::geometry::{polar_frame, PolarWindow};
use yamabe_ancients::{ModelParams, Result};

fn main() -> Result<()> {
    let model = ModelParams::new(4)?;
    let barriers = Barriers::new(AncientParams::symmetric(2.0, 0.0, 1.0, 0.43, -10.0)?, model)?;
    let runs = [20.0, 30.0, 40.0]
        .par_iter()
        .map(|&m| {
            let config = EvolveConfig {
                m,
                scheme: TimeScheme::ExtrapolatedEuler,
                snapshot_interval: 1.0,
                ..EvolveConfig::default()
            };
            let cal = calibrate_sandwich(&config, &barriers)?;
            evolve_uncertified(&config, &barriers, &cal)
        })
        .collect::<Result<Vec<EvolveRun>>>()?;
    let fields: Vec<_> = runs.iter().map(|r| &r.field).collect();
    for x0 in [5.0, 20.0] {
        let report = cauchy_in_m(&fields, x0)?;
        println!(
            "|x| <= {x0}: D12 = {:.4e}, D23 = {:.4e}, contracting = {}",
            report.consecutive[0], report.consecutive[1], report.contracting
        );
    }

    let field = &runs[2].field;
    let j = field.times.len() - 1;
    let window = PolarWindow {
        lambda: 2.0,
        h: 0.0,
        tau: field.times[j],
        m: 1.0,
    };
    let radii: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
    let phi_hat = polar_frame(field.x_min, field.dx, &field.phi(j), &window, &radii, &model)?;
    for (r, v) in radii.iter().zip(&phi_hat) {
        println!("r = {r:.2}: rescaled phi = {v:.6}");
    }
    Ok(())
}
