//! Curvature of the evolving metric: the exact cylinder and sphere have
//! constant curvature, the certified ancient solution stays below twice its
//! early plateau.

use yamabe_ancients::barriers::{certify_supersolution, AncientParams, Barriers, CertBox, CertGrid};
use yamabe_ancients::evolution::{
    calibrate_sandwich, evolve, evolve_exact, CylinderSolution, EvolveConfig, SphereSolution, TimeScheme,
};
use yamabe_ancients::geometry::{curvature_report, type1_monitor, MonitorSettings};
use yamabe_ancients::profiles::SphereSteady;
use yamabe_ancients::{ModelParams, Result};

fn main() -> Result<()> {
    let model = ModelParams::new(4)?;
    let settings = MonitorSettings::default();

    let short = EvolveConfig {
        m: 12.0,
        tau_end: -10.0,
        x_half: 20.0,
        snapshot_interval: 0.5,
        ..EvolveConfig::default()
    };
    let cylinder = evolve_exact(&short, &model, &CylinderSolution { k: 0.0, model })?;
    let sphere = evolve_exact(
        &short,
        &model,
        &SphereSolution {
            steady: SphereSteady::new(&model),
            model,
        },
    )?;
    for (name, run) in [("cylinder", &cylinder), ("sphere", &sphere)] {
        let r = curvature_report(&run.field, &settings)?;
        let first = r.sup_norms.first().unwrap();
        let last = r.sup_norms.last().unwrap();
        println!(
            "{name}: |Rm| {:.6} -> {:.6}, R {:.6} -> {:.6}",
            first.tensor, last.tensor, first.r_tilde, last.r_tilde
        );
    }

    let params = AncientParams::symmetric(2.0, 0.0, 1.0, 0.43, -10.0)?;
    let barriers = Barriers::new(params, model)?;
    let cert = certify_supersolution(
        &barriers,
        &CertBox::new(-60.0, 60.0, -40.0, -10.0)?,
        &CertGrid::default(),
    )?;
    let config = EvolveConfig {
        scheme: TimeScheme::ExtrapolatedEuler,
        snapshot_interval: 2.0,
        ..EvolveConfig::default()
    };
    let cal = calibrate_sandwich(&config, &barriers)?;
    let run = evolve(&config, &barriers, &cert, &cal)?;
    let r = type1_monitor(&run, &settings)?;
    for s in &r.sup_norms {
        println!(
            "tau = {:6.1}: |Rm| = {:.4}, K_rad = {:.4}, K_tan = {:.4}",
            s.tau, s.tensor, s.k_rad, s.k_tan
        );
    }
    println!("plateau {:.4}, max {:.4}: {:?}", r.plateau, r.max_tensor, r.verdict);
    Ok(())
}
