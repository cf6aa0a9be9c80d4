//! Evolves the certified symmetric configuration from `tau = -30` and checks
//! that the solution stays between the barriers. The same run with `q = 0`
//! leaves the upper barrier.

use yamabe_ancients::barriers::{AncientParams, Barriers};
use yamabe_ancients::evolution::{calibrate_sandwich, evolve_uncertified, sandwich_check, EvolveConfig, TimeScheme};
use yamabe_ancients::{ModelParams, Result};

fn main() -> Result<()> {
    let model = ModelParams::new(4)?;
    let config = EvolveConfig {
        scheme: TimeScheme::ExtrapolatedEuler,
        snapshot_interval: 2.0,
        ..EvolveConfig::default()
    };
    let barriers = Barriers::new(AncientParams::symmetric(2.0, 0.0, 1.0, 0.43, -10.0)?, model)?;
    let cal = calibrate_sandwich(&config, &barriers)?;
    println!(
        "exact-solution errors: wave {:.2e}, reflected {:.2e}, cylinder {:.2e}; tol_sand = {:.3e}",
        cal.wave_error, cal.reflected_error, cal.cylinder_error, cal.tol_sand
    );
    for q in [0.43, 0.0] {
        let b = barriers.with_params(barriers.params.with_q(q))?;
        let run = evolve_uncertified(&config, &b, &cal)?;
        let (report, _) = sandwich_check(&run.field, &b, cal.tol_sand)?;
        println!(
            "q = {q}: upper {:.2e} (tau {}), lower {:.2e} (tau {}), pass = {}",
            report.max_upper_violation,
            report.worst_upper_tau,
            report.max_lower_violation,
            report.worst_lower_tau,
            report.pass
        );
    }
    Ok(())
}
