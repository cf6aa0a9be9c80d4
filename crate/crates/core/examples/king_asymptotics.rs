//! Backward integration of the King ODE and the fitted exponents of
//! `xi - 1` and `zeta` as `tau -> -inf`.

use yamabe_ancients::profiles::{fit_king_exponents, king_integrate, KingState};
use yamabe_ancients::{ModelParams, Result};

fn main() -> Result<()> {
    let model = ModelParams::new(4)?;
    let start = KingState::new(-5.0, 1.001, 1e-6)?;
    let traj = king_integrate(&start, -40.0, 400, 1e6, &model)?;
    let fit = fit_king_exponents(&traj, 0.5, &model)?;
    println!("samples: {}", traj.states.len());
    println!(
        "xi - 1 ~ e^(s tau):  s = {:.5}, target {:.5}, rel err {:.2e}",
        fit.xi_slope, fit.xi_target, fit.xi_rel_err
    );
    println!(
        "zeta   ~ e^(s tau):  s = {:.5}, target {:.5}, rel err {:.2e}",
        fit.zeta_slope, fit.zeta_target, fit.zeta_rel_err
    );

    let forward = king_integrate(&start, 5.0, 200, 1e6, &model)?;
    let last = forward.states.last().unwrap();
    println!(
        "forward to tau = 5: blew up = {}, last tau = {:.3}, xi = {:.4e}",
        forward.blew_up, last.tau, last.xi
    );
    Ok(())
}
