//! Traveling-wave profiles for a few speeds, compared with the Barenblatt
//! closed form and the predicted tail exponent.

use yamabe_ancients::profiles::{barenblatt_psi, gamma_exponent, WaveGrid, WaveProfile};
use yamabe_ancients::{ModelParams, Result};

fn main() -> Result<()> {
    let model = ModelParams::new(4)?;
    println!("n = {}, p = {}", model.n, model.p);

    let near = WaveProfile::solve(1.0 + 1e-6, &model, WaveGrid::new(-30.0, 40.0, 0.01)?)?;
    let sup = (-1000..=1000)
        .map(|i| i as f64 * 0.01)
        .map(|y| (near.psi_at(y) - barenblatt_psi(y, &model)).abs())
        .fold(0.0, f64::max);
    println!("lambda = 1 + 1e-6: sup |psi - Barenblatt| on [-10, 10] = {sup:.2e}");

    for lambda in [1.5, 2.0, 3.0] {
        let wave = WaveProfile::solve(lambda, &model, WaveGrid::for_speed(lambda, &model)?)?;
        let g = gamma_exponent(lambda, &model)?;
        println!(
            "lambda = {lambda}: gamma = {:.6} (roots {:.6}, {:.6}), C = {:.4e}, A = {:.4e}, interp error {:.1e}",
            wave.gamma, g.gamma, g.larger_root, wave.c_decay, wave.left_amplitude, wave.interp_error
        );
        for y in [-5.0, 0.0, 5.0] {
            println!("    psi({y:+.0}) = {:.6}", wave.psi_at(y));
        }
    }
    Ok(())
}
