//! Certifies the upper barrier as a supersolution: searches the smallest
//! admissible `q`, then shows that `q = 0` fails.

use yamabe_ancients::barriers::{
    certify_supersolution, decay_rate, find_q, intersection_point, AncientParams, Barriers, CertBox, CertGrid,
};
use yamabe_ancients::{ModelParams, Result};

fn main() -> Result<()> {
    let model = ModelParams::new(4)?;
    let params = AncientParams::new(2.0, 2.0, 0.0, 0.0, 1.0, 0.0, -10.0)?;
    let barriers = Barriers::new(params, model)?;
    let cert_box = CertBox::new(-60.0, 60.0, -40.0, -10.0)?;
    let grid = CertGrid::default();

    let search = find_q(&barriers, &cert_box, &grid, 0.1, 100.0)?;
    println!("q = {} ({:?})", search.params.q, search.report.verdict);
    println!(
        "  maxL = {:.3e} at (x, tau) = {:?}",
        search.report.max_l_global, search.report.argmax
    );
    println!("  binding region: {:?}", search.report.binding_region());
    for step in &search.history {
        println!(
            "  tried q = {:<8.5} {:?}  maxL = {:.3e}",
            step.q, step.verdict, step.max_l_global
        );
    }

    let control = certify_supersolution(&barriers, &cert_box, &grid)?;
    println!(
        "q = 0 control: {:?}, maxL = {:.3e}",
        control.verdict, control.max_l_global
    );

    let asym = Barriers::new(AncientParams::new(2.0, 3.0, 0.0, 0.0, 1.0, 0.0, -10.0)?, model)?;
    let ip = intersection_point(&asym, -40.0)?;
    let rate = decay_rate(&asym, -40.0, 0.01)?;
    println!(
        "lambda = 2, lambda' = 3 at tau = -40: x = {:.4}, predicted {:.4}; decay {:.5} vs {:.5}",
        ip.x, ip.predicted, rate.measured, rate.predicted
    );
    Ok(())
}
