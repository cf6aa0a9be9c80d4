use yamabe_ancients::profiles::{
    barenblatt_psi, fit_king_exponents, gamma_exponent, king_closed_form, king_integrate, king_pressure, KingState,
    WaveGrid, WaveProfile,
};
use yamabe_ancients::ModelParams;

/// Eighth-order central differences for the first two derivatives.
fn fd_derivatives(f: &dyn Fn(f64) -> f64, y: f64, h: f64) -> (f64, f64) {
    let c1 = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    let c2 = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let f0 = f(y);
    let (mut d1, mut d2) = (0.0, -205.0 / 72.0 * f0);
    for (k, (a, b)) in c1.iter().zip(&c2).enumerate() {
        let s = (k + 1) as f64 * h;
        let (fp, fm) = (f(y + s), f(y - s));
        d1 += a * (fp - fm);
        d2 += b * (fp + fm);
    }
    (d1 / h, d2 / (h * h))
}

fn fd_residual(prof: &WaveProfile, y: f64) -> f64 {
    let m = prof.model;
    let f = |t: f64| prof.psi_at(t);
    let (d1, d2) = fd_derivatives(&f, y, 0.02);
    let psi = f(y);
    let terms = [d2, prof.lambda * m.p * psi.powf(m.pm1) * d1, psi.powf(m.p) - psi];
    let scale: f64 = terms.iter().map(|t| t.abs()).sum();
    (terms[0] + terms[1] + terms[2]).abs() / scale
}

#[test]
fn solved_waves_satisfy_the_ode_by_finite_differences() {
    for (n, lambda) in [(3, 2.0), (4, 2.0), (4, 1.5), (5, 3.0), (6, 1.2)] {
        let m = ModelParams::new(n).unwrap();
        let prof = WaveProfile::solve(lambda, &m, WaveGrid::for_speed(lambda, &m).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        let mut y = -15.0;
        while y < 15.0 {
            worst = worst.max(fd_residual(&prof, y));
            y += 0.137;
        }
        assert!(worst < 1e-8, "n={n} lambda={lambda}: FD residual {worst:e}");
        assert!(prof.interp_error < 1e-8, "n={n} lambda={lambda}: {}", prof.interp_error);
        assert!(prof.center_error < 1e-9);
    }
}

#[test]
fn right_tail_log_slope_matches_gamma() {
    let m = ModelParams::new(3).unwrap();
    let prof = WaveProfile::solve(2.0, &m, WaveGrid::for_speed(2.0, &m).unwrap()).unwrap();
    let (y0, y1) = (40.0, 60.0);
    let slope = (prof.eval(y1).eta.ln() - prof.eval(y0).eta.ln()) / (y1 - y0);
    let expected = (10.0 - 84f64.sqrt()) / 2.0;
    assert!((slope + expected).abs() < 0.01 * expected, "slope {slope}");
    assert!((prof.gamma - 0.417424).abs() < 1e-6);
}

#[test]
fn near_barenblatt_speed_approaches_closed_form() {
    for n in [3, 4] {
        let m = ModelParams::new(n).unwrap();
        let lambda = 1.0 + 1e-6;
        let prof = WaveProfile::solve(lambda, &m, WaveGrid::for_speed(lambda, &m).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let y = -10.0 + 0.1 * i as f64;
            worst = worst.max((prof.psi_at(y) - barenblatt_psi(y, &m)).abs());
        }
        assert!(worst < 1e-3, "n={n}: {worst:e}");
    }
}

#[test]
fn sidecar_round_trips() {
    let m = ModelParams::new(4).unwrap();
    let prof = WaveProfile::solve(2.0, &m, WaveGrid::for_speed(2.0, &m).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("profile");
    prof.write_files(&stem).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).unwrap()).unwrap();
    for key in ["lambda", "p", "n", "gamma", "C", "ygrid"] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    let g = gamma_exponent(2.0, &m).unwrap().gamma;
    assert!((json["gamma"].as_f64().unwrap() - g).abs() < 1e-12);
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("y,psi,v"));
    assert_eq!(csv.lines().count(), prof.grid.len() + 1);
}

#[test]
fn king_backward_exponents() {
    let m = ModelParams::new(4).unwrap();
    let s = KingState::new(-5.0, 1.001, 1e-6).unwrap();
    let traj = king_integrate(&s, -40.0, 400, 1e6, &m).unwrap();
    assert!(!traj.blew_up);
    assert!(traj.states.iter().all(|s| s.zeta > 0.0));
    let fit = fit_king_exponents(&traj, 0.5, &m).unwrap();
    assert!(fit.xi_rel_err < 0.02, "{fit:?}");
    assert!(fit.zeta_rel_err < 0.02, "{fit:?}");
}

#[test]
fn king_closed_form_transplants_to_cosh_shape() {
    // with x = (2/(p-1)) ln r, r^{-2}(1 + 2 b r^2 + r^4)/a = (2/a)(b + cosh((p-1)x))
    let m = ModelParams::new(5).unwrap();
    let (a, b) = (0.7, 1.3);
    for i in 0..50 {
        let x = -3.0 + 0.12 * i as f64;
        let r = (0.5 * m.pm1 * x).exp();
        let u_hat = king_pressure(r, a, b).unwrap();
        let transplanted = u_hat * r.powi(-2);
        let cosh_form = 2.0 / a * (b + (m.pm1 * x).cosh());
        assert!((transplanted / cosh_form - 1.0).abs() < 1e-12);
        let phi = king_closed_form(r, a, b, &m).unwrap();
        assert!((u_hat * phi.powf(m.pm1) - 1.0).abs() < 1e-12);
    }
}
