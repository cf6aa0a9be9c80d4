use std::sync::Arc;

use yamabe_ancients::barriers::{AncientParams, Barriers};
use yamabe_ancients::evolution::{
    evolve_exact, evolve_from_source, tracking_error, EvolveConfig, Gauge, PressureSource, SpaceTimeField, TimeScheme,
    TravelingWaveSolution,
};
use yamabe_ancients::profiles::{cylinder_excess, WaveGrid, WaveProfile};
use yamabe_ancients::{ModelParams, Result};

fn model() -> ModelParams {
    ModelParams::new(4).unwrap()
}

fn short(gauge: Gauge) -> EvolveConfig {
    EvolveConfig {
        m: 14.0,
        tau_end: -10.0,
        x_half: 40.0,
        dx: 0.1,
        dtau: 0.02,
        gauge,
        snapshot_interval: 0.5,
        check_interval: 0.5,
        ..EvolveConfig::default()
    }
}

fn barriers() -> Barriers {
    Barriers::new(AncientParams::symmetric(2.0, 0.0, 1.0, 0.43, -10.0).unwrap(), model()).unwrap()
}

fn plain(config: &EvolveConfig, source: &dyn PressureSource) -> SpaceTimeField {
    let none = |_: f64, _: &[f64]| -> Result<Option<(f64, f64)>> { Ok(None) };
    evolve_from_source(config, &model(), source, &none).unwrap().0
}

struct Lower(Barriers);

impl PressureSource for Lower {
    fn excess(&self, x: f64, tau: f64) -> Result<f64> {
        self.0.lower_excess(x, tau)
    }
}

fn gauge_gap(dx: f64, dtau: f64, wave: &TravelingWaveSolution) -> (f64, f64) {
    let m = model();
    let config = |gauge| EvolveConfig {
        dx,
        dtau,
        ..short(gauge)
    };
    let conformal = evolve_exact(&config(Gauge::Conformal), &m, wave).unwrap().field;
    let pressure = evolve_exact(&config(Gauge::Pressure), &m, wave).unwrap().field;
    let mut diff: f64 = 0.0;
    for j in 0..conformal.times.len() {
        for (a, b) in conformal.phi(j).iter().zip(pressure.phi(j)) {
            diff = diff.max((a / b - 1.0).abs());
        }
    }
    let back = pressure.to_gauge(Gauge::Conformal);
    assert!(back.values[3]
        .iter()
        .zip(pressure.phi(3))
        .all(|(a, b)| (a - b).abs() < 1e-14));
    (diff, tracking_error(&pressure, wave).unwrap())
}

#[test]
fn pressure_gauge_matches_conformal_gauge() {
    let m = model();
    let profile = Arc::new(WaveProfile::solve(2.0, &m, WaveGrid::for_speed(2.0, &m).unwrap()).unwrap());
    let wave = TravelingWaveSolution {
        profile,
        h: 0.5,
        reflected: true,
    };
    let (coarse, _) = gauge_gap(0.1, 0.02, &wave);
    let (fine, err) = gauge_gap(0.05, 0.005, &wave);
    // both gauges converge to the same solution at the scheme's rate
    assert!(fine < coarse / 3.0, "gauge gap {coarse:e} -> {fine:e}");
    assert!(
        fine < 0.05 && err < 0.05,
        "gap {fine:e}, pressure tracking error {err:e}"
    );
}

#[test]
fn ordered_data_stay_ordered() {
    let b = barriers();
    let config = short(Gauge::Conformal);
    let upper = plain(&config, &b);
    let lower = plain(&config, &Lower(b.clone()));
    for j in 0..upper.times.len() {
        let (u, l) = (upper.pressure(j), lower.pressure(j));
        for i in 0..upper.nodes {
            assert!(
                l[i] <= u[i] * (1.0 + 1e-12),
                "tau {} x {}: {} > {}",
                upper.times[j],
                upper.x(i),
                l[i],
                u[i]
            );
        }
    }
}

#[test]
fn symmetric_parameters_give_symmetric_fields() {
    let field = plain(&short(Gauge::Conformal), &barriers());
    let n = field.nodes;
    for j in 0..field.times.len() {
        let phi = field.phi(j);
        for i in 0..n / 2 {
            assert!((phi[i] / phi[n - 1 - i] - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn conformal_factor_obeys_the_maximum_principle() {
    let b = barriers();
    let config = short(Gauge::Conformal);
    let field = plain(&config, &b);
    let mut floor = field.phi(0).iter().cloned().fold(f64::INFINITY, f64::min);
    for s in 0..=config.steps() {
        let tau = -config.m + s as f64 * config.dtau;
        for x in [-config.x_half, config.x_half] {
            floor = floor.min(b.upper_barrier(x, tau).unwrap().powf(-1.0 / model().pm1));
        }
    }
    for j in 0..field.times.len() {
        for v in field.phi(j) {
            assert!(v <= 1.0, "phi = {v} above 1");
            assert!(v >= floor * (1.0 - 1e-9), "phi = {v} below the data minimum {floor}");
        }
    }
}

fn center_gap(m: f64) -> f64 {
    let b = barriers();
    let config = EvolveConfig {
        m,
        scheme: TimeScheme::ExtrapolatedEuler,
        ..short(Gauge::Conformal)
    };
    let field = plain(&config, &b);
    let j = field.times.len() - 1;
    let tau = field.times[j];
    let e = field.pressure(j)[field.nodes / 2] - 1.0;
    let (lo, hi) = (
        b.lower_excess(0.0, tau).unwrap(),
        b.eval(0.0, tau).unwrap().wplus_excess,
    );
    assert!(lo <= e && e <= hi * (1.0 + 1e-6), "{lo} {e} {hi}");
    (e / cylinder_excess(tau, 1.0, &model()).unwrap() - 1.0).abs()
}

#[test]
fn center_approaches_the_cylinder() {
    let gaps: Vec<f64> = [12.0, 18.0, 24.0].iter().map(|&m| center_gap(m)).collect();
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = plain(&short(Gauge::Conformal), &barriers());
    let b = plain(
        &EvolveConfig {
            x_half: 30.0,
            ..short(Gauge::Conformal)
        },
        &barriers(),
    );
    assert!(yamabe_ancients::evolution::cauchy_in_m(&[&a, &b], 5.0).is_err());
    let same = yamabe_ancients::evolution::cauchy_in_m(&[&a, &a], 5.0).unwrap();
    assert_eq!(same.consecutive, vec![0.0]);
}
