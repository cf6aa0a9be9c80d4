//! Command-line front end. Every path prints a [`RunManifest`] as JSON on
//! stdout; the process exit code is 0 pass, 1 verified fail, 2 usage or
//! configuration error, 3 inconclusive.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::barriers::{
    certify_supersolution, find_q, AncientParams, Barriers, CertBox, CertGrid, CertificationReport, QSearch, Verdict,
};
use crate::error::{Error, Result};
use crate::evolution::{calibrate_sandwich, cauchy_in_m, evolve, EvolveConfig, EvolveRun, Gauge, TimeScheme};
use crate::geometry::{curvature_report, MonitorSettings};
use crate::io::{configure_threads, read_json, write_curvature_csv, write_json, write_snapshots, RunManifest};
use crate::model::ModelParams;
use crate::profiles::{fit_king_exponents, gamma_exponent, king_integrate, KingState, WaveGrid, WaveProfile};

pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "yamabe-ancients",
    version,
    about = "Ancient solutions of the rescaled Yamabe flow in cylindrical gauge"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a traveling-wave profile and write `<out>.csv` and `<out>.json`.
    Wave(WaveArgs),
    /// Certify the upper barrier on a box, optionally searching for `q`.
    BarrierCheck(BarrierArgs),
    /// Evolve between certified barriers and check the sandwich.
    Evolve(EvolveArgs),
    /// Curvature profiles and the type-I monitor of a run directory.
    Curvature(CurvatureArgs),
    /// Integrate the King system and fit its backward exponents.
    King(KingArgs),
}

#[derive(Debug, Args)]
pub struct WaveArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = -30.0, allow_hyphen_values = true)]
    pub ymin: f64,
    /// Extended to `ceil(30/gamma + 10)` when shorter than the tail needs.
    #[arg(long, allow_hyphen_values = true)]
    pub ymax: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    pub dy: f64,
    #[arg(long, default_value = "profile")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BarrierArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub lambda2: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub h: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub h2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// A number or `auto`.
    #[arg(long, default_value = "auto")]
    pub q: String,
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub tau0: f64,
    #[arg(long = "tau-min", default_value_t = -40.0, allow_hyphen_values = true)]
    pub tau_min: f64,
    /// Half-width of the certification box in `x`.
    #[arg(long = "x-half", default_value_t = 60.0)]
    pub x_half: f64,
    #[arg(long = "tau-samples", default_value_t = 48)]
    pub tau_samples: usize,
    #[arg(long = "tol-l", default_value_t = 1e-7)]
    pub tol_l: f64,
    #[arg(long = "q-seed", default_value_t = 0.1)]
    pub q_seed: f64,
    #[arg(long = "q-cap", default_value_t = 100.0)]
    pub q_cap: f64,
    #[arg(long, default_value = "cert.json")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    ImplicitEuler,
    ExtrapolatedEuler,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// Certification manifest written by `barrier-check`.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 30.0)]
    pub m: f64,
    /// Defaults to the certified `tau0`.
    #[arg(long = "tau-end", allow_hyphen_values = true)]
    pub tau_end: Option<f64>,
    #[arg(long = "X", default_value_t = 80.0)]
    pub x_half: f64,
    #[arg(long, default_value_t = 0.05)]
    pub dx: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dtau: f64,
    /// Number of snapshot intervals over `[-m, tau_end]`.
    #[arg(long, default_value_t = 20)]
    pub snapshots: usize,
    #[arg(long, value_enum, default_value_t = SchemeArg::ExtrapolatedEuler)]
    pub scheme: SchemeArg,
    /// Comma-separated start times for the convergence-in-m report.
    #[arg(long = "compare-m", value_delimiter = ',')]
    pub compare_m: Vec<f64>,
    /// Half-width of the comparison window; defaults to `X/4`.
    #[arg(long = "window-x")]
    pub window_x: Option<f64>,
    #[arg(long, default_value = "run")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long)]
    pub run: PathBuf,
    /// Set the exit code from the type-I verdict.
    #[arg(long)]
    pub verdict: bool,
    #[arg(long = "rho2-floor", default_value_t = 1e-8)]
    pub rho2_floor: f64,
}

#[derive(Debug, Args)]
pub struct KingArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub xi0: f64,
    #[arg(long)]
    pub zeta0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub tau0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub tau1: f64,
    #[arg(long, default_value_t = 400)]
    pub samples: usize,
    /// Share of the samples, from the most negative `tau`, used by the slope fit.
    #[arg(long, default_value_t = 0.5)]
    pub fraction: f64,
    #[arg(long = "xi-cap", default_value_t = 1e6)]
    pub xi_cap: f64,
    /// Relative tolerance of the fitted exponents.
    #[arg(long, default_value_t = 0.02)]
    pub tol: f64,
    #[arg(long, default_value = "king.csv")]
    pub out: PathBuf,
}

/// Exit code for an error: configuration and input problems are usage
/// errors, solver breakdowns are verified failures.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Config(_) | Error::Uncertified(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        _ => 1,
    }
}

/// Parses `args` (including the program name), runs the command, prints
/// the manifest and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            eprint!("{e}");
            let mut m = RunManifest::new("usage");
            m.status = "error".into();
            m.exit_code = EXIT_USAGE;
            m.error = Some(e.kind().to_string());
            emit(&m);
            return EXIT_USAGE;
        }
    };
    let name = match &cli.command {
        Command::Wave(_) => "wave",
        Command::BarrierCheck(_) => "barrier-check",
        Command::Evolve(_) => "evolve",
        Command::Curvature(_) => "curvature",
        Command::King(_) => "king",
    };
    let mut manifest = RunManifest::new(name);
    let outcome = configure_threads().and_then(|cap| {
        manifest.results = json!({ "thread_cap": cap });
        match &cli.command {
            Command::Wave(a) => cmd_wave(a, &mut manifest),
            Command::BarrierCheck(a) => cmd_barrier_check(a, &mut manifest),
            Command::Evolve(a) => cmd_evolve(a, &mut manifest),
            Command::Curvature(a) => cmd_curvature(a, &mut manifest),
            Command::King(a) => cmd_king(a, &mut manifest),
        }
    });
    if let Err(e) = outcome {
        manifest.status = "error".into();
        manifest.exit_code = exit_code_for(&e);
        manifest.error = Some(e.to_string());
        eprintln!("error: {e}");
    }
    emit(&manifest);
    manifest.exit_code
}

fn emit(m: &RunManifest) {
    match serde_json::to_string_pretty(m) {
        Ok(s) => {
            use std::io::Write;
            let _ = writeln!(std::io::stdout().lock(), "{s}");
        }
        Err(e) => eprintln!("error: cannot serialize manifest: {e}"),
    }
}

fn merge(results: &mut serde_json::Value, extra: serde_json::Value) {
    if let (Some(obj), serde_json::Value::Object(more)) = (results.as_object_mut(), extra) {
        obj.extend(more);
    }
}

fn cmd_wave(a: &WaveArgs, manifest: &mut RunManifest) -> Result<()> {
    let model = ModelParams::new(a.n)?;
    let exponent = gamma_exponent(a.lambda, &model)?;
    let needed = if a.lambda == 1.0 {
        0.0
    } else {
        (30.0 / exponent.gamma + 10.0).ceil()
    };
    let requested = a.ymax.unwrap_or(needed.max(60.0));
    let ymax = if a.lambda != 1.0 && requested < 30.0 / exponent.gamma {
        needed
    } else {
        requested
    };
    let grid = WaveGrid::new(a.ymin, ymax, a.dy)?;
    manifest.params = json!({ "n": a.n, "lambda": a.lambda });
    manifest.config = json!({
        "ymin": grid.min,
        "ymax": grid.max,
        "ymax_requested": a.ymax,
        "ymax_extended": ymax != requested,
        "dy": grid.dy,
    });
    let profile = WaveProfile::solve(a.lambda, &model, grid)?;
    if let Some(dir) = a.out.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    profile.write_files(&a.out)?;
    manifest.outputs = vec![a.out.with_extension("csv"), a.out.with_extension("json")];
    merge(&mut manifest.results, json!({ "profile": profile.sidecar() }));
    Ok(())
}

fn barrier_params(a: &BarrierArgs, q: f64) -> Result<AncientParams> {
    AncientParams::new(a.lambda, a.lambda2, a.h, a.h2, a.k, q, a.tau0)
}

fn cmd_barrier_check(a: &BarrierArgs, manifest: &mut RunManifest) -> Result<()> {
    let model = ModelParams::new(a.n)?;
    let auto = a.q.trim().eq_ignore_ascii_case("auto");
    let q = if auto {
        a.q_seed
    } else {
        a.q.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("--q must be a number or auto, got {:?}", a.q)))?
    };
    let params = barrier_params(a, q)?;
    let cert_box = CertBox::new(-a.x_half, a.x_half, a.tau_min, a.tau0)?;
    let grid = CertGrid {
        tau_samples: a.tau_samples,
        tol_l: a.tol_l,
        ..CertGrid::default()
    };
    manifest.params = serde_json::to_value(params)?;
    manifest.params["n"] = json!(a.n);
    manifest.params["q_mode"] = json!(if auto { "auto" } else { "fixed" });
    manifest.config = json!({ "box": cert_box, "grid": grid, "q_seed": a.q_seed, "q_cap": a.q_cap });
    let barriers = Barriers::new(params, model)?;
    let (report, search): (CertificationReport, Option<QSearch>) = if auto {
        match find_q(&barriers, &cert_box, &grid, a.q_seed, a.q_cap) {
            Ok(s) => (s.report.clone(), Some(s)),
            Err(Error::NoCertifiedQ { cap, details }) => {
                manifest.verdict("certification", Verdict::Fail);
                merge(
                    &mut manifest.results,
                    json!({ "no_certified_q": { "cap": cap, "regions": details } }),
                );
                manifest.error = Some(format!("no certified q up to {cap}"));
                write_json(&a.out, manifest)?;
                manifest.outputs.push(a.out.clone());
                return Ok(());
            }
            Err(e) => return Err(e),
        }
    } else {
        (certify_supersolution(&barriers, &cert_box, &grid)?, None)
    };
    manifest.params = serde_json::to_value(report.params)?;
    manifest.params["n"] = json!(a.n);
    manifest.verdict("certification", report.verdict);
    merge(
        &mut manifest.results,
        json!({
            "report": report,
            "binding_region": report.binding_region(),
            "q_search": search.as_ref().map(|s| &s.history),
        }),
    );
    manifest.outputs.push(a.out.clone());
    write_json(&a.out, manifest)?;
    Ok(())
}

/// Certification report stored in a `barrier-check` manifest.
pub fn certificate_from_manifest(path: &Path) -> Result<CertificationReport> {
    let m: RunManifest = read_json(path)
        .map_err(|e| Error::Uncertified(format!("cannot read certification manifest {}: {e}", path.display())))?;
    let report = m
        .results
        .get("report")
        .cloned()
        .ok_or_else(|| Error::Uncertified(format!("{} holds no certification report", path.display())))?;
    Ok(serde_json::from_value(report)?)
}

fn evolve_config(a: &EvolveArgs, m: f64, tau_end: f64) -> Result<EvolveConfig> {
    if a.snapshots == 0 {
        return Err(Error::Config("--snapshots must be positive".into()));
    }
    let window = tau_end + m;
    let steps = (window / a.dtau).round();
    let per = (steps / a.snapshots as f64).round().max(1.0);
    if (per * a.snapshots as f64 - steps).abs() > 0.5 {
        return Err(Error::Config(format!(
            "{} snapshot intervals do not divide the {steps} time steps of [{}, {tau_end}]",
            a.snapshots, -m
        )));
    }
    let config = EvolveConfig {
        m,
        tau_end,
        x_half: a.x_half,
        dx: a.dx,
        dtau: a.dtau,
        scheme: match a.scheme {
            SchemeArg::ImplicitEuler => TimeScheme::ImplicitEuler,
            SchemeArg::ExtrapolatedEuler => TimeScheme::ExtrapolatedEuler,
        },
        gauge: Gauge::Conformal,
        snapshot_interval: per * a.dtau,
        check_interval: a.dtau * (0.1 / a.dtau).round().max(1.0),
        ..EvolveConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn cmd_evolve(a: &EvolveArgs, manifest: &mut RunManifest) -> Result<()> {
    let report = certificate_from_manifest(&a.manifest)?;
    if report.verdict != Verdict::Pass {
        return Err(Error::Uncertified(format!(
            "{} records a {:?} certification",
            a.manifest.display(),
            report.verdict
        )));
    }
    let model = ModelParams::new(report.n)?;
    let params = report.params;
    let tau_end = a.tau_end.unwrap_or(params.tau0);
    let config = evolve_config(a, a.m, tau_end)?;
    manifest.params = serde_json::to_value(params)?;
    manifest.params["n"] = json!(report.n);
    manifest.config = serde_json::to_value(config)?;
    merge(&mut manifest.results, json!({ "certificate": a.manifest }));

    let barriers = Barriers::new(params, model)?;
    let (run, calibration) = run_certified(&config, &barriers, &report)?;
    std::fs::create_dir_all(&a.out)?;
    let run_path = a.out.join("run.json");
    write_json(&run_path, &run)?;
    manifest.outputs.push(run_path);
    manifest.outputs.extend(write_snapshots(&a.out, &run.field)?);
    let sandwich = run.sandwich.clone();
    if let Some(s) = &sandwich {
        manifest.verdict("sandwich", if s.pass { Verdict::Pass } else { Verdict::Fail });
    }
    merge(
        &mut manifest.results,
        json!({ "sandwich": sandwich, "calibration": calibration, "snapshot_times": run.field.times }),
    );

    if !a.compare_m.is_empty() {
        let x0 = a.window_x.unwrap_or(0.25 * a.x_half);
        let runs = a
            .compare_m
            .par_iter()
            .map(|&m| {
                let cfg = evolve_config(a, m, tau_end)?;
                run_certified(&cfg, &barriers, &report)
            })
            .collect::<Result<Vec<(EvolveRun, _)>>>()?;
        let fields: Vec<_> = runs.iter().map(|(r, _)| &r.field).collect();
        let cauchy = cauchy_in_m(&fields, x0)?;
        let sandwiches: Vec<_> = runs.iter().map(|(r, _)| (r.config.m, r.sandwich.clone())).collect();
        manifest.verdict(
            "cauchy",
            if cauchy.contracting {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
        );
        merge(
            &mut manifest.results,
            json!({ "cauchy": cauchy, "compare_sandwich": sandwiches }),
        );
    }
    write_json(&a.out.join("manifest.json"), manifest)?;
    Ok(())
}

fn run_certified(
    config: &EvolveConfig,
    barriers: &Barriers,
    report: &CertificationReport,
) -> Result<(EvolveRun, crate::evolution::SandwichCalibration)> {
    let calibration = calibrate_sandwich(config, barriers)?;
    let run = evolve(config, barriers, report, &calibration)?;
    Ok((run, calibration))
}

fn cmd_curvature(a: &CurvatureArgs, manifest: &mut RunManifest) -> Result<()> {
    let path = a.run.join("run.json");
    if !path.is_file() {
        return Err(Error::Config(format!("no run found at {}", path.display())));
    }
    let run: EvolveRun = read_json(&path)?;
    let settings = MonitorSettings {
        rho2_floor: a.rho2_floor,
        ..MonitorSettings::default()
    };
    manifest.params =
        json!({ "n": run.field.model.n, "run": a.run, "certified": run.certified, "ancient": run.params });
    manifest.config = serde_json::to_value(settings)?;
    if a.verdict && !run.certified {
        return Err(Error::Uncertified("the type-I verdict needs a certified run".into()));
    }
    let report = curvature_report(&run.field, &settings)?;
    let dir = a.run.join("curvature");
    for (j, p) in report.profiles.iter().enumerate() {
        let csv = dir.join(format!("curvature_{j:03}.csv"));
        write_curvature_csv(&csv, p)?;
        manifest.outputs.push(csv);
    }
    let summary = json!({
        "n": report.n,
        "gauge": report.gauge,
        "settings": report.settings,
        "times": report.times,
        "sup_norms": report.sup_norms,
        "plateau": report.plateau,
        "max_tensor": report.max_tensor,
        "verdict": report.verdict,
    });
    let json_path = dir.join("report.json");
    write_json(&json_path, &summary)?;
    manifest.outputs.push(json_path);
    if a.verdict {
        manifest.verdict("type1", report.verdict);
    }
    merge(&mut manifest.results, json!({ "curvature": summary }));
    Ok(())
}

fn cmd_king(a: &KingArgs, manifest: &mut RunManifest) -> Result<()> {
    let model = ModelParams::new(a.n)?;
    let start = KingState::new(a.tau0, a.xi0, a.zeta0)?;
    manifest.params = json!({ "n": a.n, "xi0": a.xi0, "zeta0": a.zeta0, "tau0": a.tau0, "tau1": a.tau1 });
    manifest.config = json!({ "samples": a.samples, "fraction": a.fraction, "xi_cap": a.xi_cap, "tol": a.tol });
    let traj = king_integrate(&start, a.tau1, a.samples, a.xi_cap, &model)?;
    let fit = fit_king_exponents(&traj, a.fraction, &model)?;
    write_king_csv(&a.out, &traj.states)?;
    manifest.outputs.push(a.out.clone());
    let ok = fit.xi_rel_err <= a.tol && fit.zeta_rel_err <= a.tol;
    manifest.verdict("exponents", if ok { Verdict::Pass } else { Verdict::Fail });
    merge(
        &mut manifest.results,
        json!({ "exponents": fit, "samples_kept": traj.states.len(), "blew_up": traj.blew_up }),
    );
    Ok(())
}

fn write_king_csv(path: &Path, states: &[KingState]) -> Result<()> {
    use std::io::Write;
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "tau,xi,zeta")?;
    for s in states {
        writeln!(w, "{},{:e},{:e}", s.tau, s.xi, s.zeta)?;
    }
    w.flush()?;
    Ok(())
}
