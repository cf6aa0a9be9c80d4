//! Grid certification of `L(w+) <= 0` and the search for the smallest `q`.
//!
//! The residual is measured relative to the sum of absolute term sizes of
//! the grouped operator, so the tolerance is meaningful both where `w+` is
//! huge (far tails) and where every term is exponentially small (deep past).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{intersection_point, AncientParams, Barriers};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertBox {
    pub x_min: f64,
    pub x_max: f64,
    pub tau_min: f64,
    pub tau_max: f64,
}

impl CertBox {
    pub fn new(x_min: f64, x_max: f64, tau_min: f64, tau_max: f64) -> Result<Self> {
        if !(x_min < x_max) || !(tau_min < tau_max) || !(tau_max < 0.0) {
            return Err(Error::Config(format!(
                "certification box needs x_min < x_max and tau_min < tau_max < 0, got \
                 x in [{x_min}, {x_max}], tau in [{tau_min}, {tau_max}]"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            tau_min,
            tau_max,
        })
    }
}

/// Grid and tolerance settings; `None` fields take defaults derived from the
/// decay exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertGrid {
    pub dx: Option<f64>,
    pub tau_samples: usize,
    pub region_m: Option<f64>,
    pub tol_l: f64,
    pub truncation: Option<f64>,
    /// Nodes where a wave block has `psi` below this are skipped; there
    /// `w+` is a single-block tail.
    pub psi_floor: f64,
}

impl Default for CertGrid {
    fn default() -> Self {
        Self {
            dx: None,
            tau_samples: 48,
            region_m: None,
            tol_l: 1e-7,
            truncation: None,
            psi_floor: 1e-30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolvedGrid {
    pub dx: f64,
    pub tau_samples: usize,
    pub region_m: f64,
    pub tol_l: f64,
    pub truncation: f64,
    pub psi_floor: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 3,
        }
    }
}

pub const REGION_NAMES: [&str; 6] = [
    "case1_left",
    "case2_left",
    "case3_left",
    "case3_right",
    "case2_right",
    "case1_right",
];

/// Largest relative residual `L / sum|terms|` inside one region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionMax {
    pub region: String,
    pub nodes: usize,
    #[serde(rename = "maxL")]
    pub max_l: Option<f64>,
    #[serde(rename = "L_abs")]
    pub l_abs: Option<f64>,
    pub x: Option<f64>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificationReport {
    pub params: AncientParams,
    pub n: u32,
    #[serde(rename = "box")]
    pub cert_box: CertBox,
    pub grid: ResolvedGrid,
    #[serde(rename = "maxL_global")]
    pub max_l_global: f64,
    pub argmax: [f64; 2],
    #[serde(rename = "maxL_by_region")]
    pub max_l_by_region: Vec<RegionMax>,
    /// Smallest `-L / |q terms|` over the grid; positive when the two `q`
    /// terms absorb everything else.
    pub dominant_term_margin: f64,
    /// Bound on the evaluation and sampling error of `maxL_global`.
    pub error_estimate: f64,
    pub verdict: Verdict,
}

impl CertificationReport {
    /// Region holding the global maximum.
    pub fn binding_region(&self) -> Option<&str> {
        self.max_l_by_region
            .iter()
            .filter(|r| r.max_l.is_some())
            .max_by(|a, b| a.max_l.unwrap().total_cmp(&b.max_l.unwrap()))
            .map(|r| r.region.as_str())
    }
}

#[derive(Clone, Copy)]
struct Best {
    r: f64,
    l: f64,
    x: f64,
    tau: f64,
    nodes: usize,
}

impl Best {
    const EMPTY: Best = Best {
        r: f64::NEG_INFINITY,
        l: 0.0,
        x: f64::NAN,
        tau: f64::NAN,
        nodes: 0,
    };

    fn offer(&mut self, r: f64, l: f64, x: f64, tau: f64) {
        self.nodes += 1;
        if r > self.r {
            *self = Best {
                r,
                l,
                x,
                tau,
                nodes: self.nodes,
            };
        }
    }

    fn merge(mut self, other: Best) -> Best {
        let nodes = self.nodes + other.nodes;
        if other.r > self.r {
            self = other;
        }
        self.nodes = nodes;
        self
    }
}

struct Slice {
    regions: [Best; 6],
    global: Best,
    bump: f64,
    margin: f64,
}

fn tau_samples(b: &CertBox, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![b.tau_max];
    }
    let ratio = b.tau_min / b.tau_max;
    (0..count)
        .map(|j| b.tau_max * ratio.powf(j as f64 / (count - 1) as f64))
        .collect()
}

fn resolve(b: &Barriers, grid: &CertGrid) -> Result<ResolvedGrid> {
    let (g1, g3) = (b.left.gamma, b.right.gamma);
    let gmin = g1.min(g3);
    let gmax = g1.max(g3);
    let dx = grid.dx.unwrap_or(0.02 / gmax.max(1.0));
    let region_m = grid.region_m.unwrap_or(10.0 / gmin.min(1.0));
    let truncation = grid.truncation.unwrap_or(40.0 / gmin);
    if !(dx > 0.0) || !(region_m > 0.0) || !(truncation > 0.0) || !(grid.tol_l > 0.0) {
        return Err(Error::Config(format!("invalid certification grid {grid:?}")));
    }
    Ok(ResolvedGrid {
        dx,
        tau_samples: grid.tau_samples.max(1),
        region_m,
        tol_l: grid.tol_l,
        truncation,
        psi_floor: grid.psi_floor,
        nodes: 0,
    })
}

fn slice(b: &Barriers, cert_box: &CertBox, g: &ResolvedGrid, tau: f64) -> Result<Slice> {
    let ps = &b.params;
    let xc = intersection_point(b, tau)?.x;
    let mut lo = cert_box.x_min.max(-(xc.abs() + g.truncation));
    let mut hi = cert_box.x_max.min(xc.abs() + g.truncation);
    // psi floor on both wave blocks, from the left tails psi ~ A e^y
    let slow = 1.0 - ps.q * (b.model.cylinder_rate() * tau).exp();
    let z_floor = (g.psi_floor / b.left.left_amplitude).ln();
    let zbar_floor = (g.psi_floor / b.right.left_amplitude).ln();
    lo = lo.max(z_floor + ps.lambda * tau * slow - ps.h);
    hi = hi.min(-(zbar_floor + ps.lambda2 * tau * slow - ps.h2));
    let mut out = Slice {
        regions: [Best::EMPTY; 6],
        global: Best::EMPTY,
        bump: 0.0,
        margin: f64::INFINITY,
    };
    if !(hi > lo) {
        return Ok(out);
    }
    let cells = ((hi - lo) / g.dx).ceil().max(1.0) as usize;
    let dx = (hi - lo) / cells as f64;
    let mut rel = Vec::with_capacity(cells + 1);
    let mut arg = 0;
    for i in 0..=cells {
        let x = lo + i as f64 * dx;
        let t = b.lw_terms(x, tau)?;
        let (l, r) = (t.value(), t.relative());
        let (z, zbar) = b.wave_arguments(x, tau);
        let region = if x <= xc {
            if z <= -g.region_m {
                0
            } else if z <= g.region_m {
                1
            } else {
                2
            }
        } else if zbar <= -g.region_m {
            5
        } else if zbar <= g.region_m {
            4
        } else {
            3
        };
        out.regions[region].offer(r, l, x, tau);
        if r > out.global.r {
            arg = i;
        }
        out.global.offer(r, l, x, tau);
        let qt = t.q_terms();
        if qt != 0.0 {
            out.margin = out.margin.min(-l / qt.abs());
        }
        rel.push(r);
    }
    if arg > 0 && arg < cells {
        out.bump = (rel[arg + 1] - 2.0 * rel[arg] + rel[arg - 1]).abs() / 8.0;
    }
    Ok(out)
}

/// Evaluates `L(w+)` on the box and classifies the result.
///
/// Pass when `maxL + err <= tol_L`, fail when `maxL - err > tol_L`,
/// inconclusive otherwise. `err` combines the profile interpolation error
/// and the curvature of the residual around its sampled maximum.
pub fn certify_supersolution(b: &Barriers, cert_box: &CertBox, grid: &CertGrid) -> Result<CertificationReport> {
    let mut g = resolve(b, grid)?;
    let taus = tau_samples(cert_box, g.tau_samples);
    for &tau in &taus {
        b.check_time(tau)?;
    }
    let slices: Vec<Slice> = taus
        .par_iter()
        .map(|&tau| slice(b, cert_box, &g, tau))
        .collect::<Result<_>>()?;

    let mut regions = [Best::EMPTY; 6];
    let mut global = Best::EMPTY;
    let mut bump: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for s in &slices {
        for (acc, r) in regions.iter_mut().zip(&s.regions) {
            *acc = acc.merge(*r);
        }
        if s.global.r > global.r {
            bump = s.bump;
        }
        global = global.merge(s.global);
        margin = margin.min(s.margin);
    }
    g.nodes = global.nodes;
    if global.nodes == 0 {
        return Err(Error::Config("certification domain is empty after truncation".into()));
    }
    let profile_err = b.left.interp_error.max(b.right.interp_error).max(1e-12);
    let error_estimate = 4.0 * profile_err + bump;
    let verdict = if global.r + error_estimate <= g.tol_l {
        Verdict::Pass
    } else if global.r - error_estimate > g.tol_l {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    let max_l_by_region = regions
        .iter()
        .zip(REGION_NAMES)
        .map(|(r, name)| {
            let some = r.nodes > 0;
            RegionMax {
                region: name.to_string(),
                nodes: r.nodes,
                max_l: some.then_some(r.r),
                l_abs: some.then_some(r.l),
                x: some.then_some(r.x),
                tau: some.then_some(r.tau),
            }
        })
        .collect();
    Ok(CertificationReport {
        params: b.params,
        n: b.model.n,
        cert_box: *cert_box,
        grid: g,
        max_l_global: global.r,
        argmax: [global.x, global.tau],
        max_l_by_region,
        dominant_term_margin: margin,
        error_estimate,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QSearchStep {
    pub q: f64,
    pub verdict: Verdict,
    #[serde(rename = "maxL_global")]
    pub max_l_global: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QSearch {
    /// Certified parameters: the found `q` and `tau0` = top of the box.
    pub params: AncientParams,
    pub report: CertificationReport,
    pub history: Vec<QSearchStep>,
}

fn sig2_unit(q: f64) -> f64 {
    10f64.powf(q.log10().floor() - 1.0)
}

/// Smallest `q` (to two significant digits, rounded up) for which the
/// certification passes. Inconclusive counts as not passing.
pub fn find_q(base: &Barriers, cert_box: &CertBox, grid: &CertGrid, q_seed: f64, q_cap: f64) -> Result<QSearch> {
    if !(q_seed > 0.0) || !(q_cap >= q_seed) {
        return Err(Error::Config(format!(
            "need 0 < q_seed <= q_cap, got {q_seed} and {q_cap}"
        )));
    }
    let mut history = Vec::new();
    let mut run = |q: f64| -> Result<CertificationReport> {
        let b = base.with_params(base.params.with_q(q).with_tau0(cert_box.tau_max))?;
        let r = certify_supersolution(&b, cert_box, grid)?;
        history.push(QSearchStep {
            q,
            verdict: r.verdict,
            max_l_global: r.max_l_global,
        });
        Ok(r)
    };

    let first = run(q_seed)?;
    let (mut lo, mut hi, mut best) = if first.verdict == Verdict::Pass {
        let mut hi = q_seed;
        let mut best = first;
        let mut lo = 0.0;
        let mut q = q_seed;
        while q > q_seed * 1e-6 {
            q *= 0.5;
            let r = run(q)?;
            if r.verdict == Verdict::Pass {
                hi = q;
                best = r;
            } else {
                lo = q;
                break;
            }
        }
        (lo, hi, best)
    } else {
        let mut lo = q_seed;
        let mut q = q_seed;
        let mut last = first;
        loop {
            q *= 2.0;
            if q > q_cap {
                let details = serde_json::to_string(&last.max_l_by_region)?;
                return Err(Error::NoCertifiedQ { cap: q_cap, details });
            }
            let r = run(q)?;
            if r.verdict == Verdict::Pass {
                break (lo, q, r);
            }
            lo = q;
            last = r;
        }
    };
    while hi - lo > 0.5 * sig2_unit(hi) {
        let mid = 0.5 * (lo + hi);
        let r = run(mid)?;
        if r.verdict == Verdict::Pass {
            hi = mid;
            best = r;
        } else {
            lo = mid;
        }
    }
    let unit = sig2_unit(hi);
    let mut q = (hi / unit - 1e-9).ceil() * unit;
    loop {
        if q == hi {
            break;
        }
        let r = run(q)?;
        if r.verdict == Verdict::Pass {
            best = r;
            break;
        }
        q += unit;
        if q > q_cap {
            q = hi;
            break;
        }
    }
    let params = base.params.with_q(q).with_tau0(cert_box.tau_max);
    Ok(QSearch {
        params,
        report: best,
        history,
    })
}

impl AncientParams {
    pub fn with_tau0(&self, tau0: f64) -> Self {
        Self { tau0, ..*self }
    }
}
