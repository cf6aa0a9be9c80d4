//! Run manifests, CSV writers and thread configuration shared by the
//! command-line tool and the examples.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::barriers::Verdict;
use crate::error::{Error, Result};
use crate::evolution::SpaceTimeField;
use crate::geometry::CurvatureProfile;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "YAMABE_ANCIENTS_THREADS";

/// Parses a thread cap; `None` when unset or empty.
pub fn parse_thread_cap(value: Option<&str>) -> Result<Option<usize>> {
    match value.map(str::trim) {
        None | Some("") => Ok(None),
        Some(v) => match v.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

/// Sizes the global rayon pool from `YAMABE_ANCIENTS_THREADS`. Returns the
/// cap that was applied.
pub fn configure_threads() -> Result<Option<usize>> {
    let cap = parse_thread_cap(std::env::var(THREADS_ENV).ok().as_deref())?;
    if let Some(n) = cap {
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(cap)
}

/// Summary written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub status: String,
    pub exit_code: i32,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub config: serde_json::Value,
    #[serde(default)]
    pub verdicts: BTreeMap<String, Verdict>,
    #[serde(default)]
    pub outputs: Vec<PathBuf>,
    #[serde(default)]
    pub results: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            status: "ok".into(),
            exit_code: 0,
            params: serde_json::Value::Null,
            config: serde_json::Value::Null,
            verdicts: BTreeMap::new(),
            outputs: vec![],
            results: serde_json::Value::Null,
            error: None,
        }
    }

    /// Records a verdict; the exit code becomes the worst seen so far
    /// (fail over inconclusive over pass).
    pub fn verdict(&mut self, name: &str, v: Verdict) {
        self.verdicts.insert(name.to_string(), v);
        if self.exit_code == 0 && v == Verdict::Pass {
            self.status = "pass".into();
        }
        let rank = |c: i32| match c {
            1 => 2,
            3 => 1,
            _ => 0,
        };
        if rank(v.exit_code()) > rank(self.exit_code) {
            self.exit_code = v.exit_code();
            self.status = match v {
                Verdict::Pass => "pass",
                Verdict::Fail => "fail",
                Verdict::Inconclusive => "inconclusive",
            }
            .into();
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn csv_writer(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Snapshot `j` of `field` as `x,u,phi`.
pub fn write_snapshot_csv(path: &Path, field: &SpaceTimeField, j: usize) -> Result<()> {
    let mut w = csv_writer(path)?;
    writeln!(w, "x,u,phi")?;
    let (u, phi) = (field.pressure(j), field.phi(j));
    for i in 0..field.nodes {
        writeln!(w, "{},{:e},{:e}", field.x(i), u[i], phi[i])?;
    }
    w.flush()?;
    Ok(())
}

/// One snapshot CSV per stored time, named `snapshot_<k>.csv` in time order.
pub fn write_snapshots(dir: &Path, field: &SpaceTimeField) -> Result<Vec<PathBuf>> {
    (0..field.times.len())
        .map(|j| {
            let path = dir.join(format!("snapshot_{j:03}.csv"));
            write_snapshot_csv(&path, field, j)?;
            Ok(path)
        })
        .collect()
}

/// Curvature profile as `x,Rtilde,Krad,Ktan`.
pub fn write_curvature_csv(path: &Path, profile: &CurvatureProfile) -> Result<()> {
    let mut w = csv_writer(path)?;
    writeln!(w, "x,Rtilde,Krad,Ktan")?;
    for i in 0..profile.x.len() {
        writeln!(
            w,
            "{},{:e},{:e},{:e}",
            profile.x[i], profile.r_tilde[i], profile.k_rad[i], profile.k_tan[i]
        )?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_cap_parsing() {
        assert_eq!(parse_thread_cap(None).unwrap(), None);
        assert_eq!(parse_thread_cap(Some(" ")).unwrap(), None);
        assert_eq!(parse_thread_cap(Some("3")).unwrap(), Some(3));
        assert!(parse_thread_cap(Some("0")).is_err());
        assert!(parse_thread_cap(Some("many")).is_err());
    }

    #[test]
    fn manifest_exit_code_keeps_worst_verdict() {
        let mut m = RunManifest::new("test");
        m.verdict("a", Verdict::Pass);
        assert_eq!(m.exit_code, 0);
        m.verdict("b", Verdict::Inconclusive);
        assert_eq!(m.exit_code, 3);
        m.verdict("c", Verdict::Fail);
        m.verdict("d", Verdict::Inconclusive);
        assert_eq!((m.exit_code, m.status.as_str()), (1, "fail"));
    }
}
