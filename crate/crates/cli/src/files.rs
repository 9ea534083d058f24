//! On-disk artifacts. Exact numbers are strings, floats are hex literals.

use std::fs;
use std::path::Path;

use anyhow::Context;
use fano::problem::FanoType;
use fano::system::{ChartPoint, FormSystem, TangentVector};
use fano::tracker::C64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// A forged instance: the forms together with the prescribed plane and
/// tangent direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub fano_type: FanoType,
    pub seed: u64,
    pub forms: FormSystem,
    pub plane: ChartPoint,
    pub tangent: TangentVector,
}

/// One approximate zero, coordinates as `[re, im]` hex pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point(#[serde(with = "fano::io::hex_complex_vec")] pub Vec<C64>);

pub fn points(v: Vec<Vec<C64>>) -> Vec<Point> {
    v.into_iter().map(Point).collect()
}

pub fn unpoints(v: Vec<Point>) -> Vec<Vec<C64>> {
    v.into_iter().map(|p| p.0).collect()
}

/// Failures that map to dedicated exit codes.
#[derive(Debug)]
pub enum Failure {
    /// A certificate did not check out (exit code 2).
    Verification(String),
    /// A numerical stage could not finish (exit code 3).
    Numerical(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

/// Exit code for an error bubbling out of a command.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if let Some(f) = err.downcast_ref::<Failure>() {
        return match f {
            Failure::Verification(_) => 2,
            Failure::Numerical(_) => 3,
        };
    }
    match err.downcast_ref::<fano::FanoError>() {
        Some(fano::FanoError::Certification(_)) => 2,
        Some(fano::FanoError::Numerical(_)) => 3,
        _ => 1,
    }
}
