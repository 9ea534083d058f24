//! Re-checking stored artifacts from the files alone.

use std::path::Path;

use anyhow::bail;
use fano::certify::{is_simple_double_zero, CertifiedFiber, FiberVerdict};
use fano::problem::{fano_degree, is_enriched};
use fano::system::build_square_system;
use serde::{Deserialize, Serialize};

use crate::files::{read_json, Instance};
use crate::pipeline::{artifact_path, classify, PipelineReport, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArtifactKind {
    Report,
    Fiber,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOutcome {
    pub kind: ArtifactKind,
    pub fiber: Option<FiberVerdict>,
    pub reported_verdict: Option<Verdict>,
    pub recomputed_verdict: Option<Verdict>,
    /// Everything that did not check out; empty on success.
    pub problems: Vec<String>,
}

impl VerifyOutcome {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

fn fiber_problems(v: &FiberVerdict, boxes: usize) -> Vec<String> {
    let mut p = Vec::new();
    if !v.boxes_contract {
        p.push(format!("only {} of {boxes} boxes pass the Krawczyk test", v.contracting_boxes));
    }
    if !v.disjoint {
        p.push("certified boxes overlap".into());
    }
    if !v.excludes_double_point {
        p.push("a certified box contains the double point".into());
    }
    if v.double_point_valid == Some(false) {
        p.push("the double-zero certificate does not re-verify".into());
    }
    p
}

/// Verifies a pipeline report or a bare fiber certificate; the kind is
/// detected from the JSON keys.
pub fn verify_file(path: &Path) -> anyhow::Result<VerifyOutcome> {
    let value: serde_json::Value = read_json(path)?;
    if value.get("verdict").is_some() && value.get("files").is_some() {
        let report: PipelineReport = serde_json::from_value(value)?;
        verify_report(path, &report)
    } else if value.get("boxes").is_some() && value.get("system").is_some() {
        let fiber: CertifiedFiber = serde_json::from_value(value)?;
        let v = fiber.verify()?;
        Ok(VerifyOutcome {
            kind: ArtifactKind::Fiber,
            problems: fiber_problems(&v, fiber.boxes.len()),
            fiber: Some(v),
            reported_verdict: None,
            recomputed_verdict: None,
        })
    } else {
        bail!("{} is neither a pipeline report nor a fiber certificate", path.display())
    }
}

fn verify_report(path: &Path, report: &PipelineReport) -> anyhow::Result<VerifyOutcome> {
    let mut problems = Vec::new();
    let instance: Instance = read_json(&artifact_path(path, &report.files.instance))?;
    let t = &instance.fano_type;
    if *t != report.fano_type || instance.seed != report.seed {
        problems.push("instance does not match the report's type and seed".into());
    }
    let degree_big = fano_degree(t)?;
    if degree_big != report.degree || is_enriched(t) != report.enriched {
        problems.push("stored degree or enrichment flag is wrong".into());
    }
    let degree = u64::try_from(&degree_big)?;
    let g = build_square_system(&instance.forms)?;

    let mut fiber_verdict = None;
    let recomputed = match &report.files.fiber {
        Some(name) => {
            let fiber: CertifiedFiber = read_json(&artifact_path(path, name))?;
            let v = fiber.verify()?;
            problems.extend(fiber_problems(&v, fiber.boxes.len()));
            if fiber.system != g {
                problems.push("certified system is not the one built from the instance".into());
            }
            match &fiber.double_point {
                Some(dz) if dz.point == instance.plane => {}
                _ => problems.push("certificate is not about the prescribed plane".into()),
            }
            if fiber.expected_degree != degree {
                problems.push("fiber expects the wrong degree".into());
            }
            if fiber.boxes.len() != report.certified_boxes {
                problems.push(format!(
                    "report claims {} boxes, certificate holds {}",
                    report.certified_boxes,
                    fiber.boxes.len()
                ));
            }
            fiber_verdict = Some(v);
            let dz_ok = v.double_point_valid == Some(true);
            if v.sound() {
                classify(dz_ok, fiber.boxes.len(), degree, is_enriched(t))
            } else {
                Verdict::Failed
            }
        }
        None if report.verdict == Verdict::DoubleZeroRejected => match is_simple_double_zero(&g, &instance.plane)? {
            Err(rej) if Some(&rej) == report.double_zero.rejection.as_ref() => Verdict::DoubleZeroRejected,
            Err(rej) => {
                problems.push(format!("double zero is rejected for a different reason: {rej}"));
                Verdict::DoubleZeroRejected
            }
            Ok(_) => {
                problems.push("the double zero is valid but the report rejected it".into());
                Verdict::Failed
            }
        },
        // a stage failed before anything was certified: nothing to re-check
        None => Verdict::Failed,
    };
    if recomputed != report.verdict {
        problems.push(format!("recomputed verdict {recomputed:?} differs from reported {:?}", report.verdict));
    }
    Ok(VerifyOutcome {
        kind: ArtifactKind::Report,
        fiber: fiber_verdict,
        reported_verdict: Some(report.verdict),
        recomputed_verdict: Some(recomputed),
        problems,
    })
}
