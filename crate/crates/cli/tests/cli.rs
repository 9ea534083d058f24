use std::path::Path;
use std::process::{Command, Output};

use fano::certify::CertifiedFiber;
use fano_cli::files::{read_json, write_json};
use fano_cli::pipeline::{classify, PipelineReport, Verdict};

fn fano(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fano"));
    cmd.args(args).env_remove("FANO_SEED");
    if let Some(s) = seed {
        cmd.env("FANO_SEED", s);
    }
    cmd.output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verdict_rule() {
    assert_eq!(classify(true, 510, 512, false), Verdict::FullySymmetricTranspositionWitness);
    assert_eq!(classify(true, 14, 16, true), Verdict::DoublePointWitness);
    assert_eq!(classify(true, 8, 16, true), Verdict::PartialFiber);
    assert_eq!(classify(false, 510, 512, false), Verdict::DoubleZeroRejected);
}

#[test]
fn rejects_types_with_positive_dimension() {
    let out = fano(&["degree", "--type", "1,4,3"], None);
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = fano(&["pipeline", "--type", "1,4,3", "--out-dir", s(dir.path())], None);
    assert_ne!(out.status.code(), Some(0));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn enumerate_lines() {
    let out = fano(&["enumerate", "--cap", "30"], None);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1 4 2,2 16 enriched\n1 3 3 27 enriched\n");
}

#[test]
fn seed_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert!(fano(&["forge", "--type", "1,4,2:2", "--out-dir", s(&a)], Some("9")).status.success());
    assert!(fano(&["forge", "--type", "1,4,2:2", "--seed", "9", "--out-dir", s(&b)], None).status.success());
    assert!(fano(&["forge", "--type", "1,4,2:2", "--out-dir", s(&c)], None).status.success());
    let read = |d: &Path| std::fs::read_to_string(d.join("F.json")).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn partial_pipeline_reverifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = fano(&["pipeline", "--type", "1,4,2:2", "--attempts", "1", "--out-dir", s(dir.path())], None);
    // the fiber is incomplete (see the report), which is a numerical shortfall
    assert_eq!(out.status.code(), Some(3));
    let report_path = dir.path().join("report.json");
    let report: PipelineReport = read_json(&report_path).unwrap();
    assert_eq!(report.verdict, Verdict::PartialFiber);
    assert!(report.double_zero.valid);
    assert!(fano(&["verify", s(&report_path)], None).status.success());

    // a report claiming more than the certificate holds
    let mut inflated = report.clone();
    inflated.certified_boxes = 14;
    inflated.verdict = Verdict::DoublePointWitness;
    write_json(&report_path, &inflated).unwrap();
    assert_eq!(fano(&["verify", s(&report_path)], None).status.code(), Some(2));
    write_json(&report_path, &report).unwrap();

    // a box moved onto the double point
    let fiber_path = dir.path().join("fiber.json");
    let mut fiber: CertifiedFiber = read_json(&fiber_path).unwrap();
    let dp = fiber.double_point.as_ref().unwrap().point.iter().map(|z| z.to_c64()).collect::<Vec<_>>();
    fiber.boxes[0] = fano::certify::ComplexBox::around(&dp, 1e-6);
    write_json(&fiber_path, &fiber).unwrap();
    assert_eq!(fano(&["verify", s(&report_path)], None).status.code(), Some(2));
    assert_eq!(fano(&["verify", s(&fiber_path)], None).status.code(), Some(2));
}

#[test]
fn certify_refuses_a_smooth_point_as_double() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(fano(&["forge", "--type", "1,4,2:2", "--seed", "2", "--out-dir", s(d)], None).status.success());
    let (f, g, sols) = (d.join("F.json"), d.join("G.json"), d.join("sols.json"));
    assert!(fano(&["build-system", "--input", s(&f), "--output", s(&g)], None).status.success());
    assert!(fano(&["solve", "--system", s(&g), "--out", s(&sols)], None).status.success());
    // the origin is not even a zero of a random instance
    let ell = d.join("ell.json");
    write_json(&ell, &fano::forge::default_plane(&"1,4,2:2".parse().unwrap())).unwrap();
    let out = fano(&["certify", "--system", s(&g), "--candidates", s(&sols), "--double-point", s(&ell), "--out", s(&d.join("c.json"))], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn monodromy_is_gated_by_degree() {
    let out = fano(&["monodromy", "--type", "3,8,2:2", "--loops", "1"], None);
    assert_eq!(out.status.code(), Some(3));
}
