use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use fano::certify::{certify_fiber, is_simple_double_zero, CertifyError};
use fano::forge::{constrained_form_system, default_plane, default_tangent, random_form_system};
use fano::monodromy::sample_galois_group_limited;
use fano::problem::{degree_lower_bound, delta, enumerate_fano_problems, fano_degree, is_enriched, FanoType};
use fano::system::{build_square_system, ChartPoint, FormSystem, SquareSystem};
use fano::tracker::{distinct_endpoints, solve_total_degree_watching, PathResult, TrackSettings, C64};
use fano_cli::files::{read_json, write_json, Failure};
use fano_cli::pipeline::{PathCounts, DEDUP_TOL, REPORT_FILE};
use fano_cli::tables::format_tables;
use fano_cli::{exit_code, run_pipeline, tables, verify_file, PipelineOptions, Verdict};

#[derive(Parser)]
#[command(name = "fano", version, about = "Degrees, witnesses and Galois groups of Fano problems")]
struct Cli {
    /// Worker threads for path tracking and certification (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List every Fano problem of degree below the cap.
    Enumerate {
        #[arg(long, default_value_t = 75_000)]
        cap: u64,
        #[arg(long)]
        json: bool,
    },
    /// Degree, expected dimension and lower bounds of one type.
    Degree {
        /// `r,n,d1:d2:...`
        #[arg(long = "type")]
        fano_type: FanoType,
        #[arg(long)]
        json: bool,
    },
    /// Restrict the forms of F.json to the chart and write the square system.
    BuildSystem {
        #[arg(long = "type")]
        fano_type: Option<FanoType>,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Draw a random instance, or one with a prescribed double point.
    Forge {
        #[arg(long = "type")]
        fano_type: FanoType,
        #[arg(long, env = "FANO_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        double_point: bool,
        /// Directory receiving F.json (and ell.json, v.json).
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Total-degree homotopy on a square system.
    Solve {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, env = "FANO_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Truncate paths approaching this chart point (ell.json).
        #[arg(long)]
        watch: Option<PathBuf>,
    },
    /// Certify the converged endpoints of a solve, excluding a double point.
    Certify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        candidates: PathBuf,
        #[arg(long)]
        double_point: Option<PathBuf>,
        /// Expected number of zeros; defaults to the degree of the source type.
        #[arg(long)]
        degree: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the Galois group by monodromy loops.
    Monodromy {
        #[arg(long = "type")]
        fano_type: FanoType,
        #[arg(long, default_value_t = 40)]
        loops: usize,
        #[arg(long, env = "FANO_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = fano::monodromy::DEFAULT_DEGREE_LIMIT)]
        degree_limit: u64,
        #[arg(long)]
        json: bool,
    },
    /// Forge, build, check the double zero, solve and certify.
    Pipeline {
        #[arg(long = "type")]
        fano_type: FanoType,
        #[arg(long, env = "FANO_SEED", default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        attempts: usize,
        #[arg(long, default_value = "fano-run")]
        out_dir: PathBuf,
    },
    /// Re-check a pipeline report or fiber certificate from files alone.
    Verify { file: PathBuf },
    /// Regenerate the degree tables.
    Tables {
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run(cmd: Cmd) -> anyhow::Result<()> {
    let settings = TrackSettings::default();
    match cmd {
        Cmd::Enumerate { cap, json } => {
            let problems = enumerate_fano_problems(cap);
            if json {
                return print_json(&problems);
            }
            for p in &problems {
                let t = &p.fano_type;
                let ds: Vec<String> = t.degrees().iter().map(u32::to_string).collect();
                let tag = if p.is_enriched() { "enriched" } else { "-" };
                println!("{} {} {} {} {tag}", t.r(), t.n(), ds.join(","), p.degree);
            }
        }
        Cmd::Degree { fano_type: t, json } => {
            let d = delta(&t);
            if d != 0 {
                return Err(fano::FanoError::NotAFanoProblem(d).into());
            }
            let degree = fano_degree(&t)?;
            let (refined, crude) = degree_lower_bound(&t);
            if json {
                return print_json(&serde_json::json!({
                    "fano_type": t,
                    "degree": degree.to_string(),
                    "refined_bound": refined.to_string(),
                    "crude_bound": crude.to_string(),
                    "enriched": is_enriched(&t),
                }));
            }
            println!("{t}: degree {degree} (lower bounds: refined {refined}, crude {crude})");
        }
        Cmd::BuildSystem { fano_type, input, output } => {
            let f: FormSystem = read_json(&input)?;
            if fano_type.as_ref().is_some_and(|t| t != f.fano_type()) {
                bail!("{} holds forms of type {}", input.display(), f.fano_type());
            }
            let g = build_square_system(&f)?;
            write_json(&output, &g)?;
            println!("{} equations in {} unknowns written to {}", g.polys().len(), g.num_vars(), output.display());
        }
        Cmd::Forge { fano_type: t, seed, double_point, out_dir } => {
            if double_point {
                let (ell, v) = (default_plane(&t), default_tangent(&t));
                let f = constrained_form_system(&t, &ell, &v, seed)?;
                write_json(&out_dir.join("F.json"), &f)?;
                write_json(&out_dir.join("ell.json"), &ell)?;
                write_json(&out_dir.join("v.json"), &v)?;
            } else {
                write_json(&out_dir.join("F.json"), &random_form_system(&t, seed)?)?;
            }
            println!("instance of type {t} (seed {seed}) written to {}", out_dir.display());
        }
        Cmd::Solve { system, seed, out, watch } => {
            let g: SquareSystem = read_json(&system)?;
            let w: Option<Vec<C64>> = match watch {
                Some(p) => Some(read_json::<ChartPoint>(&p)?.iter().map(|z| z.to_c64()).collect()),
                None => None,
            };
            let results = solve_total_degree_watching(&g, &settings, seed, w.as_deref())?;
            write_json(&out, &results)?;
            let c = PathCounts::tally(&results);
            println!(
                "{} paths: {} converged ({} distinct), {} truncated, {} diverged, {} failed",
                c.total,
                c.converged,
                distinct_endpoints(&results, DEDUP_TOL).len(),
                c.truncated_near_double_point,
                c.diverged,
                c.failed
            );
        }
        Cmd::Certify { system, candidates, double_point, degree, out } => {
            let g: SquareSystem = read_json(&system)?;
            let results: Vec<PathResult> = read_json(&candidates)?;
            let sols = distinct_endpoints(&results, DEDUP_TOL);
            let expected = match (degree, g.source()) {
                (Some(d), _) => d,
                (None, Some(f)) => u64::try_from(&fano_degree(f.fano_type())?)?,
                (None, None) => bail!("the system has no source type; pass --degree"),
            };
            let dz = match double_point {
                Some(p) => {
                    let ell: ChartPoint = read_json(&p)?;
                    match is_simple_double_zero(&g, &ell)? {
                        Ok(dz) => Some(dz),
                        Err(rej) => return Err(Failure::Verification(format!("not a simple double zero: {rej}")).into()),
                    }
                }
                None => None,
            };
            let fiber = match certify_fiber(&g, &sols, dz, expected) {
                Ok(f) => f,
                Err(CertifyError::CountMismatch { fiber, found, expected }) => {
                    write_json(&out, &fiber)?;
                    return Err(Failure::Numerical(format!(
                        "partial fiber written to {}: {found} of {expected} zeros accounted for",
                        out.display()
                    ))
                    .into());
                }
                Err(CertifyError::Input(e)) => return Err(e.into()),
                Err(e) => return Err(Failure::Verification(e.to_string()).into()),
            };
            write_json(&out, &fiber)?;
            println!(
                "{} certified disjoint boxes{}; complete fiber of {expected} written to {}",
                fiber.boxes.len(),
                if fiber.double_point.is_some() { " plus the double point" } else { "" },
                out.display()
            );
        }
        Cmd::Monodromy { fano_type: t, loops, seed, degree_limit, json } => {
            let r = sample_galois_group_limited(&t, loops, seed, &settings, degree_limit)?;
            if json {
                return print_json(&r);
            }
            println!("type {t}, fiber of {} points, seed {seed}", r.fiber_size);
            println!("loops: {} accepted, {} rejected", r.accepted_loops, r.rejected_loops);
            println!("sampled group order: {}", r.group.order);
            println!("transitive: {}", r.group.transitive);
            println!("contains odd permutations: {}", r.group.contains_odd);
            if let Some(inc) = &r.incidence {
                let mut ds = inc.degrees.clone();
                ds.dedup();
                println!("incidence degrees: {ds:?}; preserved by every loop: {}", inc.preserved);
            }
        }
        Cmd::Pipeline { fano_type: t, seed, attempts, out_dir } => {
            let opts = PipelineOptions { seed, attempts, out_dir: out_dir.clone(), settings };
            let r = run_pipeline(&t, &opts)?;
            println!("type {t}, degree {}, seed {}", r.degree, r.seed);
            match &r.double_zero.rejection {
                Some(rej) => println!("double zero: rejected ({rej})"),
                None => println!("double zero: {}", if r.double_zero.valid { "valid" } else { "not checked" }),
            }
            if let Some(p) = &r.paths {
                println!(
                    "paths: {} total, {} converged, {} truncated near the double point, {} diverged, {} failed",
                    p.total, p.converged, p.truncated_near_double_point, p.diverged, p.failed
                );
            }
            println!("certified boxes: {} of {} (shortfall {})", r.certified_boxes, r.expected_boxes, r.shortfall());
            println!("verdict: {}", serde_json::to_value(r.verdict)?.as_str().unwrap_or("?"));
            println!("report: {}", out_dir.join(REPORT_FILE).display());
            if let Some(f) = &r.failure {
                return Err(Failure::Numerical(format!("stage {} failed: {}", f.stage, f.message)).into());
            }
            match r.verdict {
                Verdict::FullySymmetricTranspositionWitness | Verdict::DoublePointWitness => {}
                Verdict::DoubleZeroRejected => return Err(Failure::Verification("the forged point is not a simple double zero".into()).into()),
                Verdict::PartialFiber | Verdict::Failed => {
                    return Err(Failure::Numerical(format!("{} zeros short of a complete fiber", r.shortfall())).into())
                }
            }
        }
        Cmd::Verify { file } => {
            let v = verify_file(&file).with_context(|| format!("verifying {}", file.display()))?;
            print_json(&v)?;
            if !v.ok() {
                return Err(Failure::Verification(v.problems.join("; ")).into());
            }
        }
        Cmd::Tables { json } => {
            let t = tables();
            if json {
                return print_json(&t);
            }
            print!("{}", format_tables(&t));
        }
    }
    Ok(())
}
