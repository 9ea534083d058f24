//! Orchestration behind the `fano` binary: the double-point pipeline,
//! artifact verification and the degree tables.

pub mod files;
pub mod pipeline;
pub mod tables;
pub mod verify;

pub use files::{exit_code, Failure};
pub use pipeline::{classify, run_pipeline, PipelineOptions, PipelineReport, Verdict};
pub use tables::{tables, Tables};
pub use verify::{verify_file, VerifyOutcome};
