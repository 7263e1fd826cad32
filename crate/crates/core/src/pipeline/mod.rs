//! Corpus-level orchestration: record ingestion, per-problem filtering,
//! selection and test reduction, and synthetic corpora.

pub mod records;
mod run;
pub mod synth;

pub use records::{ingest, ingest_str, IngestError, ProblemBundle, VerdictRecord};
pub use run::{
    reduce_tests, reduction_holds, run_pipeline, CorpusTotals, PipelineConfig, PipelineError,
    PipelineReport, ProblemOutcome, ProblemReport,
};
pub use synth::{synth, synth_corpus, CorpusSpec, SynthError, SynthInstance, SynthSpec};
