//! Redundancy noise synthesis, redundancy and ROUGE metrics, rule-based
//! denoising and edit analysis for text summaries.
//!
//! The pipeline mirrors how summary denoisers are trained and evaluated:
//! clean summaries are perturbed with sentence-level redundancy noise
//! ([`noising`]), a denoiser removes it ([`denoise`]), and the result is
//! scored and its edits classified ([`metrics`], [`analysis`]).
//!
//! Metric functions are generic over [`Scalar`]; use `f64` for reporting and
//! [`Exact`] when values must compare exactly.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod denoise;
pub mod error;
pub mod metrics;
pub mod noising;
pub mod scalar;
pub mod text;

pub use analysis::{
    aggregate_operations, classify_edit, eval_report, EditClassification, EditKind, EvalReport,
    OperationDistribution, SystemRow,
};
pub use corpus::{read_corpus, write_corpus, CorpusRecord};
pub use denoise::{overlap_denoise, DenoiseResult, ExternalDenoiser};
pub use error::{Error, Result};
pub use metrics::{
    repeat_rate, repetition_count, rouge_l, rouge_n, summary_stats, RedundancyReport, RougeScore,
};
pub use noising::{
    apply_extra, apply_repeat, apply_replace, generate_noisy_dataset, sample_noise_count,
    NoiseDistribution, NoiseType, NoisyRecord, Paraphraser,
};
pub use scalar::{Exact, Scalar};
pub use text::{split_sentences, tokenize, unigram_overlap, SummaryDoc, TokenizedSentence};

pub type Rouge = RougeScore<f64>;
pub type Rouge32 = RougeScore<f32>;
pub type ExactRouge = RougeScore<Exact>;
pub type Redundancy = RedundancyReport<f64>;
pub type ExactRedundancy = RedundancyReport<Exact>;
