//! Cyber-agility metrics over attack/defense generation timelines and a
//! retrospective effectiveness matrix.
//!
//! The crate turns three inputs — a discrete time horizon, the generation
//! instants of each party, and the matrix of defense-vs-attack effectiveness
//! values `D(t, t')` — into a suite of timeliness metrics (GT, EGT, TT, LBT)
//! and effectiveness metrics (EE, RGI, AGI), with ingestion from files,
//! probable-generation inference, a seeded scenario generator, and a naive
//! brute-force oracle for cross-checking.

pub mod effectiveness;
pub mod error;
pub mod inference;
pub mod ingest;
pub mod oracle;
pub mod report;
pub mod scenario;
pub mod series;
pub mod timeline;
pub mod timeliness;

pub use effectiveness::{
    agi_continuous, agi_discrete, diagonal_curve, ee_attacker, ee_defender, rgi_series,
    AgiOutcome, AgiSignMode, ContinuousAgi, EeVariant, GainInterpretation, GainSample,
    SecurityGainSeries,
};
pub use error::MetricsError;
pub use inference::{infer_attack_generations, merge_parties, CandidateUniverse, InferenceParams};
pub use series::{MetricValue, Sample, SampleSeries, SeriesSummary};
pub use timeline::{
    align_horizons, validate_inputs, EffectivenessMatrix, GenerationTimeline, Orientation,
    Party, Time, TimeHorizon, TimelineOrigin, ValidationReport, Violation,
};
pub use timeliness::{
    egt_attacker, egt_defender, gt_samples, lbt_attacker, lbt_defender, tt_attacker,
    tt_defender, LbtMode, LbtOutcome, LbtParams, TieBreak,
};
