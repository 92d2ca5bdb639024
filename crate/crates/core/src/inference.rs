//! Probable attack-generation identification and virtual-party aggregation.
//!
//! When ground-truth attack generations are unobserved, an attack time is
//! flagged as a probable generation if it degrades some past defense's
//! effectiveness by more than a threshold. Multiple attackers (or defenders)
//! are aggregated into one virtual party by superimposing their timelines.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::MetricsError;
use crate::timeline::{EffectivenessMatrix, GenerationTimeline, Party, Time, TimelineOrigin};
use crate::timeliness::check_normalized;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("tau {0} is outside the open interval (0, 1)")]
    TauOutOfRange(f64),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Candidate attack times to test for probable generations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateUniverse {
    /// Every time unit in the horizon (the convention when per-day attack
    /// traffic stands in for generations).
    EveryTimeUnit,
    /// An explicit list of candidate times.
    Provided(Vec<Time>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceParams {
    /// Disruption threshold in the open interval (0, 1).
    pub tau: f64,
    pub candidates: CandidateUniverse,
}

impl InferenceParams {
    pub fn new(tau: f64, candidates: CandidateUniverse) -> Result<Self, InferenceError> {
        if !(tau > 0.0 && tau < 1.0) {
            return Err(InferenceError::TauOutOfRange(tau));
        }
        Ok(InferenceParams { tau, candidates })
    }
}

/// Flag probable attack generations: candidate `t'` is a generation when
/// some earlier defense `t < t'` saw its effectiveness degraded by more than
/// `tau` relative to the then-current attack, i.e.
/// `D(t, t) - D(t, t') > tau`. Missing entries never satisfy the inequality.
///
/// The returned timeline always contains the base generation at the horizon
/// start and is tagged [`TimelineOrigin::Probable`].
pub fn infer_attack_generations(
    matrix: &EffectivenessMatrix,
    params: &InferenceParams,
) -> Result<GenerationTimeline, InferenceError> {
    check_normalized(matrix)?;
    InferenceParams::new(params.tau, params.candidates.clone())?;
    let horizon = matrix.horizon();
    let mut instants = vec![horizon.start()];
    let candidates: Vec<Time> = match &params.candidates {
        CandidateUniverse::EveryTimeUnit => (horizon.start() + 1..=horizon.end()).collect(),
        CandidateUniverse::Provided(list) => {
            let mut list: Vec<Time> = list
                .iter()
                .copied()
                .filter(|&t| t > horizon.start() && horizon.contains(t))
                .collect();
            list.sort_unstable();
            list.dedup();
            list
        }
    };
    for candidate in candidates {
        let disrupts = (horizon.start()..candidate).any(|t| {
            match (matrix.get(t, t), matrix.get(t, candidate)) {
                (Some(own), Some(against)) => own - against > params.tau,
                _ => false,
            }
        });
        if disrupts {
            instants.push(candidate);
        }
    }
    Ok(GenerationTimeline::new(Party::Attacker, instants).with_origin(TimelineOrigin::Probable))
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MergeError {
    #[error("nothing to merge")]
    Empty,
    #[error("cannot merge {found} timeline into a {expected} virtual party")]
    MixedParties { expected: Party, found: Party },
}

/// Superimpose several timelines of the same party into one virtual party.
///
/// The result's instants are the sorted set union of all inputs' instants —
/// a superset of each. Labels at colliding instants are concatenated with
/// `+`. Origin degrades to [`TimelineOrigin::Probable`] if any input is
/// probable.
pub fn merge_parties(timelines: &[GenerationTimeline]) -> Result<GenerationTimeline, MergeError> {
    let first = timelines.first().ok_or(MergeError::Empty)?;
    let party = first.party;
    for timeline in timelines {
        if timeline.party != party {
            return Err(MergeError::MixedParties { expected: party, found: timeline.party });
        }
    }

    let mut merged: std::collections::BTreeMap<Time, Vec<String>> = Default::default();
    for timeline in timelines {
        for (&instant, label) in timeline.instants.iter().zip(&timeline.labels) {
            let labels = merged.entry(instant).or_default();
            if let Some(label) = label {
                if !labels.contains(label) {
                    labels.push(label.clone());
                }
            }
        }
    }

    let instants: Vec<Time> = merged.keys().copied().collect();
    let labels: Vec<Option<String>> = merged
        .values()
        .map(|names| {
            if names.is_empty() {
                None
            } else {
                Some(names.join("+"))
            }
        })
        .collect();
    let origin = if timelines.iter().any(|t| t.origin == TimelineOrigin::Probable) {
        TimelineOrigin::Probable
    } else {
        TimelineOrigin::Observed
    };
    Ok(GenerationTimeline::new(party, instants)
        .with_labels(labels)
        .with_origin(origin))
}
