//! Timeliness-oriented metrics: Generation-Time, Effective-Generation-Time,
//! Triggering-Time, and Lagging-Behind-Time, for both parties.
//!
//! All operations are pure functions over a normalized (larger-is-better)
//! matrix and validated timelines. Missing matrix cells are handled per
//! metric: EGT marks a sample indeterminate when a required entry is absent,
//! TT skips unevaluable candidates, and LBT quantifies over present entries
//! only while reporting the lags it had to skip entirely.

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::series::{MetricValue, SampleSeries};
use crate::timeline::{EffectivenessMatrix, GenerationTimeline, Orientation, Time};

pub(crate) fn check_normalized(matrix: &EffectivenessMatrix) -> Result<(), MetricsError> {
    if matrix.orientation() != Orientation::LargerIsBetter {
        return Err(MetricsError::NotNormalized);
    }
    Ok(())
}

pub(crate) fn check_timeline(
    matrix: &EffectivenessMatrix,
    timeline: &GenerationTimeline,
    min_len: usize,
) -> Result<(), MetricsError> {
    if timeline.instants.is_empty() {
        return Err(MetricsError::EmptyTimeline);
    }
    if timeline.instants.len() < min_len {
        return Err(MetricsError::TooFewInstants {
            needed: min_len,
            found: timeline.instants.len(),
        });
    }
    let mut prev = None;
    for &instant in &timeline.instants {
        if !matrix.horizon().contains(instant) {
            return Err(MetricsError::InstantOutOfHorizon { instant });
        }
        if let Some(p) = prev {
            if instant <= p {
                return Err(MetricsError::NonMonotoneTimeline { instant });
            }
        }
        prev = Some(instant);
    }
    Ok(())
}

/// Generation-Time: gaps between consecutive generations of one party,
/// sampled at each generation that has a successor.
///
/// A single-generation timeline yields an empty series.
pub fn gt_samples(timeline: &GenerationTimeline) -> Result<SampleSeries<MetricValue>, MetricsError> {
    if timeline.instants.is_empty() {
        return Err(MetricsError::EmptyTimeline);
    }
    let mut series = SampleSeries::new("GT", timeline.party);
    for pair in timeline.instants.windows(2) {
        let (anchor, next) = (pair[0], pair[1]);
        if next <= anchor {
            return Err(MetricsError::NonMonotoneTimeline { instant: next });
        }
        series.push(anchor, Some(MetricValue::Finite((next - anchor) as u64)));
    }
    Ok(series)
}

/// Effective-Generation-Time for the defender.
///
/// For each defense generation `t_i` (except the last), the sample is the
/// distance to the nearest later defense generation whose effectiveness
/// against the attack state at `t_i` strictly exceeds the anchor value
/// `D(t_i, t_i)`; generations in between must not exceed it. `PlusInfinity`
/// when no later generation improves. Equal effectiveness is not an
/// improvement; `tolerance` (default 0) widens the strict comparison to
/// `v > anchor + tolerance`.
///
/// If the anchor entry, or any scanned entry before the first improvement,
/// is missing, the sample is indeterminate (`None`).
pub fn egt_defender(
    matrix: &EffectivenessMatrix,
    defense: &GenerationTimeline,
    tolerance: f64,
) -> Result<SampleSeries<MetricValue>, MetricsError> {
    check_normalized(matrix)?;
    check_timeline(matrix, defense, 1)?;
    let instants = &defense.instants;
    let mut series = SampleSeries::new("EGT", defense.party);
    for (i, &anchor) in instants.iter().enumerate() {
        if i + 1 == instants.len() {
            break;
        }
        let value = match matrix.get(anchor, anchor) {
            None => None,
            Some(reference) => {
                let mut outcome = Some(MetricValue::PlusInfinity);
                for &later in &instants[i + 1..] {
                    match matrix.get(later, anchor) {
                        None => {
                            outcome = None;
                            break;
                        }
                        Some(v) if v > reference + tolerance => {
                            outcome = Some(MetricValue::Finite((later - anchor) as u64));
                            break;
                        }
                        Some(_) => {}
                    }
                }
                outcome
            }
        };
        series.push(anchor, value);
    }
    Ok(series)
}

/// Effective-Generation-Time for the attacker.
///
/// Mirror of [`egt_defender`]: for each attack generation `t'_j` the sample
/// is the distance to the nearest later attack generation that strictly
/// lowers the defense effectiveness `D(t'_j, ·)` below the anchor value
/// `D(t'_j, t'_j)`.
pub fn egt_attacker(
    matrix: &EffectivenessMatrix,
    attack: &GenerationTimeline,
    tolerance: f64,
) -> Result<SampleSeries<MetricValue>, MetricsError> {
    check_normalized(matrix)?;
    check_timeline(matrix, attack, 1)?;
    let instants = &attack.instants;
    let mut series = SampleSeries::new("EGT", attack.party);
    for (j, &anchor) in instants.iter().enumerate() {
        if j + 1 == instants.len() {
            break;
        }
        let value = match matrix.get(anchor, anchor) {
            None => None,
            Some(reference) => {
                let mut outcome = Some(MetricValue::PlusInfinity);
                for &later in &instants[j + 1..] {
                    match matrix.get(anchor, later) {
                        None => {
                            outcome = None;
                            break;
                        }
                        Some(v) if v < reference - tolerance => {
                            outcome = Some(MetricValue::Finite((later - anchor) as u64));
                            break;
                        }
                        Some(_) => {}
                    }
                }
                outcome
            }
        };
        series.push(anchor, value);
    }
    Ok(series)
}

/// Which opponent time wins when several candidates tie on the greatest
/// effectiveness change. `MostRecent` (the default) picks the largest
/// candidate time, yielding the smallest — most conservative — TT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    MostRecent,
    Earliest,
}

/// Triggering-Time for the defender.
///
/// For each defense generation `t_i` with `i >= 1`, finds the past attack
/// time (from `attack_times`, restricted to `[0, t_i)`) with the greatest
/// positive change `D(t_i, t') - D(t_{i-1}, t')` and returns `t_i - t'`.
/// `PlusInfinity` when no candidate shows a positive change. Candidates with
/// either entry missing are skipped; if every candidate is skipped the
/// sample is indeterminate.
pub fn tt_defender(
    matrix: &EffectivenessMatrix,
    defense: &GenerationTimeline,
    attack_times: &[Time],
    tie_break: TieBreak,
) -> Result<SampleSeries<MetricValue>, MetricsError> {
    check_normalized(matrix)?;
    check_timeline(matrix, defense, 2)?;
    let lower = matrix.horizon().start();
    let mut series = SampleSeries::new("TT", defense.party);
    for pair in defense.instants.windows(2) {
        let (previous, current) = (pair[0], pair[1]);
        let value = best_trigger(attack_times, lower, current, tie_break, |candidate| {
            let new = matrix.get(current, candidate)?;
            let old = matrix.get(previous, candidate)?;
            Some(new - old)
        });
        series.push(current, value);
    }
    Ok(series)
}

/// Triggering-Time for the attacker.
///
/// Mirror of [`tt_defender`]: the trigger of attack generation `t'_j` is the
/// past defense time with the greatest negative change
/// `D(t, t'_j) - D(t, t'_{j-1})`.
pub fn tt_attacker(
    matrix: &EffectivenessMatrix,
    attack: &GenerationTimeline,
    defense_times: &[Time],
    tie_break: TieBreak,
) -> Result<SampleSeries<MetricValue>, MetricsError> {
    check_normalized(matrix)?;
    check_timeline(matrix, attack, 2)?;
    let lower = matrix.horizon().start();
    let mut series = SampleSeries::new("TT", attack.party);
    for pair in attack.instants.windows(2) {
        let (previous, current) = (pair[0], pair[1]);
        // negated so the greatest negative change becomes the greatest score
        let value = best_trigger(defense_times, lower, current, tie_break, |candidate| {
            let new = matrix.get(candidate, current)?;
            let old = matrix.get(candidate, previous)?;
            Some(old - new)
        });
        series.push(current, value);
    }
    Ok(series)
}

/// Scan candidates below `generation`, scoring each with `score` (higher is
/// a stronger trigger; `None` means unevaluable). Returns the TT duration to
/// the best strictly positive score, `PlusInfinity` when all evaluable
/// scores are non-positive, and indeterminate (`None`) when candidates
/// existed but none were evaluable.
fn best_trigger(
    candidates: &[Time],
    lower: Time,
    generation: Time,
    tie_break: TieBreak,
    score: impl Fn(Time) -> Option<f64>,
) -> Option<MetricValue> {
    let mut best: Option<(f64, Time)> = None;
    let mut evaluable = 0usize;
    let mut considered = 0usize;
    for &candidate in candidates {
        if candidate < lower || candidate >= generation {
            continue;
        }
        considered += 1;
        let Some(s) = score(candidate) else { continue };
        evaluable += 1;
        if s <= 0.0 {
            continue;
        }
        let replace = match best {
            None => true,
            Some((best_score, best_time)) => {
                s > best_score
                    || (s == best_score
                        && match tie_break {
                            TieBreak::MostRecent => candidate > best_time,
                            TieBreak::Earliest => candidate < best_time,
                        })
            }
        };
        if replace {
            best = Some((s, candidate));
        }
    }
    match best {
        Some((_, trigger)) => Some(MetricValue::Finite((generation - trigger) as u64)),
        None if considered > 0 && evaluable == 0 => None,
        None => Some(MetricValue::PlusInfinity),
    }
}

/// Strict mode demands every present entry along a lag diagonal meets the
/// threshold; the relaxation demands only their average does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LbtMode {
    Strict,
    Averaged,
}

/// Parameters for Lagging-Behind-Time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LbtParams {
    /// Acceptable defense effectiveness threshold in `[0, 1]`.
    pub epsilon: f64,
    pub mode: LbtMode,
}

impl LbtParams {
    pub fn new(epsilon: f64, mode: LbtMode) -> Result<Self, MetricsError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(MetricsError::EpsilonOutOfRange(epsilon));
        }
        Ok(LbtParams { epsilon, mode })
    }
}

/// LBT result: the metric value plus the lags whose diagonal had no present
/// entry at all and therefore could not qualify.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LbtOutcome {
    pub value: MetricValue,
    pub skipped_lags: Vec<u64>,
}

/// Lagging-Behind-Time for the defender: the smallest lag `lambda` such that
/// the defense at every time `t >= lambda` is acceptably effective against
/// the attack from `lambda` units earlier. `MinusInfinity` when no lag in
/// `[0, T]` qualifies, meaning the defense lags by at least the horizon.
pub fn lbt_defender(
    matrix: &EffectivenessMatrix,
    params: &LbtParams,
) -> Result<LbtOutcome, MetricsError> {
    check_normalized(matrix)?;
    LbtParams::new(params.epsilon, params.mode)?;
    let horizon = matrix.horizon();
    let span = horizon.end() - horizon.start();
    let mut skipped = Vec::new();
    for lag in 0..=span {
        let entries = (horizon.start() + lag..=horizon.end()).map(|t| matrix.get(t, t - lag));
        match diagonal_qualifies(entries, params) {
            DiagonalState::Qualifies => {
                return Ok(LbtOutcome {
                    value: MetricValue::Finite(lag as u64),
                    skipped_lags: skipped,
                })
            }
            DiagonalState::Fails => {}
            DiagonalState::NoData => skipped.push(lag as u64),
        }
    }
    Ok(LbtOutcome { value: MetricValue::MinusInfinity, skipped_lags: skipped })
}

/// Lagging-Behind-Time for the attacker: the largest lag `lambda` such that
/// the defense at every time `t <= T - lambda` is acceptably effective
/// against the attack from `lambda` units later. Zero means the attacker
/// does not lag behind the defender; `MinusInfinity` when no lag qualifies.
pub fn lbt_attacker(
    matrix: &EffectivenessMatrix,
    params: &LbtParams,
) -> Result<LbtOutcome, MetricsError> {
    check_normalized(matrix)?;
    LbtParams::new(params.epsilon, params.mode)?;
    let horizon = matrix.horizon();
    let span = horizon.end() - horizon.start();
    let mut skipped = Vec::new();
    for lag in (0..=span).rev() {
        let entries = (horizon.start()..=horizon.end() - lag).map(|t| matrix.get(t, t + lag));
        match diagonal_qualifies(entries, params) {
            DiagonalState::Qualifies => {
                skipped.reverse();
                return Ok(LbtOutcome {
                    value: MetricValue::Finite(lag as u64),
                    skipped_lags: skipped,
                });
            }
            DiagonalState::Fails => {}
            DiagonalState::NoData => skipped.push(lag as u64),
        }
    }
    skipped.reverse();
    Ok(LbtOutcome { value: MetricValue::MinusInfinity, skipped_lags: skipped })
}

enum DiagonalState {
    Qualifies,
    Fails,
    NoData,
}

fn diagonal_qualifies(
    entries: impl Iterator<Item = Option<f64>>,
    params: &LbtParams,
) -> DiagonalState {
    let mut present = 0usize;
    let mut sum = 0.0;
    let mut all_meet = true;
    for entry in entries.flatten() {
        present += 1;
        sum += entry;
        if entry < params.epsilon {
            all_meet = false;
        }
    }
    if present == 0 {
        return DiagonalState::NoData;
    }
    let ok = match params.mode {
        LbtMode::Strict => all_meet,
        LbtMode::Averaged => sum / present as f64 >= params.epsilon,
    };
    if ok {
        DiagonalState::Qualifies
    } else {
        DiagonalState::Fails
    }
}
