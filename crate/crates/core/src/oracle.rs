//! Naive reference implementations of every metric, computed by literal
//! enumeration of the defining quantifiers with no shortcuts or early exits.
//!
//! This module shares only the domain types with the main implementations;
//! its logic is written directly from the metric definitions so the two
//! paths can cross-check each other. Deliberately quadratic-or-worse and
//! restricted to desk-scale horizons.

use thiserror::Error;

use crate::effectiveness::{AgiOutcome, AgiSignMode, EeVariant, GainSample, SecurityGainSeries};
use crate::report::{AgilityReport, MetricKind, ReportError, RunParams};
use crate::series::{paired_ratio_mean, MetricValue, SampleSeries, SeriesSummary};
use crate::timeline::{
    validate_inputs, EffectivenessMatrix, GenerationTimeline, Party, Time,
};
use crate::timeliness::{LbtMode, LbtOutcome, TieBreak};

/// Largest horizon span the oracle accepts; it is intentionally naive.
pub const ORACLE_MAX_SPAN: Time = 50;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle refuses horizons longer than {max}: span is {span}")]
    HorizonTooLarge { span: Time, max: Time },
    #[error(transparent)]
    Report(#[from] ReportError),
}

/// Compute the full report by brute force. Field-for-field comparable with
/// [`crate::report::compute_report`] on the same inputs.
pub fn oracle_metrics(
    matrix: &EffectivenessMatrix,
    defense: &GenerationTimeline,
    attack: &GenerationTimeline,
    params: &RunParams,
    source: impl Into<String>,
) -> Result<AgilityReport, OracleError> {
    let span = matrix.horizon().end() - matrix.horizon().start();
    if span > ORACLE_MAX_SPAN {
        return Err(OracleError::HorizonTooLarge { span, max: ORACLE_MAX_SPAN });
    }
    params.validate()?;
    let validation = validate_inputs(matrix, &[defense, attack]);
    if !validation.is_clean() {
        return Err(ReportError::Invalid(validation).into());
    }
    let matrix = matrix
        .clone()
        .normalize_orientation()
        .map_err(ReportError::from)?;

    let mut report = AgilityReport::empty(&matrix, defense, attack, params, source);
    if params.metrics.contains(MetricKind::Gt) {
        report.gt_defender = Some(with_summary(gaps(defense)));
        report.gt_attacker = Some(with_summary(gaps(attack)));
    }
    if params.metrics.contains(MetricKind::Egt) {
        report.egt_defender = Some(with_summary(effective_generation_times(
            &matrix,
            defense,
            params.egt_tolerance,
        )));
        report.egt_attacker = Some(with_summary(effective_generation_times(
            &matrix,
            attack,
            params.egt_tolerance,
        )));
        if let (Some(egt), Some(gt)) = (&report.egt_defender, &report.gt_defender) {
            report.egt_gt_ratio_defender = paired_ratio_mean(&egt.series, &gt.series);
        }
        if let (Some(egt), Some(gt)) = (&report.egt_attacker, &report.gt_attacker) {
            report.egt_gt_ratio_attacker = paired_ratio_mean(&egt.series, &gt.series);
        }
    }
    if params.metrics.contains(MetricKind::Tt) {
        report.tt_defender = Some(with_summary(triggering_times(
            &matrix,
            defense,
            &attack.instants,
            params.tt_tie_break,
        )));
        report.tt_attacker = Some(with_summary(triggering_times(
            &matrix,
            attack,
            &defense.instants,
            params.tt_tie_break,
        )));
    }
    if params.metrics.contains(MetricKind::Lbt) {
        report.lbt_defender = Some(lagging_behind(&matrix, Party::Defender, params));
        report.lbt_attacker = Some(lagging_behind(&matrix, Party::Attacker, params));
    }
    if params.metrics.contains(MetricKind::Ee) {
        report.ee_defender = Some(with_real_summary(evolutionary_effectiveness(
            &matrix,
            Party::Defender,
            attack,
            params.ee_variant,
        )));
        report.ee_attacker = Some(with_real_summary(evolutionary_effectiveness(
            &matrix,
            Party::Attacker,
            defense,
            params.ee_variant,
        )));
    }
    if params.metrics.contains(MetricKind::Rgi) {
        let defender = generational_impacts(&matrix, 1.0, Party::Defender);
        let attacker = generational_impacts(&matrix, -1.0, Party::Attacker);
        report.rgi_defender = Some(with_real_summary(defender));
        report.rgi_attacker = Some(with_real_summary(attacker));
    }
    if params.metrics.contains(MetricKind::Agi) {
        report.agi_defender = Some(aggregated_impact(&matrix, params.agi_sign, 1.0));
        report.agi_attacker = Some(aggregated_impact(&matrix, params.agi_sign, -1.0));
    }
    Ok(report)
}

fn with_summary(series: SampleSeries<MetricValue>) -> crate::report::ReportSeries<MetricValue> {
    let summary: SeriesSummary = series.summary();
    crate::report::ReportSeries { series, summary }
}

fn with_real_summary(series: SampleSeries<f64>) -> crate::report::ReportSeries<f64> {
    let summary: SeriesSummary = series.summary();
    crate::report::ReportSeries { series, summary }
}

fn gaps(timeline: &GenerationTimeline) -> SampleSeries<MetricValue> {
    let mut series = SampleSeries::new("GT", timeline.party);
    for i in 0..timeline.instants.len() {
        if i + 1 < timeline.instants.len() {
            let gap = timeline.instants[i + 1] - timeline.instants[i];
            series.push(timeline.instants[i], Some(MetricValue::Finite(gap as u64)));
        }
    }
    series
}

/// Entry of the effectiveness matrix from the perspective of `party`: the
/// anchor indexes its own axis, `other` the scanned generation.
fn own_entry(
    matrix: &EffectivenessMatrix,
    party: Party,
    anchor: Time,
    other: Time,
) -> Option<f64> {
    match party {
        Party::Defender => matrix.get(other, anchor),
        Party::Attacker => matrix.get(anchor, other),
    }
}

fn effective_generation_times(
    matrix: &EffectivenessMatrix,
    timeline: &GenerationTimeline,
    tolerance: f64,
) -> SampleSeries<MetricValue> {
    let party = timeline.party;
    let instants = &timeline.instants;
    let mut series = SampleSeries::new("EGT", party);
    for i in 0..instants.len().saturating_sub(1) {
        let anchor = instants[i];
        let Some(reference) = matrix.get(anchor, anchor) else {
            series.push(anchor, None);
            continue;
        };
        let later = &instants[i + 1..];
        // smallest candidate satisfying both defining conditions: a strict
        // improvement, with every generation in between present and not an
        // improvement
        let mut qualifying: Option<Time> = None;
        'candidates: for &candidate in later {
            let Some(value) = own_entry(matrix, party, anchor, candidate) else {
                continue;
            };
            let improved = match party {
                Party::Defender => value > reference + tolerance,
                Party::Attacker => value < reference - tolerance,
            };
            if !improved {
                continue;
            }
            for &between in later.iter().take_while(|&&g| g < candidate) {
                match own_entry(matrix, party, anchor, between) {
                    Some(v) => {
                        let still_flat = match party {
                            Party::Defender => v <= reference + tolerance,
                            Party::Attacker => v >= reference - tolerance,
                        };
                        if !still_flat {
                            continue 'candidates;
                        }
                    }
                    None => continue 'candidates,
                }
            }
            qualifying = Some(candidate);
            break;
        }
        let any_missing = later
            .iter()
            .take_while(|&&g| qualifying.is_none_or(|q| g < q))
            .any(|&g| own_entry(matrix, party, anchor, g).is_none());
        let value = match qualifying {
            Some(candidate) => Some(MetricValue::Finite((candidate - anchor) as u64)),
            None if any_missing => None,
            None => Some(MetricValue::PlusInfinity),
        };
        series.push(anchor, value);
    }
    series
}

fn triggering_times(
    matrix: &EffectivenessMatrix,
    timeline: &GenerationTimeline,
    opponent_times: &[Time],
    tie_break: TieBreak,
) -> SampleSeries<MetricValue> {
    let party = timeline.party;
    let mut series = SampleSeries::new("TT", party);
    let start = matrix.horizon().start();
    for i in 1..timeline.instants.len() {
        let generation = timeline.instants[i];
        let previous = timeline.instants[i - 1];
        let in_range: Vec<Time> = opponent_times
            .iter()
            .copied()
            .filter(|&c| c >= start && c < generation)
            .collect();
        // collect every evaluable candidate with its change, then select
        let mut changes: Vec<(Time, f64)> = Vec::new();
        for &candidate in &in_range {
            let pair = match party {
                Party::Defender => (
                    matrix.get(generation, candidate),
                    matrix.get(previous, candidate),
                ),
                Party::Attacker => (
                    matrix.get(candidate, generation),
                    matrix.get(candidate, previous),
                ),
            };
            if let (Some(new), Some(old)) = pair {
                changes.push((candidate, new - old));
            }
        }
        let qualifying: Vec<(Time, f64)> = changes
            .iter()
            .copied()
            .filter(|&(_, change)| match party {
                Party::Defender => change > 0.0,
                Party::Attacker => change < 0.0,
            })
            .collect();
        let value = if let Some(best) = select_trigger(&qualifying, party, tie_break) {
            Some(MetricValue::Finite((generation - best) as u64))
        } else if !in_range.is_empty() && changes.is_empty() {
            None
        } else {
            Some(MetricValue::PlusInfinity)
        };
        series.push(generation, value);
    }
    series
}

fn select_trigger(
    qualifying: &[(Time, f64)],
    party: Party,
    tie_break: TieBreak,
) -> Option<Time> {
    let extreme = qualifying
        .iter()
        .map(|&(_, change)| change)
        .fold(None::<f64>, |acc, change| match (acc, party) {
            (None, _) => Some(change),
            (Some(best), Party::Defender) => Some(best.max(change)),
            (Some(best), Party::Attacker) => Some(best.min(change)),
        })?;
    let tied = qualifying.iter().filter(|&&(_, change)| change == extreme);
    match tie_break {
        TieBreak::MostRecent => tied.map(|&(t, _)| t).max(),
        TieBreak::Earliest => tied.map(|&(t, _)| t).min(),
    }
}

fn lagging_behind(
    matrix: &EffectivenessMatrix,
    party: Party,
    params: &RunParams,
) -> LbtOutcome {
    let horizon = matrix.horizon();
    let span = horizon.end() - horizon.start();
    let mut qualifying: Vec<Time> = Vec::new();
    let mut skipped: Vec<u64> = Vec::new();
    for lag in 0..=span {
        let mut values = Vec::new();
        for t in horizon.iter() {
            let entry = match party {
                Party::Defender if t - lag >= horizon.start() => matrix.get(t, t - lag),
                Party::Attacker if t + lag <= horizon.end() => matrix.get(t, t + lag),
                _ => None,
            };
            if let Some(v) = entry {
                values.push(v);
            }
        }
        if values.is_empty() {
            skipped.push(lag as u64);
            continue;
        }
        let ok = match params.lbt_mode {
            LbtMode::Strict => values.iter().all(|&v| v >= params.epsilon),
            LbtMode::Averaged => {
                values.iter().sum::<f64>() / values.len() as f64 >= params.epsilon
            }
        };
        if ok {
            qualifying.push(lag);
        }
    }
    let chosen = match party {
        Party::Defender => qualifying.iter().min(),
        Party::Attacker => qualifying.iter().max(),
    };
    let value = match chosen {
        Some(&lag) => MetricValue::Finite(lag as u64),
        None => MetricValue::MinusInfinity,
    };
    // only lags the search actually had to pass over are reported
    let skipped = match (party, value) {
        (Party::Defender, MetricValue::Finite(lag)) => {
            skipped.into_iter().filter(|&s| s < lag).collect()
        }
        (Party::Attacker, MetricValue::Finite(lag)) => {
            skipped.into_iter().filter(|&s| s > lag).collect()
        }
        _ => skipped,
    };
    LbtOutcome { value, skipped_lags: skipped }
}

fn evolutionary_effectiveness(
    matrix: &EffectivenessMatrix,
    party: Party,
    references: &GenerationTimeline,
    variant: EeVariant,
) -> SampleSeries<f64> {
    let horizon = matrix.horizon();
    let mut series = SampleSeries::new("EE", party);
    series.supplementary = references.instants.first().copied().into_iter().collect();
    for &reference in &references.instants {
        let mut sum = 0.0;
        let mut count = 0usize;
        for t in horizon.iter() {
            let entry = match party {
                Party::Defender => {
                    if variant == EeVariant::FromGeneration && t < reference {
                        continue;
                    }
                    matrix.get(t, reference)
                }
                // the attacker's EE always spans the full horizon
                Party::Attacker => matrix.get(reference, t),
            };
            if let Some(v) = entry {
                sum += v;
                count += 1;
            }
        }
        series.push(reference, if count == 0 { None } else { Some(sum / count as f64) });
    }
    series
}

fn generational_impacts(
    matrix: &EffectivenessMatrix,
    sign: f64,
    party: Party,
) -> SampleSeries<f64> {
    let horizon = matrix.horizon();
    let mut series = SampleSeries::new("RGI", party);
    for t in horizon.iter() {
        if t == horizon.start() {
            continue;
        }
        if let (Some(prev), Some(cur)) = (matrix.get(t - 1, t - 1), matrix.get(t, t)) {
            series.push(t, Some(sign * (cur - prev)));
        }
    }
    series
}

fn aggregated_impact(matrix: &EffectivenessMatrix, mode: AgiSignMode, sign: f64) -> AgiOutcome {
    let horizon = matrix.horizon();
    let mut gains = Vec::new();
    let mut skipped = 0usize;
    let mut index = 0u64;
    for t in horizon.iter() {
        if t == horizon.start() {
            continue;
        }
        index += 1;
        match (matrix.get(t - 1, t - 1), matrix.get(t, t)) {
            (Some(prev), Some(cur)) => {
                let base = 0.5 * (cur - prev);
                let gain = match mode {
                    AgiSignMode::Signed => sign * base,
                    AgiSignMode::Absolute => {
                        if sign > 0.0 {
                            base.abs()
                        } else {
                            -base.abs()
                        }
                    }
                };
                gains.push(GainSample { index, gain });
            }
            _ => skipped += 1,
        }
    }
    let agi = if gains.is_empty() {
        None
    } else {
        Some(gains.iter().map(|g| g.gain).sum::<f64>() / gains.len() as f64)
    };
    AgiOutcome {
        gains: SecurityGainSeries { interpretation: mode.into(), gains },
        agi,
        skipped_intervals: skipped,
    }
}
