//! Effectiveness-oriented metrics: Evolutionary-Effectiveness,
//! Relative-Generational-Impact, and Aggregated-Generational-Impact in both
//! its discrete and piecewise-continuous forms.

use serde::{Deserialize, Serialize};

use crate::error::MetricsError;
use crate::series::SampleSeries;
use crate::timeline::{EffectivenessMatrix, GenerationTimeline, Party};
use crate::timeliness::{check_normalized, check_timeline};

/// Horizon slice an EE sample averages over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EeVariant {
    /// Mean over the whole horizon (the defining form).
    #[default]
    FullHorizon,
    /// Mean from the reference generation's instant onward.
    FromGeneration,
}

/// Evolutionary-Effectiveness for the defender: for each reference attack
/// generation, the mean defense effectiveness against it across the horizon.
///
/// The divisor is the count of present entries, so missing cells lower the
/// weight rather than drag the mean toward zero. A reference column with no
/// present entries yields an indeterminate sample. The sample for the first
/// attack generation has no predecessor and is listed in `supplementary`.
pub fn ee_defender(
    matrix: &EffectivenessMatrix,
    attack: &GenerationTimeline,
    variant: EeVariant,
) -> Result<SampleSeries<f64>, MetricsError> {
    check_normalized(matrix)?;
    check_timeline(matrix, attack, 1)?;
    let horizon = matrix.horizon();
    let mut series = SampleSeries::new("EE", Party::Defender);
    series.supplementary = vec![attack.instants[0]];
    for &reference in &attack.instants {
        let from = match variant {
            EeVariant::FullHorizon => horizon.start(),
            EeVariant::FromGeneration => reference,
        };
        let values = (from..=horizon.end()).filter_map(|t| matrix.get(t, reference));
        series.push(reference, mean(values));
    }
    Ok(series)
}

/// Evolutionary-Effectiveness for the attacker: for each reference defense
/// generation, the mean effectiveness of that defense across all attacks in
/// the horizon.
pub fn ee_attacker(
    matrix: &EffectivenessMatrix,
    defense: &GenerationTimeline,
) -> Result<SampleSeries<f64>, MetricsError> {
    check_normalized(matrix)?;
    check_timeline(matrix, defense, 1)?;
    let horizon = matrix.horizon();
    let mut series = SampleSeries::new("EE", Party::Attacker);
    series.supplementary = vec![defense.instants[0]];
    for &reference in &defense.instants {
        let values = horizon.iter().filter_map(|t_prime| matrix.get(reference, t_prime));
        series.push(reference, mean(values));
    }
    Ok(series)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut count = 0usize;
    let mut sum = 0.0;
    for v in values {
        count += 1;
        sum += v;
    }
    if count == 0 {
        None
    } else {
        Some(sum / count as f64)
    }
}

/// Relative-Generational-Impact from the defender's view: the step change of
/// the diagonal effectiveness `D(t, t)` between consecutive times. Positive
/// samples mean the defender out-maneuvered the attacker at that step. The
/// attacker's series is the exact negation (see [`SampleSeries::negated`]).
///
/// Steps where either diagonal entry is missing yield no sample.
pub fn rgi_series(matrix: &EffectivenessMatrix) -> Result<SampleSeries<f64>, MetricsError> {
    check_normalized(matrix)?;
    let horizon = matrix.horizon();
    let mut series = SampleSeries::new("RGI", Party::Defender);
    for t in horizon.start() + 1..=horizon.end() {
        if let (Some(prev), Some(cur)) = (matrix.get(t - 1, t - 1), matrix.get(t, t)) {
            series.push(t, Some(cur - prev));
        }
    }
    Ok(series)
}

/// How the per-interval security gain is read off the effectiveness change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgiSignMode {
    /// Gains carry the sign of the change: drops in effectiveness contribute
    /// negatively. The default, and the reading under which the attacker's
    /// AGI is the exact negation of the defender's.
    #[default]
    Signed,
    /// Compatibility reading where both rises and drops contribute their
    /// magnitude, making the sum a measure of churn rather than net gain.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainInterpretation {
    SignedTriangle,
    AbsoluteTriangle,
}

impl From<AgiSignMode> for GainInterpretation {
    fn from(mode: AgiSignMode) -> Self {
        match mode {
            AgiSignMode::Signed => GainInterpretation::SignedTriangle,
            AgiSignMode::Absolute => GainInterpretation::AbsoluteTriangle,
        }
    }
}

/// Security gain of one interval (discrete) or one monotone segment
/// (continuous): the signed triangle area between the effectiveness line and
/// its left endpoint level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainSample {
    pub index: u64,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityGainSeries {
    pub interpretation: GainInterpretation,
    pub gains: Vec<GainSample>,
}

impl SecurityGainSeries {
    pub fn total(&self) -> f64 {
        self.gains.iter().map(|g| g.gain).sum()
    }
}

/// Discrete AGI result. `agi` is `None` (indeterminate) when no consecutive
/// diagonal pair was present; otherwise it is the mean gain over the
/// intervals that could be evaluated, with the gaps counted in
/// `skipped_intervals`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgiOutcome {
    pub gains: SecurityGainSeries,
    pub agi: Option<f64>,
    pub skipped_intervals: usize,
}

impl AgiOutcome {
    /// The attacker's view: every gain and the aggregate flip sign.
    pub fn negated(&self) -> AgiOutcome {
        AgiOutcome {
            gains: SecurityGainSeries {
                interpretation: self.gains.interpretation,
                gains: self
                    .gains
                    .gains
                    .iter()
                    .map(|g| GainSample { index: g.index, gain: -g.gain })
                    .collect(),
            },
            agi: self.agi.map(|v| -v),
            skipped_intervals: self.skipped_intervals,
        }
    }
}

/// Aggregated-Generational-Impact over the diagonal `D(t, t)`.
///
/// Interval `i` covers `[t_{i-1}, t_i]` with unit width; its gain is half
/// the diagonal change. The aggregate is the mean gain over evaluable
/// intervals, so on a full diagonal it telescopes to
/// `(D(T, T) - D(0, 0)) / 2T`.
pub fn agi_discrete(
    matrix: &EffectivenessMatrix,
    mode: AgiSignMode,
) -> Result<AgiOutcome, MetricsError> {
    check_normalized(matrix)?;
    let horizon = matrix.horizon();
    let mut gains = Vec::new();
    let mut skipped = 0usize;
    for (index, t) in (horizon.start() + 1..=horizon.end()).enumerate() {
        match (matrix.get(t - 1, t - 1), matrix.get(t, t)) {
            (Some(prev), Some(cur)) => {
                let gain = shape_gain(0.5 * (cur - prev), mode);
                gains.push(GainSample { index: index as u64 + 1, gain });
            }
            _ => skipped += 1,
        }
    }
    let agi = if gains.is_empty() {
        None
    } else {
        Some(gains.iter().map(|g| g.gain).sum::<f64>() / gains.len() as f64)
    };
    Ok(AgiOutcome {
        gains: SecurityGainSeries { interpretation: mode.into(), gains },
        agi,
        skipped_intervals: skipped,
    })
}

fn shape_gain(signed: f64, mode: AgiSignMode) -> f64 {
    match mode {
        AgiSignMode::Signed => signed,
        AgiSignMode::Absolute => signed.abs(),
    }
}

/// Continuous AGI over a piecewise-linear effectiveness curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousAgi {
    pub gains: SecurityGainSeries,
    pub agi: f64,
    /// Total curve duration the gains were averaged over.
    pub duration: f64,
}

/// Aggregated-Generational-Impact of a piecewise-linear curve.
///
/// The curve is split into maximal segments of one direction (rising,
/// falling, or flat; plateaus are their own zero-gain segments). Each
/// segment's gain is the sum over its linear pieces of the triangle area
/// between the piece and its left endpoint level — for a piece of width `w`
/// rising by `d`, that is `w * d / 2` — so the unit-spaced embedding of a
/// discrete diagonal reproduces [`agi_discrete`] exactly. The aggregate is
/// the summed gain divided by the total duration.
pub fn agi_continuous(
    curve: &[(f64, f64)],
    mode: AgiSignMode,
) -> Result<ContinuousAgi, MetricsError> {
    if curve.len() < 2 {
        return Err(MetricsError::CurveTooShort(curve.len()));
    }
    for (index, &(x, value)) in curve.iter().enumerate() {
        if !x.is_finite() || (index > 0 && x <= curve[index - 1].0) {
            return Err(MetricsError::NonMonotoneCurve { index });
        }
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(MetricsError::CurveValueOutOfRange { index, value });
        }
    }

    #[derive(PartialEq, Clone, Copy)]
    enum Direction {
        Rising,
        Flat,
        Falling,
    }

    let mut gains: Vec<GainSample> = Vec::new();
    let mut current: Option<(Direction, f64)> = None;
    for pair in curve.windows(2) {
        let ((x0, v0), (x1, v1)) = (pair[0], pair[1]);
        let delta = v1 - v0;
        let direction = if delta > 0.0 {
            Direction::Rising
        } else if delta < 0.0 {
            Direction::Falling
        } else {
            Direction::Flat
        };
        let piece_gain = 0.5 * (x1 - x0) * delta;
        match &mut current {
            Some((dir, sum)) if *dir == direction => *sum += piece_gain,
            _ => {
                if let Some((_, sum)) = current.take() {
                    gains.push(GainSample {
                        index: gains.len() as u64 + 1,
                        gain: shape_gain(sum, mode),
                    });
                }
                current = Some((direction, piece_gain));
            }
        }
    }
    if let Some((_, sum)) = current {
        gains.push(GainSample { index: gains.len() as u64 + 1, gain: shape_gain(sum, mode) });
    }

    let duration = curve[curve.len() - 1].0 - curve[0].0;
    let agi = gains.iter().map(|g| g.gain).sum::<f64>() / duration;
    Ok(ContinuousAgi {
        gains: SecurityGainSeries { interpretation: mode.into(), gains },
        agi,
        duration,
    })
}

/// Embed the matrix diagonal as a unit-spaced piecewise-linear curve,
/// usable with [`agi_continuous`] when the diagonal is fully present.
pub fn diagonal_curve(matrix: &EffectivenessMatrix) -> Vec<(f64, f64)> {
    matrix
        .horizon()
        .iter()
        .filter_map(|t| matrix.get(t, t).map(|v| (t as f64, v)))
        .collect()
}
