//! Discrete time horizon, generation timelines, and the effectiveness matrix.
//!
//! Everything downstream (timeliness metrics, effectiveness metrics,
//! inference) operates on these three inputs. Times are integers; after
//! alignment the horizon starts at 0 and the original offset is kept for
//! display. All types are immutable once built and safe to share across
//! threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer time unit (day, hour, ...). Internally re-based so the horizon
/// starts at 0.
pub type Time = i64;

/// Which side of the interplay a timeline or metric belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Defender,
    Attacker,
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::Defender => write!(f, "defender"),
            Party::Attacker => write!(f, "attacker"),
        }
    }
}

/// Whether a larger matrix value is better for the defender.
///
/// Metrics assume `LargerIsBetter`; rates where smaller is better (false
/// positives, say) are flipped with `1 - v` by [`EffectivenessMatrix::normalize_orientation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    LargerIsBetter,
    SmallerIsBetter,
}

/// Whether a timeline records observed generations or probable ones
/// reconstructed from the matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimelineOrigin {
    Observed,
    /// Flagged by threshold inference; an approximation, not ground truth.
    Probable,
}

/// Inclusive integer time horizon `[start, end]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeHorizon {
    start: Time,
    end: Time,
    /// Offset back to the original (pre-alignment) time scale:
    /// `original = internal + offset`.
    pub offset: Time,
    pub unit_label: String,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HorizonError {
    #[error("horizon start {start} exceeds end {end}")]
    StartAfterEnd { start: Time, end: Time },
}

impl TimeHorizon {
    pub fn new(start: Time, end: Time) -> Result<Self, HorizonError> {
        if start > end {
            return Err(HorizonError::StartAfterEnd { start, end });
        }
        Ok(TimeHorizon {
            start,
            end,
            offset: 0,
            unit_label: "unit".to_string(),
        })
    }

    pub fn with_offset(mut self, offset: Time) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_unit_label(mut self, label: impl Into<String>) -> Self {
        self.unit_label = label.into();
        self
    }

    pub fn start(&self) -> Time {
        self.start
    }

    pub fn end(&self) -> Time {
        self.end
    }

    /// Number of discrete time points in the horizon.
    pub fn len(&self) -> usize {
        (self.end - self.start + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false // start <= end always holds
    }

    pub fn contains(&self, t: Time) -> bool {
        t >= self.start && t <= self.end
    }

    /// Iterate over every time point in the horizon.
    pub fn iter(&self) -> impl Iterator<Item = Time> {
        self.start..=self.end
    }
}

/// Align two observed spans onto one horizon re-based at 0.
///
/// The union of the spans becomes `[0, max_end - min_start]` and the
/// subtracted `min_start` is retained as the horizon offset. Symmetric in
/// its arguments up to party roles.
pub fn align_horizons(
    defender_span: (Time, Time),
    attacker_span: (Time, Time),
) -> Result<TimeHorizon, HorizonError> {
    for &(start, end) in &[defender_span, attacker_span] {
        if start > end {
            return Err(HorizonError::StartAfterEnd { start, end });
        }
    }
    let start = defender_span.0.min(attacker_span.0);
    let end = defender_span.1.max(attacker_span.1);
    Ok(TimeHorizon::new(0, end - start)?.with_offset(start))
}

/// Ordered evolution instants for one party over the horizon.
///
/// Instants are strictly increasing; `labels` optionally carries a nominal
/// identity (version string, tactic name) per instant. The struct itself is
/// permissive — [`validate_inputs`] reports violations as data rather than
/// failing construction, so files with bad timelines can be diagnosed fully.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationTimeline {
    pub party: Party,
    pub instants: Vec<Time>,
    /// One entry per instant; `None` where no nominal identity is known.
    pub labels: Vec<Option<String>>,
    pub origin: TimelineOrigin,
}

impl GenerationTimeline {
    /// Unlabeled, observed timeline.
    pub fn new(party: Party, instants: Vec<Time>) -> Self {
        let labels = vec![None; instants.len()];
        GenerationTimeline {
            party,
            instants,
            labels,
            origin: TimelineOrigin::Observed,
        }
    }

    /// Attach per-instant labels. Extra labels are dropped, missing ones
    /// padded with `None` so `labels.len() == instants.len()` always holds.
    pub fn with_labels(mut self, labels: Vec<Option<String>>) -> Self {
        let mut labels = labels;
        labels.resize(self.instants.len(), None);
        self.labels = labels;
        self
    }

    pub fn with_origin(mut self, origin: TimelineOrigin) -> Self {
        self.origin = origin;
        self
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }
}

/// D_t(A_t', M) values over the horizon, dense with an explicit missing mask.
///
/// Rows are defense times `t`, columns attack times `t'`, both spanning the
/// full horizon. Missing cells are first-class and never imputed; each metric
/// documents its own skip or abstain rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectivenessMatrix {
    horizon: TimeHorizon,
    values: Vec<f64>,
    present: Vec<bool>,
    pub metric_name: String,
    orientation: Orientation,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("cell ({t}, {t_prime}) lies outside the horizon")]
    OutOfHorizon { t: Time, t_prime: Time },
    #[error("cell ({t}, {t_prime}) value {value} is not finite")]
    NonFiniteValue { t: Time, t_prime: Time, value: f64 },
    #[error("cell ({t}, {t_prime}) value {value} is outside [0, 1]")]
    ValueOutOfRange { t: Time, t_prime: Time, value: f64 },
}

impl EffectivenessMatrix {
    /// All-missing matrix over the horizon.
    pub fn new(horizon: TimeHorizon, metric_name: impl Into<String>, orientation: Orientation) -> Self {
        let n = horizon.len();
        EffectivenessMatrix {
            horizon,
            values: vec![0.0; n * n],
            present: vec![false; n * n],
            metric_name: metric_name.into(),
            orientation,
        }
    }

    pub fn horizon(&self) -> &TimeHorizon {
        &self.horizon
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn index(&self, t: Time, t_prime: Time) -> Option<usize> {
        if !self.horizon.contains(t) || !self.horizon.contains(t_prime) {
            return None;
        }
        let n = self.horizon.len();
        let row = (t - self.horizon.start) as usize;
        let col = (t_prime - self.horizon.start) as usize;
        Some(row * n + col)
    }

    /// Store a value. Finiteness is enforced here; the `[0, 1]` range is
    /// checked by validation and by `normalize_orientation` so that
    /// out-of-range file contents can be reported rather than dropped.
    pub fn set(&mut self, t: Time, t_prime: Time, value: f64) -> Result<(), MatrixError> {
        if !value.is_finite() {
            return Err(MatrixError::NonFiniteValue { t, t_prime, value });
        }
        let idx = self
            .index(t, t_prime)
            .ok_or(MatrixError::OutOfHorizon { t, t_prime })?;
        self.values[idx] = value;
        self.present[idx] = true;
        Ok(())
    }

    /// Mark a cell missing.
    pub fn clear(&mut self, t: Time, t_prime: Time) -> Result<(), MatrixError> {
        let idx = self
            .index(t, t_prime)
            .ok_or(MatrixError::OutOfHorizon { t, t_prime })?;
        self.values[idx] = 0.0;
        self.present[idx] = false;
        Ok(())
    }

    /// Present value at `(t, t')`, or `None` when the cell is missing or out
    /// of the horizon.
    pub fn get(&self, t: Time, t_prime: Time) -> Option<f64> {
        let idx = self.index(t, t_prime)?;
        if self.present[idx] {
            Some(self.values[idx])
        } else {
            None
        }
    }

    pub fn is_present(&self, t: Time, t_prime: Time) -> bool {
        self.get(t, t_prime).is_some()
    }

    pub fn present_count(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }

    pub fn cell_count(&self) -> usize {
        self.values.len()
    }

    /// Flip a smaller-is-better metric to larger-is-better with `1 - v`.
    ///
    /// Idempotent on larger-is-better input; missing cells stay missing.
    /// Errors on the first present value outside `[0, 1]`, identifying the
    /// offending cell.
    pub fn normalize_orientation(mut self) -> Result<Self, MatrixError> {
        if let Some((t, t_prime, value)) = self.first_out_of_range() {
            return Err(MatrixError::ValueOutOfRange { t, t_prime, value });
        }
        if self.orientation == Orientation::SmallerIsBetter {
            for (value, &present) in self.values.iter_mut().zip(&self.present) {
                if present {
                    *value = 1.0 - *value;
                }
            }
            self.orientation = Orientation::LargerIsBetter;
        }
        Ok(self)
    }

    fn first_out_of_range(&self) -> Option<(Time, Time, f64)> {
        let n = self.horizon.len();
        for (idx, (&value, &present)) in self.values.iter().zip(&self.present).enumerate() {
            if present && !(0.0..=1.0).contains(&value) {
                let t = self.horizon.start + (idx / n) as Time;
                let t_prime = self.horizon.start + (idx % n) as Time;
                return Some((t, t_prime, value));
            }
        }
        None
    }
}

/// A single invariant violation found in the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    InstantOutOfHorizon { party: Party, instant: Time },
    NonMonotoneInstants { party: Party, index: usize, instant: Time },
    EmptyTimeline { party: Party },
    RepeatedConsecutiveLabel { party: Party, index: usize, label: String },
    ValueOutOfRange { t: Time, t_prime: Time, value: f64 },
    NoHorizon,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::InstantOutOfHorizon { party, instant } => {
                write!(f, "{party} instant {instant} lies outside the horizon")
            }
            Violation::NonMonotoneInstants { party, index, instant } => write!(
                f,
                "{party} instant {instant} at position {index} is not strictly increasing"
            ),
            Violation::EmptyTimeline { party } => {
                write!(f, "{party} timeline has no instants")
            }
            Violation::RepeatedConsecutiveLabel { party, index, label } => write!(
                f,
                "{party} label {label:?} at position {index} repeats the previous generation"
            ),
            Violation::ValueOutOfRange { t, t_prime, value } => {
                write!(f, "matrix cell ({t}, {t_prime}) value {value} is outside [0, 1]")
            }
            Violation::NoHorizon => write!(f, "no horizon: the matrix grid is empty"),
        }
    }
}

/// Violations found by [`validate_inputs`]. Violations are data, not
/// failures: an empty report means every invariant holds.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "no violations");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Check every type invariant over the matrix and timelines, returning all
/// violations found.
pub fn validate_inputs(
    matrix: &EffectivenessMatrix,
    timelines: &[&GenerationTimeline],
) -> ValidationReport {
    let mut violations = Vec::new();

    for (t, t_prime, value) in out_of_range_cells(matrix) {
        violations.push(Violation::ValueOutOfRange { t, t_prime, value });
    }

    for timeline in timelines {
        let party = timeline.party;
        if timeline.instants.is_empty() {
            violations.push(Violation::EmptyTimeline { party });
            continue;
        }
        let mut previous: Option<Time> = None;
        for (index, &instant) in timeline.instants.iter().enumerate() {
            if !matrix.horizon().contains(instant) {
                violations.push(Violation::InstantOutOfHorizon { party, instant });
            }
            if let Some(prev) = previous {
                if instant <= prev {
                    violations.push(Violation::NonMonotoneInstants { party, index, instant });
                }
            }
            previous = Some(instant);
        }
        for (index, window) in timeline.labels.windows(2).enumerate() {
            if let (Some(a), Some(b)) = (&window[0], &window[1]) {
                if a == b {
                    violations.push(Violation::RepeatedConsecutiveLabel {
                        party,
                        index: index + 1,
                        label: b.clone(),
                    });
                }
            }
        }
    }

    ValidationReport { violations }
}

fn out_of_range_cells(matrix: &EffectivenessMatrix) -> Vec<(Time, Time, f64)> {
    let mut cells = Vec::new();
    for t in matrix.horizon().iter() {
        for t_prime in matrix.horizon().iter() {
            if let Some(value) = matrix.get(t, t_prime) {
                if !(0.0..=1.0).contains(&value) {
                    cells.push((t, t_prime, value));
                }
            }
        }
    }
    cells
}
