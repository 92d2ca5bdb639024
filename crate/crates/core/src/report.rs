//! Report assembly and export: runs the metric suite over validated inputs,
//! packages the results with their parameters and provenance, and renders
//! them as a structured JSON document or as per-figure plot-data tables.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::effectiveness::{
    agi_discrete, ee_attacker, ee_defender, rgi_series, AgiOutcome, AgiSignMode, EeVariant,
};
use crate::error::MetricsError;
use crate::series::{paired_ratio_mean, MetricValue, SampleSeries, SeriesSummary};
use crate::timeline::{
    validate_inputs, EffectivenessMatrix, GenerationTimeline, MatrixError, Party,
    TimeHorizon, TimelineOrigin, ValidationReport,
};
use crate::timeliness::{
    egt_attacker, egt_defender, gt_samples, lbt_attacker, lbt_defender, tt_attacker,
    tt_defender, LbtMode, LbtOutcome, LbtParams, TieBreak,
};

/// The metric families a run can compute.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Gt,
    Egt,
    Tt,
    Lbt,
    Ee,
    Rgi,
    Agi,
}

impl MetricKind {
    pub const ALL: [MetricKind; 7] = [
        MetricKind::Gt,
        MetricKind::Egt,
        MetricKind::Tt,
        MetricKind::Lbt,
        MetricKind::Ee,
        MetricKind::Rgi,
        MetricKind::Agi,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Gt => "gt",
            MetricKind::Egt => "egt",
            MetricKind::Tt => "tt",
            MetricKind::Lbt => "lbt",
            MetricKind::Ee => "ee",
            MetricKind::Rgi => "rgi",
            MetricKind::Agi => "agi",
        }
    }
}

/// Which metrics to compute: `all`, or a comma-separated subset like
/// `gt,egt,lbt`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricSelection(BTreeSet<MetricKind>);

impl MetricSelection {
    pub fn all() -> Self {
        MetricSelection(MetricKind::ALL.into_iter().collect())
    }

    pub fn is_all(&self) -> bool {
        self.0.len() == MetricKind::ALL.len()
    }

    pub fn contains(&self, kind: MetricKind) -> bool {
        self.0.contains(&kind)
    }

    pub fn parse(text: &str) -> Result<Self, ReportError> {
        if text == "all" {
            return Ok(Self::all());
        }
        let mut set = BTreeSet::new();
        for name in text.split(',') {
            let kind = MetricKind::ALL
                .into_iter()
                .find(|k| k.name() == name)
                .ok_or_else(|| ReportError::UnknownMetric(name.to_string()))?;
            set.insert(kind);
        }
        if set.is_empty() {
            return Err(ReportError::UnknownMetric(String::new()));
        }
        Ok(MetricSelection(set))
    }
}

impl Default for MetricSelection {
    fn default() -> Self {
        Self::all()
    }
}

impl std::fmt::Display for MetricSelection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_all() {
            return write!(f, "all");
        }
        let names: Vec<&str> = self.0.iter().map(|k| k.name()).collect();
        write!(f, "{}", names.join(","))
    }
}

/// Parameters of a metric run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    /// Acceptable defense effectiveness for LBT.
    pub epsilon: f64,
    /// Disruption threshold recorded for probable-generation inference.
    pub tau: f64,
    pub lbt_mode: LbtMode,
    pub ee_variant: EeVariant,
    pub agi_sign: AgiSignMode,
    pub metrics: MetricSelection,
    /// Widens EGT's strict-improvement comparison; 0 keeps exact comparison.
    pub egt_tolerance: f64,
    pub tt_tie_break: TieBreak,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams {
            epsilon: 0.12,
            tau: 0.2,
            lbt_mode: LbtMode::Strict,
            ee_variant: EeVariant::FullHorizon,
            agi_sign: AgiSignMode::Signed,
            metrics: MetricSelection::all(),
            egt_tolerance: 0.0,
            tt_tie_break: TieBreak::MostRecent,
        }
    }
}

impl RunParams {
    pub fn validate(&self) -> Result<(), ReportError> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(MetricsError::EpsilonOutOfRange(self.epsilon).into());
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(ReportError::TauOutOfRange(self.tau));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("inputs failed validation:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("tau {0} is outside the open interval (0, 1)")]
    TauOutOfRange(f64),
    #[error("unknown metric name {0:?}")]
    UnknownMetric(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Where the inputs came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: String,
    pub metric_name: String,
    pub horizon: TimeHorizon,
    pub defense_origin: TimelineOrigin,
    pub attack_origin: TimelineOrigin,
}

/// A sample series together with its summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSeries<V> {
    pub series: SampleSeries<V>,
    pub summary: SeriesSummary,
}

impl ReportSeries<MetricValue> {
    fn duration(series: SampleSeries<MetricValue>) -> Self {
        let summary = series.summary();
        ReportSeries { series, summary }
    }
}

impl ReportSeries<f64> {
    fn real(series: SampleSeries<f64>) -> Self {
        let summary = series.summary();
        ReportSeries { series, summary }
    }
}

/// All computed metrics for one matrix and pair of timelines, with the
/// parameters and input provenance. Fields are `None` when the metric was
/// not selected. Serialized field names are the public report contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgilityReport {
    pub schema: String,
    pub params: RunParams,
    pub provenance: Provenance,
    pub defense_timeline: GenerationTimeline,
    pub attack_timeline: GenerationTimeline,
    pub gt_defender: Option<ReportSeries<MetricValue>>,
    pub gt_attacker: Option<ReportSeries<MetricValue>>,
    pub egt_defender: Option<ReportSeries<MetricValue>>,
    pub egt_attacker: Option<ReportSeries<MetricValue>>,
    /// Mean of per-anchor EGT/GT ratios over anchors where both are finite.
    pub egt_gt_ratio_defender: Option<f64>,
    pub egt_gt_ratio_attacker: Option<f64>,
    pub tt_defender: Option<ReportSeries<MetricValue>>,
    pub tt_attacker: Option<ReportSeries<MetricValue>>,
    pub lbt_defender: Option<LbtOutcome>,
    pub lbt_attacker: Option<LbtOutcome>,
    pub ee_defender: Option<ReportSeries<f64>>,
    pub ee_attacker: Option<ReportSeries<f64>>,
    pub rgi_defender: Option<ReportSeries<f64>>,
    pub rgi_attacker: Option<ReportSeries<f64>>,
    pub agi_defender: Option<AgiOutcome>,
    pub agi_attacker: Option<AgiOutcome>,
}

pub const REPORT_SCHEMA: &str = "agility-report/1";

/// Run the selected metrics over validated inputs and assemble the report.
///
/// The matrix is normalized to larger-is-better internally; `source` names
/// the input for provenance. Deterministic: identical inputs and parameters
/// produce an identical report.
pub fn compute_report(
    matrix: &EffectivenessMatrix,
    defense: &GenerationTimeline,
    attack: &GenerationTimeline,
    params: &RunParams,
    source: impl Into<String>,
) -> Result<AgilityReport, ReportError> {
    params.validate()?;
    let validation = validate_inputs(matrix, &[defense, attack]);
    if !validation.is_clean() {
        return Err(ReportError::Invalid(validation));
    }
    let matrix = matrix.clone().normalize_orientation()?;
    let mut report = AgilityReport::empty(&matrix, defense, attack, params, source);

    if params.metrics.contains(MetricKind::Gt) {
        report.gt_defender = Some(ReportSeries::duration(gt_samples(defense)?));
        report.gt_attacker = Some(ReportSeries::duration(gt_samples(attack)?));
    }
    if params.metrics.contains(MetricKind::Egt) {
        report.egt_defender = Some(ReportSeries::duration(egt_defender(
            &matrix,
            defense,
            params.egt_tolerance,
        )?));
        report.egt_attacker = Some(ReportSeries::duration(egt_attacker(
            &matrix,
            attack,
            params.egt_tolerance,
        )?));
        if let (Some(egt), Some(gt)) = (&report.egt_defender, &report.gt_defender) {
            report.egt_gt_ratio_defender = paired_ratio_mean(&egt.series, &gt.series);
        }
        if let (Some(egt), Some(gt)) = (&report.egt_attacker, &report.gt_attacker) {
            report.egt_gt_ratio_attacker = paired_ratio_mean(&egt.series, &gt.series);
        }
    }
    if params.metrics.contains(MetricKind::Tt) {
        report.tt_defender = Some(ReportSeries::duration(if defense.len() >= 2 {
            tt_defender(&matrix, defense, &attack.instants, params.tt_tie_break)?
        } else {
            SampleSeries::new("TT", Party::Defender)
        }));
        report.tt_attacker = Some(ReportSeries::duration(if attack.len() >= 2 {
            tt_attacker(&matrix, attack, &defense.instants, params.tt_tie_break)?
        } else {
            SampleSeries::new("TT", Party::Attacker)
        }));
    }
    if params.metrics.contains(MetricKind::Lbt) {
        let lbt_params = LbtParams::new(params.epsilon, params.lbt_mode)?;
        report.lbt_defender = Some(lbt_defender(&matrix, &lbt_params)?);
        report.lbt_attacker = Some(lbt_attacker(&matrix, &lbt_params)?);
    }
    if params.metrics.contains(MetricKind::Ee) {
        report.ee_defender = Some(ReportSeries::real(ee_defender(
            &matrix,
            attack,
            params.ee_variant,
        )?));
        report.ee_attacker = Some(ReportSeries::real(ee_attacker(&matrix, defense)?));
    }
    if params.metrics.contains(MetricKind::Rgi) {
        let defender = rgi_series(&matrix)?;
        let attacker = defender.negated("RGI", Party::Attacker);
        report.rgi_defender = Some(ReportSeries::real(defender));
        report.rgi_attacker = Some(ReportSeries::real(attacker));
    }
    if params.metrics.contains(MetricKind::Agi) {
        let defender = agi_discrete(&matrix, params.agi_sign)?;
        report.agi_attacker = Some(defender.negated());
        report.agi_defender = Some(defender);
    }
    Ok(report)
}

impl AgilityReport {
    /// Shared scaffold for the main path and the oracle: provenance and
    /// timelines filled in, every metric still unset.
    pub fn empty(
        matrix: &EffectivenessMatrix,
        defense: &GenerationTimeline,
        attack: &GenerationTimeline,
        params: &RunParams,
        source: impl Into<String>,
    ) -> AgilityReport {
        AgilityReport {
            schema: REPORT_SCHEMA.to_string(),
            params: params.clone(),
            provenance: Provenance {
                source: source.into(),
                metric_name: matrix.metric_name.clone(),
                horizon: matrix.horizon().clone(),
                defense_origin: defense.origin,
                attack_origin: attack.origin,
            },
            defense_timeline: defense.clone(),
            attack_timeline: attack.clone(),
            gt_defender: None,
            gt_attacker: None,
            egt_defender: None,
            egt_attacker: None,
            egt_gt_ratio_defender: None,
            egt_gt_ratio_attacker: None,
            tt_defender: None,
            tt_attacker: None,
            lbt_defender: None,
            lbt_attacker: None,
            ee_defender: None,
            ee_attacker: None,
            rgi_defender: None,
            rgi_attacker: None,
            agi_defender: None,
            agi_attacker: None,
        }
    }

    /// Pretty-printed JSON document with a trailing newline. Deterministic;
    /// sentinels render as `"+inf"` / `"-inf"`.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<AgilityReport, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<(), ReportError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<AgilityReport, ReportError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

/// Compare two reports field by field. Integer and sentinel values must
/// match exactly; real values may differ by at most `tolerance`. Returns a
/// human-readable line per mismatch, empty when the reports agree.
pub fn report_diff(a: &AgilityReport, b: &AgilityReport, tolerance: f64) -> Vec<String> {
    let mut diffs = Vec::new();
    let mut check = |field: &str, equal: bool| {
        if !equal {
            diffs.push(format!("{field} differs"));
        }
    };

    check("schema", a.schema == b.schema);
    check("params", a.params == b.params);
    check("provenance", a.provenance == b.provenance);
    check("defense_timeline", a.defense_timeline == b.defense_timeline);
    check("attack_timeline", a.attack_timeline == b.attack_timeline);

    diff_duration_series(&mut diffs, "gt_defender", &a.gt_defender, &b.gt_defender, tolerance);
    diff_duration_series(&mut diffs, "gt_attacker", &a.gt_attacker, &b.gt_attacker, tolerance);
    diff_duration_series(&mut diffs, "egt_defender", &a.egt_defender, &b.egt_defender, tolerance);
    diff_duration_series(&mut diffs, "egt_attacker", &a.egt_attacker, &b.egt_attacker, tolerance);
    diff_real_option(
        &mut diffs,
        "egt_gt_ratio_defender",
        a.egt_gt_ratio_defender,
        b.egt_gt_ratio_defender,
        tolerance,
    );
    diff_real_option(
        &mut diffs,
        "egt_gt_ratio_attacker",
        a.egt_gt_ratio_attacker,
        b.egt_gt_ratio_attacker,
        tolerance,
    );
    diff_duration_series(&mut diffs, "tt_defender", &a.tt_defender, &b.tt_defender, tolerance);
    diff_duration_series(&mut diffs, "tt_attacker", &a.tt_attacker, &b.tt_attacker, tolerance);
    if a.lbt_defender != b.lbt_defender {
        diffs.push("lbt_defender differs".to_string());
    }
    if a.lbt_attacker != b.lbt_attacker {
        diffs.push("lbt_attacker differs".to_string());
    }
    diff_real_series(&mut diffs, "ee_defender", &a.ee_defender, &b.ee_defender, tolerance);
    diff_real_series(&mut diffs, "ee_attacker", &a.ee_attacker, &b.ee_attacker, tolerance);
    diff_real_series(&mut diffs, "rgi_defender", &a.rgi_defender, &b.rgi_defender, tolerance);
    diff_real_series(&mut diffs, "rgi_attacker", &a.rgi_attacker, &b.rgi_attacker, tolerance);
    diff_agi(&mut diffs, "agi_defender", &a.agi_defender, &b.agi_defender, tolerance);
    diff_agi(&mut diffs, "agi_attacker", &a.agi_attacker, &b.agi_attacker, tolerance);
    diffs
}

fn close(a: f64, b: f64, tolerance: f64) -> bool {
    a == b || (a - b).abs() <= tolerance
}

fn diff_real_option(
    diffs: &mut Vec<String>,
    field: &str,
    a: Option<f64>,
    b: Option<f64>,
    tolerance: f64,
) {
    let equal = match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => close(x, y, tolerance),
        _ => false,
    };
    if !equal {
        diffs.push(format!("{field}: {a:?} vs {b:?}"));
    }
}

fn diff_duration_series(
    diffs: &mut Vec<String>,
    field: &str,
    a: &Option<ReportSeries<MetricValue>>,
    b: &Option<ReportSeries<MetricValue>>,
    tolerance: f64,
) {
    match (a, b) {
        (None, None) => {}
        (Some(a), Some(b)) => {
            // durations and sentinels must agree exactly
            if a.series != b.series {
                diffs.push(format!("{field}: series differ"));
            }
            diff_summary(diffs, field, &a.summary, &b.summary, tolerance);
        }
        _ => diffs.push(format!("{field}: present on one side only")),
    }
}

fn diff_real_series(
    diffs: &mut Vec<String>,
    field: &str,
    a: &Option<ReportSeries<f64>>,
    b: &Option<ReportSeries<f64>>,
    tolerance: f64,
) {
    match (a, b) {
        (None, None) => {}
        (Some(a), Some(b)) => {
            let sa = &a.series;
            let sb = &b.series;
            if sa.metric != sb.metric
                || sa.party != sb.party
                || sa.supplementary != sb.supplementary
                || sa.samples.len() != sb.samples.len()
            {
                diffs.push(format!("{field}: series shape differs"));
                return;
            }
            for (x, y) in sa.samples.iter().zip(&sb.samples) {
                let equal = x.anchor == y.anchor
                    && match (x.value, y.value) {
                        (None, None) => true,
                        (Some(u), Some(v)) => close(u, v, tolerance),
                        _ => false,
                    };
                if !equal {
                    diffs.push(format!(
                        "{field} at anchor {}: {:?} vs {:?}",
                        x.anchor, x.value, y.value
                    ));
                }
            }
            diff_summary(diffs, field, &a.summary, &b.summary, tolerance);
        }
        _ => diffs.push(format!("{field}: present on one side only")),
    }
}

fn diff_summary(
    diffs: &mut Vec<String>,
    field: &str,
    a: &SeriesSummary,
    b: &SeriesSummary,
    tolerance: f64,
) {
    let counts_equal = a.finite_count == b.finite_count
        && a.plus_infinity_count == b.plus_infinity_count
        && a.minus_infinity_count == b.minus_infinity_count
        && a.indeterminate_count == b.indeterminate_count;
    let mean_equal = match (a.mean, b.mean) {
        (None, None) => true,
        (Some(x), Some(y)) => close(x, y, tolerance),
        _ => false,
    };
    if !counts_equal || !mean_equal {
        diffs.push(format!("{field}: summary differs"));
    }
}

fn diff_agi(
    diffs: &mut Vec<String>,
    field: &str,
    a: &Option<AgiOutcome>,
    b: &Option<AgiOutcome>,
    tolerance: f64,
) {
    match (a, b) {
        (None, None) => {}
        (Some(a), Some(b)) => {
            if a.skipped_intervals != b.skipped_intervals
                || a.gains.interpretation != b.gains.interpretation
                || a.gains.gains.len() != b.gains.gains.len()
            {
                diffs.push(format!("{field}: shape differs"));
                return;
            }
            for (x, y) in a.gains.gains.iter().zip(&b.gains.gains) {
                if x.index != y.index || !close(x.gain, y.gain, tolerance) {
                    diffs.push(format!("{field} gain {}: {} vs {}", x.index, x.gain, y.gain));
                }
            }
            diff_real_option(diffs, &format!("{field}.agi"), a.agi, b.agi, tolerance);
        }
        _ => diffs.push(format!("{field}: present on one side only")),
    }
}

/// Render the per-figure plot-data tables: paired GT/EGT bars, TT with its
/// worst-case reference, RGI steps, LBT threshold curves, and the raw EE
/// curves per reference generation. Returns `(file_name, contents)` pairs;
/// columns are documented in the README.
pub fn plot_data(report: &AgilityReport, matrix: &EffectivenessMatrix) -> Vec<(String, String)> {
    let mut files = Vec::new();
    let normalized = matrix
        .clone()
        .normalize_orientation()
        .expect("report inputs were validated");

    for (name, gt, egt) in [
        ("plot_gt_egt_defender.csv", &report.gt_defender, &report.egt_defender),
        ("plot_gt_egt_attacker.csv", &report.gt_attacker, &report.egt_attacker),
    ] {
        if let Some(gt) = gt {
            let mut out = String::from("anchor,gt,egt\n");
            for sample in &gt.series.samples {
                let egt_cell = egt
                    .as_ref()
                    .and_then(|e| {
                        e.series
                            .samples
                            .iter()
                            .find(|s| s.anchor == sample.anchor)
                    })
                    .and_then(|s| s.value)
                    .and_then(|v| v.finite())
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                let gt_cell = sample
                    .value
                    .and_then(|v| v.finite())
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                out.push_str(&format!("{},{},{}\n", sample.anchor, gt_cell, egt_cell));
            }
            files.push((name.to_string(), out));
        }
    }

    for (name, tt, opponent_first) in [
        (
            "plot_tt_defender.csv",
            &report.tt_defender,
            report.attack_timeline.instants.first().copied(),
        ),
        (
            "plot_tt_attacker.csv",
            &report.tt_attacker,
            report.defense_timeline.instants.first().copied(),
        ),
    ] {
        if let Some(tt) = tt {
            let mut out = String::from("anchor,tt,worst_case\n");
            for sample in &tt.series.samples {
                let tt_cell = sample
                    .value
                    .and_then(|v| v.finite())
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                let worst = opponent_first
                    .map(|first| (sample.anchor - first).to_string())
                    .unwrap_or_default();
                out.push_str(&format!("{},{},{}\n", sample.anchor, tt_cell, worst));
            }
            files.push((name.to_string(), out));
        }
    }

    if let (Some(defender), Some(attacker)) = (&report.rgi_defender, &report.rgi_attacker) {
        let mut out = String::from("t,rgi_defender,rgi_attacker\n");
        for (d, a) in defender.series.samples.iter().zip(&attacker.series.samples) {
            out.push_str(&format!(
                "{},{},{}\n",
                d.anchor,
                d.value.map(|v| v.to_string()).unwrap_or_default(),
                a.value.map(|v| v.to_string()).unwrap_or_default()
            ));
        }
        files.push(("plot_rgi.csv".to_string(), out));
    }

    if report.lbt_defender.is_some() || report.lbt_attacker.is_some() {
        let horizon = normalized.horizon();
        let span = horizon.end() - horizon.start();
        for (name, backward) in
            [("plot_lbt_defender.csv", true), ("plot_lbt_attacker.csv", false)]
        {
            let mut out = String::from("lambda,min_effectiveness,mean_effectiveness,present_entries,epsilon\n");
            for lag in 0..=span {
                let entries: Vec<f64> = if backward {
                    (horizon.start() + lag..=horizon.end())
                        .filter_map(|t| normalized.get(t, t - lag))
                        .collect()
                } else {
                    (horizon.start()..=horizon.end() - lag)
                        .filter_map(|t| normalized.get(t, t + lag))
                        .collect()
                };
                let (min_cell, mean_cell) = if entries.is_empty() {
                    (String::new(), String::new())
                } else {
                    let min = entries.iter().copied().fold(f64::INFINITY, f64::min);
                    let mean = entries.iter().sum::<f64>() / entries.len() as f64;
                    (min.to_string(), mean.to_string())
                };
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    lag,
                    min_cell,
                    mean_cell,
                    entries.len(),
                    report.params.epsilon
                ));
            }
            files.push((name.to_string(), out));
        }
    }

    if report.ee_defender.is_some() {
        let references = &report.attack_timeline.instants;
        let mut out = String::from("t");
        for reference in references {
            out.push_str(&format!(",ref_{reference}"));
        }
        out.push('\n');
        for t in normalized.horizon().iter() {
            out.push_str(&t.to_string());
            for &reference in references {
                match normalized.get(t, reference) {
                    Some(v) => out.push_str(&format!(",{v}")),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        files.push(("plot_ee_defender.csv".to_string(), out));
    }
    if report.ee_attacker.is_some() {
        let references = &report.defense_timeline.instants;
        let mut out = String::from("t_prime");
        for reference in references {
            out.push_str(&format!(",ref_{reference}"));
        }
        out.push('\n');
        for t_prime in normalized.horizon().iter() {
            out.push_str(&t_prime.to_string());
            for &reference in references {
                match normalized.get(reference, t_prime) {
                    Some(v) => out.push_str(&format!(",{v}")),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        files.push(("plot_ee_attacker.csv".to_string(), out));
    }

    files
}

/// Write every plot-data table into `dir`.
pub fn write_plot_data(
    dir: impl AsRef<Path>,
    report: &AgilityReport,
    matrix: &EffectivenessMatrix,
) -> Result<Vec<String>, ReportError> {
    let dir = dir.as_ref();
    let mut written = Vec::new();
    for (name, contents) in plot_data(report, matrix) {
        let path = dir.join(&name);
        std::fs::write(&path, contents).map_err(|source| ReportError::Io {
            path: path.display().to_string(),
            source,
        })?;
        written.push(name);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timeline::{Orientation, Time};

    fn toy() -> (EffectivenessMatrix, GenerationTimeline, GenerationTimeline) {
        let horizon = TimeHorizon::new(0, 6).unwrap();
        let mut matrix = EffectivenessMatrix::new(horizon, "tp", Orientation::LargerIsBetter);
        let rows: [[f64; 7]; 7] = [
            [0.5, 0.5, 0.5, 0.5, 0.6, 0.6, 0.3],
            [0.5, 0.5, 0.5, 0.5, 0.6, 0.6, 0.3],
            [0.5, 0.5, 0.5, 0.5, 0.6, 0.6, 0.3],
            [0.4, 0.4, 0.4, 0.4, 0.55, 0.55, 0.35],
            [0.7, 0.7, 0.7, 0.7, 0.65, 0.65, 0.45],
            [0.7, 0.7, 0.7, 0.7, 0.65, 0.65, 0.45],
            [0.7, 0.7, 0.7, 0.7, 0.65, 0.65, 0.45],
        ];
        for (t, row) in rows.iter().enumerate() {
            for (tp, &v) in row.iter().enumerate() {
                matrix.set(t as Time, tp as Time, v).unwrap();
            }
        }
        let defense = GenerationTimeline::new(Party::Defender, vec![0, 3, 4]);
        let attack = GenerationTimeline::new(Party::Attacker, vec![0, 4, 6]);
        (matrix, defense, attack)
    }

    #[test]
    fn computes_toy_report() {
        let (matrix, defense, attack) = toy();
        let report =
            compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        let gt = report.gt_defender.as_ref().unwrap();
        assert_eq!(gt.series.samples[0].value, Some(MetricValue::Finite(3)));
        assert_eq!(gt.series.samples[1].value, Some(MetricValue::Finite(1)));
        let egt = report.egt_defender.as_ref().unwrap();
        assert_eq!(egt.series.samples[0].value, Some(MetricValue::Finite(4)));
        let egt_a = report.egt_attacker.as_ref().unwrap();
        assert_eq!(egt_a.series.samples[0].value, Some(MetricValue::Finite(6)));
        assert!(report.agi_defender.is_some());
    }

    #[test]
    fn rejects_invalid_inputs_with_all_violations() {
        let (matrix, _, attack) = toy();
        let defense = GenerationTimeline::new(Party::Defender, vec![0, 9, 9]);
        let err =
            compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap_err();
        match err {
            ReportError::Invalid(report) => assert_eq!(report.violations.len(), 3),
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn metric_subset_leaves_other_fields_empty() {
        let (matrix, defense, attack) = toy();
        let params = RunParams {
            metrics: MetricSelection::parse("gt,rgi").unwrap(),
            ..RunParams::default()
        };
        let report = compute_report(&matrix, &defense, &attack, &params, "toy").unwrap();
        assert!(report.gt_defender.is_some());
        assert!(report.rgi_attacker.is_some());
        assert!(report.egt_defender.is_none());
        assert!(report.lbt_defender.is_none());
        assert!(report.agi_defender.is_none());
    }

    #[test]
    fn metric_selection_parsing() {
        assert!(MetricSelection::parse("all").unwrap().is_all());
        let subset = MetricSelection::parse("gt,egt").unwrap();
        assert!(subset.contains(MetricKind::Gt));
        assert!(!subset.contains(MetricKind::Tt));
        assert!(MetricSelection::parse("nope").is_err());
        assert_eq!(MetricSelection::parse("egt,gt").unwrap().to_string(), "gt,egt");
    }

    #[test]
    fn report_json_round_trip_is_exact() {
        let (matrix, defense, attack) = toy();
        let report =
            compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        let json = report.to_json();
        let back = AgilityReport::from_json(&json).unwrap();
        assert_eq!(report, back);
        assert_eq!(json, back.to_json());
    }

    #[test]
    fn report_is_deterministic() {
        let (matrix, defense, attack) = toy();
        let a = compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        let b = compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn diff_reports_agree_with_themselves() {
        let (matrix, defense, attack) = toy();
        let report =
            compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        assert!(report_diff(&report, &report, 0.0).is_empty());
    }

    #[test]
    fn diff_catches_a_changed_sample() {
        let (matrix, defense, attack) = toy();
        let a = compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        let mut b = a.clone();
        if let Some(gt) = &mut b.gt_defender {
            gt.series.samples[0].value = Some(MetricValue::Finite(99));
        }
        assert!(!report_diff(&a, &b, 1e-9).is_empty());
    }

    #[test]
    fn plot_files_cover_every_figure_shape() {
        let (matrix, defense, attack) = toy();
        let report =
            compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        let files = plot_data(&report, &matrix);
        let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
        for expected in [
            "plot_gt_egt_defender.csv",
            "plot_gt_egt_attacker.csv",
            "plot_tt_defender.csv",
            "plot_tt_attacker.csv",
            "plot_rgi.csv",
            "plot_lbt_defender.csv",
            "plot_lbt_attacker.csv",
            "plot_ee_defender.csv",
            "plot_ee_attacker.csv",
        ] {
            assert!(names.contains(&expected), "missing {expected}");
        }
        let gt_egt = &files.iter().find(|(n, _)| n == "plot_gt_egt_defender.csv").unwrap().1;
        let mut lines = gt_egt.lines();
        assert_eq!(lines.next(), Some("anchor,gt,egt"));
        assert_eq!(lines.next(), Some("0,3,4"));
        assert_eq!(lines.next(), Some("3,1,1"));
    }

    #[test]
    fn plus_infinity_leaves_plot_bars_absent() {
        let (mut matrix, defense, attack) = toy();
        // constant matrix: every EGT sample is +inf
        for t in 0..=6 {
            for tp in 0..=6 {
                matrix.set(t, tp, 0.5).unwrap();
            }
        }
        let report =
            compute_report(&matrix, &defense, &attack, &RunParams::default(), "toy").unwrap();
        let files = plot_data(&report, &matrix);
        let gt_egt = &files.iter().find(|(n, _)| n == "plot_gt_egt_defender.csv").unwrap().1;
        assert!(gt_egt.lines().nth(1).unwrap().ends_with(','));
        let json = report.to_json();
        assert!(json.contains("\"+inf\""));
    }
}
