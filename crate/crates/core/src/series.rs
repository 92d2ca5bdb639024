//! Sampled random-variable metrics: values with sentinel cases, anchored
//! sample series, and their summary statistics.

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::timeline::{Party, Time};

/// A timeliness metric value: a finite non-negative duration, or one of the
/// two sentinel cases.
///
/// `PlusInfinity` marks "no effective/triggering event exists"; it is
/// produced by EGT and TT. `MinusInfinity` marks "lags at least the whole
/// horizon"; it is produced only by LBT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricValue {
    Finite(u64),
    PlusInfinity,
    MinusInfinity,
}

impl MetricValue {
    pub fn finite(&self) -> Option<u64> {
        match self {
            MetricValue::Finite(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, MetricValue::Finite(_))
    }
}

impl std::fmt::Display for MetricValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricValue::Finite(v) => write!(f, "{v}"),
            MetricValue::PlusInfinity => write!(f, "+inf"),
            MetricValue::MinusInfinity => write!(f, "-inf"),
        }
    }
}

// Sentinels serialize as the strings "+inf"/"-inf", never as large numbers,
// so round-trips are bit-exact and downstream parsing is unambiguous.
impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            MetricValue::Finite(v) => serializer.serialize_u64(*v),
            MetricValue::PlusInfinity => serializer.serialize_str("+inf"),
            MetricValue::MinusInfinity => serializer.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for MetricValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MetricValueVisitor;

        impl<'de> Visitor<'de> for MetricValueVisitor {
            type Value = MetricValue;

            fn expecting(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str("a non-negative integer, \"+inf\", or \"-inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<MetricValue, E> {
                Ok(MetricValue::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<MetricValue, E> {
                u64::try_from(v)
                    .map(MetricValue::Finite)
                    .map_err(|_| E::custom(format!("negative duration {v}")))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<MetricValue, E> {
                match s {
                    "+inf" => Ok(MetricValue::PlusInfinity),
                    "-inf" => Ok(MetricValue::MinusInfinity),
                    other => Err(E::custom(format!("unknown sentinel {other:?}"))),
                }
            }
        }

        deserializer.deserialize_any(MetricValueVisitor)
    }
}

/// One sample of a metric, anchored at the time it refers to.
///
/// `value: None` marks an indeterminate sample: the matrix data required to
/// compute it was missing. Indeterminate samples are excluded from summary
/// statistics and counted separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample<V> {
    pub anchor: Time,
    pub value: Option<V>,
}

/// Ordered samples of one metric for one party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSeries<V> {
    pub metric: String,
    pub party: Party,
    /// Samples in strictly increasing anchor order.
    pub samples: Vec<Sample<V>>,
    /// Anchors of samples carried beyond the metric's defining index range
    /// (the base generation for EE); excluded from summary statistics.
    pub supplementary: Vec<Time>,
}

impl<V> SampleSeries<V> {
    pub fn new(metric: impl Into<String>, party: Party) -> Self {
        SampleSeries {
            metric: metric.into(),
            party,
            samples: Vec::new(),
            supplementary: Vec::new(),
        }
    }

    pub fn push(&mut self, anchor: Time, value: Option<V>) {
        self.samples.push(Sample { anchor, value });
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn is_supplementary(&self, anchor: Time) -> bool {
        self.supplementary.contains(&anchor)
    }
}

/// Summary over a series: mean of finite samples plus counts of every
/// non-finite case. Supplementary samples are not summarized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub finite_count: usize,
    pub mean: Option<f64>,
    pub plus_infinity_count: usize,
    pub minus_infinity_count: usize,
    pub indeterminate_count: usize,
}

impl SampleSeries<MetricValue> {
    pub fn summary(&self) -> SeriesSummary {
        let mut finite = Vec::new();
        let mut plus = 0;
        let mut minus = 0;
        let mut indeterminate = 0;
        for sample in &self.samples {
            if self.is_supplementary(sample.anchor) {
                continue;
            }
            match sample.value {
                Some(MetricValue::Finite(v)) => finite.push(v as f64),
                Some(MetricValue::PlusInfinity) => plus += 1,
                Some(MetricValue::MinusInfinity) => minus += 1,
                None => indeterminate += 1,
            }
        }
        SeriesSummary {
            finite_count: finite.len(),
            mean: mean(&finite),
            plus_infinity_count: plus,
            minus_infinity_count: minus,
            indeterminate_count: indeterminate,
        }
    }
}

impl SampleSeries<f64> {
    pub fn summary(&self) -> SeriesSummary {
        let mut finite = Vec::new();
        let mut indeterminate = 0;
        for sample in &self.samples {
            if self.is_supplementary(sample.anchor) {
                continue;
            }
            match sample.value {
                Some(v) => finite.push(v),
                None => indeterminate += 1,
            }
        }
        SeriesSummary {
            finite_count: finite.len(),
            mean: mean(&finite),
            plus_infinity_count: 0,
            minus_infinity_count: 0,
            indeterminate_count: indeterminate,
        }
    }

    /// Series with every determinate value negated; used to derive the
    /// attacker view of RGI.
    pub fn negated(&self, metric: impl Into<String>, party: Party) -> SampleSeries<f64> {
        SampleSeries {
            metric: metric.into(),
            party,
            samples: self
                .samples
                .iter()
                .map(|s| Sample { anchor: s.anchor, value: s.value.map(|v| -v) })
                .collect(),
            supplementary: self.supplementary.clone(),
        }
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Mean of per-anchor `numerator / denominator` ratios over anchors where
/// both samples are finite (the EGT-to-GT disparity measure).
pub fn paired_ratio_mean(
    numerator: &SampleSeries<MetricValue>,
    denominator: &SampleSeries<MetricValue>,
) -> Option<f64> {
    let mut ratios = Vec::new();
    for num in &numerator.samples {
        let den = denominator.samples.iter().find(|s| s.anchor == num.anchor);
        if let (Some(MetricValue::Finite(n)), Some(Some(MetricValue::Finite(d)))) =
            (num.value, den.map(|s| s.value))
        {
            if d > 0 {
                ratios.push(n as f64 / d as f64);
            }
        }
    }
    mean(&ratios)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentinels_render_as_strings() {
        assert_eq!(serde_json::to_string(&MetricValue::Finite(4)).unwrap(), "4");
        assert_eq!(
            serde_json::to_string(&MetricValue::PlusInfinity).unwrap(),
            "\"+inf\""
        );
        assert_eq!(
            serde_json::to_string(&MetricValue::MinusInfinity).unwrap(),
            "\"-inf\""
        );
    }

    #[test]
    fn sentinels_round_trip() {
        for value in [
            MetricValue::Finite(0),
            MetricValue::Finite(1293),
            MetricValue::PlusInfinity,
            MetricValue::MinusInfinity,
        ] {
            let json = serde_json::to_string(&value).unwrap();
            let back: MetricValue = serde_json::from_str(&json).unwrap();
            assert_eq!(value, back);
        }
    }

    #[test]
    fn summary_splits_finite_and_sentinels() {
        let mut series = SampleSeries::new("EGT", Party::Defender);
        series.push(0, Some(MetricValue::Finite(4)));
        series.push(3, Some(MetricValue::PlusInfinity));
        series.push(4, None);
        let summary = series.summary();
        assert_eq!(summary.finite_count, 1);
        assert_eq!(summary.mean, Some(4.0));
        assert_eq!(summary.plus_infinity_count, 1);
        assert_eq!(summary.indeterminate_count, 1);
    }

    #[test]
    fn supplementary_samples_are_not_summarized() {
        let mut series = SampleSeries::new("EE", Party::Defender);
        series.push(0, Some(1.0));
        series.push(4, Some(0.5));
        series.supplementary = vec![0];
        let summary = series.summary();
        assert_eq!(summary.finite_count, 1);
        assert_eq!(summary.mean, Some(0.5));
    }

    #[test]
    fn ratio_mean_pairs_by_anchor() {
        let mut gt = SampleSeries::new("GT", Party::Defender);
        gt.push(0, Some(MetricValue::Finite(3)));
        gt.push(3, Some(MetricValue::Finite(1)));
        let mut egt = SampleSeries::new("EGT", Party::Defender);
        egt.push(0, Some(MetricValue::Finite(4)));
        egt.push(3, Some(MetricValue::PlusInfinity));
        let ratio = paired_ratio_mean(&egt, &gt).unwrap();
        assert!((ratio - 4.0 / 3.0).abs() < 1e-12);
    }
}
