//! File ingestion and export: the matrix interchange format and the
//! alert-log format that mirrors an IDS replay pipeline.
//!
//! Matrix file layout (comma-separated text):
//!
//! ```text
//! #defense_gens=0,3,4
//! #attack_gens=0,4,6
//! #orientation=larger
//! #metric=true-positive rate
//! t\t',0,1,2,3,4,5,6
//! 0,0.5,0.5,0.5,0.5,0.6,0.6,0.3
//! ...
//! ```
//!
//! The grid header row lists attack times, the first column lists defense
//! times, both spanning the horizon contiguously. Cells are decimal values
//! in [0, 1] or `NA` for missing. The exporter emits exactly this canonical
//! shape, so parse and export round-trip losslessly (generation labels are
//! not carried by this format).
//!
//! Alert log layout: a header line `defense_label,defense_time,attack_time,detected,total`
//! followed by one record per line. Each record counts alerts raised by the
//! named defense version when replaying the attack traffic of one time unit.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::timeline::{
    validate_inputs, EffectivenessMatrix, GenerationTimeline, Orientation, Party, Time,
    TimeHorizon, ValidationReport, Violation,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("input failed validation:\n{report}")]
    Invalid { report: ValidationReport },
    #[error("records {first} and {second} both cover cell ({t}, {t_prime})")]
    DuplicateCell { first: usize, second: usize, t: Time, t_prime: Time },
    #[error("record {record}: detected {detected} exceeds total {total}")]
    DetectedExceedsTotal { record: usize, detected: u64, total: u64 },
    #[error("record {record}: total_malicious must be positive")]
    ZeroTotal { record: usize },
    #[error("defense time {time} carries two labels: {first:?} and {second:?}")]
    ConflictingLabels { time: Time, first: String, second: String },
    #[error("alert log is empty")]
    NoRecords,
}

/// Everything a matrix file describes.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub matrix: EffectivenessMatrix,
    pub defense: GenerationTimeline,
    pub attack: GenerationTimeline,
}

const GRID_CORNER: &str = "t\\t'";

/// Parse and validate a matrix file. Malformed lines give a parse error with
/// the line number; invariant violations are collected into a validation
/// error listing all of them.
pub fn parse_matrix_file(path: impl AsRef<Path>) -> Result<MatrixFile, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_str(&text)
}

/// [`parse_matrix_file`] over an in-memory string.
pub fn parse_matrix_str(text: &str) -> Result<MatrixFile, IngestError> {
    let mut defense_gens: Option<Vec<Time>> = None;
    let mut attack_gens: Option<Vec<Time>> = None;
    let mut orientation: Option<Orientation> = None;
    let mut metric: Option<String> = None;
    let mut header: Option<(usize, Vec<Time>)> = None;
    let mut rows: Vec<(usize, Time, Vec<Option<f64>>)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(preamble) = line.strip_prefix('#') {
            let (key, value) = preamble.split_once('=').ok_or_else(|| IngestError::Parse {
                line: lineno,
                message: format!("preamble {line:?} is not key=value"),
            })?;
            match key {
                "defense_gens" => defense_gens = Some(parse_time_list(lineno, value)?),
                "attack_gens" => attack_gens = Some(parse_time_list(lineno, value)?),
                "orientation" => {
                    orientation = Some(match value {
                        "larger" => Orientation::LargerIsBetter,
                        "smaller" => Orientation::SmallerIsBetter,
                        other => {
                            return Err(IngestError::Parse {
                                line: lineno,
                                message: format!(
                                    "orientation must be larger or smaller, got {other:?}"
                                ),
                            })
                        }
                    })
                }
                "metric" => metric = Some(value.to_string()),
                other => {
                    return Err(IngestError::Parse {
                        line: lineno,
                        message: format!("unknown preamble key {other:?}"),
                    })
                }
            }
            continue;
        }
        let mut cells = line.split(',');
        let first = cells.next().unwrap_or_default();
        if header.is_none() {
            if first != GRID_CORNER {
                return Err(IngestError::Parse {
                    line: lineno,
                    message: format!("expected grid header starting with {GRID_CORNER:?}"),
                });
            }
            let times = cells
                .map(|cell| parse_time(lineno, cell))
                .collect::<Result<Vec<Time>, _>>()?;
            header = Some((lineno, times));
        } else {
            let t = parse_time(lineno, first)?;
            let values = cells
                .map(|cell| parse_cell(lineno, cell))
                .collect::<Result<Vec<Option<f64>>, _>>()?;
            rows.push((lineno, t, values));
        }
    }

    let missing = |what: &str| IngestError::Parse {
        line: text.lines().count() + 1,
        message: format!("missing {what}"),
    };
    let (header_line, attack_times) = header.ok_or_else(|| missing("grid header row"))?;
    let defense_gens = defense_gens.ok_or_else(|| missing("#defense_gens preamble"))?;
    let attack_gens = attack_gens.ok_or_else(|| missing("#attack_gens preamble"))?;
    let orientation = orientation.ok_or_else(|| missing("#orientation preamble"))?;
    let metric = metric.ok_or_else(|| missing("#metric preamble"))?;

    if attack_times.is_empty() || rows.is_empty() {
        return Err(IngestError::Invalid {
            report: ValidationReport { violations: vec![Violation::NoHorizon] },
        });
    }
    let start = attack_times[0];
    let end = attack_times[attack_times.len() - 1];
    for (i, &t) in attack_times.iter().enumerate() {
        if t != start + i as Time {
            return Err(IngestError::Parse {
                line: header_line,
                message: format!("grid times must be contiguous; expected {}", start + i as Time),
            });
        }
    }
    if rows.len() != attack_times.len() {
        return Err(IngestError::Parse {
            line: rows.last().map(|r| r.0).unwrap_or(header_line),
            message: format!(
                "grid must be square: {} columns but {} rows",
                attack_times.len(),
                rows.len()
            ),
        });
    }

    let horizon = TimeHorizon::new(start, end).expect("contiguous grid times");
    let mut matrix = EffectivenessMatrix::new(horizon, metric, orientation);
    for (i, (lineno, t, values)) in rows.iter().enumerate() {
        if *t != start + i as Time {
            return Err(IngestError::Parse {
                line: *lineno,
                message: format!("row times must be contiguous; expected {}", start + i as Time),
            });
        }
        if values.len() != attack_times.len() {
            return Err(IngestError::Parse {
                line: *lineno,
                message: format!(
                    "row has {} cells, grid header has {}",
                    values.len(),
                    attack_times.len()
                ),
            });
        }
        for (j, value) in values.iter().enumerate() {
            if let Some(v) = value {
                matrix.set(*t, attack_times[j], *v).map_err(|e| IngestError::Parse {
                    line: *lineno,
                    message: e.to_string(),
                })?;
            }
        }
    }

    let defense = GenerationTimeline::new(Party::Defender, defense_gens);
    let attack = GenerationTimeline::new(Party::Attacker, attack_gens);
    let report = validate_inputs(&matrix, &[&defense, &attack]);
    if !report.is_clean() {
        return Err(IngestError::Invalid { report });
    }
    Ok(MatrixFile { matrix, defense, attack })
}

fn parse_time(line: usize, cell: &str) -> Result<Time, IngestError> {
    cell.parse::<Time>().map_err(|_| IngestError::Parse {
        line,
        message: format!("expected integer time, got {cell:?}"),
    })
}

fn parse_time_list(line: usize, value: &str) -> Result<Vec<Time>, IngestError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|cell| parse_time(line, cell)).collect()
}

fn parse_cell(line: usize, cell: &str) -> Result<Option<f64>, IngestError> {
    if cell == "NA" {
        return Ok(None);
    }
    let value: f64 = cell.parse().map_err(|_| IngestError::Parse {
        line,
        message: format!("expected decimal value or NA, got {cell:?}"),
    })?;
    if !value.is_finite() {
        return Err(IngestError::Parse {
            line,
            message: format!("value {cell:?} is not finite"),
        });
    }
    Ok(Some(value))
}

/// Render a matrix and its timelines in the canonical file shape.
pub fn matrix_to_string(
    matrix: &EffectivenessMatrix,
    defense: &GenerationTimeline,
    attack: &GenerationTimeline,
) -> String {
    let horizon = matrix.horizon();
    let mut out = String::new();
    let _ = writeln!(out, "#defense_gens={}", join_times(&defense.instants));
    let _ = writeln!(out, "#attack_gens={}", join_times(&attack.instants));
    let orientation = match matrix.orientation() {
        Orientation::LargerIsBetter => "larger",
        Orientation::SmallerIsBetter => "smaller",
    };
    let _ = writeln!(out, "#orientation={orientation}");
    let _ = writeln!(out, "#metric={}", matrix.metric_name);
    out.push_str(GRID_CORNER);
    for t_prime in horizon.iter() {
        let _ = write!(out, ",{t_prime}");
    }
    out.push('\n');
    for t in horizon.iter() {
        let _ = write!(out, "{t}");
        for t_prime in horizon.iter() {
            match matrix.get(t, t_prime) {
                Some(v) => {
                    let _ = write!(out, ",{v}");
                }
                None => out.push_str(",NA"),
            }
        }
        out.push('\n');
    }
    out
}

/// Write the canonical matrix file.
pub fn write_matrix_file(
    path: impl AsRef<Path>,
    matrix: &EffectivenessMatrix,
    defense: &GenerationTimeline,
    attack: &GenerationTimeline,
) -> Result<(), IngestError> {
    let path = path.as_ref();
    std::fs::write(path, matrix_to_string(matrix, defense, attack)).map_err(|source| {
        IngestError::Io { path: path.display().to_string(), source }
    })
}

fn join_times(times: &[Time]) -> String {
    times
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// One replay measurement: how many of the `total_malicious` attack units
/// from `attack_time` the defense version active at `defense_time` detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlertLogRecord {
    pub defense_label: String,
    pub defense_time: Time,
    pub attack_time: Time,
    pub detected_count: u64,
    pub total_malicious: u64,
}

const ALERT_HEADER: &str = "defense_label,defense_time,attack_time,detected,total";

/// Parse an alert log file into records. Labels may not contain commas.
pub fn parse_alert_log(path: impl AsRef<Path>) -> Result<Vec<AlertLogRecord>, IngestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_alert_log_str(&text)
}

/// [`parse_alert_log`] over an in-memory string.
pub fn parse_alert_log_str(text: &str) -> Result<Vec<AlertLogRecord>, IngestError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == ALERT_HEADER => {}
        Some((_, header)) => {
            return Err(IngestError::Parse {
                line: 1,
                message: format!("expected header {ALERT_HEADER:?}, got {header:?}"),
            })
        }
        None => return Err(IngestError::NoRecords),
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(IngestError::Parse {
                line: lineno,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        let parse_count = |cell: &str, what: &str| -> Result<u64, IngestError> {
            cell.parse::<u64>().map_err(|_| IngestError::Parse {
                line: lineno,
                message: format!("expected non-negative integer {what}, got {cell:?}"),
            })
        };
        records.push(AlertLogRecord {
            defense_label: fields[0].to_string(),
            defense_time: parse_time(lineno, fields[1])?,
            attack_time: parse_time(lineno, fields[2])?,
            detected_count: parse_count(fields[3], "detected")?,
            total_malicious: parse_count(fields[4], "total")?,
        });
    }
    if records.is_empty() {
        return Err(IngestError::NoRecords);
    }
    Ok(records)
}

/// Build a true-positive-rate matrix from alert-log records.
///
/// Each record becomes the entry `detected / total` at its (rebased) cell;
/// uncovered cells stay missing. Times are re-based so the earliest observed
/// time maps to 0; the defense timeline starts a generation at the first
/// time each distinct label appears.
pub fn build_matrix_from_alert_log(
    records: &[AlertLogRecord],
    metric_name: &str,
) -> Result<(EffectivenessMatrix, GenerationTimeline), IngestError> {
    if records.is_empty() {
        return Err(IngestError::NoRecords);
    }
    let mut seen: std::collections::BTreeMap<(Time, Time), usize> = Default::default();
    for (i, record) in records.iter().enumerate() {
        if record.total_malicious == 0 {
            return Err(IngestError::ZeroTotal { record: i + 1 });
        }
        if record.detected_count > record.total_malicious {
            return Err(IngestError::DetectedExceedsTotal {
                record: i + 1,
                detected: record.detected_count,
                total: record.total_malicious,
            });
        }
        let cell = (record.defense_time, record.attack_time);
        if let Some(&first) = seen.get(&cell) {
            return Err(IngestError::DuplicateCell {
                first,
                second: i + 1,
                t: cell.0,
                t_prime: cell.1,
            });
        }
        seen.insert(cell, i + 1);
    }

    let min = records
        .iter()
        .flat_map(|r| [r.defense_time, r.attack_time])
        .min()
        .expect("records are non-empty");
    let max = records
        .iter()
        .flat_map(|r| [r.defense_time, r.attack_time])
        .max()
        .expect("records are non-empty");
    let horizon = TimeHorizon::new(0, max - min)
        .expect("max >= min")
        .with_offset(min);

    let mut matrix = EffectivenessMatrix::new(horizon, metric_name, Orientation::LargerIsBetter);
    let mut labels_by_time: std::collections::BTreeMap<Time, &str> = Default::default();
    for record in records {
        let value = record.detected_count as f64 / record.total_malicious as f64;
        matrix
            .set(record.defense_time - min, record.attack_time - min, value)
            .expect("cell inside the derived horizon");
        match labels_by_time.get(&record.defense_time) {
            Some(&existing) if existing != record.defense_label => {
                return Err(IngestError::ConflictingLabels {
                    time: record.defense_time,
                    first: existing.to_string(),
                    second: record.defense_label.clone(),
                });
            }
            _ => {
                labels_by_time.insert(record.defense_time, &record.defense_label);
            }
        }
    }

    let mut instants = Vec::new();
    let mut labels = Vec::new();
    let mut previous: Option<&str> = None;
    for (&time, &label) in &labels_by_time {
        if previous != Some(label) {
            instants.push(time - min);
            labels.push(Some(label.to_string()));
        }
        previous = Some(label);
    }
    let defense = GenerationTimeline::new(Party::Defender, instants).with_labels(labels);
    Ok((matrix, defense))
}
