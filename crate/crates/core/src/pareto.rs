//! Dual-objective (test accuracy up, memory down) analysis of measured
//! models: frontier lines, quadrant labels and the non-dominated set.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::{format_decimal, Scalar};

/// Column order of the measurement CSV.
pub const CSV_HEADER: [&str; 8] = [
    "model",
    "experiment",
    "train_acc",
    "test_acc",
    "avg_mem_mb",
    "avg_epoch_time_s",
    "avg_inf_time_ms",
    "params",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParetoError {
    #[error("CSV parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: u64,
        column: String,
        message: String,
    },
    #[error("row {row}: {field} = {value} is out of range ({expected})")]
    Range {
        row: u64,
        field: &'static str,
        value: String,
        expected: &'static str,
    },
    #[error("at least one measurement is required")]
    EmptyInput,
    #[error("invalid quadrant config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelMeasurement<T> {
    pub model: String,
    pub experiment: String,
    /// Percent.
    pub train_acc: T,
    /// Percent.
    pub test_acc: T,
    pub avg_mem_mb: T,
    pub avg_epoch_time_s: Option<T>,
    pub avg_inf_time_ms: Option<T>,
    pub params: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MemoryFrontier<T> {
    /// Halfway between the smallest and largest memory value.
    Midpoint,
    Explicit(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrantConfig<T> {
    pub accuracy_frontier: T,
    pub memory_frontier: MemoryFrontier<T>,
}

impl<T: Scalar> Default for QuadrantConfig<T> {
    fn default() -> Self {
        Self {
            accuracy_frontier: T::from(70.0).expect("70 is representable"),
            memory_frontier: MemoryFrontier::Midpoint,
        }
    }
}

impl<T: Scalar> QuadrantConfig<T> {
    pub fn new(accuracy_frontier: T, memory_frontier: MemoryFrontier<T>) -> Result<Self, ParetoError> {
        let hundred = T::from(100.0).expect("100 is representable");
        if !(accuracy_frontier > T::zero() && accuracy_frontier < hundred) {
            return Err(ParetoError::InvalidConfig(format!(
                "accuracy frontier {accuracy_frontier} must lie in (0, 100)"
            )));
        }
        if let MemoryFrontier::Explicit(m) = memory_frontier {
            if !m.is_finite() {
                return Err(ParetoError::InvalidConfig(format!("memory frontier {m} is not finite")));
            }
        }
        Ok(Self {
            accuracy_frontier,
            memory_frontier,
        })
    }

    /// The memory frontier for `records` under this config.
    pub fn memory_frontier_for(&self, records: &[ModelMeasurement<T>]) -> Result<T, ParetoError> {
        match self.memory_frontier {
            MemoryFrontier::Midpoint => memory_frontier(records),
            MemoryFrontier::Explicit(m) => Ok(m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QuadrantLabel {
    HighAccLowMem,
    HighAccHighMem,
    LowAccLowMem,
    LowAccHighMem,
}

impl fmt::Display for QuadrantLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuadrantLabel::HighAccLowMem => "HighAccLowMem",
            QuadrantLabel::HighAccHighMem => "HighAccHighMem",
            QuadrantLabel::LowAccLowMem => "LowAccLowMem",
            QuadrantLabel::LowAccHighMem => "LowAccHighMem",
        })
    }
}

/// Parses measurement CSV. Optional columns may be empty.
pub fn load_measurements<T: Scalar>(text: &str) -> Result<Vec<ModelMeasurement<T>>, ParetoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| ParetoError::Parse {
        row: 1,
        column: String::new(),
        message: e.to_string(),
    })?;
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(ParetoError::Parse {
            row: 1,
            column: String::new(),
            message: format!("expected header '{}'", CSV_HEADER.join(",")),
        });
    }

    let mut records = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| ParetoError::Parse {
            row: e.position().map_or(0, |p| p.line()),
            column: String::new(),
            message: e.to_string(),
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).unwrap_or("");
        let parse_err = |i: usize, message: String| ParetoError::Parse {
            row,
            column: CSV_HEADER[i].to_string(),
            message,
        };
        let number = |i: usize| -> Result<Option<T>, ParetoError> {
            let s = field(i);
            if s.is_empty() {
                return Ok(None);
            }
            let v: T = s
                .parse()
                .map_err(|_| parse_err(i, format!("'{s}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_err(i, format!("'{s}' is not finite")));
            }
            Ok(Some(v))
        };
        let required = |i: usize| number(i)?.ok_or_else(|| parse_err(i, "value is required".into()));

        let model = field(0).to_string();
        if model.is_empty() {
            return Err(parse_err(0, "model name is required".into()));
        }
        let train_acc = required(2)?;
        let test_acc = required(3)?;
        let avg_mem_mb = required(4)?;
        let hundred = T::from(100.0).expect("100 is representable");
        for (name, v) in [("train_acc", train_acc), ("test_acc", test_acc)] {
            if v < T::zero() || v > hundred {
                return Err(ParetoError::Range {
                    row,
                    field: name,
                    value: v.to_string(),
                    expected: "0 <= accuracy <= 100",
                });
            }
        }
        if avg_mem_mb <= T::zero() {
            return Err(ParetoError::Range {
                row,
                field: "avg_mem_mb",
                value: avg_mem_mb.to_string(),
                expected: "memory > 0",
            });
        }
        let params = match field(7) {
            "" => None,
            s => Some(
                s.parse::<u64>()
                    .map_err(|_| parse_err(7, format!("'{s}' is not a non-negative integer")))?,
            ),
        };
        records.push(ModelMeasurement {
            model,
            experiment: field(1).to_string(),
            train_acc,
            test_acc,
            avg_mem_mb,
            avg_epoch_time_s: number(5)?,
            avg_inf_time_ms: number(6)?,
            params,
        });
    }
    Ok(records)
}

/// Midpoint between the smallest and largest average memory.
pub fn memory_frontier<T: Scalar>(records: &[ModelMeasurement<T>]) -> Result<T, ParetoError> {
    let mut it = records.iter().map(|r| r.avg_mem_mb);
    let first = it.next().ok_or(ParetoError::EmptyInput)?;
    let (lo, hi) = it.fold((first, first), |(lo, hi), m| (lo.min(m), hi.max(m)));
    Ok((lo + hi) / T::from(2.0).expect("2 is representable"))
}

/// High accuracy is `test_acc >= accuracy_frontier`; low memory is
/// `avg_mem_mb <= frontier_mem`. Both boundaries are inclusive.
pub fn classify_quadrant<T: Scalar>(
    record: &ModelMeasurement<T>,
    config: &QuadrantConfig<T>,
    frontier_mem: T,
) -> QuadrantLabel {
    let high_acc = record.test_acc >= config.accuracy_frontier;
    let low_mem = record.avg_mem_mb <= frontier_mem;
    match (high_acc, low_mem) {
        (true, true) => QuadrantLabel::HighAccLowMem,
        (true, false) => QuadrantLabel::HighAccHighMem,
        (false, true) => QuadrantLabel::LowAccLowMem,
        (false, false) => QuadrantLabel::LowAccHighMem,
    }
}

/// `a` is at least as accurate and at most as memory-hungry as `b`, and
/// strictly better in one of the two.
pub fn dominates<T: Scalar>(a: &ModelMeasurement<T>, b: &ModelMeasurement<T>) -> bool {
    a.test_acc >= b.test_acc
        && a.avg_mem_mb <= b.avg_mem_mb
        && (a.test_acc > b.test_acc || a.avg_mem_mb < b.avg_mem_mb)
}

fn front_order<T: Scalar>(a: &ModelMeasurement<T>, b: &ModelMeasurement<T>) -> Ordering {
    a.avg_mem_mb
        .partial_cmp(&b.avg_mem_mb)
        .unwrap_or(Ordering::Equal)
        .then(b.test_acc.partial_cmp(&a.test_acc).unwrap_or(Ordering::Equal))
        .then_with(|| a.model.cmp(&b.model))
        .then_with(|| a.experiment.cmp(&b.experiment))
}

/// Indices of the non-dominated records, ordered by ascending memory (ties
/// by descending accuracy, then name).
///
/// Sweeps records by memory, keeping the best accuracy seen at strictly
/// lower memory; O(n log n).
pub fn pareto_front_indices<T: Scalar>(records: &[ModelMeasurement<T>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..records.len()).collect();
    order.sort_by(|&a, &b| front_order(&records[a], &records[b]));

    let mut front = Vec::new();
    let mut best_below: Option<T> = None;
    let mut i = 0;
    while i < order.len() {
        let mem = records[order[i]].avg_mem_mb;
        let mut j = i;
        while j < order.len() && records[order[j]].avg_mem_mb == mem {
            j += 1;
        }
        // Within an equal-memory group the first entry has the top accuracy.
        let top = records[order[i]].test_acc;
        if best_below.is_none_or(|b| top > b) {
            front.extend(
                order[i..j]
                    .iter()
                    .copied()
                    .take_while(|&k| records[k].test_acc == top),
            );
        }
        best_below = Some(best_below.map_or(top, |b| b.max(top)));
        i = j;
    }
    front
}

pub fn pareto_front<T: Scalar>(records: &[ModelMeasurement<T>]) -> Vec<ModelMeasurement<T>> {
    pareto_front_indices(records)
        .into_iter()
        .map(|i| records[i].clone())
        .collect()
}

/// Plot-ready CSV: a comment line carrying both frontiers, then one row per
/// record in input order.
pub fn export_plot_data<T: Scalar>(
    records: &[ModelMeasurement<T>],
    config: &QuadrantConfig<T>,
) -> Result<String, ParetoError> {
    let frontier = match config.memory_frontier_for(records) {
        Ok(m) => Some(m),
        Err(ParetoError::EmptyInput) => None,
        Err(e) => return Err(e),
    };
    let mut out = format!(
        "# accuracy_frontier={},memory_frontier={}\n",
        format_decimal(config.accuracy_frontier),
        frontier.map(format_decimal).unwrap_or_default()
    );
    let on_front = pareto_front_indices(records);
    let mut writer = csv::Writer::from_writer(Vec::new());
    let write_err = |e: csv::Error| ParetoError::Parse {
        row: 0,
        column: String::new(),
        message: e.to_string(),
    };
    writer
        .write_record(["model", "test_acc", "avg_mem_mb", "quadrant", "on_front"])
        .map_err(write_err)?;
    if let Some(frontier) = frontier {
        for (i, r) in records.iter().enumerate() {
            writer
                .write_record([
                    r.model.clone(),
                    format_decimal(r.test_acc),
                    format_decimal(r.avg_mem_mb),
                    classify_quadrant(r, config, frontier).to_string(),
                    on_front.contains(&i).to_string(),
                ])
                .map_err(write_err)?;
        }
    }
    let body = writer.into_inner().expect("Vec writer cannot fail");
    out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    Ok(out)
}
