//! Text formats: load CSV, holiday lists, SVR models, selection reports and matrix dumps.
//!
//! Every float is written with Rust's shortest round-trip `Display`, so reading a file
//! back yields bit-identical values.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;

use mtlf_core::data::{DailyLoad, DailySeries, FeatureMatrix, NormalizationState};
use mtlf_core::mrmr::SelectionResult;
use mtlf_core::svr::{SvrHyperparameters, SvrModel};
use mtlf_core::NaiveDate;

use crate::error::CliError;

pub const SERIES_HEADER: &str = "date,peak_load";
pub const MODEL_MAGIC: &str = "mtlf-svr-model";
pub const MODEL_VERSION: &str = "v1";

/// A malformed input, with the 1-based line it was found on when there is one.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn at(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line: Some(line),
        message: message.into(),
    }
}

fn parse_date(s: &str, line: usize) -> Result<NaiveDate, ParseError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| at(line, format!("bad date {s:?}: {e}")))
}

/// Non-empty lines with their 1-based numbers; a UTF-8 BOM and CR line endings are dropped.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.strip_prefix('\u{feff}')
        .unwrap_or(text)
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim_end_matches('\r').trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses a `date,peak_load` CSV. Rows may come in any order.
pub fn parse_series_csv(text: &str) -> Result<Vec<DailyLoad>, ParseError> {
    let mut it = lines(text);
    match it.next() {
        Some((_, h)) if h == SERIES_HEADER => {}
        Some((n, h)) => return Err(at(n, format!("expected header {SERIES_HEADER:?}, found {h:?}"))),
        None => {
            return Err(ParseError {
                line: None,
                message: "file is empty".into(),
            })
        }
    }
    let mut seen: HashMap<NaiveDate, usize> = HashMap::new();
    let mut out = Vec::new();
    for (n, l) in it {
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(at(n, format!("expected 2 fields, found {}", fields.len())));
        }
        let date = parse_date(fields[0], n)?;
        let peak_load: f64 = fields[1]
            .parse()
            .map_err(|_| at(n, format!("bad load {:?}", fields[1])))?;
        if !(peak_load > 0.0) || !peak_load.is_finite() {
            return Err(at(n, format!("load {peak_load} on {date} is not a positive number")));
        }
        if let Some(first) = seen.insert(date, n) {
            return Err(at(n, format!("duplicate date {date} (first seen on line {first})")));
        }
        out.push(DailyLoad { date, peak_load });
    }
    Ok(out)
}

/// One ISO date per line; `#` starts a comment.
pub fn parse_holidays(text: &str) -> Result<BTreeSet<NaiveDate>, ParseError> {
    let mut out = BTreeSet::new();
    for (n, l) in lines(text) {
        let body = l.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            out.insert(parse_date(body, n)?);
        }
    }
    Ok(out)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads and validates a series. Gaps and holidays outside the covered range are logged,
/// not rejected.
pub fn load_series(loads: &Path, holidays: Option<&Path>) -> Result<DailySeries, CliError> {
    let records = parse_series_csv(&read_text(loads)?).map_err(|source| CliError::Parse {
        path: loads.to_path_buf(),
        source,
    })?;
    let holiday_set = match holidays {
        Some(p) => parse_holidays(&read_text(p)?).map_err(|source| CliError::Parse {
            path: p.to_path_buf(),
            source,
        })?,
        None => BTreeSet::new(),
    };
    let series =
        DailySeries::new(records, holiday_set).map_err(|e| CliError::Data(format!("{}: {e}", loads.display())))?;
    let gaps = series.gaps();
    if !gaps.is_empty() {
        log::warn!("{} missing dates, first {}", gaps.len(), gaps[0]);
    }
    for d in series.holidays_out_of_range() {
        log::warn!("holiday {d} lies outside {}..={}", series.first_date(), series.last_date());
    }
    Ok(series)
}

pub fn write_series(series: &DailySeries) -> String {
    let mut s = String::with_capacity(24 * (series.len() + 1));
    s.push_str(SERIES_HEADER);
    s.push('\n');
    for r in series.records() {
        let _ = writeln!(s, "{},{}", r.date, r.peak_load);
    }
    s
}

pub fn write_holidays(holidays: &BTreeSet<NaiveDate>) -> String {
    let mut s = String::from("# one date per line\n");
    for d in holidays {
        let _ = writeln!(s, "{d}");
    }
    s
}

fn join(values: &[f64], sep: char) -> String {
    let mut s = String::new();
    for (k, v) in values.iter().enumerate() {
        if k > 0 {
            s.push(sep);
        }
        let _ = write!(s, "{v}");
    }
    s
}

/// Header line, one `β x_1 … x_d` line per support vector, then `bias b`.
pub fn write_model(model: &SvrModel) -> String {
    let h = model.hyperparameters();
    let mut s = format!(
        "{MODEL_MAGIC} {MODEL_VERSION} dimension={} C={} epsilon={} gamma={} support_vectors={}",
        model.dimension(),
        h.cost_c,
        h.epsilon,
        h.gamma,
        model.support_inputs().len()
    );
    match model.normalization() {
        None => s.push_str(" normalization=none"),
        Some(n) => {
            let (tmin, tmax) = n.target_range();
            let _ = write!(
                s,
                " normalization=minmax lag_min={} lag_max={} target_min={tmin} target_max={tmax}",
                join(n.lag_min(), ';'),
                join(n.lag_max(), ';')
            );
        }
    }
    s.push('\n');
    for (sv, beta) in model.support_inputs().iter().zip(model.dual_coefficients()) {
        let _ = writeln!(s, "{beta} {}", join(sv, ' '));
    }
    let _ = writeln!(s, "bias {}", model.bias());
    s
}

fn float(s: &str, line: usize, what: &str) -> Result<f64, ParseError> {
    s.parse().map_err(|_| at(line, format!("bad {what} {s:?}")))
}

fn float_list(s: &str, line: usize, what: &str) -> Result<Vec<f64>, ParseError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(';').map(|v| float(v, line, what)).collect()
}

pub fn read_model(text: &str) -> Result<SvrModel, ParseError> {
    let mut it = lines(text);
    let (hn, header) = it.next().ok_or(ParseError {
        line: None,
        message: "file is empty".into(),
    })?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(MODEL_MAGIC) {
        return Err(at(hn, format!("not a model file (expected {MODEL_MAGIC:?})")));
    }
    if tokens.next() != Some(MODEL_VERSION) {
        return Err(at(hn, format!("unsupported version, expected {MODEL_VERSION}")));
    }
    let mut fields: HashMap<&str, &str> = HashMap::new();
    for t in tokens {
        let (k, v) = t.split_once('=').ok_or_else(|| at(hn, format!("bad header token {t:?}")))?;
        fields.insert(k, v);
    }
    let get = |k: &str| fields.get(k).copied().ok_or_else(|| at(hn, format!("header lacks {k}")));
    let dimension: usize = get("dimension")?
        .parse()
        .map_err(|_| at(hn, "bad dimension"))?;
    let count: usize = get("support_vectors")?
        .parse()
        .map_err(|_| at(hn, "bad support_vectors"))?;
    let hyper = SvrHyperparameters {
        cost_c: float(get("C")?, hn, "C")?,
        epsilon: float(get("epsilon")?, hn, "epsilon")?,
        gamma: float(get("gamma")?, hn, "gamma")?,
    };
    let normalization = match get("normalization")? {
        "none" => None,
        "minmax" => Some(
            NormalizationState::new(
                float_list(get("lag_min")?, hn, "lag_min")?,
                float_list(get("lag_max")?, hn, "lag_max")?,
                float(get("target_min")?, hn, "target_min")?,
                float(get("target_max")?, hn, "target_max")?,
            )
            .map_err(|e| at(hn, e.to_string()))?,
        ),
        other => return Err(at(hn, format!("unknown normalization {other:?}"))),
    };

    let mut svs = Vec::with_capacity(count);
    let mut betas = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, l) = it
            .next()
            .ok_or_else(|| at(hn, format!("expected {count} support vector lines")))?;
        let values: Vec<f64> = l
            .split_whitespace()
            .map(|v| float(v, n, "value"))
            .collect::<Result<_, _>>()?;
        if values.len() != dimension + 1 {
            return Err(at(n, format!("expected {} values, found {}", dimension + 1, values.len())));
        }
        betas.push(values[0]);
        svs.push(values[1..].to_vec());
    }
    let (bn, bias_line) = it.next().ok_or_else(|| at(hn, "missing bias line"))?;
    let bias = match bias_line.split_once(' ') {
        Some(("bias", v)) => float(v.trim(), bn, "bias")?,
        _ => return Err(at(bn, "expected `bias <value>`")),
    };
    if let Some((n, _)) = it.next() {
        return Err(at(n, "trailing content after bias"));
    }
    SvrModel::from_parts(dimension, svs, betas, bias, hyper, normalization).map_err(|e| at(hn, e.to_string()))
}

/// Ranked picks (`rank,feature`) followed by the three traces after each pick.
pub fn write_selection_report(result: &SelectionResult, names: &[String], candidates: usize, bins: usize) -> String {
    let mut s = format!(
        "# mrmr selection: k={} of {candidates} candidates, {bins} bins\nrank,feature,relevance,redundancy,score\n",
        result.selected_indices.len()
    );
    for (r, &i) in result.selected_indices.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r + 1,
            names[i],
            result.relevance_trace[r],
            result.redundancy_trace[r],
            result.score_trace[r]
        );
    }
    s
}

/// Column names and a final `target` column; one line per row.
pub fn write_matrix_csv(matrix: &FeatureMatrix) -> String {
    let mut s = String::from("date,");
    s.push_str(&matrix.column_names().join(","));
    s.push_str(",target\n");
    for ((row, y), d) in matrix.rows().iter().zip(matrix.targets()).zip(matrix.row_dates()) {
        let _ = writeln!(s, "{d},{},{y}", join(row, ','));
    }
    s
}
