//! Run artifacts: the JSON report, per-day and fitness CSVs, the SVG chart and the
//! ablation table.

use std::fmt::Write as _;

use mtlf_core::forecast::ForecastReport;

/// Pretty JSON with keys in declaration order.
pub fn report_json(report: &ForecastReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report is always serializable");
    s.push('\n');
    s
}

/// `date,actual,predicted`; `actual` is empty when the day has no recorded load.
pub fn per_day_csv(report: &ForecastReport) -> String {
    let mut s = String::from("date,actual,predicted\n");
    for d in &report.per_day {
        let actual = d.actual.map(|a| a.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{actual},{}", d.date, d.predicted);
    }
    s
}

/// `iteration,best_fitness`, iterations counted from 1.
pub fn fitness_csv(report: &ForecastReport) -> String {
    let mut s = String::from("iteration,best_fitness\n");
    for (k, f) in report.fitness_history.iter().enumerate() {
        let _ = writeln!(s, "{},{f}", k + 1);
    }
    s
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

/// Actual load as a solid line and the forecast as a dashed line over the horizon.
pub fn chart_svg(report: &ForecastReport) -> String {
    let n = report.per_day.len();
    let values = report
        .per_day
        .iter()
        .flat_map(|d| d.actual.into_iter().chain(std::iter::once(d.predicted)));
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 1.0, lo + 1.0) };
    let pad = 0.05 * (hi - lo);
    let (lo, hi) = (lo - pad, hi + pad);
    let x = |k: usize| MARGIN + (WIDTH - 2.0 * MARGIN) * (k as f64) / ((n.max(2) - 1) as f64);
    let y = |v: f64| HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (v - lo) / (hi - lo);

    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    );
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        s,
        "<g stroke=\"#888\" stroke-width=\"1\"><line x1=\"{MARGIN}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\"/><line x1=\"{MARGIN}\" y1=\"{MARGIN}\" x2=\"{MARGIN}\" y2=\"{b}\"/></g>",
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for (v, label) in [(lo + pad, "min"), (hi - pad, "max")] {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{v:.1}</text><!-- {label} -->",
            MARGIN - 4.0,
            y(v) + 4.0
        );
    }
    if let (Some(first), Some(last)) = (report.per_day.first(), report.per_day.last()) {
        let _ = writeln!(
            s,
            "<text x=\"{MARGIN}\" y=\"{:.2}\" font-size=\"11\">{}</text><text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            HEIGHT - MARGIN + 16.0,
            first.date,
            WIDTH - MARGIN,
            HEIGHT - MARGIN + 16.0,
            last.date
        );
    }

    // actual line is split wherever a day has no recorded load
    let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for (k, d) in report.per_day.iter().enumerate() {
        match d.actual {
            Some(a) => segments.last_mut().expect("non-empty").push((x(k), y(a))),
            None if !segments.last().expect("non-empty").is_empty() => segments.push(Vec::new()),
            None => {}
        }
    }
    for seg in segments.iter().filter(|s| !s.is_empty()) {
        let _ = writeln!(
            s,
            "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"{}\"/>",
            points(seg)
        );
    }
    let predicted: Vec<(f64, f64)> = report
        .per_day
        .iter()
        .enumerate()
        .map(|(k, d)| (x(k), y(d.predicted)))
        .collect();
    let _ = writeln!(
        s,
        "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\" points=\"{}\"/>",
        points(&predicted)
    );
    let _ = writeln!(
        s,
        "<g font-size=\"12\"><line x1=\"{a}\" y1=\"20\" x2=\"{b}\" y2=\"20\" stroke=\"#1f77b4\" stroke-width=\"2\"/><text x=\"{t}\" y=\"24\">actual</text><line x1=\"{c}\" y1=\"20\" x2=\"{d}\" y2=\"20\" stroke=\"#d62728\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/><text x=\"{u}\" y=\"24\">predicted</text></g>",
        a = MARGIN,
        b = MARGIN + 30.0,
        t = MARGIN + 35.0,
        c = MARGIN + 100.0,
        d = MARGIN + 130.0,
        u = MARGIN + 135.0
    );
    s.push_str("</svg>\n");
    s
}

fn points(p: &[(f64, f64)]) -> String {
    p.iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// One ablation cell: a method label and its per-seed outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareCell {
    pub method: String,
    /// `Ok(mape)` per seed, or the failure message.
    pub runs: Vec<(u64, Result<f64, String>)>,
}

impl CompareCell {
    /// Median over successful seeds; `None` when all failed.
    pub fn median(&self) -> Option<f64> {
        let mut ok: Vec<f64> = self.runs.iter().filter_map(|(_, r)| r.as_ref().ok().copied()).collect();
        if ok.is_empty() {
            return None;
        }
        ok.sort_by(f64::total_cmp);
        let m = ok.len() / 2;
        Some(if ok.len() % 2 == 1 { ok[m] } else { 0.5 * (ok[m - 1] + ok[m]) })
    }
}

/// Fixed-width table: method, median MAPE, seed count, then per-seed MAPE.
pub fn compare_table(cells: &[CompareCell]) -> String {
    let mut s = format!("{:<10} {:>16} {:>6}  per-seed MAPE (%)\n", "method", "median MAPE (%)", "seeds");
    for c in cells {
        let median = match c.median() {
            Some(m) => format!("{m:.4}"),
            None => "FAILED".into(),
        };
        let per_seed: Vec<String> = c
            .runs
            .iter()
            .map(|(seed, r)| match r {
                Ok(v) => format!("{seed}:{v:.4}"),
                Err(_) => format!("{seed}:FAILED"),
            })
            .collect();
        let _ = writeln!(s, "{:<10} {:>16} {:>6}  {}", c.method, median, c.runs.len(), per_seed.join(" "));
    }
    let failures: Vec<String> = cells
        .iter()
        .flat_map(|c| {
            c.runs
                .iter()
                .filter_map(move |(seed, r)| r.as_ref().err().map(|e| format!("# {} seed {seed}: {e}", c.method)))
        })
        .collect();
    for f in failures {
        s.push_str(&f);
        s.push('\n');
    }
    s
}
