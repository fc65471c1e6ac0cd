//! Report rows, verdicts and CSV emission.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

use super::config::ExperimentKind;

/// One CSV row. The column set and order are fixed.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub symbol: String,
    pub n: u32,
    pub eps: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub norm_data: Option<f64>,
    pub norm_eps_data: Option<f64>,
    #[serde(rename = "A_n")]
    pub a_n: Option<f64>,
    #[serde(rename = "B_n")]
    pub b_n: Option<f64>,
    #[serde(rename = "I_n")]
    pub i_n: Option<f64>,
    #[serde(rename = "FiniteWindow_n")]
    pub finite_window: Option<f64>,
    #[serde(rename = "J_n")]
    pub j_n: Option<f64>,
    pub backend: String,
    pub guard_margin: Option<f64>,
    pub runtime_ms: Option<u64>,
}

pub const CSV_COLUMNS: [&str; 16] = [
    "experiment",
    "symbol",
    "n",
    "eps",
    "T",
    "R",
    "norm_data",
    "norm_eps_data",
    "A_n",
    "B_n",
    "I_n",
    "FiniteWindow_n",
    "J_n",
    "backend",
    "guard_margin",
    "runtime_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Confirmed,
    NoDivergence,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Confirmed => "SHARPNESS CONFIRMED",
            Verdict::NoDivergence => "NO-DIVERGENCE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// A named numerical check attached to a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub n: u32,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub kind: ExperimentKind,
    pub rows: Vec<Row>,
    pub verdict: Option<Verdict>,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    /// Least-squares slope of `log(value)` against `log(n^(2 eps) / (ln n)^4)`.
    pub log_slope: Option<f64>,
}

impl Report {
    pub fn new(kind: ExperimentKind) -> Self {
        Self { kind, rows: Vec::new(), verdict: None, notes: Vec::new(), checks: Vec::new(), log_slope: None }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        write_rows(Vec::new(), &self.rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_bytes()?)?;
        Ok(())
    }

    /// Human-readable summary for stdout.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for note in &self.notes {
            s.push_str(note);
            s.push('\n');
        }
        for c in &self.checks {
            s.push_str(&format!(
                "check {} (n={}): {:.6e} vs {:.6e} {}\n",
                c.name,
                c.n,
                c.value,
                c.limit,
                if c.pass { "ok" } else { "FAILED" }
            ));
        }
        if let Some(slope) = self.log_slope {
            s.push_str(&format!("log-slope vs n^(2eps)/(ln n)^4: {slope:.4}\n"));
        }
        if let Some(v) = self.verdict {
            s.push_str(&format!("verdict: {v}\n"));
        }
        s
    }
}

fn write_rows<W: std::io::Write>(w: W, rows: &[Row]) -> Result<W> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    wtr.write_record(CSV_COLUMNS)?;
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(wtr.into_inner().map_err(|e| e.into_error())?)
}

/// Companion gnuplot script plotting the sequences of a sharpness CSV.
pub fn plot_script(csv_path: &Path, kind: ExperimentKind) -> Option<(PathBuf, String)> {
    let (a, b, la, lb) = match kind {
        ExperimentKind::Thm1 => (9, 10, "A_n", "B_n"),
        ExperimentKind::Thm2 => (11, 13, "I_n", "J_n"),
        _ => return None,
    };
    let name = csv_path.file_name()?.to_string_lossy().into_owned();
    let script = format!(
        "set datafile separator ','\n\
         set key top left\n\
         set logscale x 2\n\
         set xlabel 'n'\n\
         set terminal pngcairo size 900,600\n\
         set output '{stem}.png'\n\
         plot '{name}' skip 1 using 3:{a} with linespoints title '{la}', \\\n     \
         '{name}' skip 1 using 3:{b} with linespoints title '{lb}'\n",
        stem = csv_path.file_stem()?.to_string_lossy(),
    );
    Some((csv_path.with_extension("gp"), script))
}

/// `v` strictly increasing, each step by more than `tol` relative.
pub fn strictly_increasing(v: &[f64], tol: f64) -> bool {
    v.windows(2).all(|w| w[1] > w[0] * (1.0 + tol))
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len() % 2 == 1 {
        s[m]
    } else {
        0.5 * (s[m - 1] + s[m])
    }
}

/// `max <= ratio * median` over finite entries.
pub fn bounded_by_median(v: &[f64], ratio: f64) -> bool {
    if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
        return false;
    }
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max <= ratio * median(v)
}

/// Growth across the last three entries.
pub fn growing_tail(v: &[f64], tol: f64) -> bool {
    v.len() >= 3 && strictly_increasing(&v[v.len() - 3..], tol)
}

/// Slope of `log v` against `log(n^(2 eps) / (ln n)^4)`.
pub fn log_slope(ns: &[u32], v: &[f64], eps: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(v)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&n, &y)| {
            let n = n as f64;
            (2.0 * eps * n.ln() - 4.0 * n.ln().ln(), y.ln())
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_frozen() {
        let mut r = Report::new(ExperimentKind::Thm1);
        r.rows.push(Row { experiment: "thm1".into(), n: 8, a_n: Some(1.5), ..Row::default() });
        let text = String::from_utf8(r.to_csv_bytes().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CSV_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "thm1,,8,0.0,0.0,0.0,,,1.5,,,,,,,");
        // header only for an empty report
        let empty = String::from_utf8(Report::new(ExperimentKind::Thm2).to_csv_bytes().unwrap()).unwrap();
        assert_eq!(empty.lines().count(), 1);
    }

    #[test]
    fn sequence_helpers() {
        assert!(strictly_increasing(&[1.0, 2.0, 3.0], 1e-3));
        assert!(!strictly_increasing(&[1.0, 1.0005, 3.0], 1e-3));
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert!(bounded_by_median(&[1.0, 1.0, 4.9], 5.0));
        assert!(!bounded_by_median(&[1.0, 1.0, 5.1], 5.0));
        assert!(!bounded_by_median(&[1.0, f64::NAN], 5.0));
        assert!(growing_tail(&[5.0, 1.0, 2.0, 3.0], 1e-3));
        assert!(!growing_tail(&[1.0, 2.0, 3.0, 2.0], 1e-3));
    }

    #[test]
    fn log_slope_recovers_power() {
        let ns = [8u32, 16, 32, 64, 128];
        let v: Vec<f64> = ns
            .iter()
            .map(|&n| {
                let n = n as f64;
                3.0 * (n.powf(0.5) / n.ln().powi(4)).powf(1.7)
            })
            .collect();
        assert!((log_slope(&ns, &v, 0.25).unwrap() - 1.7).abs() < 1e-10);
    }
}
