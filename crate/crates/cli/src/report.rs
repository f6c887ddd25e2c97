//! CSV, speedup and plan-table output.
//!
//! Floating-point columns are written with 17 significant digits so the
//! per-run file parses back to the exact values that were summarised.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use hyperjaya_core::stats::{speedup_report, SpeedupRow};
use hyperjaya_core::{DecompositionPlan, Objective, RunRecord};

use crate::error::{HarnessError, Result};
use crate::experiment::ExperimentReport;

pub const RUN_COLUMNS: [&str; 12] = [
    "function",
    "n",
    "m",
    "threads",
    "conf_h",
    "conf_v",
    "repeat",
    "seed",
    "best_fitness",
    "iterations",
    "evaluations",
    "wall_time_s",
];

pub const SUMMARY_COLUMNS: [&str; 14] = [
    "function",
    "n",
    "m",
    "threads",
    "conf_h",
    "conf_v",
    "runs",
    "mean_fitness",
    "stddev_fitness",
    "mean_time_s",
    "stddev_time_s",
    "mean_iterations",
    "success_rate",
    "success_threshold",
];

/// Columns that carry wall-clock measurements.
pub const TIME_COLUMNS: [&str; 3] = ["wall_time_s", "mean_time_s", "stddev_time_s"];

pub const NA: &str = "NA";

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(csv::Writer::from_writer(file))
}

/// Per-run file: one row per repeat, ordered by thread count then repeat.
pub fn write_runs(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let spec = &report.spec;
    let wrap = |e| HarnessError::csv(path, e);
    w.write_record(RUN_COLUMNS).map_err(wrap)?;
    for cell in &report.cells {
        let head = [
            spec.function.name().to_string(),
            spec.n.to_string(),
            spec.m.to_string(),
            cell.threads.to_string(),
            cell.conf_h.to_string(),
            cell.conf_v.to_string(),
        ];
        match &cell.outcome {
            Err(_) => {
                let row: Vec<String> = head
                    .iter()
                    .cloned()
                    .chain(std::iter::repeat_n(NA.to_string(), 6))
                    .collect();
                w.write_record(&row).map_err(wrap)?;
            }
            Ok(runs) => {
                for run in &runs.runs {
                    let r = &run.record;
                    let row: Vec<String> = head
                        .iter()
                        .cloned()
                        .chain([
                            run.repeat.to_string(),
                            r.seed.to_string(),
                            fmt_f64(r.best_fitness),
                            r.iterations.to_string(),
                            r.evaluations.to_string(),
                            fmt_f64(r.wall_time.as_secs_f64()),
                        ])
                        .collect();
                    w.write_record(&row).map_err(wrap)?;
                }
            }
        }
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn write_summary(report: &ExperimentReport, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let spec = &report.spec;
    let wrap = |e| HarnessError::csv(path, e);
    w.write_record(SUMMARY_COLUMNS).map_err(wrap)?;
    for cell in &report.cells {
        let mut row = vec![
            spec.function.name().to_string(),
            spec.n.to_string(),
            spec.m.to_string(),
            cell.threads.to_string(),
            cell.conf_h.to_string(),
            cell.conf_v.to_string(),
        ];
        match &cell.outcome {
            Err(_) => row.extend(std::iter::repeat_n(NA.to_string(), 7)),
            Ok(runs) => {
                let s = &runs.summary;
                row.extend([
                    s.runs.to_string(),
                    fmt_f64(s.mean_fitness),
                    fmt_f64(s.stddev_fitness),
                    fmt_f64(s.mean_time),
                    fmt_f64(s.stddev_time),
                    fmt_f64(s.mean_iterations),
                    fmt_f64(s.success_rate),
                ]);
            }
        }
        row.push(fmt_f64(spec.success_threshold()));
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// A row parsed back from a per-run file. Invalid cells have no record.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedRun {
    pub function: Objective,
    pub n: usize,
    pub m: usize,
    pub threads: usize,
    pub conf_h: usize,
    pub conf_v: usize,
    pub repeat: Option<u32>,
    pub record: Option<RunRecord>,
}

pub fn read_runs(path: &Path) -> Result<Vec<ParsedRun>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| HarnessError::csv(path, e))?;
    let headers = rdr.headers().map_err(|e| HarnessError::csv(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != RUN_COLUMNS {
        return Err(HarnessError::Parse {
            path: path.into(),
            message: format!("unexpected header `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row.map_err(|e| HarnessError::csv(path, e))?;
        let bad = |field: &str| HarnessError::Parse {
            path: path.into(),
            message: format!("row {}: bad `{field}` value", line + 2),
        };
        fn num<T: std::str::FromStr>(s: &str, err: impl FnOnce() -> HarnessError) -> Result<T> {
            s.parse().map_err(|_| err())
        }
        let function: Objective = num(&row[0], || bad("function"))?;
        let head = (
            num(&row[1], || bad("n"))?,
            num(&row[2], || bad("m"))?,
            num(&row[3], || bad("threads"))?,
            num(&row[4], || bad("conf_h"))?,
            num(&row[5], || bad("conf_v"))?,
        );
        let (repeat, record) = if &row[6] == NA {
            (None, None)
        } else {
            let seconds: f64 = num(&row[11], || bad("wall_time_s"))?;
            (
                Some(num(&row[6], || bad("repeat"))?),
                Some(RunRecord {
                    best_fitness: num(&row[8], || bad("best_fitness"))?,
                    best_solution: Vec::new(),
                    iterations: num(&row[9], || bad("iterations"))?,
                    evaluations: num(&row[10], || bad("evaluations"))?,
                    merge_evaluations: 0,
                    wall_time: Duration::try_from_secs_f64(seconds).map_err(|_| bad("wall_time_s"))?,
                    seed: num(&row[7], || bad("seed"))?,
                }),
            )
        };
        out.push(ParsedRun {
            function,
            n: head.0,
            m: head.1,
            threads: head.2,
            conf_h: head.3,
            conf_v: head.4,
            repeat,
            record,
        });
    }
    Ok(out)
}

/// Mean wall time per thread count, valid cells only.
pub fn speedup_rows(report: &ExperimentReport) -> Result<Vec<SpeedupRow>> {
    let times: BTreeMap<usize, f64> = report
        .valid_cells()
        .map(|(c, r)| (c.threads, r.summary.mean_time))
        .collect();
    speedup_report(&times).map_err(|e| HarnessError::Config(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFormat {
    /// Whitespace-separated columns for gnuplot.
    Dat,
    Svg,
}

impl std::str::FromStr for PlotFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dat" => Ok(PlotFormat::Dat),
            "svg" => Ok(PlotFormat::Svg),
            _ => Err(HarnessError::Config(format!("unknown plot format `{s}`"))),
        }
    }
}

pub fn speedup_dat(function: Objective, conf: (usize, usize), rows: &[SpeedupRow]) -> String {
    let mut s = format!(
        "# speedup of {function}, conf_h={} conf_v={}\n# threads mean_time_s speedup\n",
        conf.0, conf.1
    );
    for r in rows {
        let _ = writeln!(s, "{} {:.6} {:.6}", r.threads, r.mean_time, r.speedup);
    }
    s
}

pub fn speedup_svg(function: Objective, conf: (usize, usize), rows: &[SpeedupRow]) -> String {
    let (w, h, pad) = (480.0, 320.0, 48.0);
    let max_t = rows.iter().map(|r| r.threads).max().unwrap_or(1) as f64;
    let max_s = rows.iter().map(|r| r.speedup).fold(max_t, f64::max);
    let x = |t: f64| pad + (t - 1.0) / (max_t - 1.0).max(1.0) * (w - 2.0 * pad);
    let y = |s: f64| h - pad - s / max_s * (h - 2.0 * pad);
    let points: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.1},{:.1}", x(r.threads as f64), y(r.speedup)))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{pad}" y="24" font-family="sans-serif" font-size="14">{function} speedup (conf_h={}, conf_v={})</text>"#,
        conf.0, conf.1
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{pad}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{b}" stroke="black"/>"#,
        b = h - pad,
        r = w - pad
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="gray" stroke-dasharray="4"/>"#,
        x(1.0),
        y(1.0),
        x(max_t),
        y(max_t)
    );
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="2" points="{}"/>"#,
        points.join(" ")
    );
    for r in rows {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="middle">{}</text>"#,
            x(r.threads as f64),
            h - pad + 14.0,
            r.threads
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| HarnessError::io(path, e))
}

/// `runs.csv` -> `runs_<suffix>.<ext>` next to it.
pub fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

/// Decomposition table with the columns cores, nh, nv, k, br, bc, l.
/// Invalid configurations are starred.
pub fn plan_table(
    n: usize,
    m: usize,
    threads: &[usize],
    conf_h: usize,
    conf_v: usize,
    function: Option<Objective>,
) -> (String, usize) {
    let mut s = format!("n={n}, m={m}, conf_h={conf_h}, conf_v={conf_v}\n");
    let _ = writeln!(
        s,
        "{:>6} {:>6} {:>6} {:>8} {:>6} {:>6} {:>6}",
        "cores", "nh", "nv", "k", "br", "bc", "l"
    );
    let mut invalid = 0;
    for &t in threads {
        let plan = match function {
            Some(f) => DecompositionPlan::for_objective(n, m, t, conf_h, conf_v, f),
            None => DecompositionPlan::new(n, m, t, conf_h, conf_v),
        };
        match plan {
            Ok(p) => {
                let _ = writeln!(
                    s,
                    "{:>6} {:>6} {:>6} {:>8} {:>6} {:>6} {:>6}",
                    t, p.nh, p.nv, p.k, p.br, p.bc, p.l
                );
            }
            Err(e) => {
                invalid += 1;
                let _ = writeln!(
                    s,
                    "{:>6} {:>6} {:>6} {:>8} {:>6} {:>6} {:>6}  ({e})",
                    t, "*", "*", "*", "*", "*", "*"
                );
            }
        }
    }
    (s, invalid)
}
