//! CSV tables and all-or-nothing writing of a command's output files.

use std::io::Write;
use std::path::{Path, PathBuf};

use agrivolt_core::agronomy::{monthly_y_crop, ShadeResponse};
use agrivolt_core::planner::{FeasibilityReport, ScheduleEconomics, SweepRow};
use agrivolt_core::simulate::YieldSeries;
use agrivolt_core::time::Month;

use crate::error::{AppError, AppResult};

/// Fixed-precision decimal; infinities print as `inf`, and negative zero as zero.
pub fn num(v: f64, decimals: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn opt(v: Option<f64>, decimals: usize) -> String {
    v.map(|x| num(x, decimals)).unwrap_or_default()
}

/// A CSV table built in memory.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

/// Files produced by one command, written only once all of them are ready.
#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn add_table(&mut self, name: &str, table: &Table) {
        self.add(name, table.to_csv());
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes every file under `dir` through a temporary file and rename.
    pub fn commit(&self, dir: &Path) -> AppResult<Vec<PathBuf>> {
        let io = |path: &Path, source| AppError::Output {
            path: path.to_path_buf(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let target = dir.join(name);
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io(dir, e))?;
            tmp.write_all(bytes).map_err(|e| io(&target, e))?;
            tmp.persist(&target).map_err(|e| io(&target, e.error))?;
            written.push(target);
        }
        Ok(written)
    }
}

/// `month,y_pv,shading_ratio,y_crop_<class>...`; months without daylight have empty cells.
pub fn yield_monthly(series: &YieldSeries, classes: &[ShadeResponse]) -> Table {
    let mut header = vec!["month".to_string(), "y_pv".into(), "shading_ratio".into()];
    header.extend(classes.iter().map(|c| format!("y_crop_{}", c.class.code())));
    let mut t = Table::new(header);
    for m in Month::all() {
        let agg = series.month(m);
        let mut row = vec![
            m.number().to_string(),
            opt(agg.y_pv(), 6),
            if agg.daylight_steps > 0 {
                num(agg.mean_shading_ratio, 6)
            } else {
                String::new()
            },
        ];
        row.extend(classes.iter().map(|c| opt(monthly_y_crop(c, series, m).ok(), 6)));
        t.push(row);
    }
    t
}

/// `timestamp,rotation_deg,front_poa,rear_poa,shading_ratio` for every record.
pub fn timesteps(series: &YieldSeries) -> Table {
    let mut t = Table::new(["timestamp", "rotation_deg", "front_poa", "rear_poa", "shading_ratio"]);
    for s in series.steps() {
        t.push(vec![
            s.timestamp.to_string(),
            num(s.rotation, 4),
            num(s.front, 4),
            num(s.rear, 4),
            opt(s.shading_ratio(), 6),
        ]);
    }
    t
}

pub const ECON_HEADER: [&str; 8] = [
    "scheme",
    "a_lm",
    "M_L",
    "crop_plan",
    "p_prime",
    "pb_prime",
    "ppr",
    "delta_fit_th_pct",
];

pub fn econ_row(scheme: &str, a_lm: f64, m_l: f64, plan: &str, e: &ScheduleEconomics) -> Vec<String> {
    vec![
        scheme.to_string(),
        num(a_lm, 2),
        num(m_l, 2),
        plan.to_string(),
        num(e.econ.p_prime, 6),
        num(e.econ.pb_prime, 6),
        num(e.econ.ppr, 6),
        num(e.econ.delta_fit_th, 4),
    ]
}

/// Economics columns followed by the remaining sweep axes and yields; failed cells keep their axes.
pub fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut header: Vec<String> = ECON_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(["site", "delta_fit_pct", "y_pv", "y_crop", "error"].map(String::from));
    let mut t = Table::new(header);
    for r in rows {
        let c = &r.cell;
        let label = c.scheme.label();
        let mut row = match &r.outcome {
            Ok(e) => econ_row(&label, c.a_lm, c.m_l, &c.crop_plan, e),
            Err(_) => {
                let mut v = vec![label.clone(), num(c.a_lm, 2), num(c.m_l, 2), c.crop_plan.clone()];
                v.extend(std::iter::repeat_n(String::new(), 4));
                v
            }
        };
        row.push(c.site.clone());
        row.push(num(c.delta_fit, 2));
        match &r.outcome {
            Ok(e) => row.extend([num(e.y_pv, 6), num(e.crop.y_crop(), 6), String::new()]),
            Err(err) => row.extend([String::new(), String::new(), err.to_string()]),
        }
        t.push(row);
    }
    t
}

/// Per grid point and period: yields and pass flags.
pub fn feasibility_table(report: &FeasibilityReport) -> Table {
    let mut t = Table::new(["n", "period", "y_pv", "y_crop", "energy_ok", "crop_ok", "feasible"]);
    for p in &report.points {
        for c in &p.checks {
            let period: Vec<String> = c.months.iter().map(|m| m.number().to_string()).collect();
            t.push(vec![
                num(p.n, 1),
                period.join(" "),
                num(c.y_pv, 6),
                opt(c.y_crop, 6),
                c.energy_ok.to_string(),
                c.crop_ok.to_string(),
                p.passes().to_string(),
            ]);
        }
    }
    t
}
