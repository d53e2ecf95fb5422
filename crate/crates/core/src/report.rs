//! CSV tables, verdict files and atomic output.
//!
//! Reals are written with 17 significant digits so every value round-trips.

use crate::error::{invalid, Result};
use crate::estimate::Estimate;
use std::io::Write;
use std::path::Path;

/// 17 significant digits, scientific notation; `inf`, `-inf` and `nan` spelled out.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

/// A header plus string rows, serialized with standard CSV quoting.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let csv_err = |e: csv::Error| invalid(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| invalid(format!("csv: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes()?)
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| invalid(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "mc",
        }
    }
}

/// One line of the results table.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub case: String,
    pub gamma: f64,
    pub method: Method,
    pub estimate: Estimate,
}

pub const RESULTS_HEADER: [&str; 8] =
    ["case", "gamma", "method", "value", "std_error", "n", "divergence_flag", "schedule_json"];

pub fn results_table(rows: &[ResultRow]) -> Table {
    let mut t = Table::new(&RESULTS_HEADER);
    for r in rows {
        let e = &r.estimate;
        let schedule = e.divergence.trend().map(|t| t.to_json().to_string()).unwrap_or_else(|| "{}".into());
        t.push(vec![
            r.case.clone(),
            fmt_real(r.gamma),
            r.method.tag().into(),
            fmt_real(e.value),
            e.std_error.map(fmt_real).unwrap_or_default(),
            e.n.to_string(),
            e.divergence.tag().into(),
            schedule,
        ]);
    }
    t
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn tag(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }

    /// Process exit code: 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok { Status::Pass } else { Status::Fail }
    }

    /// The worse of two outcomes: fail beats inconclusive beats pass.
    pub fn and(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

/// Machine-readable outcome of one check.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub check: String,
    pub status: Status,
    pub statistic: f64,
    pub threshold: f64,
    /// Free-form schedule description (JSON).
    pub schedule: String,
    /// Further `key=value` lines.
    pub extra: Vec<(String, String)>,
}

impl Verdict {
    pub fn new(check: &str, status: Status, statistic: f64, threshold: f64) -> Self {
        Verdict { check: check.into(), status, statistic, threshold, schedule: "{}".into(), extra: Vec::new() }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.extra.push((key.into(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = format!(
            "check_name={}\nstatus={}\nstatistic={}\nthreshold={}\nschedule={}\n",
            self.check,
            self.status.tag(),
            fmt_real(self.statistic),
            fmt_real(self.threshold),
            self.schedule
        );
        for (k, v) in &self.extra {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_real(f64::INFINITY), "inf");
    }

    #[test]
    fn json_cells_are_quoted() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["x".into(), r#"{"k":[1,2]}"#.into()]);
        let s = String::from_utf8(t.to_bytes().unwrap()).unwrap();
        assert_eq!(s, "a,b\nx,\"{\"\"k\"\":[1,2]}\"\n");
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn status_combination() {
        assert_eq!(Status::Pass.and(Status::Inconclusive), Status::Inconclusive);
        assert_eq!(Status::Inconclusive.and(Status::Fail), Status::Fail);
    }
}
