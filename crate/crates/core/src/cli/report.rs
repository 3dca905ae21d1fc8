//! CSV rows, summaries and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

pub const CSV_HEADER: &str =
    "experiment,space,r,k,n,seed,mean,std_error,extra1_name,extra1_value,extra2_name,extra2_value,pass";

/// One CSV line. Blank cells are `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Row {
    pub r: Option<f64>,
    pub k: Option<f64>,
    pub n: Option<u64>,
    pub mean: f64,
    pub std_error: Option<f64>,
    pub extra1: Option<(String, String)>,
    pub extra2: Option<(String, String)>,
    pub pass: Option<bool>,
}

impl Row {
    pub fn new(mean: f64, std_error: Option<f64>) -> Self {
        Row { mean, std_error, ..Row::default() }
    }

    pub fn shell(mut self, r: Option<f64>, k: Option<f64>, n: Option<u64>) -> Self {
        self.r = r;
        self.k = k;
        self.n = n;
        self
    }

    pub fn extra1(mut self, name: &str, value: impl ToString) -> Self {
        self.extra1 = Some((name.into(), value.to_string()));
        self
    }

    pub fn extra2(mut self, name: &str, value: impl ToString) -> Self {
        self.extra2 = Some((name.into(), value.to_string()));
        self
    }

    pub fn pass(mut self, pass: bool) -> Self {
        self.pass = Some(pass);
        self
    }
}

/// An invariant the experiment asserts.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub experiment: String,
    pub space: String,
    pub seed: u64,
    pub digest: String,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = "writing to memory cannot fail";
        w.write_record(CSV_HEADER.split(',')).expect(io);
        for row in &self.rows {
            let (e1n, e1v) = row.extra1.clone().unwrap_or_default();
            let (e2n, e2v) = row.extra2.clone().unwrap_or_default();
            w.write_record([
                self.experiment.clone(),
                self.space.clone(),
                opt(row.r),
                opt(row.k),
                opt(row.n),
                self.seed.to_string(),
                row.mean.to_string(),
                opt(row.std_error),
                e1n,
                e1v,
                e2n,
                e2v,
                opt(row.pass),
            ])
            .expect(io);
        }
        String::from_utf8(w.into_inner().expect(io)).expect("fields are UTF-8")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment: {}", self.experiment);
        let _ = writeln!(out, "space: {}", self.space);
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "config digest: {}", self.digest);
        let _ = writeln!(out, "estimates:");
        for row in &self.rows {
            let mut line = String::from("  ");
            for (name, v) in [("r", row.r), ("k", row.k)] {
                if let Some(v) = v {
                    let _ = write!(line, "{name}={v} ");
                }
            }
            if let Some(n) = row.n {
                let _ = write!(line, "n={n} ");
            }
            let _ = write!(line, "mean={}", row.mean);
            if let Some(se) = row.std_error {
                let _ = write!(line, " ± {se}");
            }
            for (name, value) in row.extra1.iter().chain(&row.extra2) {
                let _ = write!(line, " {name}={value}");
            }
            out += &line;
            out.push('\n');
        }
        let _ = writeln!(out, "checks:");
        if self.checks.is_empty() {
            let _ = writeln!(out, "  (none asserted)");
        }
        for c in &self.checks {
            let _ = writeln!(out, "  [{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
        }
        out
    }
}

/// Writes `contents` to a temporary file beside `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().ok_or_else(|| std::io::Error::other("output path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            experiment: "estimate-e".into(),
            space: "sup-product(1:2,1:2)".into(),
            seed: 7,
            digest: "abc".into(),
            rows: vec![Row::new(1.5, Some(0.01)).shell(Some(2.0), Some(0.0), Some(100)).extra1("n_pairs", 100).pass(true)],
            checks: vec![Check::new("mean in [0, 2]", true, "1.5")],
        }
    }

    #[test]
    fn csv_quotes_labels_with_commas() {
        let csv = sample().csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("estimate-e,\"sup-product(1:2,1:2)\",2,0,100,7,1.5,0.01,n_pairs,100,,,true"));
    }

    #[test]
    fn summary_lists_digest_and_checks() {
        let s = sample().summary();
        assert!(s.contains("config digest: abc"));
        assert!(s.contains("[PASS] mean in [0, 2]"));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.csv");
        write_atomic(&path, "a").unwrap();
        write_atomic(&path, "b").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b");
        assert_eq!(std::fs::read_dir(path.parent().unwrap()).unwrap().count(), 1);
    }
}
