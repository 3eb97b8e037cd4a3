//! Report rows, sections and their JSON, CSV and text renderings.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Format, Suite};
use crate::error::{Error, Result};
use crate::optimize::Budget;
use crate::tensor_products::BracketReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|value − expected| ≤ tolerance`.
    Equal,
    /// `value ≤ expected + tolerance`.
    AtMost,
    /// `value ≥ expected − tolerance`.
    AtLeast,
}

impl Relation {
    fn holds(self, value: f64, expected: f64, tol: f64) -> bool {
        match self {
            Relation::Equal => (value - expected).abs() <= tol,
            Relation::AtMost => value <= expected + tol,
            Relation::AtLeast => value >= expected - tol,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Equal => "=",
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub case: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    pub value: f64,
    pub expected: f64,
    pub relation: Relation,
    pub tolerance: f64,
    pub passed: bool,
    /// Objective evaluations behind a searched supremum.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bracket: Option<BracketReport>,
    /// Data needed to replay the case: witness elements, or the seed of the
    /// worst instance of an aggregated row.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<serde_json::Value>,
}

impl CaseRow {
    pub fn new(case: impl Into<String>, value: f64, relation: Relation, expected: f64, tolerance: f64) -> Self {
        CaseRow {
            case: case.into(),
            n: None,
            value,
            expected,
            relation,
            tolerance,
            passed: !value.is_nan() && relation.holds(value, expected, tolerance),
            candidates: None,
            bracket: None,
            witness: None,
        }
    }

    pub fn equal(case: impl Into<String>, value: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(case, value, Relation::Equal, expected, tolerance)
    }

    pub fn at_most(case: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(case, value, Relation::AtMost, bound, tolerance)
    }

    pub fn at_least(case: impl Into<String>, value: f64, bound: f64, tolerance: f64) -> Self {
        Self::new(case, value, Relation::AtLeast, bound, tolerance)
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_candidates(mut self, count: usize) -> Self {
        self.candidates = Some(count);
        self
    }

    pub fn with_bracket(mut self, b: BracketReport) -> Self {
        self.bracket = Some(b);
        self
    }

    pub fn with_witness<T: Serialize>(mut self, w: &T) -> Self {
        self.witness = serde_json::to_value(w).ok();
        self
    }

    /// Marks a row failed regardless of its numbers, e.g. when a certificate
    /// did not reassemble.
    pub fn fail(mut self) -> Self {
        self.passed = false;
        self
    }
}

/// Running maximum of a per-instance deviation, remembering which instance
/// produced it.
#[derive(Clone, Copy, Debug, Default)]
pub struct Worst {
    pub value: f64,
    pub seed: Option<u64>,
    pub count: usize,
}

impl Worst {
    pub fn push(&mut self, value: f64, seed: u64) {
        self.count += 1;
        if self.seed.is_none() || value > self.value || value.is_nan() {
            self.value = value;
            self.seed = Some(seed);
        }
    }

    /// Row asserting `max value ≤ tolerance`.
    pub fn row(&self, case: impl Into<String>, tolerance: f64) -> CaseRow {
        let mut row = CaseRow::at_most(case, self.value, 0.0, tolerance).with_n(self.count);
        if let Some(seed) = self.seed {
            row = row.with_witness(&serde_json::json!({ "worst_seed": seed }));
        }
        if self.count == 0 {
            row = row.fail();
        }
        row
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub passed: bool,
    pub rows: Vec<CaseRow>,
}

impl Section {
    pub fn new(name: impl Into<String>, rows: Vec<CaseRow>) -> Self {
        let passed = rows.iter().all(|r| r.passed);
        Section { name: name.into(), passed, rows }
    }

    pub fn first_failure(&self) -> Option<&CaseRow> {
        self.rows.iter().find(|r| !r.passed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: Suite,
    pub seed: u64,
    pub max_n: usize,
    pub budget: Budget,
    pub samples: usize,
    pub sections: Vec<Section>,
    pub passed: bool,
    /// `section/case` of the first failing row.
    pub first_failure: Option<String>,
    /// Seconds since the Unix epoch; not covered by the determinism
    /// guarantee.
    pub timestamp: u64,
}

impl Report {
    pub fn new(suite: Suite, seed: u64, max_n: usize, budget: Budget, samples: usize, sections: Vec<Section>) -> Self {
        let first_failure = sections
            .iter()
            .find_map(|s| s.first_failure().map(|r| format!("{}/{}", s.name, r.case)));
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Report {
            suite,
            seed,
            max_n,
            budget,
            samples,
            passed: first_failure.is_none(),
            first_failure,
            sections,
            timestamp,
        }
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Growth-only reports use the columns `n,estimate,expected`; all others
    /// one line per row with `section,case,n,value,expected,relation,tolerance,passed`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.suite == Suite::Growth {
            w.write_record(["n", "estimate", "expected"])?;
            for row in self.sections.iter().flat_map(|s| &s.rows) {
                let n = row.n.map(|n| n.to_string()).unwrap_or_default();
                w.write_record([n, row.value.to_string(), row.expected.to_string()])?;
            }
        } else {
            w.write_record(["section", "case", "n", "value", "expected", "relation", "tolerance", "passed"])?;
            for s in &self.sections {
                for row in &s.rows {
                    w.write_record([
                        s.name.clone(),
                        row.case.clone(),
                        row.n.map(|n| n.to_string()).unwrap_or_default(),
                        row.value.to_string(),
                        row.expected.to_string(),
                        row.relation.symbol().to_string(),
                        row.tolerance.to_string(),
                        row.passed.to_string(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Malformed(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Malformed(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "opspace suite={} seed={} max_n={} restarts={} iterations={} samples={}\n",
            self.suite.as_str(),
            self.seed,
            self.max_n,
            self.budget.restarts,
            self.budget.iterations,
            self.samples
        );
        for s in &self.sections {
            let failed = s.rows.iter().filter(|r| !r.passed).count();
            out.push_str(&format!(
                "\n[{}] {} ({} rows, {} failed)\n",
                s.name,
                if s.passed { "PASS" } else { "FAIL" },
                s.rows.len(),
                failed
            ));
            for r in &s.rows {
                let n = r.n.map(|n| format!(" n={n}")).unwrap_or_default();
                out.push_str(&format!(
                    "  {:<4} {}{}: {} {} {} (tol {:e})\n",
                    if r.passed { "ok" } else { "FAIL" },
                    r.case,
                    n,
                    number(r.value),
                    r.relation.symbol(),
                    number(r.expected),
                    r.tolerance
                ));
            }
        }
        out.push_str(&match &self.first_failure {
            None => "\nall checks passed\n".to_string(),
            Some(f) => format!("\nfirst failing case: {f}\n"),
        });
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => Ok(self.to_text()),
        }
    }

    /// The JSON value with the timestamp removed, for determinism checks.
    pub fn deterministic_json(&self) -> Result<serde_json::Value> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timestamp");
        }
        Ok(v)
    }
}

fn number(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.3e}")
    } else {
        format!("{x:.12}")
    }
}

/// Writes the rendered report to `path`, creating parent directories.
pub fn write_report(report: &Report, format: Format, path: &Path) -> Result<()> {
    let text = report.render(format)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| Error::Io { path: parent.to_path_buf(), source })?;
    }
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(suite: Suite) -> Report {
        let rows = vec![
            CaseRow::equal("a", 1.0, 1.0, 1e-9).with_n(1),
            CaseRow::equal("b", 2.0, 2.0 + 1e-3, 1e-9).with_n(2),
        ];
        Report::new(suite, 7, 2, Budget::default(), 1, vec![Section::new("growth", rows)])
    }

    #[test]
    fn first_failure_is_named() {
        let r = report(Suite::Growth);
        assert!(!r.passed);
        assert_eq!(r.first_failure.as_deref(), Some("growth/b"));
    }

    #[test]
    fn growth_csv_header() {
        let csv = report(Suite::Growth).to_csv().unwrap();
        assert_eq!(csv.lines().next(), Some("n,estimate,expected"));
        assert_eq!(csv.lines().count(), 3);
        let other = report(Suite::All).to_csv().unwrap();
        assert!(other.starts_with("section,case,n,value"));
    }

    #[test]
    fn deterministic_json_drops_timestamp() {
        let r = report(Suite::Growth);
        let v = r.deterministic_json().unwrap();
        assert!(v.get("timestamp").is_none());
        assert_eq!(v["suite"], "growth");
    }

    #[test]
    fn worst_tracks_maximum() {
        let mut w = Worst::default();
        w.push(1e-14, 3);
        w.push(5e-13, 9);
        w.push(2e-14, 4);
        let row = w.row("x", 1e-12);
        assert!(row.passed);
        assert_eq!(row.witness.unwrap()["worst_seed"], 9);
        assert!(!Worst::default().row("empty", 1.0).passed);
    }

    #[test]
    fn nan_never_passes() {
        assert!(!CaseRow::at_most("nan", f64::NAN, 1.0, 1.0).passed);
    }
}
