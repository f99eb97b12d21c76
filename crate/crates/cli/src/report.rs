//! JSON reports, CSV tables and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde_json::{json, Map, Value};
use whlattice::symbols::format_f64;
use whlattice::verify::{DecayFit, DecayModel, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub relation: Relation,
}

impl Check {
    pub fn pass(&self) -> bool {
        self.value.is_finite()
            && match self.relation {
                Relation::AtMost => self.value <= self.limit,
                Relation::AtLeast => self.value >= self.limit,
            }
    }

    fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "value": num(self.value),
            "limit": num(self.limit),
            "relation": match self.relation { Relation::AtMost => "<=", Relation::AtLeast => ">=" },
            "pass": self.pass(),
        })
    }
}

/// Collected results of one command. Keys come out sorted, so equal inputs
/// give byte-identical documents (timings aside, which are opt-in).
#[derive(Debug, Default, Clone)]
pub struct Report {
    pub checks: Vec<Check>,
    pub values: Map<String, Value>,
    pub sections: Map<String, Value>,
    pub timings: Map<String, Value>,
}

impl Report {
    pub fn at_most(&mut self, name: &str, value: f64, limit: f64) -> bool {
        self.push(name, value, limit, Relation::AtMost)
    }

    pub fn at_least(&mut self, name: &str, value: f64, limit: f64) -> bool {
        self.push(name, value, limit, Relation::AtLeast)
    }

    fn push(&mut self, name: &str, value: f64, limit: f64, relation: Relation) -> bool {
        let c = Check {
            name: name.into(),
            value,
            limit,
            relation,
        };
        let ok = c.pass();
        if !ok {
            log::warn!("check {name} failed: {value:e} vs {limit:e}");
        }
        self.checks.push(c);
        ok
    }

    pub fn value(&mut self, name: &str, v: f64) {
        self.values.insert(name.into(), num(v));
    }

    pub fn section(&mut self, name: &str, v: Value) {
        self.sections.insert(name.into(), v);
    }

    pub fn timing(&mut self, name: &str, secs: f64) {
        self.timings.insert(name.into(), num(secs));
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }
}

/// The report document: `checks`, `pass`, then any values, sections and timings.
pub fn emit_report(r: &Report) -> Value {
    let mut doc = Map::new();
    doc.insert("checks".into(), Value::Array(r.checks.iter().map(Check::to_json).collect()));
    doc.insert("pass".into(), Value::Bool(r.pass()));
    if !r.values.is_empty() {
        doc.insert("values".into(), Value::Object(r.values.clone()));
    }
    for (k, v) in &r.sections {
        doc.insert(k.clone(), v.clone());
    }
    if !r.timings.is_empty() {
        doc.insert("timings".into(), Value::Object(r.timings.clone()));
    }
    Value::Object(doc)
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Non-finite numbers become `null`.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn fit_json(fit: &DecayFit) -> Value {
    json!({
        "model": match fit.model { DecayModel::Algebraic => "algebraic", DecayModel::Exponential => "exponential" },
        "rate": num(fit.fitted_rate),
        "intercept": num(fit.intercept),
        "r_squared": num(fit.r_squared),
        "range": [num(fit.sample_range.0), num(fit.sample_range.1)],
        "samples": fit.samples,
        "verdict": match fit.verdict { Verdict::Consistent => "consistent", Verdict::Violated => "violated" },
    })
}

/// CSV text with LF line endings.
pub struct Table {
    buf: String,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut t = Self { buf: String::new() };
        t.raw(header.iter().map(|s| s.as_ref().to_string()));
        t
    }

    fn raw(&mut self, cells: impl Iterator<Item = String>) {
        let cells: Vec<String> = cells.collect();
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    /// Integer index columns followed by numeric columns.
    pub fn row(&mut self, ints: &[i64], nums: &[f64]) {
        self.raw(ints.iter().map(|v| v.to_string()).chain(nums.iter().map(|&v| format_f64(v))));
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

pub fn axis_header(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|a| format!("{prefix}_{a}")).collect()
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Where artifacts go: files in a directory, or the primary one on stdout.
#[derive(Debug, Clone)]
pub struct Output {
    pub dir: Option<PathBuf>,
}

impl Output {
    /// Primary artifacts go to stdout when no directory is set; others are dropped.
    pub fn emit(&self, name: &str, text: &str, primary: bool) -> anyhow::Result<()> {
        match &self.dir {
            Some(d) => {
                let p = d.join(name);
                write_atomic(&p, text.as_bytes())?;
                log::info!("wrote {}", p.display());
            }
            None if primary => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                out.flush()?;
            }
            None => log::debug!("no output directory; skipping {name}"),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report() {
        let doc = emit_report(&Report::default());
        assert_eq!(serde_json::to_string(&doc).unwrap(), r#"{"checks":[],"pass":true}"#);
    }

    #[test]
    fn failing_check() {
        let mut r = Report::default();
        assert!(r.at_most("a", 1.0, 2.0));
        assert!(!r.at_least("b", 1.0, 2.0));
        assert!(!r.at_most("nan", f64::NAN, 1.0));
        let doc = emit_report(&r);
        assert_eq!(doc["pass"], Value::Bool(false));
        assert_eq!(doc["checks"][0]["pass"], Value::Bool(true));
        assert_eq!(doc["checks"][2]["value"], Value::Null);
    }

    #[test]
    fn sorted_keys() {
        let mut r = Report::default();
        r.value("zeta", 1.0);
        r.value("alpha", 2.0);
        let s = serde_json::to_string(&emit_report(&r)).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }

    #[test]
    fn table_format() {
        let mut t = Table::new(&["k_1", "value"]);
        t.row(&[-3], &[0.1]);
        assert_eq!(t.into_string(), "k_1,value\n-3,1.0000000000000001e-1\n");
    }

    #[test]
    fn atomic_write() {
        let d = tempfile::tempdir().unwrap();
        let p = d.path().join("sub/x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(d.path().join("sub")).unwrap().count(), 1);
    }
}
