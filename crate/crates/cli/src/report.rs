//! Suite reports: ordered checks plus the configuration needed to replay them.

use std::io::Write;

use serde::{Serialize, Serializer};
use serde_json::{Map, Value};

use crate::format::{fmt_num, round_sig};

/// Version of the JSON layout below.
pub const SCHEMA: &str = "gsek-suite-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

pub(crate) fn sig<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    round_sig(*x).serialize(s)
}

/// A number for report metadata, rounded like every other output.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map(Value::Number).unwrap_or(Value::Null)
}

/// One verified statement: `lhs <= rhs + tolerance` unless the check says
/// otherwise in its metadata.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: String,
    /// The statement being checked, in words and symbols.
    pub paper_anchor: String,
    pub status: Status,
    #[serde(serialize_with = "sig")]
    pub lhs: f64,
    #[serde(serialize_with = "sig")]
    pub rhs: f64,
    #[serde(serialize_with = "sig")]
    pub tolerance: f64,
    pub metadata: Map<String, Value>,
}

impl Check {
    /// `lhs <= rhs + tolerance`. Unconverged inputs make the check
    /// inconclusive whatever the comparison says.
    pub fn le(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tolerance: f64, converged: bool) -> Self {
        let ok = lhs <= rhs + tolerance;
        Self::with(id, anchor, ok, converged, lhs, rhs, tolerance)
    }

    /// `|lhs - rhs| <= tolerance`.
    pub fn close(id: impl Into<String>, anchor: &str, lhs: f64, rhs: f64, tolerance: f64, converged: bool) -> Self {
        let ok = (lhs - rhs).abs() <= tolerance;
        Self::with(id, anchor, ok, converged, lhs, rhs, tolerance)
    }

    pub fn with(
        id: impl Into<String>,
        anchor: &str,
        ok: bool,
        converged: bool,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    ) -> Self {
        let status = match (converged, ok && lhs.is_finite() && rhs.is_finite()) {
            (false, _) => Status::Inconclusive,
            (true, true) => Status::Pass,
            (true, false) => Status::Fail,
        };
        Self { id: id.into(), paper_anchor: anchor.into(), status, lhs, rhs, tolerance, metadata: Map::new() }
    }

    /// A check that could not be evaluated at all.
    pub fn error(id: impl Into<String>, anchor: &str, err: &gsek::Error) -> Self {
        let mut c = Self::with(id, anchor, false, true, f64::NAN, f64::NAN, 0.0);
        c.metadata.insert("error".into(), Value::String(err.to_string()));
        c
    }

    pub fn meta(mut self, key: &str, v: Value) -> Self {
        self.metadata.insert(key.into(), v);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub schema: &'static str,
    pub suite: String,
    pub seed: u64,
    pub config: Value,
    pub family: &'static str,
    pub version: &'static str,
    #[serde(serialize_with = "sig")]
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub meta: Meta,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn count(&self, s: Status) -> usize {
        self.checks.iter().filter(|c| c.status == s).count()
    }

    /// 0 when every check passed, 1 when any failed, otherwise 2.
    pub fn exit_code(&self) -> i32 {
        if self.count(Status::Fail) > 0 {
            1
        } else if self.count(Status::Inconclusive) > 0 {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per check, in report order.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["suite", "id", "paper_anchor", "status", "lhs", "rhs", "tolerance", "metadata"])?;
        for c in &self.checks {
            out.write_record([
                self.meta.suite.as_str(),
                &c.id,
                &c.paper_anchor,
                c.status.as_str(),
                &fmt_num(c.lhs),
                &fmt_num(c.rhs),
                &fmt_num(c.tolerance),
                &Value::Object(c.metadata.clone()).to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
