//! Report records and the JSON report document.

use std::collections::BTreeMap;
use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::C64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Nothing could be evaluated (e.g. every sampled point was rank deficient).
    Skipped,
    /// A sampled hypothesis failed, so the statement does not apply.
    NotApplicable,
}

pub fn point_json(p: &[C64]) -> Vec<[f64; 2]> {
    p.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PointDetail {
    pub point: Vec<[f64; 2]>,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_difference: f64,
    pub residual: f64,
}

/// Outcome of an identity check over a set of points.
///
/// The per-point residual is `|LHS − RHS| / (1 + |LHS| + |RHS|)`; `passed` holds exactly
/// when the largest residual is at most `tolerance`.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub record: &'static str,
    pub kind: String,
    pub label: String,
    pub status: CheckStatus,
    pub passed: bool,
    pub advisory: bool,
    pub tolerance: f64,
    pub points_checked: usize,
    pub points_skipped: usize,
    pub max_abs_residual: Option<f64>,
    pub worst_point: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Vec<PointDetail>>,
}

pub fn relative_residual(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs())
}

impl CheckReport {
    pub fn new(kind: &str, tolerance: f64) -> Self {
        CheckReport {
            record: "check",
            kind: kind.to_string(),
            label: kind.to_string(),
            status: CheckStatus::Skipped,
            passed: false,
            advisory: false,
            tolerance,
            points_checked: 0,
            points_skipped: 0,
            max_abs_residual: None,
            worst_point: None,
            values: BTreeMap::new(),
            notes: Vec::new(),
            details: None,
        }
    }

    /// Builds the report from per-point `(point, lhs, rhs)` in evaluation order.
    pub fn from_samples(kind: &str, tolerance: f64, samples: &[(Vec<C64>, f64, f64)], skipped: usize) -> Self {
        let mut r = CheckReport::new(kind, tolerance);
        r.points_skipped = skipped;
        let mut details = Vec::with_capacity(samples.len());
        for (p, lhs, rhs) in samples {
            let res = relative_residual(*lhs, *rhs);
            r.record_residual(p, res);
            details.push(PointDetail {
                point: point_json(p),
                lhs: *lhs,
                rhs: *rhs,
                abs_difference: (lhs - rhs).abs(),
                residual: res,
            });
        }
        r.details = Some(details);
        r.finish();
        r
    }

    /// Records one residual; NaN residuals count as worst.
    pub fn record_residual(&mut self, point: &[C64], residual: f64) {
        self.points_checked += 1;
        let worse = match self.max_abs_residual {
            None => true,
            Some(cur) => residual.is_nan() || residual > cur,
        };
        if worse && !self.max_abs_residual.is_some_and(f64::is_nan) {
            self.max_abs_residual = Some(residual);
            self.worst_point = Some(point_json(point));
        }
    }

    /// Sets status and `passed` from the recorded residuals.
    pub fn finish(&mut self) {
        match self.max_abs_residual {
            None => {
                self.status = CheckStatus::Skipped;
                self.passed = false;
                self.advisory = true;
            }
            Some(r) => {
                self.passed = r <= self.tolerance;
                self.status = if self.passed { CheckStatus::Pass } else { CheckStatus::Fail };
            }
        }
    }

    pub fn not_applicable(mut self, why: impl Into<String>) -> Self {
        self.status = CheckStatus::NotApplicable;
        self.passed = false;
        self.advisory = true;
        self.notes.push(why.into());
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.values.insert(key.to_string(), value.into());
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantSource {
    Analytic,
    Sampled,
}

/// A curvature hypothesis constant and how it was obtained.
#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub statement: String,
    pub value: f64,
    pub source: ConstantSource,
    /// Extreme of the curvature quantity seen over the samples.
    pub sampled_extreme: Option<f64>,
    /// Whether the samples are consistent with the hypothesis.
    pub holds_on_samples: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    /// `observed ≤ bound`.
    Upper,
    /// `observed ≥ bound`.
    Lower,
}

/// Outcome of a sampled curvature-ratio bound. `slack` is the margin in the direction
/// of the inequality (`bound − observed` for upper bounds) and `passed ⇔ slack ≥ −tol`.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub record: &'static str,
    pub kind: String,
    pub label: String,
    pub status: CheckStatus,
    pub passed: bool,
    pub advisory: bool,
    pub direction: BoundDirection,
    pub hypotheses: Vec<Hypothesis>,
    pub observed: f64,
    pub observed_point: Option<Vec<[f64; 2]>>,
    pub bound: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub equality_case: bool,
    pub points_checked: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_text: Option<String>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: &str,
        direction: BoundDirection,
        hypotheses: Vec<Hypothesis>,
        observed: f64,
        observed_point: Option<&[C64]>,
        bound: f64,
        tolerance: f64,
        points_checked: usize,
    ) -> Self {
        let slack = match direction {
            BoundDirection::Upper => bound - observed,
            BoundDirection::Lower => observed - bound,
        };
        let passed = slack >= -tolerance;
        let mut r = BoundReport {
            record: "bound",
            kind: kind.to_string(),
            label: kind.to_string(),
            status: if passed { CheckStatus::Pass } else { CheckStatus::Fail },
            passed,
            advisory: false,
            direction,
            observed,
            observed_point: observed_point.map(point_json),
            bound,
            slack,
            tolerance,
            equality_case: slack.abs() <= tolerance,
            points_checked,
            coefficient_text: None,
            values: BTreeMap::new(),
            notes: Vec::new(),
            hypotheses,
        };
        if r.hypotheses.iter().any(|h| !h.holds_on_samples) {
            r.status = CheckStatus::NotApplicable;
            r.passed = false;
            r.advisory = true;
            r.notes.push("a curvature hypothesis failed on the samples; the bound does not apply".into());
        } else if r.hypotheses.iter().any(|h| h.source == ConstantSource::Sampled) {
            r.notes.push("hypothesis constants were estimated by sampling, so this result is advisory".into());
        }
        r
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.values.insert(key.to_string(), value.into());
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub direction: usize,
    pub radius: f64,
    pub point: Vec<[f64; 2]>,
    pub min_singular_value: f64,
    pub sigma_m_minus_1: f64,
    pub volume_ratio: f64,
}

/// Pointwise singular-value data along rays; reporting only.
#[derive(Clone, Debug, Serialize)]
pub struct DegeneracyProfile {
    pub record: &'static str,
    pub kind: String,
    pub label: String,
    pub status: CheckStatus,
    pub passed: bool,
    pub advisory: bool,
    pub rows: Vec<ProfileRow>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum ReportEntry {
    Check(CheckReport),
    Bound(BoundReport),
    Profile(DegeneracyProfile),
}

impl ReportEntry {
    pub fn label(&self) -> &str {
        match self {
            ReportEntry::Check(c) => &c.label,
            ReportEntry::Bound(b) => &b.label,
            ReportEntry::Profile(p) => &p.label,
        }
    }

    pub fn status(&self) -> CheckStatus {
        match self {
            ReportEntry::Check(c) => c.status,
            ReportEntry::Bound(b) => b.status,
            ReportEntry::Profile(p) => p.status,
        }
    }

    pub fn passed(&self) -> bool {
        match self {
            ReportEntry::Check(c) => c.passed,
            ReportEntry::Bound(b) => b.passed,
            ReportEntry::Profile(p) => p.passed,
        }
    }

    pub fn is_advisory(&self) -> bool {
        match self {
            ReportEntry::Check(c) => c.advisory,
            ReportEntry::Bound(b) => b.advisory,
            ReportEntry::Profile(p) => p.advisory,
        }
    }

    pub fn mark_advisory(&mut self) {
        match self {
            ReportEntry::Check(c) => c.advisory = true,
            ReportEntry::Bound(b) => b.advisory = true,
            ReportEntry::Profile(p) => p.advisory = true,
        }
    }

    pub fn strip_details(&mut self) {
        if let ReportEntry::Check(c) = self {
            c.details = None;
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub advisory: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<ReportEntry>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn new(scenario: impl Into<String>, seed: u64, checks: Vec<ReportEntry>) -> Self {
        let mut summary = Summary::default();
        for c in &checks {
            if c.is_advisory() {
                summary.advisory += 1;
            } else if c.passed() {
                summary.passed += 1;
            } else {
                summary.failed += 1;
            }
        }
        ReportDocument { schema: SCHEMA_VERSION, scenario: scenario.into(), seed, checks, summary }
    }

    /// Process exit status: 0 when every non-advisory check passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }
}

/// Writes floats with 17 significant digits.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Pretty JSON with every float printed to 17 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    // round-trip through Value so nested arbitrary values use the same float formatting
    let v = serde_json::to_value(value).expect("report values serialize");
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PrettySeventeen::default());
    v.serialize(&mut ser).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}

#[derive(Default)]
struct PrettySeventeen {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident ( $($arg:ident : $ty:ty),* );)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.inner.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for PrettySeventeen {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        SeventeenDigits.write_f64(writer, value)
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        SeventeenDigits.write_f32(writer, value)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_string(&serde_json::json!({"x": 0.1, "y": 2.0, "n": 3}));
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("2.0000000000000000e0"), "{s}");
        assert!(s.contains("\"n\": 3"), "{s}");
        let back: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn nan_serializes_as_null() {
        let s = to_json_string(&serde_json::json!({"x": f64::NAN}));
        assert!(s.contains("null"));
    }

    #[test]
    fn residual_guard_and_pass_rule() {
        let r = CheckReport::from_samples(
            "demo",
            1e-6,
            &[(vec![C64::new(0.0, 0.0)], 1.0, 1.0 + 1e-7), (vec![C64::new(1.0, 0.0)], 100.0, 100.0 + 1e-5)],
            0,
        );
        assert!(r.passed);
        assert_eq!(r.worst_point, Some(vec![[1.0, 0.0]]));
        let bad = CheckReport::from_samples("demo", 1e-9, &[(vec![C64::new(0.0, 0.0)], 0.0, 1e-6)], 0);
        assert_eq!(bad.status, CheckStatus::Fail);
        let none = CheckReport::from_samples("demo", 1e-9, &[], 3);
        assert_eq!(none.status, CheckStatus::Skipped);
    }
}
