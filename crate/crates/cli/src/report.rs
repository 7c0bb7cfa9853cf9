//! Verification reports: a human-readable summary and the `#BEGIN-REPORT`
//! block of `key = value` lines.

use std::fmt::{self, Write as _};

use isoline::degree::{BlockDetReport, CorollaryValues, DegreeEstimate, MethodSelection};
use isoline::lines::{GeneralPositionReport, SelfIntersectionCheck, TangencyRecord};

use crate::config::{method_name, OutputFormat};
use crate::CliError;

pub const BEGIN: &str = "#BEGIN-REPORT";
pub const END: &str = "#END-REPORT";

/// Seventeen significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| fmt_float(*x)).collect::<Vec<_>>().join(" ")
}

/// Ordered `key = value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportBlock {
    entries: Vec<(String, String)>,
}

impl ReportBlock {
    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn push_float(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, fmt_float(value));
    }

    pub fn push_floats(&mut self, key: impl Into<String>, values: &[f64]) {
        self.push(key, fmt_floats(values));
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn get_i64(&self, key: &str) -> Option<i64> {
        self.get(key)?.parse().ok()
    }

    pub fn get_bool(&self, key: &str) -> Option<bool> {
        self.get(key)?.parse().ok()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(BEGIN);
        out.push('\n');
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out.push_str(END);
        out.push('\n');
        out
    }

    /// Extracts the first report block from arbitrary output text.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut lines = text.lines().skip_while(|l| l.trim() != BEGIN);
        if lines.next().is_none() {
            return Err(CliError::Config(format!("no {BEGIN} line")));
        }
        let mut block = Self::default();
        for line in lines {
            let line = line.trim();
            if line == END {
                return Ok(block);
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| CliError::Config(format!("malformed report line {line:?}")))?;
            block.push(k, v);
        }
        Err(CliError::Config(format!("no {END} line")))
    }
}

/// All computed pieces of one verification run.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub scenario: String,
    pub n: usize,
    pub p: Vec<f64>,
    pub method: MethodSelection,
    pub records: Vec<TangencyRecord>,
    pub general_position: GeneralPositionReport,
    pub n_lines: i64,
    pub ind: Vec<DegreeEstimate>,
    pub ind_p: Vec<DegreeEstimate>,
    pub corollary: CorollaryValues,
    pub block_checks: Vec<BlockDetReport>,
}

fn agreed(estimates: &[DegreeEstimate]) -> bool {
    estimates.iter().all(|e| e.value == estimates[0].value)
}

impl VerificationReport {
    pub fn ind_value(&self) -> i64 {
        self.ind[0].value
    }

    pub fn ind_p_value(&self) -> i64 {
        self.ind_p[0].value
    }

    pub fn theorem_rhs(&self) -> i64 {
        2 * self.ind_value() - 2 * self.ind_p_value()
    }

    pub fn methods_agree(&self) -> bool {
        agreed(&self.ind) && agreed(&self.ind_p)
    }

    pub fn pass(&self) -> bool {
        self.general_position.pass() && self.methods_agree() && self.n_lines == self.theorem_rhs()
    }

    pub fn max_block_residual(&self) -> f64 {
        self.block_checks
            .iter()
            .map(|b| b.relative_residual)
            .fold(0.0, f64::max)
    }

    pub fn block_signs_agree(&self) -> bool {
        self.block_checks.iter().all(|b| b.sign_agrees)
    }

    pub fn block(&self) -> ReportBlock {
        let mut b = ReportBlock::default();
        b.push("scenario", &self.scenario);
        b.push("n", self.n);
        b.push_floats("p", &self.p);
        b.push("method", method_name(self.method));
        b.push("lines", self.records.len());
        for (i, r) in self.records.iter().enumerate() {
            b.push(format!("line.{i}.branch"), r.branch);
            b.push(format!("line.{i}.chart"), r.source.chart);
            b.push_floats(format!("line.{i}.u"), &r.source.u);
            b.push_floats(format!("line.{i}.q"), r.q.as_slice());
            b.push(format!("line.{i}.epsilon"), r.epsilon);
            b.push_float(format!("line.{i}.det"), r.det_value);
            b.push_float(format!("line.{i}.residual"), r.residual);
        }
        b.push("N_lines", self.n_lines);
        for (key, estimates) in [("ind", &self.ind), ("ind_p", &self.ind_p)] {
            b.push(key, estimates[0].value);
            for e in estimates {
                b.push(format!("{key}.{}", e.method), e.value);
                b.push_float(format!("{key}.{}.raw", e.method), e.raw);
                b.push_float(format!("{key}.{}.residual", e.method), e.residual);
                if let Some(v) = &e.regular_value {
                    b.push_floats(format!("{key}.{}.regular_value", e.method), v.as_slice());
                }
            }
        }
        b.push("theorem_lhs", self.n_lines);
        b.push("theorem_rhs", self.theorem_rhs());
        b.push_float("corollary.literal", self.corollary.literal);
        b.push_float("corollary.theorem", self.corollary.theorem);
        let gp = &self.general_position;
        b.push(
            "gp.condition1",
            match &gp.condition1 {
                SelfIntersectionCheck::Skipped => "skipped".to_string(),
                SelfIntersectionCheck::Unsupported => "unchecked".to_string(),
                SelfIntersectionCheck::Sampled { crossings } => format!(
                    "{} {}",
                    if gp.condition1_ok() { "pass" } else { "fail" },
                    crossings.len()
                ),
            },
        );
        b.push("gp.condition2", if gp.condition2_ok() { "pass" } else { "fail" });
        b.push("gp.condition3", if gp.condition3_ok() { "pass" } else { "fail" });
        if let Some(d) = gp.min_abs_det {
            b.push_float("gp.min_abs_det", d);
        }
        b.push_float("block_det.max_residual", self.max_block_residual());
        b.push("block_det.signs_agree", self.block_signs_agree());
        b.push("methods_agree", self.methods_agree());
        b.push("pass", self.pass());
        b
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let p = self.p.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "scenario {} (n = {}), p = ({p})", self.scenario, self.n);
        let _ = writeln!(s, "isotropic lines: {}", self.records.len());
        if !self.records.is_empty() {
            s.push_str(&format_records(&self.records, OutputFormat::Table));
        }
        let _ = writeln!(s, "general position: {}", self.general_position);
        for (label, estimates) in [("ind", &self.ind), ("ind_p", &self.ind_p)] {
            let parts: Vec<String> = estimates
                .iter()
                .map(|e| match e.method {
                    isoline::degree::DegreeMethod::Quadrature => {
                        format!("{} {} (raw {:.6}, residual {:.1e})", e.method, e.value, e.raw, e.residual)
                    }
                    _ => format!("{} {} ({} points)", e.method, e.value, e.count),
                })
                .collect();
            let _ = writeln!(s, "{label} = {}  [{}]", estimates[0].value, parts.join("; "));
        }
        let _ = writeln!(
            s,
            "N = {}, 2 ind - 2 ind_p = {}: {}",
            self.n_lines,
            self.theorem_rhs(),
            if self.n_lines == self.theorem_rhs() { "equal" } else { "MISMATCH" }
        );
        let _ = writeln!(
            s,
            "corollary integral: theorem form {:.6}, literal form {:.6}",
            self.corollary.theorem, self.corollary.literal
        );
        if !self.block_checks.is_empty() {
            let _ = writeln!(
                s,
                "block determinant: max relative residual {:.1e}, signs {}",
                self.max_block_residual(),
                if self.block_signs_agree() { "agree" } else { "DISAGREE" }
            );
        }
        if !self.methods_agree() {
            s.push_str("degree methods DISAGREE\n");
        }
        let _ = writeln!(s, "result: {}", if self.pass() { "PASS" } else { "FAIL" });
        s
    }
}

/// One tangency per line: branch, chart, u, q, ε, det, residual.
pub fn format_records(records: &[TangencyRecord], format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Table => {
            out.push_str("# branch chart u q epsilon det residual\n");
            for r in records {
                let u = r.source.u.iter().map(|x| format!("{x:>10.6}")).collect::<Vec<_>>().join(" ");
                let q = r.q.iter().map(|x| format!("{x:>10.6}")).collect::<Vec<_>>().join(" ");
                let _ = writeln!(
                    out,
                    "{:>+2} {:>2} {u}  {q}  {:>+2} {:>13.6e} {:>9.2e}",
                    r.branch, r.source.chart, r.epsilon, r.det_value, r.residual
                );
            }
        }
        OutputFormat::Records => {
            for r in records {
                let _ = writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    r.branch,
                    r.source.chart,
                    fmt_floats(&r.source.u),
                    fmt_floats(r.q.as_slice()),
                    r.epsilon,
                    fmt_float(r.det_value),
                    fmt_float(r.residual)
                );
            }
        }
    }
    out
}
