//! One checked inequality instance.

use std::fmt;

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub estimate_id: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs`; 0 for degenerate `0/0` instances.
    pub ratio: f64,
    /// The constant the instance certifies (the ratio, unless the check
    /// divides out a known factor first).
    pub empirical_constant: f64,
    pub cap: f64,
    pub pass: bool,
    /// Both sides exactly zero.
    pub degenerate: bool,
    pub inputs_digest: String,
}

impl EstimateReport {
    /// Report with no cap configured: passes whenever the ratio is finite.
    pub fn new(id: &str, lhs: f64, rhs: f64, digest: impl Into<String>) -> Self {
        let degenerate = lhs == 0.0 && rhs == 0.0;
        let ratio = if degenerate { 0.0 } else { lhs / rhs };
        Self {
            estimate_id: id.to_string(),
            lhs,
            rhs,
            ratio,
            empirical_constant: ratio,
            cap: f64::INFINITY,
            pass: ratio.is_finite(),
            degenerate,
            inputs_digest: digest.into(),
        }
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = cap;
        self.pass = self.empirical_constant.is_finite() && self.empirical_constant <= cap;
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.empirical_constant = c;
        self.pass = c.is_finite() && c <= self.cap;
        self
    }

    pub const HEADER: [&'static str; 9] =
        ["estimate_id", "lhs", "rhs", "ratio", "empirical_constant", "cap", "pass", "degenerate", "inputs_digest"];

    pub fn fields(&self) -> [String; 9] {
        [
            self.estimate_id.clone(),
            format!("{:e}", self.lhs),
            format!("{:e}", self.rhs),
            format!("{:e}", self.ratio),
            format!("{:e}", self.empirical_constant),
            format!("{:e}", self.cap),
            self.pass.to_string(),
            self.degenerate.to_string(),
            self.inputs_digest.clone(),
        ]
    }
}

impl fmt::Display for EstimateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<14} lhs={:<12.6e} rhs={:<12.6e} ratio={:<12.6e} cap={:<10.4e} {}{}",
            self.estimate_id,
            self.lhs,
            self.rhs,
            self.ratio,
            self.cap,
            if self.pass { "pass" } else { "FAIL" },
            if self.degenerate { " (0/0)" } else { "" }
        )
    }
}

/// `key=value` pairs joined with `;`, in the given order.
pub fn digest(parts: &[(&str, String)]) -> String {
    parts.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_and_capped() {
        let r = EstimateReport::new("x", 0.0, 0.0, "");
        assert!(r.degenerate && r.pass && r.ratio == 0.0);
        let r = EstimateReport::new("x", 1.0, 0.0, "");
        assert!(!r.pass);
        let r = EstimateReport::new("x", 2.0, 1.0, "").with_cap(1.5);
        assert!(!r.pass);
        let r = r.with_cap(2.0);
        assert!(r.pass);
        assert_eq!(digest(&[("seed", "3".into()), ("M", "16".into())]), "seed=3;M=16");
    }
}
