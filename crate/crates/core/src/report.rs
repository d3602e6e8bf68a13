//! Records shared by the verification reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Passes when `residual <= tolerance` (residual is a distance).
    Identity,
    /// Passes when `residual >= -tolerance` (residual is `lhs - rhs`).
    Inequality,
}

/// One checked identity or inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub kind: CheckKind,
    pub parameters: BTreeMap<String, f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckRecord {
    pub fn new(
        name: &str,
        kind: CheckKind,
        parameters: BTreeMap<String, f64>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        let passed = match kind {
            CheckKind::Identity => residual <= tolerance,
            CheckKind::Inequality => residual >= -tolerance,
        };
        Self {
            name: name.to_string(),
            kind,
            parameters,
            residual,
            tolerance,
            passed,
        }
    }
}

/// Rounds to 15 significant digits, so that printed reports do not depend on
/// the last bits of a computation.
pub fn sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

/// [`sig15`] as text: plain decimals for magnitudes in `[1e-4, 1e15)`,
/// exponent form otherwise.
pub fn fmt_sig15(x: f64) -> String {
    let r = sig15(x);
    if r == 0.0 || !r.is_finite() || (1e-4..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(sig15(0.1 + 0.2), 0.3);
        assert_eq!(sig15(1.0 / 3.0), 0.333333333333333);
        assert_eq!(sig15(-1234.5678901234567), -1234.56789012346);
        assert_eq!(sig15(0.0), 0.0);
    }

    #[test]
    fn text_form() {
        assert_eq!(fmt_sig15(1.0 / 3.0), "0.333333333333333");
        assert_eq!(fmt_sig15(2.0), "2");
        assert_eq!(fmt_sig15(9.278347916628971e-16), "9.27834791662897e-16");
        assert_eq!(fmt_sig15(-1e20), "-1e20");
        assert_eq!(fmt_sig15(1e-4), "0.0001");
    }

    #[test]
    fn pass_conventions() {
        let p = BTreeMap::new();
        assert!(CheckRecord::new("a", CheckKind::Identity, p.clone(), 1e-9, 1e-8).passed);
        assert!(!CheckRecord::new("a", CheckKind::Identity, p.clone(), 1e-7, 1e-8).passed);
        assert!(CheckRecord::new("a", CheckKind::Inequality, p.clone(), -1e-9, 1e-8).passed);
        assert!(!CheckRecord::new("a", CheckKind::Inequality, p, -1e-7, 1e-8).passed);
    }
}
