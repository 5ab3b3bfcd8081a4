//! Numerical verification of the transference inequalities on exponent
//! estimates and of the exact pointwise relations on flow traces.

mod pointwise;
mod registry;
mod solution;
mod suite;

use serde::{Deserialize, Serialize};

use crate::numeric::ext_f64;

pub use pointwise::{pointwise_suite, PointwiseConfig};
pub use registry::{chain_lower_bound, evaluate_inequality, ExponentTable, REGISTRY};
pub use solution::{check_hypothesis_solution_space, SolutionSpace};
pub use suite::{run_suite, FlowInfo, ReportBundle, SuiteConfig};

/// Margins at or above −this count as exact agreement.
pub const NUMERIC_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    ViolatedWithinTolerance,
    Violated,
    Vacuous,
    HypothesisFailed,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::ViolatedWithinTolerance => "violated-within-tolerance",
            Verdict::Violated => "violated",
            Verdict::Vacuous => "vacuous",
            Verdict::HypothesisFailed => "hypothesis-failed",
        }
    }
}

/// One evaluated instance of a registry inequality or a pointwise check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    /// Registry entry the instance belongs to.
    pub family: String,
    /// The instance, e.g. `grade_chain_beta_2`.
    pub name: String,
    /// Evaluated on the exponents (or trace) of ᵗΘ.
    pub transposed: bool,
    #[serde(with = "ext_f64")]
    pub lhs: f64,
    #[serde(with = "ext_f64")]
    pub rhs: f64,
    /// Signed so that a negative margin means the relation fails.
    #[serde(with = "ext_f64")]
    pub margin: f64,
    pub tolerance: f64,
    pub hypothesis_ok: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Relation {
    /// lhs ≥ rhs; `floor` is the trivial lower bound of lhs.
    Ge { floor: f64 },
    /// lhs ≤ rhs; `ceiling` is the trivial upper bound of lhs.
    Le { ceiling: f64 },
    Eq,
}

/// An inequality instance before judgement.
#[derive(Debug, Clone)]
pub(crate) struct Check {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub relation: Relation,
    /// Case guard: `Some(reason)` when the branch does not apply.
    pub guard_failed: Option<String>,
    pub hypothesis_ok: bool,
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>, lhs: f64, relation: Relation, rhs: f64) -> Self {
        Self { name: name.into(), lhs, rhs, relation, guard_failed: None, hypothesis_ok: true, note: None }
    }

    pub fn guard(mut self, holds: bool, reason: &str) -> Self {
        if !holds && self.guard_failed.is_none() {
            self.guard_failed = Some(reason.to_string());
        }
        self
    }

    pub fn hypothesis(mut self, ok: bool) -> Self {
        self.hypothesis_ok = ok;
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn judge(self, family: &str, transposed: bool, tolerance: f64) -> InequalityReport {
        let margin = match self.relation {
            Relation::Ge { .. } => ext_sub(self.lhs, self.rhs),
            Relation::Le { .. } => ext_sub(self.rhs, self.lhs),
            Relation::Eq => -ext_sub(self.lhs, self.rhs).abs(),
        };
        let mut note = self.note;
        let verdict = if !self.hypothesis_ok {
            Verdict::HypothesisFailed
        } else if let Some(reason) = self.guard_failed {
            note = Some(reason);
            Verdict::Vacuous
        } else if self.lhs.is_nan() || self.rhs.is_nan() || margin.is_nan() {
            note = Some("indeterminate form in extended reals".into());
            Verdict::Vacuous
        } else if match self.relation {
            Relation::Ge { floor } => self.rhs < floor - NUMERIC_SLACK,
            Relation::Le { ceiling } => self.rhs > ceiling + NUMERIC_SLACK,
            Relation::Eq => false,
        } {
            note.get_or_insert_with(|| "bound is weaker than the trivial one".into());
            Verdict::Vacuous
        } else if margin >= -NUMERIC_SLACK {
            Verdict::Holds
        } else if margin >= -tolerance {
            Verdict::ViolatedWithinTolerance
        } else {
            Verdict::Violated
        };
        InequalityReport {
            family: family.to_string(),
            name: self.name,
            transposed,
            lhs: self.lhs,
            rhs: self.rhs,
            margin,
            tolerance,
            hypothesis_ok: self.hypothesis_ok,
            verdict,
            note,
        }
    }
}

/// a − b with ∞ − ∞ = 0 (both sides equal in the extended reals).
pub(crate) fn ext_sub(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        a - b
    }
}

/// 1/x with 1/∞ = 0 and 1/0 = ∞.
pub(crate) fn inv(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ge(lhs: f64, rhs: f64) -> InequalityReport {
        Check::new("x", lhs, Relation::Ge { floor: 0.0 }, rhs).judge("x", false, 0.05)
    }

    #[test]
    fn verdict_follows_margin() {
        assert_eq!(ge(1.0, 0.5).verdict, Verdict::Holds);
        assert_eq!(ge(1.0, 1.0 + 1e-12).verdict, Verdict::Holds);
        assert_eq!(ge(1.0, 1.03).verdict, Verdict::ViolatedWithinTolerance);
        assert_eq!(ge(1.0, 1.2).verdict, Verdict::Violated);
        assert_eq!(ge(1.0, -0.5).verdict, Verdict::Vacuous);
        assert_eq!(ge(f64::INFINITY, f64::INFINITY).margin, 0.0);
        assert_eq!(ge(2.0, f64::INFINITY).verdict, Verdict::Violated);
        assert_eq!(ge(f64::NAN, 1.0).verdict, Verdict::Vacuous);
    }

    #[test]
    fn hypothesis_and_guard_take_precedence() {
        let c = Check::new("x", 0.0, Relation::Ge { floor: 0.0 }, 5.0);
        let r = c.clone().hypothesis(false).judge("x", false, 0.05);
        assert_eq!(r.verdict, Verdict::HypothesisFailed);
        let r = c.guard(false, "case does not apply").judge("x", false, 0.05);
        assert_eq!(r.verdict, Verdict::Vacuous);
        assert_eq!(r.note.as_deref(), Some("case does not apply"));
    }

    #[test]
    fn equality_margin_is_minus_distance() {
        let r = Check::new("x", 1.02, Relation::Eq, 1.0).judge("x", false, 0.05);
        assert!((r.margin + 0.02).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::ViolatedWithinTolerance);
    }

    #[test]
    fn upper_bounds_at_or_above_ceiling_are_vacuous() {
        let c = |rhs| Check::new("x", -0.3, Relation::Le { ceiling: 0.0 }, rhs).judge("x", false, 0.05);
        assert_eq!(c(0.0).verdict, Verdict::Holds);
        assert_eq!(c(0.2).verdict, Verdict::Vacuous);
        assert_eq!(c(-0.5).verdict, Verdict::Violated);
    }
}
