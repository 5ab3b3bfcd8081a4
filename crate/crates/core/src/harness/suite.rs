//! Flow, exponents and every check for one matrix and its transpose.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{
    classical_estimate, direct_grade_p_estimate, duality_reports, log_grid, schmidt_reports,
    ClassicalConfig, DirectConfig, DualityEntry, ExponentReport, WindowPolicy,
};
use crate::flow::{psi_profile, uniform_grid, FlowSample, MinimaConfig, PathSpec, ProfileConfig};
use crate::problem::ApproximationProblem;

use super::pointwise::{pointwise_suite, PointwiseConfig};
use super::registry::{evaluate_inequality, ExponentTable, REGISTRY};
use super::solution::{check_hypothesis_solution_space, SolutionSpace};
use super::{InequalityReport, Verdict};

/// For exactly rational Θ the flow stops at s = EXACT_FLOW_SPAN · n/d. By
/// then the exact solutions fill the first m minima, and the spread
/// λ_d/λ_1 ≈ e^{sd/n} approaches the range of the enumeration.
const EXACT_FLOW_SPAN: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub s_max: f64,
    pub s_step: f64,
    /// Tail fraction of every estimation window.
    pub tail: f64,
    /// τ for exponent-level inequalities.
    pub tolerance: f64,
    /// Precision of pointwise checks.
    pub epsilon: f64,
    pub classical: bool,
    /// Largest |x| of the classical search; by default 10^6, 10^4, 500, 100
    /// for m = 1, 2, 3, ≥ 4.
    pub t_max: Option<u64>,
    pub classical_points: usize,
    pub direct: bool,
    pub height: i64,
    pub companion_limit: usize,
    /// Also flow ᵗΘ and check it.
    pub transposed: bool,
    /// Restrict checks to these families (registry or pointwise).
    pub only: Option<Vec<String>>,
    /// Negative control: breaks λ₁ ≤ λ₂ in one sample before checking.
    pub corrupt_lambda_order: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            s_max: 25.0,
            s_step: 0.05,
            tail: 0.5,
            tolerance: 0.05,
            epsilon: 1e-9,
            classical: true,
            t_max: None,
            classical_points: 200,
            direct: false,
            height: 2,
            companion_limit: 8,
            transposed: true,
            only: None,
            corrupt_lambda_order: false,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(what.to_string()));
        if !(self.s_step > 0.0) || !(self.s_max >= 2.0 * self.s_step) {
            return bad("need s_step > 0 and s_max ≥ 2·s_step");
        }
        if !(self.tail > 0.0 && self.tail <= 1.0) {
            return bad("tail must lie in (0, 1]");
        }
        if !(self.tolerance >= 0.0) || !(self.epsilon >= 0.0) {
            return bad("tolerances must be nonnegative");
        }
        if let Some(only) = &self.only {
            for name in only {
                if !REGISTRY.contains(&name.as_str()) && !POINTWISE.contains(&name.as_str()) {
                    return Err(Error::Config(format!("unknown check {name:?}")));
                }
            }
        }
        Ok(())
    }

    fn t_max_for(&self, m: usize) -> u64 {
        self.t_max.unwrap_or(match m {
            1 => 1_000_000,
            2 => 10_000,
            3 => 500,
            _ => 100,
        })
    }

    fn wants(&self, family: &str) -> bool {
        self.only.as_ref().map_or(true, |o| o.iter().any(|x| x == family))
    }

    fn wants_pointwise(&self) -> bool {
        POINTWISE.iter().any(|f| self.wants(f))
    }
}

/// Pointwise check families, in output order.
pub(crate) const POINTWISE: &[&str] = &[
    "lambda_order",
    "minkowski_product",
    "partial_sum_sandwich",
    "first_minimum_sandwich",
    "first_minimum_growth",
    "tail_ratio",
    "companion_bound",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowInfo {
    pub transposed: bool,
    pub samples: usize,
    pub s_max: f64,
    /// The horizon was shortened because Θ is exactly rational.
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub fixture: String,
    pub n: usize,
    pub m: usize,
    pub config: SuiteConfig,
    pub solution_space: SolutionSpace,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution_space_transposed: Option<SolutionSpace>,
    pub flows: Vec<FlowInfo>,
    pub exponents: Vec<ExponentReport>,
    pub duality: Vec<DualityEntry>,
    pub inequalities: Vec<InequalityReport>,
    pub errors: Vec<String>,
}

impl ReportBundle {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.inequalities.iter().filter(|r| r.verdict == verdict).count()
    }

    pub fn has_violations(&self) -> bool {
        self.count(Verdict::Violated) > 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

struct Side {
    problem: ApproximationProblem,
    transposed: bool,
    space: SolutionSpace,
    trace: Option<Vec<FlowSample>>,
    schmidt: Option<Vec<ExponentReport>>,
}

/// Runs the flow, the estimators and all checks for Θ (and ᵗΘ unless
/// disabled). Failures of individual steps are collected in `errors`; only
/// an invalid configuration is returned as an error.
pub fn run_suite(problem: &ApproximationProblem, fixture: &str, cfg: &SuiteConfig) -> Result<ReportBundle> {
    cfg.validate()?;
    let (n, m) = (problem.n(), problem.m());
    let mut errors = Vec::new();
    let mut flows = Vec::new();
    let mut exponents = Vec::new();
    let mut inequalities = Vec::new();

    let mut sides = vec![(problem.clone(), false)];
    if cfg.transposed {
        sides.push((problem.transpose(), true));
    }
    let mut done: Vec<Side> = Vec::new();
    for (p, transposed) in sides {
        let space = check_hypothesis_solution_space(&p)?;
        let tag = if transposed { "ᵗΘ" } else { "Θ" };
        let mut s_max = cfg.s_max;
        let mut capped = false;
        if p.all_exact() {
            let cap = EXACT_FLOW_SPAN * p.n() as f64 / p.d() as f64;
            if cap < s_max {
                s_max = cap;
                capped = true;
            }
        }
        let trace = uniform_grid(cfg.s_step, s_max)
            .and_then(|grid| psi_profile(&p, &PathSpec::standard(p.n(), p.m()), &grid, &ProfileConfig::default()));
        let trace = match trace {
            Ok(mut t) => {
                if cfg.corrupt_lambda_order && !transposed && !t.is_empty() {
                    let k = t.len() / 2;
                    t[k].lambdas[0] = 2.0 * t[k].lambdas[1];
                }
                flows.push(FlowInfo { transposed, samples: t.len(), s_max, capped });
                Some(t)
            }
            Err(e) => {
                errors.push(format!("{tag} flow: {e}"));
                None
            }
        };
        let policy = WindowPolicy::Tail(cfg.tail);
        let schmidt = trace.as_ref().and_then(|t| match schmidt_reports(&p, t, policy, transposed) {
            Ok(r) => Some(r),
            Err(e) => {
                errors.push(format!("{tag} Schmidt-route exponents: {e}"));
                None
            }
        });
        if let Some(r) = &schmidt {
            exponents.extend(r.iter().cloned());
        }
        if cfg.classical {
            let grid = log_grid(10, cfg.t_max_for(p.m()), cfg.classical_points);
            let ccfg = ClassicalConfig { tail: cfg.tail, ..Default::default() };
            match classical_estimate(&p, &grid, false, &ccfg) {
                Ok(est) => exponents.push(est.report(transposed)),
                Err(e) => errors.push(format!("{tag} classical exponents: {e}")),
            }
        }
        if cfg.direct {
            if let Some(t) = &trace {
                let dcfg = DirectConfig { height: cfg.height, tail: cfg.tail, ..Default::default() };
                let grid = direct_grid(t);
                for q in 1..p.d() {
                    match direct_grade_p_estimate(&p, q, &grid, t, &dcfg) {
                        Ok(est) => exponents.push(est.report(transposed)),
                        Err(e) => errors.push(format!("{tag} direct exponents p = {q}: {e}")),
                    }
                }
            }
        }
        done.push(Side { problem: p, transposed, space, trace, schmidt });
    }

    let duality = match (done.first().and_then(|s| s.schmidt.as_ref()), done.get(1).and_then(|s| s.schmidt.as_ref())) {
        (Some(a), Some(b)) => duality_reports(a, b, n, m).unwrap_or_else(|e| {
            errors.push(format!("duality: {e}"));
            Vec::new()
        }),
        _ => Vec::new(),
    };

    for side in &done {
        let tag = if side.transposed { "ᵗΘ" } else { "Θ" };
        if let Some(reports) = &side.schmidt {
            let table = ExponentTable::from_reports(reports, side.problem.n(), side.problem.m(), side.transposed)
                .with_rank(side.space.rank);
            for name in REGISTRY.iter().filter(|f| cfg.wants(f)) {
                match evaluate_inequality(name, &table, cfg.tolerance) {
                    Ok(r) => inequalities.extend(r),
                    Err(e) => errors.push(format!("{tag} {name}: {e}")),
                }
            }
        }
        if let (Some(trace), true) = (&side.trace, cfg.wants_pointwise()) {
            let pcfg = PointwiseConfig {
                epsilon: cfg.epsilon,
                tail: cfg.tail,
                companion_limit: cfg.companion_limit,
                minima: MinimaConfig::default(),
            };
            let (reports, errs) = pointwise_suite(&side.problem, trace, side.transposed, side.space.rank, &pcfg);
            inequalities.extend(reports.into_iter().filter(|r| cfg.wants(&r.family)));
            errors.extend(errs.into_iter().map(|e| format!("{tag} {e}")));
        }
    }

    let mut spaces = done.into_iter().map(|s| s.space);
    Ok(ReportBundle {
        fixture: fixture.to_string(),
        n,
        m,
        config: cfg.clone(),
        solution_space: spaces.next().expect("Θ side is always present"),
        solution_space_transposed: spaces.next(),
        flows,
        exponents,
        duality,
        inequalities,
        errors,
    })
}

/// Thresholds for the direct estimator spanning the t-range the trace can
/// certify at grade 1.
fn direct_grid(trace: &[FlowSample]) -> Vec<f64> {
    let hi = trace.last().map_or(1e3, |x| x.s.exp().clamp(20.0, 1e4));
    let (a, b) = (10f64.ln(), hi.ln());
    (0..40).map(|i| (a + (b - a) * i as f64 / 39.0).exp()).collect()
}
