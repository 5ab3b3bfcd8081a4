//! Relations that hold exactly at every flow time, checked sample by sample
//! up to numerical precision.

use crate::exponents::{schmidt_estimate, WindowPolicy};
use crate::flow::{
    build_lattice, companion_parameters, local_minima_of_psi1, successive_minima, FlowSample,
    MinimaConfig, PathSpec, Side,
};
use crate::problem::ApproximationProblem;

use super::{Check, InequalityReport, Relation};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseConfig {
    pub epsilon: f64,
    /// Tail fraction for the Schmidt-estimate ratio check.
    pub tail: f64,
    /// Balanced local minima of ψ₁ (the latest ones) used for companion checks.
    pub companion_limit: usize,
    pub minima: MinimaConfig,
}

impl Default for PointwiseConfig {
    fn default() -> Self {
        Self { epsilon: 1e-9, tail: 0.5, companion_limit: 8, minima: MinimaConfig::default() }
    }
}

/// Worst instance of a check over many samples.
struct Worst {
    name: String,
    upper: bool,
    best: Option<(f64, f64, f64, f64)>,
    count: usize,
}

impl Worst {
    /// `upper`: the relation is lhs ≤ rhs, otherwise lhs ≥ rhs.
    fn new(name: impl Into<String>, upper: bool) -> Self {
        Self { name: name.into(), upper, best: None, count: 0 }
    }

    fn add(&mut self, s: f64, lhs: f64, rhs: f64) {
        let margin = if self.upper { rhs - lhs } else { lhs - rhs };
        self.count += 1;
        let worse = match self.best {
            None => true,
            Some((m, ..)) => margin < m || margin.is_nan(),
        };
        if worse {
            self.best = Some((margin, lhs, rhs, s));
        }
    }

    fn check(self) -> Check {
        let rel = if self.upper {
            Relation::Le { ceiling: f64::INFINITY }
        } else {
            Relation::Ge { floor: f64::NEG_INFINITY }
        };
        match self.best {
            Some((_, lhs, rhs, s)) => Check::new(self.name, lhs, rel, rhs)
                .note(format!("worst of {} at s = {s}", self.count)),
            None => Check::new(self.name, f64::NAN, rel, f64::NAN).guard(false, "no instances"),
        }
    }
}

/// Pointwise checks on the trace of `problem` (pass ᵗΘ with `transposed`
/// for the dual trace). `solution_rank` enables the growth trend check when
/// it is zero. Failures of auxiliary computations are returned as messages.
pub fn pointwise_suite(
    problem: &ApproximationProblem,
    trace: &[FlowSample],
    transposed: bool,
    solution_rank: usize,
    cfg: &PointwiseConfig,
) -> (Vec<InequalityReport>, Vec<String>) {
    let (n, m, d) = (problem.n(), problem.m(), problem.d());
    let mut errors = Vec::new();
    let mut out: Vec<(&str, Check)> = Vec::new();
    let ln_fact: f64 = (2..=d).map(|k| (k as f64).ln()).sum();

    let mut order = Worst::new("lambda_order", false);
    let mut mink_up = Worst::new("minkowski_product_upper", true);
    let mut mink_lo = Worst::new("minkowski_product_lower", true);
    let mut sandwich: Vec<(Worst, Worst)> = (1..d - 1)
        .map(|p| {
            (
                Worst::new(format!("partial_sum_sandwich_lower_{p}"), true),
                Worst::new(format!("partial_sum_sandwich_upper_{p}"), true),
            )
        })
        .collect();
    let mut first_lo = Worst::new("first_minimum_sandwich_lower", true);
    let mut first_hi = Worst::new("first_minimum_sandwich_upper", true);
    let mut growth = Worst::new("first_minimum_growth", false);

    let growth_of = |x: &FlowSample| x.s + x.lambdas[0].ln();
    for (k, x) in trace.iter().enumerate() {
        let s = x.s;
        for i in 1..x.d() {
            order.add(s, x.lambdas[i].ln(), x.lambdas[i - 1].ln());
        }
        let psi_d = x.big_psi(d);
        mink_up.add(s, psi_d, 0.0);
        mink_lo.add(s, -psi_d, ln_fact / s);
        for (idx, (lo, hi)) in sandwich.iter_mut().enumerate() {
            let p = idx + 1;
            let (a, b) = (x.big_psi(p), x.big_psi(p + 1));
            lo.add(s, (p + 1) as f64 / p as f64 * a, b);
            hi.add(s, b, (d - p - 1) as f64 / (d - p) as f64 * a);
        }
        let psi2 = x.big_psi(2);
        first_lo.add(s, (d - 1) as f64 / (d - 2) as f64 * psi2, x.psis[0]);
        first_hi.add(s, x.psis[0], psi2 / 2.0);
        if k > 0 {
            growth.add(s, growth_of(x), growth_of(&trace[k - 1]));
        }
    }
    out.push(("lambda_order", order.check()));
    out.push(("minkowski_product", mink_up.check()));
    out.push(("minkowski_product", mink_lo.check()));
    for (lo, hi) in sandwich {
        out.push(("partial_sum_sandwich", lo.check()));
        out.push(("partial_sum_sandwich", hi.check()));
    }
    out.push(("first_minimum_sandwich", first_lo.check()));
    out.push(("first_minimum_sandwich", first_hi.check()));
    out.push(("first_minimum_growth", growth.check()));

    // Without integer solutions s(1 + ψ₁(s)) tends to infinity; over the tail
    // it must not have decreased.
    if solution_rank == 0 && trace.len() >= 2 {
        let last = trace.last().expect("nonempty");
        let cut = last.s - cfg.tail * (last.s - trace[0].s);
        if let Some(first) = trace.iter().find(|x| x.s >= cut) {
            let (a, b) = (growth_of(first), growth_of(last));
            let mut c = Check::new("first_minimum_growth_tail", b, Relation::Ge { floor: f64::NEG_INFINITY }, a);
            if b == a {
                c = c.note("flat over the tail");
            }
            out.push(("first_minimum_growth", c));
        }
    }

    // Ratios of Schmidt estimates over the same tail window.
    let policy = WindowPolicy::Tail(cfg.tail);
    for p in 1..d - 1 {
        match (schmidt_estimate(trace, p, n, m, policy), schmidt_estimate(trace, p + 1, n, m, policy)) {
            (Ok(a), Ok(b)) => {
                let (ka, kb) = ((d - p) as f64, (d - p - 1) as f64);
                let rel = Relation::Le { ceiling: f64::INFINITY };
                out.push(("tail_ratio", Check::new(format!("tail_ratio_lower_{p}"), b.lower / kb, rel, a.lower / ka)));
                out.push(("tail_ratio", Check::new(format!("tail_ratio_upper_{p}"), b.upper / kb, rel, a.upper / ka)));
            }
            (Err(e), _) | (_, Err(e)) => errors.push(format!("tail ratio p = {p}: {e}")),
        }
    }

    companion_checks(problem, trace, cfg, &mut out, &mut errors);

    let reports = out
        .into_iter()
        .map(|(family, c)| c.judge(family, transposed, cfg.epsilon))
        .collect();
    (reports, errors)
}

/// ψ₂(s) against the companion bounds at balanced local minima of ψ₁.
fn companion_checks(
    problem: &ApproximationProblem,
    trace: &[FlowSample],
    cfg: &PointwiseConfig,
    out: &mut Vec<(&'static str, Check)>,
    errors: &mut Vec<String>,
) {
    let (n, m, d) = (problem.n() as f64, problem.m() as f64, problem.d() as f64);
    let mut shrink = Worst::new("companion_bound_shrink", true);
    let mut grow = Worst::new("companion_bound_grow", true);
    let mut shrink_skipped = 0;
    let minima = match local_minima_of_psi1(problem, trace, &cfg.minima) {
        Ok(v) => v,
        Err(e) => {
            errors.push(format!("local minima of ψ₁: {e}"));
            Vec::new()
        }
    };
    let balanced: Vec<_> = minima.into_iter().filter(|x| x.balanced).collect();
    let chosen = &balanced[balanced.len().saturating_sub(cfg.companion_limit)..];
    let lattice = build_lattice(problem, false);
    let path = PathSpec::standard(problem.n(), problem.m());
    for lm in chosen {
        let s = lm.s;
        let psi2 = match path.box_shape(s).and_then(|b| successive_minima(&lattice, &b, &cfg.minima)) {
            Ok(mm) => mm.lambdas[1].ln() / s,
            Err(e) => {
                errors.push(format!("companion check at s = {s}: {e}"));
                continue;
            }
        };
        for side in [Side::Shrink, Side::Grow] {
            let pair = match companion_parameters(problem, s, side, &cfg.minima) {
                Ok(p) => p,
                Err(e) => {
                    errors.push(format!("companion {side:?} at s = {s}: {e}"));
                    continue;
                }
            };
            let psi1 = pair.lambda.ln() / s;
            let other = pair.lambda_companion.ln() / pair.s_companion;
            match side {
                Side::Shrink => {
                    if (other + 1.0).abs() <= 1e-12 {
                        shrink_skipped += 1;
                        continue;
                    }
                    shrink.add(s, psi2, psi1 + d * (other - psi1) / (n + n * other));
                }
                Side::Grow => grow.add(s, psi2, psi1 + d * (other - psi1) / (m - n * other)),
            }
        }
    }
    let mut c = shrink.check();
    if shrink_skipped > 0 {
        c = c.note(format!("{shrink_skipped} pairs with ψ₁(s′) = −1 skipped"));
    }
    out.push(("companion_bound", c));
    out.push(("companion_bound", grow.check()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{psi_profile, uniform_grid, ProfileConfig};
    use crate::fixtures::{generate, FixtureSpec};
    use crate::harness::Verdict;

    fn trace(p: &ApproximationProblem, s_max: f64) -> Vec<FlowSample> {
        let grid = uniform_grid(0.05, s_max).unwrap();
        psi_profile(p, &PathSpec::standard(p.n(), p.m()), &grid, &ProfileConfig::default()).unwrap()
    }

    #[test]
    fn zero_matrix_constants() {
        let p = ApproximationProblem::zero(2, 1).unwrap();
        let (reports, _) = pointwise_suite(&p, &trace(&p, 5.0), false, 1, &PointwiseConfig::default());
        let get = |name: &str| reports.iter().find(|r| r.name == name).unwrap();
        let lo = get("first_minimum_sandwich_lower");
        assert!((lo.lhs + 1.0).abs() < 1e-12 && (lo.rhs + 1.0).abs() < 1e-12);
        let hi = get("first_minimum_sandwich_upper");
        assert!((hi.rhs + 0.25).abs() < 1e-12);
        for r in &reports {
            assert!(!matches!(r.verdict, Verdict::Violated | Verdict::ViolatedWithinTolerance), "{r:?}");
        }
    }

    #[test]
    fn random_trace_passes_and_finds_companions() {
        let p = generate(&FixtureSpec::random(2, 1, 1)).unwrap();
        let (reports, errors) = pointwise_suite(&p, &trace(&p, 12.0), false, 0, &PointwiseConfig::default());
        assert!(errors.is_empty(), "{errors:?}");
        for r in &reports {
            assert!(!matches!(r.verdict, Verdict::Violated | Verdict::ViolatedWithinTolerance), "{r:?}");
        }
        let grow = reports.iter().find(|r| r.name == "companion_bound_grow").unwrap();
        assert_eq!(grow.verdict, Verdict::Holds, "{grow:?}");
    }

    #[test]
    fn corrupted_order_is_flagged() {
        let p = generate(&FixtureSpec::random(2, 1, 2)).unwrap();
        let mut tr = trace(&p, 4.0);
        tr[10].lambdas[0] = 2.0 * tr[10].lambdas[1];
        let (reports, _) = pointwise_suite(&p, &tr, false, 0, &PointwiseConfig::default());
        assert_eq!(reports[0].name, "lambda_order");
        assert_eq!(reports[0].verdict, Verdict::Violated);
    }
}
