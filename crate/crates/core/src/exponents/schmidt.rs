//! Schmidt exponents from a flow trace and the route to β_p, α_p.

use crate::error::{Error, Result};
use crate::flow::FlowSample;
use crate::problem::ApproximationProblem;

use super::{diophantine_from_schmidt, kappa, Diagnostics, ExponentReport, Method};

/// Which samples count as the tail of a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowPolicy {
    /// The last `fraction` of the covered s-range (default one half).
    Tail(f64),
    /// An explicit closed s-range.
    Range(f64, f64),
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy::Tail(0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtEstimate {
    pub p: usize,
    pub lower: f64,
    pub upper: f64,
    pub window: [f64; 2],
    pub samples: usize,
    pub clamped: bool,
    /// Index of the sample attaining the lower value.
    pub argmin: usize,
    pub argmax: usize,
}

fn tail_range(trace: &[FlowSample], policy: WindowPolicy) -> Result<(f64, f64)> {
    let (first, last) = match (trace.first(), trace.last()) {
        (Some(a), Some(b)) if trace.len() >= 2 => (a.s, b.s),
        _ => return Err(Error::TraceTooShort(format!("{} samples", trace.len()))),
    };
    match policy {
        WindowPolicy::Tail(f) => {
            if last < 2.0 * first {
                return Err(Error::TraceTooShort(format!(
                    "trace covers [{first}, {last}], need s_max ≥ 2·s_min"
                )));
            }
            let f = f.clamp(0.0, 1.0);
            Ok((last - f * (last - first), last))
        }
        WindowPolicy::Range(a, b) => {
            if !(a <= b) || b < first || a > last {
                return Err(Error::TraceTooShort(format!(
                    "window [{a}, {b}] does not meet trace [{first}, {last}]"
                )));
            }
            Ok((a, b))
        }
    }
}

/// (Ψ̄_p, Ψ̂_p) as the min and max of Ψ_p over the tail window, clamped to
/// [−κ_p, 0]. `n`, `m` give the shape the trace belongs to.
pub fn schmidt_estimate(
    trace: &[FlowSample],
    p: usize,
    n: usize,
    m: usize,
    policy: WindowPolicy,
) -> Result<SchmidtEstimate> {
    let d = n + m;
    if p == 0 || p > d {
        return Err(Error::OutOfRange(format!("grade {p} outside 1..={d}")));
    }
    let (lo, hi) = tail_range(trace, policy)?;
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let (mut argmin, mut argmax) = (0, 0);
    let mut samples = 0;
    let mut window = [f64::INFINITY, f64::NEG_INFINITY];
    for (i, x) in trace.iter().enumerate() {
        if x.s < lo - 1e-12 || x.s > hi + 1e-12 {
            continue;
        }
        if x.d() != d {
            return Err(Error::Incompatible(format!("sample of dimension {} in a d = {d} trace", x.d())));
        }
        samples += 1;
        window[0] = window[0].min(x.s);
        window[1] = window[1].max(x.s);
        let v = x.big_psi(p);
        if v < lower {
            lower = v;
            argmin = i;
        }
        if v > upper {
            upper = v;
            argmax = i;
        }
    }
    if samples < 2 {
        return Err(Error::TraceTooShort(format!("{samples} samples in the window [{lo}, {hi}]")));
    }
    let k = if p == d { 0.0 } else { kappa(p, n, m) };
    let mut clamped = false;
    let mut clamp = |v: f64| {
        let c = v.clamp(-k, 0.0);
        if c != v {
            clamped = true;
        }
        // Round-off of an exact limit, e.g. ln(e^{−s})/s for Θ = 0.
        if (c + k).abs() <= 1e-9 {
            -k
        } else if c.abs() <= 1e-15 {
            0.0
        } else {
            c
        }
    };
    let (lower, upper) = (clamp(lower), clamp(upper));
    Ok(SchmidtEstimate { p, lower, upper, window, samples, clamped, argmin, argmax })
}

/// True when Θ is exactly rational and the last sample already exhibits m
/// independent exact integer solutions of Θx = y among its witnesses. Then
/// λ_1..λ_m decay like e^{−s} and λ_{m+1}..λ_d grow like e^{ms/n}, so every
/// Ψ_p tends to −κ_p.
pub fn rational_limit_reached(problem: &ApproximationProblem, trace: &[FlowSample]) -> bool {
    if !problem.all_exact() {
        return false;
    }
    let Some(last) = trace.last() else { return false };
    let m = problem.m();
    let exact = last
        .witnesses
        .iter()
        .take(m)
        .filter(|z| z[..m].iter().any(|v| v != &0.into()) && problem.solves_exactly(z))
        .count();
    exact == m
}

/// Schmidt-route reports for p = 1..d−1 of the trace of `problem`.
pub fn schmidt_reports(
    problem: &ApproximationProblem,
    trace: &[FlowSample],
    policy: WindowPolicy,
    transposed: bool,
) -> Result<Vec<ExponentReport>> {
    let (n, m, d) = (problem.n(), problem.m(), problem.d());
    let snapped = rational_limit_reached(problem, trace);
    // Any exact solution witnesses the infinite exponents of every grade.
    let witness = if snapped {
        trace.last().and_then(|x| x.witnesses.first().cloned())
    } else {
        None
    };
    (1..d)
        .map(|p| {
            let est = schmidt_estimate(trace, p, n, m, policy)?;
            let k = kappa(p, n, m);
            let (lower, upper) = if snapped { (-k, -k) } else { (est.lower, est.upper) };
            let (beta, alpha) = diophantine_from_schmidt(p, lower, upper, n, m)?;
            Ok(ExponentReport {
                p,
                method: Method::SchmidtRoute,
                transposed,
                beta,
                alpha,
                psi_lower: lower,
                psi_upper: upper,
                window: est.window,
                diagnostics: Diagnostics {
                    oscillation: est.upper - est.lower,
                    samples: est.samples,
                    clamped: est.clamped,
                    snapped,
                    witness: witness.clone(),
                    ..Default::default()
                },
            })
        })
        .collect()
}

/// The t-range matching the s-window of a trace at grade p: along the flow
/// the grade-p system with threshold t = exp(s(κ_p + Ψ_p(s))) is solved by
/// the wedge of the first p witnesses.
pub fn matched_t_window(trace: &[FlowSample], p: usize, n: usize, m: usize, window: [f64; 2]) -> [f64; 2] {
    let k = kappa(p, n, m);
    let t_at = |s: f64| {
        let x = trace
            .iter()
            .min_by(|a, b| (a.s - s).abs().total_cmp(&(b.s - s).abs()))
            .expect("nonempty trace");
        (x.s * (k + x.big_psi(p))).exp()
    };
    [t_at(window[0]), t_at(window[1])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::ints;

    fn sample(s: f64, lambdas: [f64; 3]) -> FlowSample {
        let psis: Vec<f64> = lambdas.iter().map(|l| l.ln() / s).collect();
        let big_psis = psis.iter().scan(0.0, |a, v| {
            *a += v;
            Some(*a)
        });
        FlowSample {
            s,
            lambdas: lambdas.to_vec(),
            witnesses: vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])],
            psis: psis.clone(),
            big_psis: big_psis.collect(),
            exact_lambdas: None,
        }
    }

    fn zero_trace() -> Vec<FlowSample> {
        (1..=40)
            .map(|k| {
                let s = k as f64 * 0.5;
                sample(s, [(-s).exp(), (s / 2.0).exp(), (s / 2.0).exp()])
            })
            .collect()
    }

    #[test]
    fn zero_matrix_estimates() {
        let tr = zero_trace();
        let e = schmidt_estimate(&tr, 1, 2, 1, WindowPolicy::default()).unwrap();
        assert_eq!((e.lower, e.upper), (-1.0, -1.0));
        assert_eq!(e.window, [10.5, 20.0]);
        let p = ApproximationProblem::zero(2, 1).unwrap();
        let reports = schmidt_reports(&p, &tr, WindowPolicy::default(), false).unwrap();
        assert!(reports.iter().all(|r| r.beta == f64::INFINITY && r.alpha == f64::INFINITY));
    }

    #[test]
    fn short_traces_are_rejected() {
        let tr = zero_trace();
        assert!(schmidt_estimate(&tr[25..], 1, 2, 1, WindowPolicy::default()).is_err());
        assert!(schmidt_estimate(&tr[..1], 1, 2, 1, WindowPolicy::default()).is_err());
        assert!(schmidt_estimate(&tr, 1, 2, 1, WindowPolicy::Range(30.0, 40.0)).is_err());
    }

    #[test]
    fn lower_never_exceeds_upper() {
        let tr: Vec<FlowSample> = (1..=40)
            .map(|k| {
                let s = k as f64 * 0.5;
                let w = (0.3 * s).sin() * 0.1;
                sample(s, [(w * s).exp(), 1.0, (-w * s).exp()])
            })
            .collect();
        for p in 1..3 {
            let e = schmidt_estimate(&tr, p, 2, 1, WindowPolicy::default()).unwrap();
            assert!(e.lower <= e.upper);
        }
    }
}
