use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, int_vecs, rational_ln};
use crate::problem::ApproximationProblem;

use super::minima::{integer_rank, minima_from, Minima, MinimaConfig};
use super::{BoxShape, PathSpec};

/// One point of the flow: the successive minima of B(s) and derived values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSample {
    pub s: f64,
    pub lambdas: Vec<f64>,
    /// Integer coordinates `(x, y)` of a witness for each λ_p.
    #[serde(with = "int_vecs")]
    pub witnesses: Vec<Vec<BigInt>>,
    /// ψ_p = ln(λ_p) / s.
    pub psis: Vec<f64>,
    /// Ψ_p = ψ_1 + … + ψ_p.
    #[serde(rename = "Psis")]
    pub big_psis: Vec<f64>,
    /// Exact minima as `"p/q"` strings, on the exact grid with rational Θ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_lambdas: Option<Vec<String>>,
}

impl FlowSample {
    pub(crate) fn from_minima(s: f64, minima: Minima) -> Self {
        let logs: Vec<f64> = match &minima.exact_lambdas {
            Some(ex) => ex.iter().map(rational_ln).collect(),
            None => minima.lambdas.iter().map(|l| l.ln()).collect(),
        };
        let psis: Vec<f64> = logs.iter().map(|l| l / s).collect();
        let mut acc = 0.0;
        let big_psis = logs
            .iter()
            .map(|l| {
                acc += l;
                acc / s
            })
            .collect();
        let exact_lambdas =
            minima.exact_lambdas.map(|v: Vec<BigRational>| v.iter().map(format_rational).collect());
        Self { s, lambdas: minima.lambdas, witnesses: minima.witnesses, psis, big_psis, exact_lambdas }
    }

    pub fn d(&self) -> usize {
        self.lambdas.len()
    }

    /// Ψ_p for 1-based `p`, with Ψ_0 = 0.
    pub fn big_psi(&self, p: usize) -> f64 {
        if p == 0 {
            0.0
        } else {
            self.big_psis[p - 1]
        }
    }

    /// Checks ordering, Minkowski's bounds on Π λ_p and witness independence.
    pub fn check_invariants(&self, epsilon: f64) -> Result<()> {
        let d = self.d();
        let slack = 1.0 + 4.0 * epsilon * d as f64;
        for p in 1..d {
            if self.lambdas[p] * slack < self.lambdas[p - 1] {
                return Err(Error::Inconsistent(format!(
                    "λ_{} = {} exceeds λ_{} = {} at s = {}",
                    p,
                    self.lambdas[p - 1],
                    p + 1,
                    self.lambdas[p],
                    self.s
                )));
            }
        }
        let log_product: f64 = self.lambdas.iter().map(|l| l.ln()).sum();
        let lower = -ln_factorial(d);
        let tol = 4.0 * epsilon * d as f64;
        if log_product > tol || log_product < lower - tol {
            return Err(Error::Inconsistent(format!(
                "Π λ_p = exp({log_product}) outside [1/{d}!, 1] at s = {}",
                self.s
            )));
        }
        if integer_rank(&self.witnesses) != d {
            return Err(Error::Inconsistent(format!("witnesses are dependent at s = {}", self.s)));
        }
        Ok(())
    }
}

pub(crate) fn ln_factorial(d: usize) -> f64 {
    (2..=d).map(|k| (k as f64).ln()).sum()
}

/// Options for [`psi_profile`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileConfig {
    pub minima: MinimaConfig,
    /// Consecutive grid points sharing one warm-started reduction chain.
    /// Chunks are independent, so results do not depend on thread count.
    pub chunk: usize,
    pub parallel: bool,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self { minima: MinimaConfig::default(), chunk: 50, parallel: true }
    }
}

/// `s = step, 2·step, …` up to `s_max` (inclusive within rounding).
pub fn uniform_grid(step: f64, s_max: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(s_max > 0.0) {
        return Err(Error::OutOfRange("grid step and s_max must be positive".into()));
    }
    let count = (s_max / step + 1e-9).floor() as usize;
    Ok((1..=count).map(|k| k as f64 * step).collect())
}

/// Exact-grid parameters `u = 2, 3, …` with `n ln u ≤ s_max`.
pub fn exact_grid(n: usize, s_max: f64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut u = 2u64;
    while n as f64 * (u as f64).ln() <= s_max + 1e-12 {
        out.push(u);
        u += 1;
    }
    out
}

/// Flow samples at every grid time, in grid order.
pub fn psi_profile(
    problem: &ApproximationProblem,
    path: &PathSpec,
    s_grid: &[f64],
    cfg: &ProfileConfig,
) -> Result<Vec<FlowSample>> {
    if path.dimension() != problem.d() {
        return Err(Error::Incompatible("path and lattice dimensions differ".into()));
    }
    if let Some(bad) = s_grid.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::OutOfRange(format!("flow times must be positive, got {bad}")));
    }
    if s_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("flow times must be increasing".into()));
    }
    let shapes = s_grid.iter().map(|&s| path.box_shape(s).map_err(|e| e.at(s)));
    let shapes: Vec<BoxShape> = shapes.collect::<Result<_>>()?;
    run_chunks(problem, &shapes, cfg)
}

/// Flow samples on the exact grid `s = n ln u`.
pub fn psi_profile_exact(
    problem: &ApproximationProblem,
    path: &PathSpec,
    us: &[u64],
    cfg: &ProfileConfig,
) -> Result<Vec<FlowSample>> {
    if path.dimension() != problem.d() {
        return Err(Error::Incompatible("path and lattice dimensions differ".into()));
    }
    let shapes: Vec<BoxShape> = us.iter().map(|&u| path.exact_box(u)).collect::<Result<_>>()?;
    run_chunks(problem, &shapes, cfg)
}

fn run_chunks(
    problem: &ApproximationProblem,
    shapes: &[BoxShape],
    cfg: &ProfileConfig,
) -> Result<Vec<FlowSample>> {
    let chunk = cfg.chunk.max(1);
    let work = |part: &[BoxShape]| -> Result<Vec<FlowSample>> {
        let mut warm: Option<Vec<Vec<BigInt>>> = None;
        let mut out = Vec::with_capacity(part.len());
        for shape in part {
            let minima = minima_from(problem, shape, &cfg.minima, warm.as_deref(), problem.d())
                .map_err(|e| e.at(shape.s))?;
            warm = Some(minima.reduced_basis.clone());
            out.push(FlowSample::from_minima(shape.s, minima));
        }
        Ok(out)
    };
    let parts: Vec<Result<Vec<FlowSample>>> = if cfg.parallel {
        shapes.par_chunks(chunk).map(work).collect()
    } else {
        shapes.chunks(chunk).map(work).collect()
    };
    let mut out = Vec::with_capacity(shapes.len());
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
