//! First-minimum gauges μ_s, ν_s, the companion flow times s′ ≤ s ≤ s″ where
//! the first two minima meet, and the local minima of ψ₁.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::int_vec;
use crate::problem::ApproximationProblem;

use super::minima::{integer_rank, minima_from, points_in_box, MinimaConfig};
use super::profile::FlowSample;
use super::{big_to_f64, PathSpec};

/// μ_s(v) = e^{−s} max_{i≤m} |x_i| and ν_s(v) = e^{ms/n} max_j |y_j − (Θx)_j|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessGauges {
    pub s: f64,
    pub mu: f64,
    pub nu: f64,
    pub lambda1: f64,
}

impl WitnessGauges {
    /// μ = ν = λ₁ within the relative tolerance.
    pub fn is_balanced(&self, tol: f64) -> bool {
        (self.mu - self.nu).abs() <= tol * self.lambda1
    }
}

fn gauges_of(problem: &ApproximationProblem, s: f64, z: &[BigInt]) -> (f64, f64) {
    let (n, m) = (problem.n() as f64, problem.m());
    let xmax = z[..m].iter().map(|v| big_to_f64(v).abs()).fold(0.0, f64::max);
    let rmax = problem.residuals_f64(z).iter().map(|v| v.abs()).fold(0.0, f64::max);
    ((-s).exp() * xmax, (m as f64 * s / n).exp() * rmax)
}

/// Gauges of the first witness of `sample`; fails if their maximum is not λ₁.
pub fn first_minimum_gauges(
    sample: &FlowSample,
    problem: &ApproximationProblem,
    epsilon: f64,
) -> Result<WitnessGauges> {
    let (mu, nu) = gauges_of(problem, sample.s, &sample.witnesses[0]);
    let lambda1 = sample.lambdas[0];
    if (mu.max(nu) - lambda1).abs() > epsilon.max(1e-13) * lambda1 * 8.0 {
        return Err(Error::Inconsistent(format!(
            "max(μ, ν) = {} differs from λ₁ = {lambda1} at s = {}",
            mu.max(nu),
            sample.s
        )));
    }
    Ok(WitnessGauges { s: sample.s, mu, nu, lambda1 })
}

/// Which companion to build: s′ ≤ s (shrink the first block, grow along the
/// residual directions) or s″ ≥ s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Shrink,
    Grow,
}

/// One side of the companion construction at flow time `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompanionPair {
    pub side: Side,
    pub s: f64,
    pub lambda: f64,
    /// s′ (shrink) or s″ (grow).
    pub s_companion: f64,
    /// λ′ = λν^{n/d} or λ″ = λμ^{m/d}.
    pub lambda_companion: f64,
    /// ν (shrink) or μ (grow).
    pub factor: f64,
    /// The first witness at `s`.
    #[serde(with = "int_vec")]
    pub witness: Vec<BigInt>,
    /// The second, non-collinear boundary point.
    #[serde(with = "int_vec")]
    pub partner: Vec<BigInt>,
    /// λ₁ and λ₂ recomputed at the companion time.
    pub check: [f64; 2],
}

impl CompanionPair {
    pub fn s_prime(&self) -> Option<f64> {
        (self.side == Side::Shrink).then_some(self.s_companion)
    }

    pub fn s_dblprime(&self) -> Option<f64> {
        (self.side == Side::Grow).then_some(self.s_companion)
    }
}

fn collinear(a: &[BigInt], b: &[BigInt]) -> bool {
    integer_rank(&[a.to_vec(), b.to_vec()]) < 2
}

/// Builds s′ (side = shrink) or s″ (side = grow) at flow time `s` for the
/// standard path, and verifies that the first two minima coincide there.
pub fn companion_parameters(
    problem: &ApproximationProblem,
    s: f64,
    side: Side,
    cfg: &MinimaConfig,
) -> Result<CompanionPair> {
    let (n, m, d) = (problem.n(), problem.m(), problem.d());
    let (nf, mf, df) = (n as f64, m as f64, d as f64);
    let path = PathSpec::standard(n, m);
    let shape = path.box_shape(s)?;
    let minima = minima_from(problem, &shape, cfg, None, 1).map_err(|e| e.at(s))?;
    let lambda = minima.lambdas[0];
    let v = minima.witnesses[0].clone();
    let (mu_v, nu_v) = gauges_of(problem, s, &v);
    let tol = 8.0 * cfg.epsilon.max(1e-13);
    let ln_l = lambda.ln();

    // The search box: the first gauge capped at λ, the other at its
    // Minkowski-admissible maximum. Its volume is 2^d.
    let (log_x, log_r) = match side {
        Side::Shrink => {
            if mu_v < lambda * (1.0 - tol) {
                return Err(Error::Precondition(format!(
                    "shrink side needs μ_s(v) = λ₁ at s = {s} (μ = {mu_v}, λ₁ = {lambda})"
                )));
            }
            (ln_l + s, (1.0 - df / nf) * ln_l - mf * s / nf)
        }
        Side::Grow => {
            if nu_v < lambda * (1.0 - tol) {
                return Err(Error::Precondition(format!(
                    "grow side needs ν_s(v) = λ₁ at s = {s} (ν = {nu_v}, λ₁ = {lambda})"
                )));
            }
            ((1.0 - df / mf) * ln_l + s, ln_l - mf * s / nf)
        }
    };
    for e in [log_x, log_r] {
        if e.abs() > super::MAX_BOX_EXPONENT {
            return Err(Error::BoxOverflow { s, exponent: e });
        }
    }
    let mut half = vec![log_x.exp(); m];
    half.extend(std::iter::repeat(log_r.exp()).take(n));
    let points = points_in_box(problem, &half, cfg, 1_000_000).map_err(|e| e.at(s))?;

    let mut best: Option<(f64, Vec<BigInt>)> = None;
    for z in points {
        if collinear(&z, &v) {
            continue;
        }
        let (mu_z, nu_z) = gauges_of(problem, s, &z);
        let (capped, ratio) = match side {
            Side::Shrink => (mu_z, nu_z / lambda),
            Side::Grow => (nu_z, mu_z / lambda),
        };
        if capped > lambda * (1.0 + 1e-12) {
            continue;
        }
        let better = match &best {
            None => true,
            Some((r, w)) => ratio < *r || (ratio == *r && z < *w),
        };
        if better {
            best = Some((ratio, z));
        }
    }
    let (ratio, partner) = best.ok_or_else(|| {
        Error::BracketExhausted(format!(
            "no second boundary point below the Minkowski bound at s = {s}"
        ))
    })?;
    let factor = ratio.max(1.0);
    let (s_companion, lambda_companion) = match side {
        Side::Shrink => (s - nf / df * factor.ln(), lambda * factor.powf(nf / df)),
        Side::Grow => (s + nf / df * factor.ln(), lambda * factor.powf(mf / df)),
    };
    let check_shape = path.box_shape(s_companion)?;
    let check = minima_from(problem, &check_shape, cfg, None, 2).map_err(|e| e.at(s_companion))?;
    let agree = |x: f64| (x - lambda_companion).abs() <= 2.0 * cfg.epsilon.max(1e-13) * lambda_companion * 4.0;
    if !(agree(check.lambdas[0]) && agree(check.lambdas[1])) {
        return Err(Error::Inconsistent(format!(
            "at s = {s_companion} the first two minima are {} and {}, expected both {lambda_companion}",
            check.lambdas[0], check.lambdas[1]
        )));
    }
    Ok(CompanionPair {
        side,
        s,
        lambda,
        s_companion,
        lambda_companion,
        factor,
        witness: v,
        partner,
        check: [check.lambdas[0], check.lambdas[1]],
    })
}

/// A local minimum of ψ₁ located from a sampled trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMinimum {
    pub s: f64,
    pub psi1: f64,
    pub gauges: WitnessGauges,
    /// μ = ν = λ₁ within `tolerance`.
    pub balanced: bool,
    /// Relative tolerance used for the balance test.
    pub tolerance: f64,
    #[serde(with = "int_vec")]
    pub witness: Vec<BigInt>,
}

/// Indices of strict discrete local minima of ψ₁ in a sampled trace.
pub fn discrete_local_minima(samples: &[FlowSample]) -> Vec<usize> {
    let psi: Vec<f64> = samples.iter().map(|x| x.psis[0]).collect();
    let noise = |a: f64| 1e-12 * a.abs().max(1.0);
    (1..psi.len().saturating_sub(1))
        .filter(|&i| {
            psi[i - 1] - psi[i] > noise(psi[i]) && psi[i + 1] - psi[i] > -noise(psi[i])
                && {
                    // Walk over a flat stretch to confirm a rise follows.
                    let mut j = i + 1;
                    while j < psi.len() && (psi[j] - psi[i]).abs() <= noise(psi[i]) {
                        j += 1;
                    }
                    j < psi.len() && psi[j] > psi[i]
                }
        })
        .collect()
}

/// Local minima of ψ₁ on the standard path for Θ (pass ᵗΘ for the dual).
///
/// Each discrete minimum of the trace is refined on a grid ten times finer
/// and then moved to the exact balance point of its witness, where
/// e^{−s}|x| = e^{ms/n}|y − Θx|, provided that witness is still a first
/// minimum there.
pub fn local_minima_of_psi1(
    problem: &ApproximationProblem,
    samples: &[FlowSample],
    cfg: &MinimaConfig,
) -> Result<Vec<LocalMinimum>> {
    let (n, m) = (problem.n(), problem.m());
    let path = PathSpec::standard(n, m);
    let slope = 1.0 + m as f64 / n as f64;
    let mut out: Vec<LocalMinimum> = Vec::new();
    for i in discrete_local_minima(samples) {
        let (a, b) = (samples[i - 1].s, samples[i + 1].s);
        let h = (b - a) / 20.0;
        let mut best: Option<(f64, f64, Vec<BigInt>, f64)> = None;
        for k in 0..=20 {
            let s = a + h * k as f64;
            let mm = minima_from(problem, &path.box_shape(s)?, cfg, None, 1).map_err(|e| e.at(s))?;
            let psi = mm.lambdas[0].ln() / s;
            if best.as_ref().map_or(true, |x| psi < x.1) {
                best = Some((s, psi, mm.witnesses[0].clone(), mm.lambdas[0]));
            }
        }
        let (mut s, mut psi, mut witness, mut lambda1) = best.expect("refinement grid is nonempty");

        let xmax = witness[..m].iter().map(|v| big_to_f64(v).abs()).fold(0.0, f64::max);
        let rmax = problem.residuals_f64(&witness).iter().map(|v| v.abs()).fold(0.0, f64::max);
        let mut tolerance = (slope * h).exp_m1() + 1e-9;
        if xmax > 0.0 && rmax > 0.0 {
            let balance = n as f64 / (n + m) as f64 * (xmax / rmax).ln();
            if balance > 0.0 && (balance - s).abs() <= 2.0 * h {
                let mm = minima_from(problem, &path.box_shape(balance)?, cfg, None, 1)
                    .map_err(|e| e.at(balance))?;
                let (mu, nu) = gauges_of(problem, balance, &witness);
                if (mu.max(nu) - mm.lambdas[0]).abs() <= 1e-10 * mm.lambdas[0] {
                    s = balance;
                    lambda1 = mm.lambdas[0];
                    psi = lambda1.ln() / s;
                    witness = mm.witnesses[0].clone();
                    tolerance = 1e-9;
                }
            }
        }
        let (mu, nu) = gauges_of(problem, s, &witness);
        let gauges = WitnessGauges { s, mu, nu, lambda1 };
        let balanced = gauges.is_balanced(tolerance);
        if out.last().is_some_and(|p| (p.s - s).abs() < 1e-12) {
            continue;
        }
        out.push(LocalMinimum { s, psi1: psi, gauges, balanced, tolerance, witness });
    }
    Ok(out)
}
