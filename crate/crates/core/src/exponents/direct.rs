//! Grade-p exponents straight from the constraint systems
//! max_{|σ|=k} |L_σ ∧ Z| ≤ t^{1−(k−k₀)(1+γ)}, k₀ = max(0, m − p),
//! over a finite pool of integer multivectors Z.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{build_l_sigma, subsets, IntegerMultivectors, MultiVector};
use crate::flow::FlowSample;
use crate::numeric::rational_ln;
use crate::problem::ApproximationProblem;

use super::{kappa, schmidt_from_diophantine, Diagnostics, ExponentReport, Method};

/// The constraints of one candidate at one threshold, through the logarithms
/// of M_k = max_{|σ|=k} |L_σ ∧ Z| for k = 0..=min(m, d − p).
#[derive(Debug, Clone, PartialEq)]
pub struct GradeConstraintSystem {
    pub p: usize,
    pub t: f64,
    pub k0: usize,
    /// `ln M_k`; `-inf` when M_k = 0.
    pub ln_maxima: Vec<f64>,
}

/// The interval of γ for which the system holds, or `None` if no γ does.
pub fn gamma_feasible_interval(sys: &GradeConstraintSystem) -> Option<(f64, f64)> {
    if sys.t <= 1.0 {
        return None;
    }
    let lt = sys.t.ln();
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for (k, &lm) in sys.ln_maxima.iter().enumerate() {
        if lm == f64::NEG_INFINITY {
            continue;
        }
        let r = lm / lt;
        if k > sys.k0 {
            hi = hi.min((1.0 - r) / (k - sys.k0) as f64 - 1.0);
        } else if k < sys.k0 {
            lo = lo.max((r - 1.0) / (sys.k0 - k) as f64 - 1.0);
        } else if lm > lt {
            return None;
        }
    }
    (lo <= hi).then_some((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateKind {
    /// Wedge of successive-minima witnesses from the flow.
    Decomposable,
    /// Bounded enumeration of integer multivectors.
    Enumerated,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PoolProvenance {
    pub decomposable: usize,
    pub enumerated: usize,
    /// The enumeration stopped at its cap.
    pub truncated: bool,
    /// Kind of the candidate attaining β.
    pub winner: Option<CandidateKind>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectConfig {
    /// Sup-norm bound of the enumerated candidates (0 disables enumeration).
    pub height: i64,
    pub cap: usize,
    pub tail: f64,
}

impl Default for DirectConfig {
    fn default() -> Self {
        Self { height: 2, cap: 200_000, tail: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectEstimate {
    pub p: usize,
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    pub alpha: f64,
    pub window: [f64; 2],
    /// Thresholds with at least one feasible candidate.
    pub thresholds: Vec<f64>,
    /// g(t): the largest γ_hi over feasible candidates.
    pub g: Vec<f64>,
    pub tail_samples: usize,
    /// Thresholds dropped because no candidate was feasible there.
    pub uncovered: usize,
    pub provenance: PoolProvenance,
    pub witness: Vec<BigInt>,
}

impl DirectEstimate {
    pub fn report(&self, transposed: bool) -> ExponentReport {
        let (n, m, p) = (self.n, self.m, self.p);
        let floor = (n + m) as f64 / (n as f64 * kappa(p, n, m)) - 1.0;
        let clamped = self.alpha < floor;
        let (lo, hi) = schmidt_from_diophantine(p, self.beta.max(floor), self.alpha.max(floor), n, m)
            .expect("clamped to the admissible range");
        let tail = &self.g[self.g.len() - self.tail_samples..];
        let spread = if tail.iter().all(|v| v.is_finite()) {
            self.beta - self.alpha
        } else if tail.iter().any(|v| v.is_finite()) {
            f64::INFINITY
        } else {
            0.0
        };
        ExponentReport {
            p,
            method: Method::DirectDef2,
            transposed,
            beta: self.beta.max(floor),
            alpha: self.alpha.max(floor),
            psi_lower: lo,
            psi_upper: hi,
            window: self.window,
            diagnostics: Diagnostics {
                oscillation: spread,
                samples: self.tail_samples,
                clamped,
                truncated: self.provenance.truncated || self.uncovered > 0,
                witness: Some(self.witness.clone()),
                pool: Some(self.provenance.clone()),
                ..Default::default()
            },
        }
    }
}

struct Candidate {
    coeffs: Vec<BigInt>,
    kind: CandidateKind,
    ln_maxima: Vec<f64>,
}

fn canonical(mut c: Vec<BigInt>) -> Vec<BigInt> {
    if c.iter().find(|v| !v.is_zero()).is_some_and(|v| v.is_negative()) {
        for v in &mut c {
            *v = -std::mem::take(v);
        }
    }
    c
}

/// Integer forms D^k L_σ for every σ, grouped by k.
fn scaled_l_sigmas(problem: &ApproximationProblem, kmax: usize) -> Result<Vec<Vec<MultiVector<BigInt>>>> {
    let den = problem.denominator();
    let (m, d) = (problem.m(), problem.d());
    (0..=kmax)
        .map(|k| {
            let scale = BigRational::from_integer(num_traits::pow(den.clone(), k));
            subsets(m, k)
                .iter()
                .map(|sigma| {
                    let l = build_l_sigma(problem, sigma)?;
                    let ints: Vec<BigInt> = l.coeffs().iter().map(|c| (c * &scale).to_integer()).collect();
                    MultiVector::from_coeffs(d, k, ints)
                })
                .collect()
        })
        .collect()
}

fn ln_maxima(z: &MultiVector<BigInt>, ls: &[Vec<MultiVector<BigInt>>], ln_den: f64) -> Result<Vec<f64>> {
    ls.iter()
        .enumerate()
        .map(|(k, group)| {
            let mut best = BigInt::zero();
            for l in group {
                let w = l.wedge(z)?;
                let s = w.sup_norm();
                if s > best {
                    best = s;
                }
            }
            Ok(rational_ln(&BigRational::from_integer(best)) - k as f64 * ln_den)
        })
        .collect()
}

/// Estimates (β_p, α_p) over the thresholds `t_grid` using the witnesses of
/// `trace` (a flow of the same problem) plus bounded enumeration.
pub fn direct_grade_p_estimate(
    problem: &ApproximationProblem,
    p: usize,
    t_grid: &[f64],
    trace: &[FlowSample],
    cfg: &DirectConfig,
) -> Result<DirectEstimate> {
    let (n, m, d) = (problem.n(), problem.m(), problem.d());
    if p == 0 || p >= d {
        return Err(Error::OutOfRange(format!("grade {p} outside 1..{d}")));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| !(t > 1.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange("thresholds must be increasing and above 1".into()));
    }
    let k0 = m.saturating_sub(p);
    let kmax = m.min(d - p);
    let ls = scaled_l_sigmas(problem, kmax)?;
    let ln_den = rational_ln(&BigRational::from_integer(problem.denominator().clone()));

    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    let mut pool: Vec<Candidate> = Vec::new();
    let mut provenance = PoolProvenance::default();
    for sample in trace {
        if sample.witnesses.len() != d {
            return Err(Error::Incompatible(format!("sample with {} witnesses for d = {d}", sample.witnesses.len())));
        }
        let vectors: Vec<MultiVector<BigInt>> =
            sample.witnesses.iter().map(|w| MultiVector::vector(w.clone())).collect();
        for set in subsets(d, p) {
            let factors: Vec<_> = set.members().iter().map(|&i| vectors[i].clone()).collect();
            let z = MultiVector::wedge_all(d, &factors)?;
            if z.is_zero() {
                continue;
            }
            let key = canonical(z.coeffs().to_vec());
            if seen.insert(key.clone()) {
                let z = MultiVector::from_coeffs(d, p, key.clone())?;
                pool.push(Candidate { ln_maxima: ln_maxima(&z, &ls, ln_den)?, coeffs: key, kind: CandidateKind::Decomposable });
                provenance.decomposable += 1;
            }
        }
    }
    if cfg.height > 0 {
        let mut iter = IntegerMultivectors::new(d, p, cfg.height)?;
        for z in iter.by_ref().take(cfg.cap) {
            let key: Vec<BigInt> = z.coeffs().iter().map(|&c| BigInt::from(c)).collect();
            if seen.insert(key.clone()) {
                let z = MultiVector::from_coeffs(d, p, key.clone())?;
                pool.push(Candidate { ln_maxima: ln_maxima(&z, &ls, ln_den)?, coeffs: key, kind: CandidateKind::Enumerated });
                provenance.enumerated += 1;
            }
        }
        provenance.truncated = iter.next().is_some();
    }
    if pool.is_empty() {
        return Err(Error::EmptyPool(format!("grade {p}: no witnesses and enumeration disabled")));
    }

    let mut thresholds = Vec::new();
    let mut g = Vec::new();
    let mut best_of = Vec::new();
    let mut uncovered = 0;
    for &t in t_grid {
        let mut best: Option<(f64, usize)> = None;
        for (i, c) in pool.iter().enumerate() {
            let sys = GradeConstraintSystem { p, t, k0, ln_maxima: c.ln_maxima.clone() };
            if let Some((_, hi)) = gamma_feasible_interval(&sys) {
                if best.is_none_or(|(b, _)| hi > b) {
                    best = Some((hi, i));
                }
            }
        }
        match best {
            Some((hi, i)) => {
                thresholds.push(t);
                g.push(hi);
                best_of.push(i);
            }
            None => uncovered += 1,
        }
    }
    if thresholds.len() < 2 {
        return Err(Error::EmptyPool(format!(
            "grade {p}: feasible candidates at only {} of {} thresholds",
            thresholds.len(),
            t_grid.len()
        )));
    }

    let (la, lb) = (thresholds[0].ln(), thresholds[thresholds.len() - 1].ln());
    let cut = lb - cfg.tail.clamp(0.0, 1.0) * (lb - la);
    let start = thresholds.iter().position(|t| t.ln() >= cut - 1e-12).unwrap_or(0);
    let tail = &g[start..];
    let (mut beta, mut arg) = (f64::NEG_INFINITY, start);
    for (i, &v) in tail.iter().enumerate() {
        if v > beta {
            beta = v;
            arg = start + i;
        }
    }
    let alpha = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let winner = &pool[best_of[arg]];
    provenance.winner = Some(winner.kind);
    Ok(DirectEstimate {
        p,
        n,
        m,
        beta,
        alpha,
        window: [thresholds[start], thresholds[thresholds.len() - 1]],
        tail_samples: tail.len(),
        uncovered,
        witness: winner.coeffs.clone(),
        thresholds,
        g,
        provenance,
    })
}
