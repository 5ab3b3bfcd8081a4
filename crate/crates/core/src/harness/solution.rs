//! Rank of the lattice of integer solutions x of Θx ∈ Z^n.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exponents::{classical_estimate, log_grid, ClassicalConfig};
use crate::problem::ApproximationProblem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionSpace {
    pub rank: usize,
    /// True when the rank follows from exact arithmetic.
    pub certified: bool,
    /// Largest |x| covered by the search for inexact entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search_bound: Option<u64>,
    /// Smallest distance of Θx to Z^n found by that search.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_ext")]
    pub closest: Option<f64>,
    /// The rank ≠ 1 hypothesis of the grade-two regular bounds.
    pub hypothesis_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

mod opt_ext {
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(serde::Serialize, Deserialize)]
    struct Wrap(#[serde(with = "crate::numeric::ext_f64")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => s.serialize_some(&Wrap(*x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

/// Number of x visited by the search for inexact matrices.
const SEARCH_POINTS: f64 = 1e6;

/// Rank of {x ∈ Z^m : Θx ∈ Z^n}.
///
/// Columns whose entries are all exact rationals contribute one dimension
/// each. Inexact entries are treated as generic reals; this cannot be
/// certified, so the search for near-solutions with |x| up to (10^6)^{1/m}
/// is reported alongside a caveat.
pub fn check_hypothesis_solution_space(problem: &ApproximationProblem) -> Result<SolutionSpace> {
    let (n, m) = (problem.n(), problem.m());
    let exact_cols = (0..m).filter(|&j| (0..n).all(|i| problem.is_entry_exact(i, j))).count();
    if exact_cols == m {
        return Ok(SolutionSpace {
            rank: m,
            certified: true,
            search_bound: None,
            closest: None,
            hypothesis_ok: m != 1,
            caveat: None,
        });
    }
    let bound = SEARCH_POINTS.powf(1.0 / m as f64).floor().max(2.0) as u64;
    let grid = log_grid(2, bound, 2);
    let est = classical_estimate(problem, &grid, false, &ClassicalConfig::default())?;
    let closest = est.errors.last().copied();
    let rank = exact_cols;
    Ok(SolutionSpace {
        rank,
        certified: false,
        search_bound: Some(bound),
        closest,
        hypothesis_ok: rank != 1,
        caveat: Some(format!(
            "entries given to finite precision are taken as generic reals; \
             no search can certify this (|x| ≤ {bound} searched)"
        )),
    })
}
