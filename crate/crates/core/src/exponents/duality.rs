//! Pairing of the exponents of Θ with those of ᵗΘ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ext_f64;

use super::ExponentReport;

/// Flow times for ᵗΘ matching `grid` for Θ: the box of ᵗΘ at s·m/n has the
/// same volume normalisation as the box of Θ at s.
pub fn dual_grid(grid: &[f64], n: usize, m: usize) -> Vec<f64> {
    grid.iter().map(|s| s * m as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityEntry {
    pub p: usize,
    /// β_p, α_p of Θ.
    #[serde(with = "ext_f64")]
    pub beta: f64,
    #[serde(with = "ext_f64")]
    pub alpha: f64,
    /// β*_p, α*_p of ᵗΘ.
    #[serde(with = "ext_f64")]
    pub beta_star: f64,
    #[serde(with = "ext_f64")]
    pub alpha_star: f64,
    /// β_{d−p}, α_{d−p} of Θ.
    #[serde(with = "ext_f64")]
    pub beta_complement: f64,
    #[serde(with = "ext_f64")]
    pub alpha_complement: f64,
    /// β*_p − β_{d−p} (zero when both are infinite).
    #[serde(with = "ext_f64")]
    pub beta_residual: f64,
    #[serde(with = "ext_f64")]
    pub alpha_residual: f64,
    /// Ψ̄*_p − (n/m) Ψ̄_{d−p}.
    pub psi_lower_residual: f64,
    /// Ψ̂*_p − (n/m) Ψ̂_{d−p}.
    pub psi_upper_residual: f64,
}

fn ext_diff(a: f64, b: f64) -> f64 {
    if a.is_infinite() && a == b {
        0.0
    } else {
        a - b
    }
}

/// One entry per p = 1..d−1 from the reports of Θ and of ᵗΘ (both indexed by
/// grade, any order).
pub fn duality_reports(
    theta: &[ExponentReport],
    transpose: &[ExponentReport],
    n: usize,
    m: usize,
) -> Result<Vec<DualityEntry>> {
    let d = n + m;
    let find = |set: &[ExponentReport], p: usize, which: &str| -> Result<ExponentReport> {
        set.iter()
            .find(|r| r.p == p)
            .cloned()
            .ok_or_else(|| Error::MissingInputs { name: "duality".into(), missing: vec![format!("{which} p = {p}")] })
    };
    let ratio = n as f64 / m as f64;
    (1..d)
        .map(|p| {
            let own = find(theta, p, "Θ")?;
            let comp = find(theta, d - p, "Θ")?;
            let star = find(transpose, p, "ᵗΘ")?;
            Ok(DualityEntry {
                p,
                beta: own.beta,
                alpha: own.alpha,
                beta_star: star.beta,
                alpha_star: star.alpha,
                beta_complement: comp.beta,
                alpha_complement: comp.alpha,
                beta_residual: ext_diff(star.beta, comp.beta),
                alpha_residual: ext_diff(star.alpha, comp.alpha),
                psi_lower_residual: star.psi_lower - ratio * comp.psi_lower,
                psi_upper_residual: star.psi_upper - ratio * comp.psi_upper,
            })
        })
        .collect()
}
