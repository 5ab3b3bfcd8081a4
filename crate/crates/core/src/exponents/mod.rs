//! Diophantine exponents β_p, α_p estimated three ways: from the Schmidt
//! exponents of a flow trace, from the grade-p constraint systems directly,
//! and (for p = 1) from the classical best-approximation search.

mod classical;
mod direct;
mod duality;
mod schmidt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ext_f64;

pub use classical::{classical_estimate, log_grid, ClassicalConfig, ClassicalEstimate};
pub use direct::{
    direct_grade_p_estimate, gamma_feasible_interval, CandidateKind, DirectConfig, DirectEstimate,
    GradeConstraintSystem, PoolProvenance,
};
pub use duality::{dual_grid, duality_reports, DualityEntry};
pub use schmidt::{
    matched_t_window, rational_limit_reached, schmidt_estimate, schmidt_reports, SchmidtEstimate,
    WindowPolicy,
};

/// κ_p = min(p, (m/n)(d − p)).
pub fn kappa(p: usize, n: usize, m: usize) -> f64 {
    let d = n + m;
    (p as f64).min(m as f64 / n as f64 * (d - p) as f64)
}

/// κ*_p = min(p, (n/m)(d − p)), the value of κ_p for ᵗΘ.
pub fn kappa_star(p: usize, n: usize, m: usize) -> f64 {
    kappa(p, m, n)
}

const RANGE_SLACK: f64 = 1e-12;

fn check_grade(p: usize, n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 || p == 0 || p >= n + m {
        return Err(Error::OutOfRange(format!("grade {p} outside 1..{} for n = {n}, m = {m}", n + m - 1)));
    }
    Ok(())
}

fn one_exponent(p: usize, psi: f64, n: usize, m: usize) -> Result<f64> {
    let k = kappa(p, n, m);
    if !(psi >= -k - RANGE_SLACK && psi <= RANGE_SLACK) {
        return Err(Error::OutOfRange(format!("Ψ_{p} = {psi} outside [−{k}, 0]")));
    }
    let denom = k + psi.min(0.0);
    if denom <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((n + m) as f64 / (n as f64 * denom) - 1.0)
}

/// (β_p, α_p) from (Ψ̄_p, Ψ̂_p) via (1+β_p)(κ_p+Ψ̄_p) = (1+α_p)(κ_p+Ψ̂_p) = d/n.
/// For the starred exponents of ᵗΘ swap `n` and `m`.
pub fn diophantine_from_schmidt(p: usize, lower: f64, upper: f64, n: usize, m: usize) -> Result<(f64, f64)> {
    check_grade(p, n, m)?;
    Ok((one_exponent(p, lower, n, m)?, one_exponent(p, upper, n, m)?))
}

/// Inverse of [`diophantine_from_schmidt`].
pub fn schmidt_from_diophantine(p: usize, beta: f64, alpha: f64, n: usize, m: usize) -> Result<(f64, f64)> {
    check_grade(p, n, m)?;
    let k = kappa(p, n, m);
    let floor = (n + m) as f64 / (n as f64 * k) - 1.0;
    let inv = |e: f64| -> Result<f64> {
        if e.is_nan() || e < floor - RANGE_SLACK * floor.abs().max(1.0) {
            return Err(Error::OutOfRange(format!("exponent {e} below d/(nκ_{p}) − 1 = {floor}")));
        }
        if e == f64::INFINITY {
            return Ok(-k);
        }
        Ok(((n + m) as f64 / (n as f64 * (1.0 + e)) - k).min(0.0))
    };
    Ok((inv(beta)?, inv(alpha)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "schmidt-route")]
    SchmidtRoute,
    #[serde(rename = "direct-def2")]
    DirectDef2,
    #[serde(rename = "classical-def1")]
    ClassicalDef1,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Spread of the estimated quantity over the tail window (Ψ̂ − Ψ̄ for the
    /// Schmidt route, max γ − min γ otherwise).
    #[serde(with = "ext_f64")]
    pub oscillation: f64,
    pub samples: usize,
    /// A tail extreme fell outside [−κ_p, 0] and was clamped.
    pub clamped: bool,
    /// Values replaced by their exact limit (rational Θ with an exact
    /// solution lattice of full rank seen in the witnesses).
    pub snapped: bool,
    /// The search hit its cap before covering the requested range.
    pub truncated: bool,
    /// Best integer point (classical, or an exact solution z = (x, y) behind
    /// a snapped Schmidt-route value) or multivector coordinates (direct).
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_int_vec")]
    pub witness: Option<Vec<BigInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<PoolProvenance>,
}

/// One exponent estimate for grade `p` of Θ (or of ᵗΘ when `transposed`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub p: usize,
    pub method: Method,
    pub transposed: bool,
    #[serde(with = "ext_f64")]
    pub beta: f64,
    #[serde(with = "ext_f64")]
    pub alpha: f64,
    pub psi_lower: f64,
    pub psi_upper: f64,
    /// `(s_min, s_max)` for the Schmidt route, `(t_min, t_max)` otherwise.
    pub window: [f64; 2],
    pub diagnostics: Diagnostics,
}

impl ExponentReport {
    /// Checks −κ_p ≤ Ψ̄_p ≤ Ψ̂_p ≤ 0 and β_p ≥ α_p ≥ d/(nκ_p) − 1 for the
    /// shape `(n, m)` of the matrix the report describes.
    pub fn check_invariants(&self, n: usize, m: usize) -> Result<()> {
        let k = kappa(self.p, n, m);
        let slack = 1e-9;
        let psi_ok = self.psi_lower >= -k - slack
            && self.psi_lower <= self.psi_upper + slack
            && self.psi_upper <= slack;
        let floor = (n + m) as f64 / (n as f64 * k) - 1.0;
        let exp_ok = self.beta >= self.alpha - slack * self.alpha.abs().max(1.0)
            && self.alpha >= floor - slack * floor.abs().max(1.0);
        if psi_ok && exp_ok {
            Ok(())
        } else {
            Err(Error::Inconsistent(format!(
                "report p = {} ({:?}): Ψ̄ = {}, Ψ̂ = {}, β = {}, α = {}, κ = {k}",
                self.p, self.method, self.psi_lower, self.psi_upper, self.beta, self.alpha
            )))
        }
    }
}

mod opt_int_vec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        v.as_ref()
            .map(|z| z.iter().map(ToString::to_string).collect::<Vec<_>>())
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<BigInt>>, D::Error> {
        let text: Option<Vec<String>> = Option::deserialize(d)?;
        text.map(|v| {
            v.iter()
                .map(|t| t.parse::<BigInt>().map_err(serde::de::Error::custom))
                .collect()
        })
        .transpose()
    }
}
