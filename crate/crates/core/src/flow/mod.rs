//! The lattice Λ attached to Θ, the diagonal flow of boxes B(s), and the
//! successive minima λ_p(B(s)) along it.

mod chebyshev;
mod companion;
mod export;
mod minima;
mod profile;
mod reduce;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::ratio_to_f64;
use crate::problem::ApproximationProblem;

pub use companion::{
    companion_parameters, discrete_local_minima, first_minimum_gauges, local_minima_of_psi1,
    CompanionPair, LocalMinimum, Side, WitnessGauges,
};
pub use export::{csv_header, read_trace_csv, witness_sidecar, write_trace_csv, DEFAULT_DIGITS};
pub use minima::{successive_minima, Minima, MinimaConfig};
pub use profile::{
    exact_grid, psi_profile, psi_profile_exact, uniform_grid, FlowSample, ProfileConfig,
};

pub(crate) fn big_to_f64(v: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Largest |τ_i(s)| accepted before the box is declared unrepresentable.
pub const MAX_BOX_EXPONENT: f64 = 700.0;

/// The unimodular lattice Λ = {(x, y − Θx) : x ∈ Z^m, y ∈ Z^n}.
///
/// Points are addressed by integer coordinates `z = (x, y)`; the image in R^d
/// is `(x, y − Θx)`.
#[derive(Debug, Clone)]
pub struct Lattice {
    problem: ApproximationProblem,
    transposed: bool,
}

/// Builds Λ for Θ, or for ᵗΘ when `transposed` is set (then the roles of n
/// and m are swapped).
pub fn build_lattice(problem: &ApproximationProblem, transposed: bool) -> Lattice {
    let problem = if transposed { problem.transpose() } else { problem.clone() };
    Lattice { problem, transposed }
}

impl Lattice {
    pub fn dimension(&self) -> usize {
        self.problem.d()
    }

    /// The matrix this lattice was built from (already transposed if requested).
    pub fn problem(&self) -> &ApproximationProblem {
        &self.problem
    }

    pub fn is_transposed(&self) -> bool {
        self.transposed
    }

    /// Basis matrix, row-major, whose columns are the images of the standard
    /// basis: `[[I_m, 0], [−Θ, I_n]]`.
    pub fn basis(&self) -> Vec<Vec<BigRational>> {
        let (n, m, d) = (self.problem.n(), self.problem.m(), self.problem.d());
        let mut b = vec![vec![BigRational::zero(); d]; d];
        for (i, row) in b.iter_mut().enumerate() {
            row[i] = BigRational::one();
        }
        for j in 0..n {
            for i in 0..m {
                b[m + j][i] = -self.problem.entry(j, i).clone();
            }
        }
        b
    }

    /// Exact determinant of [`Self::basis`] by rational elimination.
    pub fn determinant(&self) -> BigRational {
        let mut a = self.basis();
        let d = a.len();
        let mut det = BigRational::one();
        for col in 0..d {
            let Some(p) = (col..d).find(|&r| !a[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if p != col {
                a.swap(p, col);
                det = -det;
            }
            det *= &a[col][col];
            for r in col + 1..d {
                if !a[r][col].is_zero() {
                    let f = &a[r][col] / &a[col][col];
                    for c in col..d {
                        let v = &f * &a[col][c];
                        a[r][c] -= v;
                    }
                }
            }
        }
        det
    }

    /// Exact image `(x, y − Θx)` of integer coordinates `z`.
    pub fn image_exact(&self, z: &[BigInt]) -> Vec<BigRational> {
        let m = self.problem.m();
        let mut out: Vec<BigRational> =
            z[..m].iter().map(|v| BigRational::from_integer(v.clone())).collect();
        out.extend(self.problem.residuals_exact(z));
        out
    }

    pub fn image_f64(&self, z: &[BigInt]) -> Vec<f64> {
        let m = self.problem.m();
        let mut out: Vec<f64> = z[..m].iter().map(big_to_f64).collect();
        out.extend(self.problem.residuals_f64(z));
        out
    }
}

/// Slopes (τ̇_1, …, τ̇_d) of a linear path; they must sum to zero so that
/// every box has volume 2^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    slopes: Vec<f64>,
    /// Set for the standard path, which admits the exact rational grid.
    standard: Option<(usize, usize)>,
}

impl PathSpec {
    /// τ_1 = … = τ_m = s and τ_{m+1} = … = τ_d = −ms/n.
    pub fn standard(n: usize, m: usize) -> Self {
        let mut slopes = vec![1.0; m];
        slopes.extend(std::iter::repeat(-(m as f64) / n as f64).take(n));
        Self { slopes, standard: Some((n, m)) }
    }

    pub fn new(slopes: Vec<f64>) -> Result<Self> {
        if slopes.is_empty() || slopes.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidProblem("path slopes must be finite and nonempty".into()));
        }
        let sum: f64 = slopes.iter().sum();
        let scale: f64 = slopes.iter().map(|s| s.abs()).sum();
        if sum.abs() > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidProblem(format!("path slopes sum to {sum}, expected 0")));
        }
        Ok(Self { slopes, standard: None })
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn dimension(&self) -> usize {
        self.slopes.len()
    }

    /// `(n, m)` when this is the standard path.
    pub fn standard_shape(&self) -> Option<(usize, usize)> {
        self.standard
    }

    /// The box B(s).
    pub fn box_shape(&self, s: f64) -> Result<BoxShape> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::OutOfRange(format!("flow time must be finite and >= 0, got {s}")));
        }
        let mut half_sides = Vec::with_capacity(self.slopes.len());
        for &k in &self.slopes {
            let e = k * s;
            if e.abs() > MAX_BOX_EXPONENT {
                return Err(Error::BoxOverflow { s, exponent: e });
            }
            half_sides.push(e.exp());
        }
        Ok(BoxShape { s, half_sides, exact: None })
    }

    /// Box at the exact-grid time `s = n ln u`, where the half-sides are the
    /// rationals `u^n` and `u^{−m}`. Only defined for the standard path.
    pub fn exact_box(&self, u: u64) -> Result<BoxShape> {
        let (n, m) = self.standard.ok_or_else(|| {
            Error::Precondition("the exact grid needs the standard path".into())
        })?;
        if u < 2 {
            return Err(Error::OutOfRange(format!("exact grid needs u >= 2, got {u}")));
        }
        let s = n as f64 * (u as f64).ln();
        let mut shape = self.box_shape(s)?;
        let big = BigInt::from(u);
        let up = BigRational::from_integer(num_traits::pow(big.clone(), n));
        let down = BigRational::new(BigInt::one(), num_traits::pow(big, m));
        let mut exact = vec![up; m];
        exact.extend(std::iter::repeat(down).take(n));
        shape.half_sides = exact.iter().map(crate::numeric::rational_to_f64).collect();
        shape.exact = Some(exact);
        Ok(shape)
    }
}

/// Half-side lengths of B(s) = diag(e^{τ(s)}) [−1, 1]^d.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxShape {
    pub s: f64,
    pub half_sides: Vec<f64>,
    /// Exact rational half-sides, available on the exact grid.
    pub exact: Option<Vec<BigRational>>,
}

/// Half-sides of B(s) for a path (product 1 up to rounding).
pub fn box_shape(path: &PathSpec, s: f64) -> Result<Vec<f64>> {
    Ok(path.box_shape(s)?.half_sides)
}

/// Maps integer coordinates to box-scaled images `image_i / h_i`.
pub(crate) struct Scaler<'a> {
    problem: &'a ApproximationProblem,
    inv_half: Vec<f64>,
    exact_inv: Option<Vec<BigRational>>,
}

impl<'a> Scaler<'a> {
    pub(crate) fn new(problem: &'a ApproximationProblem, shape: &BoxShape) -> Self {
        Self {
            problem,
            inv_half: shape.half_sides.iter().map(|h| 1.0 / h).collect(),
            exact_inv: shape.exact.as_ref().map(|e| e.iter().map(|h| h.recip()).collect()),
        }
    }

    pub(crate) fn inv_half(&self) -> &[f64] {
        &self.inv_half
    }

    pub(crate) fn is_exact(&self) -> bool {
        self.exact_inv.is_some() && self.problem.all_exact()
    }

    pub(crate) fn image(&self, z: &[BigInt]) -> Vec<f64> {
        let m = self.problem.m();
        let den = self.problem.denominator();
        let mut out = Vec::with_capacity(z.len());
        for i in 0..m {
            out.push(big_to_f64(&z[i]) * self.inv_half[i]);
        }
        for (j, r) in self.problem.residual_numerators(z).iter().enumerate() {
            out.push(ratio_to_f64(r, den) * self.inv_half[m + j]);
        }
        out
    }

    pub(crate) fn sup_norm(&self, z: &[BigInt]) -> f64 {
        self.image(z).iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Exact scaled sup-norm, when the box and Θ are both rational.
    pub(crate) fn sup_norm_exact(&self, z: &[BigInt]) -> Option<BigRational> {
        let inv = self.exact_inv.as_ref()?;
        if !self.problem.all_exact() {
            return None;
        }
        let m = self.problem.m();
        let mut best = BigRational::zero();
        for i in 0..m {
            let v = BigRational::from_integer(z[i].abs()) * &inv[i];
            if v > best {
                best = v;
            }
        }
        for (j, r) in self.problem.residuals_exact(z).into_iter().enumerate() {
            let v = r.abs() * &inv[m + j];
            if v > best {
                best = v;
            }
        }
        Some(best)
    }
}
