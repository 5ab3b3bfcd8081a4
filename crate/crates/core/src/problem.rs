//! The matrix Θ of the linear system Θx = y.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{common_denominator, dyadic_round, ratio_to_f64, rational_to_f64};

/// Default working precision for irrational entries, in bits.
pub const DEFAULT_PRECISION_BITS: u32 = 192;

/// An `n × m` real matrix Θ, stored as exact rationals.
///
/// Entries flagged `exact` are the true values (rational fixtures, Θ = 0).
/// The rest are dyadic truncations of real numbers at `precision_bits`; their
/// truncation error is at most `2^-(precision_bits+1)` and is tracked so that
/// insufficient precision can be reported instead of silently degrading.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproximationProblem {
    n: usize,
    m: usize,
    entries: Vec<BigRational>,
    exact: Vec<bool>,
    precision_bits: u32,
    den: BigInt,
    num: Vec<BigInt>,
    approx: Vec<f64>,
}

impl ApproximationProblem {
    /// Builds a problem whose entries are all exact rationals.
    /// `rows` has `n` rows of length `m`.
    pub fn exact(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let exact = vec![true; n * m];
        Self::from_parts(n, m, rows, exact, DEFAULT_PRECISION_BITS)
    }

    /// Builds a problem from arbitrary rationals that stand for real numbers,
    /// rounding each to the nearest multiple of `2^-precision_bits`.
    pub fn from_reals(rows: Vec<Vec<BigRational>>, precision_bits: u32) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let rounded = rows
            .into_iter()
            .map(|r| r.iter().map(|v| dyadic_round(v, precision_bits)).collect())
            .collect();
        Self::from_parts(n, m, rounded, vec![false; n * m], precision_bits)
    }

    /// General constructor: `exact[i*m + j]` marks entry `(i, j)` as exact.
    pub fn from_parts(
        n: usize,
        m: usize,
        rows: Vec<Vec<BigRational>>,
        exact: Vec<bool>,
        precision_bits: u32,
    ) -> Result<Self> {
        if n < 1 || m < 1 || n + m < 3 {
            return Err(Error::InvalidProblem(format!(
                "need n >= 1, m >= 1, n + m >= 3; got n = {n}, m = {m}"
            )));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidProblem("ragged matrix".into()));
        }
        if exact.len() != n * m {
            return Err(Error::InvalidProblem("exactness mask has the wrong length".into()));
        }
        if precision_bits < 64 {
            return Err(Error::InvalidProblem(format!(
                "precision must be at least 64 bits, got {precision_bits}"
            )));
        }
        let entries: Vec<BigRational> = rows.into_iter().flatten().collect();
        let den = common_denominator(entries.iter());
        let num = entries
            .iter()
            .map(|e| e.numer() * (&den / e.denom()))
            .collect();
        let approx = entries.iter().map(rational_to_f64).collect();
        Ok(Self { n, m, entries, exact, precision_bits, den, num, approx })
    }

    /// The zero matrix, which makes Λ = Z^d.
    pub fn zero(n: usize, m: usize) -> Result<Self> {
        Self::exact(vec![vec![BigRational::zero(); m]; n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.n + self.m
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Entry θ_{row, col}, with `row < n`, `col < m`.
    pub fn entry(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.m + col]
    }

    pub fn entry_f64(&self, row: usize, col: usize) -> f64 {
        self.approx[row * self.m + col]
    }

    pub fn is_entry_exact(&self, row: usize, col: usize) -> bool {
        self.exact[row * self.m + col]
    }

    pub fn all_exact(&self) -> bool {
        self.exact.iter().all(|&e| e)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn rows(&self) -> Vec<Vec<BigRational>> {
        self.entries.chunks(self.m).map(<[_]>::to_vec).collect()
    }

    /// ᵗΘ as an `m × n` problem, with exactness flags carried along.
    pub fn transpose(&self) -> Self {
        let mut rows = vec![Vec::with_capacity(self.n); self.m];
        let mut exact = Vec::with_capacity(self.n * self.m);
        for (j, row) in rows.iter_mut().enumerate() {
            for i in 0..self.n {
                row.push(self.entry(i, j).clone());
                exact.push(self.is_entry_exact(i, j));
            }
        }
        Self::from_parts(self.m, self.n, rows, exact, self.precision_bits)
            .expect("transpose of a valid problem is valid")
    }

    /// Same matrix re-truncated at a different precision (exact entries are
    /// unchanged).
    pub fn with_precision(&self, bits: u32) -> Result<Self> {
        let rows = self.rows();
        Self::from_parts(self.n, self.m, rows, self.exact.clone(), bits)
    }

    /// Upper bound on |θ_true − θ_stored| over all entries.
    pub fn truncation_bound(&self) -> f64 {
        if self.all_exact() {
            0.0
        } else {
            crate::numeric::scale_pow2(1.0, -(self.precision_bits as i64) - 1)
        }
    }

    /// Numerators of the residuals `y_j − (Θx)_j`, all over the common
    /// denominator [`Self::denominator`]. `z = (x_1..x_m, y_1..y_n)`.
    pub fn residual_numerators(&self, z: &[BigInt]) -> Vec<BigInt> {
        debug_assert_eq!(z.len(), self.d());
        let (x, y) = z.split_at(self.m);
        (0..self.n)
            .map(|j| {
                let mut acc = &y[j] * &self.den;
                for (i, xi) in x.iter().enumerate() {
                    if !xi.is_zero() {
                        acc -= &self.num[j * self.m + i] * xi;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// Residuals `y − Θx` as `f64`, computed exactly before rounding.
    pub fn residuals_f64(&self, z: &[BigInt]) -> Vec<f64> {
        self.residual_numerators(z)
            .iter()
            .map(|r| ratio_to_f64(r, &self.den))
            .collect()
    }

    /// Exact residuals `y − Θx`.
    pub fn residuals_exact(&self, z: &[BigInt]) -> Vec<BigRational> {
        self.residual_numerators(z)
            .into_iter()
            .map(|r| BigRational::new(r, self.den.clone()))
            .collect()
    }

    /// True when `z` solves the stored system exactly.
    pub fn solves_exactly(&self, z: &[BigInt]) -> bool {
        self.residual_numerators(z).iter().all(Zero::is_zero)
    }

    /// Largest |θ| over all entries.
    pub fn max_abs_entry(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| rational_to_f64(&e.abs()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::numeric::ints;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn rejects_small_dimensions() {
        assert!(ApproximationProblem::exact(vec![vec![q(1, 2)]]).is_err());
        assert!(ApproximationProblem::exact(vec![vec![q(1, 2)], vec![q(1, 3)]]).is_ok());
    }

    #[test]
    fn residuals_are_exact() {
        let p = ApproximationProblem::exact(vec![vec![q(1, 2)], vec![q(1, 3)]]).unwrap();
        assert!(p.solves_exactly(&ints(&[6, 3, 2])));
        assert!(!p.solves_exactly(&ints(&[6, 3, 1])));
        assert_eq!(p.residuals_exact(&ints(&[1, 0, 0])), vec![q(-1, 2), q(-1, 3)]);
        assert_eq!(p.residuals_f64(&ints(&[1, 1, 1])), vec![0.5, 2.0 / 3.0]);
    }

    #[test]
    fn transpose_swaps_shape() {
        let p = ApproximationProblem::exact(vec![vec![q(1, 2)], vec![q(1, 3)]]).unwrap();
        let t = p.transpose();
        assert_eq!((t.n(), t.m()), (1, 2));
        assert_eq!(t.entry(0, 1), &q(1, 3));
        assert_eq!(t.transpose(), p);
    }

    #[test]
    fn real_entries_are_truncated() {
        let p = ApproximationProblem::from_reals(vec![vec![q(1, 3), q(2, 7)]], 80).unwrap();
        assert!(!p.all_exact());
        assert!(p.truncation_bound() > 0.0);
        assert!((p.entry_f64(0, 0) - 1.0 / 3.0).abs() < 1e-16);
    }
}
