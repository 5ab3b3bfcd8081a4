//! Lattice reduction of box-scaled bases with exact integer bookkeeping.
//!
//! Columns are kept as integer coordinate vectors; their scaled images are
//! recomputed exactly (then rounded) after every integer update, so floating
//! error never accumulates across reduction steps.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};

use super::Scaler;

pub(crate) const LLL_DELTA: f64 = 0.99;
const MAX_LLL_STEPS: usize = 200_000;

#[derive(Debug, Clone)]
pub(crate) struct Basis {
    pub cols: Vec<Vec<BigInt>>,
    pub images: Vec<Vec<f64>>,
}

impl Basis {
    pub(crate) fn new(cols: Vec<Vec<BigInt>>, scaler: &Scaler) -> Self {
        let images = cols.iter().map(|c| scaler.image(c)).collect();
        Self { cols, images }
    }

    pub(crate) fn identity(d: usize, scaler: &Scaler) -> Self {
        let cols = (0..d)
            .map(|i| (0..d).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        Self::new(cols, scaler)
    }

    pub(crate) fn len(&self) -> usize {
        self.cols.len()
    }

    fn refresh(&mut self, i: usize, scaler: &Scaler) {
        self.images[i] = scaler.image(&self.cols[i]);
    }

    /// `b_target += q · b_source`.
    pub(crate) fn add_multiple(&mut self, target: usize, source: usize, q: &BigInt, scaler: &Scaler) {
        if q.is_zero() {
            return;
        }
        for k in 0..self.cols[target].len() {
            let v = &self.cols[source][k] * q;
            self.cols[target][k] += v;
        }
        self.refresh(target, scaler);
    }

    pub(crate) fn negate(&mut self, i: usize) {
        for v in &mut self.cols[i] {
            *v = -std::mem::take(v);
        }
        for v in &mut self.images[i] {
            *v = -*v;
        }
    }

    pub(crate) fn swap(&mut self, i: usize, j: usize) {
        self.cols.swap(i, j);
        self.images.swap(i, j);
    }

    /// Integer vector `Σ c_i · col_i`.
    pub(crate) fn combine(&self, c: &[i128]) -> Vec<BigInt> {
        let d = self.cols[0].len();
        let mut z = vec![BigInt::zero(); d];
        for (ci, col) in c.iter().zip(&self.cols) {
            if *ci == 0 {
                continue;
            }
            let ci = BigInt::from(*ci);
            for k in 0..d {
                z[k] += &col[k] * &ci;
            }
        }
        z
    }
}

/// Gram–Schmidt data of the images.
#[derive(Debug, Clone)]
pub(crate) struct Gso {
    pub bstar: Vec<Vec<f64>>,
    pub bstar_sq: Vec<f64>,
    /// `mu[i][j] = <b_i, b*_j> / |b*_j|^2` for `j < i`.
    pub mu: Vec<Vec<f64>>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn gso(images: &[Vec<f64>]) -> Gso {
    let d = images.len();
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut bstar_sq = Vec::with_capacity(d);
    let mut mu = vec![vec![0.0; d]; d];
    for i in 0..d {
        let mut v = images[i].clone();
        // Modified Gram–Schmidt for stability on badly scaled bases.
        for j in 0..i {
            let c = dot(&v, &bstar[j]) / bstar_sq[j];
            mu[i][j] = dot(&images[i], &bstar[j]) / bstar_sq[j];
            for (vk, bk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= c * bk;
            }
        }
        bstar_sq.push(dot(&v, &v));
        bstar.push(v);
    }
    Gso { bstar, bstar_sq, mu }
}

/// Size-reduces column `k` against columns `0..k`.
fn size_reduce(basis: &mut Basis, k: usize, g: &Gso, scaler: &Scaler) -> Result<()> {
    for _ in 0..64 {
        let mut changed = false;
        for j in (0..k).rev() {
            let mu = dot(&basis.images[k], &g.bstar[j]) / g.bstar_sq[j];
            if mu.abs() > 0.51 {
                let q = BigInt::from_f64(-mu.round())
                    .ok_or_else(|| Error::CoordinateOverflow("size reduction".into()))?;
                basis.add_multiple(k, j, &q, scaler);
                changed = true;
            }
        }
        if !changed {
            return Ok(());
        }
    }
    Ok(())
}

/// LLL reduction of the images with Lovász parameter [`LLL_DELTA`].
///
/// No swap is performed between positions `barrier - 1` and `barrier`, so the
/// span of the first `barrier` columns is preserved (pass 0 for none).
pub(crate) fn lll(basis: &mut Basis, barrier: usize, scaler: &Scaler) -> Result<()> {
    let d = basis.len();
    if d < 2 {
        return Ok(());
    }
    let mut g = gso(&basis.images);
    let mut k = 1;
    let mut steps = 0;
    while k < d {
        steps += 1;
        if steps > MAX_LLL_STEPS {
            return Err(Error::EnumerationExhausted("lattice reduction did not converge".into()));
        }
        size_reduce(basis, k, &g, scaler)?;
        g = gso(&basis.images);
        let m = g.mu[k][k - 1];
        if k != barrier && g.bstar_sq[k] < (LLL_DELTA - m * m) * g.bstar_sq[k - 1] {
            basis.swap(k - 1, k);
            g = gso(&basis.images);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    Ok(())
}

/// Rewrites the outer block `k..d` so that the integer combination with
/// coefficients `c` has outer part `(g, 0, …, 0)`: afterwards the first
/// `k + 1` columns span the saturation of the old span plus the new vector.
pub(crate) fn absorb(basis: &mut Basis, k: usize, c: &[i128], scaler: &Scaler) -> Result<()> {
    let d = basis.len();
    let mut c = c.to_vec();
    loop {
        let Some(piv) = (k..d).filter(|&i| c[i] != 0).min_by_key(|&i| c[i].unsigned_abs()) else {
            return Err(Error::Inconsistent("new witness lies in the previous span".into()));
        };
        let mut done = true;
        for i in k..d {
            if i == piv || c[i] == 0 {
                continue;
            }
            let q = c[i].div_euclid(c[piv]);
            // c_i -= q c_piv  <=>  b_piv += q b_i
            c[i] -= q * c[piv];
            basis.add_multiple(piv, i, &BigInt::from(q), scaler);
            if c[i] != 0 {
                done = false;
            }
        }
        if done {
            c.swap(piv, k);
            basis.swap(piv, k);
            if c[k] < 0 {
                basis.negate(k);
            }
            return Ok(());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::PathSpec;
    use crate::numeric::ints;
    use crate::problem::ApproximationProblem;
    use num_rational::BigRational;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    fn det(cols: &[Vec<BigInt>]) -> i128 {
        use num_traits::ToPrimitive;
        let d = cols.len();
        let mut a: Vec<Vec<f64>> =
            cols.iter().map(|c| c.iter().map(|v| v.to_f64().unwrap()).collect()).collect();
        let mut det = 1.0;
        for i in 0..d {
            let p = (i..d).max_by(|&x, &y| a[x][i].abs().total_cmp(&a[y][i].abs())).unwrap();
            if a[p][i] == 0.0 {
                return 0;
            }
            if p != i {
                a.swap(p, i);
                det = -det;
            }
            det *= a[i][i];
            for r in i + 1..d {
                let f = a[r][i] / a[i][i];
                for c in i..d {
                    a[r][c] -= f * a[i][c];
                }
            }
        }
        det.round() as i128
    }

    #[test]
    fn lll_keeps_unimodularity_and_reduces() {
        let p = ApproximationProblem::from_reals(
            vec![vec![q(141421356, 100000000)], vec![q(173205080, 100000000)]],
            128,
        )
        .unwrap();
        let shape = PathSpec::standard(2, 1).box_shape(12.0).unwrap();
        let scaler = Scaler::new(&p, &shape);
        let mut b = Basis::identity(3, &scaler);
        lll(&mut b, 0, &scaler).unwrap();
        assert_eq!(det(&b.cols).abs(), 1);
        let g = gso(&b.images);
        for k in 1..3 {
            for j in 0..k {
                assert!(g.mu[k][j].abs() <= 0.51 + 1e-9);
            }
            assert!(g.bstar_sq[k] >= (LLL_DELTA - g.mu[k][k - 1].powi(2)) * g.bstar_sq[k - 1] * (1.0 - 1e-9));
        }
    }

    #[test]
    fn absorb_makes_vector_primitive_in_block() {
        let p = ApproximationProblem::zero(2, 1).unwrap();
        let shape = PathSpec::standard(2, 1).box_shape(0.0).unwrap();
        let scaler = Scaler::new(&p, &shape);
        let mut b = Basis::identity(3, &scaler);
        // v = 4 e_1 + 6 e_2 + 9 e_3: gcd 1 in the whole space.
        absorb(&mut b, 0, &[4, 6, 9], &scaler).unwrap();
        assert_eq!(det(&b.cols).abs(), 1);
        assert_eq!(b.cols[0], ints(&[4, 6, 9]));
        // Now absorb a vector with outer gcd 2 relative to the first column.
        let c = [1, 0, 0];
        let mut b2 = Basis::identity(3, &scaler);
        absorb(&mut b2, 0, &c, &scaler).unwrap();
        absorb(&mut b2, 1, &[5, 2, 4], &scaler).unwrap();
        assert_eq!(det(&b2.cols).abs(), 1);
        // Column 1 is (w - 5 b_0) / 2 = (0, 1, 2).
        assert_eq!(b2.cols[1], ints(&[0, 1, 2]));
    }
}
