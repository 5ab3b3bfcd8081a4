//! Exterior algebra over a `d`-dimensional coordinate space.
//!
//! A grade-`p` [`MultiVector`] stores its `C(d, p)` Plücker coordinates in
//! lexicographic order of the index sets, compared as sorted tuples:
//! for `d = 4, p = 2` the order is `{0,1} {0,2} {0,3} {1,2} {1,3} {2,3}`.
//! Index sets are zero-based throughout the crate.

use std::fmt;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::numeric::format_rational;
use crate::problem::ApproximationProblem;

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// A strictly increasing set of zero-based indices below `dimension`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    members: Vec<usize>,
}

impl IndexSet {
    pub fn new(members: Vec<usize>, dimension: usize) -> Result<Self> {
        if members.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::IndexOutOfRange(format!(
                "index set {members:?} is not strictly increasing"
            )));
        }
        if let Some(&last) = members.last() {
            if last >= dimension {
                return Err(Error::IndexOutOfRange(format!(
                    "index {last} outside dimension {dimension}"
                )));
            }
        }
        Ok(Self { members })
    }

    pub fn empty() -> Self {
        Self { members: Vec::new() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn grade(&self) -> usize {
        self.members.len()
    }

    /// Position of this set among all `grade`-subsets of `0..dimension` in
    /// lexicographic order.
    pub fn rank(&self, dimension: usize) -> usize {
        let k = self.members.len();
        let mut rank = 0;
        let mut next = 0;
        for (i, &a) in self.members.iter().enumerate() {
            for c in next..a {
                rank += binomial(dimension - 1 - c, k - 1 - i);
            }
            next = a + 1;
        }
        rank
    }

    /// Inverse of [`IndexSet::rank`].
    pub fn unrank(dimension: usize, grade: usize, mut rank: usize) -> Self {
        let mut members = Vec::with_capacity(grade);
        let mut c = 0;
        for i in 0..grade {
            loop {
                let block = binomial(dimension - 1 - c, grade - 1 - i);
                if rank < block {
                    break;
                }
                rank -= block;
                c += 1;
            }
            members.push(c);
            c += 1;
        }
        Self { members }
    }

    fn mask(&self) -> u64 {
        self.members.iter().fold(0, |m, &i| m | (1 << i))
    }
}

/// All `k`-subsets of `0..d` in lexicographic order.
pub fn subsets(d: usize, k: usize) -> Vec<IndexSet> {
    (0..binomial(d, k)).map(|r| IndexSet::unrank(d, k, r)).collect()
}

/// A homogeneous element of ∧^p(R^d) with Plücker coordinates in
/// lexicographic subset order.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiVector<T> {
    dimension: usize,
    grade: usize,
    coeffs: Vec<T>,
}

impl<T> MultiVector<T>
where
    T: Num + Clone + Neg<Output = T>,
{
    pub fn zero(dimension: usize, grade: usize) -> Self {
        Self { dimension, grade, coeffs: vec![T::zero(); binomial(dimension, grade)] }
    }

    /// The grade-0 element with value `value`.
    pub fn scalar(dimension: usize, value: T) -> Self {
        Self { dimension, grade: 0, coeffs: vec![value] }
    }

    /// A grade-1 element from its coordinates.
    pub fn vector(coords: Vec<T>) -> Self {
        Self { dimension: coords.len(), grade: 1, coeffs: coords }
    }

    pub fn from_coeffs(dimension: usize, grade: usize, coeffs: Vec<T>) -> Result<Self> {
        let expected = binomial(dimension, grade);
        if coeffs.len() != expected {
            return Err(Error::Incompatible(format!(
                "grade {grade} in dimension {dimension} needs {expected} coefficients, got {}",
                coeffs.len()
            )));
        }
        Ok(Self { dimension, grade, coeffs })
    }

    /// The unit blade `e_{i1} ∧ … ∧ e_{ik}`.
    pub fn basis(dimension: usize, set: &IndexSet) -> Self {
        let mut mv = Self::zero(dimension, set.grade());
        mv.coeffs[set.rank(dimension)] = T::one();
        mv
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, set: &IndexSet) -> &T {
        &self.coeffs[set.rank(self.dimension)]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Exterior product. When `p + q > d` the result is the (empty) grade
    /// `p + q` element, which is zero.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dimension != other.dimension {
            return Err(Error::Incompatible(format!(
                "wedge of multivectors in dimensions {} and {}",
                self.dimension, other.dimension
            )));
        }
        let d = self.dimension;
        let grade = self.grade + other.grade;
        let mut out = Self::zero(d, grade);
        if grade > d {
            return Ok(out);
        }
        let left = subsets(d, self.grade);
        let right = subsets(d, other.grade);
        let right_masks: Vec<u64> = right.iter().map(IndexSet::mask).collect();
        for (a, set_a) in self.coeffs.iter().zip(&left) {
            if a.is_zero() {
                continue;
            }
            let mask_a = set_a.mask();
            for ((b, set_b), &mask_b) in other.coeffs.iter().zip(&right).zip(&right_masks) {
                if b.is_zero() || mask_a & mask_b != 0 {
                    continue;
                }
                // Sign of the shuffle that sorts (set_a, set_b).
                let inversions: u32 = set_b
                    .members()
                    .iter()
                    .map(|&j| (mask_a >> (j + 1)).count_ones())
                    .sum();
                let union = IndexSet::from_mask(mask_a | mask_b);
                let slot = &mut out.coeffs[union.rank(d)];
                let term = a.clone() * b.clone();
                *slot = if inversions % 2 == 0 {
                    slot.clone() + term
                } else {
                    slot.clone() - term
                };
            }
        }
        Ok(out)
    }

    /// Wedge of several multivectors, left to right. An empty slice gives the
    /// grade-0 unit.
    pub fn wedge_all(dimension: usize, factors: &[Self]) -> Result<Self> {
        factors
            .iter()
            .try_fold(Self::scalar(dimension, T::one()), |acc, f| acc.wedge(f))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Ok(Self { dimension: self.dimension, grade: self.grade, coeffs })
    }

    pub fn scale(&self, factor: &T) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * factor.clone()).collect();
        Self { dimension: self.dimension, grade: self.grade, coeffs }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> MultiVector<U> {
        MultiVector {
            dimension: self.dimension,
            grade: self.grade,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dimension != other.dimension || self.grade != other.grade {
            return Err(Error::Incompatible(format!(
                "shapes ({}, {}) and ({}, {})",
                self.dimension, self.grade, other.dimension, other.grade
            )));
        }
        Ok(())
    }
}

impl<T> MultiVector<T>
where
    T: Num + Clone + Neg<Output = T> + Signed + PartialOrd,
{
    /// Largest absolute Plücker coordinate; zero for the zero multivector.
    pub fn sup_norm(&self) -> T {
        self.coeffs
            .iter()
            .map(Signed::abs)
            .fold(T::zero(), |m, a| if a > m { a } else { m })
    }
}

impl IndexSet {
    fn from_mask(mut mask: u64) -> Self {
        let mut members = Vec::new();
        while mask != 0 {
            let i = mask.trailing_zeros() as usize;
            members.push(i);
            mask &= mask - 1;
        }
        Self { members }
    }
}

/// Coefficient rendering for JSON export.
pub trait JsonCoefficient {
    fn to_json(&self) -> serde_json::Value;
}

impl JsonCoefficient for i64 {
    fn to_json(&self) -> serde_json::Value {
        (*self).into()
    }
}

impl JsonCoefficient for BigInt {
    fn to_json(&self) -> serde_json::Value {
        match self.to_i64() {
            Some(v) => v.into(),
            None => self.to_string().into(),
        }
    }
}

impl JsonCoefficient for BigRational {
    fn to_json(&self) -> serde_json::Value {
        format_rational(self).into()
    }
}

impl JsonCoefficient for f64 {
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self).map_or(serde_json::Value::Null, Into::into)
    }
}

/// Serialized as a JSON array of coefficients in lexicographic subset order.
impl<T: JsonCoefficient> Serialize for MultiVector<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(&c.to_json())?;
        }
        seq.end()
    }
}

impl<T: fmt::Display> fmt::Display for MultiVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Column `j` (zero-based, `j < m`) of the stacked matrix `(E_m ; Θ)`.
pub fn solution_column(problem: &ApproximationProblem, j: usize) -> MultiVector<BigRational> {
    let (n, m) = (problem.n(), problem.m());
    let mut coords = vec![BigRational::zero(); n + m];
    coords[j] = BigRational::one();
    for i in 0..n {
        coords[m + i] = problem.entry(i, j).clone();
    }
    MultiVector::vector(coords)
}

/// `L_σ = ℓ_{i1} ∧ … ∧ ℓ_{ik}` for `σ ⊆ {0..m}`; `L_∅ = 1`.
pub fn build_l_sigma(
    problem: &ApproximationProblem,
    sigma: &IndexSet,
) -> Result<MultiVector<BigRational>> {
    if let Some(&last) = sigma.members().last() {
        if last >= problem.m() {
            return Err(Error::IndexOutOfRange(format!(
                "σ member {last} is not a column index (m = {})",
                problem.m()
            )));
        }
    }
    let columns: Vec<_> = sigma.members().iter().map(|&j| solution_column(problem, j)).collect();
    MultiVector::wedge_all(problem.d(), &columns)
}

/// Result of [`enumerate_integer_multivectors`].
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub items: Vec<MultiVector<i64>>,
    /// True when the cap stopped the enumeration before it finished.
    pub truncated: bool,
}

/// Lazily yields every nonzero grade-`p` integer multivector with sup-norm at
/// most `height`, once up to sign (first nonzero coordinate positive).
#[derive(Debug, Clone)]
pub struct IntegerMultivectors {
    dimension: usize,
    grade: usize,
    height: i64,
    current: Vec<i64>,
    done: bool,
}

impl IntegerMultivectors {
    pub fn new(dimension: usize, grade: usize, height: i64) -> Result<Self> {
        if height < 1 {
            return Err(Error::Precondition(format!("height must be >= 1, got {height}")));
        }
        let len = binomial(dimension, grade);
        // Counting up from zero in base 2h+1 visits exactly the vectors whose
        // first nonzero coordinate is positive.
        let current = vec![0; len];
        let done = len == 0;
        Ok(Self { dimension, grade, height, current, done })
    }

    fn advance(&mut self) -> bool {
        // Odometer over [-h, h]^N, last coordinate fastest.
        for c in self.current.iter_mut().rev() {
            if *c < self.height {
                *c += 1;
                return true;
            }
            *c = -self.height;
        }
        false
    }
}

impl Iterator for IntegerMultivectors {
    type Item = MultiVector<i64>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            if !self.advance() {
                self.done = true;
                break;
            }
            let first = self.current.iter().find(|&&c| c != 0);
            if matches!(first, Some(&c) if c > 0) {
                return Some(MultiVector {
                    dimension: self.dimension,
                    grade: self.grade,
                    coeffs: self.current.clone(),
                });
            }
        }
        None
    }
}

/// Collects [`IntegerMultivectors`] up to `cap` items, reporting truncation.
pub fn enumerate_integer_multivectors(
    dimension: usize,
    grade: usize,
    height: i64,
    cap: usize,
) -> Result<Enumeration> {
    let mut iter = IntegerMultivectors::new(dimension, grade, height)?;
    let items: Vec<_> = iter.by_ref().take(cap).collect();
    let truncated = items.len() == cap && iter.next().is_some();
    Ok(Enumeration { items, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(d: usize, i: usize) -> MultiVector<i64> {
        let mut c = vec![0; d];
        c[i] = 1;
        MultiVector::vector(c)
    }

    /// Determinant by permutation expansion; independent of the wedge code.
    fn det(m: &[Vec<i64>]) -> i64 {
        let k = m.len();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut total = 0;
        permute(&mut perm, 0, &mut |p| {
            let inv = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
            let prod: i64 = (0..k).map(|i| m[i][p[i]]).product();
            total += if inv % 2 == 0 { prod } else { -prod };
        });
        total
    }

    fn permute(p: &mut Vec<usize>, i: usize, f: &mut dyn FnMut(&[usize])) {
        if i == p.len() {
            f(p);
            return;
        }
        for j in i..p.len() {
            p.swap(i, j);
            permute(p, i + 1, f);
            p.swap(i, j);
        }
    }

    #[test]
    fn rank_is_lexicographic_bijection() {
        for d in 1..=7 {
            for k in 0..=d {
                let all = subsets(d, k);
                assert_eq!(all.len(), binomial(d, k));
                for (r, s) in all.iter().enumerate() {
                    assert_eq!(s.rank(d), r);
                }
                assert!(all.windows(2).all(|w| w[0].members() < w[1].members()));
            }
        }
        assert_eq!(subsets(4, 2).iter().map(|s| s.members().to_vec()).collect::<Vec<_>>(),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn index_set_validation() {
        assert!(IndexSet::new(vec![0, 2], 3).is_ok());
        assert!(IndexSet::new(vec![2, 1], 3).is_err());
        assert!(IndexSet::new(vec![0, 3], 3).is_err());
    }

    #[test]
    fn basis_wedge() {
        let w = e(3, 0).wedge(&e(3, 1)).unwrap();
        assert_eq!(w.coeffs(), &[1, 0, 0]);
        let w = e(3, 1).wedge(&e(3, 0)).unwrap();
        assert_eq!(w.coeffs(), &[-1, 0, 0]);
    }

    #[test]
    fn vector_wedge_itself_vanishes() {
        let v = MultiVector::vector(vec![3i64, -1, 4, 1]);
        assert!(v.wedge(&v).unwrap().is_zero());
    }

    #[test]
    fn two_minors_example() {
        // (1, 0, θ) ∧ (0, 1, η) has coordinates ({0,1}: 1, {0,2}: η, {1,2}: −θ).
        let theta = BigRational::new(2.into(), 7.into());
        let eta = BigRational::new((-3).into(), 5.into());
        let a = MultiVector::vector(vec![BigRational::one(), BigRational::zero(), theta.clone()]);
        let b = MultiVector::vector(vec![BigRational::zero(), BigRational::one(), eta.clone()]);
        let w = a.wedge(&b).unwrap();
        // Oracle: 2x2 minors of the 3x2 matrix [a b], rows (i, j).
        let minor = |i: usize, j: usize| a.coeffs()[i].clone() * b.coeffs()[j].clone()
            - a.coeffs()[j].clone() * b.coeffs()[i].clone();
        assert_eq!(w.coeffs(), &[minor(0, 1), minor(0, 2), minor(1, 2)]);
        assert_eq!(w.coeffs(), &[BigRational::one(), eta, -theta]);
    }

    #[test]
    fn grade_overflow_is_empty() {
        let a = MultiVector::<i64>::basis(3, &IndexSet::new(vec![0, 1], 3).unwrap());
        let b = MultiVector::<i64>::basis(3, &IndexSet::new(vec![1, 2], 3).unwrap());
        let w = a.wedge(&b).unwrap();
        assert_eq!(w.grade(), 4);
        assert!(w.coeffs().is_empty());
        assert!(w.is_zero());
    }

    #[test]
    fn dimension_mismatch_errors() {
        assert!(e(3, 0).wedge(&e(4, 0)).is_err());
    }

    #[test]
    fn sup_norms() {
        assert_eq!(MultiVector::<i64>::zero(4, 2).sup_norm(), 0);
        let v = MultiVector::from_coeffs(3, 2, vec![3i64, -5, 2]).unwrap();
        assert_eq!(v.sup_norm(), 5);
        assert_eq!(MultiVector::scalar(5, 1i64).sup_norm(), 1);
    }

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn l_sigma_construction() {
        let p = ApproximationProblem::exact(vec![vec![q(1, 2)], vec![q(1, 3)]]).unwrap();
        let empty = build_l_sigma(&p, &IndexSet::empty()).unwrap();
        assert_eq!(empty.grade(), 0);
        assert_eq!(empty.coeffs(), &[BigRational::one()]);
        let l1 = build_l_sigma(&p, &IndexSet::new(vec![0], 3).unwrap()).unwrap();
        assert_eq!(l1.coeffs(), &[BigRational::one(), q(1, 2), q(1, 3)]);
        assert!(build_l_sigma(&p, &IndexSet::new(vec![1], 3).unwrap()).is_err());
    }

    #[test]
    fn l_sigma_two_columns_are_minors() {
        let rows = vec![vec![q(1, 2), q(2, 3)], vec![q(-1, 5), q(3, 7)]];
        let p = ApproximationProblem::exact(rows).unwrap();
        let l = build_l_sigma(&p, &IndexSet::new(vec![0, 1], 4).unwrap()).unwrap();
        // Stacked 4x2 matrix (E_2 ; Θ); Plücker coordinate {i,j} = row-minor.
        let stacked = [
            [q(1, 1), q(0, 1)],
            [q(0, 1), q(1, 1)],
            [q(1, 2), q(2, 3)],
            [q(-1, 5), q(3, 7)],
        ];
        for set in subsets(4, 2) {
            let (i, j) = (set.members()[0], set.members()[1]);
            let minor = stacked[i][0].clone() * stacked[j][1].clone()
                - stacked[j][0].clone() * stacked[i][1].clone();
            assert_eq!(l.coeff(&set), &minor, "set {set:?}");
        }
    }

    #[test]
    fn enumeration_counts() {
        let e = enumerate_integer_multivectors(3, 1, 1, usize::MAX).unwrap();
        assert_eq!(e.items.len(), 13);
        assert!(!e.truncated);
        let e = enumerate_integer_multivectors(3, 3, 1, usize::MAX).unwrap();
        assert_eq!(e.items.len(), 1);
        assert_eq!(e.items[0].coeffs(), &[1]);
        let e = enumerate_integer_multivectors(4, 2, 1, usize::MAX).unwrap();
        assert_eq!(e.items.len(), 364);
        let e = enumerate_integer_multivectors(3, 1, 2, usize::MAX).unwrap();
        assert_eq!(e.items.len(), (125 - 1) / 2);
        let capped = enumerate_integer_multivectors(4, 2, 1, 10).unwrap();
        assert_eq!(capped.items.len(), 10);
        assert!(capped.truncated);
        assert!(enumerate_integer_multivectors(3, 1, 0, 10).is_err());
    }

    #[test]
    fn enumeration_is_canonical_and_distinct() {
        let e = enumerate_integer_multivectors(4, 2, 1, usize::MAX).unwrap();
        let mut seen = std::collections::HashSet::new();
        for mv in &e.items {
            assert!(!mv.is_zero());
            assert!(*mv.coeffs().iter().find(|&&c| c != 0).unwrap() > 0);
            assert!(seen.insert(mv.coeffs().to_vec()));
            let neg: Vec<i64> = mv.coeffs().iter().map(|c| -c).collect();
            assert!(!seen.contains(&neg));
        }
    }

    #[test]
    fn json_is_lexicographic_array() {
        let v = MultiVector::from_coeffs(3, 2, vec![1i64, -2, 3]).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), "[1,-2,3]");
        let r = MultiVector::vector(vec![q(1, 2), q(3, 1)]);
        assert_eq!(serde_json::to_string(&r).unwrap(), r#"["1/2","3"]"#);
    }

    fn int_mv(d: usize, p: usize) -> impl Strategy<Value = MultiVector<i64>> {
        prop::collection::vec(-20i64..=20, binomial(d, p))
            .prop_map(move |c| MultiVector::from_coeffs(d, p, c).unwrap())
    }

    fn graded_pair() -> impl Strategy<Value = (MultiVector<i64>, MultiVector<i64>)> {
        (2usize..=6)
            .prop_flat_map(|d| (Just(d), 0..=d))
            .prop_flat_map(|(d, p)| (Just(d), Just(p), 0..=(d - p)))
            .prop_flat_map(|(d, p, q)| (int_mv(d, p), int_mv(d, q)))
    }

    proptest! {
        #[test]
        fn graded_anticommutativity((a, b) in graded_pair()) {
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap();
            let sign = if (a.grade() * b.grade()) % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(ab, ba.scale(&sign));
        }

        #[test]
        fn left_bilinearity((a, b) in graded_pair(), seed in any::<u64>()) {
            let shift: Vec<i64> = (0..a.coeffs().len()).map(|i| ((seed >> (i % 60)) & 7) as i64 - 3).collect();
            let a2 = MultiVector::from_coeffs(a.dimension(), a.grade(), shift).unwrap();
            let lhs = a.add(&a2).unwrap().wedge(&b).unwrap();
            let rhs = a.wedge(&b).unwrap().add(&a2.wedge(&b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sup_norm_of_wedge_is_bounded((a, b) in graded_pair()) {
            let w = a.wedge(&b).unwrap();
            let bound = binomial(a.grade() + b.grade(), a.grade()) as i64 * a.sup_norm() * b.sup_norm();
            prop_assert!(w.sup_norm() <= bound);
        }

        #[test]
        fn vectors_wedge_to_minors(d in 2usize..=6, k in 1usize..=3, data in prop::collection::vec(-9i64..=9, 18)) {
            prop_assume!(k <= d);
            let cols: Vec<Vec<i64>> = (0..k).map(|c| (0..d).map(|r| data[c * 6 + r]).collect()).collect();
            let factors: Vec<_> = cols.iter().cloned().map(MultiVector::vector).collect();
            let w = MultiVector::wedge_all(d, &factors).unwrap();
            for set in subsets(d, k) {
                let rows = set.members();
                let minor: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|c| cols[c][rows[i]]).collect()).collect();
                prop_assert_eq!(*w.coeff(&set), det(&minor));
            }
        }

        #[test]
        fn wedge_is_associative(d in 3usize..=6, data in prop::collection::vec(-5i64..=5, 18)) {
            let a = MultiVector::vector(data[0..d].to_vec());
            let b = MultiVector::vector(data[6..6 + d].to_vec());
            let c = MultiVector::vector(data[12..12 + d].to_vec());
            let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
            let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
