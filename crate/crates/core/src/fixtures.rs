//! Test matrices: seeded uniform, powers of an algebraic number, Liouville
//! sums, exact rationals and user-supplied entries, plus their JSON format.

use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{dyadic_round, format_rational, parse_rational};
use crate::problem::{ApproximationProblem, DEFAULT_PRECISION_BITS};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FixtureKind {
    /// Independent uniform entries on (0, 1), one ChaCha stream per entry.
    RandomUniform,
    /// Entries θ, θ², …, θ^{nm} (row-major) for the real root θ of
    /// `polynomial` (constant term first) inside `interval`.
    AlgebraicPower { polynomial: Vec<i64>, interval: [String; 2] },
    /// Entry (1,1) is Σ_{k=1..terms} base^{−k!}; the others are uniform.
    Liouville { base: u32, terms: u32 },
    /// Exact rational entries ("p/q" or decimal literals), row-major rows.
    Rational { entries: Vec<Vec<String>> },
    /// Entries standing for real numbers, rounded to the working precision.
    User { entries: Vec<Vec<String>> },
}

fn default_bits() -> u32 {
    DEFAULT_PRECISION_BITS
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureSpec {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
    #[serde(flatten)]
    pub kind: FixtureKind,
}

impl FixtureSpec {
    pub fn random(n: usize, m: usize, seed: u64) -> Self {
        Self {
            name: format!("random-{n}x{m}-s{seed}"),
            n,
            m,
            seed,
            precision_bits: DEFAULT_PRECISION_BITS,
            kind: FixtureKind::RandomUniform,
        }
    }

    pub fn rational(entries: &[&[&str]]) -> Self {
        let rows: Vec<Vec<String>> = entries.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
        Self {
            name: "rational".into(),
            n: rows.len(),
            m: rows.first().map_or(0, Vec::len),
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
            kind: FixtureKind::Rational { entries: rows },
        }
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision_bits = bits;
        self
    }
}

/// Uniform (0, 1) value with `bits` random bits; raising `bits` extends the
/// same binary expansion.
fn uniform_entry(seed: u64, stream: u64, bits: u32) -> BigRational {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let words = bits.div_ceil(64) as usize;
    let mut v = BigInt::zero();
    for _ in 0..words {
        v = (v << 64) + BigInt::from(rng.next_u64());
    }
    v >>= words * 64 - bits as usize;
    if v.is_zero() {
        v = BigInt::one();
    }
    BigRational::new(v, BigInt::one() << bits as usize)
}

fn eval_poly(coeffs: &[BigInt], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
}

/// A root of the integer polynomial inside `[a, b]` to within `2^-bits`,
/// by bisection from a sign change at the endpoints.
pub fn isolate_root(polynomial: &[i64], a: &BigRational, b: &BigRational, bits: u32) -> Result<BigRational> {
    let coeffs: Vec<BigInt> = polynomial.iter().map(|&c| BigInt::from(c)).collect();
    if coeffs.iter().all(Zero::is_zero) {
        return Err(Error::NoRealRoot("zero polynomial".into()));
    }
    let (mut lo, mut hi) = if a <= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    let (flo, fhi) = (eval_poly(&coeffs, &lo), eval_poly(&coeffs, &hi));
    if flo.is_zero() {
        return Ok(lo);
    }
    if fhi.is_zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRealRoot(format!(
            "polynomial {polynomial:?} has no sign change on [{}, {}]",
            format_rational(&lo),
            format_rational(&hi)
        )));
    }
    let low_sign = flo.signum();
    let eps = BigRational::new(BigInt::one(), BigInt::one() << bits as usize);
    let two = BigRational::from_integer(2.into());
    while &hi - &lo > eps {
        let mid = (&lo + &hi) / &two;
        let f = eval_poly(&coeffs, &mid);
        if f.is_zero() {
            return Ok(mid);
        }
        if f.signum() == low_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) / two)
}

fn liouville(base: u32, terms: u32) -> Result<BigRational> {
    if base < 2 || terms == 0 {
        return Err(Error::Config(format!("Liouville sum needs base ≥ 2 and terms ≥ 1, got {base}, {terms}")));
    }
    let mut sum = BigRational::zero();
    let mut fact: usize = 1;
    for k in 1..=terms as usize {
        fact *= k;
        sum += BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(base), fact));
    }
    Ok(sum)
}

fn parse_rows(entries: &[Vec<String>], n: usize, m: usize) -> Result<Vec<Vec<BigRational>>> {
    if entries.len() != n || entries.iter().any(|r| r.len() != m) {
        return Err(Error::InvalidProblem(format!("entries do not form a {n} × {m} matrix")));
    }
    entries.iter().map(|r| r.iter().map(|e| parse_rational(e)).collect()).collect()
}

/// Builds the matrix described by `spec`.
pub fn generate(spec: &FixtureSpec) -> Result<ApproximationProblem> {
    let (n, m, bits) = (spec.n, spec.m, spec.precision_bits);
    let uniform_rows = || -> Vec<Vec<BigRational>> {
        (0..n)
            .map(|j| (0..m).map(|i| uniform_entry(spec.seed, (j * m + i) as u64, bits)).collect())
            .collect()
    };
    match &spec.kind {
        FixtureKind::RandomUniform => ApproximationProblem::from_parts(n, m, uniform_rows(), vec![false; n * m], bits),
        FixtureKind::AlgebraicPower { polynomial, interval } => {
            let a = parse_rational(&interval[0])?;
            let b = parse_rational(&interval[1])?;
            let theta = isolate_root(polynomial, &a, &b, bits + 64)?;
            let mut power = BigRational::one();
            let mut rows = vec![Vec::with_capacity(m); n];
            for row in rows.iter_mut() {
                for _ in 0..m {
                    power *= &theta;
                    row.push(dyadic_round(&power, bits));
                }
            }
            ApproximationProblem::from_parts(n, m, rows, vec![false; n * m], bits)
        }
        FixtureKind::Liouville { base, terms } => {
            let mut rows = uniform_rows();
            rows[0][0] = liouville(*base, *terms)?;
            let mut exact = vec![false; n * m];
            exact[0] = true;
            ApproximationProblem::from_parts(n, m, rows, exact, bits)
        }
        FixtureKind::Rational { entries } => {
            ApproximationProblem::from_parts(n, m, parse_rows(entries, n, m)?, vec![true; n * m], bits)
        }
        FixtureKind::User { entries } => {
            let rows = parse_rows(entries, n, m)?;
            let rows = rows.iter().map(|r| r.iter().map(|v| dyadic_round(v, bits)).collect()).collect();
            ApproximationProblem::from_parts(n, m, rows, vec![false; n * m], bits)
        }
    }
}

/// On-disk form: the spec plus the materialised entries as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureFile {
    #[serde(flatten)]
    pub spec: FixtureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub materialized: Option<Materialized>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Materialized {
    pub values: Vec<Vec<String>>,
    pub exact: Vec<Vec<bool>>,
}

impl FixtureFile {
    pub fn from_spec(spec: &FixtureSpec) -> Result<Self> {
        let p = generate(spec)?;
        let values = (0..p.n()).map(|j| (0..p.m()).map(|i| format_rational(p.entry(j, i))).collect()).collect();
        let exact = (0..p.n()).map(|j| (0..p.m()).map(|i| p.is_entry_exact(j, i)).collect()).collect();
        Ok(Self { spec: spec.clone(), materialized: Some(Materialized { values, exact }) })
    }

    /// The stored entries when present, otherwise a fresh generation.
    pub fn problem(&self) -> Result<ApproximationProblem> {
        let Some(mat) = &self.materialized else { return generate(&self.spec) };
        let (n, m) = (self.spec.n, self.spec.m);
        let rows = parse_rows(&mat.values, n, m)?;
        if mat.exact.len() != n || mat.exact.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidProblem("exactness mask does not match the entries".into()));
        }
        let exact = mat.exact.iter().flatten().copied().collect();
        ApproximationProblem::from_parts(n, m, rows, exact, self.spec.precision_bits)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Shapes of the default corpus.
pub const CORPUS_SHAPES: [(usize, usize); 5] = [(2, 1), (1, 2), (2, 2), (3, 1), (1, 3)];

/// Random fixtures of the default corpus (five seeds per shape).
pub fn random_corpus() -> Vec<FixtureSpec> {
    CORPUS_SHAPES
        .iter()
        .flat_map(|&(n, m)| (1..=5).map(move |seed| FixtureSpec::random(n, m, seed)))
        .collect()
}

/// Per shape: five uniform, two algebraic, one rational and one Liouville
/// fixture.
pub fn default_corpus() -> Vec<FixtureSpec> {
    let mut out = Vec::new();
    for &(n, m) in &CORPUS_SHAPES {
        out.extend((1..=5).map(|seed| FixtureSpec::random(n, m, seed)));
        // θ, …, θ^{nm} must stay independent of 1 over Q, so the degree
        // exceeds nm: 2^{1/(nm+1)} and the root of x^5 − x − 1.
        let mut radical = vec![0i64; n * m + 2];
        radical[0] = -2;
        radical[n * m + 1] = 1;
        for (tag, polynomial) in [("radical", radical), ("quintic", vec![-1, -1, 0, 0, 0, 1])] {
            out.push(FixtureSpec {
                name: format!("algebraic-{tag}-{n}x{m}"),
                n,
                m,
                seed: 0,
                precision_bits: DEFAULT_PRECISION_BITS,
                kind: FixtureKind::AlgebraicPower { polynomial, interval: ["1".into(), "2".into()] },
            });
        }
        let rational: Vec<Vec<String>> = (0..n)
            .map(|j| (0..m).map(|i| format!("1/{}", j * m + i + 2)).collect())
            .collect();
        out.push(FixtureSpec {
            name: format!("rational-{n}x{m}"),
            n,
            m,
            seed: 0,
            precision_bits: DEFAULT_PRECISION_BITS,
            kind: FixtureKind::Rational { entries: rational },
        });
        out.push(FixtureSpec {
            name: format!("liouville-{n}x{m}"),
            n,
            m,
            seed: 11,
            precision_bits: DEFAULT_PRECISION_BITS,
            kind: FixtureKind::Liouville { base: 10, terms: 5 },
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_fixture_is_exact() {
        let spec = FixtureSpec::rational(&[&["1/2"], &["1/3"]]);
        let p = generate(&spec).unwrap();
        assert!(p.all_exact());
        assert_eq!(p.entry(1, 0), &BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn cube_root_matches_integer_root() {
        let spec = FixtureSpec {
            name: "cbrt".into(),
            n: 2,
            m: 1,
            seed: 0,
            precision_bits: 192,
            kind: FixtureKind::AlgebraicPower { polynomial: vec![-2, 0, 0, 1], interval: ["1".into(), "2".into()] },
        };
        let p = generate(&spec).unwrap();
        // floor(2^{1/3} · 2^192) from the integer cube root of 2 · 2^576.
        let scaled: BigInt = BigInt::from(2) << 576usize;
        let root = scaled.cbrt();
        let want = BigRational::new(root, BigInt::one() << 192usize);
        let diff = (p.entry(0, 0) - &want).abs();
        assert!(diff <= BigRational::new(BigInt::one(), BigInt::one() << 192usize));
        let sq = (p.entry(1, 0) - &want * &want).abs();
        assert!(sq <= BigRational::new(BigInt::from(8), BigInt::one() << 192usize));
    }

    #[test]
    fn missing_root_is_reported() {
        let spec = FixtureSpec {
            name: "none".into(),
            n: 2,
            m: 1,
            seed: 0,
            precision_bits: 128,
            kind: FixtureKind::AlgebraicPower { polynomial: vec![1, 0, 1], interval: ["-5".into(), "5".into()] },
        };
        assert!(matches!(generate(&spec), Err(Error::NoRealRoot(_))));
    }

    #[test]
    fn liouville_digits_are_deterministic() {
        let spec = FixtureSpec {
            name: "l".into(),
            n: 1,
            m: 2,
            seed: 3,
            precision_bits: 128,
            kind: FixtureKind::Liouville { base: 10, terms: 5 },
        };
        let p = generate(&spec).unwrap();
        let want = liouville(10, 5).unwrap();
        assert_eq!(p.entry(0, 0), &want);
        assert!(p.is_entry_exact(0, 0) && !p.is_entry_exact(0, 1));
        assert_eq!(generate(&spec).unwrap(), p);
        let digits = crate::numeric::format_rational(&want);
        // Decimal digits 1, 2, 6 and 24 are set.
        assert!(digits.starts_with(&format!("110001{}1", "0".repeat(17))));
    }

    #[test]
    fn uniform_prefix_is_stable_under_precision() {
        let a = generate(&FixtureSpec::random(2, 2, 9)).unwrap();
        let b = generate(&FixtureSpec::random(2, 2, 9).with_precision(1024)).unwrap();
        for j in 0..2 {
            for i in 0..2 {
                let diff = (a.entry(j, i) - b.entry(j, i)).abs();
                assert!(diff < BigRational::new(BigInt::one(), BigInt::one() << 191usize));
                assert!(a.entry(j, i) > &BigRational::zero() && a.entry(j, i) < &BigRational::one());
            }
        }
        assert_ne!(a, generate(&FixtureSpec::random(2, 2, 10)).unwrap());
    }

    #[test]
    fn file_round_trip_is_exact() {
        for spec in default_corpus().iter().filter(|s| s.n == 2 && s.m == 1) {
            let file = FixtureFile::from_spec(spec).unwrap();
            let back: FixtureFile = serde_json::from_str(&file.to_json().unwrap()).unwrap();
            assert_eq!(back, file);
            assert_eq!(back.problem().unwrap(), generate(spec).unwrap());
        }
        let bare: FixtureFile =
            serde_json::from_str(r#"{"kind": "rational", "n": 2, "m": 1, "entries": [["1/2"], ["1/3"]]}"#).unwrap();
        assert!(bare.problem().unwrap().all_exact());
    }

    #[test]
    fn corpus_layout() {
        let c = default_corpus();
        assert_eq!(c.len(), 45);
        assert_eq!(random_corpus().len(), 25);
        let mut names: Vec<_> = c.iter().map(|s| s.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 45);
        for spec in &c {
            if let FixtureKind::AlgebraicPower { polynomial, .. } = &spec.kind {
                assert!(polynomial.len() - 1 > spec.n * spec.m, "{}", spec.name);
            }
        }
        assert!(c.iter().any(|s| s.name == "algebraic-radical-2x1"));
    }
}
