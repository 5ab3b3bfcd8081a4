//! Successive minima of Λ with respect to a diagonal box.
//!
//! λ_p is found greedily: once witnesses w_1…w_{p−1} are known, the basis is
//! rewritten so that its first p−1 columns span the saturation of
//! ⟨w_1…w_{p−1}⟩, and λ_p is the smallest scaled sup-norm of a lattice
//! vector whose coefficients on the remaining columns are not all zero.
//!
//! The enumeration is depth-first over basis coefficients. Narrow levels use
//! the usual Euclidean bound (the sup-ball of radius R sits inside the
//! Euclidean ball of radius √d·R). Levels whose Euclidean range is huge, which
//! happens when the minima are spread over many orders of magnitude, are
//! walked outward from the optimum of the real relaxation and cut as soon as
//! the relaxation exceeds the incumbent; by convexity nothing beyond can do
//! better.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

use super::chebyshev::chebyshev;
use super::reduce::{absorb, gso, lll, Basis, Gso};
use super::{big_to_f64, BoxShape, Lattice, Scaler};
use crate::problem::ApproximationProblem;

/// Levels whose Euclidean coefficient range is wider than this are walked
/// with the sup-norm relaxation instead of being listed in full.
const WIDE: f64 = 24.0;
/// Relative slack when cutting on the relaxation bound.
const CUT: f64 = 1e-13;
/// Relative window in which visited vectors are treated as ties.
const TIE: f64 = 1e-12;

/// Tuning of the successive-minima search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaConfig {
    /// Target relative accuracy ε of every λ_p.
    pub epsilon: f64,
    /// Maximal number of enumeration nodes per minimum.
    pub node_budget: usize,
}

impl Default for MinimaConfig {
    fn default() -> Self {
        Self { epsilon: 1e-12, node_budget: 20_000_000 }
    }
}

/// Result of [`successive_minima`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minima {
    pub lambdas: Vec<f64>,
    /// Integer coordinates `z = (x, y)` of the witnesses, first nonzero
    /// coordinate positive.
    pub witnesses: Vec<Vec<BigInt>>,
    /// Exact values, available when Θ and the box are rational.
    pub exact_lambdas: Option<Vec<BigRational>>,
    /// A reduced basis for the box, useful to warm-start nearby flow times.
    pub reduced_basis: Vec<Vec<BigInt>>,
}

/// All d successive minima of `lattice` for the box `shape`.
pub fn successive_minima(lattice: &Lattice, shape: &BoxShape, cfg: &MinimaConfig) -> Result<Minima> {
    minima_from(lattice.problem(), shape, cfg, None, lattice.dimension())
        .map_err(|e| e.at(shape.s))
}

/// The first `count` minima, starting the reduction from `warm` if given.
pub(crate) fn minima_from(
    problem: &ApproximationProblem,
    shape: &BoxShape,
    cfg: &MinimaConfig,
    warm: Option<&[Vec<BigInt>]>,
    count: usize,
) -> Result<Minima> {
    let d = problem.d();
    if shape.half_sides.len() != d {
        return Err(Error::Incompatible(format!(
            "box has {} sides, lattice dimension is {d}",
            shape.half_sides.len()
        )));
    }
    if shape.half_sides.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
        return Err(Error::OutOfRange("box half-sides must be positive and finite".into()));
    }
    let scaler = Scaler::new(problem, shape);
    let start = match warm {
        Some(cols) if cols.len() == d => cols.to_vec(),
        _ => ladder(problem, &shape.half_sides)?,
    };
    let mut basis = Basis::new(start, &scaler);
    lll(&mut basis, 0, &scaler)?;
    let reduced_basis = basis.cols.clone();

    let mut lambdas = Vec::with_capacity(count);
    let mut witnesses = Vec::with_capacity(count);
    let mut exact = scaler.is_exact().then(Vec::new);
    for k in 0..count.min(d) {
        if k > 0 {
            lll(&mut basis, k, &scaler)?;
        }
        let g = gso(&basis.images);
        let mut search = Search::new(&basis.images, &g, k, Mode::Minimize, cfg.node_budget);
        search.seed_with_outer_columns();
        search.run()?;
        let (coeffs, z, lambda, lambda_exact) = pick(&basis, &scaler, search.candidates)?;
        check_precision(problem, &scaler, &z, lambda, cfg, shape.s)?;
        absorb(&mut basis, k, &coeffs, &scaler)?;
        lambdas.push(lambda);
        witnesses.push(z);
        if let (Some(ex), Some(v)) = (exact.as_mut(), lambda_exact) {
            ex.push(v);
        }
    }
    Ok(Minima { lambdas, witnesses, exact_lambdas: exact, reduced_basis })
}

/// Reduced basis for a box reached from the unit cube through boxes
/// `h_i^f`, `f = 1/K, …, 1`, so that every reduction starts close to reduced
/// and integer coefficients stay small.
fn ladder(problem: &ApproximationProblem, half_sides: &[f64]) -> Result<Vec<Vec<BigInt>>> {
    let logs: Vec<f64> = half_sides.iter().map(|h| h.ln()).collect();
    let spread = logs.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let rungs = (spread / 0.5).ceil().max(1.0) as usize;
    let mut cols: Option<Vec<Vec<BigInt>>> = None;
    for r in 1..=rungs {
        let f = r as f64 / rungs as f64;
        let shape = BoxShape {
            s: f64::NAN,
            half_sides: logs.iter().map(|l| (l * f).exp()).collect(),
            exact: None,
        };
        let scaler = Scaler::new(problem, &shape);
        let mut basis = match cols.take() {
            Some(c) => Basis::new(c, &scaler),
            None => Basis::identity(problem.d(), &scaler),
        };
        lll(&mut basis, 0, &scaler)?;
        cols = Some(basis.cols);
    }
    Ok(cols.expect("at least one rung"))
}

/// All nonzero lattice points (one per ± pair, first nonzero coordinate
/// positive) whose scaled sup-norm is at most 1 for the box `half_sides`.
pub(crate) fn points_in_box(
    problem: &ApproximationProblem,
    half_sides: &[f64],
    cfg: &MinimaConfig,
    max_points: usize,
) -> Result<Vec<Vec<BigInt>>> {
    let shape = BoxShape { s: f64::NAN, half_sides: half_sides.to_vec(), exact: None };
    let scaler = Scaler::new(problem, &shape);
    let mut basis = Basis::new(ladder(problem, half_sides)?, &scaler);
    lll(&mut basis, 0, &scaler)?;
    let g = gso(&basis.images);
    let bound = 1.0 + 1e-9;
    let mut search = Search::new(&basis.images, &g, 0, Mode::Collect { bound, max_points }, cfg.node_budget);
    search.best = bound;
    search.radius_sq = problem.d() as f64 * bound * bound * (1.0 + 1e-9);
    search.run()?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (_, c) in search.candidates {
        let mut z = basis.combine(&c);
        canonical_sign(&mut z);
        if scaler.sup_norm(&z) <= 1.0 + 1e-12 && seen.insert(z.clone()) {
            out.push(z);
        }
    }
    out.sort();
    Ok(out)
}

fn check_precision(
    problem: &ApproximationProblem,
    scaler: &Scaler,
    z: &[BigInt],
    lambda: f64,
    cfg: &MinimaConfig,
    s: f64,
) -> Result<()> {
    let trunc = problem.truncation_bound();
    if trunc == 0.0 {
        return Ok(());
    }
    let m = problem.m();
    let x1: f64 = z[..m].iter().map(|v| big_to_f64(v).abs()).sum();
    let widest = scaler.inv_half()[m..].iter().fold(0.0f64, |a, v| a.max(*v));
    let err = trunc * x1 * widest;
    if err > cfg.epsilon * lambda {
        return Err(Error::PrecisionInsufficient {
            s,
            truncation: err,
            scale: lambda,
            bits: problem.precision_bits(),
        });
    }
    Ok(())
}

pub(crate) fn canonical_sign(z: &mut [BigInt]) {
    if z.iter().find(|v| !v.is_zero()).is_some_and(Signed::is_negative) {
        for v in z.iter_mut() {
            *v = -std::mem::take(v);
        }
    }
}

/// Deterministic preference among vectors of equal norm: smaller ℓ¹ norm,
/// then lexicographically larger (so e_1 precedes e_2 precedes e_3).
fn tie_key(z: &[BigInt]) -> (BigInt, std::cmp::Reverse<Vec<BigInt>>) {
    (z.iter().map(Signed::abs).sum(), std::cmp::Reverse(z.to_vec()))
}

type Picked = (Vec<i128>, Vec<BigInt>, f64, Option<BigRational>);

fn pick(basis: &Basis, scaler: &Scaler, candidates: Vec<(f64, Vec<i128>)>) -> Result<Picked> {
    let mut evaluated = Vec::with_capacity(candidates.len());
    for (_, c) in candidates {
        let mut z = basis.combine(&c);
        let sign_flipped = z.iter().find(|v| !v.is_zero()).is_some_and(Signed::is_negative);
        canonical_sign(&mut z);
        let norm = scaler.sup_norm(&z);
        let exact = scaler.sup_norm_exact(&z);
        let c = if sign_flipped { c.iter().map(|v| -v).collect() } else { c };
        evaluated.push((c, z, norm, exact));
    }
    if evaluated.is_empty() {
        return Err(Error::EnumerationExhausted("no candidate vector found".into()));
    }
    let exact_mode = evaluated.iter().all(|e| e.3.is_some());
    let best = if exact_mode {
        evaluated.iter().map(|e| e.3.clone().unwrap()).min().unwrap()
    } else {
        BigRational::from_integer(0.into())
    };
    let min_norm = evaluated.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
    let tied = |e: &Picked| {
        if exact_mode {
            e.3.as_ref() == Some(&best)
        } else {
            e.2 <= min_norm * (1.0 + 1e-14)
        }
    };
    let chosen = evaluated
        .into_iter()
        .filter(tied)
        .min_by(|a, b| tie_key(&a.1).cmp(&tie_key(&b.1)))
        .expect("at least one tied candidate");
    Ok(chosen)
}

#[derive(Debug, Clone, Copy)]
enum Mode {
    Minimize,
    Collect { bound: f64, max_points: usize },
}

struct Search<'a> {
    d: usize,
    k: usize,
    images: &'a [Vec<f64>],
    g: &'a Gso,
    mode: Mode,
    best: f64,
    radius_sq: f64,
    candidates: Vec<(f64, Vec<i128>)>,
    c: Vec<i128>,
    partial: Vec<Vec<f64>>,
    eucl: Vec<f64>,
    nodes: usize,
    budget: usize,
}

impl<'a> Search<'a> {
    fn new(images: &'a [Vec<f64>], g: &'a Gso, k: usize, mode: Mode, budget: usize) -> Self {
        let d = images.len();
        Self {
            d,
            k,
            images,
            g,
            mode,
            best: f64::INFINITY,
            radius_sq: f64::INFINITY,
            candidates: Vec::new(),
            c: vec![0; d],
            partial: vec![vec![0.0; d]; d + 1],
            eucl: vec![0.0; d + 1],
            nodes: 0,
            budget,
        }
    }

    /// Every outer column is admissible, so the shortest one is a valid
    /// starting bound.
    fn seed_with_outer_columns(&mut self) {
        for i in self.k..self.d {
            let n = sup(&self.images[i]);
            let mut c = vec![0; self.d];
            c[i] = 1;
            self.offer(n, c);
        }
    }

    fn run(&mut self) -> Result<()> {
        self.visit(self.d - 1)
    }

    fn offer(&mut self, norm: f64, c: Vec<i128>) {
        match self.mode {
            Mode::Minimize => {
                if norm < self.best * (1.0 - TIE) {
                    self.best = norm;
                    self.radius_sq = self.d as f64 * norm * norm * (1.0 + 1e-9);
                    let limit = norm * (1.0 + TIE);
                    self.candidates.retain(|(n, _)| *n <= limit);
                    self.candidates.push((norm, c));
                } else if norm <= self.best * (1.0 + TIE) {
                    self.candidates.push((norm, c));
                }
            }
            Mode::Collect { bound, .. } => {
                if norm <= bound {
                    self.candidates.push((norm, c));
                }
            }
        }
    }

    fn cut(&self, relaxed: f64) -> bool {
        match self.mode {
            Mode::Minimize => relaxed >= self.best * (1.0 - CUT),
            Mode::Collect { bound, .. } => relaxed > bound * (1.0 + CUT),
        }
    }

    fn visit(&mut self, l: usize) -> Result<()> {
        if self.k > 0 && l + 1 == self.k && self.c[self.k..].iter().all(|&v| v == 0) {
            return Ok(());
        }
        let g = self.g;
        let center = -((l + 1)..self.d)
            .map(|j| g.mu[j][l] * self.c[j] as f64)
            .sum::<f64>();
        let rem = self.radius_sq - self.eucl[l + 1];
        if rem < 0.0 {
            return Ok(());
        }
        let hw = (rem / g.bstar_sq[l]).sqrt();
        let lo = (center - hw).ceil();
        let hi = (center + hw).floor();
        if lo > hi {
            return Ok(());
        }
        if !(lo.abs() < 1e30 && hi.abs() < 1e30) {
            return Err(Error::CoordinateOverflow("enumeration range".into()));
        }
        if hi - lo + 1.0 <= WIDE {
            self.narrow(l, center)
        } else {
            self.wide(l, center, lo, hi)
        }
    }

    /// Schnorr–Euchner order around the Euclidean center.
    fn narrow(&mut self, l: usize, center: f64) -> Result<()> {
        let c0 = center.round();
        let bsq = self.g.bstar_sq[l];
        let (mut up, mut down) = (c0, c0 - 1.0);
        let (mut up_alive, mut down_alive) = (true, true);
        while up_alive || down_alive {
            let pick_up = up_alive && (!down_alive || (up - center).abs() <= (center - down).abs());
            let c = if pick_up { up } else { down };
            let e = self.eucl[l + 1] + (c - center).powi(2) * bsq;
            if e > self.radius_sq * (1.0 + 1e-12) {
                if pick_up {
                    up_alive = false;
                } else {
                    down_alive = false;
                }
                continue;
            }
            self.descend(l, c as i128, e)?;
            if pick_up {
                up += 1.0;
            } else {
                down -= 1.0;
            }
        }
        Ok(())
    }

    fn relaxed_at(&self, l: usize, a: &[f64], x: f64) -> f64 {
        let shifted: Vec<f64> = a.iter().zip(&self.images[l]).map(|(ai, bi)| ai + x * bi).collect();
        let cols: Vec<&[f64]> = self.images[..l].iter().map(Vec::as_slice).collect();
        chebyshev(&shifted, &cols).0
    }

    fn wide(&mut self, l: usize, center: f64, lo: f64, hi: f64) -> Result<()> {
        let a = self.partial[l + 1].clone();
        let cols: Vec<&[f64]> = self.images[..=l].iter().map(Vec::as_slice).collect();
        let (zstar, t) = chebyshev(&a, &cols);
        if self.cut(zstar) {
            return Ok(());
        }
        // Start from the point of the optimal set nearest to the Euclidean
        // center; the relaxation is convex, so it is monotone on either side.
        let target = zstar * (1.0 + 1e-9) + f64::MIN_POSITIVE;
        let mut start = center;
        if self.relaxed_at(l, &a, center) > target {
            let (mut out, mut inside) = (center, t[l]);
            for _ in 0..200 {
                if (inside - out).abs() < 0.25 {
                    break;
                }
                let mid = 0.5 * (inside + out);
                if self.relaxed_at(l, &a, mid) <= target {
                    inside = mid;
                } else {
                    out = mid;
                }
            }
            start = inside;
        }
        let start = start.clamp(lo - 1.0, hi + 1.0);
        let bsq = self.g.bstar_sq[l];
        let (mut up, mut down) = (start.floor() + 1.0, start.floor());
        let (mut up_alive, mut down_alive) = (true, true);
        while up_alive || down_alive {
            let pick_up = up_alive && (!down_alive || (up - start).abs() <= (start - down).abs());
            let c = if pick_up { up } else { down };
            let in_range = c >= lo && c <= hi;
            let stop = !in_range || self.cut(self.relaxed_at(l, &a, c));
            if stop {
                if pick_up {
                    up_alive = false;
                } else {
                    down_alive = false;
                }
                continue;
            }
            let e = self.eucl[l + 1] + (c - center).powi(2) * bsq;
            if e <= self.radius_sq * (1.0 + 1e-12) {
                self.descend(l, c as i128, e)?;
            }
            if pick_up {
                up += 1.0;
            } else {
                down -= 1.0;
            }
        }
        Ok(())
    }

    fn descend(&mut self, l: usize, c: i128, e: f64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::EnumerationExhausted(format!(
                "more than {} enumeration nodes",
                self.budget
            )));
        }
        self.c[l] = c;
        self.eucl[l] = e;
        let cf = c as f64;
        let (head, tail) = self.partial.split_at_mut(l + 1);
        for ((dst, src), b) in head[l].iter_mut().zip(&tail[0]).zip(&self.images[l]) {
            *dst = src + cf * b;
        }
        if l == 0 {
            self.leaf()?;
        } else {
            self.visit(l - 1)?;
        }
        self.c[l] = 0;
        Ok(())
    }

    fn leaf(&mut self) -> Result<()> {
        if self.c[self.k..].iter().all(|&v| v == 0) {
            return Ok(());
        }
        let norm = sup(&self.partial[0]);
        let c = self.c.clone();
        self.offer(norm, c);
        if let Mode::Collect { max_points, .. } = self.mode {
            if self.candidates.len() > max_points {
                return Err(Error::EnumerationExhausted(format!(
                    "more than {max_points} lattice points in the box"
                )));
            }
        }
        Ok(())
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Rank of a set of integer vectors, by exact fraction-free elimination.
pub(crate) fn integer_rank(vectors: &[Vec<BigInt>]) -> usize {
    let mut rows: Vec<Vec<BigInt>> = vectors.to_vec();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let a = rows[rank][col].clone();
                let b = rows[r][col].clone();
                for c in 0..cols {
                    let v = &rows[r][c] * &a - &rows[rank][c] * &b;
                    rows[r][c] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}
