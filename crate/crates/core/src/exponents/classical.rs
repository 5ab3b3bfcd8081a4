//! Classical exponents β₁, α₁ by exhaustive search over x with |x| ≤ t.
//!
//! Fractional parts of the entries are held as 128-bit fixed-point numbers,
//! so Θx mod 1 is accumulated exactly up to the 2^-128 truncation of each
//! entry. Candidates whose distance to Z^n falls below 2^-100 are re-checked
//! in exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::problem::ApproximationProblem;

use super::{schmidt_from_diophantine, Diagnostics, ExponentReport, Method};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalConfig {
    /// Fraction of the threshold range (in log scale) forming the tail.
    pub tail: f64,
    /// Maximal number of x visited (each ± pair once).
    pub point_cap: u64,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self { tail: 0.5, point_cap: 2_000_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalEstimate {
    pub n: usize,
    pub m: usize,
    pub beta: f64,
    pub alpha: f64,
    pub window: [f64; 2],
    pub thresholds: Vec<u64>,
    /// err(t): smallest distance of Θx to Z^n over 0 < |x| ≤ t.
    pub errors: Vec<f64>,
    /// γ(t) = −ln err(t) / ln t.
    pub gammas: Vec<f64>,
    /// `(x, y)` attaining err at the largest threshold reached (or the first
    /// exact solution).
    pub witness: Vec<BigInt>,
    pub exact: bool,
    pub truncated: bool,
    pub tail_samples: usize,
}

impl ClassicalEstimate {
    pub fn report(&self, transposed: bool) -> ExponentReport {
        let floor = self.m as f64 / self.n as f64;
        let (lo, hi) = schmidt_from_diophantine(1, self.beta.max(floor), self.alpha.max(floor), self.n, self.m)
            .expect("exponents are at least m/n");
        let finite = |v: &f64| v.is_finite();
        let tail = &self.gammas[self.gammas.len() - self.tail_samples..];
        let spread = if tail.iter().all(finite) {
            self.beta - self.alpha
        } else if tail.iter().any(finite) {
            f64::INFINITY
        } else {
            0.0
        };
        ExponentReport {
            p: 1,
            method: Method::ClassicalDef1,
            transposed,
            beta: self.beta,
            alpha: self.alpha,
            psi_lower: lo,
            psi_upper: hi,
            window: self.window,
            diagnostics: Diagnostics {
                oscillation: spread,
                samples: self.tail_samples,
                truncated: self.truncated,
                witness: Some(self.witness.clone()),
                ..Default::default()
            },
        }
    }
}

/// About `points` integer thresholds spaced geometrically in [t_min, t_max].
pub fn log_grid(t_min: u64, t_max: u64, points: usize) -> Vec<u64> {
    let (a, b) = ((t_min.max(2) as f64).ln(), (t_max.max(2) as f64).ln());
    let k = points.max(2) - 1;
    let mut out: Vec<u64> = (0..=k)
        .map(|i| (a + (b - a) * i as f64 / k as f64).exp().round() as u64)
        .collect();
    out.dedup();
    if let Some(last) = out.last_mut() {
        *last = t_max.max(2);
    }
    out.dedup();
    out
}

fn fixed_frac(r: &BigRational) -> u128 {
    let frac = r.numer().mod_floor(r.denom());
    let scaled: BigInt = (frac << 128) / r.denom();
    scaled.to_u128().unwrap_or(u128::MAX)
}

fn point_count(t: u64, m: usize) -> f64 {
    ((2.0 * t as f64 + 1.0).powi(m as i32) - 1.0) / 2.0
}

struct Scan<'a> {
    /// `cols[i][j]` = frac(θ_{j,i}) in 0.128 fixed point.
    cols: &'a [Vec<u128>],
    t: i64,
    best: Vec<(u128, Vec<i64>)>,
}

impl Scan<'_> {
    fn run(&mut self, i: usize, acc: &mut Vec<u128>, x: &mut Vec<i64>, height: i64, fixed: bool) {
        let m = self.cols.len();
        let col = &self.cols[i];
        let t = self.t;
        let lo = if fixed { -t } else if i + 1 == m { 1 } else { 0 };
        let saved = acc.clone();
        for (a, c) in acc.iter_mut().zip(col) {
            *a = a.wrapping_add(c.wrapping_mul(lo as i128 as u128));
        }
        for xi in lo..=t {
            x[i] = xi;
            let h = height.max(xi.abs());
            if i + 1 == m {
                let err = acc.iter().map(|&a| a.min(a.wrapping_neg())).max().unwrap_or(0);
                let slot = &mut self.best[h as usize];
                if err < slot.0 {
                    *slot = (err, x.clone());
                }
            } else {
                let mut inner = acc.clone();
                self.run(i + 1, &mut inner, x, h, fixed || xi > 0);
            }
            for (a, c) in acc.iter_mut().zip(col) {
                *a = a.wrapping_add(*c);
            }
        }
        x[i] = 0;
        *acc = saved;
    }
}

fn nearest_y(problem: &ApproximationProblem, x: &[BigInt]) -> Vec<BigInt> {
    let half = BigRational::new(1.into(), 2.into());
    (0..problem.n())
        .map(|j| {
            let mut v = BigRational::zero();
            for (i, xi) in x.iter().enumerate() {
                v += problem.entry(j, i) * BigRational::from_integer(xi.clone());
            }
            (v + &half).floor().to_integer()
        })
        .collect()
}

/// Estimates (β₁, α₁) of Θ (of ᵗΘ when `transposed`) from err(t) on the
/// thresholds `t_grid`.
pub fn classical_estimate(
    problem: &ApproximationProblem,
    t_grid: &[u64],
    transposed: bool,
    cfg: &ClassicalConfig,
) -> Result<ClassicalEstimate> {
    let owned;
    let problem = if transposed {
        owned = problem.transpose();
        &owned
    } else {
        problem
    };
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) || t_grid[0] < 2 {
        return Err(Error::OutOfRange("thresholds must be increasing integers ≥ 2".into()));
    }
    let (n, m) = (problem.n(), problem.m());
    let mut t_max = *t_grid.last().expect("nonempty");
    let mut truncated = false;
    while point_count(t_max, m) > cfg.point_cap as f64 {
        truncated = true;
        t_max = ((2.0 * cfg.point_cap as f64).powf(1.0 / m as f64) - 1.0).floor() as u64 / 2;
        if point_count(t_max, m) > cfg.point_cap as f64 {
            t_max -= 1;
        }
    }
    let grid: Vec<u64> = t_grid.iter().copied().filter(|&t| t <= t_max).collect();
    if grid.len() < 2 {
        return Err(Error::EnumerationExhausted(format!(
            "point cap {} allows |x| ≤ {t_max}, below the threshold grid",
            cfg.point_cap
        )));
    }

    let cols: Vec<Vec<u128>> = (0..m)
        .map(|i| (0..n).map(|j| fixed_frac(problem.entry(j, i))).collect())
        .collect();
    let mut scan = Scan { cols: &cols, t: t_max as i64, best: vec![(u128::MAX, Vec::new()); t_max as usize + 1] };
    scan.run(0, &mut vec![0u128; n], &mut vec![0i64; m], 0, false);

    // Exact re-check of near-zero distances.
    let tiny = 1u128 << 28;
    let mut exact_at: Option<(usize, Vec<BigInt>)> = None;
    if problem.all_exact() {
        for (h, (err, x)) in scan.best.iter().enumerate().skip(1) {
            if *err <= tiny {
                let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                let mut z = xb.clone();
                z.extend(nearest_y(problem, &xb));
                if problem.solves_exactly(&z) {
                    exact_at = Some((h, z));
                    break;
                }
            }
        }
    }

    // Running best over heights.
    let mut running = Vec::with_capacity(scan.best.len());
    let mut cur: (u128, usize) = (u128::MAX, 0);
    for (h, (err, _)) in scan.best.iter().enumerate() {
        if *err < cur.0 {
            cur = (*err, h);
        }
        running.push(cur);
    }
    let to_f64 = |e: u128| e as f64 * 2f64.powi(-128);
    let mut errors = Vec::with_capacity(grid.len());
    let mut gammas = Vec::with_capacity(grid.len());
    for &t in &grid {
        let e = match &exact_at {
            Some((h, _)) if *h as u64 <= t => 0.0,
            _ => to_f64(running[t as usize].0),
        };
        errors.push(e);
        gammas.push(if e == 0.0 { f64::INFINITY } else { -e.ln() / (t as f64).ln() });
    }

    let (la, lb) = ((grid[0] as f64).ln(), (*grid.last().unwrap() as f64).ln());
    let cut = lb - cfg.tail.clamp(0.0, 1.0) * (lb - la);
    let start = grid.iter().position(|&t| (t as f64).ln() >= cut - 1e-12).unwrap_or(0);
    let tail = &gammas[start..];
    let beta = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let alpha = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let tail_samples = tail.len();

    let (exact, witness) = match exact_at {
        Some((_, z)) => (true, z),
        None => {
            let h = running[t_max as usize].1;
            let xb: Vec<BigInt> = scan.best[h].1.iter().map(|&v| BigInt::from(v)).collect();
            let mut z = xb.clone();
            z.extend(nearest_y(problem, &xb));
            (false, z)
        }
    };
    Ok(ClassicalEstimate {
        n,
        m,
        beta,
        alpha,
        window: [grid[start] as f64, *grid.last().unwrap() as f64],
        thresholds: grid,
        errors,
        gammas,
        witness,
        exact,
        truncated,
        tail_samples,
    })
}
