//! The exponent-level inequalities, evaluated in a fixed registry order.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exponents::{kappa, ExponentReport};

use super::{inv, Check, InequalityReport, Relation};

/// Registry order; [`evaluate_inequality`] accepts exactly these names.
pub const REGISTRY: &[&str] = &[
    "khintchine",
    "khintchine_reverse",
    "dyson",
    "bugeaud_laurent",
    "uniform_dyson",
    "jarnik_eq",
    "uniform_transfer",
    "grade_chain",
    "laurent_split",
    "grade_two_regular",
    "grade_two_uniform",
    "schmidt_two_regular",
    "schmidt_two_uniform",
];

/// Exponents of one matrix (Θ, or ᵗΘ when `transposed`) keyed by
/// `beta_p`, `alpha_p`, `beta_star_p`, `alpha_star_p`, `psi_lower_p`,
/// `psi_upper_p`. `n`, `m` are the dimensions of that matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentTable {
    pub n: usize,
    pub m: usize,
    pub transposed: bool,
    /// Rank of the integer solution lattice, if known.
    pub solution_rank: Option<usize>,
    values: BTreeMap<String, f64>,
}

impl ExponentTable {
    pub fn new(n: usize, m: usize, transposed: bool) -> Self {
        Self { n, m, transposed, solution_rank: None, values: BTreeMap::new() }
    }

    pub fn with_rank(mut self, rank: usize) -> Self {
        self.solution_rank = Some(rank);
        self
    }

    pub fn set(&mut self, key: &str, value: f64) -> &mut Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Fills β_p, α_p, Ψ̄_p, Ψ̂_p from per-grade reports and the starred
    /// exponents through β*_p = β_{d−p}, α*_p = α_{d−p}.
    pub fn from_reports(reports: &[ExponentReport], n: usize, m: usize, transposed: bool) -> Self {
        let d = n + m;
        let mut t = Self::new(n, m, transposed);
        for r in reports {
            t.set(&format!("beta_{}", r.p), r.beta);
            t.set(&format!("alpha_{}", r.p), r.alpha);
            t.set(&format!("psi_lower_{}", r.p), r.psi_lower);
            t.set(&format!("psi_upper_{}", r.p), r.psi_upper);
        }
        for r in reports {
            t.set(&format!("beta_star_{}", d - r.p), r.beta);
            t.set(&format!("alpha_star_{}", d - r.p), r.alpha);
        }
        t
    }

    fn d(&self) -> usize {
        self.n + self.m
    }

    /// Trivial lower bound d/(nκ_p) − 1 of β_p and α_p.
    fn floor(&self, p: usize) -> f64 {
        self.d() as f64 / (self.n as f64 * kappa(p, self.n, self.m)) - 1.0
    }

    /// Trivial lower bound n/m of β*₁ and α*₁.
    fn star_floor(&self) -> f64 {
        self.n as f64 / self.m as f64
    }

    fn rank_not_one(&self) -> bool {
        self.solution_rank != Some(1)
    }

    fn rank_zero(&self) -> bool {
        self.solution_rank.map_or(true, |r| r == 0)
    }

    fn rank_note(&self) -> Option<&'static str> {
        self.solution_rank.is_none().then_some("solution rank unknown; hypothesis assumed")
    }
}

/// Lower bound for the grade-(d−1) exponent from a lower bound `value` at
/// grade `p`, by composing the grade chain through p, …, d−2.
pub fn chain_lower_bound(p: usize, value: f64, n: usize, m: usize) -> f64 {
    let d = n + m;
    let floor = |q: usize| d as f64 / (n as f64 * kappa(q, n, m)) - 1.0;
    let mut b = value.max(floor(p));
    for q in p..d - 1 {
        b = chain_step(q, b, n, m).max(floor(q + 1));
    }
    b
}

/// The grade chain as a lower bound on the exponent at grade q+1 given the
/// one at grade q.
fn chain_step(q: usize, value: f64, n: usize, m: usize) -> f64 {
    let d = n + m;
    let (a, b) = ((d - q) as f64, (d - q - 1) as f64);
    if q >= m {
        a / b * (1.0 + value) - 1.0
    } else {
        a / (b * inv(1.0 + value) + n as f64) - 1.0
    }
}

struct Inputs<'a> {
    table: &'a ExponentTable,
    family: &'a str,
    missing: Vec<String>,
}

impl Inputs<'_> {
    fn get(&mut self, key: String) -> f64 {
        match self.table.get(&key) {
            Some(v) => v,
            None => {
                self.missing.push(key);
                f64::NAN
            }
        }
    }

    fn finish(self) -> Result<()> {
        if self.missing.is_empty() {
            Ok(())
        } else {
            Err(Error::MissingInputs { name: self.family.to_string(), missing: self.missing })
        }
    }
}

/// Evaluates one registry family on the exponents in `table`. Families that
/// do not apply to the shape of the matrix yield no instances.
pub fn evaluate_inequality(name: &str, table: &ExponentTable, tolerance: f64) -> Result<Vec<InequalityReport>> {
    if !REGISTRY.contains(&name) {
        return Err(Error::Config(format!("unknown inequality {name:?}; known: {}", REGISTRY.join(", "))));
    }
    let (n, m, d) = (table.n, table.m, table.d());
    let (nf, mf, df) = (n as f64, m as f64, d as f64);
    let mut io = Inputs { table, family: name, missing: Vec::new() };
    let mut checks: Vec<Check> = Vec::new();
    let star_floor = table.star_floor();

    match name {
        "khintchine" if m == 1 => {
            let (b, bs) = (io.get("beta_1".into()), io.get("beta_star_1".into()));
            checks.push(Check::new(name, bs, Relation::Ge { floor: star_floor }, nf * b + nf - 1.0));
        }
        "khintchine_reverse" if m == 1 => {
            let (b, bs) = (io.get("beta_1".into()), io.get("beta_star_1".into()));
            let rhs = inv(nf - 1.0 + nf * inv(bs));
            checks.push(Check::new(name, b, Relation::Ge { floor: table.floor(1) }, rhs));
        }
        "dyson" => {
            let (b, bs) = (io.get("beta_1".into()), io.get("beta_star_1".into()));
            let ib = inv(b);
            let rhs = (nf + (nf - 1.0) * ib) / (mf - 1.0 + mf * ib);
            checks.push(Check::new(name, bs, Relation::Ge { floor: star_floor }, rhs));
        }
        "bugeaud_laurent" if m == 1 => {
            let b = io.get("beta_1".into());
            let a = io.get("alpha_1".into());
            let bs = io.get("beta_star_1".into());
            let as_ = io.get("alpha_star_1".into());
            let lower = (1.0 - inv(as_)) / (nf - 2.0 + inv(as_) + (nf - 1.0) * inv(bs));
            let upper = ((1.0 - a) * bs - nf + 2.0 - a) / (nf - 1.0);
            let hyp = table.rank_zero();
            checks.push(
                Check::new("bugeaud_laurent_lower", b, Relation::Ge { floor: table.floor(1) }, lower)
                    .hypothesis(hyp),
            );
            checks.push(
                Check::new("bugeaud_laurent_upper", b, Relation::Le { ceiling: f64::INFINITY }, upper)
                    .hypothesis(hyp),
            );
        }
        "uniform_dyson" => {
            let b = io.get("beta_1".into());
            let a = io.get("alpha_1".into());
            let bs = io.get("beta_star_1".into());
            let hyp = table.rank_not_one();
            let q = (1.0 - a) / (1.0 + b);
            let direct = (nf - 1.0 - q) / (mf - 1.0 + q);
            let (ib, ia) = (inv(b), inv(a));
            let inverse = ((nf - 1.0) * (1.0 + ib) - (ia - 1.0)) / ((mf - 1.0) * (1.0 + ib) + (ia - 1.0));
            checks.push(Check::new(name, bs, Relation::Ge { floor: star_floor }, direct).hypothesis(hyp));
            checks.push(
                Check::new("uniform_dyson_inverse", bs, Relation::Ge { floor: star_floor }, inverse).hypothesis(hyp),
            );
        }
        "jarnik_eq" if n == 1 && m == 2 => {
            let a = io.get("alpha_1".into());
            let as_ = io.get("alpha_star_1".into());
            checks.push(Check::new(name, inv(a) + as_, Relation::Eq, 1.0).hypothesis(table.rank_zero()));
        }
        "uniform_transfer" => {
            let a = io.get("alpha_1".into());
            let as_ = io.get("alpha_star_1".into());
            let rel = Relation::Ge { floor: star_floor };
            checks.push(
                Check::new("uniform_transfer_case1", as_, rel, (nf - 1.0) / (mf - a)).guard(a <= 1.0, "needs α₁ ≤ 1"),
            );
            checks.push(
                Check::new("uniform_transfer_case2", as_, rel, (nf - inv(a)) / (mf - 1.0))
                    .guard(a >= 1.0 && m >= 2, "needs α₁ ≥ 1 and m ≥ 2"),
            );
        }
        "grade_chain" => {
            for (kind, key) in [("beta", "beta"), ("alpha", "alpha")] {
                for p in 1..d - 1 {
                    let lo = io.get(format!("{key}_{p}"));
                    let hi = io.get(format!("{key}_{}", p + 1));
                    let rel = Relation::Ge { floor: table.floor(p + 1) };
                    checks.push(Check::new(format!("grade_chain_{kind}_{p}"), hi, rel, chain_step(p, lo, n, m)));
                }
            }
        }
        "laurent_split" if m == 1 => {
            for p in 1..n {
                let b = io.get(format!("beta_{p}"));
                let b1 = io.get(format!("beta_{}", p + 1));
                let up = ((nf - p as f64 + 1.0) * b + 1.0) / (nf - p as f64);
                let down = p as f64 / (1.0 + (p as f64 + 1.0) * inv(b1));
                checks.push(Check::new(format!("laurent_split_up_{p}"), b1, Relation::Ge { floor: table.floor(p + 1) }, up));
                checks.push(Check::new(format!("laurent_split_down_{p}"), b, Relation::Ge { floor: table.floor(p) }, down));
            }
        }
        "grade_two_regular" => {
            let b = io.get("beta_1".into());
            let a = io.get("alpha_1".into());
            let b2 = io.get("beta_2".into());
            let hyp = table.rank_not_one();
            let rel = Relation::Ge { floor: table.floor(2) };
            if m == 1 {
                checks.push(Check::new(name, b2, rel, (b + a) / (1.0 - a)).hypothesis(hyp));
            } else {
                let case1 = (a - 1.0) / (2.0 + b - a);
                let case2 = (1.0 - inv(a)) / (inv(b) + inv(a));
                checks.push(
                    Check::new("grade_two_regular_case1", b2, rel, case1)
                        .guard(a != f64::INFINITY, "needs α₁ finite")
                        .hypothesis(hyp),
                );
                checks.push(Check::new("grade_two_regular_case2", b2, rel, case2).hypothesis(hyp));
            }
        }
        "grade_two_uniform" => {
            let a = io.get("alpha_1".into());
            let a2 = io.get("alpha_2".into());
            let rel = Relation::Ge { floor: table.floor(2) };
            if m == 1 {
                let rhs = inv(1.0 - a) - (nf - 2.0) / (nf - 1.0);
                checks.push(Check::new(name, a2, rel, rhs));
            } else {
                let case1 = (nf - 1.0) / (-nf - (df - 2.0) * inv(1.0 - a));
                let case2 = (mf - 1.0) / (nf + (df - 2.0) * inv(a - 1.0));
                checks.push(Check::new("grade_two_uniform_case1", a2, rel, case1).guard(a <= 1.0, "needs α₁ ≤ 1"));
                checks.push(Check::new("grade_two_uniform_case2", a2, rel, case2).guard(a >= 1.0, "needs α₁ ≥ 1"));
            }
        }
        "schmidt_two_regular" => {
            let lo1 = io.get("psi_lower_1".into());
            let hi1 = io.get("psi_upper_1".into());
            let lo2 = io.get("psi_lower_2".into());
            let hyp = table.rank_not_one();
            let rel = Relation::Le { ceiling: 0.0 };
            let case1 = 2.0 * lo1 + df * (hi1 - lo1) / (nf + nf * hi1);
            let case2 = 2.0 * lo1 + df * (hi1 - lo1) / (mf - nf * hi1);
            checks.push(
                Check::new("schmidt_two_regular_case1", lo2, rel, case1)
                    .guard((hi1 + 1.0).abs() > 1e-12, "needs Ψ̂₁ ≠ −1")
                    .hypothesis(hyp),
            );
            checks.push(Check::new("schmidt_two_regular_case2", lo2, rel, case2).hypothesis(hyp));
        }
        "schmidt_two_uniform" => {
            let hi1 = io.get("psi_upper_1".into());
            let hi2 = io.get("psi_upper_2".into());
            let rel = Relation::Le { ceiling: 0.0 };
            let pivot = (mf - nf) / (2.0 * nf);
            let case1 = (df - 2.0) * hi1 / (nf - 1.0 + nf * hi1);
            let case2 = (df - 2.0) * hi1 / (mf - 1.0 - nf * hi1);
            checks.push(Check::new("schmidt_two_uniform_case1", hi2, rel, case1).guard(hi1 >= pivot, "needs Ψ̂₁ ≥ (m−n)/(2n)"));
            checks.push(Check::new("schmidt_two_uniform_case2", hi2, rel, case2).guard(hi1 <= pivot, "needs Ψ̂₁ ≤ (m−n)/(2n)"));
        }
        _ => {}
    }
    io.finish()?;
    let rank_note = table.rank_note();
    Ok(checks
        .into_iter()
        .map(|c| {
            let c = match (rank_note, c.note.is_none()) {
                (Some(text), true) => c.note(text),
                _ => c,
            };
            c.judge(name, table.transposed, tolerance)
        })
        .collect())
}
