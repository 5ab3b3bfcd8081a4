use num_rational::BigRational;
use proptest::prelude::*;
use transference::flow::{
    build_lattice, companion_parameters, first_minimum_gauges, local_minima_of_psi1, psi_profile,
    psi_profile_exact, successive_minima, uniform_grid, MinimaConfig, PathSpec, ProfileConfig, Side,
};
use num_bigint::BigInt;
use transference::numeric::ints;
use transference::ApproximationProblem;

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(p.into(), d.into())
}

fn real_problem(rows: &[&[f64]]) -> ApproximationProblem {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|v| BigRational::from_float(*v).unwrap()).collect())
        .collect();
    ApproximationProblem::from_reals(rows, 192).unwrap()
}

/// Independent oracle: list every integer vector in a cube, sort by norm and
/// pick greedily by linear independence (rank via exact rationals).
fn brute_force_minima(p: &ApproximationProblem, s: f64, bound: i128) -> Vec<f64> {
    let d = p.d();
    let (n, m) = (p.n(), p.m());
    let h: Vec<f64> = (0..d)
        .map(|i| if i < m { s.exp() } else { (-(m as f64) * s / n as f64).exp() })
        .collect();
    let mut pts: Vec<(f64, Vec<i128>)> = Vec::new();
    let mut z = vec![-bound; d];
    loop {
        if z.iter().any(|v| *v != 0) {
            let zb: Vec<BigInt> = z.iter().map(|v| BigInt::from(*v)).collect();
            let r = p.residuals_f64(&zb);
            let mut norm = 0.0f64;
            for i in 0..m {
                norm = norm.max((z[i] as f64).abs() / h[i]);
            }
            for j in 0..n {
                norm = norm.max(r[j].abs() / h[m + j]);
            }
            pts.push((norm, z.clone()));
        }
        let mut k = 0;
        while k < d {
            z[k] += 1;
            if z[k] <= bound {
                break;
            }
            z[k] = -bound;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut chosen: Vec<Vec<f64>> = Vec::new();
    let mut out = Vec::new();
    for (norm, z) in pts {
        let mut v: Vec<f64> = z.iter().map(|x| *x as f64).collect();
        for c in &chosen {
            let piv = c.iter().position(|x| x.abs() > 1e-9).unwrap();
            let f = v[piv] / c[piv];
            for k in 0..d {
                v[k] -= f * c[k];
            }
        }
        if v.iter().any(|x| x.abs() > 1e-6) {
            chosen.push(v);
            out.push(norm);
            if out.len() == d {
                break;
            }
        }
    }
    out
}

#[test]
fn zero_matrix_closed_form() {
    let p = ApproximationProblem::zero(2, 1).unwrap();
    let lat = build_lattice(&p, false);
    let path = PathSpec::standard(2, 1);
    for s in [0.5, 1.0, 5.0, 20.0] {
        let mm = successive_minima(&lat, &path.box_shape(s).unwrap(), &MinimaConfig::default()).unwrap();
        let expect = [(-s).exp(), (s / 2.0).exp(), (s / 2.0).exp()];
        for (got, want) in mm.lambdas.iter().zip(expect) {
            assert!((got / want - 1.0).abs() < 1e-12, "s = {s}: {got} vs {want}");
        }
        assert_eq!(mm.witnesses, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]);
    }
}

#[test]
fn unit_cube_of_z3() {
    let p = ApproximationProblem::zero(1, 2).unwrap();
    let lat = build_lattice(&p, false);
    let mm = successive_minima(&lat, &PathSpec::standard(1, 2).box_shape(0.0).unwrap(), &MinimaConfig::default())
        .unwrap();
    assert_eq!(mm.lambdas, vec![1.0, 1.0, 1.0]);
    assert_eq!(mm.witnesses, vec![ints(&[1, 0, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]);
}

#[test]
fn zero_matrix_profile_is_constant() {
    let p = ApproximationProblem::zero(2, 1).unwrap();
    let grid = uniform_grid(0.25, 10.0).unwrap();
    let trace = psi_profile(&p, &PathSpec::standard(2, 1), &grid, &ProfileConfig::default()).unwrap();
    for x in &trace {
        assert!((x.psis[0] + 1.0).abs() < 1e-12);
        assert!((x.psis[1] - 0.5).abs() < 1e-12);
        assert!((x.psis[2] - 0.5).abs() < 1e-12);
        assert!(x.big_psis[2].abs() < 1e-12);
        x.check_invariants(1e-12).unwrap();
    }
    let minima = local_minima_of_psi1(&p, &trace, &MinimaConfig::default()).unwrap();
    assert!(minima.is_empty());
}

#[test]
fn rational_column_has_integer_solution() {
    let p = ApproximationProblem::exact(vec![vec![q(1, 2)], vec![q(1, 3)]]).unwrap();
    let grid = uniform_grid(1.0, 30.0).unwrap();
    let trace = psi_profile(&p, &PathSpec::standard(2, 1), &grid, &ProfileConfig::default()).unwrap();
    let last = trace.last().unwrap();
    assert_eq!(last.witnesses[0], ints(&[6, 3, 2]));
    assert!((last.lambdas[0] - 6.0 * (-30f64).exp()).abs() < 1e-12 * last.lambdas[0]);
    assert!(last.psis[0] < -0.93);
    for x in &trace {
        x.check_invariants(1e-12).unwrap();
    }
}

#[test]
fn exact_grid_matches_float_grid() {
    let p = ApproximationProblem::exact(vec![vec![q(1, 2)], vec![q(1, 3)]]).unwrap();
    let path = PathSpec::standard(2, 1);
    let exact = psi_profile_exact(&p, &path, &[2, 3, 5, 8, 13], &ProfileConfig::default()).unwrap();
    let grid: Vec<f64> = exact.iter().map(|x| x.s).collect();
    let float = psi_profile(&p, &path, &grid, &ProfileConfig::default()).unwrap();
    for (a, b) in exact.iter().zip(&float) {
        assert!(a.exact_lambdas.is_some());
        for (x, y) in a.lambdas.iter().zip(&b.lambdas) {
            assert!((x / y - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn large_spread_random_matrices() {
    let cases: Vec<ApproximationProblem> = vec![
        real_problem(&[&[0.414213562373095], &[0.732050807568877]]),
        real_problem(&[&[0.259921049894873, 0.587401051968199]]),
        real_problem(&[&[0.31830988618379, 0.577215664901533], &[0.693147180559945, 0.301029995663981]]),
        real_problem(&[&[0.141592653589793], &[0.718281828459045], &[0.618033988749895]]),
        real_problem(&[&[0.236067977499790, 0.645751311064591, 0.316624790355400]]),
    ];
    for p in cases {
        let path = PathSpec::standard(p.n(), p.m());
        let grid = uniform_grid(2.5, 20.0).unwrap();
        let trace = psi_profile(&p, &path, &grid, &ProfileConfig::default()).unwrap();
        for x in &trace {
            x.check_invariants(1e-12).unwrap();
            let ln_fact: f64 = (2..=p.d()).map(|k| (k as f64).ln()).sum();
            let last = *x.big_psis.last().unwrap();
            assert!(last <= 1e-12 && last >= -ln_fact / x.s - 1e-12);
            first_minimum_gauges(x, &p, 1e-12).unwrap();
        }
    }
}

#[test]
fn doubling_precision_is_stable() {
    let rows = vec![vec![q(314159265358979, 1_000_000_000_000_000)], vec![q(271828182845904, 1_000_000_000_000_000)]];
    let p1 = ApproximationProblem::from_reals(rows.clone(), 160).unwrap();
    let p2 = ApproximationProblem::from_reals(rows, 320).unwrap();
    let path = PathSpec::standard(2, 1);
    for s in [3.0, 11.0, 19.0] {
        let shape = path.box_shape(s).unwrap();
        let a = successive_minima(&build_lattice(&p1, false), &shape, &MinimaConfig::default()).unwrap();
        let b = successive_minima(&build_lattice(&p2, false), &shape, &MinimaConfig::default()).unwrap();
        for (x, y) in a.lambdas.iter().zip(&b.lambdas) {
            assert!((x / y - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn insufficient_precision_is_reported() {
    let p = real_problem(&[&[0.141592653589793, 0.718281828459045, 0.618033988749895]]);
    let p = p.with_precision(64).unwrap();
    let path = PathSpec::standard(1, 3);
    let err = successive_minima(&build_lattice(&p, false), &path.box_shape(12.0).unwrap(), &MinimaConfig::default())
        .unwrap_err();
    assert!(err.to_string().contains("precision insufficient"), "{err}");
}

#[test]
fn companions_and_local_minima() {
    let p = real_problem(&[&[0.414213562373095], &[0.732050807568877]]);
    let path = PathSpec::standard(2, 1);
    let grid = uniform_grid(0.01, 20.0).unwrap();
    let trace = psi_profile(&p, &path, &grid, &ProfileConfig::default()).unwrap();
    let minima = local_minima_of_psi1(&p, &trace, &MinimaConfig::default()).unwrap();
    assert!(!minima.is_empty());
    for lm in &minima {
        assert!(lm.balanced, "{lm:?}");
    }
    let cfg = MinimaConfig::default();
    let mut checked = 0;
    for x in trace.iter().step_by(97) {
        let g = first_minimum_gauges(x, &p, 1e-12).unwrap();
        let psi1 = x.psis[0];
        let (n, m) = (2.0, 1.0);
        for side in [Side::Shrink, Side::Grow] {
            let eligible = match side {
                Side::Shrink => g.mu >= g.lambda1 * (1.0 - 1e-12),
                Side::Grow => g.nu >= g.lambda1 * (1.0 - 1e-12),
            };
            if !eligible {
                assert!(companion_parameters(&p, x.s, side, &cfg).is_err());
                continue;
            }
            let c = companion_parameters(&p, x.s, side, &cfg).unwrap();
            match side {
                Side::Shrink => {
                    assert!(x.s * (1.0 + psi1) <= c.s_companion + 1e-9 && c.s_companion <= x.s + 1e-12);
                }
                Side::Grow => {
                    assert!(x.s - 1e-12 <= c.s_companion && c.s_companion <= x.s * (1.0 - n / m * psi1) + 1e-9);
                }
            }
            checked += 1;
        }
    }
    assert!(checked > 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matches_brute_force_21(a in 0.0f64..1.0, b in 0.0f64..1.0, s in 0.05f64..2.2) {
        let p = real_problem(&[&[a], &[b]]);
        check_against_oracle(&p, s, 14)?;
    }

    #[test]
    fn matches_brute_force_12(a in -1.0f64..1.0, b in -1.0f64..1.0, s in 0.05f64..2.0) {
        let p = real_problem(&[&[a, b]]);
        check_against_oracle(&p, s, 14)?;
    }

    #[test]
    fn matches_brute_force_22(v in proptest::collection::vec(0.0f64..1.0, 4), s in 0.05f64..1.2) {
        let p = real_problem(&[&[v[0], v[1]], &[v[2], v[3]]]);
        check_against_oracle(&p, s, 7)?;
    }
}

fn check_against_oracle(p: &ApproximationProblem, s: f64, bound: i128) -> Result<(), TestCaseError> {
    let path = PathSpec::standard(p.n(), p.m());
    let mm = successive_minima(&build_lattice(p, false), &path.box_shape(s).unwrap(), &MinimaConfig::default())
        .unwrap();
    // The oracle is complete only if the cube contains the box λ_d · B(s).
    let ld = *mm.lambdas.last().unwrap();
    let xr = ld * s.exp();
    let yr = ld * (-(p.m() as f64) * s / p.n() as f64).exp() + p.m() as f64 * p.max_abs_entry() * xr;
    prop_assume!(xr < bound as f64 && yr < bound as f64);
    let oracle = brute_force_minima(p, s, bound);
    for (x, y) in mm.lambdas.iter().zip(&oracle) {
        prop_assert!((x / y - 1.0).abs() < 1e-12, "{:?} vs {:?}", mm.lambdas, oracle);
    }
    Ok(())
}
