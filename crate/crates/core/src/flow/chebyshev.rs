//! Discrete Chebyshev (L∞) approximation in a handful of unknowns:
//! minimize `max_r |a_r + Σ_j t_j c_j[r]|` over real `t`.
//!
//! The minimum of this linear program is attained at a vertex where `j + 1`
//! of the constraints `±(a_r + C_r t) ≤ z` are active, so for the tiny
//! systems that occur here (at most six rows) it is cheapest and most robust
//! to enumerate those vertices directly.

/// Returns the minimal value and one minimizer.
pub(crate) fn chebyshev(a: &[f64], cols: &[&[f64]]) -> (f64, Vec<f64>) {
    let rows = a.len();
    let sup = |t: &[f64]| -> f64 {
        (0..rows)
            .map(|r| {
                let v = a[r] + cols.iter().zip(t).map(|(c, ti)| c[r] * ti).sum::<f64>();
                v.abs()
            })
            .fold(0.0, f64::max)
    };
    if cols.is_empty() {
        return (sup(&[]), Vec::new());
    }

    // Normalize columns; drop zero columns (their coefficient is irrelevant).
    let mut scale = Vec::with_capacity(cols.len());
    let mut active = Vec::new();
    for (j, c) in cols.iter().enumerate() {
        let s = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        scale.push(s);
        if s > 0.0 {
            active.push(j);
        }
    }
    let unknowns = active.len();
    let mut t_full = vec![0.0; cols.len()];
    if unknowns == 0 {
        return (sup(&t_full), t_full);
    }
    let scaled: Vec<Vec<f64>> = active
        .iter()
        .map(|&j| cols[j].iter().map(|v| v / scale[j]).collect())
        .collect();

    if unknowns >= rows {
        // Square (or overdetermined in unknowns): the residual can be zeroed.
        let mut m = vec![vec![0.0; unknowns + 1]; rows];
        for r in 0..rows {
            for (u, col) in scaled.iter().enumerate().take(rows) {
                m[r][u] = col[r];
            }
            m[r][unknowns] = -a[r];
        }
        if let Some(sol) = solve_square(&mut m, rows) {
            for (u, &j) in active.iter().enumerate().take(rows) {
                t_full[j] = sol[u] / scale[j];
            }
        }
        return (sup(&t_full), t_full);
    }

    let size = unknowns + 1;
    let mut best_z = f64::INFINITY;
    let mut best_t: Option<Vec<f64>> = None;
    let mut subset: Vec<usize> = (0..size).collect();
    let mut system = vec![vec![0.0; size + 1]; size];
    loop {
        for signs in 0u32..(1 << (size - 1)) {
            for (e, &r) in subset.iter().enumerate() {
                let sigma = if e == 0 || signs & (1 << (e - 1)) == 0 { 1.0 } else { -1.0 };
                let row = &mut system[e];
                for (u, col) in scaled.iter().enumerate() {
                    row[u] = sigma * col[r];
                }
                row[unknowns] = -1.0;
                row[size] = -sigma * a[r];
            }
            let Some(sol) = solve_square(&mut system, size) else {
                continue;
            };
            let z = sol[unknowns].abs();
            if !(z < best_z) {
                continue;
            }
            let t = &sol[..unknowns];
            let feasible = (0..rows).all(|r| {
                let mut v = a[r];
                let mut mag = a[r].abs();
                for (u, col) in scaled.iter().enumerate() {
                    v += col[r] * t[u];
                    mag += (col[r] * t[u]).abs();
                }
                v.abs() <= z + 1e-11 * (mag + z) + 1e-300
            });
            if feasible {
                best_z = z;
                best_t = Some(t.to_vec());
            }
        }
        if !next_combination(&mut subset, rows) {
            break;
        }
    }
    match best_t {
        Some(t) => {
            for (u, &j) in active.iter().enumerate() {
                t_full[j] = t[u] / scale[j];
            }
            (sup(&t_full), t_full)
        }
        // Numerical failure: zero is always a valid lower bound.
        None => (0.0, t_full),
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting on an `n × (n+1)` augmented
/// matrix. Returns `None` for (numerically) singular systems.
fn solve_square(m: &mut [Vec<f64>], n: usize) -> Option<Vec<f64>> {
    let norm = m
        .iter()
        .take(n)
        .flat_map(|r| r[..n].iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if norm == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() <= 1e-13 * norm {
            return None;
        }
        m.swap(col, pivot);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..=n {
                    m[r][c] -= f * m[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = m[i][n];
        for j in i + 1..n {
            v -= m[i][j] * x[j];
        }
        x[i] = v / m[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: dense grid search refined around the best point.
    fn grid_min(a: &[f64], cols: &[&[f64]]) -> f64 {
        let eval = |t: &[f64]| {
            (0..a.len())
                .map(|r| (a[r] + cols.iter().zip(t).map(|(c, x)| c[r] * x).sum::<f64>()).abs())
                .fold(0.0, f64::max)
        };
        let mut center = vec![0.0; cols.len()];
        let mut width = 8.0;
        for _ in 0..60 {
            let mut best = (eval(&center), center.clone());
            let steps = 8i32;
            let mut idx = vec![-steps; cols.len()];
            loop {
                let t: Vec<f64> = center
                    .iter()
                    .zip(&idx)
                    .map(|(c, &i)| c + width * i as f64 / steps as f64)
                    .collect();
                let v = eval(&t);
                if v < best.0 {
                    best = (v, t);
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] <= steps {
                        break;
                    }
                    idx[k] = -steps;
                    k += 1;
                }
                if k == idx.len() {
                    break;
                }
            }
            center = best.1;
            width *= 0.5;
        }
        eval(&center)
    }

    #[test]
    fn one_variable() {
        // max(|1 + t|, |2 - t|) is minimized at t = 1/2 with value 3/2.
        let (v, t) = chebyshev(&[1.0, 2.0], &[&[1.0, -1.0]]);
        assert!((v - 1.5).abs() < 1e-14);
        assert!((t[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn plateau_value() {
        // Coordinate 1 is untouched by t: the minimum is 5 on a long plateau.
        let (v, _) = chebyshev(&[0.3, 5.0, 0.0], &[&[1e-9, 0.0, 0.0]]);
        assert!((v - 5.0).abs() < 1e-12);
    }

    #[test]
    fn matches_grid_oracle() {
        let cases: Vec<(Vec<f64>, Vec<Vec<f64>>)> = vec![
            (vec![0.7, -1.3, 2.2, 0.4], vec![vec![1.0, 0.5, -0.2, 0.3], vec![-0.4, 1.1, 0.9, 0.0]]),
            (vec![3.0, 1.0, -2.0], vec![vec![1.0, 1.0, 1.0]]),
            (vec![0.1, 0.2, 0.3, 0.4, 0.5], vec![vec![1.0, -1.0, 0.0, 0.5, 0.2], vec![0.0, 0.3, 1.0, -0.7, 0.1], vec![0.2, 0.2, 0.2, 1.0, -1.0]]),
        ];
        for (a, cols) in cases {
            let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
            let (v, t) = chebyshev(&a, &refs);
            let oracle = grid_min(&a, &refs);
            assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
            let check = (0..a.len())
                .map(|r| (a[r] + refs.iter().zip(&t).map(|(c, x)| c[r] * x).sum::<f64>()).abs())
                .fold(0.0, f64::max);
            assert!((check - v).abs() < 1e-12);
        }
    }

    #[test]
    fn square_system_reaches_zero() {
        let (v, _) = chebyshev(&[1.0, 2.0], &[&[1.0, 0.0], &[0.0, 1.0]]);
        assert!(v < 1e-15);
    }
}
