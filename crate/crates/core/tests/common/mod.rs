#![allow(dead_code)]

use densetest::lp::{LpProblem, Relation};
use rand::Rng;

/// Solves a small dense square system by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[piv][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

/// Minimum objective over all vertices of a problem with finite box bounds.
/// `None` when no vertex is feasible.
pub fn brute_force_min(problem: &LpProblem) -> Option<f64> {
    let n = problem.num_vars();
    // Every constraint and bound as a hyperplane (row, rhs).
    let mut planes: Vec<(Vec<f64>, f64)> = problem.constraints.iter().map(|c| (c.coeffs.clone(), c.rhs)).collect();
    for (j, b) in problem.bounds.iter().enumerate() {
        assert!(b.lower.is_finite() && b.upper.is_finite(), "oracle needs a bounded box");
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), b.lower));
        planes.push((e, b.upper));
    }
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let a: Vec<Vec<f64>> = idx.iter().map(|&k| planes[k].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&k| planes[k].1).collect();
        if let Some(x) = solve_square(a, b) {
            if problem.max_violation(&x) <= 1e-9 {
                let v = problem.objective_value(&x);
                best = Some(best.map_or(v, |bv: f64| bv.min(v)));
            }
        }
        // Next combination of n out of planes.len().
        let m = planes.len();
        let mut i = n;
        while i > 0 && idx[i - 1] == i - 1 + m - n {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        idx[i - 1] += 1;
        for k in i..n {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

/// Random LP with at most 5 variables, 8 inequality rows and a finite box.
/// Most instances are feasible by construction around a random point.
pub fn random_lp<R: Rng>(rng: &mut R) -> LpProblem {
    let n = rng.random_range(1..=5);
    let m = rng.random_range(0..=8);
    let objective: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut lp = LpProblem::new(objective);
    let mut center = Vec::with_capacity(n);
    for j in 0..n {
        let lo = rng.random_range(-3.0..0.0);
        let hi = lo + rng.random_range(0.5..4.0);
        lp.set_bounds(j, lo, hi);
        center.push(rng.random_range(lo..hi));
    }
    let guaranteed = rng.random_bool(0.85);
    for _ in 0..m {
        let row: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let at: f64 = row.iter().zip(&center).map(|(a, x)| a * x).sum();
        let slack = if guaranteed {
            rng.random_range(0.0..1.0)
        } else {
            rng.random_range(-1.5..1.0)
        };
        if rng.random_bool(0.5) {
            lp.add_constraint(row, Relation::Le, at + slack);
        } else {
            lp.add_constraint(row, Relation::Ge, at - slack);
        }
    }
    lp
}
