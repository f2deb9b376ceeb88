//! Two-phase dense tableau simplex.
//!
//! The general problem is first rewritten in standard form (non-negative
//! columns, `≤`/`≥` rows with non-negative right-hand sides). Each row is
//! scaled to unit max-norm. Phase 1 minimizes the sum of artificials on `≥`
//! rows; phase 2 minimizes the real objective from the resulting basis.
//! Under [`PivotRule::Bland`] the entering column is the lowest-index column
//! with a negative reduced cost. [`PivotRule::DantzigBland`] takes the most
//! negative reduced cost and falls back to Bland's choice while a run of
//! degenerate pivots lasts, which keeps the anti-cycling guarantee. Ratio-test
//! ties go to the lowest-index basic column under both rules.

use super::problem::{LpProblem, LpSolution, LpStatus, Relation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lowest-index improving column, always.
    Bland,
    /// Most negative reduced cost (lowest index on ties); Bland's rule after
    /// a degenerate pivot until the objective strictly improves.
    #[default]
    DantzigBland,
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Primal feasibility tolerance (on scaled rows).
    pub feasibility_tol: f64,
    /// A reduced cost must be below `-optimality_tol` to enter.
    pub optimality_tol: f64,
    /// Smallest admissible pivot element.
    pub pivot_tol: f64,
    /// Overrides the default limit of `50 · (vars + constraints)` pivots.
    pub max_pivots: Option<usize>,
    pub rule: PivotRule,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            pivot_tol: 1e-9,
            max_pivots: None,
            rule: PivotRule::default(),
        }
    }
}

/// How one original variable is expressed through standard-form columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = offset + sign · s`.
    Shifted { col: usize, offset: f64, sign: f64 },
    /// `x = s⁺ - s⁻`.
    Split { pos: usize, neg: usize },
}

struct StandardForm {
    ncols: usize,
    /// Row-major `rows × ncols` coefficient block (structural columns only).
    a: Vec<f64>,
    b: Vec<f64>,
    /// `true` for `≥` rows.
    ge: Vec<bool>,
    cost: Vec<f64>,
    vars: Vec<VarMap>,
}

enum Assembled {
    Form(StandardForm),
    /// A constraint with all-zero coefficients cannot be satisfied.
    TriviallyInfeasible,
}

fn assemble(problem: &LpProblem, tol: f64) -> Assembled {
    let mut ncols = 0;
    let mut vars = Vec::with_capacity(problem.num_vars());
    // Rows contributed by finite upper bounds on shifted variables.
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for b in &problem.bounds {
        let map = if b.lower.is_finite() {
            let col = ncols;
            ncols += 1;
            if b.upper.is_finite() {
                bound_rows.push((col, b.upper - b.lower));
            }
            VarMap::Shifted {
                col,
                offset: b.lower,
                sign: 1.0,
            }
        } else if b.upper.is_finite() {
            let col = ncols;
            ncols += 1;
            VarMap::Shifted {
                col,
                offset: b.upper,
                sign: -1.0,
            }
        } else {
            let pos = ncols;
            ncols += 2;
            VarMap::Split { pos, neg: pos + 1 }
        };
        vars.push(map);
    }

    let mut cost = vec![0.0; ncols];
    for (c, map) in problem.objective.iter().zip(&vars) {
        match *map {
            VarMap::Shifted { col, sign, .. } => cost[col] += c * sign,
            VarMap::Split { pos, neg } => {
                cost[pos] += c;
                cost[neg] -= c;
            }
        }
    }

    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut ge = Vec::new();
    let mut push_row = |mut row: Vec<f64>, is_ge: bool, mut rhs: f64| -> bool {
        let scale = row.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if scale == 0.0 {
            let ok = if is_ge { rhs <= tol } else { rhs >= -tol };
            return ok;
        }
        row.iter_mut().for_each(|v| *v /= scale);
        rhs /= scale;
        let mut is_ge = is_ge;
        if rhs < 0.0 || (rhs == 0.0 && is_ge) {
            row.iter_mut().for_each(|v| *v = -*v);
            rhs = -rhs;
            is_ge = !is_ge;
        }
        a.extend_from_slice(&row);
        b.push(rhs);
        ge.push(is_ge);
        true
    };

    for c in &problem.constraints {
        let mut row = vec![0.0; ncols];
        let mut rhs = c.rhs;
        for (&coef, map) in c.coeffs.iter().zip(&vars) {
            if coef == 0.0 {
                continue;
            }
            match *map {
                VarMap::Shifted { col, offset, sign } => {
                    row[col] += coef * sign;
                    rhs -= coef * offset;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += coef;
                    row[neg] -= coef;
                }
            }
        }
        let ok = match c.relation {
            Relation::Le => push_row(row, false, rhs),
            Relation::Ge => push_row(row, true, rhs),
            Relation::Eq => push_row(row.clone(), false, rhs) && push_row(row, true, rhs),
        };
        if !ok {
            return Assembled::TriviallyInfeasible;
        }
    }
    for (col, width) in bound_rows {
        let mut row = vec![0.0; ncols];
        row[col] = 1.0;
        push_row(row, false, width);
    }

    Assembled::Form(StandardForm {
        ncols,
        a,
        b,
        ge,
        cost,
        vars,
    })
}

/// Dense simplex tableau. Column layout: structural, one slack per row,
/// then artificials (phase 1 only), then the right-hand side.
struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    /// Reduced costs; the last entry holds minus the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    /// Columns that may enter the basis.
    enterable: usize,
    scratch: Vec<(usize, f64)>,
}

impl Tableau {
    #[inline]
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let row_r = r * w;
        let piv = self.data[row_r + q];
        let inv = 1.0 / piv;
        self.scratch.clear();
        for j in 0..w {
            let v = &mut self.data[row_r + j];
            if *v != 0.0 {
                *v *= inv;
                self.scratch.push((j, *v));
            }
        }
        self.data[row_r + q] = 1.0;
        let dense = self.scratch.len() * 3 > w;

        let eliminate = |row: &mut [f64], scratch: &[(usize, f64)], pivot_row: Option<&[f64]>| {
            let f = row[q];
            if f == 0.0 {
                return;
            }
            match pivot_row {
                Some(pr) => {
                    for (x, &p) in row.iter_mut().zip(pr) {
                        *x -= f * p;
                    }
                }
                None => {
                    for &(j, p) in scratch {
                        row[j] -= f * p;
                    }
                }
            }
            row[q] = 0.0;
        };

        let (before, rest) = self.data.split_at_mut(row_r);
        let (pivot_row, after) = rest.split_at_mut(w);
        let pr = if dense { Some(&*pivot_row) } else { None };
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            eliminate(row, &self.scratch, pr);
        }
        eliminate(&mut self.obj, &self.scratch, pr);
        self.basis[r] = q;
    }

    /// Lowest-index enterable column with a negative reduced cost.
    fn entering_bland(&self, tol: f64) -> Option<usize> {
        self.obj[..self.enterable].iter().position(|&d| d < -tol)
    }

    /// Enterable column with the most negative reduced cost.
    fn entering_dantzig(&self, tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (j, &d) in self.obj[..self.enterable].iter().enumerate() {
            if d < -tol && best.is_none_or(|(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Minimum-ratio row; ties go to the lowest-index basic column.
    fn leaving(&self, q: usize, pivot_tol: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let t = self.at(i, q);
            if t <= pivot_tol {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / t;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    let tie = (ratio - br).abs() <= 1e-12 * br.abs().max(1.0);
                    if (tie && self.basis[i] < self.basis[bi]) || (!tie && ratio < br) {
                        Some((i, ratio))
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    /// Runs simplex iterations until optimal or unbounded.
    fn iterate(&mut self, opts: &SimplexOptions, pivots: &mut usize, limit: usize) -> Result<bool> {
        let mut stalled = false;
        loop {
            let q = match opts.rule {
                PivotRule::DantzigBland if !stalled => self.entering_dantzig(opts.optimality_tol),
                _ => self.entering_bland(opts.optimality_tol),
            };
            let Some(q) = q else {
                return Ok(true);
            };
            let Some(r) = self.leaving(q, opts.pivot_tol) else {
                return Ok(false);
            };
            if *pivots >= limit {
                return Err(Error::IterationLimit { pivots: *pivots });
            }
            let step = self.rhs(r).max(0.0) / self.at(r, q);
            stalled = !(step * -self.obj[q] > 0.0);
            self.pivot(r, q);
            *pivots += 1;
        }
    }

    fn set_costs(&mut self, cost: &[f64]) {
        let w = self.width;
        self.obj.iter_mut().for_each(|v| *v = 0.0);
        self.obj[..cost.len()].copy_from_slice(cost);
        for i in 0..self.rows {
            let cb = cost.get(self.basis[i]).copied().unwrap_or(0.0);
            if cb == 0.0 {
                continue;
            }
            let row = &self.data[i * w..(i + 1) * w];
            for (o, &t) in self.obj.iter_mut().zip(row) {
                *o -= cb * t;
            }
        }
        for &bcol in &self.basis {
            self.obj[bcol] = 0.0;
        }
    }
}

/// Solves `problem` with default tolerances.
pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    solve_lp_with(problem, &SimplexOptions::default())
}

pub fn solve_lp_with(problem: &LpProblem, opts: &SimplexOptions) -> Result<LpSolution> {
    problem.validate()?;
    let limit = opts
        .max_pivots
        .unwrap_or(50 * (problem.num_vars() + problem.num_constraints()).max(1));
    let form = match assemble(problem, opts.feasibility_tol) {
        Assembled::Form(f) => f,
        Assembled::TriviallyInfeasible => {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, 0));
        }
    };
    let m = form.b.len();
    let ns = form.ncols;
    let art_rows: Vec<usize> = (0..m).filter(|&i| form.ge[i]).collect();
    let width = ns + m + art_rows.len() + 1;

    let mut data = vec![0.0; m * width];
    let mut basis = vec![0; m];
    let mut art = 0;
    for i in 0..m {
        let row = &mut data[i * width..(i + 1) * width];
        row[..ns].copy_from_slice(&form.a[i * ns..(i + 1) * ns]);
        row[width - 1] = form.b[i];
        if form.ge[i] {
            row[ns + i] = -1.0;
            row[ns + m + art] = 1.0;
            basis[i] = ns + m + art;
            art += 1;
        } else {
            row[ns + i] = 1.0;
            basis[i] = ns + i;
        }
    }
    let mut tab = Tableau {
        rows: m,
        width,
        data,
        obj: vec![0.0; width],
        basis,
        enterable: ns + m,
        scratch: Vec::with_capacity(width),
    };
    let mut pivots = 0;

    if !art_rows.is_empty() {
        // Phase 1: minimize the sum of artificials.
        let mut cost = vec![0.0; width - 1];
        cost[ns + m..].iter_mut().for_each(|c| *c = 1.0);
        tab.set_costs(&cost);
        tab.iterate(opts, &mut pivots, limit)?;
        let infeasibility = -tab.obj[width - 1];
        let scale = 1.0 + form.b.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if infeasibility > opts.feasibility_tol * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, pivots));
        }
        drive_out_artificials(&mut tab, ns + m, opts.pivot_tol, &mut pivots);
        tab = drop_artificial_columns(tab, ns + m);
    }

    // Phase 2.
    let mut cost = form.cost.clone();
    cost.resize(ns + m, 0.0);
    tab.set_costs(&cost);
    if !tab.iterate(opts, &mut pivots, limit)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, pivots));
    }

    let values = refined_basic_values(&tab, &form);
    let mut std_x = vec![0.0; ns + m];
    for (i, &bcol) in tab.basis.iter().enumerate() {
        std_x[bcol] = values[i].max(0.0);
    }
    let x: Vec<f64> = form
        .vars
        .iter()
        .map(|map| match *map {
            VarMap::Shifted { col, offset, sign } => offset + sign * std_x[col],
            VarMap::Split { pos, neg } => std_x[pos] - std_x[neg],
        })
        .collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: problem.objective_value(&x),
        x,
        pivots,
    })
}

/// Pivots zero-level artificials out of the basis; rows where that is
/// impossible are redundant and removed.
fn drive_out_artificials(tab: &mut Tableau, first_art: usize, pivot_tol: f64, pivots: &mut usize) {
    let mut i = 0;
    while i < tab.rows {
        if tab.basis[i] < first_art {
            i += 1;
            continue;
        }
        let best = (0..first_art)
            .map(|j| (j, tab.at(i, j).abs()))
            .filter(|&(_, v)| v > pivot_tol)
            .max_by(|a, b| a.1.total_cmp(&b.1));
        match best {
            Some((j, _)) => {
                tab.pivot(i, j);
                *pivots += 1;
                i += 1;
            }
            None => {
                let w = tab.width;
                tab.data.drain(i * w..(i + 1) * w);
                tab.basis.remove(i);
                tab.rows -= 1;
            }
        }
    }
}

fn drop_artificial_columns(tab: Tableau, keep: usize) -> Tableau {
    let new_width = keep + 1;
    let mut data = Vec::with_capacity(tab.rows * new_width);
    for i in 0..tab.rows {
        let row = &tab.data[i * tab.width..(i + 1) * tab.width];
        data.extend_from_slice(&row[..keep]);
        data.push(row[tab.width - 1]);
    }
    Tableau {
        rows: tab.rows,
        width: new_width,
        data,
        obj: vec![0.0; new_width],
        basis: tab.basis,
        enterable: keep,
        scratch: tab.scratch,
    }
}

/// Basic values recomputed against the original rows with two rounds of
/// iterative refinement. The slack columns of the final tableau hold the
/// basis inverse, so each round costs `O(m²)`.
fn refined_basic_values(tab: &Tableau, form: &StandardForm) -> Vec<f64> {
    let ns = form.ncols;
    let m_all = form.b.len();
    let rows = tab.rows;
    let mut values: Vec<f64> = (0..rows).map(|i| tab.rhs(i)).collect();

    if rows != m_all {
        // TODO: track original row ids through redundant-row removal so
        // refinement also applies to degenerate equality systems.
        return values;
    }

    let column = |row: usize, col: usize| -> f64 {
        if col < ns {
            form.a[row * ns + col]
        } else if col - ns == row {
            if form.ge[row] { -1.0 } else { 1.0 }
        } else {
            0.0
        }
    };
    for _ in 0..2 {
        let residual: Vec<f64> = (0..rows)
            .map(|r| {
                let mut s = form.b[r];
                for (i, &bcol) in tab.basis.iter().enumerate() {
                    let a = column(r, bcol);
                    if a != 0.0 {
                        s -= a * values[i];
                    }
                }
                s
            })
            .collect();
        if residual.iter().all(|&r| r == 0.0) {
            break;
        }
        // B⁻¹[:, k] = sign_k · (tableau column of slack k).
        for (k, &rk) in residual.iter().enumerate() {
            if rk == 0.0 {
                continue;
            }
            let sign = if form.ge[k] { -1.0 } else { 1.0 };
            let col = ns + k;
            for (i, v) in values.iter_mut().enumerate() {
                *v += sign * tab.at(i, col) * rk;
            }
        }
    }
    values
}
