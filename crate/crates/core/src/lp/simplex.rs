//! Dense two-phase primal simplex for small covering programs
//!
//! ```text
//! min  c·x   s.t.  A x ≥ b,  0 ≤ x ≤ u,   c ≥ 0
//! ```
//!
//! Bland's rule is used for both entering and leaving variables, so the
//! method terminates on degenerate problems. Every optimum is returned with
//! a dual vector and is checked for primal feasibility, dual feasibility and
//! a zero duality gap before it leaves this module.

use super::LpError;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-11;
/// Relative feasibility tolerance; scaled by the magnitude of `b` and `u`.
pub(crate) const FEAS_TOL: f64 = 1e-9;
const CERT_TOL: f64 = 1e-7;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone)]
pub(crate) struct Program<'a> {
    pub cost: &'a [f64],
    pub rows: &'a [Vec<f64>],
    pub rhs: &'a [f64],
    pub upper: &'a [f64],
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Outcome {
    Optimal(Optimum),
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Optimum {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Multipliers of the `A x ≥ b` rows (zero for rows removed in presolve).
    pub row_duals: Vec<f64>,
    /// Multipliers of the `x ≤ u` bounds.
    pub bound_duals: Vec<f64>,
}

impl Program<'_> {
    fn vars(&self) -> usize {
        self.cost.len()
    }

    pub(crate) fn scale(&self) -> f64 {
        self.rhs
            .iter()
            .chain(self.upper.iter().filter(|u| u.is_finite()))
            .fold(1.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest violation of `A x ≥ b` and `0 ≤ x ≤ u`.
    pub(crate) fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.rows.iter().zip(self.rhs).map(|(a, b)| b - dot(a, x));
        let bounds = x
            .iter()
            .zip(self.upper)
            .map(|(xj, uj)| (xj - uj).max(-xj));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn solve(program: &Program<'_>) -> Result<Outcome, LpError> {
    let n = program.vars();
    assert!(program.rows.iter().all(|r| r.len() == n));
    assert_eq!(program.rows.len(), program.rhs.len());
    assert_eq!(program.upper.len(), n);
    assert!(program.cost.iter().all(|&c| c >= 0.0), "costs must be non-negative");

    let scale = program.scale();
    let feas = FEAS_TOL * scale;
    if program.upper.iter().any(|&u| u < -feas) {
        return Ok(Outcome::Infeasible);
    }

    // Presolve: drop empty rows, fix columns that can only hurt every row.
    let mut keep_rows = Vec::new();
    for (r, row) in program.rows.iter().enumerate() {
        if row.iter().all(|a| a.abs() <= PIVOT_TOL) {
            if program.rhs[r] > feas {
                return Ok(Outcome::Infeasible);
            }
        } else {
            keep_rows.push(r);
        }
    }
    let free_cols: Vec<usize> = (0..n)
        .filter(|&j| keep_rows.iter().any(|&r| program.rows[r][j] > 0.0))
        .collect();

    let mut tableau = Tableau::build(program, &keep_rows, &free_cols);
    tableau.run(Phase::One)?;
    if tableau.artificial_sum() > feas {
        return Ok(Outcome::Infeasible);
    }
    tableau.drive_out_artificials();
    tableau.run(Phase::Two)?;

    let reduced_x = tableau.primal();
    let mut x = vec![0.0; n];
    for (k, &j) in free_cols.iter().enumerate() {
        x[j] = reduced_x[k].clamp(0.0, program.upper[j].max(0.0));
    }
    let (reduced_rows, reduced_bounds) = tableau.duals();
    let mut row_duals = vec![0.0; program.rows.len()];
    for (k, &r) in keep_rows.iter().enumerate() {
        row_duals[r] = reduced_rows[k];
    }
    let mut bound_duals = vec![0.0; n];
    for (k, &j) in free_cols.iter().enumerate() {
        bound_duals[j] = reduced_bounds[k];
    }
    let objective = dot(program.cost, &x);
    let optimum = Optimum { x, objective, row_duals, bound_duals };
    certify(program, &optimum)?;
    Ok(Outcome::Optimal(optimum))
}

/// Primal feasibility, dual feasibility and strong duality within tolerance.
fn certify(program: &Program<'_>, opt: &Optimum) -> Result<(), LpError> {
    let scale = program.scale();
    let violation = program.max_violation(&opt.x);
    if violation > FEAS_TOL * scale * 10.0 {
        return Err(LpError::Numerical(format!("primal violation {violation:e} at scale {scale:e}")));
    }
    let dual_scale = opt
        .row_duals
        .iter()
        .chain(&opt.bound_duals)
        .fold(1.0f64, |a, v| a.max(v.abs()));
    let dtol = CERT_TOL * dual_scale;
    if opt.row_duals.iter().chain(&opt.bound_duals).any(|&v| v < -dtol) {
        return Err(LpError::Numerical("negative dual multiplier".into()));
    }
    for j in 0..program.vars() {
        let reduced = program.cost[j] - program.rows.iter().zip(&opt.row_duals).map(|(a, y)| a[j] * y).sum::<f64>()
            + opt.bound_duals[j];
        if reduced < -dtol {
            return Err(LpError::Numerical(format!("dual infeasible on column {j}: {reduced:e}")));
        }
    }
    let dual_objective = dot(program.rhs, &opt.row_duals)
        - program
            .upper
            .iter()
            .zip(&opt.bound_duals)
            .map(|(u, w)| if *w == 0.0 { 0.0 } else { u * w })
            .sum::<f64>();
    let gap = (dual_objective - opt.objective).abs();
    if gap > CERT_TOL * scale.max(opt.objective.abs()) * dual_scale {
        return Err(LpError::Numerical(format!(
            "duality gap {gap:e} (primal {}, dual {dual_objective})",
            opt.objective
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    One,
    Two,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Surplus,
    Bound,
    Artificial,
}

/// Row of the standard-form system and the identity column it started with.
#[derive(Clone, Copy)]
struct RowOrigin {
    identity_col: usize,
    /// `−1` when the covering row was negated so its slack could start basic.
    sign: f64,
    /// Structural column for `x ≤ u` rows.
    bounded: Option<usize>,
}

struct Tableau {
    /// `rows × (cols + 1)`, last entry of each row is the right-hand side.
    t: Vec<Vec<f64>>,
    kinds: Vec<Kind>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    origins: Vec<RowOrigin>,
    structural: usize,
    scale: f64,
}

impl Tableau {
    fn build(program: &Program<'_>, keep_rows: &[usize], free_cols: &[usize]) -> Self {
        let nx = free_cols.len();
        let bounded: Vec<usize> = (0..nx).filter(|&k| program.upper[free_cols[k]].is_finite()).collect();
        let need_art: Vec<bool> = keep_rows.iter().map(|&r| program.rhs[r] > 0.0).collect();
        let n_art = need_art.iter().filter(|&&a| a).count();
        let cols = nx + keep_rows.len() + bounded.len() + n_art;

        let mut kinds = vec![Kind::Structural; nx];
        kinds.extend(std::iter::repeat_n(Kind::Surplus, keep_rows.len()));
        kinds.extend(std::iter::repeat_n(Kind::Bound, bounded.len()));
        kinds.extend(std::iter::repeat_n(Kind::Artificial, n_art));
        let mut cost = vec![0.0; cols];
        for (k, &j) in free_cols.iter().enumerate() {
            cost[k] = program.cost[j];
        }

        let mut t = Vec::new();
        let mut basis = Vec::new();
        let mut origins = Vec::new();
        let mut next_art = nx + keep_rows.len() + bounded.len();
        for (i, &r) in keep_rows.iter().enumerate() {
            let mut row = vec![0.0; cols + 1];
            let surplus = nx + i;
            if need_art[i] {
                for (k, &j) in free_cols.iter().enumerate() {
                    row[k] = program.rows[r][j];
                }
                row[surplus] = -1.0;
                row[next_art] = 1.0;
                row[cols] = program.rhs[r];
                basis.push(next_art);
                origins.push(RowOrigin { identity_col: next_art, sign: 1.0, bounded: None });
                next_art += 1;
            } else {
                for (k, &j) in free_cols.iter().enumerate() {
                    row[k] = -program.rows[r][j];
                }
                row[surplus] = 1.0;
                row[cols] = -program.rhs[r];
                basis.push(surplus);
                origins.push(RowOrigin { identity_col: surplus, sign: -1.0, bounded: None });
            }
            t.push(row);
        }
        for (b, &k) in bounded.iter().enumerate() {
            let mut row = vec![0.0; cols + 1];
            let slack = nx + keep_rows.len() + b;
            row[k] = 1.0;
            row[slack] = 1.0;
            row[cols] = program.upper[free_cols[k]].max(0.0);
            basis.push(slack);
            origins.push(RowOrigin { identity_col: slack, sign: -1.0, bounded: Some(k) });
            t.push(row);
        }
        Self { t, kinds, cost, basis, origins, structural: nx, scale: program.scale() }
    }

    fn cols(&self) -> usize {
        self.kinds.len()
    }

    fn phase_cost(&self, phase: Phase, j: usize) -> f64 {
        match phase {
            Phase::One => {
                if self.kinds[j] == Kind::Artificial {
                    1.0
                } else {
                    0.0
                }
            }
            Phase::Two => self.cost[j],
        }
    }

    fn reduced_cost(&self, phase: Phase, j: usize) -> f64 {
        let mut d = self.phase_cost(phase, j);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = self.phase_cost(phase, b);
            if cb != 0.0 {
                d -= cb * self.t[i][j];
            }
        }
        d
    }

    fn run(&mut self, phase: Phase) -> Result<(), LpError> {
        let cols = self.cols();
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column.
            let entering = (0..cols).find(|&j| {
                !(phase == Phase::Two && self.kinds[j] == Kind::Artificial)
                    && !self.basis.contains(&j)
                    && self.reduced_cost(phase, j) < -COST_TOL
            });
            let Some(col) = entering else {
                return Ok(());
            };
            // Ratio test, ties broken by lowest basic index.
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let a = self.t[i][col];
                if a > PIVOT_TOL {
                    let ratio = self.t[i][cols].max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * lr.abs().max(1.0);
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(row, col);
        }
        Err(LpError::IterationLimit(MAX_PIVOTS))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.cols() + 1;
        let p = self.t[row][col];
        for k in 0..width {
            self.t[row][k] /= p;
        }
        self.t[row][col] = 1.0;
        let pivot_row = self.t[row].clone();
        let rhs_floor = FEAS_TOL * self.scale * 1e-3;
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for k in 0..width {
                    r[k] -= f * pivot_row[k];
                }
                r[col] = 0.0;
                let last = width - 1;
                if r[last] < 0.0 && r[last] > -rhs_floor {
                    r[last] = 0.0;
                }
            }
        }
        self.basis[row] = col;
    }

    fn artificial_sum(&self) -> f64 {
        let last = self.cols();
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, &b)| self.kinds[b] == Kind::Artificial)
            .map(|(i, _)| self.t[i][last])
            .sum()
    }

    /// Pivots zero-level artificials out of the basis where possible; rows
    /// where no other column has a usable entry are redundant and stay put.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.t.len() {
            if self.kinds[self.basis[i]] != Kind::Artificial {
                continue;
            }
            let col = (0..self.cols())
                .filter(|&j| self.kinds[j] != Kind::Artificial && !self.basis.contains(&j))
                .max_by(|&a, &b| self.t[i][a].abs().total_cmp(&self.t[i][b].abs()));
            if let Some(j) = col {
                if self.t[i][j].abs() > PIVOT_TOL {
                    self.pivot(i, j);
                }
            }
        }
    }

    fn primal(&self) -> Vec<f64> {
        let last = self.cols();
        let mut x = vec![0.0; self.structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                x[b] = self.t[i][last];
            }
        }
        x
    }

    /// Row and bound multipliers in the sign convention of the covering form.
    fn duals(&self) -> (Vec<f64>, Vec<f64>) {
        let mut rows = Vec::new();
        let mut bounds = vec![0.0; self.structural];
        for origin in &self.origins {
            // π_r = c_B · B⁻¹ e_r, read from the starting identity column.
            let pi: f64 = self
                .basis
                .iter()
                .enumerate()
                .map(|(i, &b)| self.cost[b] * self.t[i][origin.identity_col])
                .sum();
            match origin.bounded {
                Some(k) => bounds[k] = -pi,
                None => rows.push(origin.sign * pi),
            }
        }
        (rows, bounds)
    }
}
