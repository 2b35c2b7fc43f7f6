//! Two-phase bounded-variable primal simplex.
//!
//! Variables may carry arbitrary (possibly infinite) bounds; rows are `<=`,
//! `>=` or `=`. Every optimal solution comes with row multipliers in the
//! sensitivity convention `y_i = d(optimal objective) / d(b_i)` and reduced
//! costs `d = c - A^T y`, plus the residuals needed to check LP strong duality.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Objective {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

impl RowSense {
    fn flipped(self) -> Self {
        match self {
            RowSense::Le => RowSense::Ge,
            RowSense::Ge => RowSense::Le,
            RowSense::Eq => RowSense::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    sense: Objective,
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    row_senses: Vec<RowSense>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LinearProgram {
    /// New program over `objective.len()` variables, each bounded to `[0, +inf)`.
    pub fn new(sense: Objective, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            rows: Vec::new(),
            row_senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    /// Appends a row and returns its index.
    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) -> usize {
        self.rows.push(coeffs);
        self.row_senses.push(sense);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn sense(&self) -> Objective {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row_senses(&self) -> &[RowSense] {
        &self.row_senses
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn bounds(&self, var: usize) -> (f64, f64) {
        (self.lower[var], self.upper[var])
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidLp("no variables".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidLp("non-finite objective coefficient".into()));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidLp(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|a| !a.is_finite()) || !self.rhs[i].is_finite() {
                return Err(Error::InvalidLp(format!("row {i} has non-finite data")));
            }
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY
            {
                return Err(Error::InvalidLp(format!(
                    "variable {j} has invalid bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// Row activities `A x`.
    pub fn activities(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, v)| a * v).sum())
            .collect()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Certificate residuals of an optimal solution; all are absolute values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
    pub duality_gap: f64,
    pub dual_objective: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal
            .max(self.dual)
            .max(self.complementarity)
            .max(self.duality_gap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub primal: Vec<f64>,
    /// One multiplier per row, `d(objective)/d(rhs)`.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Infeasible: row multipliers `y` with `y^T A` sign-compatible with the
    /// bounds and `y^T b` contradicting them. Unbounded: an improving ray in
    /// the original variables.
    pub witness: Option<Vec<f64>>,
    pub residuals: Option<Residuals>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Smallest admissible pivot magnitude; also the reduced-cost threshold.
    pub pivot_tol: f64,
    /// Phase-one infeasibility threshold.
    pub feasibility_tol: f64,
    /// Pivot cap across both phases; `None` picks a size-based default.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            pivot_tol: 1e-9,
            feasibility_tol: 1e-8,
            max_iterations: None,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, &SimplexOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
    lp.validate()?;
    let std = StandardForm::build(lp);
    if let Some(row) = std.infeasible_empty_row {
        let mut witness = vec![0.0; lp.num_rows()];
        witness[row] = 1.0;
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            primal: vec![],
            duals: vec![],
            reduced_costs: vec![],
            objective: f64::NAN,
            iterations: 0,
            witness: Some(witness),
            residuals: None,
        });
    }
    let mut tab = Revised::new(&std);
    let limit = opts
        .max_iterations
        .unwrap_or(20_000 + 50 * (tab.m + tab.ncols));

    if tab.has_artificials() {
        let mut cost = vec![0.0; tab.ncols];
        for c in cost.iter_mut().skip(tab.art_start) {
            *c = 1.0;
        }
        tab.cost = cost;
        if let PhaseEnd::Unbounded(..) = tab.run(opts, limit, true)? {
            return Err(Error::Internal("phase one reported unbounded".into()));
        }
        let infeas = tab.infeasibility()?;
        if infeas > opts.feasibility_tol {
            let witness = std.map_row_duals(&tab.row_duals()?, 1.0);
            log::debug!("phase one ended with infeasibility {infeas:e}");
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                primal: vec![],
                duals: vec![],
                reduced_costs: vec![],
                objective: f64::NAN,
                iterations: tab.iterations,
                witness: Some(witness),
                residuals: None,
            });
        }
        tab.drive_out_artificials(opts)?;
    }

    let mut cost = vec![0.0; tab.ncols];
    cost[..std.n].copy_from_slice(&std.cost);
    tab.cost = cost;
    if let PhaseEnd::Unbounded(q, dir) = tab.run(opts, limit, false)? {
        let witness = std.map_primal_direction(&tab.ray(q, dir)?);
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            primal: vec![],
            duals: vec![],
            reduced_costs: vec![],
            objective: match lp.sense {
                Objective::Maximize => f64::INFINITY,
                Objective::Minimize => f64::NEG_INFINITY,
            },
            iterations: tab.iterations,
            witness: Some(witness),
            residuals: None,
        });
    }

    let primal = std.map_primal(&tab.structural(std.n));
    let sign = match lp.sense {
        Objective::Minimize => 1.0,
        Objective::Maximize => -1.0,
    };
    let duals = std.map_row_duals(&tab.row_duals()?, sign);
    let reduced_costs = reduced_costs(lp, &duals);
    let objective = lp.objective_value(&primal);
    let residuals = residuals(lp, &primal, &duals, &reduced_costs, objective);
    if residuals.max() > 1e-8 * (1.0 + objective.abs()) {
        log::warn!("simplex certificate residuals above tolerance: {residuals:?}");
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        primal,
        duals,
        reduced_costs,
        objective,
        iterations: tab.iterations,
        witness: None,
        residuals: Some(residuals),
    })
}

fn reduced_costs(lp: &LinearProgram, duals: &[f64]) -> Vec<f64> {
    (0..lp.num_vars())
        .map(|j| {
            lp.objective[j]
                - lp
                    .rows
                    .iter()
                    .zip(duals)
                    .map(|(row, y)| row[j] * y)
                    .sum::<f64>()
        })
        .collect()
}

/// Residuals of the optimality conditions for the primal/dual pair.
pub fn residuals(
    lp: &LinearProgram,
    x: &[f64],
    y: &[f64],
    d: &[f64],
    objective: f64,
) -> Residuals {
    let act = lp.activities(x);
    let maximize = lp.sense == Objective::Maximize;
    let mut primal = 0.0f64;
    let mut dual = 0.0f64;
    let mut compl = 0.0f64;
    let mut dual_obj = 0.0;
    for i in 0..lp.num_rows() {
        let slack = lp.rhs[i] - act[i];
        let viol = match lp.row_senses[i] {
            RowSense::Le => (-slack).max(0.0),
            RowSense::Ge => slack.max(0.0),
            RowSense::Eq => slack.abs(),
        };
        primal = primal.max(viol);
        // a <= row has y >= 0 when maximizing and y <= 0 when minimizing
        let dviol = match (lp.row_senses[i], maximize) {
            (RowSense::Le, true) | (RowSense::Ge, false) => (-y[i]).max(0.0),
            (RowSense::Ge, true) | (RowSense::Le, false) => y[i].max(0.0),
            (RowSense::Eq, _) => 0.0,
        };
        dual = dual.max(dviol);
        if lp.row_senses[i] != RowSense::Eq {
            compl = compl.max((y[i] * slack).abs());
        }
        dual_obj += y[i] * lp.rhs[i];
    }
    for j in 0..lp.num_vars() {
        let (lo, hi) = (lp.lower[j], lp.upper[j]);
        primal = primal.max((lo - x[j]).max(0.0)).max((x[j] - hi).max(0.0));
        let (pos, neg) = (d[j].max(0.0), (-d[j]).max(0.0));
        // bound paired with each sign of the reduced cost
        let (pos_bound, neg_bound) = if maximize { (hi, lo) } else { (lo, hi) };
        for (part, bound, sign) in [(pos, pos_bound, 1.0), (neg, neg_bound, -1.0)] {
            if part == 0.0 {
                continue;
            }
            if bound.is_finite() {
                compl = compl.max(part * (x[j] - bound).abs());
                dual_obj += sign * part * bound;
            } else {
                dual = dual.max(part);
            }
        }
    }
    Residuals {
        primal,
        dual,
        complementarity: compl,
        duality_gap: (objective - dual_obj).abs(),
        dual_objective: dual_obj,
    }
}

/// How one original variable is expressed through nonnegative internal columns.
#[derive(Debug, Clone)]
struct VarMap {
    cols: Vec<(usize, f64)>,
    offset: f64,
}

/// `min cost . x  s.t.  A x (sense) b,  x >= 0` with `b >= 0`.
#[derive(Debug)]
struct StandardForm {
    n: usize,
    cost: Vec<f64>,
    /// Upper bound of each internal column; lower bounds are all zero.
    upper: Vec<f64>,
    rows: Vec<Vec<f64>>,
    senses: Vec<RowSense>,
    rhs: Vec<f64>,
    /// Original row index for each internal row, `None` for bound rows.
    origin: Vec<Option<usize>>,
    /// +1 or -1 when the row was negated to make `b >= 0`.
    flip: Vec<f64>,
    vars: Vec<VarMap>,
    num_orig_rows: usize,
    infeasible_empty_row: Option<usize>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut n = 0;
        let mut upper: Vec<f64> = Vec::new();
        for j in 0..lp.num_vars() {
            let (lo, hi) = (lp.lower[j], lp.upper[j]);
            let map = if lo.is_finite() {
                upper.push(hi - lo);
                VarMap {
                    cols: vec![(n, 1.0)],
                    offset: lo,
                }
            } else if hi.is_finite() {
                upper.push(f64::INFINITY);
                VarMap {
                    cols: vec![(n, -1.0)],
                    offset: hi,
                }
            } else {
                upper.extend([f64::INFINITY; 2]);
                let m = VarMap {
                    cols: vec![(n, 1.0), (n + 1, -1.0)],
                    offset: 0.0,
                };
                n += 1;
                m
            };
            n += 1;
            vars.push(map);
        }
        let sgn = match lp.sense {
            Objective::Minimize => 1.0,
            Objective::Maximize => -1.0,
        };
        let mut cost = vec![0.0; n];
        for (j, v) in vars.iter().enumerate() {
            for &(c, s) in &v.cols {
                cost[c] += sgn * s * lp.objective[j];
            }
        }
        let mut out = Self {
            n,
            cost,
            upper,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            origin: Vec::new(),
            flip: Vec::new(),
            vars,
            num_orig_rows: lp.num_rows(),
            infeasible_empty_row: None,
        };
        for i in 0..lp.num_rows() {
            let mut row = vec![0.0; n];
            let mut b = lp.rhs[i];
            for (j, v) in out.vars.iter().enumerate() {
                let a = lp.rows[i][j];
                if a == 0.0 {
                    continue;
                }
                b -= a * v.offset;
                for &(c, s) in &v.cols {
                    row[c] += a * s;
                }
            }
            if row.iter().all(|&a| a == 0.0) {
                let ok = match lp.row_senses[i] {
                    RowSense::Le => b >= -1e-8,
                    RowSense::Ge => b <= 1e-8,
                    RowSense::Eq => b.abs() <= 1e-8,
                };
                if !ok && out.infeasible_empty_row.is_none() {
                    out.infeasible_empty_row = Some(i);
                }
                continue;
            }
            out.push_row(row, lp.row_senses[i], b, Some(i));
        }
        out
    }

    fn push_row(&mut self, mut row: Vec<f64>, sense: RowSense, b: f64, origin: Option<usize>) {
        let (sense, b, flip) = if b < 0.0 {
            row.iter_mut().for_each(|a| *a = -*a);
            (sense.flipped(), -b, -1.0)
        } else {
            (sense, b, 1.0)
        };
        self.rows.push(row);
        self.senses.push(sense);
        self.rhs.push(b);
        self.origin.push(origin);
        self.flip.push(flip);
    }

    fn map_primal(&self, x_int: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| v.offset + v.cols.iter().map(|&(c, s)| s * x_int[c]).sum::<f64>())
            .collect()
    }

    fn map_primal_direction(&self, d_int: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| v.cols.iter().map(|&(c, s)| s * d_int[c]).sum::<f64>())
            .collect()
    }

    fn map_row_duals(&self, y_int: &[f64], sign: f64) -> Vec<f64> {
        let mut y = vec![0.0; self.num_orig_rows];
        for (r, &yr) in y_int.iter().enumerate() {
            if let Some(i) = self.origin[r] {
                y[i] = sign * self.flip[r] * yr;
            }
        }
        y
    }
}

/// Consecutive degenerate pivots after which pricing falls back to Bland's rule.
const STALL_LIMIT: usize = 50;
const RATIO_TIE_TOL: f64 = 1e-12;

enum PhaseEnd {
    Optimal,
    Unbounded(usize, f64),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Basic,
    AtLower,
    AtUpper,
}

/// Bounded-variable revised simplex on `A x = b`, `0 <= x <= u`. The basis is
/// refactorized at every iteration, so no update error accumulates.
struct Revised {
    m: usize,
    ncols: usize,
    art_start: usize,
    a: DMatrix<f64>,
    b: DVector<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    basis: Vec<usize>,
    status: Vec<Status>,
    x: Vec<f64>,
    iterations: usize,
}

struct Factored {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_t: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
}

impl Factored {
    fn solve(&self, v: &DVector<f64>) -> Option<DVector<f64>> {
        self.lu.solve(v)
    }

    fn solve_t(&self, v: &DVector<f64>) -> Option<DVector<f64>> {
        self.lu_t.solve(v)
    }
}

impl Revised {
    fn new(std: &StandardForm) -> Self {
        let m = std.rows.len();
        let n = std.n;
        let num_slack = std.senses.iter().filter(|s| **s != RowSense::Eq).count();
        let num_art = std.senses.iter().filter(|s| **s != RowSense::Le).count();
        let art_start = n + num_slack;
        let ncols = art_start + num_art;
        let mut a = DMatrix::zeros(m, ncols);
        let mut basis = vec![0; m];
        let mut upper = std.upper.clone();
        upper.resize(ncols, f64::INFINITY);
        let (mut s, mut t) = (n, art_start);
        for r in 0..m {
            for c in 0..n {
                a[(r, c)] = std.rows[r][c];
            }
            match std.senses[r] {
                RowSense::Le => {
                    a[(r, s)] = 1.0;
                    basis[r] = s;
                    s += 1;
                }
                RowSense::Ge => {
                    a[(r, s)] = -1.0;
                    a[(r, t)] = 1.0;
                    basis[r] = t;
                    s += 1;
                    t += 1;
                }
                RowSense::Eq => {
                    a[(r, t)] = 1.0;
                    basis[r] = t;
                    t += 1;
                }
            }
        }
        let mut status = vec![Status::AtLower; ncols];
        let mut x = vec![0.0; ncols];
        for (r, &j) in basis.iter().enumerate() {
            status[j] = Status::Basic;
            x[j] = std.rhs[r];
        }
        Self {
            m,
            ncols,
            art_start,
            a,
            b: DVector::from_vec(std.rhs.clone()),
            upper,
            cost: vec![0.0; ncols],
            basis,
            status,
            x,
            iterations: 0,
        }
    }

    fn has_artificials(&self) -> bool {
        self.art_start < self.ncols
    }

    fn factor(&self) -> Result<Factored> {
        let bmat = DMatrix::from_fn(self.m, self.m, |r, k| self.a[(r, self.basis[k])]);
        let f = Factored {
            lu_t: bmat.transpose().lu(),
            lu: bmat.lu(),
        };
        if !f.lu.is_invertible() {
            return Err(Error::NumericalBreakdown(format!(
                "singular basis after {} pivots",
                self.iterations
            )));
        }
        Ok(f)
    }

    /// Recomputes basic values from the nonbasic ones.
    fn update_basic(&mut self, f: &Factored) -> Result<()> {
        let mut rhs = self.b.clone();
        for j in 0..self.ncols {
            if self.status[j] != Status::Basic && self.x[j] != 0.0 {
                rhs.axpy(-self.x[j], &self.a.column(j), 1.0);
            }
        }
        let xb = f
            .solve(&rhs)
            .ok_or_else(|| Error::NumericalBreakdown("basis solve failed".into()))?;
        for (k, &j) in self.basis.iter().enumerate() {
            self.x[j] = xb[k];
        }
        Ok(())
    }

    fn duals(&self, f: &Factored) -> Result<DVector<f64>> {
        let cb = DVector::from_fn(self.m, |k, _| self.cost[self.basis[k]]);
        f.solve_t(&cb)
            .ok_or_else(|| Error::NumericalBreakdown("basis solve failed".into()))
    }

    fn reduced(&self, y: &DVector<f64>, j: usize) -> f64 {
        self.cost[j] - self.a.column(j).dot(y)
    }

    fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    fn run(&mut self, opts: &SimplexOptions, limit: usize, phase_one: bool) -> Result<PhaseEnd> {
        let allowed = if phase_one { self.ncols } else { self.art_start };
        let mut stalled = 0usize;
        loop {
            let f = self.factor()?;
            self.update_basic(&f)?;
            let y = self.duals(&f)?;
            let bland = stalled >= STALL_LIMIT;
            // improving direction: +1 raises a variable at its lower bound
            let mut entering: Option<(usize, f64, f64)> = None;
            for j in 0..allowed {
                let dir = match self.status[j] {
                    Status::Basic => continue,
                    Status::AtLower if self.upper[j] > 0.0 => 1.0,
                    Status::AtUpper => -1.0,
                    Status::AtLower => continue,
                };
                let d = self.reduced(&y, j);
                if d * dir < -opts.pivot_tol {
                    let score = d.abs();
                    if bland {
                        entering = Some((j, dir, score));
                        break;
                    }
                    if entering.map_or(true, |(_, _, s)| score > s) {
                        entering = Some((j, dir, score));
                    }
                }
            }
            let Some((q, dir, _)) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            if self.iterations >= limit {
                return Err(Error::NumericalBreakdown(format!(
                    "no convergence after {} pivots",
                    self.iterations
                )));
            }
            let w = f
                .solve(&self.a.column(q).into_owned())
                .ok_or_else(|| Error::NumericalBreakdown("basis solve failed".into()))?;
            let wmax = w.amax().max(1.0);
            let tol = opts.pivot_tol * wmax;

            // x_B(theta) = x_B - theta * dir * w
            let mut theta = self.upper[q];
            let mut leave: Option<(usize, Status)> = None;
            let ratio = |k: usize| -> Option<(f64, Status)> {
                let j = self.basis[k];
                let rate = dir * w[k];
                if rate > tol {
                    Some((self.x[j].max(0.0) / rate, Status::AtLower))
                } else if rate < -tol && self.upper[j].is_finite() {
                    Some(((self.upper[j] - self.x[j]).max(0.0) / -rate, Status::AtUpper))
                } else {
                    None
                }
            };
            let mut min_ratio = f64::INFINITY;
            for k in 0..self.m {
                if let Some((t, _)) = ratio(k) {
                    min_ratio = min_ratio.min(t);
                }
            }
            if min_ratio < theta {
                let cut = min_ratio + RATIO_TIE_TOL * (1.0 + min_ratio);
                for k in 0..self.m {
                    let Some((t, st)) = ratio(k) else { continue };
                    if t > cut {
                        continue;
                    }
                    let better = match leave {
                        None => true,
                        Some((l, _)) if bland => self.basis[k] < self.basis[l],
                        Some((l, _)) => w[k].abs() > w[l].abs(),
                    };
                    if better {
                        leave = Some((k, st));
                    }
                }
                theta = min_ratio;
            }
            if !theta.is_finite() {
                return Ok(PhaseEnd::Unbounded(q, dir));
            }
            let before = self.objective();
            self.x[q] += dir * theta;
            match leave {
                None => {
                    // bound flip, the basis is unchanged
                    self.status[q] = if dir > 0.0 { Status::AtUpper } else { Status::AtLower };
                    self.x[q] = if dir > 0.0 { self.upper[q] } else { 0.0 };
                }
                Some((k, st)) => {
                    let out = self.basis[k];
                    self.status[out] = st;
                    self.x[out] = if st == Status::AtUpper { self.upper[out] } else { 0.0 };
                    self.basis[k] = q;
                    self.status[q] = Status::Basic;
                }
            }
            self.iterations += 1;
            let progress = before - (before + dir * theta * self.reduced(&y, q));
            if progress > 1e-12 * (1.0 + before.abs()) {
                stalled = 0;
            } else {
                stalled += 1;
            }
            if self.iterations % 1000 == 0 {
                log::debug!(
                    "pivot {} phase one {phase_one} objective {:.15e} stalled {stalled}",
                    self.iterations,
                    self.objective()
                );
            }
            log::trace!(
                "pivot {} enter {q} leave {:?} theta {theta:e} bland {bland}",
                self.iterations,
                leave.map(|(k, _)| k)
            );
        }
    }

    /// Phase-one objective once basic values are refreshed.
    fn infeasibility(&mut self) -> Result<f64> {
        let f = self.factor()?;
        self.update_basic(&f)?;
        Ok((self.art_start..self.ncols).map(|j| self.x[j].max(0.0)).sum())
    }

    /// Swaps artificials left basic at zero for other columns where possible and
    /// pins every artificial to zero.
    fn drive_out_artificials(&mut self, opts: &SimplexOptions) -> Result<()> {
        for k in 0..self.m {
            if self.basis[k] < self.art_start {
                continue;
            }
            let f = self.factor()?;
            let mut e = DVector::zeros(self.m);
            e[k] = 1.0;
            let Some(row) = f.solve_t(&e) else { continue };
            let cand = (0..self.art_start)
                .filter(|&j| self.status[j] != Status::Basic)
                .map(|j| (j, self.a.column(j).dot(&row).abs()))
                .filter(|&(_, v)| v > opts.pivot_tol)
                .max_by(|x, y| x.1.partial_cmp(&y.1).unwrap().then(y.0.cmp(&x.0)));
            if let Some((j, _)) = cand {
                let out = self.basis[k];
                self.status[out] = Status::AtLower;
                self.x[out] = 0.0;
                self.basis[k] = j;
                self.status[j] = Status::Basic;
                self.iterations += 1;
            }
        }
        for j in self.art_start..self.ncols {
            self.upper[j] = 0.0;
        }
        let f = self.factor()?;
        self.update_basic(&f)
    }

    fn ray(&self, q: usize, dir: f64) -> Result<Vec<f64>> {
        let f = self.factor()?;
        let w = f
            .solve(&self.a.column(q).into_owned())
            .ok_or_else(|| Error::NumericalBreakdown("basis solve failed".into()))?;
        let mut d = vec![0.0; self.ncols];
        d[q] = dir;
        for (k, &j) in self.basis.iter().enumerate() {
            d[j] = -dir * w[k];
        }
        Ok(d)
    }

    fn row_duals(&self) -> Result<Vec<f64>> {
        let f = self.factor()?;
        Ok(self.duals(&f)?.iter().copied().collect())
    }

    /// Structural values, clamped onto their bounds.
    fn structural(&self, n: usize) -> Vec<f64> {
        (0..n).map(|j| self.x[j].clamp(0.0, self.upper[j])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_certified(sol: &LpSolution) {
        let r = sol.residuals.expect("optimal solutions carry residuals");
        assert!(r.max() <= 1e-8, "{r:?}");
    }

    #[test]
    fn single_variable_upper_row() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0]);
        lp.add_row(vec![1.0], RowSense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.primal[0] - 1.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
        assert_certified(&sol);
    }

    #[test]
    fn degenerate_face_returns_a_vertex_on_it() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!((sol.primal[0] + sol.primal[1] - 1.0).abs() < 1e-12);
        assert!(sol.primal.iter().any(|v| v.abs() < 1e-12), "vertex expected");
        assert_certified(&sol);
    }

    #[test]
    fn free_variable_capped_by_fixed_multiple() {
        // maximize t s.t. t <= 0.3 a with a fixed at 2, t free
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0, 0.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, 2.0, 2.0);
        lp.add_row(vec![1.0, -0.3], RowSense::Le, 0.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.primal[0] - 0.6).abs() < 1e-12);
        assert!((sol.objective - 0.6).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
        // the fixed variable's reduced cost prices the bound: d = 0 - (-0.3)
        assert!((sol.reduced_costs[1] - 0.3).abs() < 1e-12);
        assert_certified(&sol);
    }

    #[test]
    fn minimize_with_ge_and_eq_rows() {
        // min 2x + 3y s.t. x + y >= 4, x - y = 1, x,y >= 0  ->  x=2.5, y=1.5
        let mut lp = LinearProgram::new(Objective::Minimize, vec![2.0, 3.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Ge, 4.0);
        lp.add_row(vec![1.0, -1.0], RowSense::Eq, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.primal[0] - 2.5).abs() < 1e-12);
        assert!((sol.primal[1] - 1.5).abs() < 1e-12);
        assert!((sol.objective - 9.5).abs() < 1e-12);
        // y1 = d obj / d b1 = 2.5, y2 = -0.5
        assert!((sol.duals[0] - 2.5).abs() < 1e-12);
        assert!((sol.duals[1] + 0.5).abs() < 1e-12);
        assert_certified(&sol);
    }

    #[test]
    fn negative_rhs_rows_are_flipped_consistently() {
        // max -x s.t. -x <= -3  ->  x = 3, dual = d obj / d b = 1
        let mut lp = LinearProgram::new(Objective::Maximize, vec![-1.0]);
        lp.add_row(vec![-1.0], RowSense::Le, -3.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.primal[0] - 3.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
        assert_certified(&sol);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        let mut lp = LinearProgram::new(Objective::Minimize, vec![-0.75, 20.0, -0.5, 6.0]);
        lp.add_row(vec![0.25, -8.0, -1.0, 9.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.5, -12.0, -0.5, 3.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], RowSense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective + 1.25).abs() < 1e-12);
        assert_certified(&sol);
    }

    #[test]
    fn upper_bounds_without_rows() {
        // max x + 2y, x,y in [0,1], x + y <= 1.5
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0, 2.0]);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(1, 0.0, 1.0);
        lp.add_row(vec![1.0, 1.0], RowSense::Le, 1.5);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.primal[0] - 0.5).abs() < 1e-12);
        assert!((sol.primal[1] - 1.0).abs() < 1e-12);
        assert!((sol.duals[0] - 1.0).abs() < 1e-12);
        // the bound on y is priced by its reduced cost
        assert!((sol.reduced_costs[1] - 1.0).abs() < 1e-12);
        assert_certified(&sol);
    }

    #[test]
    fn infeasible_with_witness() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0]);
        lp.add_row(vec![1.0], RowSense::Le, 1.0);
        lp.add_row(vec![1.0], RowSense::Ge, 2.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        let y = sol.witness.unwrap();
        // y^T A has the sign that makes y^T b impossible
        let ya: f64 = y[0] + y[1];
        let yb: f64 = y[0] * 1.0 + y[1] * 2.0;
        assert!(ya.abs() < 1e-12 && yb.abs() > 0.5, "y = {y:?}");
    }

    #[test]
    fn empty_row_presolve() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0]);
        lp.add_row(vec![0.0], RowSense::Le, 1.0);
        lp.add_row(vec![1.0], RowSense::Le, 2.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.duals[0], 0.0);
        assert!((sol.primal[0] - 2.0).abs() < 1e-12);

        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0]);
        lp.add_row(vec![0.0], RowSense::Ge, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_with_ray() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0, 1.0]);
        lp.add_row(vec![1.0, -1.0], RowSense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        let ray = sol.witness.unwrap();
        assert!(ray[0] + ray[1] > 0.0);
        assert!(ray[0] - ray[1] <= 1e-12);
        assert!(ray.iter().all(|v| *v >= -1e-12));
    }

    #[test]
    fn invalid_programs_rejected() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0]);
        lp.add_row(vec![1.0, 2.0], RowSense::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidLp(_))));
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidLp(_))));
    }

    #[test]
    fn redundant_equality_rows() {
        // two copies of the same equality leave an artificial basic at zero
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Eq, 1.0);
        lp.add_row(vec![2.0, 2.0], RowSense::Eq, 2.0);
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert_certified(&sol);
    }

    #[test]
    fn iteration_cap_reports_breakdown() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![1.0, 1.0]);
        lp.add_row(vec![1.0, 0.0], RowSense::Le, 1.0);
        lp.add_row(vec![0.0, 1.0], RowSense::Le, 1.0);
        let opts = SimplexOptions {
            max_iterations: Some(1),
            ..Default::default()
        };
        assert!(matches!(
            solve_lp_with(&lp, &opts),
            Err(Error::NumericalBreakdown(_))
        ));
    }

    #[test]
    fn repeated_solves_are_bit_identical() {
        let mut lp = LinearProgram::new(Objective::Maximize, vec![0.3, 0.7, 0.1]);
        lp.add_row(vec![0.2, 0.9, 0.4], RowSense::Le, 0.5);
        lp.add_row(vec![0.8, 0.1, 0.3], RowSense::Le, 0.6);
        lp.add_row(vec![1.0, 1.0, 1.0], RowSense::Ge, 0.2);
        for j in 0..3 {
            lp.set_bounds(j, 0.0, 1.0);
        }
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(a, b);
        assert_certified(&a);
    }
}
