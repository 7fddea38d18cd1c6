//! Dense two-phase primal simplex.
//!
//! Bounded variables are shifted or split into nonnegative standard-form
//! columns, every row is scaled to unit max-norm, and the tableau is pivoted
//! with Bland's rule (lowest index entering, lowest basic index leaving on
//! ratio ties). The problems in this crate have at most a few dozen columns,
//! so no factorization or sparsity tricks are used.

use serde::{Deserialize, Serialize};

use super::SolverConfig;
use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A small dense linear program.
///
/// Variables default to `[0, +inf)`. Lower bounds may be `-inf` and upper
/// bounds `+inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub sense: Sense,
    pub cost: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(sense: Sense, cost: Vec<f64>) -> Self {
        let n = cost.len();
        LpProblem {
            sense,
            cost,
            constraints: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn minimize(cost: Vec<f64>) -> Self {
        Self::new(Sense::Minimize, cost)
    }

    pub fn maximize(cost: Vec<f64>) -> Self {
        Self::new(Sense::Maximize, cost)
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn bound(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension(format!(
                "{} variables but {} lower and {} upper bounds",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        if self.cost.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("objective".into()));
        }
        for (k, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Dimension(format!(
                    "constraint {k} has {} coefficients for {n} variables",
                    c.coeffs.len()
                )));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|a| !a.is_finite()) {
                return Err(Error::NonFinite(format!("constraint {k}")));
            }
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Error::NonFinite(format!("bounds of variable {j}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value in the problem's own sense. NaN unless optimal.
    pub objective: f64,
    /// Primal values; empty unless optimal.
    pub x: Vec<f64>,
    /// The optimal face has dimension at least one: some nonbasic column
    /// with zero reduced cost can enter with a positive step (or along a ray).
    pub alternate_optima: bool,
    pub iterations: usize,
}

impl LpSolution {
    fn status_only(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            objective: f64::NAN,
            x: Vec::new(),
            alternate_optima: false,
            iterations,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// How an original variable is recovered from standard-form columns.
#[derive(Clone, Copy, Debug)]
enum VarMap {
    /// x = offset + col
    Shift { col: usize, offset: f64 },
    /// x = offset - col
    Mirror { col: usize, offset: f64 },
    /// x = plus - minus
    Split { plus: usize, minus: usize },
}

struct Tableau {
    rows: usize,
    cols: usize,
    /// rows × (cols + 1), last column is the right-hand side.
    a: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced-cost row, last entry is minus the objective value.
    obj: Vec<f64>,
    iterations: usize,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * (self.cols + 1) + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.a[i * (self.cols + 1) + self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.a[r * w + c];
        for j in 0..w {
            self.a[r * w + j] /= p;
        }
        self.a[r * w + c] = 1.0;
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.a[i * w + j] -= f * self.a[r * w + j];
                }
                self.a[i * w + c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for j in 0..w {
                self.obj[j] -= f * self.a[r * w + j];
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.iterations += 1;
    }

    /// Lowest-index leaving row among minimum ratios; `None` when the column
    /// has no positive entry.
    fn ratio_test(&self, c: usize) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, c);
            if a > PIVOT_TOL {
                let ratio = self.rhs(i).max(0.0) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br.abs());
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        best
    }

    /// Runs Bland's rule until optimal; `Ok(false)` means unbounded.
    fn optimize(&mut self, allowed: &[bool], opt_tol: f64) -> Result<bool> {
        loop {
            if self.iterations > MAX_ITERATIONS {
                return Err(Error::Solver("simplex iteration limit reached".into()));
            }
            let entering = (0..self.cols).find(|&j| allowed[j] && self.obj[j] < -opt_tol);
            let Some(c) = entering else {
                return Ok(true);
            };
            match self.ratio_test(c) {
                Some((r, _)) => self.pivot(r, c),
                None => return Ok(false),
            }
        }
    }
}

/// Solves `p` to optimality, or reports infeasibility or unboundedness.
pub fn solve_lp(p: &LpProblem, cfg: &SolverConfig) -> Result<LpSolution> {
    p.check()?;
    let n = p.num_vars();

    // Standard-form columns for the structural variables.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    let mut twin = Vec::new();
    let mut upper_rows = Vec::new();
    for j in 0..n {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        if lo.is_finite() {
            maps.push(VarMap::Shift {
                col: ncols,
                offset: lo,
            });
            if hi.is_finite() {
                upper_rows.push((ncols, hi - lo));
            }
            twin.push(None);
            ncols += 1;
        } else if hi.is_finite() {
            maps.push(VarMap::Mirror {
                col: ncols,
                offset: hi,
            });
            twin.push(None);
            ncols += 1;
        } else {
            maps.push(VarMap::Split {
                plus: ncols,
                minus: ncols + 1,
            });
            twin.push(Some(ncols + 1));
            twin.push(Some(ncols));
            ncols += 2;
            continue;
        }
    }
    let nstruct = ncols;

    // Rows in standard-form column space, scaled, with nonnegative rhs.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for c in &p.constraints {
        let mut coeffs = vec![0.0; nstruct];
        let mut rhs = c.rhs;
        for (j, &a) in c.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, offset } => {
                    coeffs[col] += a;
                    rhs -= a * offset;
                }
                VarMap::Mirror { col, offset } => {
                    coeffs[col] -= a;
                    rhs -= a * offset;
                }
                VarMap::Split { plus, minus } => {
                    coeffs[plus] += a;
                    coeffs[minus] -= a;
                }
            }
        }
        rows.push((coeffs, c.relation, rhs));
    }
    for &(col, width) in &upper_rows {
        let mut coeffs = vec![0.0; nstruct];
        coeffs[col] = 1.0;
        rows.push((coeffs, Relation::Le, width));
    }

    let mut kept = Vec::new();
    for (mut coeffs, mut rel, mut rhs) in rows {
        let scale = coeffs.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        if scale == 0.0 {
            let ok = match rel {
                Relation::Le => rhs >= -cfg.feasibility_tol,
                Relation::Ge => rhs <= cfg.feasibility_tol,
                Relation::Eq => rhs.abs() <= cfg.feasibility_tol,
            };
            if !ok {
                return Ok(LpSolution::status_only(LpStatus::Infeasible, 0));
            }
            continue;
        }
        coeffs.iter_mut().for_each(|a| *a /= scale);
        rhs /= scale;
        if rhs < 0.0 {
            coeffs.iter_mut().for_each(|a| *a = -*a);
            rhs = -rhs;
            rel = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        kept.push((coeffs, rel, rhs));
    }

    let nrows = kept.len();
    let nslack = kept.iter().filter(|r| r.1 != Relation::Eq).count();
    let nart = kept.iter().filter(|r| r.1 != Relation::Le).count();
    let first_slack = nstruct;
    let first_art = nstruct + nslack;
    let cols = first_art + nart;
    let w = cols + 1;

    let mut t = Tableau {
        rows: nrows,
        cols,
        a: vec![0.0; nrows * w],
        basis: vec![0; nrows],
        obj: vec![0.0; w],
        iterations: 0,
    };
    let (mut next_slack, mut next_art) = (first_slack, first_art);
    for (i, (coeffs, rel, rhs)) in kept.iter().enumerate() {
        t.a[i * w..i * w + nstruct].copy_from_slice(coeffs);
        t.a[i * w + cols] = *rhs;
        match rel {
            Relation::Le => {
                t.a[i * w + next_slack] = 1.0;
                t.basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                t.a[i * w + next_slack] = -1.0;
                next_slack += 1;
                t.a[i * w + next_art] = 1.0;
                t.basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                t.a[i * w + next_art] = 1.0;
                t.basis[i] = next_art;
                next_art += 1;
            }
        }
    }
    let rhs_scale = 1.0 + kept.iter().fold(0.0_f64, |m, r| m.max(r.2));

    // Phase I: minimize the sum of artificials.
    if nart > 0 {
        for j in first_art..cols {
            t.obj[j] = 1.0;
        }
        for i in 0..nrows {
            if t.basis[i] >= first_art {
                for j in 0..w {
                    t.obj[j] -= t.a[i * w + j];
                }
            }
        }
        let allowed = vec![true; cols];
        t.optimize(&allowed, cfg.optimality_tol)?;
        let infeasibility = -t.obj[cols];
        if infeasibility > cfg.feasibility_tol * rhs_scale {
            return Ok(LpSolution::status_only(LpStatus::Infeasible, t.iterations));
        }
        // Drive remaining artificials out of the basis.
        let mut redundant = Vec::new();
        for i in 0..nrows {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| t.at(i, j).abs() > 1e-9) {
                    Some(j) => t.pivot(i, j),
                    None => redundant.push(i),
                }
            }
        }
        for &i in &redundant {
            for j in 0..w {
                t.a[i * w + j] = 0.0;
            }
        }
    }

    // Phase II.
    let sign = match p.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; cols];
    for (j, m) in maps.iter().enumerate() {
        let c = sign * p.cost[j];
        match *m {
            VarMap::Shift { col, .. } => cost[col] += c,
            VarMap::Mirror { col, .. } => cost[col] -= c,
            VarMap::Split { plus, minus } => {
                cost[plus] += c;
                cost[minus] -= c;
            }
        }
    }
    t.obj = vec![0.0; w];
    t.obj[..cols].copy_from_slice(&cost);
    for i in 0..nrows {
        let b = t.basis[i];
        let cb = if b < cols { cost[b] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..w {
                t.obj[j] -= cb * t.a[i * w + j];
            }
        }
    }
    let allowed: Vec<bool> = (0..cols).map(|j| j < first_art).collect();
    if !t.optimize(&allowed, cfg.optimality_tol)? {
        return Ok(LpSolution::status_only(LpStatus::Unbounded, t.iterations));
    }

    let mut values = vec![0.0; cols];
    for i in 0..nrows {
        if t.basis[i] < cols {
            values[t.basis[i]] = t.rhs(i).max(0.0);
        }
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| match *m {
            VarMap::Shift { col, offset } => offset + values[col],
            VarMap::Mirror { col, offset } => offset - values[col],
            VarMap::Split { plus, minus } => values[plus] - values[minus],
        })
        .collect();
    let objective = p.cost.iter().zip(&x).map(|(c, v)| c * v).sum();

    let in_basis: Vec<bool> = {
        let mut b = vec![false; cols];
        for &j in &t.basis {
            if j < cols {
                b[j] = true;
            }
        }
        b
    };
    let alternate_optima = (0..first_art).any(|j| {
        if in_basis[j] || t.obj[j].abs() > cfg.optimality_tol {
            return false;
        }
        if let Some(Some(partner)) = twin.get(j) {
            if in_basis[*partner] {
                return false;
            }
        }
        match t.ratio_test(j) {
            None => true,
            Some((_, step)) => step > cfg.feasibility_tol,
        }
    });

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        x,
        alternate_optima,
        iterations: t.iterations,
    })
}
