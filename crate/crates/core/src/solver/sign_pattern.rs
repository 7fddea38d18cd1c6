//! Exact solution of the signed-slack indicator program by enumerating the
//! 2^s slack sign patterns.
//!
//! For every pattern z the slack of output r is restricted to `[0, inf)`
//! when `z_r = 1` and to `(-inf, 0]` when `z_r = 0`, and one LP minimizes the
//! normalized distance `(1/s) Σ (s⁺_r + s⁻_r) / y_ro`. The winner maximizes
//! `Σ z_r` first and the distance second, which is the lexicographic reading
//! of `W Σ (1 - z_r) + distance` for dominant W. Remaining ties go to the
//! lower pattern index.

use serde::{Deserialize, Serialize};

use super::{solve_lp, LpProblem, Relation, SolverConfig};
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Reference technology and evaluated point of one signed-slack program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedSlackProblem {
    /// `ref_inputs[i][k]`: input i of reference unit k.
    pub ref_inputs: Vec<Vec<f64>>,
    /// `ref_outputs[r][k]`: output r of reference unit k.
    pub ref_outputs: Vec<Vec<f64>>,
    pub x_o: Vec<f64>,
    pub y_o: Vec<f64>,
}

impl SignedSlackProblem {
    /// Program for DMU `o` against the units in `group`.
    pub fn from_dataset(ds: &Dataset, group: &[usize], o: usize) -> Self {
        SignedSlackProblem {
            ref_inputs: ds
                .inputs()
                .iter()
                .map(|row| group.iter().map(|&j| row[j]).collect())
                .collect(),
            ref_outputs: ds
                .outputs()
                .iter()
                .map(|row| group.iter().map(|&j| row[j]).collect())
                .collect(),
            x_o: ds.x(o),
            y_o: ds.y(o),
        }
    }

    pub fn group_size(&self) -> usize {
        self.ref_outputs.first().map_or(0, Vec::len)
    }

    pub fn m(&self) -> usize {
        self.x_o.len()
    }

    pub fn s(&self) -> usize {
        self.y_o.len()
    }

    fn check(&self) -> Result<()> {
        let g = self.group_size();
        if g == 0 {
            return Err(Error::EmptyGroup);
        }
        if self.ref_inputs.len() != self.m() || self.ref_outputs.len() != self.s() {
            return Err(Error::Dimension("reference rows vs evaluated point".into()));
        }
        if self
            .ref_inputs
            .iter()
            .chain(&self.ref_outputs)
            .any(|r| r.len() != g)
        {
            return Err(Error::Dimension("ragged reference matrix".into()));
        }
        if let Some(v) = self.y_o.iter().find(|v| !(**v > 0.0)) {
            return Err(Error::InvalidDataset(format!(
                "evaluated outputs must be strictly positive, found {v}"
            )));
        }
        Ok(())
    }

    /// The LP for one fixed sign pattern. Variables: λ (g), s⁺ (s), s⁻ (s).
    pub fn pattern_lp(&self, z: &[bool]) -> LpProblem {
        let (g, s) = (self.group_size(), self.s());
        let mut cost = vec![0.0; g + 2 * s];
        for r in 0..s {
            let w = 1.0 / (s as f64 * self.y_o[r]);
            cost[g + r] = w;
            cost[g + s + r] = w;
        }
        let mut lp = LpProblem::minimize(cost);
        for (i, row) in self.ref_inputs.iter().enumerate() {
            let mut coeffs = vec![0.0; g + 2 * s];
            coeffs[..g].copy_from_slice(row);
            lp.constrain(coeffs, Relation::Le, self.x_o[i]);
        }
        for (r, row) in self.ref_outputs.iter().enumerate() {
            let mut coeffs = vec![0.0; g + 2 * s];
            coeffs[..g].copy_from_slice(row);
            coeffs[g + r] = -1.0;
            coeffs[g + s + r] = 1.0;
            lp.constrain(coeffs, Relation::Eq, self.y_o[r]);
        }
        for (r, &nonneg) in z.iter().enumerate() {
            if nonneg {
                lp.bound(g + s + r, 0.0, 0.0);
            } else {
                lp.bound(g + r, 0.0, 0.0);
            }
        }
        lp
    }
}

/// Sign pattern with index `index`: pattern 0 is all-nonnegative and bit r
/// of the index switches output r to a nonpositive slack.
pub fn pattern(index: usize, s: usize) -> Vec<bool> {
    (0..s).map(|r| (index >> r) & 1 == 0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignPatternSolution {
    /// `z[r]` is true when slack r is constrained nonnegative.
    pub z: Vec<bool>,
    pub pattern_index: usize,
    pub lambdas: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    /// Signed slacks `s⁺ - s⁻`.
    pub slacks: Vec<f64>,
    /// `(1/s) Σ (s⁺_r + s⁻_r) / y_ro`.
    pub distance: f64,
    /// `W Σ (1 - z_r) + distance`.
    pub objective: f64,
    pub alternate_optima: bool,
    pub feasible_patterns: usize,
}

impl SignPatternSolution {
    pub fn nonnegative_count(&self) -> usize {
        self.z.iter().filter(|&&b| b).count()
    }
}

/// Lexicographic optimum of the signed-slack program by exhaustive sign
/// pattern enumeration.
pub fn solve_sign_pattern_milp(
    p: &SignedSlackProblem,
    cfg: &SolverConfig,
) -> Result<SignPatternSolution> {
    p.check()?;
    let (g, s) = (p.group_size(), p.s());
    let mut best: Option<SignPatternSolution> = None;
    let mut feasible = 0;
    for index in 0..(1usize << s) {
        let z = pattern(index, s);
        let sol = solve_lp(&p.pattern_lp(&z), cfg)?;
        if !sol.is_optimal() {
            continue;
        }
        feasible += 1;
        let count = z.iter().filter(|&&b| b).count();
        let distance = sol.objective;
        let better = match &best {
            None => true,
            Some(b) => {
                let bc = b.nonnegative_count();
                count > bc
                    || count == bc
                        && distance < b.distance - cfg.optimality_tol * (1.0 + b.distance.abs())
            }
        };
        if better {
            let lambdas = sol.x[..g].to_vec();
            let plus = sol.x[g..g + s].to_vec();
            let minus = sol.x[g + s..].to_vec();
            let slacks = plus.iter().zip(&minus).map(|(a, b)| a - b).collect();
            best = Some(SignPatternSolution {
                objective: cfg.priority_weight * (s - count) as f64 + distance,
                z,
                pattern_index: index,
                lambdas,
                plus,
                minus,
                slacks,
                distance,
                alternate_optima: sol.alternate_optima,
                feasible_patterns: 0,
            });
        }
    }
    let mut best = best.ok_or_else(|| {
        Error::Solver("every slack sign pattern is infeasible (empty reference technology)".into())
    })?;
    best.feasible_patterns = feasible;
    Ok(best)
}
