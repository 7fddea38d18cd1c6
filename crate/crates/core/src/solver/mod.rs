//! Linear programming engine and the signed-slack sign-pattern solver.

mod sign_pattern;
mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sign_pattern::{pattern, solve_sign_pattern_milp, SignPatternSolution, SignedSlackProblem};
pub use simplex::{solve_lp, Constraint, LpProblem, LpSolution, LpStatus, Relation, Sense};

/// Pivot rule used by [`solve_lp`]. Only one rule is implemented.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PivotRule {
    /// Lowest-index entering column, lowest basic index on ratio ties.
    #[default]
    Bland,
}

/// How the Big-M constant of the indicator formulation is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BigMPolicy {
    /// `factor × max_r max_j y_rj` over the active dataset.
    OutputScaled {
        factor: f64,
    },
    Fixed {
        value: f64,
    },
}

impl Default for BigMPolicy {
    fn default() -> Self {
        BigMPolicy::OutputScaled { factor: 10.0 }
    }
}

impl BigMPolicy {
    pub fn value(&self, max_output: f64) -> f64 {
        match *self {
            BigMPolicy::OutputScaled { factor } => factor * max_output,
            BigMPolicy::Fixed { value } => value,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Absolute tolerance on unit-scaled rows.
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Priority weight W on the count of negative-slack indicators.
    pub priority_weight: f64,
    pub big_m: BigMPolicy,
    pub pivot_rule: PivotRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            priority_weight: 10_000.0,
            big_m: BigMPolicy::default(),
            pivot_rule: PivotRule::Bland,
        }
    }
}

impl SolverConfig {
    /// Checks the tolerances and that W dominates the distance term for
    /// `s` outputs.
    pub fn validate(&self, s: usize) -> Result<()> {
        if !(self.feasibility_tol > 0.0 && self.optimality_tol > 0.0) {
            return Err(Error::Solver("tolerances must be positive".into()));
        }
        if s > 0 && !(self.priority_weight > 1.0 / s as f64) {
            return Err(Error::Solver(format!(
                "priority weight {} must exceed 1/s = {}",
                self.priority_weight,
                1.0 / s as f64
            )));
        }
        Ok(())
    }
}
