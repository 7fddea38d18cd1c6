//! Robust-and-closest efficiency: each unit is projected onto the technology
//! of every robust group with the signed-slack program, and the group scores
//! are aggregated into one θ.
//!
//! Negative slacks are allowed. A negative slack means the unit produces more
//! of that output than its robust target, i.e. its output mix is distorted
//! away from the multi-facet intersection; a positive slack is an ordinary
//! shortfall.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::measures::{russell_theta, snap};
use crate::partition::RobustPartition;
use crate::solver::{solve_sign_pattern_milp, SignedSlackProblem, SolverConfig};

/// How the per-group scores θ_p are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    /// Best group: reproduces the published results table.
    #[default]
    Table4Max,
    /// Worst group, as in the printed aggregation formula.
    PaperMin,
}

impl Aggregation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregation::Table4Max => "table4-max",
            Aggregation::PaperMin => "paper-min",
        }
    }
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table4-max" => Ok(Aggregation::Table4Max),
            "paper-min" => Ok(Aggregation::PaperMin),
            other => Err(Error::InvalidDataset(format!(
                "unknown aggregation '{other}' (expected table4-max or paper-min)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustConfig {
    pub solver: SolverConfig,
    pub aggregation: Aggregation,
    /// Warn when the target's output norm falls below this fraction of the
    /// evaluated unit's.
    pub shrinkage_fraction: f64,
}

impl Default for RobustConfig {
    fn default() -> Self {
        RobustConfig {
            solver: SolverConfig::default(),
            aggregation: Aggregation::default(),
            shrinkage_fraction: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlackKind {
    Zero,
    /// Positive slack: output the unit cannot yet reach.
    Shortfall,
    /// Negative slack: output beyond the robust target.
    Distortion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    /// 0-based group index p.
    pub group: usize,
    pub members: Vec<usize>,
    /// λ aligned with `members`.
    pub lambdas: Vec<f64>,
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub slacks: Vec<f64>,
    pub z: Vec<bool>,
    /// Γ_p = (1/s) Σ (s⁺_r + s⁻_r) / y_ro
    pub distance: f64,
    pub theta: f64,
    pub target: Vec<f64>,
    pub target_inputs: Vec<f64>,
    pub alternate_optima: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyResult {
    pub dmu: usize,
    pub name: String,
    pub theta: f64,
    pub chosen_group: usize,
    pub aggregation: Aggregation,
    pub groups: Vec<GroupResult>,
    pub slack_kinds: Vec<SlackKind>,
    pub warnings: Vec<String>,
}

impl EfficiencyResult {
    pub fn chosen(&self) -> &GroupResult {
        &self.groups[self.chosen_group]
    }

    pub fn slacks(&self) -> &[f64] {
        &self.chosen().slacks
    }
}

/// Signed-slack projection of unit `o` onto the technology spanned by `group`.
pub fn evaluate_group(
    ds: &Dataset,
    group: &[usize],
    o: usize,
    cfg: &SolverConfig,
) -> Result<GroupResult> {
    let problem = SignedSlackProblem::from_dataset(ds, group, o);
    let sol = solve_sign_pattern_milp(&problem, cfg)?;
    let y_o = &problem.y_o;
    let plus: Vec<f64> = sol
        .plus
        .iter()
        .zip(y_o)
        .map(|(v, y)| snap(*v, *y))
        .collect();
    let minus: Vec<f64> = sol
        .minus
        .iter()
        .zip(y_o)
        .map(|(v, y)| snap(*v, *y))
        .collect();
    let slacks: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| p - m).collect();
    let target = (0..ds.s())
        .map(|r| {
            group
                .iter()
                .zip(&sol.lambdas)
                .map(|(&j, l)| l * ds.output(r, j))
                .sum()
        })
        .collect();
    let target_inputs = (0..ds.m())
        .map(|i| {
            group
                .iter()
                .zip(&sol.lambdas)
                .map(|(&j, l)| l * ds.input(i, j))
                .sum()
        })
        .collect();
    let s = ds.s() as f64;
    let distance = plus
        .iter()
        .zip(&minus)
        .zip(y_o)
        .map(|((p, m), y)| (p + m) / y)
        .sum::<f64>()
        / s;
    Ok(GroupResult {
        group: 0,
        members: group.to_vec(),
        lambdas: sol.lambdas,
        theta: russell_theta(&slacks, y_o),
        plus,
        minus,
        slacks,
        z: sol.z,
        distance,
        target,
        target_inputs,
        alternate_optima: sol.alternate_optima,
    })
}

/// Scores unit `o` against every robust group and aggregates per `cfg`.
pub fn robust_efficiency(
    ds: &Dataset,
    part: &RobustPartition,
    o: usize,
    cfg: &RobustConfig,
) -> Result<EfficiencyResult> {
    if part.groups.is_empty() {
        return Err(Error::NoFacets);
    }
    let mut groups = Vec::with_capacity(part.groups.len());
    for (p, g) in part.groups.iter().enumerate() {
        let mut res = evaluate_group(ds, &g.members, o, &cfg.solver)?;
        res.group = p;
        groups.push(res);
    }
    let mut chosen = 0;
    for (p, g) in groups.iter().enumerate().skip(1) {
        let better = match cfg.aggregation {
            Aggregation::Table4Max => g.theta > groups[chosen].theta,
            Aggregation::PaperMin => g.theta < groups[chosen].theta,
        };
        if better {
            chosen = p;
        }
    }
    let pick = &groups[chosen];
    let slack_kinds = pick
        .slacks
        .iter()
        .map(|&v| {
            if v > 0.0 {
                SlackKind::Shortfall
            } else if v < 0.0 {
                SlackKind::Distortion
            } else {
                SlackKind::Zero
            }
        })
        .collect();
    let mut warnings = Vec::new();
    let y_o = ds.y(o);
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm(&pick.target) < cfg.shrinkage_fraction * norm(&y_o) {
        warnings.push(format!(
            "lambda-shrinkage: target output norm {:.4} is below {:.0}% of the unit's {:.4}",
            norm(&pick.target),
            cfg.shrinkage_fraction * 100.0,
            norm(&y_o)
        ));
    }
    Ok(EfficiencyResult {
        dmu: o,
        name: ds.name(o).to_string(),
        theta: pick.theta,
        chosen_group: chosen,
        aggregation: cfg.aggregation,
        groups,
        slack_kinds,
        warnings,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchRow {
    pub dmu: usize,
    pub name: String,
    pub result: Option<EfficiencyResult>,
    pub error: Option<String>,
}

/// Robust efficiency of every unit in dataset order; per-row failures are
/// kept in the row instead of aborting the batch.
pub fn batch_evaluate(ds: &Dataset, part: &RobustPartition, cfg: &RobustConfig) -> Vec<BatchRow> {
    (0..ds.n())
        .map(|o| {
            let (result, error) = match robust_efficiency(ds, part, o, cfg) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            BatchRow {
                dmu: o,
                name: ds.name(o).to_string(),
                result,
                error,
            }
        })
        .collect()
}
