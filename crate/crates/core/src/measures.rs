//! Extreme-efficiency test and the two comparison measures: the closest
//! target on the extended-facet technology and the farthest weighted Russell
//! target under constant returns.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::facets::FacetSet;
use crate::solver::{solve_lp, LpProblem, LpStatus, Relation, SolverConfig};

/// λ₀ at or above `1 - EXTREME_TOL` marks an extreme unit.
pub const EXTREME_TOL: f64 = 1e-7;
/// Slacks within this band (relative to the output level) count as zero.
pub const ZERO_SLACK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    Robust,
    Closest,
    Russell,
    ExtremeTest,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureStatus {
    Scored,
    OnFrontier,
    OutOfEnvelope,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub dmu: usize,
    pub name: String,
    pub measure: MeasureKind,
    pub status: MeasureStatus,
    /// `None` when the point is out of envelope.
    pub theta: Option<f64>,
    pub slacks: Vec<f64>,
    /// Nonzero intensities as (DMU index, λ).
    pub intensities: Vec<(usize, f64)>,
    pub target: Vec<f64>,
    pub reference_facet: Option<usize>,
    /// Facets whose half-space the evaluated point violates.
    pub violated_facets: Vec<usize>,
}

/// Zeroes values that are within round-off of zero relative to `scale`.
pub(crate) fn snap(value: f64, scale: f64) -> f64 {
    if value.abs() <= ZERO_SLACK_TOL * scale.abs().max(1.0) {
        0.0
    } else {
        value
    }
}

/// `1 / (1 + (1/s) Σ |s_r| / y_ro)`.
pub fn russell_theta(slacks: &[f64], y_o: &[f64]) -> f64 {
    let s = y_o.len() as f64;
    let dist: f64 = slacks
        .iter()
        .zip(y_o)
        .map(|(sl, y)| sl.abs() / y)
        .sum::<f64>()
        / s;
    1.0 / (1.0 + dist)
}

fn status_for(slacks: &[f64]) -> MeasureStatus {
    if slacks.iter().all(|&v| v == 0.0) {
        MeasureStatus::OnFrontier
    } else {
        MeasureStatus::Scored
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeTest {
    pub lambda0: f64,
    pub is_extreme: bool,
}

/// Minimizes the unit's own weight in a convex combination that uses no more
/// input and produces no less output. λ₀ = 1 means no other mix reproduces it.
pub fn extreme_efficiency_test(ds: &Dataset, o: usize, cfg: &SolverConfig) -> Result<ExtremeTest> {
    let n = ds.n();
    let mut cost = vec![0.0; n];
    cost[o] = 1.0;
    let mut lp = LpProblem::minimize(cost);
    for i in 0..ds.m() {
        lp.constrain(ds.inputs()[i].clone(), Relation::Le, ds.input(i, o));
    }
    for r in 0..ds.s() {
        lp.constrain(ds.outputs()[r].clone(), Relation::Ge, ds.output(r, o));
    }
    lp.constrain(vec![1.0; n], Relation::Eq, 1.0);
    let sol = solve_lp(&lp, cfg)?;
    if !sol.is_optimal() {
        return Err(Error::Solver(format!(
            "extreme test for '{}' returned {:?}",
            ds.name(o),
            sol.status
        )));
    }
    let lambda0 = sol.objective.clamp(0.0, 1.0);
    Ok(ExtremeTest {
        lambda0,
        is_extreme: lambda0 >= 1.0 - EXTREME_TOL,
    })
}

/// The extreme set used downstream, with the computed set kept alongside a
/// pinned override for the run report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeSet {
    /// Indices in effect: the override verbatim, or the computed set.
    pub indices: Vec<usize>,
    pub computed: Vec<usize>,
    pub lambda0: Vec<f64>,
    pub pinned: bool,
    /// Computed as extreme but absent from the override.
    pub only_computed: Vec<usize>,
    /// Pinned but not extreme by the test.
    pub only_pinned: Vec<usize>,
}

impl ExtremeSet {
    pub fn differs(&self) -> bool {
        !(self.only_computed.is_empty() && self.only_pinned.is_empty())
    }
}

pub fn extreme_set(
    ds: &Dataset,
    pinned: Option<&[String]>,
    cfg: &SolverConfig,
) -> Result<ExtremeSet> {
    let pinned_idx = match pinned {
        Some(names) => Some(
            names
                .iter()
                .map(|n| ds.require(n))
                .collect::<Result<Vec<_>>>()?,
        ),
        None => None,
    };
    let mut computed = Vec::new();
    let mut lambda0 = Vec::with_capacity(ds.n());
    for o in 0..ds.n() {
        let t = extreme_efficiency_test(ds, o, cfg)?;
        lambda0.push(t.lambda0);
        if t.is_extreme {
            computed.push(o);
        }
    }
    Ok(match pinned_idx {
        None => ExtremeSet {
            indices: computed.clone(),
            computed,
            lambda0,
            pinned: false,
            only_computed: vec![],
            only_pinned: vec![],
        },
        Some(indices) => {
            let only_computed = computed
                .iter()
                .copied()
                .filter(|j| !indices.contains(j))
                .collect();
            let only_pinned = indices
                .iter()
                .copied()
                .filter(|j| !computed.contains(j))
                .collect();
            ExtremeSet {
                indices,
                computed,
                lambda0,
                pinned: true,
                only_computed,
                only_pinned,
            }
        }
    })
}

/// Output-oriented weighted Russell measure with weights 1/s, farthest
/// target on the constant-returns technology of all units.
pub fn russell_farthest(ds: &Dataset, o: usize, cfg: &SolverConfig) -> Result<MeasureResult> {
    let (n, s) = (ds.n(), ds.s());
    let y_o = ds.y(o);
    let mut cost = vec![0.0; n + s];
    for r in 0..s {
        cost[n + r] = 1.0 / (s as f64 * y_o[r]);
    }
    let mut lp = LpProblem::maximize(cost);
    for i in 0..ds.m() {
        let mut coeffs = ds.inputs()[i].clone();
        coeffs.resize(n + s, 0.0);
        lp.constrain(coeffs, Relation::Le, ds.input(i, o));
    }
    for r in 0..s {
        let mut coeffs = ds.outputs()[r].clone();
        coeffs.resize(n + s, 0.0);
        coeffs[n + r] = -1.0;
        lp.constrain(coeffs, Relation::Eq, y_o[r]);
    }
    let sol = solve_lp(&lp, cfg)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => {
            return Err(Error::Solver(format!(
                "Russell program for '{}' is unbounded: some output is freely producible",
                ds.name(o)
            )))
        }
        LpStatus::Infeasible => {
            return Err(Error::Solver(format!(
                "Russell program for '{}' is infeasible",
                ds.name(o)
            )))
        }
    }
    let slacks: Vec<f64> = (0..s).map(|r| snap(sol.x[n + r], y_o[r])).collect();
    let intensities = (0..n)
        .filter(|&j| sol.x[j] > 0.0)
        .map(|j| (j, sol.x[j]))
        .collect();
    Ok(MeasureResult {
        dmu: o,
        name: ds.name(o).to_string(),
        measure: MeasureKind::Russell,
        status: status_for(&slacks),
        theta: Some(russell_theta(&slacks, &y_o)),
        target: y_o.iter().zip(&slacks).map(|(y, sl)| y + sl).collect(),
        slacks,
        intensities,
        reference_facet: None,
        violated_facets: vec![],
    })
}

/// Closest boundary point of the facet half-space intersection reachable by
/// nonnegative output slacks, taken as the best of one LP per facet.
pub fn closest_on_efpps(
    facets: &FacetSet,
    ds: &Dataset,
    o: usize,
    cfg: &SolverConfig,
) -> Result<MeasureResult> {
    if facets.is_empty() {
        return Err(Error::NoFacets);
    }
    let (x_o, y_o) = (ds.x(o), ds.y(o));
    let s = ds.s();
    let violated = facets.violated_by(&x_o, &y_o);
    let base = MeasureResult {
        dmu: o,
        name: ds.name(o).to_string(),
        measure: MeasureKind::Closest,
        status: MeasureStatus::OutOfEnvelope,
        theta: None,
        slacks: vec![],
        intensities: vec![],
        target: vec![],
        reference_facet: None,
        violated_facets: violated.clone(),
    };
    if !violated.is_empty() {
        return Ok(base);
    }

    // room_j = v_j·x_o - u_j·y_o >= 0 for every facet
    let room: Vec<f64> = facets.iter().map(|f| -f.value(&y_o, &x_o)).collect();
    let cost: Vec<f64> = y_o.iter().map(|y| 1.0 / (s as f64 * y)).collect();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for (k, facet) in facets.iter().enumerate() {
        let mut lp = LpProblem::minimize(cost.clone());
        lp.constrain(facet.u.clone(), Relation::Eq, room[k]);
        for (j, other) in facets.iter().enumerate() {
            if j != k {
                lp.constrain(other.u.clone(), Relation::Le, room[j]);
            }
        }
        let sol = solve_lp(&lp, cfg)?;
        if !sol.is_optimal() {
            continue;
        }
        let better = match &best {
            None => true,
            Some((d, _, _)) => sol.objective < d - cfg.optimality_tol * (1.0 + d.abs()),
        };
        if better {
            best = Some((sol.objective, facet.id, sol.x));
        }
    }
    let (_, facet_id, raw) = best.ok_or_else(|| {
        Error::Solver(format!(
            "no facet reachable for in-envelope unit '{}'",
            ds.name(o)
        ))
    })?;
    let slacks: Vec<f64> = raw
        .iter()
        .zip(&y_o)
        .map(|(v, y)| snap(v.max(0.0), *y))
        .collect();
    Ok(MeasureResult {
        status: status_for(&slacks),
        theta: Some(russell_theta(&slacks, &y_o)),
        target: y_o.iter().zip(&slacks).map(|(y, sl)| y + sl).collect(),
        slacks,
        reference_facet: Some(facet_id),
        ..base
    })
}
