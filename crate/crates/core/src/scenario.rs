//! Revenue calculus under price shocks.
//!
//! A price scenario maps a risk parameter δ to a strictly positive output
//! price vector. With the inputs held at x̄, each facet is a polytope of
//! attainable outputs and its revenue-maximizing point is the best a unit can
//! reach by moving along that facet's substitution rates. The union of the
//! facets is the configuration over which the global optimum is taken.

use std::collections::BTreeMap;
use std::path::Path;

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::facets::{facet_contains, Facet, FacetSet};
use crate::solver::{solve_lp, LpProblem, Relation, SolverConfig};

/// Relative tolerance for revenue ties and comparisons.
pub const REVENUE_TOL: f64 = 1e-9;
const DOMAIN_SLACK: f64 = 1e-12;

fn tol(v: f64) -> f64 {
    REVENUE_TOL * v.abs().max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffinePrice {
    #[serde(default)]
    pub name: String,
    pub base: f64,
    pub slope: f64,
}

/// Per-output price functions of the risk parameter δ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriceScenario {
    /// p_i(δ) = base_i + slope_i δ on a closed δ interval.
    Affine {
        outputs: Vec<AffinePrice>,
        delta_domain: [f64; 2],
    },
    /// Explicit price vectors at listed δ values (keys are decimal text).
    Table { table: BTreeMap<String, Vec<f64>> },
}

impl PriceScenario {
    pub fn affine(base: &[f64], slope: &[f64], domain: [f64; 2]) -> Result<Self> {
        if base.len() != slope.len() {
            return Err(Error::Dimension("base and slope lengths differ".into()));
        }
        let sc = PriceScenario::Affine {
            outputs: base
                .iter()
                .zip(slope)
                .enumerate()
                .map(|(i, (&b, &s))| AffinePrice {
                    name: format!("output{}", i + 1),
                    base: b,
                    slope: s,
                })
                .collect(),
            delta_domain: domain,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sc: PriceScenario = serde_json::from_str(text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn num_outputs(&self) -> usize {
        match self {
            PriceScenario::Affine { outputs, .. } => outputs.len(),
            PriceScenario::Table { table } => table.values().next().map_or(0, Vec::len),
        }
    }

    /// Smallest and largest admissible δ.
    pub fn domain(&self) -> Result<(f64, f64)> {
        match self {
            PriceScenario::Affine {
                delta_domain: [lo, hi],
                ..
            } => Ok((*lo, *hi)),
            PriceScenario::Table { table } => {
                let ds: Vec<f64> = Self::table_points(table)?
                    .into_iter()
                    .map(|(d, _)| d)
                    .collect();
                let lo = ds.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = ds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Ok((lo, hi))
            }
        }
    }

    fn table_points(table: &BTreeMap<String, Vec<f64>>) -> Result<Vec<(f64, &Vec<f64>)>> {
        table
            .iter()
            .map(|(k, v)| {
                k.trim()
                    .parse::<f64>()
                    .map(|d| (d, v))
                    .map_err(|_| Error::Scenario(format!("table key '{k}' is not a number")))
            })
            .collect()
    }

    /// Checks positivity over the whole domain. For the affine form the
    /// endpoints decide it.
    pub fn validate(&self) -> Result<()> {
        match self {
            PriceScenario::Affine {
                outputs,
                delta_domain: [lo, hi],
            } => {
                if outputs.is_empty() {
                    return Err(Error::Scenario("no output prices".into()));
                }
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::Scenario(format!("bad delta domain [{lo}, {hi}]")));
                }
                for (i, p) in outputs.iter().enumerate() {
                    for d in [*lo, *hi] {
                        let price = p.base + p.slope * d;
                        if !(price > 0.0) {
                            return Err(Error::Scenario(format!(
                                "price of output {} is {price} at delta = {d}",
                                i + 1
                            )));
                        }
                    }
                }
            }
            PriceScenario::Table { table } => {
                if table.is_empty() {
                    return Err(Error::Scenario("empty price table".into()));
                }
                let width = self.num_outputs();
                for (d, prices) in Self::table_points(table)? {
                    if prices.len() != width {
                        return Err(Error::Scenario(format!(
                            "price vector at delta = {d} has {} entries, expected {width}",
                            prices.len()
                        )));
                    }
                    if let Some(p) = prices.iter().find(|p| !(**p > 0.0)) {
                        return Err(Error::Scenario(format!(
                            "nonpositive price {p} at delta = {d}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Price vector P(δ).
    pub fn price_at(&self, delta: f64) -> Result<Vec<f64>> {
        let prices = match self {
            PriceScenario::Affine {
                outputs,
                delta_domain: [lo, hi],
            } => {
                if !(delta >= lo - DOMAIN_SLACK && delta <= hi + DOMAIN_SLACK) {
                    return Err(Error::Scenario(format!(
                        "delta = {delta} outside [{lo}, {hi}]"
                    )));
                }
                outputs
                    .iter()
                    .map(|p| p.base + p.slope * delta)
                    .collect::<Vec<_>>()
            }
            PriceScenario::Table { table } => Self::table_points(table)?
                .into_iter()
                .find(|(d, _)| (d - delta).abs() <= DOMAIN_SLACK)
                .map(|(_, p)| p.clone())
                .ok_or_else(|| Error::Scenario(format!("delta = {delta} not in price table")))?,
        };
        if let Some(p) = prices.iter().find(|p| !(**p > 0.0)) {
            return Err(Error::Scenario(format!(
                "nonpositive price {p} at delta = {delta}"
            )));
        }
        Ok(prices)
    }
}

/// R(y, δ) = P(δ)·y
pub fn revenue(y: &[f64], sc: &PriceScenario, delta: f64) -> Result<f64> {
    let p = sc.price_at(delta)?;
    if p.len() != y.len() {
        return Err(Error::Dimension(format!(
            "{} prices for {} outputs",
            p.len(),
            y.len()
        )));
    }
    Ok(dot(&p, y))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Uniqueness {
    Unique,
    /// Prices parallel to the facet's output normal: every point ties.
    FacetDegenerate,
    /// A face of dimension ≥ 1 ties for the maximum.
    EdgeDegenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalPoint {
    pub facet: usize,
    pub outputs: Vec<f64>,
    /// (DMU index, λ) over the facet's members, nonzero entries only.
    pub lambdas: Vec<(usize, f64)>,
    pub revenue: f64,
    pub uniqueness: Uniqueness,
}

fn parallel(prices: &[f64], u: &[f64]) -> bool {
    let np = prices.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    prices
        .iter()
        .zip(u)
        .all(|(p, q)| (p / np - q / nu).abs() <= 1e-9)
}

/// Revenue-maximizing point of one facet at fixed inputs x̄.
pub fn facet_optimum(
    ds: &Dataset,
    facet: &Facet,
    x_bar: &[f64],
    prices: &[f64],
    cfg: &SolverConfig,
) -> Result<OptimalPoint> {
    if prices.len() != ds.s() || x_bar.len() != ds.m() {
        return Err(Error::Dimension(
            "prices or inputs do not match the dataset".into(),
        ));
    }
    let cost = facet
        .members
        .iter()
        .map(|&j| dot(prices, &ds.y(j)))
        .collect();
    let mut lp = LpProblem::maximize(cost);
    for (i, &xb) in x_bar.iter().enumerate() {
        let coeffs = facet.members.iter().map(|&j| ds.input(i, j)).collect();
        lp.constrain(coeffs, Relation::Eq, xb);
    }
    let sol = solve_lp(&lp, cfg)?;
    if !sol.is_optimal() {
        return Err(Error::FacetInfeasible(facet.id));
    }
    let outputs = (0..ds.s())
        .map(|r| {
            facet
                .members
                .iter()
                .zip(&sol.x)
                .map(|(&j, l)| l * ds.output(r, j))
                .sum()
        })
        .collect();
    let uniqueness = if parallel(prices, &facet.u) {
        Uniqueness::FacetDegenerate
    } else if sol.alternate_optima {
        Uniqueness::EdgeDegenerate
    } else {
        Uniqueness::Unique
    };
    Ok(OptimalPoint {
        facet: facet.id,
        lambdas: facet
            .members
            .iter()
            .zip(&sol.x)
            .filter(|(_, l)| **l > 0.0)
            .map(|(&j, &l)| (j, l))
            .collect(),
        outputs,
        revenue: sol.objective,
        uniqueness,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalOptimum {
    /// Optimum of the lowest-id owning facet.
    pub point: OptimalPoint,
    /// Every facet whose optimum ties the global value.
    pub owners: Vec<usize>,
    /// Facet optimum revenue by facet id order; `None` when x̄ is not
    /// attainable on that facet.
    pub per_facet: Vec<Option<f64>>,
}

/// Revenue-maximizing point over the union of facets.
pub fn global_optimum(
    ds: &Dataset,
    facets: &FacetSet,
    x_bar: &[f64],
    prices: &[f64],
    cfg: &SolverConfig,
) -> Result<GlobalOptimum> {
    if facets.is_empty() {
        return Err(Error::NoFacets);
    }
    let mut points = Vec::with_capacity(facets.len());
    for f in facets.iter() {
        match facet_optimum(ds, f, x_bar, prices, cfg) {
            Ok(p) => points.push(Some(p)),
            Err(Error::FacetInfeasible(_)) => points.push(None),
            Err(e) => return Err(e),
        }
    }
    let best = points
        .iter()
        .flatten()
        .map(|p| p.revenue)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::Scenario(
            "the input vector is attainable on no facet".into(),
        ));
    }
    let owners: Vec<usize> = points
        .iter()
        .flatten()
        .filter(|p| p.revenue >= best - tol(best))
        .map(|p| p.facet)
        .collect();
    let per_facet = points
        .iter()
        .map(|p| p.as_ref().map(|p| p.revenue))
        .collect();
    let point = points
        .into_iter()
        .flatten()
        .find(|p| p.facet == owners[0])
        .expect("owner present");
    Ok(GlobalOptimum {
        point,
        owners,
        per_facet,
    })
}

fn home_facets(
    ds: &Dataset,
    facets: &FacetSet,
    x_bar: &[f64],
    y_hat: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<usize>> {
    let mut home = Vec::new();
    for f in facets.iter() {
        if facet_contains(f, ds, x_bar, y_hat, cfg)? {
            home.push(f.id);
        }
    }
    if home.is_empty() {
        return Err(Error::NotOnFacet);
    }
    Ok(home)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetCheck {
    pub facet: usize,
    pub post_risk_optimum: f64,
    pub pre_risk_revenue: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// Facets containing ŷ.
    pub home_facets: Vec<usize>,
    /// Revenue non-increasing in δ at every generator of the home facets.
    pub assumption1: bool,
    /// (facet id, DMU index) generators where revenue rises with δ.
    pub assumption1_violations: Vec<(usize, usize)>,
    /// Post-risk home-facet optimum does not exceed the pre-risk revenue.
    pub assumption2: bool,
    pub home_checks: Vec<FacetCheck>,
    /// The same bound on every attainable facet, which the global-level
    /// revenue bound relies on.
    pub assumption2_all_facets: bool,
    pub all_checks: Vec<FacetCheck>,
}

impl AssumptionReport {
    pub fn holds(&self) -> bool {
        self.assumption1 && self.assumption2
    }
}

#[allow(clippy::too_many_arguments)]
pub fn check_assumptions(
    ds: &Dataset,
    facets: &FacetSet,
    sc: &PriceScenario,
    y_hat: &[f64],
    x_bar: &[f64],
    delta0: f64,
    delta1: f64,
    cfg: &SolverConfig,
) -> Result<AssumptionReport> {
    let home = home_facets(ds, facets, x_bar, y_hat, cfg)?;
    let (p0, p1) = (sc.price_at(delta0)?, sc.price_at(delta1)?);

    let mut violations = Vec::new();
    for &id in &home {
        let f = facets.get(id).expect("home facet");
        for &j in &f.members {
            let y = ds.y(j);
            let (r0, r1) = (dot(&p0, &y), dot(&p1, &y));
            if r1 > r0 + tol(r0) {
                violations.push((id, j));
            }
        }
    }

    let pre = dot(&p0, y_hat);
    let mut all_checks = Vec::new();
    for f in facets.iter() {
        match facet_optimum(ds, f, x_bar, &p1, cfg) {
            Ok(opt) => all_checks.push(FacetCheck {
                facet: f.id,
                post_risk_optimum: opt.revenue,
                pre_risk_revenue: pre,
                holds: opt.revenue <= pre + tol(pre),
            }),
            Err(Error::FacetInfeasible(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let home_checks: Vec<FacetCheck> = all_checks
        .iter()
        .filter(|c| home.contains(&c.facet))
        .cloned()
        .collect();
    Ok(AssumptionReport {
        assumption1: violations.is_empty(),
        assumption1_violations: violations,
        assumption2: home_checks.iter().all(|c| c.holds),
        home_checks,
        assumption2_all_facets: all_checks.iter().all(|c| c.holds),
        all_checks,
        home_facets: home,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Withstand {
    /// WR = R(y_k*(δ₁), δ₁) - R(ŷ, δ₁)
    pub capacity: f64,
    /// R(ŷ, δ₀) - R(ŷ, δ₁)
    pub bound: f64,
    pub within_bound: bool,
    pub post_risk_optimum: OptimalPoint,
}

/// Revenue a unit at ŷ recovers after the shock by moving along facet `f`.
#[allow(clippy::too_many_arguments)]
pub fn withstand_capacity(
    ds: &Dataset,
    facet: &Facet,
    y_hat: &[f64],
    x_bar: &[f64],
    sc: &PriceScenario,
    delta0: f64,
    delta1: f64,
    cfg: &SolverConfig,
) -> Result<Withstand> {
    if !facet_contains(facet, ds, x_bar, y_hat, cfg)? {
        return Err(Error::NotOnFacet);
    }
    let (p0, p1) = (sc.price_at(delta0)?, sc.price_at(delta1)?);
    let opt = facet_optimum(ds, facet, x_bar, &p1, cfg)?;
    let r_hat1 = dot(&p1, y_hat);
    let capacity = (opt.revenue - r_hat1).max(0.0);
    let bound = dot(&p0, y_hat) - r_hat1;
    Ok(Withstand {
        capacity,
        bound,
        within_bound: capacity <= bound + tol(bound),
        post_risk_optimum: opt,
    })
}

/// Revenue accounting of a two-stage shock for a unit at ŷ on `home`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiskLosses {
    pub pre_risk_revenue: f64,
    pub post_risk_static_revenue: f64,
    /// Loss without any substitution: R(ŷ,δ₀) - R(ŷ,δ₁).
    pub static_loss: f64,
    pub facet_optimum_revenue: f64,
    pub withstand: f64,
    /// Loss left after moving to the home facet's optimum.
    pub single_facet_residual: f64,
    pub global_optimum_revenue: f64,
    pub global_owners: Vec<usize>,
    /// Loss left after moving to the global optimum.
    pub multi_facet_residual: f64,
    /// R(y*(δ₁),δ₁) - R(y_k*(δ₁),δ₁)
    pub substitution_gap: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn risk_losses(
    ds: &Dataset,
    facets: &FacetSet,
    home: usize,
    y_hat: &[f64],
    x_bar: &[f64],
    sc: &PriceScenario,
    delta0: f64,
    delta1: f64,
    cfg: &SolverConfig,
) -> Result<RiskLosses> {
    let facet = facets
        .get(home)
        .ok_or_else(|| Error::Scenario(format!("unknown facet id {home}")))?;
    let wr = withstand_capacity(ds, facet, y_hat, x_bar, sc, delta0, delta1, cfg)?;
    let p1 = sc.price_at(delta1)?;
    let global = global_optimum(ds, facets, x_bar, &p1, cfg)?;
    let pre = revenue(y_hat, sc, delta0)?;
    let post = revenue(y_hat, sc, delta1)?;
    Ok(RiskLosses {
        pre_risk_revenue: pre,
        post_risk_static_revenue: post,
        static_loss: pre - post,
        facet_optimum_revenue: wr.post_risk_optimum.revenue,
        withstand: wr.capacity,
        single_facet_residual: pre - wr.post_risk_optimum.revenue,
        global_optimum_revenue: global.point.revenue,
        global_owners: global.owners,
        multi_facet_residual: pre - global.point.revenue,
        substitution_gap: global.point.revenue - wr.post_risk_optimum.revenue,
    })
}

/// A vertex of the facet slice `{Σ λ_j x_j = x̄, λ ≥ 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceVertex {
    pub lambdas: Vec<(usize, f64)>,
    pub outputs: Vec<f64>,
    pub revenue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "case")]
pub enum Diagnosis {
    /// Prices parallel to the output normal: the whole facet is optimal.
    WholeFacet {
        revenue: f64,
    },
    /// Several vertices tie, so every point of the face between them is optimal.
    Edge {
        vertices: Vec<SliceVertex>,
    },
    UniqueVertex {
        vertex: SliceVertex,
    },
}

/// Vertices of the facet at inputs x̄: basic solutions on m members.
pub fn slice_vertices(
    ds: &Dataset,
    facet: &Facet,
    x_bar: &[f64],
    prices: &[f64],
) -> Vec<SliceVertex> {
    let m = ds.m();
    let mut out: Vec<SliceVertex> = Vec::new();
    for basis in facet.members.iter().copied().combinations(m) {
        let a = DMatrix::from_fn(m, m, |i, k| ds.input(i, basis[k]));
        let b = DVector::from_column_slice(x_bar);
        let Some(sol) = a.lu().solve(&b) else {
            continue;
        };
        if sol.iter().any(|l| !l.is_finite() || *l < -1e-12) {
            continue;
        }
        let lambdas: Vec<(usize, f64)> = basis
            .iter()
            .zip(sol.iter())
            .map(|(&j, &l)| (j, l.max(0.0)))
            .filter(|(_, l)| *l > 0.0)
            .collect();
        let outputs: Vec<f64> = (0..ds.s())
            .map(|r| lambdas.iter().map(|&(j, l)| l * ds.output(r, j)).sum())
            .collect();
        let dup = out.iter().any(|v| {
            v.outputs
                .iter()
                .zip(&outputs)
                .all(|(p, q)| (p - q).abs() <= 1e-9 * p.abs().max(1.0))
        });
        if !dup {
            out.push(SliceVertex {
                revenue: dot(prices, &outputs),
                lambdas,
                outputs,
            });
        }
    }
    out
}

/// Classifies the optimal set of the facet at the given prices.
pub fn uniqueness_diagnostics(
    ds: &Dataset,
    facet: &Facet,
    x_bar: &[f64],
    prices: &[f64],
) -> Result<Diagnosis> {
    let vertices = slice_vertices(ds, facet, x_bar, prices);
    let best = vertices
        .iter()
        .map(|v| v.revenue)
        .fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return Err(Error::FacetInfeasible(facet.id));
    }
    if parallel(prices, &facet.u) {
        return Ok(Diagnosis::WholeFacet { revenue: best });
    }
    let mut tied: Vec<SliceVertex> = vertices
        .into_iter()
        .filter(|v| v.revenue >= best - tol(best))
        .collect();
    if tied.len() > 1 {
        Ok(Diagnosis::Edge { vertices: tied })
    } else {
        Ok(Diagnosis::UniqueVertex {
            vertex: tied.remove(0),
        })
    }
}

/// Law of the sampled post-shock price vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PriceSampler {
    /// Each price independent uniform on [low, high).
    Uniform { low: f64, high: f64 },
    /// δ uniform on the affine domain, or a uniformly chosen table row.
    Scenario { scenario: PriceScenario },
}

impl Default for PriceSampler {
    fn default() -> Self {
        PriceSampler::Uniform {
            low: 0.1,
            high: 10.0,
        }
    }
}

impl PriceSampler {
    /// Price vector of trial `trial`; depends only on `(seed, trial)`.
    pub fn draw(&self, seed: u64, trial: u64, s: usize) -> Result<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial);
        match self {
            PriceSampler::Uniform { low, high } => {
                if !(*low > 0.0 && low < high) {
                    return Err(Error::Scenario(format!(
                        "uniform sampler needs 0 < low < high, got [{low}, {high})"
                    )));
                }
                Ok((0..s).map(|_| rng.gen_range(*low..*high)).collect())
            }
            PriceSampler::Scenario { scenario } => match scenario {
                PriceScenario::Affine {
                    delta_domain: [lo, hi],
                    ..
                } => {
                    let delta = if lo < hi {
                        rng.gen_range(*lo..=*hi)
                    } else {
                        *lo
                    };
                    scenario.price_at(delta)
                }
                PriceScenario::Table { table } => {
                    let k = rng.gen_range(0..table.len());
                    Ok(table.values().nth(k).expect("index in range").clone())
                }
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyCoverage {
    pub facets: Vec<usize>,
    /// |∪_{k∈K} A_k|
    pub count: usize,
    /// Descriptive frequency count / trials; not a verified probability.
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContainmentCheck {
    pub smaller: usize,
    pub larger: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub trials: usize,
    pub seed: u64,
    pub sampler: PriceSampler,
    /// |A_k| in facet id order.
    pub facet_counts: Vec<usize>,
    pub strategies: Vec<StrategyCoverage>,
    /// Owning facet ids of each sample's global optimum.
    pub incidence: Vec<Vec<usize>>,
    /// Strategy index pairs with K₁ ⊆ K₂, checked sample by sample.
    pub containment: Vec<ContainmentCheck>,
    /// Every strategy's union count is at least each member facet's count.
    pub union_dominates_members: bool,
}

impl CoverageReport {
    pub fn all_checks_hold(&self) -> bool {
        self.union_dominates_members && self.containment.iter().all(|c| c.holds)
    }
}

/// Monte-Carlo coverage of facet strategies: for each sampled price vector,
/// which facets hold the global revenue optimum at inputs x̄.
#[allow(clippy::too_many_arguments)]
pub fn simulate_coverage(
    ds: &Dataset,
    facets: &FacetSet,
    x_bar: &[f64],
    strategies: &[Vec<usize>],
    sampler: &PriceSampler,
    trials: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<CoverageReport> {
    if facets.is_empty() {
        return Err(Error::NoFacets);
    }
    if trials == 0 {
        return Err(Error::Scenario("trials must be at least 1".into()));
    }
    if strategies.is_empty() {
        return Err(Error::Scenario("no strategies given".into()));
    }
    for k in strategies.iter().flatten() {
        if facets.get(*k).is_none() {
            return Err(Error::Scenario(format!("unknown facet id {k}")));
        }
    }
    let strategies: Vec<Vec<usize>> = strategies
        .iter()
        .map(|k| {
            let mut k = k.clone();
            k.sort_unstable();
            k.dedup();
            k
        })
        .collect();

    let mut incidence = Vec::with_capacity(trials);
    let mut facet_counts = vec![0; facets.len()];
    let mut counts = vec![0; strategies.len()];
    let pairs: Vec<(usize, usize)> = (0..strategies.len())
        .flat_map(|a| (0..strategies.len()).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b && strategies[a].iter().all(|k| strategies[b].contains(k)))
        .collect();
    let mut pair_ok = vec![true; pairs.len()];

    for t in 0..trials {
        let prices = sampler.draw(seed, t as u64, ds.s())?;
        let owners = global_optimum(ds, facets, x_bar, &prices, cfg)?.owners;
        for &k in &owners {
            facet_counts[k - 1] += 1;
        }
        let hit: Vec<bool> = strategies
            .iter()
            .map(|k| k.iter().any(|id| owners.contains(id)))
            .collect();
        for (c, h) in counts.iter_mut().zip(&hit) {
            *c += usize::from(*h);
        }
        for (ok, &(a, b)) in pair_ok.iter_mut().zip(&pairs) {
            if hit[a] && !hit[b] {
                *ok = false;
            }
        }
        incidence.push(owners);
    }

    let union_dominates_members = strategies
        .iter()
        .zip(&counts)
        .all(|(k, &c)| k.iter().all(|id| facet_counts[id - 1] <= c));
    let containment = pairs
        .iter()
        .zip(&pair_ok)
        .map(|(&(a, b), &ok)| ContainmentCheck {
            smaller: a,
            larger: b,
            holds: ok && counts[a] <= counts[b],
        })
        .collect();
    Ok(CoverageReport {
        trials,
        seed,
        sampler: sampler.clone(),
        facet_counts,
        strategies: strategies
            .into_iter()
            .zip(counts)
            .map(|(facets, count)| StrategyCoverage {
                facets,
                count,
                frequency: count as f64 / trials as f64,
            })
            .collect(),
        incidence,
        containment,
        union_dominates_members,
    })
}
