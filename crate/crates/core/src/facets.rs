//! Full-dimensional efficient facets of the constant-returns cone.
//!
//! Facets are found by brute force: every (s+m-1)-subset of the extreme
//! units is tested for a unique, strictly positive supporting normal that
//! keeps every unit of the support scope on or below the hyperplane.
//! The cost is C(|E|, s+m-1) small SVDs, which stays cheap for a few dozen
//! extreme units (330 subsets for 11 extremes with s = 3, m = 2) but grows
//! quickly beyond that.

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::solver::{solve_lp, LpProblem, Relation, SolverConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetConfig {
    /// Relative threshold on the smallest kept singular value.
    pub rank_tol: f64,
    /// Max hyperplane residual, after dividing by the unit's data norm.
    pub support_tol: f64,
    /// Minimum component of the unit normal.
    pub positivity_tol: f64,
    /// Max Euclidean distance between unit normals treated as one hyperplane.
    pub dedup_tol: f64,
}

impl Default for FacetConfig {
    fn default() -> Self {
        FacetConfig {
            rank_tol: 1e-9,
            support_tol: 1e-7,
            positivity_tol: 1e-9,
            dedup_tol: 1e-7,
        }
    }
}

/// Which units the support inequality `u·y_j - v·x_j <= 0` is checked on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportScope {
    #[default]
    Extremes,
    All,
}

/// Unit normal `(u, -v)` of a hyperplane `u·y = v·x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normal {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Normal {
    pub fn value(&self, y: &[f64], x: &[f64]) -> f64 {
        dot(&self.u, y) - dot(&self.v, x)
    }

    fn distance(&self, other: &Normal) -> f64 {
        self.u
            .iter()
            .chain(&self.v)
            .zip(other.u.iter().chain(&other.v))
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    /// 1-based position in the canonical facet order.
    pub id: usize,
    /// Spanning DMU indices, ascending.
    pub members: Vec<usize>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Scaled hyperplane residual of each member, aligned with `members`.
    pub residuals: Vec<f64>,
    /// Units outside the support scope that lie strictly above the hyperplane.
    pub violators: Vec<usize>,
}

impl Facet {
    pub fn normal(&self) -> Normal {
        Normal {
            u: self.u.clone(),
            v: self.v.clone(),
        }
    }

    /// `u·y - v·x`; zero on the hyperplane, negative inside the half-space.
    pub fn value(&self, y: &[f64], x: &[f64]) -> f64 {
        dot(&self.u, y) - dot(&self.v, x)
    }

    pub fn has_member(&self, j: usize) -> bool {
        self.members.binary_search(&j).is_ok()
    }
}

/// Subsets that produced the same hyperplane (regularity violated).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidentFacets {
    pub facet_members: Vec<usize>,
    pub union: Vec<usize>,
    pub subsets: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetSet {
    pub facets: Vec<Facet>,
    pub extremes: Vec<usize>,
    pub scope: SupportScope,
    pub config: FacetConfig,
    pub subsets_examined: usize,
    pub coincident: Vec<CoincidentFacets>,
}

impl FacetSet {
    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn get(&self, id: usize) -> Option<&Facet> {
        id.checked_sub(1).and_then(|k| self.facets.get(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Facet> {
        self.facets.iter()
    }

    /// Ids of every facet whose hyperplane is violated by `(x, y)` beyond
    /// the support tolerance.
    pub fn violated_by(&self, x: &[f64], y: &[f64]) -> Vec<usize> {
        let norm = data_norm(y, x);
        self.facets
            .iter()
            .filter(|f| f.value(y, x) / norm > self.config.support_tol)
            .map(|f| f.id)
            .collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

fn data_norm(y: &[f64], x: &[f64]) -> f64 {
    y.iter()
        .chain(x)
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE)
}

/// Scaled residual `(u·y_j - v·x_j) / |(y_j, x_j)|`.
pub fn scaled_residual(normal: &Normal, ds: &Dataset, j: usize) -> f64 {
    let (y, x) = (ds.y(j), ds.x(j));
    normal.value(&y, &x) / data_norm(&y, &x)
}

/// Unique strictly positive unit normal of the hyperplane through the
/// origin spanned by `subset`, if the subset has full rank s+m-1.
pub fn facet_normal(ds: &Dataset, subset: &[usize], cfg: &FacetConfig) -> Option<Normal> {
    let (s, m) = (ds.s(), ds.m());
    let dim = s + m;
    if subset.len() + 1 != dim {
        return None;
    }
    let rows: Vec<Vec<f64>> = subset
        .iter()
        .map(|&j| ds.y(j).into_iter().chain(ds.x(j)).collect())
        .collect();
    // Column equilibration; the null vector is unscaled afterwards.
    let scale: Vec<f64> = (0..dim)
        .map(|c| rows.iter().fold(0.0_f64, |a, r| a.max(r[c].abs())))
        .collect();
    if scale.iter().any(|&d| d == 0.0) {
        return None;
    }
    // Square the system with a zero row so the SVD returns a full V.
    let mat = DMatrix::from_fn(dim, dim, |i, c| {
        if i < subset.len() {
            rows[i][c] / scale[c]
        } else {
            0.0
        }
    });
    let svd = mat.svd(false, true);
    let vt = svd.v_t.as_ref()?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let largest = svd.singular_values[order[0]];
    let kept = svd.singular_values[order[dim - 2]];
    if !(largest > 0.0) || kept <= cfg.rank_tol * largest {
        return None;
    }
    let null = order[dim - 1];
    let mut n: Vec<f64> = (0..dim).map(|c| vt[(null, c)] / scale[c]).collect();
    let len = n.iter().map(|v| v * v).sum::<f64>().sqrt();
    n.iter_mut().for_each(|v| *v /= len);
    if let Some(first) = n[..s].iter().find(|v| v.abs() > cfg.positivity_tol) {
        if *first < 0.0 {
            n.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let u = n[..s].to_vec();
    let v: Vec<f64> = n[s..].iter().map(|c| -c).collect();
    if u.iter().chain(&v).all(|&c| c > cfg.positivity_tol) {
        Some(Normal { u, v })
    } else {
        None
    }
}

/// Enumerates every full-dimensional efficient facet spanned by `extremes`.
pub fn enumerate_facets(
    ds: &Dataset,
    extremes: &[usize],
    scope: SupportScope,
    cfg: &FacetConfig,
) -> FacetSet {
    let mut extremes = extremes.to_vec();
    extremes.sort_unstable();
    extremes.dedup();
    let k = ds.s() + ds.m() - 1;
    let support: Vec<usize> = match scope {
        SupportScope::Extremes => extremes.clone(),
        SupportScope::All => (0..ds.n()).collect(),
    };
    let outside: Vec<usize> = (0..ds.n())
        .filter(|j| support.binary_search(j).is_err())
        .collect();

    let mut found: Vec<(Vec<usize>, Normal, Vec<Vec<usize>>)> = Vec::new();
    let mut examined = 0;
    for subset in extremes.iter().copied().combinations(k) {
        examined += 1;
        let Some(normal) = facet_normal(ds, &subset, cfg) else {
            continue;
        };
        let on_plane = subset
            .iter()
            .all(|&j| scaled_residual(&normal, ds, j).abs() <= cfg.support_tol);
        let supporting = support
            .iter()
            .all(|&j| scaled_residual(&normal, ds, j) <= cfg.support_tol);
        if !(on_plane && supporting) {
            continue;
        }
        match found
            .iter_mut()
            .find(|(_, n, _)| n.distance(&normal) <= cfg.dedup_tol)
        {
            Some((_, _, dupes)) => dupes.push(subset),
            None => found.push((subset, normal, Vec::new())),
        }
    }

    let mut coincident = Vec::new();
    let mut facets: Vec<Facet> = found
        .into_iter()
        .map(|(members, normal, dupes)| {
            if !dupes.is_empty() {
                let mut union: Vec<usize> = members
                    .iter()
                    .chain(dupes.iter().flatten())
                    .copied()
                    .collect();
                union.sort_unstable();
                union.dedup();
                let mut subsets = vec![members.clone()];
                subsets.extend(dupes);
                coincident.push(CoincidentFacets {
                    facet_members: members.clone(),
                    union,
                    subsets,
                });
            }
            let residuals = members
                .iter()
                .map(|&j| scaled_residual(&normal, ds, j))
                .collect();
            let violators = outside
                .iter()
                .copied()
                .filter(|&j| scaled_residual(&normal, ds, j) > cfg.support_tol)
                .collect();
            Facet {
                id: 0,
                members,
                u: normal.u,
                v: normal.v,
                residuals,
                violators,
            }
        })
        .collect();
    facets.sort_by(|a, b| a.members.cmp(&b.members));
    for (k, f) in facets.iter_mut().enumerate() {
        f.id = k + 1;
    }
    FacetSet {
        facets,
        extremes,
        scope,
        config: cfg.clone(),
        subsets_examined: examined,
        coincident,
    }
}

/// True when `(x̄, y)` is a nonnegative combination of the facet's members
/// with exactly the inputs `x̄`.
pub fn facet_contains(
    facet: &Facet,
    ds: &Dataset,
    x_bar: &[f64],
    y: &[f64],
    cfg: &SolverConfig,
) -> Result<bool> {
    let g = facet.members.len();
    let mut lp = LpProblem::minimize(vec![0.0; g]);
    for (r, &target) in y.iter().enumerate() {
        let coeffs = facet.members.iter().map(|&j| ds.output(r, j)).collect();
        lp.constrain(coeffs, Relation::Eq, target);
    }
    for (i, &target) in x_bar.iter().enumerate() {
        let coeffs = facet.members.iter().map(|&j| ds.input(i, j)).collect();
        lp.constrain(coeffs, Relation::Eq, target);
    }
    Ok(solve_lp(&lp, cfg)?.is_optimal())
}
