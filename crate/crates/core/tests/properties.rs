mod common;

use std::collections::BTreeSet;

use facet_bench::dataset::{read_dataset, Dataset};
use facet_bench::facets::{enumerate_facets, Facet, FacetConfig, FacetSet, SupportScope};
use facet_bench::partition::partition_robust;
use facet_bench::robust::evaluate_group;
use facet_bench::scenario::*;
use facet_bench::solver::{
    solve_lp, solve_sign_pattern_milp, LpProblem, Relation, SignedSlackProblem, SolverConfig,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use common::*;

fn dataset(inputs: Vec<Vec<f64>>, outputs: Vec<Vec<f64>>) -> Dataset {
    let n = inputs[0].len();
    Dataset::from_parts(
        (0..n).map(|j| format!("U{j}")).collect(),
        (0..inputs.len()).map(|i| format!("x{i}")).collect(),
        (0..outputs.len()).map(|r| format!("y{r}")).collect(),
        inputs,
        outputs,
    )
    .unwrap()
}

fn matrix(rows: usize, n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(1.0f64..100.0, n), rows)
}

fn random_dataset(m: usize, s: usize) -> impl Strategy<Value = Dataset> {
    sized_dataset(2, m, s)
}

fn sized_dataset(min_n: usize, m: usize, s: usize) -> impl Strategy<Value = Dataset> {
    (min_n..=8)
        .prop_flat_map(move |n| (matrix(m, n), matrix(s, n)).prop_map(|(x, y)| dataset(x, y)))
}

/// max c·x s.t. Ax ≤ b, 0 ≤ x, by enumerating every vertex.
fn brute_force_max(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
    let n = c.len();
    let mut rows: Vec<(Vec<f64>, f64)> = a.iter().cloned().zip(b.iter().copied()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        rows.push((e, 0.0));
    }
    let mut best = f64::NEG_INFINITY;
    let idx: Vec<usize> = (0..rows.len()).collect();
    for combo in itertools::Itertools::combinations(idx.into_iter(), n) {
        let m = DMatrix::from_fn(n, n, |i, k| rows[combo[i]].0[k]);
        let rhs = DVector::from_fn(n, |i, _| rows[combo[i]].1);
        let Some(x) = m.lu().solve(&rhs) else {
            continue;
        };
        let feasible = rows
            .iter()
            .all(|(r, bb)| r.iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() <= bb + 1e-7);
        if feasible {
            best = best.max(c.iter().zip(x.iter()).map(|(p, q)| p * q).sum());
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplex_matches_vertex_enumeration(
        c in prop::collection::vec(-5.0f64..10.0, 3),
        a in prop::collection::vec(prop::collection::vec(0.1f64..10.0, 3), 1..5),
        b in prop::collection::vec(1.0f64..50.0, 4),
    ) {
        let b = &b[..a.len()];
        let mut lp = LpProblem::maximize(c.clone());
        for (row, &rhs) in a.iter().zip(b) {
            lp.constrain(row.clone(), Relation::Le, rhs);
        }
        let cfg = SolverConfig::default();
        let sol = solve_lp(&lp, &cfg).unwrap();
        prop_assert!(sol.is_optimal());
        let brute = brute_force_max(&c, &a, b);
        prop_assert!((sol.objective - brute).abs() <= 1e-7 * brute.abs().max(1.0));
        let again = solve_lp(&lp, &cfg).unwrap();
        prop_assert_eq!(sol, again);
    }

    #[test]
    fn sign_patterns_agree_with_big_m(ds in random_dataset(2, 3), pick in 0usize..64) {
        let n = ds.n();
        let k = 1 + pick % (n - 1).max(1);
        let o = pick % n;
        let group: Vec<usize> = (0..k.min(n)).collect();
        let cfg = SolverConfig::default();
        let p = SignedSlackProblem::from_dataset(&ds, &group, o);
        let e = solve_sign_pattern_milp(&p, &cfg).unwrap();
        // generous M so the oracle's indicator rows never bind
        let m = 1e3 * ds.max_output() * 100.0;
        let b = bigm_oracle(&p, &cfg, m).unwrap();
        prop_assert_eq!(b.count, e.nonnegative_count());
        let theta = 1.0 / (1.0 + e.distance);
        prop_assert!((b.theta - theta).abs() <= 1e-7);
    }

    #[test]
    fn robust_scores_are_well_formed(ds in random_dataset(2, 3), pick in 0usize..64) {
        let n = ds.n();
        let group: Vec<usize> = (0..n).filter(|j| (pick >> (j % 6)) & 1 == 1 || *j == 0).collect();
        let g = evaluate_group(&ds, &group, pick % n, &SolverConfig::default()).unwrap();
        prop_assert!(g.theta > 0.0 && g.theta <= 1.0);
        for (p, m) in g.plus.iter().zip(&g.minus) {
            prop_assert!(*p >= 0.0 && *m >= 0.0 && p * m == 0.0);
        }
        prop_assert!(g.lambdas.iter().all(|l| *l >= 0.0));
        if group.contains(&(pick % n)) {
            prop_assert!(g.z.iter().all(|z| *z));
        }
    }

    #[test]
    fn csv_round_trip(ds in sized_dataset(4, 2, 3)) {
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        let back = read_dataset(buf.as_slice()).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn facets_satisfy_support_and_positivity(ds in random_dataset(1, 2)) {
        let all: Vec<usize> = (0..ds.n()).collect();
        let cfg = FacetConfig::default();
        let set = enumerate_facets(&ds, &all, SupportScope::All, &cfg);
        for f in set.iter() {
            prop_assert!(f.u.iter().chain(&f.v).all(|c| *c > 0.0));
            prop_assert!(f.residuals.iter().all(|r| r.abs() <= cfg.support_tol));
            for j in 0..ds.n() {
                let r = facet_bench::facets::scaled_residual(&f.normal(), &ds, j);
                prop_assert!(r <= cfg.support_tol);
            }
        }
        let ids: Vec<usize> = set.iter().map(|f| f.id).collect();
        prop_assert_eq!(ids, (1..=set.len()).collect::<Vec<_>>());
    }

    #[test]
    fn partition_invariants(sets in prop::collection::vec(prop::collection::btree_set(0usize..8, 2..4), 1..7)) {
        let facets = FacetSet {
            facets: sets
                .iter()
                .enumerate()
                .map(|(k, m)| Facet {
                    id: k + 1,
                    members: m.iter().copied().collect(),
                    u: vec![],
                    v: vec![],
                    residuals: vec![],
                    violators: vec![],
                })
                .collect(),
            extremes: vec![],
            scope: SupportScope::Extremes,
            config: FacetConfig::default(),
            subsets_examined: 0,
            coincident: vec![],
        };
        let p = partition_robust(&facets).unwrap();
        let counts: Vec<usize> = (0..8).map(|d| sets.iter().filter(|s| s.contains(&d)).count()).collect();
        prop_assert_eq!(p.maxcount, *counts.iter().max().unwrap());
        let robust: Vec<usize> = (0..8).filter(|&d| counts[d] == p.maxcount).collect();
        prop_assert_eq!(&p.robust, &robust);
        let mut seen = BTreeSet::new();
        for g in &p.groups {
            prop_assert_eq!(g.facets.len(), p.maxcount);
            for &d in &g.members {
                prop_assert!(seen.insert(d));
                let mine: Vec<usize> = p.membership[&d].iter().copied().collect();
                prop_assert_eq!(&mine, &g.facets);
            }
        }
        prop_assert_eq!(seen.into_iter().collect::<Vec<_>>(), robust);
    }

    #[test]
    fn revenue_is_linear_and_monotone(
        base in prop::collection::vec(0.5f64..10.0, 3),
        y in prop::collection::vec(0.0f64..100.0, 3),
        alpha in 0.0f64..5.0,
        bump in 0.01f64..10.0,
        r in 0usize..3,
    ) {
        let sc = PriceScenario::affine(&base, &[0.0; 3], [0.0, 1.0]).unwrap();
        let ry = revenue(&y, &sc, 0.5).unwrap();
        let scaled: Vec<f64> = y.iter().map(|v| alpha * v).collect();
        let rs = revenue(&scaled, &sc, 0.5).unwrap();
        prop_assert!((rs - alpha * ry).abs() <= 1e-9 * ry.abs().max(1.0) * alpha.max(1.0));
        let mut up = y.clone();
        up[r] += bump;
        prop_assert!(revenue(&up, &sc, 0.5).unwrap() > ry);
    }

    #[test]
    fn facet_optimum_never_beats_global_and_revenue_bound_holds(
        base in prop::collection::vec(1.0f64..12.0, 3),
        slope in prop::collection::vec(-0.9f64..0.5, 3),
        delta in 0.0f64..1.0,
        home in 0usize..6,
    ) {
        let ds = toy_a();
        let facets = enumerate_facets(&ds, &[0, 1, 2, 3, 4], SupportScope::Extremes, &FacetConfig::default());
        let slope: Vec<f64> = slope.iter().zip(&base).map(|(s, b)| s * b).collect();
        let sc = PriceScenario::affine(&base, &slope, [0.0, 1.0]).unwrap();
        let cfg = SolverConfig::default();
        let p = sc.price_at(delta).unwrap();
        let g = global_optimum(&ds, &facets, &[1.0], &p, &cfg).unwrap();
        for f in facets.iter() {
            let local = facet_optimum(&ds, f, &[1.0], &p, &cfg).unwrap().revenue;
            prop_assert!(local <= g.point.revenue + 1e-9);
        }
        let y = ds.y(home);
        let a = check_assumptions(&ds, &facets, &sc, &y, &[1.0], 0.0, delta, &cfg).unwrap();
        if a.holds() && a.assumption2_all_facets {
            prop_assert!(g.point.revenue <= revenue(&y, &sc, 0.0).unwrap() + 1e-9);
        }
        for &k in &a.home_facets {
            let w = withstand_capacity(&ds, facets.get(k).unwrap(), &y, &[1.0], &sc, 0.0, delta, &cfg).unwrap();
            prop_assert!(w.capacity >= 0.0);
            if a.assumption2 {
                prop_assert!(w.within_bound);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coverage_is_monotone_under_containment(seed in any::<u64>(), extra in 1usize..3) {
        let ds = toy_a();
        let facets = enumerate_facets(&ds, &[0, 1, 2, 3, 4], SupportScope::Extremes, &FacetConfig::default());
        let strategies = vec![vec![extra], vec![1, 2]];
        let r = simulate_coverage(&ds, &facets, &[1.0], &strategies, &PriceSampler::default(), 300, seed, &SolverConfig::default()).unwrap();
        prop_assert!(r.all_checks_hold());
        prop_assert!(r.strategies[0].count <= r.strategies[1].count);
        prop_assert_eq!(r.strategies[1].count, 300);
        for owners in &r.incidence {
            prop_assert!(!owners.is_empty());
        }
    }
}
