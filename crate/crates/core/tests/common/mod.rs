#![allow(dead_code)]

use std::path::PathBuf;

use facet_bench::dataset::{load_dataset, Dataset};
use facet_bench::scenario::PriceScenario;
use facet_bench::solver::{solve_lp, LpProblem, Relation, SignedSlackProblem, SolverConfig};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

pub fn univ985() -> Dataset {
    load_dataset(data_path("univ985.csv")).unwrap()
}

pub fn toy_a() -> Dataset {
    load_dataset(data_path("toy_a.csv")).unwrap()
}

pub fn toy_b() -> Dataset {
    load_dataset(data_path("toy_b.csv")).unwrap()
}

pub fn toy_prices() -> PriceScenario {
    PriceScenario::load(data_path("toy_prices.json")).unwrap()
}

pub fn pinned_985() -> Vec<String> {
    std::fs::read_to_string(data_path("extremes_985.txt"))
        .unwrap()
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect()
}

/// Published results: name, output slacks, robust θ, closest θ, Russell θ.
pub const PUBLISHED_SCORES: [(&str, [f64; 3], f64, f64, f64); 38] = [
    ("PKU", [0.0, -24.2421, -3107.3474], 0.725, 0.9964, 0.9429),
    ("RUC", [0.3645, -2.1787, 0.0], 0.7676, 0.4916, 0.3891),
    ("TSU", [-63.7507, -35.766, -1037.8366], 0.6733, 1.0, 1.0),
    ("BUAA", [-38.1212, 0.0, -1816.0303], 0.6165, 1.0, 1.0),
    ("BIT", [-4.099, -2.099, -26.471], 0.9252, 0.7336, 0.5784),
    ("CAU", [8.8751, 2.7671, 0.0], 0.8191, 0.8735, 0.5513),
    ("BNU", [0.0, -26.0, -812.0], 0.6618, 1.0, 1.0),
    ("CUN", [0.8908, -8.1092, 0.0], 0.6381, 1.0, 1.0),
    ("NKU", [18.0, 0.0, 48.4], 0.5685, 0.6967, 0.2931),
    ("TU", [0.0, 8.6316, -1193.7895], 0.6499, 0.995, 0.883),
    ("DUST", [14.1818, 0.0, -326.4545], 0.8243, 0.811, 0.4497),
    ("NEU", [-0.2637, -13.9337, 106.7898], 0.8285, 1.0, 1.0),
    ("JLU", [-38.0924, 3.9076, 0.0], 0.7636, 0.2843, 0.1121),
    ("HIT", [8.8182, 0.0, -3950.5455], 0.78, 1.0, 1.0),
    ("FDU", [0.0, -20.4947, -3902.2316], 0.6915, 1.0, 1.0),
    ("TJU", [0.0, 0.4526, 676.0842], 0.8778, 0.7106, 0.5126),
    ("SJTU", [-24.0378, -11.75, -2887.1947], 0.7667, 1.0, 1.0),
    ("ECNU", [7.1204, 4.1204, 0.0], 0.7256, 0.7507, 0.4186),
    ("NJU", [7.0, 0.0, -2152.2], 0.6913, 0.9495, 0.4605),
    ("SEU", [20.0056, -8.9944, 0.0], 0.5495, 0.8267, 0.3701),
    ("ZJU", [-89.0, 0.0, -5542.4], 0.6244, 0.9648, 0.4046),
    ("USTC", [0.0, 0.8632, -1365.9789], 0.767, 0.8308, 0.1662),
    ("XMU", [-1.9763, 0.5661, -518.537], 0.821, 1.0, 1.0),
    ("SDU", [0.0, 7.5368, 376.3789], 0.8099, 0.5123, 0.203),
    ("OUC", [0.0, 0.7368, -1452.4211], 0.651, 1.0, 1.0),
    ("WHU", [0.0, 0.0, 0.0], 1.0, 1.0, 1.0),
    (
        "HUST",
        [-11.4678, -1.4678, -884.8029],
        0.8548,
        0.7134,
        0.5072,
    ),
    ("HNU", [-8.3174, 1.6826, -17.4638], 0.8408, 0.6431, 0.4744),
    ("CSU", [-59.4986, 4.5014, 0.0], 0.7588, 0.7707, 0.4232),
    ("SYSU", [8.0, 0.0, 433.4], 0.8922, 0.5296, 0.3481),
    ("SCUT", [11.6673, 0.516, 0.0], 0.8855, 0.7443, 0.4315),
    ("CQU", [0.0, 0.0, 0.0], 1.0, 1.0, 1.0),
    ("SCU", [56.1262, -11.9246, 0.0], 0.7345, 0.8447, 0.6497),
    ("UESTC", [0.0, 0.0, -571.2], 0.9184, 0.7814, 0.4932),
    ("XJTU", [6.8653, -0.9415, -412.3836], 0.8983, 0.9705, 0.7387),
    ("NPU", [0.9091, 0.0, 390.7273], 0.8375, 0.5194, 0.2194),
    ("NAFU", [0.0, 0.0, 257.0], 0.8421, 0.3036, 0.19),
    ("LZU", [0.1363, 5.3842, 0.0], 0.6249, 0.6924, 0.1477),
];

/// Published facet incidence: one row per extreme unit, one column per facet.
const PUBLISHED_INCIDENCE: [(&str, [u8; 14]); 11] = [
    ("CQU", [1, 1, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0]),
    ("WHU", [1, 1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 1, 0]),
    ("OUC", [1, 1, 1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0]),
    ("CUN", [1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 1, 0, 0]),
    ("HIT", [0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1]),
    ("BUAA", [0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 0, 0, 0]),
    ("XMU", [0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0]),
    ("BNU", [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1]),
    ("NEU", [0, 0, 0, 0, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0]),
    ("SJTU", [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1]),
    ("FDU", [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
];

/// Member names of each published facet, in published column order.
pub fn published_facets() -> Vec<Vec<String>> {
    (0..14)
        .map(|k| {
            PUBLISHED_INCIDENCE
                .iter()
                .filter(|(_, row)| row[k] == 1)
                .map(|(name, _)| name.to_string())
                .collect()
        })
        .collect()
}

/// Published facet numbers of the two robust groups.
pub const GROUP_CQU: [usize; 8] = [1, 2, 3, 4, 5, 6, 7, 8];
pub const GROUP_WHU: [usize; 8] = [1, 2, 5, 6, 9, 10, 12, 13];

#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub count: usize,
    pub theta: f64,
    pub objective: f64,
    pub slacks: Vec<f64>,
    pub nodes: usize,
}

/// Indicator form of the signed-slack program solved by depth-first
/// branch and bound on the LP relaxation:
///
/// min W (s - Σz) + (1/s) Σ (s⁺ + s⁻)/y_o
/// s.t. Σλx ≤ x_o, Σλy - s⁺ + s⁻ = y_o, s⁺ ≤ M z, s⁻ ≤ M (1 - z), z ∈ {0,1}
pub fn bigm_oracle(
    p: &SignedSlackProblem,
    cfg: &SolverConfig,
    big_m: f64,
) -> Option<OracleSolution> {
    let (g, m, s) = (p.group_size(), p.m(), p.s());
    let nv = g + 3 * s;
    let (sp, sm, zz) = (g, g + s, g + 2 * s);
    let mut cost = vec![0.0; nv];
    for r in 0..s {
        let w = 1.0 / (s as f64 * p.y_o[r]);
        cost[sp + r] = w;
        cost[sm + r] = w;
        cost[zz + r] = -cfg.priority_weight;
    }
    let mut base = LpProblem::minimize(cost);
    for i in 0..m {
        let mut row = p.ref_inputs[i].clone();
        row.resize(nv, 0.0);
        base.constrain(row, Relation::Le, p.x_o[i]);
    }
    for r in 0..s {
        let mut row = p.ref_outputs[r].clone();
        row.resize(nv, 0.0);
        row[sp + r] = -1.0;
        row[sm + r] = 1.0;
        base.constrain(row, Relation::Eq, p.y_o[r]);
        let mut up = vec![0.0; nv];
        up[sp + r] = 1.0;
        up[zz + r] = -big_m;
        base.constrain(up, Relation::Le, 0.0);
        let mut dn = vec![0.0; nv];
        dn[sm + r] = 1.0;
        dn[zz + r] = big_m;
        base.constrain(dn, Relation::Le, big_m);
    }
    for r in 0..s {
        base.bound(zz + r, 0.0, 1.0);
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut nodes = 0;
    let mut stack = vec![base];
    while let Some(node) = stack.pop() {
        nodes += 1;
        let sol = solve_lp(&node, cfg).ok()?;
        if !sol.is_optimal() {
            continue;
        }
        if let Some((b, _)) = &best {
            if sol.objective >= b - 1e-12 * b.abs().max(1.0) {
                continue;
            }
        }
        let frac = (0..s).find(|&r| {
            let z = sol.x[zz + r];
            z > 1e-9 && z < 1.0 - 1e-9
        });
        match frac {
            None => best = Some((sol.objective, sol.x)),
            Some(r) => {
                for v in [0.0, 1.0] {
                    let mut child = node.clone();
                    child.bound(zz + r, v, v);
                    stack.push(child);
                }
            }
        }
    }
    let (objective, x) = best?;
    let count = (0..s).filter(|&r| x[zz + r] > 0.5).count();
    let slacks: Vec<f64> = (0..s).map(|r| x[sp + r] - x[sm + r]).collect();
    let dist: f64 = (0..s)
        .map(|r| (x[sp + r] + x[sm + r]) / p.y_o[r])
        .sum::<f64>()
        / s as f64;
    Some(OracleSolution {
        count,
        theta: 1.0 / (1.0 + dist),
        objective,
        slacks,
        nodes,
    })
}
