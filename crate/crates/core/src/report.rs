//! End-to-end run: extremes, facets, partition and the three measures,
//! collected into one serializable report.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::facets::{enumerate_facets, CoincidentFacets, FacetConfig, FacetSet, SupportScope};
use crate::measures::{
    closest_on_efpps, extreme_set, russell_farthest, ExtremeSet, MeasureResult, MeasureStatus,
};
use crate::partition::{partition_robust, RobustPartition};
use crate::robust::{robust_efficiency, Aggregation, EfficiencyResult, RobustConfig};
use crate::solver::SolverConfig;

/// Extreme units pinned by the `paper-985` profile.
pub const PAPER_985_EXTREMES: [&str; 11] = [
    "CQU", "OUC", "WHU", "CUN", "BUAA", "HIT", "XMU", "BNU", "NEU", "SJTU", "FDU",
];

/// Reads a pinned extreme list: one DMU name per line; blank lines and lines
/// starting with `#` are skipped.
pub fn load_extremes<P: AsRef<Path>>(path: P) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let names: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    if names.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "{}: no DMU names in extremes file",
            path.display()
        )));
    }
    Ok(names)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureSelection {
    pub robust: bool,
    pub closest: bool,
    pub russell: bool,
}

impl Default for MeasureSelection {
    fn default() -> Self {
        MeasureSelection {
            robust: true,
            closest: true,
            russell: true,
        }
    }
}

impl std::str::FromStr for MeasureSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let none = MeasureSelection {
            robust: false,
            closest: false,
            russell: false,
        };
        match s {
            "all" => Ok(MeasureSelection::default()),
            "robust" => Ok(MeasureSelection {
                robust: true,
                ..none
            }),
            "closest" => Ok(MeasureSelection {
                closest: true,
                ..none
            }),
            "russell" => Ok(MeasureSelection {
                russell: true,
                ..none
            }),
            other => Err(Error::InvalidDataset(format!(
                "unknown measure '{other}' (expected robust, closest, russell or all)"
            ))),
        }
    }
}

/// Every setting that influences a run. Echoed verbatim into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub profile: Option<String>,
    pub data: String,
    pub pinned_extremes: Option<Vec<String>>,
    pub support_scope: SupportScope,
    pub aggregation: Aggregation,
    pub measures: MeasureSelection,
    pub solver: SolverConfig,
    pub facets: FacetConfig,
    pub shrinkage_fraction: f64,
    pub seed: Option<u64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            profile: None,
            data: String::new(),
            pinned_extremes: None,
            support_scope: SupportScope::Extremes,
            aggregation: Aggregation::Table4Max,
            measures: MeasureSelection::default(),
            solver: SolverConfig::default(),
            facets: FacetConfig::default(),
            shrinkage_fraction: RobustConfig::default().shrinkage_fraction,
            seed: None,
        }
    }
}

impl PipelineConfig {
    /// Pinned 11 extremes, support over the extremes, best-group aggregation.
    pub fn paper_985() -> Self {
        PipelineConfig {
            profile: Some("paper-985".into()),
            pinned_extremes: Some(PAPER_985_EXTREMES.iter().map(|s| s.to_string()).collect()),
            support_scope: SupportScope::Extremes,
            aggregation: Aggregation::Table4Max,
            ..PipelineConfig::default()
        }
    }

    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "paper-985" => Ok(Self::paper_985()),
            other => Err(Error::InvalidDataset(format!("unknown profile '{other}'"))),
        }
    }

    pub fn robust_config(&self) -> RobustConfig {
        RobustConfig {
            solver: self.solver.clone(),
            aggregation: self.aggregation,
            shrinkage_fraction: self.shrinkage_fraction,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeSummary {
    pub in_effect: Vec<String>,
    pub computed: Vec<String>,
    pub pinned: bool,
    pub lambda0: Vec<(String, f64)>,
    pub only_computed: Vec<String>,
    pub only_pinned: Vec<String>,
    pub note: Option<String>,
}

impl ExtremeSummary {
    pub fn new(ds: &Dataset, ex: &ExtremeSet) -> Self {
        let names = |idx: &[usize]| {
            idx.iter()
                .map(|&j| ds.name(j).to_string())
                .collect::<Vec<_>>()
        };
        let note = ex.differs().then(|| {
            format!(
                "pinned extreme set differs from the computed one: computed only [{}], pinned only [{}]",
                names(&ex.only_computed).join(", "),
                names(&ex.only_pinned).join(", ")
            )
        });
        ExtremeSummary {
            in_effect: names(&ex.indices),
            computed: names(&ex.computed),
            pinned: ex.pinned,
            lambda0: ex
                .lambda0
                .iter()
                .enumerate()
                .map(|(j, &l)| (ds.name(j).to_string(), l))
                .collect(),
            only_computed: names(&ex.only_computed),
            only_pinned: names(&ex.only_pinned),
            note,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetRecord {
    pub id: usize,
    pub members: Vec<String>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub residuals: Vec<f64>,
    pub violators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FacetTable {
    pub subsets_examined: usize,
    pub facets: Vec<FacetRecord>,
    pub coincident: Vec<Vec<Vec<String>>>,
}

impl FacetTable {
    pub fn new(ds: &Dataset, set: &FacetSet) -> Self {
        let names = |idx: &[usize]| {
            idx.iter()
                .map(|&j| ds.name(j).to_string())
                .collect::<Vec<_>>()
        };
        FacetTable {
            subsets_examined: set.subsets_examined,
            facets: set
                .iter()
                .map(|f| FacetRecord {
                    id: f.id,
                    members: names(&f.members),
                    u: f.u.clone(),
                    v: f.v.clone(),
                    residuals: f.residuals.clone(),
                    violators: names(&f.violators),
                })
                .collect(),
            coincident: set
                .coincident
                .iter()
                .map(|c: &CoincidentFacets| c.subsets.iter().map(|s| names(s)).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub facets: Vec<usize>,
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionRecord {
    pub maxcount: usize,
    pub robust: Vec<String>,
    pub groups: Vec<GroupRecord>,
    /// (name, facet count) of facet-spanning units below maxcount.
    pub below_max: Vec<(String, usize)>,
    /// (name, facet ids) for every facet-spanning unit.
    pub membership: Vec<(String, Vec<usize>)>,
}

impl PartitionRecord {
    pub fn new(ds: &Dataset, p: &RobustPartition) -> Self {
        PartitionRecord {
            maxcount: p.maxcount,
            robust: p.robust.iter().map(|&j| ds.name(j).to_string()).collect(),
            groups: p
                .groups
                .iter()
                .map(|g| GroupRecord {
                    facets: g.facets.clone(),
                    members: g.members.iter().map(|&j| ds.name(j).to_string()).collect(),
                })
                .collect(),
            below_max: p
                .below_max
                .iter()
                .map(|&(j, c)| (ds.name(j).to_string(), c))
                .collect(),
            membership: p
                .membership
                .iter()
                .map(|(&j, k)| (ds.name(j).to_string(), k.iter().copied().collect()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DmuRow {
    pub dmu: usize,
    pub name: String,
    pub robust: Option<EfficiencyResult>,
    pub closest: Option<MeasureResult>,
    pub russell: Option<MeasureResult>,
}

impl DmuRow {
    pub fn robust_theta(&self) -> Option<f64> {
        self.robust.as_ref().map(|r| r.theta)
    }

    pub fn closest_theta(&self) -> Option<f64> {
        self.closest.as_ref().and_then(|r| r.theta)
    }

    pub fn russell_theta(&self) -> Option<f64> {
        self.russell.as_ref().and_then(|r| r.theta)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WarningKind {
    ExtremeSetOverride,
    Regularity,
    SupportViolation,
    OutOfEnvelope,
    LambdaShrinkage,
    AlternateOptima,
    AssumptionViolation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Warning {
    pub kind: WarningKind,
    pub dmu: Option<String>,
    pub facet: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: PipelineConfig,
    pub dataset: DatasetSummary,
    pub extremes: ExtremeSummary,
    pub facets: FacetTable,
    pub partition: PartitionRecord,
    pub results: Vec<DmuRow>,
    pub warnings: Vec<Warning>,
}

/// Intermediate products of a run, for callers that need the raw structures.
pub struct Pipeline {
    pub extremes: ExtremeSet,
    pub facets: FacetSet,
    pub partition: RobustPartition,
}

/// Extreme set, facets and partition under `cfg`.
pub fn build_pipeline(ds: &Dataset, cfg: &PipelineConfig) -> Result<Pipeline> {
    cfg.solver.validate(ds.s())?;
    let extremes = extreme_set(ds, cfg.pinned_extremes.as_deref(), &cfg.solver)?;
    let facets = enumerate_facets(ds, &extremes.indices, cfg.support_scope, &cfg.facets);
    let partition = partition_robust(&facets)?;
    Ok(Pipeline {
        extremes,
        facets,
        partition,
    })
}

/// Runs every stage and scores every unit with the selected measures.
pub fn run_pipeline(ds: &Dataset, cfg: &PipelineConfig) -> Result<RunReport> {
    let pipe = build_pipeline(ds, cfg)?;
    let robust_cfg = cfg.robust_config();
    let mut warnings = Vec::new();

    let extremes = ExtremeSummary::new(ds, &pipe.extremes);
    if let Some(note) = &extremes.note {
        warnings.push(Warning {
            kind: WarningKind::ExtremeSetOverride,
            dmu: None,
            facet: None,
            message: note.clone(),
        });
    }
    for c in &pipe.facets.coincident {
        let names: Vec<&str> = c.union.iter().map(|&j| ds.name(j)).collect();
        warnings.push(Warning {
            kind: WarningKind::Regularity,
            dmu: None,
            facet: pipe
                .facets
                .iter()
                .find(|f| f.members == c.facet_members)
                .map(|f| f.id),
            message: format!(
                "{} subsets span one hyperplane over units [{}]",
                c.subsets.len(),
                names.join(", ")
            ),
        });
    }
    for f in pipe.facets.iter() {
        for &j in &f.violators {
            warnings.push(Warning {
                kind: WarningKind::SupportViolation,
                dmu: Some(ds.name(j).to_string()),
                facet: Some(f.id),
                message: format!("'{}' lies strictly above facet {}", ds.name(j), f.id),
            });
        }
    }

    let mut results = Vec::with_capacity(ds.n());
    for o in 0..ds.n() {
        let name = ds.name(o).to_string();
        let robust = if cfg.measures.robust {
            let r = robust_efficiency(ds, &pipe.partition, o, &robust_cfg)?;
            for w in &r.warnings {
                warnings.push(Warning {
                    kind: WarningKind::LambdaShrinkage,
                    dmu: Some(name.clone()),
                    facet: None,
                    message: w.clone(),
                });
            }
            if r.chosen().alternate_optima {
                warnings.push(Warning {
                    kind: WarningKind::AlternateOptima,
                    dmu: Some(name.clone()),
                    facet: None,
                    message: format!(
                        "robust program for '{name}' has alternate optima in group {}",
                        r.chosen_group + 1
                    ),
                });
            }
            Some(r)
        } else {
            None
        };
        let closest = if cfg.measures.closest {
            let r = closest_on_efpps(&pipe.facets, ds, o, &cfg.solver)?;
            if r.status == MeasureStatus::OutOfEnvelope {
                warnings.push(Warning {
                    kind: WarningKind::OutOfEnvelope,
                    dmu: Some(name.clone()),
                    facet: r.violated_facets.first().copied(),
                    message: format!(
                        "'{name}' violates facet half-spaces {:?}; closest measure undefined",
                        r.violated_facets
                    ),
                });
            }
            Some(r)
        } else {
            None
        };
        let russell = if cfg.measures.russell {
            Some(russell_farthest(ds, o, &cfg.solver)?)
        } else {
            None
        };
        results.push(DmuRow {
            dmu: o,
            name,
            robust,
            closest,
            russell,
        });
    }

    Ok(RunReport {
        config: cfg.clone(),
        dataset: DatasetSummary {
            n: ds.n(),
            inputs: ds.input_names().to_vec(),
            outputs: ds.output_names().to_vec(),
            names: ds.names().to_vec(),
        },
        extremes,
        facets: FacetTable::new(ds, &pipe.facets),
        partition: PartitionRecord::new(ds, &pipe.partition),
        results,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidDataset(format!(
                "unknown format '{other}' (expected json or csv)"
            ))),
        }
    }
}

impl RunReport {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One row per unit: name, robust slacks, then the three scores.
    /// Missing values are empty cells.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["dmu".to_string()];
        header.extend(self.dataset.outputs.iter().map(|o| format!("slack:{o}")));
        header.extend(["robust_theta", "closest_theta", "russell_theta"].map(String::from));
        w.write_record(&header)?;
        let cell = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        for row in &self.results {
            let mut rec = vec![row.name.clone()];
            match &row.robust {
                Some(r) => rec.extend(r.slacks().iter().map(|v| v.to_string())),
                None => rec.extend(self.dataset.outputs.iter().map(|_| String::new())),
            }
            rec.push(cell(row.robust_theta()));
            rec.push(cell(row.closest_theta()));
            rec.push(cell(row.russell_theta()));
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::Io {
            path: "<csv output>".into(),
            source: e,
        })?;
        Ok(())
    }

    pub fn emit<W: Write>(&self, format: ReportFormat, mut out: W) -> Result<()> {
        match format {
            ReportFormat::Json => {
                out.write_all(self.to_json()?.as_bytes())
                    .map_err(|e| Error::Io {
                        path: "<json output>".into(),
                        source: e,
                    })
            }
            ReportFormat::Csv => self.write_csv(out),
        }
    }

    pub fn row(&self, name: &str) -> Option<&DmuRow> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// Facet member sets compared against an expected list, by member names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetDiscrepancy {
    pub matched: usize,
    /// Expected member sets with no reproduced facet, as (expected position, names).
    pub missing: Vec<(usize, Vec<String>)>,
    /// Reproduced facets not in the expected list, as (facet id, names).
    pub extra: Vec<(usize, Vec<String>)>,
    /// Units appearing in a missing or extra set but not in both.
    pub offending_units: Vec<String>,
}

impl FacetDiscrepancy {
    pub fn is_exact(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Compares reproduced facets with expected member lists (order-free).
pub fn compare_facets(table: &FacetTable, expected: &[Vec<String>]) -> FacetDiscrepancy {
    let key = |v: &[String]| {
        let mut k = v.to_vec();
        k.sort();
        k
    };
    let got: Vec<(usize, Vec<String>)> = table
        .facets
        .iter()
        .map(|f| (f.id, key(&f.members)))
        .collect();
    let want: Vec<Vec<String>> = expected.iter().map(|e| key(e)).collect();
    let missing: Vec<(usize, Vec<String>)> = want
        .iter()
        .enumerate()
        .filter(|(_, w)| !got.iter().any(|(_, g)| g == *w))
        .map(|(k, w)| (k + 1, w.clone()))
        .collect();
    let extra: Vec<(usize, Vec<String>)> = got
        .iter()
        .filter(|(_, g)| !want.contains(g))
        .cloned()
        .collect();
    let mut offending: Vec<String> = Vec::new();
    for (_, m) in &missing {
        for (_, e) in &extra {
            for u in m
                .iter()
                .filter(|u| !e.contains(u))
                .chain(e.iter().filter(|u| !m.contains(u)))
            {
                if !offending.contains(u) {
                    offending.push(u.clone());
                }
            }
        }
    }
    if extra.is_empty() || missing.is_empty() {
        for (_, s) in missing.iter().chain(&extra) {
            for u in s {
                if !offending.contains(u) {
                    offending.push(u.clone());
                }
            }
        }
    }
    offending.sort();
    FacetDiscrepancy {
        matched: want.len() - missing.len(),
        missing,
        extra,
        offending_units: offending,
    }
}
