//! `facet-bench`: robust and closest DEA benchmarking from the command line.
//!
//! Exit codes: 0 on success, 1 for data or argument errors, 2 when the
//! numerical engine fails.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use facet_bench::report::{
    build_pipeline, load_extremes, run_pipeline, ExtremeSummary, FacetTable, MeasureSelection,
    PartitionRecord, PipelineConfig, ReportFormat,
};
use facet_bench::scenario::{
    check_assumptions, global_optimum, risk_losses, simulate_coverage, uniqueness_diagnostics,
    PriceSampler, PriceScenario,
};
use facet_bench::{load_dataset, Aggregation, Dataset, SupportScope};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(
    name = "facet-bench",
    version,
    about = "Robust and closest DEA benchmarking on efficient facets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a data file and print its shape
    Validate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extreme efficient units, computed and pinned
    Extremes(Common),
    /// Full-dimensional efficient facets
    Facets(Common),
    /// Robust units and their facet groups
    Partition(Common),
    /// Per-unit scores for the selected measures
    Efficiency(ReportArgs),
    /// Full pipeline report
    Report(ReportArgs),
    /// Two-stage price shock analysis for one unit
    Scenario(ScenarioArgs),
    /// Monte-Carlo coverage of facet strategies
    Coverage(CoverageArgs),
}

#[derive(Args, Debug)]
struct Common {
    /// CSV with a name column and `in:`/`out:` prefixed columns
    #[arg(long)]
    data: PathBuf,
    /// File listing pinned extreme units, one name per line
    #[arg(long)]
    extremes: Option<PathBuf>,
    #[arg(long, value_enum)]
    support_scope: Option<Scope>,
    #[arg(long, value_enum)]
    aggregation: Option<Agg>,
    /// Bundled reproduction settings
    #[arg(long, value_enum)]
    profile: Option<Profile>,
    /// Output path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Measure::All)]
    measure: Measure,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct ScenarioArgs {
    #[command(flatten)]
    common: Common,
    /// Price scenario JSON
    #[arg(long)]
    prices: PathBuf,
    /// Unit whose outputs and inputs fix ŷ and x̄
    #[arg(long)]
    dmu: String,
    /// Pre-shock δ; defaults to the low end of the domain
    #[arg(long)]
    delta0: Option<f64>,
    /// Post-shock δ; defaults to the high end of the domain
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Args, Debug)]
struct CoverageArgs {
    #[command(flatten)]
    common: Common,
    /// Unit whose inputs fix x̄
    #[arg(long)]
    dmu: String,
    /// Comma-separated facet ids; repeat for several strategies.
    /// Defaults to every single facet plus all facets together.
    #[arg(long)]
    strategy: Vec<String>,
    /// Sample δ from this scenario instead of independent uniform prices
    #[arg(long)]
    prices: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scope {
    Extremes,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Agg {
    #[value(name = "table4-max")]
    Table4Max,
    #[value(name = "paper-min")]
    PaperMin,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Profile {
    #[value(name = "paper-985")]
    Paper985,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Measure {
    Robust,
    Closest,
    Russell,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match self.profile {
            Some(Profile::Paper985) => PipelineConfig::paper_985(),
            None => PipelineConfig::default(),
        };
        cfg.data = self.data.display().to_string();
        if let Some(path) = &self.extremes {
            cfg.pinned_extremes = Some(load_extremes(path)?);
        }
        if let Some(scope) = self.support_scope {
            cfg.support_scope = match scope {
                Scope::Extremes => SupportScope::Extremes,
                Scope::All => SupportScope::All,
            };
        }
        if let Some(agg) = self.aggregation {
            cfg.aggregation = match agg {
                Agg::Table4Max => Aggregation::Table4Max,
                Agg::PaperMin => Aggregation::PaperMin,
            };
        }
        Ok(cfg)
    }

    fn dataset(&self) -> Result<Dataset> {
        load_dataset(&self.data).with_context(|| format!("reading {}", self.data.display()))
    }
}

fn measures(m: Measure) -> MeasureSelection {
    let name = match m {
        Measure::Robust => "robust",
        Measure::Closest => "closest",
        Measure::Russell => "russell",
        Measure::All => "all",
    };
    name.parse().expect("known measure")
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn emit_json<T: serde::Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(out, text.as_bytes())
}

fn report(args: &ReportArgs) -> Result<()> {
    let ds = args.common.dataset()?;
    let mut cfg = args.common.config()?;
    cfg.measures = measures(args.measure);
    let rep = run_pipeline(&ds, &cfg)?;
    let format = match args.format {
        Format::Json => ReportFormat::Json,
        Format::Csv => ReportFormat::Csv,
    };
    let mut buf = Vec::new();
    rep.emit(format, &mut buf)?;
    emit(args.common.out.as_deref(), &buf)
}

fn scenario(args: &ScenarioArgs) -> Result<()> {
    let ds = args.common.dataset()?;
    let cfg = args.common.config()?;
    let sc = PriceScenario::load(&args.prices)
        .with_context(|| format!("reading {}", args.prices.display()))?;
    if sc.num_outputs() != ds.s() {
        return Err(anyhow!(
            "scenario prices {} outputs but the data has {}",
            sc.num_outputs(),
            ds.s()
        ));
    }
    let (lo, hi) = sc.domain()?;
    let (d0, d1) = (args.delta0.unwrap_or(lo), args.delta.unwrap_or(hi));
    let j = ds.require(&args.dmu)?;
    let (x, y) = (ds.x(j), ds.y(j));
    let pipe = build_pipeline(&ds, &cfg)?;
    let solver = &cfg.solver;

    let assumptions = check_assumptions(&ds, &pipe.facets, &sc, &y, &x, d0, d1, solver)?;
    let home = assumptions.home_facets[0];
    let losses = risk_losses(&ds, &pipe.facets, home, &y, &x, &sc, d0, d1, solver)?;
    let p1 = sc.price_at(d1)?;
    let global = global_optimum(&ds, &pipe.facets, &x, &p1, solver)?;
    let mut diagnostics = Vec::new();
    for &k in &assumptions.home_facets {
        let f = pipe.facets.get(k).expect("home facet");
        diagnostics
            .push(json!({ "facet": k, "diagnosis": uniqueness_diagnostics(&ds, f, &x, &p1)? }));
    }
    let value = json!({
        "config": cfg,
        "dmu": args.dmu,
        "delta0": d0,
        "delta1": d1,
        "prices0": sc.price_at(d0)?,
        "prices1": p1,
        "assumptions": assumptions,
        "losses": losses,
        "global_optimum": global,
        "diagnostics": diagnostics,
    });
    emit_json(args.common.out.as_deref(), &value)
}

fn parse_strategy(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| anyhow!("bad facet id '{t}' in strategy '{text}'"))
        })
        .collect()
}

fn coverage(args: &CoverageArgs) -> Result<()> {
    let ds = args.common.dataset()?;
    let cfg = args.common.config()?;
    let j = ds.require(&args.dmu)?;
    let pipe = build_pipeline(&ds, &cfg)?;
    let strategies: Vec<Vec<usize>> = if args.strategy.is_empty() {
        let mut s: Vec<Vec<usize>> = (1..=pipe.facets.len()).map(|k| vec![k]).collect();
        s.push((1..=pipe.facets.len()).collect());
        s
    } else {
        args.strategy
            .iter()
            .map(|t| parse_strategy(t))
            .collect::<Result<_>>()?
    };
    let sampler = match &args.prices {
        Some(path) => PriceSampler::Scenario {
            scenario: PriceScenario::load(path)
                .with_context(|| format!("reading {}", path.display()))?,
        },
        None => PriceSampler::default(),
    };
    let rep = simulate_coverage(
        &ds,
        &pipe.facets,
        &ds.x(j),
        &strategies,
        &sampler,
        args.trials,
        args.seed,
        &cfg.solver,
    )?;
    emit_json(args.common.out.as_deref(), &rep)
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Validate { data, out } => {
            let ds = load_dataset(data).with_context(|| format!("reading {}", data.display()))?;
            let value = json!({
                "data": data.display().to_string(),
                "dmus": ds.n(),
                "inputs": ds.input_names(),
                "outputs": ds.output_names(),
                "valid": true,
            });
            emit_json(out.as_deref(), &value)
        }
        Command::Extremes(c) => {
            let ds = c.dataset()?;
            let cfg = c.config()?;
            let ex = facet_bench::extreme_set(&ds, cfg.pinned_extremes.as_deref(), &cfg.solver)?;
            emit_json(c.out.as_deref(), &ExtremeSummary::new(&ds, &ex))
        }
        Command::Facets(c) => {
            let ds = c.dataset()?;
            let cfg = c.config()?;
            let ex = facet_bench::extreme_set(&ds, cfg.pinned_extremes.as_deref(), &cfg.solver)?;
            let set =
                facet_bench::enumerate_facets(&ds, &ex.indices, cfg.support_scope, &cfg.facets);
            emit_json(c.out.as_deref(), &FacetTable::new(&ds, &set))
        }
        Command::Partition(c) => {
            let ds = c.dataset()?;
            let pipe = build_pipeline(&ds, &c.config()?)?;
            emit_json(
                c.out.as_deref(),
                &PartitionRecord::new(&ds, &pipe.partition),
            )
        }
        Command::Efficiency(a) | Command::Report(a) => report(a),
        Command::Scenario(a) => scenario(a),
        Command::Coverage(a) => coverage(a),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<facet_bench::Error>() {
        Some(e) if !e.is_data_error() => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
