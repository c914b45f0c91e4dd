//! Command-line front end: `train`, `select`, `evaluate`, `experiment` and
//! `synthesize`. Every subcommand is deterministic in its inputs and `--seed`.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::artifact::{self, SubsetDocument};
use crate::dataset::{generate_synthetic, load_csv, load_csv_with_schema};
use crate::error::{Error, Result};
use crate::evaluation::{rule_rectangles, run_experiment, CurveSpec, ExperimentConfig, UncoveredMode, VotePredictor};
use crate::forest::{train_forest_with, ForestConfig};
use crate::heuristics::{Heuristic, DEFAULT_M};
use crate::rules::extract_rules;
use crate::selection::{select, SelectionConfig, Strategy};

#[derive(Debug, Parser)]
#[command(name = "forest-rules", version, about = "Random forests as small sets of readable rules")]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a random forest on a CSV file and save it as JSON.
    Train(TrainArgs),
    /// Select a rule subset from a saved forest.
    Select(SelectArgs),
    /// Accuracy and uncovered fraction of a saved subset on a test CSV.
    Evaluate(EvaluateArgs),
    /// Cross-validated accuracy curves for several strategies and heuristics.
    Experiment(ExperimentArgs),
    /// Write the two-line synthetic dataset, optionally with a rule dump.
    Synthesize(SynthesizeArgs),
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    /// Number of trees.
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    /// Candidate columns per node (default: ceil(sqrt(columns))).
    #[arg(long)]
    pub max_features: Option<usize>,
}

#[derive(Debug, Args)]
pub struct HeuristicArgs {
    /// precision, recall or m-estimate.
    #[arg(long, default_value = "m-estimate")]
    pub heuristic: String,
    /// m of the m-estimate.
    #[arg(long, default_value_t = DEFAULT_M)]
    pub m: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Label column (default: last column).
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, short, default_value = "forest.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub forest: ForestArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub forest: PathBuf,
    /// Training CSV used to score rules.
    #[arg(long)]
    pub data: PathBuf,
    /// best, weighted-covering or random-trees.
    #[arg(long, default_value = "weighted-covering")]
    pub strategy: String,
    #[command(flatten)]
    pub heuristic: HeuristicArgs,
    /// Number of rules to select.
    #[arg(long, short, default_value_t = 30)]
    pub n: usize,
    /// Lower bound for covering weights.
    #[arg(long, default_value_t = 0.0)]
    pub min_weight: f64,
    /// Seed of the random-trees order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix; writes `<out>.json` and `<out>.txt`.
    #[arg(long, short, default_value = "subset")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub forest: PathBuf,
    #[arg(long)]
    pub subset: PathBuf,
    /// Test CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// default-class or error.
    #[arg(long, default_value = "default-class")]
    pub uncovered: String,
    /// Also write the result as JSON.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub label: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Comma-separated strategies.
    #[arg(long, value_delimiter = ',', default_value = "best,weighted-covering,random-trees")]
    pub strategies: Vec<String>,
    /// Comma-separated heuristics.
    #[arg(long, value_delimiter = ',', default_value = "precision,recall,m-estimate")]
    pub heuristics: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_M)]
    pub m: f64,
    /// Largest subset size evaluated (default: all rules).
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Keep every k-th curve point in the outputs.
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    #[arg(long, default_value_t = 0.0)]
    pub min_weight: f64,
    #[arg(long, default_value = "default-class")]
    pub uncovered: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output prefix; writes `<out>.csv` and `<out>.json`.
    #[arg(long, short, default_value = "experiment")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[arg(long, default_value_t = 800)]
    pub n_red: usize,
    #[arg(long, default_value_t = 200)]
    pub n_blue: usize,
    /// Standard deviation of the perpendicular noise.
    #[arg(long, default_value_t = 0.05)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short, default_value = "synthetic.csv")]
    pub out: PathBuf,
    /// When given, train a forest, select rules and dump their rectangles.
    #[arg(long)]
    pub strategy: Option<String>,
    #[command(flatten)]
    pub heuristic: HeuristicArgs,
    #[arg(long, short, default_value_t = 30)]
    pub n: usize,
    #[command(flatten)]
    pub forest: ForestArgs,
    /// Grid resolution of the net-vote map.
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    /// Rectangle dump path (default: `<out>` with a `.rules.json` suffix).
    #[arg(long)]
    pub rects: Option<PathBuf>,
}

fn parse_heuristic(name: &str, m: f64) -> Result<Heuristic> {
    match name.parse::<Heuristic>()? {
        Heuristic::MEstimate { .. } => Heuristic::m_estimate(m),
        h => Ok(h),
    }
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a parsed command line on a pool of `cli.threads` workers.
pub fn run(cli: Cli) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Train(args) => cmd_train(&args),
        Command::Select(args) => cmd_select(&args),
        Command::Evaluate(args) => cmd_evaluate(&args),
        Command::Experiment(args) => cmd_experiment(&args),
        Command::Synthesize(args) => cmd_synthesize(&args),
    })
}

pub fn cmd_train(args: &TrainArgs) -> Result<()> {
    let data = load_csv(&args.data, args.label.as_deref())?;
    let forest = train_forest_with(
        &data,
        &ForestConfig {
            n_trees: args.forest.trees,
            seed: args.seed,
            max_features: args.forest.max_features,
        },
    )?;
    artifact::save_forest(&args.out, &forest)?;
    println!(
        "trees: {}\nrules: {}\ntraining accuracy: {:.4}\nwritten: {}",
        forest.n_trees(),
        forest.n_leaves(),
        forest.accuracy(&data)?,
        args.out.display()
    );
    Ok(())
}

pub fn cmd_select(args: &SelectArgs) -> Result<()> {
    let forest = artifact::load_forest(&args.forest)?;
    let data = load_csv_with_schema(&args.data, &forest.schema)?;
    let ruleset = extract_rules(&forest);
    let config = SelectionConfig {
        strategy: args.strategy.parse()?,
        heuristic: parse_heuristic(&args.heuristic.heuristic, args.heuristic.m)?,
        n: args.n,
        seed: args.seed,
        min_weight: args.min_weight,
    };
    let subset = select(&ruleset, &data, &config)?;
    let text = ruleset.to_text(subset.selected.iter().copied());
    let doc = SubsetDocument {
        config,
        total_rules: ruleset.len(),
        forest_seed: forest.seed,
        selected: subset.selected,
        scores: subset.scores,
        rules: text.lines().map(str::to_string).collect(),
    };
    let json_path = with_extension(&args.out, "json");
    let text_path = with_extension(&args.out, "txt");
    artifact::write_json(&json_path, artifact::RULE_SUBSET, &doc)?;
    write_text(&text_path, &text)?;
    println!(
        "selected {} of {} rules\nwritten: {}, {}",
        doc.selected.len(),
        doc.total_rules,
        json_path.display(),
        text_path.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct EvaluationReport {
    n_rules: usize,
    n_instances: usize,
    uncovered_mode: UncoveredMode,
    accuracy: f64,
    uncovered_fraction: f64,
    forest_accuracy: f64,
}

pub fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    let forest = artifact::load_forest(&args.forest)?;
    let doc: SubsetDocument = artifact::read_json(&args.subset, artifact::RULE_SUBSET)?;
    let ruleset = extract_rules(&forest);
    if doc.total_rules != ruleset.len() {
        return Err(Error::Format(format!(
            "subset refers to {} rules but the forest has {}",
            doc.total_rules,
            ruleset.len()
        )));
    }
    let test = load_csv_with_schema(&args.data, &forest.schema)?;
    let mode: UncoveredMode = args.uncovered.parse()?;
    let predictor = VotePredictor::from_indices(&ruleset, doc.selected.clone())?.with_uncovered(mode);
    let report = EvaluationReport {
        n_rules: doc.selected.len(),
        n_instances: test.n_rows(),
        uncovered_mode: mode,
        accuracy: predictor.accuracy(&test)?,
        uncovered_fraction: predictor.uncovered_fraction(&test)?,
        forest_accuracy: forest.accuracy(&test)?,
    };
    println!(
        "rules: {}\naccuracy: {:.4}\nuncovered: {:.4}\nforest accuracy: {:.4}",
        report.n_rules, report.accuracy, report.uncovered_fraction, report.forest_accuracy
    );
    if let Some(out) = &args.out {
        artifact::write_json(out, artifact::EVALUATION, &report)?;
    }
    Ok(())
}

/// Strategy × heuristic grid; random trees appear once.
pub fn curve_specs(strategies: &[String], heuristics: &[String], m: f64) -> Result<Vec<CurveSpec>> {
    let heuristics = heuristics
        .iter()
        .map(|h| parse_heuristic(h, m))
        .collect::<Result<Vec<_>>>()?;
    let mut specs = Vec::new();
    for s in strategies {
        let strategy: Strategy = s.parse()?;
        if strategy == Strategy::RandomTrees {
            specs.push(CurveSpec::new(strategy, Heuristic::Precision));
            continue;
        }
        if heuristics.is_empty() {
            return Err(Error::InvalidParameter("no heuristics given".into()));
        }
        specs.extend(heuristics.iter().map(|&h| CurveSpec::new(strategy, h)));
    }
    if specs.is_empty() {
        return Err(Error::InvalidParameter("no strategies given".into()));
    }
    Ok(specs)
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let data = load_csv(&args.data, args.label.as_deref())?;
    let config = ExperimentConfig {
        k_folds: args.folds,
        n_trees: args.forest.trees,
        max_features: args.forest.max_features,
        curves: curve_specs(&args.strategies, &args.heuristics, args.m)?,
        n_max: args.n_max,
        seed: args.seed,
        min_weight: args.min_weight,
        uncovered: args.uncovered.parse()?,
    };
    let result = run_experiment(&data, &config)?.thinned(args.stride);
    let csv_path = with_extension(&args.out, "csv");
    let json_path = with_extension(&args.out, "json");
    let file = std::fs::File::create(&csv_path).map_err(|source| Error::Io {
        path: csv_path.clone(),
        source,
    })?;
    result.write_csv(file)?;
    artifact::write_json(&json_path, artifact::EXPERIMENT, &result)?;
    println!("baseline accuracy: {:.4}", result.baseline_accuracy);
    for curve in &result.mean_curves {
        if let Some(best) = curve.points.iter().max_by(|a, b| a.accuracy.total_cmp(&b.accuracy)) {
            println!(
                "{:>17} {:>10}: best mean accuracy {:.4} at n = {}",
                curve.strategy.name(),
                curve.heuristic,
                best.accuracy,
                best.n_rules
            );
        }
    }
    println!("written: {}, {}", csv_path.display(), json_path.display());
    Ok(())
}

pub fn cmd_synthesize(args: &SynthesizeArgs) -> Result<()> {
    let data = generate_synthetic(args.n_red, args.n_blue, args.noise, args.seed)?;
    data.save_csv(&args.out)?;
    println!("{} rows written to {}", data.n_rows(), args.out.display());
    let Some(strategy) = &args.strategy else {
        return Ok(());
    };
    let forest = train_forest_with(
        &data,
        &ForestConfig {
            n_trees: args.forest.trees,
            seed: args.seed,
            max_features: args.forest.max_features,
        },
    )?;
    let ruleset = extract_rules(&forest);
    let config = SelectionConfig {
        strategy: strategy.parse()?,
        heuristic: parse_heuristic(&args.heuristic.heuristic, args.heuristic.m)?,
        n: args.n,
        seed: args.seed,
        min_weight: 0.0,
    };
    let subset = select(&ruleset, &data, &config)?;
    let dump = rule_rectangles(&ruleset, &subset.selected, args.grid)?;
    let path = args.rects.clone().unwrap_or_else(|| {
        let stem = args.out.with_extension("");
        with_extension(&stem, "rules.json")
    });
    artifact::write_json(&path, artifact::RECTANGLES, &dump)?;
    println!(
        "{} of {} rules, grid coverage {:.4}, written to {}",
        subset.selected.len(),
        ruleset.len(),
        dump.grid_coverage,
        path.display()
    );
    Ok(())
}
