use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use bench_cli::{run_experiment, write_reports, ExperimentConfig};
use bnb_engine::{
    solve_traced, BestFirstComparator, DfsComparator, EstimateComparator, HybridSelector,
    NodeComparator, NodeSelector, OracleComparator, PlainSelector, ScipLikeSelector, SolveLimits,
    SolveStatus,
};
use imitation::{collect, split_instances, CollectConfig, SplitTag, WeightScheme};
use instance_gen::{Family, GenConfig, SizeClass};
use models::{describe, load_model, model_accuracy, save_model, train_model, ScorerKind,
    ModelComparator, TrainConfig};

#[derive(Parser)]
#[command(
    name = "bench-cli",
    about = "Branch-and-bound node-comparison benchmark driver",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a suite of benchmark instances plus a manifest.
    Generate(GenerateArgs),
    /// Solve one instance with a chosen comparator and selector.
    Solve(SolveArgs),
    /// Collect oracle-imitation datasets from an instance directory.
    Collect(CollectArgs),
    /// Train a scoring model from a dataset file.
    Train(TrainArgs),
    /// Run a full evaluation grid from an experiment config.
    Evaluate(EvaluateArgs),
    /// Print a checkpoint's architecture and normalization constants.
    ModelDescribe(ModelDescribeArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Instance family: fcmcnf, maxsat, or gisp.
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Size class label recorded in the manifest: test or transfer.
    #[arg(long, default_value = "test")]
    split: String,
    /// Edge probability override (defaults to the family's standard value).
    #[arg(long)]
    p: Option<f64>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    /// estimate, best-first, dfs, oracle, or model.
    #[arg(long, default_value = "estimate")]
    comparator: String,
    /// plain, scip-like, or hybrid.
    #[arg(long, default_value = "plain")]
    selector: String,
    /// Checkpoint path (required with --comparator model).
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    limit_nodes: Option<u64>,
    #[arg(long)]
    limit_seconds: Option<f64>,
    /// Write a JSON-lines solve trace to this path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct CollectArgs {
    /// Directory of instances (with or without a manifest).
    #[arg(long)]
    instances: PathBuf,
    /// Output directory for train.ds / test.ds.
    #[arg(long)]
    out: PathBuf,
    /// Number of instances held out for the test dataset.
    #[arg(long, default_value_t = 0)]
    test_count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    limit_nodes: Option<u64>,
    /// ratio-in-exponent (default) or exponent-over-min.
    #[arg(long, default_value = "ratio-in-exponent")]
    weight_scheme: String,
    /// Instance-level parallelism.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct TrainArgs {
    /// gnn, mlp, or svm.
    #[arg(long)]
    model: ScorerKind,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 16)]
    batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    /// Optional held-out dataset to report accuracy on after training.
    #[arg(long)]
    eval_dataset: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Experiment config JSON.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    limit_nodes: Option<u64>,
    #[arg(long)]
    limit_seconds: Option<f64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ModelDescribeArgs {
    #[arg(long)]
    checkpoint: PathBuf,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Solve(args) => cmd_solve(args),
        Command::Collect(args) => cmd_collect(args),
        Command::Train(args) => cmd_train(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::ModelDescribe(args) => cmd_model_describe(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let mut config = GenConfig::new(args.family, args.n_min, args.n_max, args.seed, args.count);
    config.p = args.p;
    config.size_class = match args.split.as_str() {
        "test" => SizeClass::TrainTest,
        "transfer" => SizeClass::Transfer,
        other => bail!("unknown split label `{other}`, expected test or transfer"),
    };
    let manifest = instance_gen::gen_suite(&config, &args.out)?;
    println!(
        "wrote {} {} instances to {}",
        manifest.instances.len(),
        args.family.label(),
        args.out.display()
    );
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<()> {
    let inst = milp_core::read_instance(&args.instance)
        .with_context(|| format!("reading {}", args.instance.display()))?;
    let limits = SolveLimits {
        max_nodes: args.limit_nodes,
        max_seconds: args.limit_seconds,
    };

    let mut comparator: Box<dyn NodeComparator> = match args.comparator.as_str() {
        "estimate" => Box::new(EstimateComparator),
        "best-first" => Box::new(BestFirstComparator),
        "dfs" => Box::new(DfsComparator),
        "oracle" => {
            let pre = bnb_engine::solve(&inst, &mut EstimateComparator, &mut PlainSelector, &limits)?;
            let incumbent = pre
                .incumbent
                .filter(|_| pre.status == SolveStatus::Optimal)
                .context("oracle presolve did not reach optimality")?;
            Box::new(OracleComparator::new(incumbent.values))
        }
        "model" => {
            let path = args.model.context("--comparator model requires --model")?;
            Box::new(ModelComparator::new(load_model(&path)?))
        }
        other => bail!("unknown comparator `{other}`"),
    };
    let mut selector: Box<dyn NodeSelector> = match args.selector.as_str() {
        "plain" => Box::new(PlainSelector),
        "scip-like" => Box::new(ScipLikeSelector),
        "hybrid" => Box::new(HybridSelector),
        other => bail!("unknown selector `{other}`"),
    };

    let mut trace_file = match &args.trace {
        Some(path) => Some(std::fs::File::create(path)?),
        None => None,
    };
    let trace_ref = trace_file
        .as_mut()
        .map(|f| f as &mut dyn std::io::Write);
    let stats = solve_traced(&inst, comparator.as_mut(), selector.as_mut(), &limits, trace_ref)?;
    println!("status: {:?}", stats.status);
    match &stats.incumbent {
        Some(sol) => println!("objective: {:.9}", sol.objective),
        None => println!("objective: none"),
    }
    println!("nodes: {}", stats.nodes_processed);
    println!("comparisons: {}", stats.comp_calls);
    println!("bound: {:.9}", stats.global_dual_bound);
    println!("time: {:.3}s", stats.wall_time);
    Ok(())
}

fn cmd_collect(args: CollectArgs) -> Result<()> {
    let scheme = match args.weight_scheme.as_str() {
        "ratio-in-exponent" => WeightScheme::RatioInExponent,
        "exponent-over-min" => WeightScheme::ExponentOverMin,
        other => bail!("unknown weight scheme `{other}`"),
    };
    let instances = bench_cli::load_split_instances(&args.instances)
        .with_context(|| format!("loading {}", args.instances.display()))?;
    if args.test_count > instances.len() {
        bail!(
            "--test-count {} exceeds instance count {}",
            args.test_count,
            instances.len()
        );
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()?;
    let config = CollectConfig {
        limits: SolveLimits {
            max_nodes: args.limit_nodes.or(Some(100_000)),
            max_seconds: None,
        },
        weight_scheme: scheme,
        collection_node_factor: 4,
        seed: args.seed,
    };
    let (train, test) = split_instances(instances, args.test_count);
    std::fs::create_dir_all(&args.out)?;
    let (train_ds, test_ds) = pool.install(|| -> Result<_> {
        let train_ds = collect(&train, &config, SplitTag::Train)?;
        let test_ds = if test.is_empty() {
            None
        } else {
            Some(collect(&test, &config, SplitTag::Test)?)
        };
        Ok((train_ds, test_ds))
    })?;
    let train_path = args.out.join("train.ds");
    imitation::save_dataset(&train_ds, &train_path)?;
    println!(
        "train: {} samples from {} instances -> {}",
        train_ds.len(),
        train.len(),
        train_path.display()
    );
    if let Some(test_ds) = test_ds {
        let test_path = args.out.join("test.ds");
        imitation::save_dataset(&test_ds, &test_path)?;
        println!(
            "test: {} samples from {} instances -> {}",
            test_ds.len(),
            test.len(),
            test_path.display()
        );
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let ds = imitation::load_dataset(&args.dataset)
        .with_context(|| format!("loading {}", args.dataset.display()))?;
    let config = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        learning_rate: args.lr,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let model = train_model(args.model, &ds, &config)?;
    save_model(&model, &args.out)?;
    println!(
        "trained {} on {} samples (val acc {:.4}) -> {}",
        args.model.label(),
        ds.len(),
        model.manifest.training.best_val_accuracy,
        args.out.display()
    );
    if let Some(eval_path) = args.eval_dataset {
        let eval = imitation::load_dataset(&eval_path)?;
        println!("held-out accuracy: {:.4}", model_accuracy(&model, &eval));
    }
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let mut config = ExperimentConfig::from_file(&args.config)
        .with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(n) = args.limit_nodes {
        config.limits.nodes = Some(n);
    }
    if let Some(s) = args.limit_seconds {
        config.limits.seconds = Some(s);
    }
    if let Some(j) = args.jobs {
        config.jobs = j;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    let outcome = run_experiment(&config)?;
    write_reports(&outcome.rows, &config.output, config.jobs)?;
    println!("wrote {} rows to {}", outcome.rows.len(), config.output.display());
    if !outcome.failures.is_empty() {
        eprintln!("{} solve(s) failed:", outcome.failures.len());
        for f in &outcome.failures {
            eprintln!("  {f}");
        }
        bail!("experiment finished with failures; partial results preserved");
    }
    Ok(())
}

fn cmd_model_describe(args: ModelDescribeArgs) -> Result<()> {
    let model = load_model(&args.checkpoint)
        .with_context(|| format!("loading {}", args.checkpoint.display()))?;
    print!("{}", describe(&model));
    Ok(())
}
