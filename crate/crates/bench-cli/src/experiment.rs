use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use bnb_engine::{
    solve, EstimateComparator, HybridSelector, NodeComparator, NodeSelector, OracleComparator,
    PlainSelector, ScipLikeSelector, SolveLimits, SolveStatus,
};
use milp_core::MilpInstance;
use models::{load_model, ModelComparator, TrainedModel};

use crate::config::{ConfigError, ExperimentConfig, Method};
use crate::metrics::{geo_std, shifted_geomean};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("checkpoint for {method:?} failed to load: {source}")]
    Checkpoint {
        method: Method,
        #[source]
        source: models::ModelIoError,
    },
    #[error("split {family}/{split}: {source}")]
    Instances {
        family: String,
        split: String,
        #[source]
        source: anyhow::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Aggregated result of one method on one family/split group.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub method: &'static str,
    pub family: String,
    pub split: String,
    pub n_instances: usize,
    pub n_solved: usize,
    pub geo_nodes: Option<f64>,
    pub geo_std_nodes: Option<f64>,
    pub geo_time: Option<f64>,
    pub geo_std_time: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    /// Hard solve failures (numerical errors), one message each. Solves that
    /// merely hit their limits are counted in `n_instances - n_solved`.
    pub failures: Vec<String>,
}

struct LoadedModels {
    svm: Option<TrainedModel>,
    mlp: Option<TrainedModel>,
    gnn: Option<TrainedModel>,
}

impl LoadedModels {
    fn get(&self, method: Method) -> Option<&TrainedModel> {
        match method {
            Method::Svm => self.svm.as_ref(),
            Method::Mlp => self.mlp.as_ref(),
            Method::Gnn => self.gnn.as_ref(),
            _ => None,
        }
    }
}

/// Reads the instances of a split directory: files listed by
/// `manifest.json` when present, otherwise every `*.milp` file in name
/// order.
pub fn load_split_instances(dir: &Path) -> anyhow::Result<Vec<(String, MilpInstance)>> {
    let files: Vec<std::path::PathBuf> = if dir.join("manifest.json").exists() {
        instance_gen::manifest_files(dir)?
    } else {
        let mut files: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "milp"))
            .collect();
        files.sort();
        files
    };
    let mut out = Vec::with_capacity(files.len());
    for path in files {
        let inst = milp_core::read_instance(&path)?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| inst.name.clone());
        out.push((id, inst));
    }
    Ok(out)
}

struct InstanceOutcome {
    solved: bool,
    nodes: u64,
    seconds: f64,
}

fn solve_one(
    inst: &MilpInstance,
    method: Method,
    model: Option<&TrainedModel>,
    limits: &SolveLimits,
    measure_time: bool,
) -> Result<InstanceOutcome, String> {
    let mut comparator: Box<dyn NodeComparator> = match method {
        Method::ScipLikeEstimate | Method::PlainEstimate => Box::new(EstimateComparator),
        Method::Oracle => {
            // The oracle is granted the optimal solution up front; the
            // presolve that produces it is excluded from the reported time.
            let pre = solve(
                inst,
                &mut EstimateComparator,
                &mut PlainSelector,
                limits,
            )
            .map_err(|e| format!("oracle presolve: {e}"))?;
            let Some(incumbent) = pre.incumbent else {
                return Ok(InstanceOutcome {
                    solved: false,
                    nodes: pre.nodes_processed,
                    seconds: 0.0,
                });
            };
            if pre.status != SolveStatus::Optimal {
                return Ok(InstanceOutcome {
                    solved: false,
                    nodes: pre.nodes_processed,
                    seconds: 0.0,
                });
            }
            Box::new(OracleComparator::new(incumbent.values))
        }
        Method::Svm | Method::Mlp | Method::Gnn => {
            Box::new(ModelComparator::new(model.expect("validated").clone()))
        }
    };
    let mut selector: Box<dyn NodeSelector> = match method {
        Method::ScipLikeEstimate => Box::new(ScipLikeSelector),
        Method::Oracle => Box::new(PlainSelector),
        // Learned methods and the plain estimate baseline run the hybrid
        // rule: plugged ranking until two incumbents, then best estimate.
        Method::PlainEstimate | Method::Svm | Method::Mlp | Method::Gnn => {
            Box::new(HybridSelector)
        }
    };
    let stats = solve(inst, comparator.as_mut(), selector.as_mut(), limits)
        .map_err(|e| format!("{}: {e}", inst.name))?;
    Ok(InstanceOutcome {
        solved: stats.status == SolveStatus::Optimal,
        nodes: stats.nodes_processed,
        seconds: if measure_time { stats.wall_time } else { 0.0 },
    })
}

/// Runs the full method x split grid and aggregates shifted geometric means
/// per group. Instance solves run on a `jobs`-wide pool; aggregation is
/// sequential and deterministic.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    config.validate()?;
    let load = |method: Method| -> Result<Option<TrainedModel>, ExperimentError> {
        if config.methods.contains(&method) {
            let path = &config.checkpoints[&method];
            Ok(Some(load_model(path).map_err(|source| {
                ExperimentError::Checkpoint { method, source }
            })?))
        } else {
            Ok(None)
        }
    };
    let loaded = LoadedModels {
        svm: load(Method::Svm)?,
        mlp: load(Method::Mlp)?,
        gnn: load(Method::Gnn)?,
    };

    let limits = SolveLimits {
        max_nodes: config.limits.nodes,
        max_seconds: config.limits.seconds,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for split in &config.splits {
        let instances = load_split_instances(&split.dir).map_err(|source| {
            ExperimentError::Instances {
                family: split.family.clone(),
                split: split.split.clone(),
                source,
            }
        })?;
        for &method in &config.methods {
            let model = loaded.get(method);
            let outcomes: Vec<Result<InstanceOutcome, String>> = pool.install(|| {
                instances
                    .par_iter()
                    .map(|(_, inst)| {
                        solve_one(inst, method, model, &limits, config.measure_time)
                    })
                    .collect()
            });
            let mut nodes = Vec::new();
            let mut times = Vec::new();
            let mut solved = 0;
            for (idx, outcome) in outcomes.into_iter().enumerate() {
                match outcome {
                    Ok(o) if o.solved => {
                        solved += 1;
                        nodes.push(o.nodes as f64);
                        times.push(o.seconds);
                    }
                    Ok(_) => {}
                    Err(msg) => failures.push(format!(
                        "{}/{}/{} [{}]: {msg}",
                        method.report_label(),
                        split.family,
                        split.split,
                        instances[idx].0
                    )),
                }
            }
            rows.push(ResultRow {
                method: method.report_label(),
                family: split.family.clone(),
                split: split.split.clone(),
                n_instances: instances.len(),
                n_solved: solved,
                geo_nodes: shifted_geomean(&nodes, 1.0).ok(),
                geo_std_nodes: geo_std(&nodes, 1.0).ok(),
                geo_time: shifted_geomean(&times, 1.0).ok(),
                geo_std_time: geo_std(&times, 1.0).ok(),
            });
        }
    }
    Ok(ExperimentOutcome { rows, failures })
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:.6}"),
        None => String::new(),
    }
}

/// Canonical CSV output (one row per method x family x split).
pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(
        "method,family,split,n_instances,n_solved,geo_nodes,geo_std_nodes,geo_time,geo_std_time\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.method,
            r.family,
            r.split,
            r.n_instances,
            r.n_solved,
            fmt_opt(r.geo_nodes),
            fmt_opt(r.geo_std_nodes),
            fmt_opt(r.geo_time),
            fmt_opt(r.geo_std_time),
        );
    }
    out
}

/// Markdown rendering of the same rows, for human reading.
pub fn results_markdown(rows: &[ResultRow], jobs: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Evaluation results\n");
    let _ = writeln!(out, "Solve parallelism: {jobs} job(s).\n");
    let _ = writeln!(
        out,
        "| method | family | split | solved | geo nodes | geo time (s) |"
    );
    let _ = writeln!(out, "|---|---|---|---|---|---|");
    for r in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {}/{} | {} ± {} | {} ± {} |",
            r.method,
            r.family,
            r.split,
            r.n_solved,
            r.n_instances,
            fmt_opt(r.geo_nodes),
            fmt_opt(r.geo_std_nodes),
            fmt_opt(r.geo_time),
            fmt_opt(r.geo_std_time),
        );
    }
    out
}

/// Writes the CSV (and a matching markdown file alongside it).
pub fn write_reports(
    rows: &[ResultRow],
    output: &Path,
    jobs: usize,
) -> Result<(), ExperimentError> {
    if let Some(parent) = output.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(output, results_csv(rows))?;
    let md_path = output.with_extension("md");
    std::fs::write(md_path, results_markdown(rows, jobs))?;
    Ok(())
}
