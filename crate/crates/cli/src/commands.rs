use std::time::Instant;

use anyhow::{bail, Result};
use serde_json::json;

use mmo_core::svm::{self, DatasetFormat, SvmHyperparams, Training};
use mmo_core::{
    error_stats, run_cross_dimension, run_mmo, run_standalone_trials, run_trials, BenchmarkKind, BenchmarkSpec, Bounds,
    ErrorStats, Execution, MmoConfig, MmoResult, Objective, OptimizerKind, SchemeId,
};

use crate::config::Resolved;
use crate::evaluator::ExternalObjective;
use crate::output::{g6, Csv, RunDir};
use crate::UsageError;

fn execution(r: &Resolved) -> Result<Execution, UsageError> {
    match r.raw("execution") {
        "parallel" => Ok(Execution::Parallel),
        "sequential" => Ok(Execution::Sequential),
        other => Err(UsageError(format!(
            "invalid value '{other}' for 'execution': expected parallel or sequential"
        ))),
    }
}

/// Ensemble settings shared by every subcommand; list-valued keys are left
/// at their defaults and set by the caller.
fn base_config(r: &Resolved) -> Result<MmoConfig, UsageError> {
    let mut cfg = MmoConfig {
        seed: r.get("seed")?,
        params: r.optimizer_params()?,
        execution: execution(r)?,
        ..MmoConfig::default()
    };
    if r.has("roster") {
        cfg.roster = r.list("roster")?;
    }
    if r.has("agents") && !r.raw("agents").contains(',') {
        cfg.agents = r.get("agents")?;
    }
    if r.has("scheme") {
        cfg.scheme = r.get("scheme")?;
    }
    if r.has("frequency") {
        cfg.frequency = r.get("frequency")?;
    }
    if r.has("generations") && !r.raw("generations").contains(',') {
        cfg.generations = r.get("generations")?;
    }
    Ok(cfg)
}

fn benchmark(r: &Resolved) -> Result<BenchmarkSpec, UsageError> {
    let kind: BenchmarkKind = r.get("benchmark")?;
    BenchmarkSpec::new(kind, r.get("dim")?).map_err(|e| UsageError(e.to_string()))
}

fn trials(r: &Resolved) -> Result<usize, UsageError> {
    let n: usize = r.get("trials")?;
    if n == 0 {
        return Err(UsageError("'trials' must be at least 1".into()));
    }
    Ok(n)
}

fn stats_fields(s: &ErrorStats) -> [String; 2] {
    [g6(s.mean), g6(s.se)]
}

/// Mean archive-best error per generation across trials.
fn mean_trajectory(results: &[MmoResult], optimum: f64) -> Vec<(u64, f64)> {
    let len = results.iter().map(|r| r.trajectory.len()).min().unwrap_or(0);
    (0..len)
        .map(|g| {
            let sum: f64 = results.iter().map(|r| r.trajectory[g].1 - optimum).sum();
            (results[0].trajectory[g].0, sum / results.len() as f64)
        })
        .collect()
}

pub fn bench_single(r: &Resolved, dir: &RunDir) -> Result<()> {
    let objective = benchmark(r)?;
    let optimizers: Vec<OptimizerKind> = r.list("optimizers")?;
    let agent_counts: Vec<usize> = r.list("agents")?;
    let trials = trials(r)?;
    let base = base_config(r)?;
    let mut table = Csv::new(&["objective", "optimizer", "agents", "mean_error", "se_error"]);
    for &kind in &optimizers {
        for &agents in &agent_counts {
            let cfg = MmoConfig { agents, ..base.clone() };
            let results = run_standalone_trials(kind, &cfg, &objective, trials)?;
            let stats = error_stats(&results, objective.optimum());
            let [mean, se] = stats_fields(&stats);
            table.row(&[objective.name().to_string(), kind.to_string(), agents.to_string(), mean, se]);
            dir.trajectory(
                &format!("{kind}-{agents}"),
                ["generation", "mean_error"],
                mean_trajectory(&results, objective.optimum()),
            )?;
        }
    }
    dir.results(table)
}

pub fn bench_mmo(r: &Resolved, dir: &RunDir) -> Result<()> {
    let objective = benchmark(r)?;
    let schemes: Vec<SchemeId> = r.list("schemes")?;
    let frequencies: Vec<u64> = r.list("frequencies")?;
    let trials = trials(r)?;
    let base = base_config(r)?;
    let mut table = Csv::new(&["objective", "frequency", "scheme", "mean_error", "se_error"]);
    for &frequency in &frequencies {
        for &scheme in &schemes {
            let cfg = MmoConfig {
                scheme,
                frequency,
                ..base.clone()
            };
            let results = run_trials(&cfg, &objective, trials)?;
            let [mean, se] = stats_fields(&error_stats(&results, objective.optimum()));
            table.row(&[objective.name().to_string(), frequency.to_string(), scheme.to_string(), mean, se]);
            dir.trajectory(
                &format!("{scheme}-f{frequency}"),
                ["generation", "mean_error"],
                mean_trajectory(&results, objective.optimum()),
            )?;
        }
    }
    dir.results(table)
}

pub fn ablation(r: &Resolved, dir: &RunDir) -> Result<()> {
    let objective = benchmark(r)?;
    let trials = trials(r)?;
    let base = base_config(r)?;
    if base.roster.len() < 2 {
        return Err(UsageError("ablation needs at least two roster members".into()).into());
    }
    let mut table = Csv::new(&["excluded", "mean_error", "se_error"]);
    let mut cells: Vec<(String, MmoConfig)> = base
        .roster
        .iter()
        .map(|&excluded| {
            let roster = base.roster.iter().copied().filter(|&k| k != excluded).collect();
            (excluded.to_string(), MmoConfig { roster, ..base.clone() })
        })
        .collect();
    cells.push(("none".to_string(), base.clone()));
    for (label, cfg) in cells {
        let results = run_trials(&cfg, &objective, trials)?;
        let [mean, se] = stats_fields(&error_stats(&results, objective.optimum()));
        table.row(&[label.clone(), mean, se]);
        dir.trajectory(
            &format!("without-{label}"),
            ["generation", "mean_error"],
            mean_trajectory(&results, objective.optimum()),
        )?;
    }
    dir.results(table)
}

pub fn cross_dim(r: &Resolved, dir: &RunDir) -> Result<()> {
    let kind: BenchmarkKind = r.get("benchmark")?;
    let dims: Vec<usize> = r.list("dims")?;
    let mut generations: Vec<u64> = r.list("generations")?;
    if generations.len() == 1 {
        generations = vec![generations[0]; dims.len()];
    }
    if generations.len() != dims.len() {
        return Err(UsageError(format!(
            "'generations' lists {} budgets for {} dimensions",
            generations.len(),
            dims.len()
        ))
        .into());
    }
    let base = base_config(r)?;
    let cells: Vec<(usize, u64)> = dims.into_iter().zip(generations).collect();
    let rows = run_cross_dimension(&base, kind, &cells, trials(r)?)?;
    let mut table = Csv::new(&[
        "dimension",
        "generations",
        "batlevy_mean",
        "batlevy_se",
        "mmo_mean",
        "mmo_se",
    ]);
    for row in rows {
        let [bm, bs] = stats_fields(&row.batlevy);
        let [mm, ms] = stats_fields(&row.mmo);
        table.row(&[row.dimension.to_string(), row.generations.to_string(), bm, bs, mm, ms]);
    }
    dir.results(table)
}

struct SvmRow {
    trainer: &'static str,
    config: String,
    runs: Vec<(Training, [f64; 3])>,
}

fn accuracies(model: &svm::LinearModel, split: &svm::DataSplit) -> Result<[f64; 3]> {
    Ok([
        svm::accuracy(model, &split.train)?,
        svm::accuracy(model, &split.validation)?,
        svm::accuracy(model, &split.test)?,
    ])
}

pub fn svm(r: &Resolved, dir: &RunDir) -> Result<()> {
    let format: DatasetFormat = r.get("dataset")?;
    let path = match r.raw("data") {
        "" => match format {
            DatasetFormat::Bcw => "data/breast-cancer-wisconsin.data",
            DatasetFormat::ImageSegmentation => "data/segmentation.data",
        },
        p => p,
    };
    let iterations: u64 = r.get("iterations")?;
    let sgd_lambdas: Vec<f64> = r.list("sgd-lambdas")?;
    let rates: Vec<f64> = r.list("learning-rates")?;
    let mmo_lambdas: Vec<f64> = r.list("mmo-lambdas")?;
    let schemes: Vec<SchemeId> = r.list("schemes")?;
    let frequencies: Vec<u64> = r.list("frequencies")?;
    let trials = trials(r)?;
    let base = MmoConfig {
        generations: iterations,
        ..base_config(r)?
    };
    let data = svm::load_dataset(path, format)?;
    let seeds: Vec<u64> = (0..trials).map(|t| mmo_core::trial_seed(base.seed, t)).collect();
    let splits = seeds
        .iter()
        .map(|&s| svm::split_dataset(&data, s))
        .collect::<mmo_core::Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for &lambda in &sgd_lambdas {
        for &learning_rate in &rates {
            let hp = SvmHyperparams {
                lambda,
                learning_rate,
                iterations,
            };
            let mut runs = Vec::new();
            for (split, &seed) in splits.iter().zip(&seeds) {
                let run = svm::sgd_train(split, &hp, seed)?;
                let acc = accuracies(&run.model, split)?;
                runs.push((run, acc));
            }
            rows.push(SvmRow {
                trainer: "sgd",
                config: format!("lambda={lambda};alpha={learning_rate}"),
                runs,
            });
        }
    }
    for &lambda in &mmo_lambdas {
        for &scheme in &schemes {
            for &frequency in &frequencies {
                let mut runs = Vec::new();
                for (split, &seed) in splits.iter().zip(&seeds) {
                    let cfg = MmoConfig {
                        scheme,
                        frequency,
                        seed,
                        ..base.clone()
                    };
                    let run = svm::mmo_train(split, lambda, &cfg)?;
                    let acc = accuracies(&run.model, split)?;
                    runs.push((run, acc));
                }
                rows.push(SvmRow {
                    trainer: "mmo",
                    config: format!("lambda={lambda};f={frequency};scheme={scheme}"),
                    runs,
                });
            }
        }
    }

    let mut table = Csv::new(&["dataset", "trainer", "config", "loss", "train_acc", "valid_acc", "test_acc"]);
    for row in &rows {
        let n = row.runs.len() as f64;
        let loss = row.runs.iter().map(|(t, _)| t.final_loss()).sum::<f64>() / n;
        let mean_acc = |i: usize| row.runs.iter().map(|(_, a)| a[i]).sum::<f64>() / n;
        table.row(&[
            format.to_string(),
            row.trainer.to_string(),
            row.config.clone(),
            g6(loss),
            g6(mean_acc(0)),
            g6(mean_acc(1)),
            g6(mean_acc(2)),
        ]);
        for ((run, _), seed) in row.runs.iter().zip(&seeds) {
            let name = format!("{}-{}-seed{seed}", row.trainer, row.config.replace(';', "-"));
            dir.trajectory(
                &name,
                ["iteration", "loss"],
                run.trajectory.iter().enumerate().map(|(i, &l)| (i as u64, l)),
            )?;
        }
    }
    dir.results(table)
}

enum Target {
    Benchmark(BenchmarkSpec),
    External(ExternalObjective),
}

fn optional_f64(r: &Resolved, key: &str) -> Result<Option<f64>, UsageError> {
    if r.raw(key).is_empty() {
        Ok(None)
    } else {
        r.get(key).map(Some)
    }
}

pub fn optimize(r: &Resolved, dir: &RunDir) -> Result<()> {
    let cfg = base_config(r)?;
    let dim: usize = r.get("dim")?;
    let lower = optional_f64(r, "lower")?;
    let upper = optional_f64(r, "upper")?;
    let objective = match (r.raw("benchmark"), r.raw("evaluator")) {
        ("", "") => return Err(UsageError("optimize needs --benchmark or --evaluator".into()).into()),
        (b, e) if !b.is_empty() && !e.is_empty() => {
            return Err(UsageError("--benchmark and --evaluator are mutually exclusive".into()).into())
        }
        (name, "") => {
            let kind: BenchmarkKind = name.parse().map_err(|e: mmo_core::Error| UsageError(e.to_string()))?;
            let (lo, hi) = kind.default_interval();
            let spec = BenchmarkSpec::with_interval(kind, dim, lower.unwrap_or(lo), upper.unwrap_or(hi))
                .map_err(|e| UsageError(e.to_string()))?;
            Target::Benchmark(spec)
        }
        (_, command) => {
            let (Some(lo), Some(hi)) = (lower, upper) else {
                return Err(UsageError("--evaluator needs --lower and --upper".into()).into());
            };
            let bounds = Bounds::uniform(dim, lo, hi).map_err(|e| UsageError(e.to_string()))?;
            Target::External(ExternalObjective::spawn(command, bounds)?)
        }
    };
    let start = Instant::now();
    let result = match &objective {
        Target::Benchmark(spec) => run_mmo(&cfg, spec),
        Target::External(ext) => {
            let result = run_mmo(&cfg, ext);
            if let Some(message) = ext.failure() {
                bail!("evaluator failed: {message}");
            }
            result
        }
    };
    let wall_time = start.elapsed().as_secs_f64();
    let result = result?;

    let mut table = Csv::new(&["name", "value"]);
    table.row(&["fitness".into(), result.best.fitness.to_string()]);
    table.row(&["evaluations".into(), result.evaluation_count.to_string()]);
    for (i, x) in result.best.position.iter().enumerate() {
        table.row(&[format!("x{}", i + 1), x.to_string()]);
    }
    dir.results(table)?;
    dir.trajectory("archive", ["generation", "best_fitness"], result.trajectory.iter().copied())?;
    let summary = json!({
        "best_position": result.best.position.as_slice(),
        "fitness": result.best.fitness,
        "evaluations": result.evaluation_count,
        "wall_time": wall_time,
    });
    println!("{summary}");
    Ok(())
}
