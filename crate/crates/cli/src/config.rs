use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use clap::{Arg, ArgMatches, Command};

use mmo_core::OptimizerParams;

use crate::UsageError;

/// One configurable setting of a subcommand, available both as `--key` and
/// as a `key = value` line in a config file.
#[derive(Debug, Clone)]
pub struct Setting {
    pub key: String,
    pub default: String,
    pub help: String,
}

fn setting(key: &str, default: &str, help: &str) -> Setting {
    Setting {
        key: key.into(),
        default: default.into(),
        help: help.into(),
    }
}

const ALL_OPTIMIZERS: &str = "pso,psolevy,de,bat,batlevy,cs,fp";

fn common() -> Vec<Setting> {
    vec![
        setting("seed", "0", "Base seed; trial r uses seed + r"),
        setting("out", "results", "Root output directory"),
        setting("name", "", "Run directory name (default: UTC timestamp)"),
        setting("execution", "parallel", "parallel or sequential optimizer stepping"),
    ]
}

fn ensemble(scheme: &str, frequency: &str, generations: &str) -> Vec<Setting> {
    vec![
        setting("roster", ALL_OPTIMIZERS, "Comma-separated optimizers in the ensemble"),
        setting("agents", "100", "Population size of every optimizer"),
        setting("scheme", scheme, "Communication scheme: averaging, rank, exponential, best or meta"),
        setting("frequency", frequency, "Generations between communication events"),
        setting("generations", generations, "Generations per run"),
    ]
}

fn optimizer_params() -> Vec<Setting> {
    OptimizerParams::default()
        .entries()
        .into_iter()
        .map(|(key, value)| Setting {
            key: key.into(),
            default: value.to_string(),
            help: format!("Optimizer parameter {key}"),
        })
        .collect()
}

fn benchmark(name: &str, dim: &str) -> Vec<Setting> {
    vec![
        setting("benchmark", name, "Benchmark: rosenbrock, griewank or zakharov"),
        setting("dim", dim, "Problem dimension"),
    ]
}

/// The subcommands and their settings, in the order they are written to
/// `resolved-config`.
pub fn subcommands() -> Vec<(&'static str, &'static str, Vec<Setting>)> {
    let mut single = benchmark("rosenbrock", "15");
    single.extend([
        setting("optimizers", ALL_OPTIMIZERS, "Comma-separated optimizers to run standalone"),
        setting("agents", "20,50,100", "Comma-separated population sizes"),
        setting("generations", "2000", "Generations per run"),
        setting("trials", "10", "Independent seeds per cell"),
    ]);

    let mut mmo = benchmark("rosenbrock", "15");
    mmo.extend([
        setting("roster", ALL_OPTIMIZERS, "Comma-separated optimizers in the ensemble"),
        setting("agents", "100", "Population size of every optimizer"),
        setting("schemes", "rank,exponential,best", "Comma-separated communication schemes"),
        setting("frequencies", "1,10,50,500,1000,2000", "Comma-separated communication frequencies"),
        setting("generations", "2000", "Generations per run"),
        setting("trials", "10", "Independent seeds per cell"),
    ]);

    let mut ablation = benchmark("rosenbrock", "15");
    ablation.extend(ensemble("exponential", "1", "2000"));
    ablation.push(setting("trials", "10", "Independent seeds per row"));

    let cross = vec![
        setting("benchmark", "rosenbrock", "Benchmark: rosenbrock, griewank or zakharov"),
        setting("dims", "5,10,15,25", "Comma-separated dimensions"),
        setting(
            "generations",
            "2000,2000,2000,4000",
            "Comma-separated generation budgets, one per dimension",
        ),
        setting("agents", "100", "Population size of every optimizer"),
        setting("scheme", "exponential", "Communication scheme of the ensemble"),
        setting("frequency", "1", "Generations between communication events"),
        setting("trials", "10", "Independent seeds per cell"),
    ];

    let svm = vec![
        setting("dataset", "bcw", "Dataset layout: bcw or image_segmentation"),
        setting("data", "", "Dataset file (default: data/ file for the layout)"),
        setting("iterations", "1000", "SGD epochs and MMO generations"),
        setting("sgd-lambdas", "0,0.01", "Comma-separated SGD regularization strengths"),
        setting("learning-rates", "0.01,0.001", "Comma-separated SGD learning rates"),
        setting("mmo-lambdas", "0", "Comma-separated MMO regularization strengths"),
        setting("schemes", "best", "Comma-separated MMO communication schemes"),
        setting("frequencies", "1,100", "Comma-separated MMO communication frequencies"),
        setting("roster", ALL_OPTIMIZERS, "Comma-separated optimizers in the ensemble"),
        setting("agents", "100", "Population size of every optimizer"),
        setting("trials", "1", "Seeds per configuration (split, SGD order and MMO)"),
    ];

    let mut optimize = vec![
        setting("benchmark", "", "Named benchmark to minimize"),
        setting(
            "evaluator",
            "",
            "Shell command reading one point per line on stdin and writing its fitness",
        ),
        setting("dim", "15", "Problem dimension"),
        setting("lower", "", "Lower bound of every coordinate (default: benchmark interval)"),
        setting("upper", "", "Upper bound of every coordinate (default: benchmark interval)"),
    ];
    optimize.extend(ensemble("exponential", "1", "2000"));

    let with_tail = |mut v: Vec<Setting>| {
        v.extend(optimizer_params());
        v.extend(common());
        v
    };
    vec![
        ("bench-single", "Standalone optimizers across population sizes", with_tail(single)),
        ("bench-mmo", "Ensemble across communication schemes and frequencies", with_tail(mmo)),
        ("ablation", "Ensemble with each optimizer removed in turn", with_tail(ablation)),
        ("cross-dim", "Ensemble against standalone BATLevy across dimensions", with_tail(cross)),
        ("svm", "Linear SVM training with SGD and with the ensemble", with_tail(svm)),
        ("optimize", "Minimize a benchmark or an external objective", with_tail(optimize)),
    ]
}

pub fn command() -> Command {
    let mut cmd = Command::new("mmo")
        .about("Multi-metaheuristic ensemble optimizer")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about, settings) in subcommands() {
        let mut sub = Command::new(name).about(about).arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .help("Config file of `key = value` lines; flags take precedence"),
        );
        for s in settings {
            let help = if s.default.is_empty() {
                s.help.clone()
            } else {
                format!("{} [default: {}]", s.help, s.default)
            };
            sub = sub.arg(Arg::new(s.key.clone()).long(s.key.clone()).value_name("VALUE").allow_hyphen_values(true).help(help));
        }
        cmd = cmd.subcommand(sub);
    }
    cmd
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(usize, String, String)>, UsageError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected `key = value`", i + 1)))?;
        out.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Every setting of a subcommand with its final value.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub subcommand: String,
    values: Vec<(String, String)>,
}

impl Resolved {
    /// Defaults, overridden by the config file, overridden by flags.
    pub fn from_matches(subcommand: &str, matches: &ArgMatches) -> Result<Self, UsageError> {
        let (_, _, settings) = subcommands()
            .into_iter()
            .find(|(n, _, _)| *n == subcommand)
            .ok_or_else(|| UsageError(format!("unknown subcommand '{subcommand}'")))?;
        let mut values: Vec<(String, String)> =
            settings.iter().map(|s| (s.key.clone(), s.default.clone())).collect();
        if let Some(path) = matches.get_one::<String>("config") {
            let text = std::fs::read_to_string(Path::new(path))
                .map_err(|e| UsageError(format!("cannot read config file {path}: {e}")))?;
            for (line, key, value) in parse_config_text(&text)? {
                let slot = values
                    .iter_mut()
                    .find(|(k, _)| *k == key)
                    .ok_or_else(|| UsageError(format!("{path}:{line}: unknown key '{key}' for {subcommand}")))?;
                slot.1 = value;
            }
        }
        for (key, value) in &mut values {
            if let Some(v) = matches.get_one::<String>(key) {
                *value = v.clone();
            }
        }
        Ok(Self {
            subcommand: subcommand.to_string(),
            values,
        })
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .unwrap_or_else(|| panic!("setting '{key}' is not declared for {}", self.subcommand))
    }

    pub fn set(&mut self, key: &str, value: String) {
        if let Some(slot) = self.values.iter_mut().find(|(k, _)| k == key) {
            slot.1 = value;
        }
    }

    pub fn get<T>(&self, key: &str) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        parse_value(key, self.raw(key))
    }

    pub fn list<T>(&self, key: &str) -> Result<Vec<T>, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.raw(key);
        let items: Vec<T> = raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| parse_value(key, s))
            .collect::<Result<_, _>>()?;
        if items.is_empty() {
            return Err(UsageError(format!("'{key}' needs at least one value")));
        }
        Ok(items)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.iter().any(|(k, _)| k == key)
    }

    /// Optimizer parameters; only the `group.name` keys are consulted.
    pub fn optimizer_params(&self) -> Result<OptimizerParams, UsageError> {
        let mut params = OptimizerParams::default();
        for (key, _) in OptimizerParams::default().entries() {
            let value: f64 = self.get(key)?;
            params.set(key, value).map_err(|e| UsageError(e.to_string()))?;
        }
        Ok(params)
    }

    /// Text of the `resolved-config` file; feeding it back through
    /// `--config` reproduces the run.
    pub fn render(&self) -> String {
        let mut out = format!("# mmo {}\n", self.subcommand);
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

fn parse_value<T>(key: &str, raw: &str) -> Result<T, UsageError>
where
    T: FromStr,
    T::Err: Display,
{
    raw.trim()
        .parse()
        .map_err(|e| UsageError(format!("invalid value '{raw}' for '{key}': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(args: &[&str]) -> Result<Resolved, UsageError> {
        let matches = command().try_get_matches_from(args).unwrap();
        let (name, sub) = matches.subcommand().unwrap();
        Resolved::from_matches(name, sub)
    }

    #[test]
    fn config_text_parses_comments_and_blank_lines() {
        let parsed = parse_config_text("# header\n\nseed = 4 # trailing\n dim=7\n").unwrap();
        assert_eq!(
            parsed,
            vec![(3, "seed".to_string(), "4".to_string()), (4, "dim".to_string(), "7".to_string())]
        );
        assert!(parse_config_text("seed 4\n").is_err());
    }

    #[test]
    fn defaults_are_materialized() {
        let r = resolve(&["mmo", "bench-mmo"]).unwrap();
        assert_eq!(r.raw("frequencies"), "1,10,50,500,1000,2000");
        assert_eq!(r.get::<u64>("seed").unwrap(), 0);
        assert_eq!(r.raw("pso.alpha"), "2");
        assert!(r.render().contains("schemes = rank,exponential,best\n"));
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        std::fs::write(&path, "seed = 5\ndim = 3\n").unwrap();
        let p = path.to_str().unwrap();
        let r = resolve(&["mmo", "ablation", "--config", p, "--dim", "9"]).unwrap();
        assert_eq!(r.raw("seed"), "5");
        assert_eq!(r.raw("dim"), "9");
    }

    #[test]
    fn unknown_config_key_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.conf");
        std::fs::write(&path, "bogus = 1\n").unwrap();
        assert!(resolve(&["mmo", "ablation", "--config", path.to_str().unwrap()]).is_err());
    }

    #[test]
    fn dotted_parameter_flags_are_accepted() {
        let r = resolve(&["mmo", "optimize", "--benchmark", "zakharov", "--de.crossover_rate", "0.5"]).unwrap();
        assert_eq!(r.optimizer_params().unwrap().de.crossover_rate, 0.5);
    }

    #[test]
    fn lists_reject_bad_items() {
        let r = resolve(&["mmo", "bench-single", "--agents", "20,x"]).unwrap();
        assert!(r.list::<usize>("agents").is_err());
        let r = resolve(&["mmo", "bench-single", "--agents", "20, 50"]).unwrap();
        assert_eq!(r.list::<usize>("agents").unwrap(), vec![20, 50]);
    }
}
