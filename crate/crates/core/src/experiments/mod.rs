//! Named experiments behind a common trait, looked up by subcommand name.

mod finite_speed;
mod gronwall;
mod incompressible;
pub mod lemma;
mod simulate;
mod weak_strong;

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};

pub use finite_speed::FiniteSpeed;
pub use gronwall::Gronwall;
pub use incompressible::Incompressible;
pub use lemma::{Constant, LemmaSweep};
pub use simulate::Simulate;
pub use weak_strong::WeakStrong;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

impl Criterion {
    /// Passes when `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= bound,
            value,
            bound,
        }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= bound,
            value,
            bound,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            value: if passed { 1.0 } else { 0.0 },
            bound: 1.0,
        }
    }
}

/// What an experiment produced: pass/fail criteria, report files keyed by
/// file name, and free-form values for the summary.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub criteria: Vec<Criterion>,
    pub files: Vec<(String, String)>,
    pub values: Map<String, Value>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn criterion(&self, name: &str) -> Option<&Criterion> {
        self.criteria.iter().find(|c| c.name == name)
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_f64)
    }

    pub(crate) fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.values.insert(key.to_string(), v.into());
    }

    pub(crate) fn file(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn run(&self, cfg: &ExperimentConfig) -> Result<Report>;
}

pub struct Registry {
    entries: Vec<Box<dyn Experiment>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Constant));
        r.register(Box::new(Simulate));
        r.register(Box::new(WeakStrong));
        r.register(Box::new(FiniteSpeed));
        r.register(Box::new(Gronwall));
        r.register(Box::new(Incompressible));
        r.register(Box::new(LemmaSweep));
        r
    }

    /// Replaces any entry with the same name.
    pub fn register(&mut self, e: Box<dyn Experiment>) {
        self.entries.retain(|x| x.name() != e.name());
        self.entries.push(e);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Experiment> {
        self.entries.iter().find(|e| e.name() == name).map(|e| e.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn run(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let e = self
            .get(&cfg.experiment)
            .ok_or_else(|| LabError::Config(format!("no experiment named '{}'", cfg.experiment)))?;
        e.run(cfg)
    }
}

/// Shipped configurations, by experiment name.
pub fn shipped_config(name: &str) -> Option<&'static str> {
    Some(match name {
        "constant" => include_str!("../../configs/constant.toml"),
        "simulate" => include_str!("../../configs/simulate.toml"),
        "weak-strong" => include_str!("../../configs/weak-strong.toml"),
        "finite-speed" => include_str!("../../configs/finite-speed.toml"),
        "gronwall" => include_str!("../../configs/gronwall.toml"),
        "incompressible" => include_str!("../../configs/incompressible.toml"),
        "lemma-sweep" => include_str!("../../configs/lemma-sweep.toml"),
        _ => return None,
    })
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

pub fn exit_code(outcome: &Result<Report>) -> i32 {
    match outcome {
        Ok(r) if r.passed() => EXIT_PASS,
        Ok(_) => EXIT_FAIL,
        Err(LabError::Blowup { .. }) => EXIT_BLOWUP,
        Err(_) => EXIT_CONFIG,
    }
}

/// Runs the configured experiment and writes its report files plus
/// `summary.json` into `out`.
pub fn run_to_dir(registry: &Registry, cfg: &ExperimentConfig, out: &Path) -> Result<Report> {
    let start = Instant::now();
    let report = registry.run(cfg)?;
    let wall = start.elapsed().as_secs_f64();
    fs::create_dir_all(out)?;
    for (name, contents) in &report.files {
        fs::write(out.join(name), contents)?;
    }
    let params = serde_json::to_value(cfg).unwrap_or(Value::Null);
    let summary = json!({
        "experiment": cfg.experiment,
        "parameters": params,
        "criteria": report.criteria,
        "passed": report.passed(),
        "values": report.values,
        "wall_time_s": wall,
    });
    let text = serde_json::to_string_pretty(&summary).map_err(|e| LabError::Io(e.to_string()))?;
    fs::write(out.join("summary.json"), text + "\n")?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dummy(bool);

    impl Experiment for Dummy {
        fn name(&self) -> &'static str {
            "constant"
        }
        fn summary(&self) -> &'static str {
            "stand-in"
        }
        fn run(&self, _: &ExperimentConfig) -> Result<Report> {
            Ok(Report {
                criteria: vec![Criterion::flag("ok", self.0)],
                ..Report::default()
            })
        }
    }

    #[test]
    fn registry_lists_every_experiment() {
        let r = Registry::builtin();
        let mut names = r.names();
        names.sort_unstable();
        let mut expected = crate::config::EXPERIMENTS.to_vec();
        expected.sort_unstable();
        assert_eq!(names, expected);
        for n in expected {
            let cfg = ExperimentConfig::from_toml(shipped_config(n).unwrap()).unwrap();
            assert_eq!(cfg.experiment, n);
        }
    }

    #[test]
    fn register_replaces_by_name() {
        let mut r = Registry::builtin();
        r.register(Box::new(Dummy(false)));
        assert_eq!(r.names().len(), 7);
        let cfg = ExperimentConfig::from_toml(shipped_config("constant").unwrap()).unwrap();
        let out = r.run(&cfg);
        assert_eq!(exit_code(&out), EXIT_FAIL);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Ok(Report::default())), EXIT_PASS);
        assert_eq!(exit_code(&Err(LabError::Blowup { cell: 3, time: 0.1 })), EXIT_BLOWUP);
        assert_eq!(exit_code(&Err(LabError::Config("x".into()))), EXIT_CONFIG);
    }
}
