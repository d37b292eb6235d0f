//! TOML configuration for the command-line front end.
//!
//! Key names are validated strictly: unknown keys anywhere in the file
//! are rejected with the offending key path. A minimal configuration is
//! a `[model]` section plus `run.t` and `run.seed`; everything else has
//! defaults. See the README for the full key reference.

use crate::engine::{Characteristic, SimulationConfig, DEFAULT_EDGE_CAP, DEFAULT_WINDOW};
use crate::model::{LifetimeOffspringModel, ModelError, OffspringLaw};
use crate::piecewise::{PiecewiseError, PiecewiseLinear};
use crate::stats::{AnalysisOptions, LaplacePair};
use std::path::{Path, PathBuf};
use thiserror::Error;
use toml::{Table, Value};

pub const DEFAULT_REPLICATES: u64 = 2000;
pub const DEFAULT_SLOPE_HORIZONS: [f64; 3] = [6.0, 10.0, 14.0];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Syntax error; the message carries line and column.
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("config key `{key}`: {reason}")]
    Validation { key: String, reason: String },
}

impl ConfigError {
    fn bad(key: impl Into<String>, reason: impl Into<String>) -> Self {
        ConfigError::Validation {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

/// Simulation-run settings (`[run]`).
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub horizon: f64,
    pub seed: u64,
    pub window: f64,
    pub cap: u64,
    pub replicates: u64,
    pub record_atoms: bool,
}

/// Analysis settings (`[analysis]`).
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub options: AnalysisOptions,
    pub slope_horizons: Vec<f64>,
}

/// Output locations (`[output]`).
#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub report: String,
    pub atoms: String,
    pub maxima: String,
}

/// A fully validated configuration.
#[derive(Debug, Clone)]
pub struct Config {
    pub model: LifetimeOffspringModel,
    pub run: RunSettings,
    pub analysis: AnalysisSettings,
    pub output: OutputSettings,
}

impl Config {
    pub fn simulation_config(&self) -> SimulationConfig {
        SimulationConfig {
            horizon: self.run.horizon,
            window: self.run.window,
            edge_cap: self.run.cap,
            seed: self.run.seed,
            record_atoms: self.run.record_atoms,
        }
    }
}

pub fn parse_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<Config, ConfigError> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    check_known(&root, "", &["model", "run", "analysis", "output"])?;

    let model = parse_model(required_table(&root, "model")?)?;
    let run = parse_run(required_table(&root, "run")?)?;
    let analysis = match optional_table(&root, "analysis")? {
        Some(t) => parse_analysis(t, run.window)?,
        None => AnalysisSettings {
            options: AnalysisOptions::default(),
            slope_horizons: DEFAULT_SLOPE_HORIZONS.to_vec(),
        },
    };
    let output = match optional_table(&root, "output")? {
        Some(t) => parse_output(t)?,
        None => default_output(),
    };
    Ok(Config {
        model,
        run,
        analysis,
        output,
    })
}

fn default_output() -> OutputSettings {
    OutputSettings {
        dir: PathBuf::from("."),
        report: "report.json".into(),
        atoms: "atoms.csv".into(),
        maxima: "maxima.csv".into(),
    }
}

fn check_known(table: &Table, path: &str, allowed: &[&str]) -> Result<(), ConfigError> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            let full = if path.is_empty() {
                key.clone()
            } else {
                format!("{path}.{key}")
            };
            return Err(ConfigError::bad(full, "unknown key"));
        }
    }
    Ok(())
}

fn required_table<'a>(root: &'a Table, key: &str) -> Result<&'a Table, ConfigError> {
    match root.get(key) {
        Some(Value::Table(t)) => Ok(t),
        Some(_) => Err(ConfigError::bad(key, "expected a table")),
        None => Err(ConfigError::bad(key, "missing required section")),
    }
}

fn optional_table<'a>(root: &'a Table, key: &str) -> Result<Option<&'a Table>, ConfigError> {
    match root.get(key) {
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(ConfigError::bad(key, "expected a table")),
        None => Ok(None),
    }
}

fn get_f64(table: &Table, path: &str, key: &str) -> Result<Option<f64>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Float(f)) => Ok(Some(*f)),
        Some(Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(_) => Err(ConfigError::bad(
            format!("{path}.{key}"),
            "expected a number",
        )),
    }
}

fn need_f64(table: &Table, path: &str, key: &str) -> Result<f64, ConfigError> {
    get_f64(table, path, key)?
        .ok_or_else(|| ConfigError::bad(format!("{path}.{key}"), "missing required key"))
}

fn get_u64(table: &Table, path: &str, key: &str) -> Result<Option<u64>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
        Some(_) => Err(ConfigError::bad(
            format!("{path}.{key}"),
            "expected a nonnegative integer",
        )),
    }
}

fn get_bool(table: &Table, path: &str, key: &str) -> Result<Option<bool>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Boolean(b)) => Ok(Some(*b)),
        Some(_) => Err(ConfigError::bad(
            format!("{path}.{key}"),
            "expected a boolean",
        )),
    }
}

fn get_str<'a>(table: &'a Table, path: &str, key: &str) -> Result<Option<&'a str>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(_) => Err(ConfigError::bad(
            format!("{path}.{key}"),
            "expected a string",
        )),
    }
}

fn get_f64_array(table: &Table, path: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
    let Some(value) = table.get(key) else {
        return Ok(None);
    };
    let Value::Array(items) = value else {
        return Err(ConfigError::bad(
            format!("{path}.{key}"),
            "expected an array of numbers",
        ));
    };
    let mut out = Vec::with_capacity(items.len());
    for item in items {
        match item {
            Value::Float(f) => out.push(*f),
            Value::Integer(i) => out.push(*i as f64),
            _ => {
                return Err(ConfigError::bad(
                    format!("{path}.{key}"),
                    "expected an array of numbers",
                ))
            }
        }
    }
    Ok(Some(out))
}

fn model_err(err: ModelError) -> ConfigError {
    ConfigError::bad("model", err.to_string())
}

fn parse_offspring(table: &Table, path: &str) -> Result<OffspringLaw, ConfigError> {
    check_known(table, path, &["kind", "k", "p0", "mean"])?;
    let kind = get_str(table, path, "kind")?
        .ok_or_else(|| ConfigError::bad(format!("{path}.kind"), "missing required key"))?;
    match kind {
        "constant" => {
            let k = get_u64(table, path, "k")?
                .ok_or_else(|| ConfigError::bad(format!("{path}.k"), "missing required key"))?;
            Ok(OffspringLaw::Constant { k: k as u32 })
        }
        "two-point" => {
            let p0 = need_f64(table, path, "p0")?;
            let k = get_u64(table, path, "k")?
                .ok_or_else(|| ConfigError::bad(format!("{path}.k"), "missing required key"))?;
            Ok(OffspringLaw::TwoPoint { p0, k: k as u32 })
        }
        "geometric" => Ok(OffspringLaw::Geometric {
            mean: need_f64(table, path, "mean")?,
        }),
        other => Err(ConfigError::bad(
            format!("{path}.kind"),
            format!("unknown offspring kind `{other}` (constant, two-point, geometric)"),
        )),
    }
}

fn parse_model(table: &Table) -> Result<LifetimeOffspringModel, ConfigError> {
    let family = get_str(table, "model", "family")?
        .ok_or_else(|| ConfigError::bad("model.family", "missing required key"))?;
    let offspring = |key: &str| -> Result<OffspringLaw, ConfigError> {
        match table.get("offspring") {
            Some(Value::Table(t)) => parse_offspring(t, "model.offspring"),
            Some(_) => Err(ConfigError::bad("model.offspring", "expected a table")),
            None => Err(ConfigError::bad(key, "missing required key")),
        }
    };
    let model = match family {
        "exp" => {
            check_known(table, "model", &["family", "rate", "offspring", "label"])?;
            let rate = need_f64(table, "model", "rate")?;
            LifetimeOffspringModel::exp_lifetime(rate, offspring("model.offspring")?)
                .map_err(model_err)?
        }
        "pareto" => {
            check_known(table, "model", &["family", "shape", "offspring", "label"])?;
            let shape = need_f64(table, "model", "shape")?;
            LifetimeOffspringModel::pareto_lifetime(shape, offspring("model.offspring")?)
                .map_err(model_err)?
        }
        "correlated-poisson" => {
            check_known(table, "model", &["family", "rate", "gamma", "label"])?;
            let rate = need_f64(table, "model", "rate")?;
            let gamma = need_f64(table, "model", "gamma")?;
            LifetimeOffspringModel::correlated_poisson(rate, gamma).map_err(model_err)?
        }
        "fixed" => {
            check_known(
                table,
                "model",
                &["family", "lifetime", "offspring", "label"],
            )?;
            let lifetime = need_f64(table, "model", "lifetime")?;
            LifetimeOffspringModel::fixed_lifetime(lifetime, offspring("model.offspring")?)
                .map_err(model_err)?
        }
        other => {
            return Err(ConfigError::bad(
                "model.family",
                format!("unknown family `{other}` (exp, pareto, correlated-poisson, fixed)"),
            ))
        }
    };
    Ok(match get_str(table, "model", "label")? {
        Some(label) => model.with_label(label),
        None => model,
    })
}

fn parse_run(table: &Table) -> Result<RunSettings, ConfigError> {
    check_known(
        table,
        "run",
        &["t", "seed", "window", "cap", "replicates", "record_atoms"],
    )?;
    let horizon = need_f64(table, "run", "t")?;
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(ConfigError::bad("run.t", "horizon must be positive"));
    }
    let seed = get_u64(table, "run", "seed")?
        .ok_or_else(|| ConfigError::bad("run.seed", "missing required key"))?;
    let window = get_f64(table, "run", "window")?.unwrap_or(DEFAULT_WINDOW);
    if !window.is_finite() || window <= 0.0 {
        return Err(ConfigError::bad("run.window", "window must be positive"));
    }
    let cap = get_u64(table, "run", "cap")?.unwrap_or(DEFAULT_EDGE_CAP);
    if cap == 0 {
        return Err(ConfigError::bad("run.cap", "cap must be at least 1"));
    }
    Ok(RunSettings {
        horizon,
        seed,
        window,
        cap,
        replicates: get_u64(table, "run", "replicates")?.unwrap_or(DEFAULT_REPLICATES),
        record_atoms: get_bool(table, "run", "record_atoms")?.unwrap_or(true),
    })
}

fn knots_from(value: &Value, key: &str) -> Result<PiecewiseLinear, ConfigError> {
    let Value::Array(items) = value else {
        return Err(ConfigError::bad(key, "expected an array of [x, y] pairs"));
    };
    let mut knots = Vec::with_capacity(items.len());
    for item in items {
        let Value::Array(pair) = item else {
            return Err(ConfigError::bad(key, "expected [x, y] pairs"));
        };
        if pair.len() != 2 {
            return Err(ConfigError::bad(key, "expected [x, y] pairs"));
        }
        let num = |v: &Value| match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        };
        match (num(&pair[0]), num(&pair[1])) {
            (Some(x), Some(y)) => knots.push((x, y)),
            _ => return Err(ConfigError::bad(key, "expected numeric [x, y] pairs")),
        }
    }
    PiecewiseLinear::new(knots).map_err(|e: PiecewiseError| ConfigError::bad(key, e.to_string()))
}

fn parse_analysis(table: &Table, _window: f64) -> Result<AnalysisSettings, ConfigError> {
    check_known(
        table,
        "analysis",
        &["grid", "slope_horizons", "laplace", "census"],
    )?;
    let defaults = AnalysisOptions::default();

    let grid = match get_f64_array(table, "analysis", "grid")? {
        Some(g) => {
            if g.is_empty() || g.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ConfigError::bad(
                    "analysis.grid",
                    "must be nonempty and increasing",
                ));
            }
            g
        }
        None => defaults.grid.clone(),
    };
    let slope_horizons = match get_f64_array(table, "analysis", "slope_horizons")? {
        Some(h) => {
            if h.iter().any(|&t| t <= 0.0) {
                return Err(ConfigError::bad(
                    "analysis.slope_horizons",
                    "must be positive",
                ));
            }
            h
        }
        None => DEFAULT_SLOPE_HORIZONS.to_vec(),
    };

    let laplace_pairs = match table.get("laplace") {
        None => defaults.laplace_pairs.clone(),
        Some(Value::Array(entries)) => {
            let mut pairs = Vec::with_capacity(entries.len());
            for (i, entry) in entries.iter().enumerate() {
                let path = format!("analysis.laplace[{i}]");
                let Value::Table(t) = entry else {
                    return Err(ConfigError::bad(path, "expected a table"));
                };
                check_known(t, &path, &["label", "phi", "psi"])?;
                let label = get_str(t, &path, "label")?.unwrap_or("pair").to_string();
                let phi = match t.get("phi") {
                    Some(v) => knots_from(v, &format!("{path}.phi"))?,
                    None => PiecewiseLinear::zero(),
                };
                let psi = match t.get("psi") {
                    Some(v) => knots_from(v, &format!("{path}.psi"))?,
                    None => PiecewiseLinear::zero(),
                };
                pairs.push(LaplacePair { label, phi, psi });
            }
            pairs
        }
        Some(_) => {
            return Err(ConfigError::bad(
                "analysis.laplace",
                "expected an array of tables",
            ))
        }
    };

    let characteristics = match table.get("census") {
        None => defaults.characteristics.clone(),
        Some(Value::Array(entries)) => {
            let mut chars = Vec::with_capacity(entries.len());
            for (i, entry) in entries.iter().enumerate() {
                let path = format!("analysis.census[{i}]");
                let Value::Table(t) = entry else {
                    return Err(ConfigError::bad(path, "expected a table"));
                };
                check_known(t, &path, &["label", "knots"])?;
                let label = get_str(t, &path, "label")?
                    .ok_or_else(|| ConfigError::bad(format!("{path}.label"), "missing"))?
                    .to_string();
                let weight = match t.get("knots") {
                    Some(v) => knots_from(v, &format!("{path}.knots"))?,
                    None => return Err(ConfigError::bad(format!("{path}.knots"), "missing")),
                };
                chars.push(Characteristic::new(label, weight));
            }
            chars
        }
        Some(_) => {
            return Err(ConfigError::bad(
                "analysis.census",
                "expected an array of tables",
            ))
        }
    };

    Ok(AnalysisSettings {
        options: AnalysisOptions {
            grid,
            laplace_pairs,
            characteristics,
        },
        slope_horizons,
    })
}

fn parse_output(table: &Table) -> Result<OutputSettings, ConfigError> {
    check_known(table, "output", &["dir", "report", "atoms", "maxima"])?;
    let d = default_output();
    Ok(OutputSettings {
        dir: get_str(table, "output", "dir")?
            .map(PathBuf::from)
            .unwrap_or(d.dir),
        report: get_str(table, "output", "report")?
            .map(String::from)
            .unwrap_or(d.report),
        atoms: get_str(table, "output", "atoms")?
            .map(String::from)
            .unwrap_or(d.atoms),
        maxima: get_str(table, "output", "maxima")?
            .map(String::from)
            .unwrap_or(d.maxima),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [model]
        family = "exp"
        rate = 1.0
        [model.offspring]
        kind = "constant"
        k = 2
        [run]
        t = 10.0
        seed = 42
    "#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config_str(MINIMAL).unwrap();
        assert_eq!(cfg.run.window, DEFAULT_WINDOW);
        assert_eq!(cfg.run.cap, DEFAULT_EDGE_CAP);
        assert_eq!(cfg.run.replicates, DEFAULT_REPLICATES);
        assert!(cfg.run.record_atoms);
        assert_eq!(
            cfg.analysis.options.grid,
            vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0]
        );
        assert_eq!(cfg.analysis.slope_horizons, vec![6.0, 10.0, 14.0]);
        assert_eq!(cfg.analysis.options.laplace_pairs.len(), 3);
        assert_eq!(cfg.analysis.options.characteristics.len(), 2);
        assert_eq!(cfg.output.report, "report.json");
        assert_eq!(cfg.model.label(), "exp(rate=1)/constant(k=2)");
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_path() {
        let text = MINIMAL.replace("[model]", "[modle]");
        match parse_config_str(&text).unwrap_err() {
            ConfigError::Validation { key, .. } => assert_eq!(key, "modle"),
            other => panic!("unexpected {other:?}"),
        }
        let text = format!("{MINIMAL}\n[run.extra]\nx = 1\n");
        assert!(matches!(
            parse_config_str(&text),
            Err(ConfigError::Validation { .. })
        ));
        let text = MINIMAL.replace("seed = 42", "seed = 42\nsede = 3");
        match parse_config_str(&text).unwrap_err() {
            ConfigError::Validation { key, .. } => assert_eq!(key, "run.sede"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_config_str("[model\nfamily = 3").unwrap_err();
        match err {
            ConfigError::Parse(msg) => assert!(msg.contains("line 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn heavy_tail_with_small_shape_is_accepted() {
        let text = r#"
            [model]
            family = "pareto"
            shape = 0.5
            [model.offspring]
            kind = "geometric"
            mean = 1.5
            [run]
            t = 5.0
            seed = 1
        "#;
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.model.tail_exponent(), 0.0);
    }

    #[test]
    fn subcritical_model_is_rejected() {
        let text = MINIMAL.replace("k = 2", "k = 1");
        match parse_config_str(&text).unwrap_err() {
            ConfigError::Validation { key, reason } => {
                assert_eq!(key, "model");
                assert!(reason.contains("supercriticality"), "{reason}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn full_config_round_trip() {
        let text = r#"
            [model]
            family = "correlated-poisson"
            rate = 1.0
            gamma = 2.0
            label = "my-model"

            [run]
            t = 8.0
            seed = 7
            window = 2.5
            cap = 100000
            replicates = 500
            record_atoms = false

            [analysis]
            grid = [-1.0, 0.0, 1.0]
            slope_horizons = [4.0, 8.0]

            [[analysis.laplace]]
            label = "custom"
            phi = [[0.0, 0.0], [2.0, 1.5]]
            psi = [[0.0, 0.0]]

            [[analysis.census]]
            label = "alive"
            knots = [[0.0, 1.0]]

            [output]
            dir = "out"
            report = "r.json"
            atoms = "a.csv"
            maxima = "m.csv"
        "#;
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.model.label(), "my-model");
        assert_eq!(cfg.run.replicates, 500);
        assert!(!cfg.run.record_atoms);
        assert_eq!(cfg.analysis.options.laplace_pairs.len(), 1);
        assert_eq!(cfg.analysis.options.laplace_pairs[0].label, "custom");
        assert_eq!(cfg.analysis.options.characteristics.len(), 1);
        assert_eq!(cfg.output.dir, PathBuf::from("out"));
        let sim = cfg.simulation_config();
        assert_eq!(sim.edge_cap, 100000);
        assert_eq!(sim.window, 2.5);
    }

    #[test]
    fn seeds_must_be_nonnegative_integers() {
        let text = MINIMAL.replace("seed = 42", "seed = -1");
        assert!(matches!(
            parse_config_str(&text),
            Err(ConfigError::Validation { .. })
        ));
    }
}
