//! Command-line front end: `solve`, `simulate`, `ensemble`, `check`.
//!
//! Settings come from a TOML config (`--config`), overridable by flags;
//! the environment variable `BRANCHSCOPE_SEED` overrides the config
//! seed (explicit `--seed` wins over both). Exit codes: 0 success /
//! all criteria pass, 1 criterion failure, 2 usage or config error.

use branchscope::acceptance::{Suite, CRITERIA};
use branchscope::config::{self, Config};
use branchscope::emit;
use branchscope::engine::{self, SimulationConfig, DEFAULT_EDGE_CAP, DEFAULT_WINDOW};
use branchscope::malthus::MalthusProfile;
use branchscope::model::{LifetimeOffspringModel, OffspringLaw};
use branchscope::stats::{self, AnalysisOptions};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

const SEED_ENV: &str = "BRANCHSCOPE_SEED";

#[derive(Parser)]
#[command(
    name = "branchscope",
    version,
    about = "Simulator and analytic toolkit for supercritical branching processes \
             with joint lifetime/offspring laws"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Bound on worker threads for ensemble execution.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct RunOverrides {
    /// Model preset: exp-binary | pareto-heavy | correlated
    /// (overrides the config model).
    #[arg(long, value_name = "PRESET")]
    model: Option<String>,
    /// Horizon t.
    #[arg(long, value_name = "T")]
    t: Option<f64>,
    /// Base seed.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Retention window A for recentred atoms.
    #[arg(long, value_name = "A")]
    window: Option<f64>,
    /// Hard bound on individuals per run.
    #[arg(long, value_name = "N")]
    cap: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Malthusian equation and print the derived constants.
    Solve {
        #[command(flatten)]
        overrides: RunOverrides,
    },
    /// Simulate one tree and print it as JSON.
    Simulate {
        #[command(flatten)]
        overrides: RunOverrides,
    },
    /// Run an ensemble; writes the report JSON and the atom/maxima CSVs.
    Ensemble {
        #[command(flatten)]
        overrides: RunOverrides,
        /// Number of replicates.
        #[arg(long, value_name = "N")]
        replicates: Option<u64>,
        /// Output directory (overrides the config output dir).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria and print PASS/FAIL per criterion.
    Check {
        /// Comma-separated criterion ids to run (default: all).
        #[arg(long, value_delimiter = ',', value_name = "IDS")]
        only: Option<Vec<u32>>,
        /// Test hook: overrides the solved Malthusian parameter in
        /// criterion 1 to demonstrate failure detection.
        #[arg(long, value_name = "ALPHA")]
        inject_alpha: Option<f64>,
        /// List the criteria and exit.
        #[arg(long)]
        list: bool,
    },
}

struct Failure {
    message: String,
    code: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<config::ConfigError> for Failure {
    fn from(e: config::ConfigError) -> Self {
        Failure::usage(e.to_string())
    }
}

fn preset_model(name: &str) -> Result<LifetimeOffspringModel, Failure> {
    let model = match name {
        "exp-binary" => LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }),
        "pareto-heavy" => {
            LifetimeOffspringModel::pareto_lifetime(2.0, OffspringLaw::Geometric { mean: 1.2 })
        }
        "correlated" => LifetimeOffspringModel::correlated_poisson(1.0, 2.0),
        other => {
            return Err(Failure::usage(format!(
                "unknown model preset `{other}` (exp-binary, pareto-heavy, correlated)"
            )))
        }
    };
    model.map_err(|e| Failure::usage(e.to_string()))
}

/// Effective settings after merging config, environment and flags.
struct Effective {
    model: LifetimeOffspringModel,
    sim: SimulationConfig,
    replicates: u64,
    analysis: AnalysisOptions,
    out_dir: PathBuf,
    report_name: String,
    atoms_name: String,
    maxima_name: String,
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse::<u64>()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{SEED_ENV} must be a nonnegative integer"))),
        Err(_) => Ok(None),
    }
}

fn effective(
    config: Option<&Config>,
    overrides: &RunOverrides,
    replicates: Option<u64>,
    out: Option<&PathBuf>,
) -> Result<Effective, Failure> {
    let model = match (&overrides.model, config) {
        (Some(preset), _) => preset_model(preset)?,
        (None, Some(cfg)) => cfg.model.clone(),
        (None, None) => {
            return Err(Failure::usage(
                "no model: pass --model <preset> or --config with a [model] section",
            ))
        }
    };
    let horizon = overrides
        .t
        .or(config.map(|c| c.run.horizon))
        .ok_or_else(|| Failure::usage("no horizon: pass --t or set run.t in the config"))?;
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Failure::usage("horizon must be positive"));
    }
    let seed = match overrides.seed {
        Some(seed) => seed,
        None => match env_seed()? {
            Some(seed) => seed,
            None => config
                .map(|c| c.run.seed)
                .ok_or_else(|| Failure::usage("no seed: pass --seed or set run.seed"))?,
        },
    };
    let window = overrides
        .window
        .or(config.map(|c| c.run.window))
        .unwrap_or(DEFAULT_WINDOW);
    let cap = overrides
        .cap
        .or(config.map(|c| c.run.cap))
        .unwrap_or(DEFAULT_EDGE_CAP);
    if !window.is_finite() || window <= 0.0 || cap == 0 {
        return Err(Failure::usage("window must be positive and cap at least 1"));
    }
    let record_atoms = config.map(|c| c.run.record_atoms).unwrap_or(true);
    let output = config
        .map(|c| c.output.clone())
        .unwrap_or_else(|| config::OutputSettings {
            dir: PathBuf::from("."),
            report: "report.json".into(),
            atoms: "atoms.csv".into(),
            maxima: "maxima.csv".into(),
        });
    Ok(Effective {
        model,
        sim: SimulationConfig {
            horizon,
            window,
            edge_cap: cap,
            seed,
            record_atoms,
        },
        replicates: replicates
            .or(config.map(|c| c.run.replicates))
            .unwrap_or(config::DEFAULT_REPLICATES),
        analysis: config
            .map(|c| c.analysis.options.clone())
            .unwrap_or_default(),
        out_dir: out.cloned().unwrap_or(output.dir),
        report_name: output.report,
        atoms_name: output.atoms,
        maxima_name: output.maxima,
    })
}

fn solve_profile(model: &LifetimeOffspringModel) -> Result<MalthusProfile, Failure> {
    MalthusProfile::solve(model).map_err(|e| Failure::usage(e.to_string()))
}

fn cmd_solve(config: Option<&Config>, overrides: &RunOverrides) -> Result<(), Failure> {
    // `solve` needs no horizon or seed; fill harmless placeholders.
    let mut overrides = overrides.clone();
    overrides.t = overrides.t.or(Some(1.0));
    overrides.seed = overrides.seed.or(Some(0));
    let eff = effective(config, &overrides, None, None)?;
    let profile = solve_profile(&eff.model)?;
    print!("{}", emit::profile_keyvalues(&profile));
    println!("{}", emit::profile_json(&profile));
    Ok(())
}

fn cmd_simulate(config: Option<&Config>, overrides: &RunOverrides) -> Result<(), Failure> {
    let eff = effective(config, overrides, None, None)?;
    let profile = solve_profile(&eff.model)?;
    let result = engine::run(
        &eff.model,
        &profile,
        &eff.sim,
        &eff.analysis.characteristics,
    );
    print!("{}", emit::run_result_json(&result));
    Ok(())
}

fn cmd_ensemble(
    config: Option<&Config>,
    overrides: &RunOverrides,
    replicates: Option<u64>,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let eff = effective(config, overrides, replicates, out)?;
    let profile = solve_profile(&eff.model)?;
    let ensemble = stats::run_ensemble(
        &eff.model,
        &profile,
        &eff.sim,
        &eff.analysis,
        eff.replicates,
    )
    .map_err(|e| Failure {
        message: e.to_string(),
        code: 1,
    })?;

    std::fs::create_dir_all(&eff.out_dir)
        .map_err(|e| Failure::usage(format!("cannot create {}: {e}", eff.out_dir.display())))?;
    let write = |name: &str, contents: &str| -> Result<(), Failure> {
        let path = eff.out_dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
    };
    let report = emit::report_json(&ensemble.report);
    write(&eff.report_name, &report)?;
    write(&eff.atoms_name, &emit::atoms_csv(&ensemble.runs))?;
    write(&eff.maxima_name, &emit::maxima_csv(&ensemble.runs))?;
    print!("{report}");
    Ok(())
}

fn cmd_check(
    only: Option<&Vec<u32>>,
    inject_alpha: Option<f64>,
    list: bool,
) -> Result<bool, Failure> {
    if list {
        for (id, name) in CRITERIA {
            println!("{id:>2}  {name}");
        }
        return Ok(true);
    }
    if let Some(ids) = only {
        if let Some(bad) = ids.iter().find(|&&id| !(1..=14).contains(&id)) {
            return Err(Failure::usage(format!("no criterion with id {bad}")));
        }
    }
    let suite = match inject_alpha {
        Some(alpha) => Suite::with_alpha_override(alpha),
        None => Suite::new(),
    };
    let outcomes = match only {
        Some(ids) => suite.run_selected(ids),
        None => suite.run_all(),
    };
    let mut all_passed = true;
    for outcome in &outcomes {
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict}  {:>2}  {:<26}  {}",
            outcome.id, outcome.name, outcome.detail
        );
        all_passed &= outcome.passed;
    }
    Ok(all_passed)
}

fn dispatch(cli: &Cli) -> Result<bool, Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let config = match &cli.config {
        Some(path) => Some(config::parse_config(path)?),
        None => None,
    };
    match &cli.command {
        Command::Solve { overrides } => cmd_solve(config.as_ref(), overrides).map(|()| true),
        Command::Simulate { overrides } => cmd_simulate(config.as_ref(), overrides).map(|()| true),
        Command::Ensemble {
            overrides,
            replicates,
            out,
        } => cmd_ensemble(config.as_ref(), overrides, *replicates, out.as_ref()).map(|()| true),
        Command::Check {
            only,
            inject_alpha,
            list,
        } => cmd_check(only.as_ref(), *inject_alpha, *list),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
