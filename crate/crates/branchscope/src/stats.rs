//! Ensemble orchestration and statistical verification of the limit
//! laws: exponential growth, the census limits, the Poisson intensity of
//! the recentred edge processes, the law of the recentred maxima, and
//! the joint Laplace functional.
//!
//! Conditioning on the (unobservable) martingale limit is replaced
//! throughout by the per-run martingale value at the horizon, used both
//! as the normaliser of "per unit z" estimators and as the empirical
//! mixing sample of the limiting laws. Capped runs are excluded from
//! every estimator and only counted.
//!
//! Replicates execute in parallel; results are aggregated in replicate
//! order, so reports do not depend on scheduling.

use crate::engine::{self, Characteristic, RunResult, RunStatus, SimulationConfig};
use crate::extremes::ExtremesError;
use crate::malthus::{EdgeKind, MalthusError, MalthusProfile};
use crate::model::LifetimeOffspringModel;
use crate::piecewise::PiecewiseLinear;
use crate::rng::mix_seed;
use rayon::prelude::*;
use thiserror::Error;

/// Grid the empirical and limiting max-law CDFs are compared on:
/// 61 points covering [-3, 3].
pub const MAX_LAW_GRID_LEN: usize = 61;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("ensembles need at least 100 replicates (got {0})")]
    TooFewReplicates(u64),
    #[error("only {got} replicates survived; at least {need} are required")]
    TooFewSurvivors { got: usize, need: usize },
    #[error("all runs are extinct: the martingale sample is identically zero")]
    ZeroZ,
    #[error("census characteristic `{0}` was not registered at simulation time")]
    MissingCensus(String),
    #[error(transparent)]
    Extremes(#[from] ExtremesError),
    #[error(transparent)]
    Malthus(#[from] MalthusError),
}

/// Mean and standard error of an estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// An estimate next to its analytic target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetedEstimate {
    pub value: f64,
    pub stderr: f64,
    pub target: f64,
    /// `|value - target| / |target|`, or `|value|` when the target is 0.
    pub rel_error: f64,
}

impl TargetedEstimate {
    fn new(value: f64, stderr: f64, target: f64) -> Self {
        let rel_error = if target != 0.0 {
            ((value - target) / target).abs()
        } else {
            value.abs()
        };
        Self {
            value,
            stderr,
            target,
            rel_error,
        }
    }
}

/// Census comparison for one registered characteristic.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusComparison {
    pub label: String,
    pub estimate: TargetedEstimate,
}

/// One row of the exceedance-intensity table.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceRow {
    pub x: f64,
    pub pendant: TargetedEstimate,
    pub interior: TargetedEstimate,
    /// Pooled fraction of atoms at or above `x` that are pendant, when
    /// any atoms exist there.
    pub pendant_fraction: Option<f64>,
}

/// Sup distances between empirical and limiting recentred-max CDFs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxLawDistances {
    pub pendant: f64,
    pub interior: f64,
}

/// A labelled pair of Laplace test functions.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacePair {
    pub label: String,
    pub phi: PiecewiseLinear,
    pub psi: PiecewiseLinear,
}

/// Empirical vs limiting joint Laplace functional for one pair.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceComparison {
    pub label: String,
    pub empirical: f64,
    pub limiting: f64,
    pub abs_error: f64,
}

/// Mean recentred-maxima growth ratios of one ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimates {
    /// Mean of `m_pendant / t` over surviving runs.
    pub pendant: Option<f64>,
    /// Mean of `m_interior / t` over surviving runs that recorded a death.
    pub interior: Option<f64>,
}

/// Replicate bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReplicateCounts {
    pub requested: u64,
    pub survived: u64,
    pub extinct: u64,
    pub capped: u64,
}

/// Everything the ensemble pipeline measures, next to its targets.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleReport {
    pub model_label: String,
    pub profile: MalthusProfile,
    pub horizon: f64,
    pub ell_t: f64,
    pub window: f64,
    pub replicates: ReplicateCounts,
    pub martingale_mean: Estimate,
    pub growth_ratio: TargetedEstimate,
    pub census: Vec<CensusComparison>,
    pub exceedance: Vec<ExceedanceRow>,
    pub max_law: MaxLawDistances,
    pub laplace: Vec<LaplaceComparison>,
    pub slope: SlopeEstimates,
}

/// Ensemble-level analysis settings.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisOptions {
    /// Exceedance grid (sorted, within the retention window).
    pub grid: Vec<f64>,
    /// Laplace test-function pairs.
    pub laplace_pairs: Vec<LaplacePair>,
    /// Census characteristics registered with every run.
    pub characteristics: Vec<Characteristic>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        let ramp = PiecewiseLinear::ramp(0.0, 1.0, 1.0);
        let zero = PiecewiseLinear::zero();
        Self {
            grid: vec![-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0],
            laplace_pairs: vec![
                LaplacePair {
                    label: "ramp/zero".into(),
                    phi: ramp.clone(),
                    psi: zero.clone(),
                },
                LaplacePair {
                    label: "zero/ramp".into(),
                    phi: zero,
                    psi: ramp.clone(),
                },
                LaplacePair {
                    label: "ramp/ramp".into(),
                    phi: ramp.clone(),
                    psi: ramp,
                },
            ],
            characteristics: vec![
                Characteristic::new("alive", PiecewiseLinear::constant_from(0.0, 1.0)),
                Characteristic::new("age_capped", PiecewiseLinear::ramp(0.0, 1.0, 1.0)),
            ],
        }
    }
}

/// An executed ensemble: the per-replicate results (in replicate order)
/// and the aggregated report.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub runs: Vec<RunResult>,
    pub report: EnsembleReport,
}

fn valid(runs: &[RunResult]) -> impl Iterator<Item = &RunResult> {
    runs.iter().filter(|r| r.status != RunStatus::Capped)
}

fn z_samples(runs: &[RunResult]) -> Vec<f64> {
    valid(runs).map(|r| r.z_t).collect()
}

fn mean_and_stderr(values: impl Iterator<Item = f64>) -> Estimate {
    let values: Vec<f64> = values.collect();
    let n = values.len();
    if n == 0 {
        return Estimate {
            value: f64::NAN,
            stderr: f64::NAN,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return Estimate {
            value: mean,
            stderr: 0.0,
        };
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    Estimate {
        value: mean,
        stderr: (var / n as f64).sqrt(),
    }
}

/// Ratio-of-means estimator `mean(x) / mean(y)` with a delta-method
/// standard error.
fn ratio_estimate(pairs: &[(f64, f64)]) -> Result<Estimate, StatsError> {
    let n = pairs.len();
    let mean_x = pairs.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let mean_y = pairs.iter().map(|p| p.1).sum::<f64>() / n as f64;
    if mean_y == 0.0 {
        return Err(StatsError::ZeroZ);
    }
    let ratio = mean_x / mean_y;
    let resid_var = pairs
        .iter()
        .map(|&(x, y)| {
            let r = x - ratio * y;
            r * r
        })
        .sum::<f64>()
        / (n.saturating_sub(1)) as f64;
    let stderr = (resid_var / n as f64).sqrt() / mean_y.abs();
    Ok(Estimate {
        value: ratio,
        stderr,
    })
}

/// Mean martingale value over non-capped runs (target 1 at every `t`).
pub fn martingale_mean(runs: &[RunResult]) -> Estimate {
    mean_and_stderr(valid(runs).map(|r| r.z_t))
}

/// Renormalised population size per unit martingale:
/// `mean(exp(-alpha t) n_alive) / mean(z_t)`; its limit is the profile's
/// growth constant.
pub fn growth_ratio(runs: &[RunResult], profile: &MalthusProfile) -> Result<Estimate, StatsError> {
    let pairs: Vec<(f64, f64)> = valid(runs)
        .map(|r| ((-profile.alpha * r.horizon).exp() * r.n_alive as f64, r.z_t))
        .collect();
    ratio_estimate(&pairs)
}

/// Renormalised census per unit martingale for one registered
/// characteristic, next to its quadrature target.
pub fn census_ratio(
    runs: &[RunResult],
    model: &LifetimeOffspringModel,
    profile: &MalthusProfile,
    characteristic: &Characteristic,
) -> Result<CensusComparison, StatsError> {
    let pairs: Vec<(f64, f64)> = valid(runs)
        .map(|r| {
            let census = r
                .census
                .iter()
                .find(|c| c.label == characteristic.label)
                .ok_or_else(|| StatsError::MissingCensus(characteristic.label.clone()))?;
            Ok(((-profile.alpha * r.horizon).exp() * census.value, r.z_t))
        })
        .collect::<Result<_, StatsError>>()?;
    let estimate = ratio_estimate(&pairs)?;
    let target = profile.census_limit(model, &characteristic.weight)?;
    Ok(CensusComparison {
        label: characteristic.label.clone(),
        estimate: TargetedEstimate::new(estimate.value, estimate.stderr, target),
    })
}

/// Mean exceedance counts per unit martingale over a grid, next to the
/// limiting intensities integrated over `[x, infinity)`.
pub fn intensity_table(
    runs: &[RunResult],
    profile: &MalthusProfile,
    grid: &[f64],
) -> Result<Vec<ExceedanceRow>, StatsError> {
    if let Some(run) = valid(runs).next() {
        if let Some(&x) = grid.iter().find(|&&x| x < -run.window) {
            return Err(StatsError::Extremes(ExtremesError::GridBelowWindow {
                x,
                window: run.window,
            }));
        }
    }
    let valid_runs: Vec<&RunResult> = valid(runs).collect();
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        let pendant_pairs: Vec<(f64, f64)> = valid_runs
            .iter()
            .map(|r| (r.pendant_atoms.count_at_or_above(x) as f64, r.z_t))
            .collect();
        let interior_pairs: Vec<(f64, f64)> = valid_runs
            .iter()
            .map(|r| (r.interior_atoms.count_at_or_above(x) as f64, r.z_t))
            .collect();
        let pendant = ratio_estimate(&pendant_pairs)?;
        let interior = ratio_estimate(&interior_pairs)?;
        let pendant_target = profile.limiting_exceedance(EdgeKind::Pendant, x)?;
        let interior_target = profile.limiting_exceedance(EdgeKind::Interior, x)?;
        let pooled_pendant: u64 = pendant_pairs.iter().map(|p| p.0 as u64).sum();
        let pooled_total: u64 =
            pooled_pendant + interior_pairs.iter().map(|p| p.0 as u64).sum::<u64>();
        rows.push(ExceedanceRow {
            x,
            pendant: TargetedEstimate::new(pendant.value, pendant.stderr, pendant_target),
            interior: TargetedEstimate::new(interior.value, interior.stderr, interior_target),
            pendant_fraction: (pooled_total > 0)
                .then(|| pooled_pendant as f64 / pooled_total as f64),
        });
    }
    Ok(rows)
}

/// Sup distance over a fixed grid on [-3, 3] between the empirical CDF
/// of the recentred maxima and the limiting mixed-Poisson CDF evaluated
/// with the runs' own martingale sample. A run without atoms counts as
/// maximum `-infinity`, i.e. below every grid point.
pub fn max_law_distances(
    runs: &[RunResult],
    profile: &MalthusProfile,
) -> Result<MaxLawDistances, StatsError> {
    let valid_runs: Vec<&RunResult> = valid(runs).collect();
    let z: Vec<f64> = valid_runs.iter().map(|r| r.z_t).collect();
    let n = valid_runs.len() as f64;

    let mut sup = [0.0f64; 2];
    for i in 0..MAX_LAW_GRID_LEN {
        let x = -3.0 + 6.0 * i as f64 / (MAX_LAW_GRID_LEN - 1) as f64;
        for (j, kind) in [EdgeKind::Pendant, EdgeKind::Interior]
            .into_iter()
            .enumerate()
        {
            let below = valid_runs
                .iter()
                .filter(|r| {
                    let max = match kind {
                        EdgeKind::Pendant => r.pendant_atoms.max(),
                        EdgeKind::Interior => r.interior_atoms.max(),
                    };
                    max.is_none_or(|m| m <= x)
                })
                .count() as f64;
            let empirical = below / n;
            let limiting = profile.limiting_max_cdf(kind, x, &z)?;
            sup[j] = sup[j].max((empirical - limiting).abs());
        }
    }
    Ok(MaxLawDistances {
        pendant: sup[0],
        interior: sup[1],
    })
}

/// Empirical vs limiting joint Laplace functional for one test-function
/// pair, evaluated against the full interior process.
pub fn laplace_comparison(
    runs: &[RunResult],
    profile: &MalthusProfile,
    pair: &LaplacePair,
) -> Result<LaplaceComparison, StatsError> {
    let valid_runs: Vec<&RunResult> = valid(runs).collect();
    let window = valid_runs
        .first()
        .map_or(engine::DEFAULT_WINDOW, |r| r.window);
    let empirical = mean_and_stderr(valid_runs.iter().map(|r| {
        let mut exponent = 0.0;
        for &a in r.pendant_atoms.atoms() {
            exponent += pair.phi.eval(a);
        }
        for &a in r.interior_atoms.atoms() {
            exponent += pair.psi.eval(a);
        }
        (-exponent).exp()
    }))
    .value;
    let z = z_samples(runs);
    let limiting = profile.limiting_laplace(&pair.phi, &pair.psi, window, &z)?;
    Ok(LaplaceComparison {
        label: pair.label.clone(),
        empirical,
        limiting,
        abs_error: (empirical - limiting).abs(),
    })
}

/// Mean `m_pendant / t` and `m_interior / t` over surviving runs.
pub fn slope_estimates(runs: &[RunResult]) -> SlopeEstimates {
    let survivors: Vec<&RunResult> = runs
        .iter()
        .filter(|r| r.status == RunStatus::Survived)
        .collect();
    let pendant: Vec<f64> = survivors
        .iter()
        .filter_map(|r| r.m_pendant.map(|m| m / r.horizon))
        .collect();
    let interior: Vec<f64> = survivors
        .iter()
        .filter_map(|r| r.m_interior.map(|m| m / r.horizon))
        .collect();
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    SlopeEstimates {
        pendant: mean(&pendant),
        interior: mean(&interior),
    }
}

/// One horizon's worth of runs for the slope comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeRow {
    pub horizon: f64,
    pub estimates: SlopeEstimates,
    pub survivors: u64,
}

/// Per-horizon mean growth ratios of the longest edges; callers check
/// convergence toward the profile's slope across at least 3 horizons.
pub fn slope_table(groups: &[(f64, &[RunResult])]) -> Vec<SlopeRow> {
    groups
        .iter()
        .map(|&(horizon, runs)| SlopeRow {
            horizon,
            estimates: slope_estimates(runs),
            survivors: runs
                .iter()
                .filter(|r| r.status == RunStatus::Survived)
                .count() as u64,
        })
        .collect()
}

/// Executes `replicates` independent runs in parallel, one stream per
/// run keyed by `mix_seed(base.seed, index)`; results come back in
/// replicate order regardless of scheduling.
pub fn run_replicates(
    model: &LifetimeOffspringModel,
    profile: &MalthusProfile,
    base: &SimulationConfig,
    characteristics: &[Characteristic],
    replicates: u64,
) -> Vec<RunResult> {
    (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut config = base.clone();
            config.seed = mix_seed(base.seed, i);
            engine::run(model, profile, &config, characteristics)
        })
        .collect()
}

/// Executes `replicates` runs (seeds mixed from the base seed and the
/// replicate index), excludes capped runs, and aggregates every
/// estimator into an [`EnsembleReport`].
pub fn run_ensemble(
    model: &LifetimeOffspringModel,
    profile: &MalthusProfile,
    base: &SimulationConfig,
    analysis: &AnalysisOptions,
    replicates: u64,
) -> Result<Ensemble, StatsError> {
    if replicates < 100 {
        return Err(StatsError::TooFewReplicates(replicates));
    }
    let runs = run_replicates(model, profile, base, &analysis.characteristics, replicates);

    let survived = runs
        .iter()
        .filter(|r| r.status == RunStatus::Survived)
        .count();
    let extinct = runs
        .iter()
        .filter(|r| r.status == RunStatus::Extinct)
        .count();
    let capped = runs
        .iter()
        .filter(|r| r.status == RunStatus::Capped)
        .count();
    if survived < 50 {
        return Err(StatsError::TooFewSurvivors {
            got: survived,
            need: 50,
        });
    }

    let census = analysis
        .characteristics
        .iter()
        .map(|c| census_ratio(&runs, model, profile, c))
        .collect::<Result<Vec<_>, _>>()?;
    let laplace = analysis
        .laplace_pairs
        .iter()
        .map(|pair| laplace_comparison(&runs, profile, pair))
        .collect::<Result<Vec<_>, _>>()?;

    let report = EnsembleReport {
        model_label: model.label().to_string(),
        profile: profile.clone(),
        horizon: base.horizon,
        ell_t: profile.characteristic_length(model, base.horizon),
        window: base.window,
        replicates: ReplicateCounts {
            requested: replicates,
            survived: survived as u64,
            extinct: extinct as u64,
            capped: capped as u64,
        },
        martingale_mean: martingale_mean(&runs),
        growth_ratio: {
            let e = growth_ratio(&runs, profile)?;
            TargetedEstimate::new(e.value, e.stderr, profile.growth_constant)
        },
        census,
        exceedance: intensity_table(&runs, profile, &analysis.grid)?,
        max_law: max_law_distances(&runs, profile)?,
        laplace,
        slope: slope_estimates(&runs),
    };
    Ok(Ensemble { runs, report })
}
