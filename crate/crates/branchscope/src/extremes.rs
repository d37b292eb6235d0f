//! Pure per-run transformations of the recentred edge processes.

use crate::engine::RunResult;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ExtremesError {
    #[error("grid point {x} lies below the retention window -{window}")]
    GridBelowWindow { x: f64, window: f64 },
    #[error("no atoms at or above the threshold")]
    NoAtoms,
}

/// Exceedance counts of one run's atom lists over a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceCurve {
    pub grid: Vec<f64>,
    pub pendant_counts: Vec<u64>,
    pub interior_counts: Vec<u64>,
}

/// Counts atoms at or above each grid point, for both processes.
///
/// The grid must be sorted and contained in `[-A, infinity)` for the
/// run's retention window `A`; counts below the window would be
/// truncation artefacts.
pub fn exceedance(run: &RunResult, grid: &[f64]) -> Result<ExceedanceCurve, ExtremesError> {
    debug_assert!(grid.windows(2).all(|w| w[0] <= w[1]), "grid must be sorted");
    if let Some(&x) = grid.iter().find(|&&x| x < -run.window) {
        return Err(ExtremesError::GridBelowWindow {
            x,
            window: run.window,
        });
    }
    Ok(ExceedanceCurve {
        grid: grid.to_vec(),
        pendant_counts: grid
            .iter()
            .map(|&x| run.pendant_atoms.count_at_or_above(x) as u64)
            .collect(),
        interior_counts: grid
            .iter()
            .map(|&x| run.interior_atoms.count_at_or_above(x) as u64)
            .collect(),
    })
}

/// Maxima of the two recentred (windowed) processes; `None` encodes the
/// maximum of an empty point measure, `-infinity`.
pub fn recentred_maxima(run: &RunResult) -> (Option<f64>, Option<f64>) {
    (run.pendant_atoms.max(), run.interior_atoms.max())
}

/// Fraction of the pooled atoms at or above `x` that are pendant.
pub fn pendant_fraction(runs: &[RunResult], x: f64) -> Result<f64, ExtremesError> {
    let mut pendant = 0u64;
    let mut total = 0u64;
    for run in runs {
        let p = run.pendant_atoms.count_at_or_above(x) as u64;
        let i = run.interior_atoms.count_at_or_above(x) as u64;
        pendant += p;
        total += p + i;
    }
    if total == 0 {
        return Err(ExtremesError::NoAtoms);
    }
    Ok(pendant as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run, PointProcess, RunStatus, SimulationConfig};
    use crate::malthus::MalthusProfile;
    use crate::model::{LifetimeOffspringModel, OffspringLaw};

    fn synthetic(pendant: Vec<f64>, interior: Vec<f64>) -> RunResult {
        RunResult {
            status: RunStatus::Survived,
            n_alive: pendant.len() as u64,
            n_born: (pendant.len() + interior.len()) as u64,
            n_dead: interior.len() as u64,
            z_t: 1.0,
            m_pendant: pendant
                .iter()
                .copied()
                .fold(None, |m: Option<f64>, a| Some(m.map_or(a, |m| m.max(a)))),
            m_interior: None,
            pendant_atoms: PointProcess::from_positions(pendant),
            interior_atoms: PointProcess::from_positions(interior),
            census: Vec::new(),
            horizon: 10.0,
            ell_t: 0.0,
            window: 3.0,
        }
    }

    #[test]
    fn counts_on_small_examples() {
        let empty = synthetic(vec![], vec![]);
        let curve = exceedance(&empty, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(curve.pendant_counts, vec![0, 0, 0]);
        assert_eq!(curve.interior_counts, vec![0, 0, 0]);

        let one = synthetic(vec![0.3], vec![]);
        let curve = exceedance(&one, &[0.0, 0.5]).unwrap();
        assert_eq!(curve.pendant_counts, vec![1, 0]);

        // at the window boundary every retained atom is counted
        let run = synthetic(vec![-2.9, 0.1, 1.4], vec![-0.2]);
        let curve = exceedance(&run, &[-3.0]).unwrap();
        assert_eq!(curve.pendant_counts[0], run.pendant_atoms.len() as u64);
        assert_eq!(curve.interior_counts[0], run.interior_atoms.len() as u64);
    }

    #[test]
    fn counts_are_non_increasing_along_the_grid() {
        let run = synthetic(vec![-1.0, -0.5, 0.0, 0.7, 2.2], vec![-2.0, 0.1, 0.1]);
        let grid: Vec<f64> = (0..=20).map(|i| -3.0 + 0.3 * i as f64).collect();
        let curve = exceedance(&run, &grid).unwrap();
        assert!(curve.pendant_counts.windows(2).all(|w| w[0] >= w[1]));
        assert!(curve.interior_counts.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn grid_below_window_is_rejected() {
        let run = synthetic(vec![0.0], vec![]);
        assert_eq!(
            exceedance(&run, &[-3.5, 0.0]),
            Err(ExtremesError::GridBelowWindow {
                x: -3.5,
                window: 3.0
            })
        );
    }

    #[test]
    fn recentred_maxima_match_shifted_raw_maxima() {
        let model =
            LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap();
        let profile = MalthusProfile::solve(&model).unwrap();
        for seed in 0..10u64 {
            let run = run(&model, &profile, &SimulationConfig::new(9.0, seed), &[]);
            let (mp, mi) = recentred_maxima(&run);
            let expect_p = run.m_pendant.map(|m| m - run.ell_t);
            assert!((mp.unwrap() - expect_p.unwrap()).abs() < 1e-12);
            if let (Some(mi), Some(raw)) = (mi, run.m_interior) {
                assert!((mi - (raw - run.ell_t)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pendant_fraction_examples() {
        let only_pendant = synthetic(vec![0.2, 0.9], vec![-1.0]);
        assert_eq!(pendant_fraction(&[only_pendant], 0.0).unwrap(), 1.0);

        let mixed = vec![
            synthetic(vec![0.5], vec![0.7]),
            synthetic(vec![1.1], vec![-0.4]),
        ];
        assert!((pendant_fraction(&mixed, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);

        assert_eq!(pendant_fraction(&mixed, 5.0), Err(ExtremesError::NoAtoms));
    }

    #[test]
    fn pendant_fraction_is_translation_invariant() {
        let base = vec![
            synthetic(vec![-0.5, 0.3, 1.8], vec![-1.1, 0.6]),
            synthetic(vec![0.05], vec![0.0, 2.0]),
        ];
        let shift = 0.75;
        let shifted: Vec<RunResult> = base
            .iter()
            .map(|r| {
                synthetic(
                    r.pendant_atoms.atoms().iter().map(|a| a + shift).collect(),
                    r.interior_atoms.atoms().iter().map(|a| a + shift).collect(),
                )
            })
            .collect();
        for x in [-1.0, 0.0, 0.5] {
            let a = pendant_fraction(&base, x).unwrap();
            let b = pendant_fraction(&shifted, x + shift).unwrap();
            assert_eq!(a, b);
        }
    }
}
