//! Property tests for the simulation and reduction invariants.

use branchscope::engine::{run, PointProcess, SimulationConfig};
use branchscope::extremes;
use branchscope::malthus::MalthusProfile;
use branchscope::model::{LifetimeOffspringModel, OffspringLaw};
use branchscope::naive::run_naive;
use branchscope::RunStatus;
use proptest::prelude::*;
use std::sync::OnceLock;

fn catalogue() -> &'static Vec<(LifetimeOffspringModel, MalthusProfile)> {
    static CATALOGUE: OnceLock<Vec<(LifetimeOffspringModel, MalthusProfile)>> = OnceLock::new();
    CATALOGUE.get_or_init(|| {
        [
            LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap(),
            LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::TwoPoint { p0: 0.4, k: 3 })
                .unwrap(),
            LifetimeOffspringModel::pareto_lifetime(2.0, OffspringLaw::Geometric { mean: 1.2 })
                .unwrap(),
            LifetimeOffspringModel::correlated_poisson(1.0, 2.0).unwrap(),
        ]
        .into_iter()
        .map(|m| {
            let p = MalthusProfile::solve(&m).unwrap();
            (m, p)
        })
        .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn streaming_engine_matches_naive_oracle(
        seed in any::<u64>(),
        t in 0.5f64..5.0,
        model_idx in 0usize..4,
    ) {
        let (model, profile) = &catalogue()[model_idx];
        let config = SimulationConfig::new(t, seed);
        let fast = run(model, profile, &config, &[]);
        let slow = run_naive(model, profile, &config, &[]);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn run_results_satisfy_structural_invariants(
        seed in any::<u64>(),
        t in 0.5f64..7.0,
        model_idx in 0usize..4,
    ) {
        let (model, profile) = &catalogue()[model_idx];
        let config = SimulationConfig::new(t, seed);
        let r = run(model, profile, &config, &[]);
        prop_assert_eq!(r.n_born, r.n_alive + r.n_dead);
        prop_assert!(r.z_t >= 0.0);
        prop_assert_eq!(r.status == RunStatus::Survived, r.n_alive >= 1);
        if r.status == RunStatus::Extinct {
            prop_assert_eq!(r.z_t, 0.0);
            prop_assert_eq!(r.m_pendant, None);
        }
        // atoms respect the window and the horizon bound
        for &a in r.pendant_atoms.atoms() {
            prop_assert!(a >= -r.window && a + r.ell_t <= r.horizon + 1e-12);
        }
        for &a in r.interior_atoms.atoms() {
            prop_assert!(a >= -r.window && a + r.ell_t <= r.horizon + 1e-12);
        }
        // maxima agree with the recentred atom maxima where both exist
        if let (Some(top), Some(raw)) = (r.pendant_atoms.max(), r.m_pendant) {
            prop_assert!((top + r.ell_t - raw).abs() < 1e-12);
        }
    }

    #[test]
    fn exceedance_counts_are_monotone_and_windowed(
        seed in any::<u64>(),
        t in 1.0f64..6.0,
        model_idx in 0usize..4,
    ) {
        let (model, profile) = &catalogue()[model_idx];
        let r = run(model, profile, &SimulationConfig::new(t, seed), &[]);
        let grid: Vec<f64> = (0..=24).map(|i| -3.0 + 0.25 * i as f64).collect();
        let curve = extremes::exceedance(&r, &grid).unwrap();
        prop_assert!(curve.pendant_counts.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(curve.interior_counts.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(curve.pendant_counts[0], r.pendant_atoms.len() as u64);
        prop_assert_eq!(curve.interior_counts[0], r.interior_atoms.len() as u64);
    }

    #[test]
    fn point_process_counting_matches_filter(
        mut atoms in proptest::collection::vec(-10.0f64..10.0, 0..40),
        x in -10.0f64..10.0,
    ) {
        let process = PointProcess::from_positions(atoms.clone());
        prop_assert!(process.atoms().windows(2).all(|w| w[0] <= w[1]));
        atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = atoms.iter().filter(|&&a| a >= x).count();
        prop_assert_eq!(process.count_at_or_above(x), expected);
    }

    #[test]
    fn characteristic_length_is_monotone_and_bounded(
        t1 in 0.1f64..40.0,
        dt in 0.1f64..20.0,
        model_idx in 0usize..4,
    ) {
        let (model, profile) = &catalogue()[model_idx];
        let ell1 = profile.characteristic_length(model, t1);
        let ell2 = profile.characteristic_length(model, t1 + dt);
        prop_assert!(ell1 <= ell2 + 1e-10);
        prop_assert!(ell1 <= t1 + 1e-10);
        // the defining inequality holds at the returned point
        let excess = profile.alpha * (t1 - ell1) + model.log_tail(ell1);
        prop_assert!(excess <= 1e-6);
    }

    #[test]
    fn interior_and_overall_maxima_are_monotone_under_coupling(
        seed in any::<u64>(),
        t1 in 1.0f64..4.0,
        dt in 0.5f64..3.0,
        model_idx in 0usize..4,
    ) {
        let (model, profile) = &catalogue()[model_idx];
        let a = run(model, profile, &SimulationConfig::new(t1, seed), &[]);
        let b = run(model, profile, &SimulationConfig::new(t1 + dt, seed), &[]);
        let neg = f64::NEG_INFINITY;
        let (ia, ib) = (a.m_interior.unwrap_or(neg), b.m_interior.unwrap_or(neg));
        prop_assert!(ib >= ia);
        let overall_a = ia.max(a.m_pendant.unwrap_or(neg));
        let overall_b = ib.max(b.m_pendant.unwrap_or(neg));
        prop_assert!(overall_b >= overall_a);
    }
}
