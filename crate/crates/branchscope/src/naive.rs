//! Naive reference simulator used as an oracle for [`crate::engine`].
//!
//! Builds and stores the full labelled tree, selecting the next death by
//! a linear scan over pending individuals instead of a priority queue,
//! then computes every [`RunResult`] field by exhaustive enumeration
//! over the stored nodes. Draws are consumed in the same order as the
//! streaming engine (root first, then deaths in FIFO-by-death-time
//! order), so for any seed the two simulators must agree bit for bit.
//!
//! Intended for small horizons (expected population up to ~1e4); the
//! scan is quadratic in the number of pending deaths.

use crate::engine::{
    capped_result, CensusValue, Characteristic, PointProcess, RunResult, RunStatus,
    SimulationConfig,
};
use crate::malthus::MalthusProfile;
use crate::model::LifetimeOffspringModel;
use crate::rng::RunStream;

struct Node {
    born: f64,
    death: f64,
    brood: u32,
}

/// Simulates one tree by exhaustive construction.
pub fn run_naive(
    model: &LifetimeOffspringModel,
    profile: &MalthusProfile,
    config: &SimulationConfig,
    characteristics: &[Characteristic],
) -> RunResult {
    config.assert_valid();
    let t = config.horizon;
    let ell = profile.characteristic_length(model, t);

    let mut stream = RunStream::new(config.seed);
    let mut nodes: Vec<Node> = Vec::new();
    let mut pending: Vec<usize> = Vec::new();

    let (root_lifetime, root_brood) = model.sample_pair(&mut stream);
    nodes.push(Node {
        born: 0.0,
        death: root_lifetime,
        brood: root_brood,
    });
    if root_lifetime <= t {
        pending.push(0);
    }

    while !pending.is_empty() {
        // earliest death; on ties the first inserted wins (FIFO)
        let mut best = 0;
        for i in 1..pending.len() {
            if nodes[pending[i]].death < nodes[pending[best]].death {
                best = i;
            }
        }
        let parent = pending.remove(best);
        let parent_death = nodes[parent].death;
        for _ in 0..nodes[parent].brood {
            if nodes.len() as u64 == config.edge_cap {
                return capped_result(config, ell, characteristics);
            }
            let (lifetime, brood) = model.sample_pair(&mut stream);
            let death = parent_death + lifetime;
            let idx = nodes.len();
            nodes.push(Node {
                born: parent_death,
                death,
                brood,
            });
            if death <= t {
                pending.push(idx);
            }
        }
    }

    // Exhaustive reduction over the stored tree, walking nodes in
    // creation order so floating-point accumulation matches the engine.
    let min_length = ell - config.window;
    let mut n_alive = 0u64;
    let mut n_dead = 0u64;
    let mut z_t = 0.0;
    let mut m_pendant: Option<f64> = None;
    let mut m_interior: Option<f64> = None;
    let mut pendant_atoms = Vec::new();
    let mut interior_atoms = Vec::new();
    let mut census = vec![0.0; characteristics.len()];

    for node in &nodes {
        if node.death > t {
            n_alive += 1;
            z_t += f64::from(node.brood) * (-profile.alpha * node.death).exp();
            let age = t - node.born;
            if m_pendant.is_none_or(|m| age > m) {
                m_pendant = Some(age);
            }
            if config.record_atoms && age >= min_length {
                pendant_atoms.push(age - ell);
            }
            for (acc, c) in census.iter_mut().zip(characteristics) {
                *acc += c.weight.eval(age);
            }
        } else {
            n_dead += 1;
            let length = node.death - node.born;
            if m_interior.is_none_or(|m| length > m) {
                m_interior = Some(length);
            }
            if config.record_atoms && length >= min_length {
                interior_atoms.push(length - ell);
            }
        }
    }

    RunResult {
        status: if n_alive > 0 {
            RunStatus::Survived
        } else {
            RunStatus::Extinct
        },
        n_alive,
        n_born: nodes.len() as u64,
        n_dead,
        z_t,
        m_pendant,
        m_interior,
        pendant_atoms: PointProcess::from_positions(pendant_atoms),
        interior_atoms: PointProcess::from_positions(interior_atoms),
        census: characteristics
            .iter()
            .zip(&census)
            .map(|(c, &value)| CensusValue {
                label: c.label.clone(),
                value,
            })
            .collect(),
        horizon: t,
        ell_t: ell,
        window: config.window,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;
    use crate::model::OffspringLaw;
    use crate::piecewise::PiecewiseLinear;

    fn catalogue() -> Vec<(LifetimeOffspringModel, MalthusProfile)> {
        let models = vec![
            LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap(),
            LifetimeOffspringModel::pareto_lifetime(2.0, OffspringLaw::Geometric { mean: 1.5 })
                .unwrap(),
            LifetimeOffspringModel::correlated_poisson(1.0, 2.0).unwrap(),
        ];
        models
            .into_iter()
            .map(|m| {
                let p = MalthusProfile::solve(&m).unwrap();
                (m, p)
            })
            .collect()
    }

    #[test]
    fn agrees_with_engine_on_a_medium_tree() {
        let (model, profile) = &catalogue()[0];
        let chars = [Characteristic::new(
            "alive",
            PiecewiseLinear::constant_from(0.0, 1.0),
        )];
        let config = SimulationConfig::new(6.0, 42);
        let fast = run(model, profile, &config, &chars);
        let slow = run_naive(model, profile, &config, &chars);
        assert_eq!(fast, slow);
        assert!(fast.n_born > 10, "tree too small to be a meaningful check");
    }

    #[test]
    fn agrees_with_engine_across_seeds_and_models() {
        for (model, profile) in &catalogue() {
            for seed in 0..25u64 {
                let config = SimulationConfig::new(5.0, seed);
                let fast = run(model, profile, &config, &[]);
                let slow = run_naive(model, profile, &config, &[]);
                assert_eq!(fast, slow, "{} seed {seed}", model.label());
            }
        }
    }

    #[test]
    fn single_individual_when_root_outlives_horizon() {
        let (model, profile) = &catalogue()[0];
        let config = SimulationConfig::new(1e-6, 7);
        let fast = run(model, profile, &config, &[]);
        let slow = run_naive(model, profile, &config, &[]);
        assert_eq!(fast, slow);
        assert_eq!(slow.n_born, 1);
    }

    #[test]
    fn capped_runs_agree() {
        let (model, profile) = &catalogue()[0];
        let mut config = SimulationConfig::new(8.0, 1);
        config.edge_cap = 25;
        let fast = run(model, profile, &config, &[]);
        let slow = run_naive(model, profile, &config, &[]);
        assert_eq!(fast, slow);
        assert_eq!(fast.status, RunStatus::Capped);
    }
}
