//! Simulation and analytics for supercritical Sevast'yanov branching
//! processes (joint lifetime/offspring law, children born at the parent's
//! death).
//!
//! The crate is organised around the pipeline
//!
//! ```text
//! model  ->  malthus  ->  engine  ->  extremes  ->  stats
//! ```
//!
//! * [`model`] — the catalogue of joint `(T, L)` laws with exact samplers
//!   and the analytic moment functionals the Malthusian machinery needs;
//! * [`malthus`] — the Malthusian parameter `alpha`, derived constants,
//!   the characteristic length `ell_t` of the longest branches, and the
//!   limiting laws of the recentred edge-length point processes;
//! * [`engine`] — event-driven simulation of one tree up to a horizon,
//!   streamed down to counts, the Malthusian martingale value, extremal
//!   atoms and maxima (with a naive reference simulator in [`naive`]);
//! * [`extremes`] — per-run transformations of the recentred atom sets;
//! * [`stats`] — ensemble orchestration and the statistical comparisons
//!   against the limiting laws;
//! * [`acceptance`] — the fixed verification suite behind `branchscope check`.

pub mod acceptance;
pub mod config;
pub mod emit;
pub mod engine;
pub mod extremes;
pub mod malthus;
pub mod model;
pub mod naive;
pub mod piecewise;
pub mod quad;
pub mod rng;
pub mod stats;

pub use engine::{PointProcess, RunResult, RunStatus, SimulationConfig};
pub use malthus::{EdgeKind, MalthusProfile};
pub use model::{LifetimeOffspringModel, OffspringLaw};
