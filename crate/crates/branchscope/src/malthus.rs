//! Malthusian constants, the characteristic length of the longest
//! branches, and the limiting laws of the recentred edge processes.
//!
//! For a validated model, [`MalthusProfile::solve`] finds the unique
//! `alpha > 0` with `E(L exp(-alpha T)) = 1` and fills in the derived
//! constants:
//!
//! * `c_star = 1 / E(alpha T exp(-alpha T) L)`;
//! * `growth_constant = (1 - E(exp(-alpha T))) * c_star`, the limit of
//!   `exp(-alpha t) * n_alive` per unit of the martingale limit;
//! * `slope = alpha / (alpha + beta)`, the linear growth rate of the
//!   characteristic length and of the longest branches.
//!
//! The characteristic length `ell_t` is the generalised inverse of
//! `f(ell) = exp(-alpha ell) P(T > ell)` at level `exp(-alpha t)`: the
//! length at which, on average, order-one branches of that length exist
//! at time `t`. Recentred by `ell_t`, the pendant and interior edge
//! lengths converge to mixed Poisson point processes with densities
//! `c_star Z alpha exp(-(alpha+beta) x)` and
//! `c_star Z beta exp(-(alpha+beta) x)`; the evaluators below take an
//! empirical sample of martingale values `z` as the mixing measure.

use crate::model::{LifetimeOffspringModel, ModelError};
use crate::piecewise::PiecewiseLinear;
use crate::quad::{self, QuadratureError, MOMENT_TOL};
use thiserror::Error;

/// Residual bound enforced on `|E(L exp(-alpha T)) - 1|`.
pub const SOLVER_RESIDUAL: f64 = 1e-10;
/// Absolute tolerance of the characteristic-length inversion.
pub const LENGTH_TOL: f64 = 1e-12;

const MAX_DOUBLINGS: u32 = 60;

#[derive(Debug, Error)]
pub enum MalthusError {
    #[error("malthusian solver failed: {0}")]
    SolverFailure(String),
    #[error("degenerate tail: alpha + beta must be positive")]
    DegenerateTail,
    #[error("empty martingale sample")]
    EmptySample,
    #[error("unsupported test function: {0}")]
    UnsupportedTestFunction(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Which side of the recentred edge decomposition a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// Edges of individuals alive at the horizon.
    Pendant,
    /// Edges of individuals dead by the horizon.
    Interior,
}

/// Solved Malthusian constants for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct MalthusProfile {
    /// Malthusian parameter: unique root of `E(L exp(-alpha T)) = 1`.
    pub alpha: f64,
    /// Tail exponent of the lifetime law.
    pub beta: f64,
    /// `1 / E(alpha T exp(-alpha T) L)`.
    pub c_star: f64,
    /// `(1 - E(exp(-alpha T))) * c_star`.
    pub growth_constant: f64,
    /// `alpha / (alpha + beta)`, the limit of `ell_t / t`.
    pub slope: f64,
}

impl MalthusProfile {
    /// Solves the Malthusian equation for a validated model.
    ///
    /// Brackets `alpha` by doubling from 1 until the discounted moment
    /// drops below 1, bisects, then polishes with Newton steps; fails if
    /// the bracket is not found within 60 doublings or the final
    /// residual exceeds [`SOLVER_RESIDUAL`].
    pub fn solve(model: &LifetimeOffspringModel) -> Result<Self, MalthusError> {
        model.validate()?;
        let g = |a: f64| model.discounted_offspring_moment(a);

        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut doublings = 0;
        while g(hi)? >= 1.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(MalthusError::SolverFailure(format!(
                    "no bracket below a = {hi} for model {}",
                    model.label()
                )));
            }
        }

        while hi - lo > 1e-13 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if g(mid)? >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        // Newton polish; the derivative of the discounted moment at a is
        // -E(L T exp(-aT)) = -weighted_lifetime_moment(a) / a.
        let mut alpha = 0.5 * (lo + hi);
        for _ in 0..3 {
            let residual = g(alpha)? - 1.0;
            let derivative = -model.weighted_lifetime_moment(alpha)? / alpha;
            let next = alpha - residual / derivative;
            if next.is_finite() && next > 0.0 {
                alpha = next;
            }
        }

        let residual = (g(alpha)? - 1.0).abs();
        if residual > SOLVER_RESIDUAL {
            return Err(MalthusError::SolverFailure(format!(
                "residual {residual:.3e} above {SOLVER_RESIDUAL:.0e} for model {}",
                model.label()
            )));
        }

        let beta = model.tail_exponent();
        let c_star = 1.0 / model.weighted_lifetime_moment(alpha)?;
        let growth_constant = (1.0 - model.lifetime_laplace(alpha)?) * c_star;
        let slope = alpha / (alpha + beta);
        Ok(Self {
            alpha,
            beta,
            c_star,
            growth_constant,
            slope,
        })
    }

    /// Characteristic length `ell_t`: the right-continuous generalised
    /// inverse of `f(ell) = exp(-alpha ell) P(T > ell)` at `exp(-alpha t)`.
    ///
    /// Computed in log space by bisection on the monotone
    /// `alpha (t - ell) + ln P(T > ell)`, to absolute tolerance
    /// [`LENGTH_TOL`] in `ell`.
    pub fn characteristic_length(&self, model: &LifetimeOffspringModel, t: f64) -> f64 {
        assert!(t >= 0.0);
        if t == 0.0 {
            return 0.0;
        }
        let excess = |ell: f64| self.alpha * (t - ell) + model.log_tail(ell);
        // excess(0) = alpha t > 0 and excess(t) = log_tail(t) <= 0
        let mut lo = 0.0f64;
        let mut hi = t;
        while hi - lo > LENGTH_TOL {
            let mid = 0.5 * (lo + hi);
            if excess(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        // smallest ell with f(ell) <= exp(-alpha t)
        hi
    }

    /// `exp(alpha (t - ell_t)) P(T > ell_t) - 1`; vanishes (up to solver
    /// tolerance) at every finite `t` for continuous-tail models.
    pub fn critical_identity_residual(&self, model: &LifetimeOffspringModel, t: f64) -> f64 {
        let ell = self.characteristic_length(model, t);
        (self.alpha * (t - ell) + model.log_tail(ell)).exp_m1()
    }

    fn kind_rate(&self, kind: EdgeKind) -> f64 {
        match kind {
            EdgeKind::Pendant => self.alpha,
            EdgeKind::Interior => self.beta,
        }
    }

    /// Density at `x` of the limiting point process, per unit of the
    /// martingale limit.
    pub fn limiting_intensity(&self, kind: EdgeKind, x: f64) -> f64 {
        self.c_star * self.kind_rate(kind) * (-(self.alpha + self.beta) * x).exp()
    }

    /// Mean number of limiting atoms at or above `x`, per unit of the
    /// martingale limit.
    pub fn limiting_exceedance(&self, kind: EdgeKind, x: f64) -> Result<f64, MalthusError> {
        let total = self.alpha + self.beta;
        if total <= 0.0 {
            return Err(MalthusError::DegenerateTail);
        }
        Ok(self.c_star * self.kind_rate(kind) * (-total * x).exp() / total)
    }

    /// Mixed-Poisson void probability `P(max <= x)`, averaged over an
    /// empirical sample of martingale values (zeros encode extinction;
    /// the maximum of an empty process counts as `-infinity <= x`).
    pub fn limiting_max_cdf(
        &self,
        kind: EdgeKind,
        x: f64,
        z_samples: &[f64],
    ) -> Result<f64, MalthusError> {
        if z_samples.is_empty() {
            return Err(MalthusError::EmptySample);
        }
        let exceedance = self.limiting_exceedance(kind, x)?;
        let sum: f64 = z_samples.iter().map(|&z| (-z * exceedance).exp()).sum();
        Ok(sum / z_samples.len() as f64)
    }

    /// The exponent integral of the limiting joint Laplace functional:
    /// `I = integral over [-window, inf) of
    /// {alpha (1 - e^-phi) + beta (1 - e^-psi)} e^{-(alpha+beta) x} dx`.
    ///
    /// Piecewise-adaptive between the knots, closed form past the last
    /// knot where both test functions are constant.
    pub fn limiting_laplace_exponent(
        &self,
        phi: &PiecewiseLinear,
        psi: &PiecewiseLinear,
        window: f64,
    ) -> Result<f64, MalthusError> {
        assert!(window > 0.0);
        for (name, f) in [("phi", phi), ("psi", psi)] {
            if f.first_knot().0 < -window {
                return Err(MalthusError::UnsupportedTestFunction(format!(
                    "{name} has a knot at {} below -{window}",
                    f.first_knot().0
                )));
            }
            if f.first_knot().1 != 0.0 {
                return Err(MalthusError::UnsupportedTestFunction(format!(
                    "{name} must rise continuously from zero (first knot value {})",
                    f.first_knot().1
                )));
            }
        }

        let total = self.alpha + self.beta;
        let bracket = |x: f64| {
            self.alpha * (-(-phi.eval(x)).exp_m1()) + self.beta * (-(-psi.eval(x)).exp_m1())
        };

        let mut points: Vec<f64> = Vec::with_capacity(phi.knots().len() + psi.knots().len() + 1);
        points.push(-window);
        points.extend(phi.knots().iter().map(|&(x, _)| x));
        points.extend(psi.knots().iter().map(|&(x, _)| x));
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        let last = *points.last().expect("nonempty");

        let finite =
            quad::integrate_segments(|x| bracket(x) * (-total * x).exp(), &points, MOMENT_TOL)?;
        let tail = bracket(last) * (-total * last).exp() / total;
        Ok(finite + tail)
    }

    /// Limiting joint Laplace functional, averaged over an empirical
    /// martingale sample: `mean_z exp(-z c_star I)`.
    pub fn limiting_laplace(
        &self,
        phi: &PiecewiseLinear,
        psi: &PiecewiseLinear,
        window: f64,
        z_samples: &[f64],
    ) -> Result<f64, MalthusError> {
        if z_samples.is_empty() {
            return Err(MalthusError::EmptySample);
        }
        let exponent = self.c_star * self.limiting_laplace_exponent(phi, psi, window)?;
        let sum: f64 = z_samples.iter().map(|&z| (-z * exponent).exp()).sum();
        Ok(sum / z_samples.len() as f64)
    }

    /// Limit of `exp(-alpha t)` times the census of a characteristic,
    /// per unit of the martingale limit:
    /// `c_star * integral of alpha e^{-alpha s} phi(s) P(T > s) ds`.
    pub fn census_limit(
        &self,
        model: &LifetimeOffspringModel,
        phi: &PiecewiseLinear,
    ) -> Result<f64, MalthusError> {
        let alpha = self.alpha;
        let mut points: Vec<f64> = vec![0.0];
        points.extend(phi.knots().iter().map(|&(x, _)| x).filter(|&x| x > 0.0));
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup();
        let last = *points.last().expect("nonempty");

        let finite = quad::integrate_segments(
            |s| alpha * (-alpha * s).exp() * phi.eval(s) * model.tail(s),
            &points,
            MOMENT_TOL,
        )?;
        // past the last knot phi is constant; tail(last + s) <= 1
        let level = phi.eval(last);
        let tail_part = if level == 0.0 {
            0.0
        } else {
            level
                * alpha
                * (-alpha * last).exp()
                * quad::integrate_exp_decay(|s| model.tail(last + s), alpha, 1.0, MOMENT_TOL)?
        };
        Ok(self.c_star * (finite + tail_part))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::OffspringLaw;

    fn binary_ctgw() -> LifetimeOffspringModel {
        LifetimeOffspringModel::exp_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap()
    }

    fn pareto_two() -> LifetimeOffspringModel {
        LifetimeOffspringModel::pareto_lifetime(2.0, OffspringLaw::Constant { k: 2 }).unwrap()
    }

    fn correlated() -> LifetimeOffspringModel {
        LifetimeOffspringModel::correlated_poisson(1.0, 2.0).unwrap()
    }

    #[test]
    fn solve_binary_ctgw_closed_forms() {
        let p = MalthusProfile::solve(&binary_ctgw()).unwrap();
        assert!((p.alpha - 1.0).abs() < 1e-10, "alpha {}", p.alpha);
        assert!((p.beta - 1.0).abs() < 1e-15);
        assert!((p.c_star - 2.0).abs() < 1e-9, "c_star {}", p.c_star);
        assert!((p.growth_constant - 1.0).abs() < 1e-9);
        assert!((p.slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn solve_correlated_closed_forms() {
        // (1+alpha)^2 = (1+alpha) + gamma gives alpha = 1 for gamma = 2
        let p = MalthusProfile::solve(&correlated()).unwrap();
        assert!((p.alpha - 1.0).abs() < 1e-10, "alpha {}", p.alpha);
        assert!((p.c_star - 4.0 / 3.0).abs() < 1e-9, "c_star {}", p.c_star);
        assert!((p.growth_constant - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn solve_ctgw_rate_times_excess_offspring() {
        // exponential lifetimes: alpha = rate * (E L - 1)
        let model =
            LifetimeOffspringModel::exp_lifetime(2.0, OffspringLaw::Constant { k: 3 }).unwrap();
        let p = MalthusProfile::solve(&model).unwrap();
        assert!((p.alpha - 4.0).abs() < 1e-10, "alpha {}", p.alpha);
    }

    #[test]
    fn solver_invariants_hold_for_catalogue() {
        for model in [binary_ctgw(), pareto_two(), correlated()] {
            let p = MalthusProfile::solve(&model).unwrap();
            let residual = (model.discounted_offspring_moment(p.alpha).unwrap() - 1.0).abs();
            assert!(residual <= 1e-10, "{} residual {residual}", model.label());
            let product = p.c_star * model.weighted_lifetime_moment(p.alpha).unwrap();
            assert!((product - 1.0).abs() <= 1e-9);
            assert_eq!(p.slope, p.alpha / (p.alpha + p.beta));
        }
    }

    #[test]
    fn characteristic_length_binary_is_half_t() {
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        for t in [1.0, 5.0, 10.0, 20.0] {
            let ell = p.characteristic_length(&model, t);
            assert!((ell - t / 2.0).abs() < 1e-9, "ell({t}) = {ell}");
        }
        assert_eq!(p.characteristic_length(&model, 0.0), 0.0);
    }

    #[test]
    fn characteristic_length_heavy_tail_slope_drifts_to_one() {
        let model = pareto_two();
        let p = MalthusProfile::solve(&model).unwrap();
        let r20 = p.characteristic_length(&model, 20.0) / 20.0;
        let r40 = p.characteristic_length(&model, 40.0) / 40.0;
        assert!(r40 >= 0.85, "ell_t/t at 40 is {r40}");
        assert!(r40 > r20, "ratio not increasing: {r20} -> {r40}");
        // deviation from the limiting slope (= 1) shrinks along doubling horizons
        let mut prev = f64::INFINITY;
        for t in [10.0, 20.0, 40.0, 80.0] {
            let dev = (p.characteristic_length(&model, t) / t - p.slope).abs();
            assert!(dev < prev, "deviation grew at t = {t}");
            prev = dev;
        }
    }

    #[test]
    fn characteristic_length_monotone_and_below_t() {
        for model in [binary_ctgw(), pareto_two(), correlated()] {
            let p = MalthusProfile::solve(&model).unwrap();
            let mut prev = 0.0;
            for i in 1..=100 {
                let t = i as f64 * 0.25;
                let ell = p.characteristic_length(&model, t);
                assert!(ell >= prev - 1e-12, "{} not monotone at {t}", model.label());
                assert!(ell <= t + 1e-12, "{} ell > t at {t}", model.label());
                prev = ell;
            }
        }
    }

    #[test]
    fn critical_identity_residual_vanishes() {
        for model in [binary_ctgw(), pareto_two(), correlated()] {
            let p = MalthusProfile::solve(&model).unwrap();
            assert_eq!(p.critical_identity_residual(&model, 0.0), 0.0);
            for t in [5.0, 10.0, 20.0] {
                let r = p.critical_identity_residual(&model, t).abs();
                assert!(r <= 1e-6, "{} residual {r} at t = {t}", model.label());
            }
        }
    }

    #[test]
    fn limiting_intensity_values() {
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        assert!((p.limiting_intensity(EdgeKind::Pendant, 0.0) - 2.0).abs() < 1e-9);
        assert!((p.limiting_intensity(EdgeKind::Interior, 0.0) - 2.0).abs() < 1e-9);
        let heavy = MalthusProfile::solve(&pareto_two()).unwrap();
        for x in [-1.0, 0.0, 3.0] {
            assert_eq!(heavy.limiting_intensity(EdgeKind::Interior, x), 0.0);
        }
    }

    #[test]
    fn limiting_exceedance_values_and_identity() {
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        assert!((p.limiting_exceedance(EdgeKind::Pendant, 0.0).unwrap() - 1.0).abs() < 1e-9);
        let at_one = p.limiting_exceedance(EdgeKind::Pendant, 1.0).unwrap();
        assert!((at_one - (-2.0f64).exp()).abs() < 1e-9);
        // pendant fraction of the superposition is alpha/(alpha+beta) at every x
        for x in [-2.0, 0.0, 1.5] {
            let pe = p.limiting_exceedance(EdgeKind::Pendant, x).unwrap();
            let ie = p.limiting_exceedance(EdgeKind::Interior, x).unwrap();
            assert!((pe / (pe + ie) - p.alpha / (p.alpha + p.beta)).abs() < 1e-12);
            let total = p.c_star * (-(p.alpha + p.beta) * x).exp();
            assert!((pe + ie - total).abs() < 1e-9 * total.max(1.0));
        }
    }

    #[test]
    fn limiting_max_cdf_values() {
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        // extinction only: the null process max is -infinity
        for x in [-3.0, 0.0, 3.0] {
            assert_eq!(
                p.limiting_max_cdf(EdgeKind::Pendant, x, &[0.0]).unwrap(),
                1.0
            );
        }
        let v = p.limiting_max_cdf(EdgeKind::Pendant, 0.0, &[1.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-9);
        // monotone in x; tends to the extinct fraction on the far left
        let z = [0.0, 1.0];
        let mut prev = 0.0;
        for i in 0..=60 {
            let x = -3.0 + 0.1 * i as f64;
            let v = p.limiting_max_cdf(EdgeKind::Pendant, x, &z).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        let far_left = p.limiting_max_cdf(EdgeKind::Pendant, -40.0, &z).unwrap();
        assert!((far_left - 0.5).abs() < 1e-12);
        assert!(matches!(
            p.limiting_max_cdf(EdgeKind::Pendant, 0.0, &[]),
            Err(MalthusError::EmptySample)
        ));
    }

    #[test]
    fn laplace_exponent_matches_trapezoid_oracle() {
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        let phi = PiecewiseLinear::ramp(0.0, 1.0, 1.0);
        let psi = PiecewiseLinear::zero();
        let window = 3.0;
        let value = p.limiting_laplace_exponent(&phi, &psi, window).unwrap();

        // independent oracle: high-resolution trapezoid, truncated where
        // the integrand drops below 1e-14
        let total = p.alpha + p.beta;
        let integrand = |x: f64| {
            (p.alpha * (1.0 - (-phi.eval(x)).exp()) + p.beta * (1.0 - (-psi.eval(x)).exp()))
                * (-total * x).exp()
        };
        let mut hi = 1.0;
        while integrand(hi) >= 1e-14 {
            hi += 1.0;
        }
        let n = 1_000_000usize;
        let h = (hi - (-window)) / n as f64;
        let mut acc = 0.5 * (integrand(-window) + integrand(hi));
        for i in 1..n {
            acc += integrand(-window + h * i as f64);
        }
        let oracle = acc * h;
        assert!((value - oracle).abs() < 1e-6, "{value} vs oracle {oracle}");

        // closed form for this ramp: int_0^1 (e^{-2x} - e^{-3x}) dx + (1 - e^{-1}) e^{-2}/2
        let closed = (1.0 - (-2.0f64).exp()) / 2.0 - (1.0 - (-3.0f64).exp()) / 3.0
            + (1.0 - (-1.0f64).exp()) * (-2.0f64).exp() / 2.0;
        assert!((value - closed).abs() < 1e-11, "{value} vs closed {closed}");
    }

    #[test]
    fn laplace_trivial_and_symmetry() {
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        let zero = PiecewiseLinear::zero();
        assert_eq!(p.limiting_laplace(&zero, &zero, 3.0, &[1.0]).unwrap(), 1.0);

        // alpha = beta: swapping phi and psi leaves the value unchanged
        let phi = PiecewiseLinear::ramp(0.0, 1.0, 1.0);
        let psi = PiecewiseLinear::ramp(-1.0, 0.5, 2.0);
        let z = [0.3, 1.0, 2.2];
        let a = p.limiting_laplace(&phi, &psi, 3.0, &z).unwrap();
        let b = p.limiting_laplace(&psi, &phi, 3.0, &z).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn laplace_rejects_unsupported_functions() {
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        let below = PiecewiseLinear::ramp(-5.0, 1.0, 1.0);
        let zero = PiecewiseLinear::zero();
        assert!(matches!(
            p.limiting_laplace_exponent(&below, &zero, 3.0),
            Err(MalthusError::UnsupportedTestFunction(_))
        ));
        let jump = PiecewiseLinear::constant_from(0.0, 1.0);
        assert!(matches!(
            p.limiting_laplace_exponent(&jump, &zero, 3.0),
            Err(MalthusError::UnsupportedTestFunction(_))
        ));
    }

    #[test]
    fn census_limit_counting_recovers_growth_constant() {
        for model in [binary_ctgw(), correlated()] {
            let p = MalthusProfile::solve(&model).unwrap();
            let ones = PiecewiseLinear::constant_from(0.0, 1.0);
            let m = p.census_limit(&model, &ones).unwrap();
            assert!(
                (m - p.growth_constant).abs() < 1e-10,
                "{}: {m} vs {}",
                model.label(),
                p.growth_constant
            );
        }
    }

    #[test]
    fn census_limit_capped_age_closed_form() {
        // phi(a) = min(a, 1) for the binary CTGW: m = (1 - e^{-2}) / 2
        let model = binary_ctgw();
        let p = MalthusProfile::solve(&model).unwrap();
        let phi = PiecewiseLinear::ramp(0.0, 1.0, 1.0);
        let m = p.census_limit(&model, &phi).unwrap();
        let closed = 0.5 * (1.0 - (-2.0f64).exp());
        assert!((m - closed).abs() < 1e-10, "{m} vs {closed}");
        let zero = PiecewiseLinear::zero();
        assert_eq!(p.census_limit(&model, &zero).unwrap(), 0.0);
    }

    #[test]
    fn lattice_model_rejected_by_solver() {
        let model =
            LifetimeOffspringModel::fixed_lifetime(1.0, OffspringLaw::Constant { k: 2 }).unwrap();
        assert!(matches!(
            MalthusProfile::solve(&model),
            Err(MalthusError::Model(ModelError::Rejected { .. }))
        ));
    }
}
