//! Catalogue of joint lifetime/offspring laws.
//!
//! A model is a joint law of `(T, L)`: an individual lives for `T` units
//! of time and leaves `L` children at its death. The catalogue fixes
//! three simulable families for which every constant appearing in the
//! limit laws has a closed form or a cheap quadrature:
//!
//! * [`LifetimeOffspringModel::exp_lifetime`] — `T` exponential, `L`
//!   independent (continuous-time Galton-Watson; tail exponent `beta`
//!   equals the rate);
//! * [`LifetimeOffspringModel::pareto_lifetime`] — `P(T > t) = (1+t)^-c`,
//!   `L` independent (heavy tail, `beta = 0`);
//! * [`LifetimeOffspringModel::correlated_poisson`] — `T` exponential and
//!   `L | T ~ 1 + Poisson(gamma T)` (genuinely correlated lifetime and
//!   brood size).
//!
//! A fourth variant, [`LifetimeOffspringModel::fixed_lifetime`], has a
//! lattice lifetime and exists as a negative exemplar: construction
//! succeeds, [`LifetimeOffspringModel::validate`] rejects it.
//!
//! Models are immutable after construction and safe to share across
//! threads; sampling draws from an externally supplied [`RunStream`].

use crate::quad::{self, QuadratureError, MOMENT_TOL};
use crate::rng::RunStream;
use std::fmt;
use thiserror::Error;

/// Standing assumptions a model is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Mean offspring number must lie in (1, infinity).
    Supercriticality,
    /// The lifetime law must not be supported on a lattice `a * N`.
    NonLattice,
    /// `E(exp(-alpha T) L log+ L)` must be finite.
    LLogLMoment,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Supercriticality => write!(f, "supercriticality"),
            Condition::NonLattice => write!(f, "non-lattice lifetime"),
            Condition::LLogLMoment => write!(f, "L log L moment"),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model rejected: {condition} violated ({detail})")]
    Rejected {
        condition: Condition,
        detail: String,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Offspring distribution on the nonnegative integers, with explicit pmf.
#[derive(Debug, Clone, PartialEq)]
pub enum OffspringLaw {
    /// Exactly `k` children.
    Constant { k: u32 },
    /// `0` children with probability `p0`, otherwise `k`.
    TwoPoint { p0: f64, k: u32 },
    /// Geometric on `{0, 1, 2, ...}` with the given mean.
    Geometric { mean: f64 },
}

impl OffspringLaw {
    fn check(&self) -> Result<(), ModelError> {
        match *self {
            OffspringLaw::Constant { .. } => Ok(()),
            OffspringLaw::TwoPoint { p0, k } => {
                if !(0.0..1.0).contains(&p0) {
                    return Err(ModelError::InvalidParameter(
                        "two-point p0 must lie in [0, 1)",
                    ));
                }
                if k < 2 {
                    return Err(ModelError::InvalidParameter(
                        "two-point k must be at least 2",
                    ));
                }
                Ok(())
            }
            OffspringLaw::Geometric { mean } => {
                if !mean.is_finite() || mean <= 0.0 {
                    return Err(ModelError::InvalidParameter(
                        "geometric mean must be positive and finite",
                    ));
                }
                Ok(())
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            OffspringLaw::Constant { k } => f64::from(k),
            OffspringLaw::TwoPoint { p0, k } => (1.0 - p0) * f64::from(k),
            OffspringLaw::Geometric { mean } => mean,
        }
    }

    pub fn pmf(&self, j: u32) -> f64 {
        match *self {
            OffspringLaw::Constant { k } => {
                if j == k {
                    1.0
                } else {
                    0.0
                }
            }
            OffspringLaw::TwoPoint { p0, k } => {
                if j == 0 {
                    p0
                } else if j == k {
                    1.0 - p0
                } else {
                    0.0
                }
            }
            OffspringLaw::Geometric { mean } => {
                let p = 1.0 / (1.0 + mean);
                p * (1.0 - p).powi(j as i32)
            }
        }
    }

    pub fn sample(&self, stream: &mut RunStream) -> u32 {
        match *self {
            OffspringLaw::Constant { k } => k,
            OffspringLaw::TwoPoint { p0, k } => {
                if stream.uniform_open() < p0 {
                    0
                } else {
                    k
                }
            }
            OffspringLaw::Geometric { mean } => {
                let p = 1.0 / (1.0 + mean);
                // inverse cdf: P(L >= j) = (1-p)^j
                (stream.uniform_open().ln() / (1.0 - p).ln()) as u32
            }
        }
    }
}

impl fmt::Display for OffspringLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OffspringLaw::Constant { k } => write!(f, "constant(k={k})"),
            OffspringLaw::TwoPoint { p0, k } => write!(f, "two-point(p0={p0}, k={k})"),
            OffspringLaw::Geometric { mean } => write!(f, "geometric(mean={mean})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Family {
    ExpLifetime {
        rate: f64,
        offspring: OffspringLaw,
    },
    ParetoLifetime {
        shape: f64,
        offspring: OffspringLaw,
    },
    CorrelatedPoisson {
        rate: f64,
        gamma: f64,
    },
    FixedLifetime {
        lifetime: f64,
        offspring: OffspringLaw,
    },
}

/// A validated joint lifetime/offspring law.
#[derive(Debug, Clone, PartialEq)]
pub struct LifetimeOffspringModel {
    family: Family,
    label: String,
}

/// Outcome of one standing-assumption check.
#[derive(Debug, Clone)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub passed: bool,
    pub note: String,
}

/// Pass/fail listing for the standing assumptions.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<ConditionCheck>,
}

impl LifetimeOffspringModel {
    /// `T` exponential with the given rate, `L` independent.
    pub fn exp_lifetime(rate: f64, offspring: OffspringLaw) -> Result<Self, ModelError> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(ModelError::InvalidParameter(
                "exponential rate must be positive",
            ));
        }
        offspring.check()?;
        let label = format!("exp(rate={rate})/{offspring}");
        Self::supercritical(Family::ExpLifetime { rate, offspring }, label)
    }

    /// `P(T > t) = (1 + t)^-shape`, `L` independent.
    pub fn pareto_lifetime(shape: f64, offspring: OffspringLaw) -> Result<Self, ModelError> {
        if !shape.is_finite() || shape <= 0.0 {
            return Err(ModelError::InvalidParameter(
                "pareto shape must be positive",
            ));
        }
        offspring.check()?;
        let label = format!("pareto(c={shape})/{offspring}");
        Self::supercritical(Family::ParetoLifetime { shape, offspring }, label)
    }

    /// `T` exponential with the given rate, `L | T ~ 1 + Poisson(gamma T)`.
    pub fn correlated_poisson(rate: f64, gamma: f64) -> Result<Self, ModelError> {
        if !rate.is_finite() || rate <= 0.0 {
            return Err(ModelError::InvalidParameter(
                "exponential rate must be positive",
            ));
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(ModelError::InvalidParameter("gamma must be nonnegative"));
        }
        let label = format!("exp(rate={rate})*poisson(gamma={gamma})");
        Self::supercritical(Family::CorrelatedPoisson { rate, gamma }, label)
    }

    /// Deterministic lifetime `t0`; fails [`validate`](Self::validate)
    /// because the lifetime law is supported on the lattice `t0 * N`.
    pub fn fixed_lifetime(lifetime: f64, offspring: OffspringLaw) -> Result<Self, ModelError> {
        if !lifetime.is_finite() || lifetime <= 0.0 {
            return Err(ModelError::InvalidParameter(
                "fixed lifetime must be positive",
            ));
        }
        offspring.check()?;
        let label = format!("fixed(t={lifetime})/{offspring}");
        Self::supercritical(
            Family::FixedLifetime {
                lifetime,
                offspring,
            },
            label,
        )
    }

    fn supercritical(family: Family, label: String) -> Result<Self, ModelError> {
        let model = Self { family, label };
        let mean = model.mean_offspring();
        if !(mean > 1.0 && mean.is_finite()) {
            return Err(ModelError::Rejected {
                condition: Condition::Supercriticality,
                detail: format!("mean offspring {mean} not in (1, inf)"),
            });
        }
        Ok(model)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Mean number of children `E(L)`.
    pub fn mean_offspring(&self) -> f64 {
        match &self.family {
            Family::ExpLifetime { offspring, .. }
            | Family::ParetoLifetime { offspring, .. }
            | Family::FixedLifetime { offspring, .. } => offspring.mean(),
            Family::CorrelatedPoisson { rate, gamma } => 1.0 + gamma / rate,
        }
    }

    /// `E(L | T = t)`.
    pub fn conditional_mean_offspring(&self, t: f64) -> f64 {
        match &self.family {
            Family::CorrelatedPoisson { gamma, .. } => 1.0 + gamma * t,
            _ => self.mean_offspring(),
        }
    }

    /// Lifetime density at `t`, if the lifetime law has one.
    pub fn lifetime_density(&self, t: f64) -> Option<f64> {
        match &self.family {
            Family::ExpLifetime { rate, .. } | Family::CorrelatedPoisson { rate, .. } => {
                Some(rate * (-rate * t).exp())
            }
            Family::ParetoLifetime { shape, .. } => Some(shape * (1.0 + t).powf(-shape - 1.0)),
            Family::FixedLifetime { .. } => None,
        }
    }

    /// One joint draw `(t, l)`; the lifetime is drawn first, then the
    /// brood size (conditionally on the lifetime where they correlate).
    pub fn sample_pair(&self, stream: &mut RunStream) -> (f64, u32) {
        match &self.family {
            Family::ExpLifetime { rate, offspring } => {
                let t = stream.exponential(*rate);
                (t, offspring.sample(stream))
            }
            Family::ParetoLifetime { shape, offspring } => {
                let t = stream.uniform_open().powf(-1.0 / shape) - 1.0;
                (t, offspring.sample(stream))
            }
            Family::CorrelatedPoisson { rate, gamma } => {
                let t = stream.exponential(*rate);
                (t, 1 + stream.poisson(gamma * t))
            }
            Family::FixedLifetime {
                lifetime,
                offspring,
            } => (*lifetime, offspring.sample(stream)),
        }
    }

    /// Exact survival probability `P(T > ell)`.
    pub fn tail(&self, ell: f64) -> f64 {
        debug_assert!(ell >= 0.0);
        match &self.family {
            Family::ExpLifetime { rate, .. } | Family::CorrelatedPoisson { rate, .. } => {
                (-rate * ell).exp()
            }
            Family::ParetoLifetime { shape, .. } => (1.0 + ell).powf(-shape),
            Family::FixedLifetime { lifetime, .. } => {
                if ell < *lifetime {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `ln P(T > ell)`, exact in log space (no underflow for large `ell`).
    pub fn log_tail(&self, ell: f64) -> f64 {
        debug_assert!(ell >= 0.0);
        match &self.family {
            Family::ExpLifetime { rate, .. } | Family::CorrelatedPoisson { rate, .. } => {
                -rate * ell
            }
            Family::ParetoLifetime { shape, .. } => -shape * ell.ln_1p(),
            Family::FixedLifetime { lifetime, .. } => {
                if ell < *lifetime {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }

    /// Exponential decay rate `beta` of the conditional lifetime tail:
    /// `lim P(T > t + a | T > t) = exp(-beta a)`.
    pub fn tail_exponent(&self) -> f64 {
        match &self.family {
            Family::ExpLifetime { rate, .. } | Family::CorrelatedPoisson { rate, .. } => *rate,
            Family::ParetoLifetime { .. } => 0.0,
            // The conditional tail collapses instantly past the atom.
            Family::FixedLifetime { .. } => f64::INFINITY,
        }
    }

    /// `E(L exp(-a T))`, the discounted offspring moment.
    pub fn discounted_offspring_moment(&self, a: f64) -> Result<f64, ModelError> {
        debug_assert!(a >= 0.0);
        match &self.family {
            Family::ExpLifetime { rate, offspring } => Ok(offspring.mean() * rate / (rate + a)),
            Family::ParetoLifetime { offspring, .. } => {
                Ok(offspring.mean() * self.lifetime_laplace(a)?)
            }
            Family::CorrelatedPoisson { rate, gamma } => {
                let s = rate + a;
                Ok(rate / s + gamma * rate / (s * s))
            }
            Family::FixedLifetime {
                lifetime,
                offspring,
            } => Ok(offspring.mean() * (-a * lifetime).exp()),
        }
    }

    /// `E(a T exp(-a T) L)`, the tilted lifetime moment whose reciprocal
    /// at `a = alpha` is the constant `c_star`.
    pub fn weighted_lifetime_moment(&self, a: f64) -> Result<f64, ModelError> {
        assert!(a > 0.0, "the weighted lifetime moment requires a > 0");
        match &self.family {
            Family::ExpLifetime { rate, offspring } => {
                let s = rate + a;
                Ok(a * offspring.mean() * rate / (s * s))
            }
            Family::ParetoLifetime { shape, offspring } => {
                let c = *shape;
                // t * density <= (1+t)^-c <= 1
                let m = quad::integrate_exp_decay(
                    |t| t * c * (1.0 + t).powf(-c - 1.0),
                    a,
                    1.0,
                    MOMENT_TOL,
                )?;
                Ok(a * offspring.mean() * m)
            }
            Family::CorrelatedPoisson { rate, gamma } => {
                let s = rate + a;
                // E(T e^{-aT}) + gamma E(T^2 e^{-aT}) under the exponential density
                Ok(a * (rate / (s * s) + gamma * 2.0 * rate / (s * s * s)))
            }
            Family::FixedLifetime {
                lifetime,
                offspring,
            } => Ok(a * lifetime * (-a * lifetime).exp() * offspring.mean()),
        }
    }

    /// `E(exp(-a T))`, the Laplace transform of the lifetime.
    pub fn lifetime_laplace(&self, a: f64) -> Result<f64, ModelError> {
        debug_assert!(a >= 0.0);
        if a == 0.0 {
            return Ok(1.0);
        }
        match &self.family {
            Family::ExpLifetime { rate, .. } | Family::CorrelatedPoisson { rate, .. } => {
                Ok(rate / (rate + a))
            }
            Family::ParetoLifetime { shape, .. } => {
                let c = *shape;
                let v =
                    quad::integrate_exp_decay(|t| c * (1.0 + t).powf(-c - 1.0), a, c, MOMENT_TOL)?;
                Ok(v)
            }
            Family::FixedLifetime { lifetime, .. } => Ok((-a * lifetime).exp()),
        }
    }

    /// Quadrature route for `E(L exp(-a T))`, independent of the closed
    /// forms; only defined for the density families.
    pub fn discounted_offspring_moment_by_quadrature(&self, a: f64) -> Result<f64, ModelError> {
        assert!(a > 0.0);
        let cap = self.density_moment_cap();
        let v = quad::integrate_exp_decay(
            |t| {
                self.conditional_mean_offspring(t)
                    * self.lifetime_density(t).expect("density family")
            },
            a,
            cap,
            MOMENT_TOL,
        )?;
        Ok(v)
    }

    /// Quadrature route for `E(a T exp(-a T) L)`.
    pub fn weighted_lifetime_moment_by_quadrature(&self, a: f64) -> Result<f64, ModelError> {
        assert!(a > 0.0);
        let cap = a * self.density_moment_cap();
        let v = quad::integrate_exp_decay(
            |t| {
                a * t
                    * self.conditional_mean_offspring(t)
                    * self.lifetime_density(t).expect("density family")
            },
            a,
            cap,
            MOMENT_TOL,
        )?;
        Ok(v)
    }

    /// Quadrature route for `E(exp(-a T))`.
    pub fn lifetime_laplace_by_quadrature(&self, a: f64) -> Result<f64, ModelError> {
        assert!(a > 0.0);
        let v = quad::integrate_exp_decay(
            |t| self.lifetime_density(t).expect("density family"),
            a,
            self.density_moment_cap(),
            MOMENT_TOL,
        )?;
        Ok(v)
    }

    /// Cap `C` with `cond_mean(t) * density(t) * max(1, t) <= C (1+t)^2`.
    fn density_moment_cap(&self) -> f64 {
        match &self.family {
            Family::ExpLifetime { rate, offspring } => rate * offspring.mean(),
            Family::ParetoLifetime { shape, offspring } => shape * offspring.mean(),
            Family::CorrelatedPoisson { rate, gamma } => rate * gamma.max(1.0),
            Family::FixedLifetime { .. } => panic!("no density for the fixed-lifetime family"),
        }
    }

    /// Checks the standing assumptions and reports each one.
    pub fn validate(&self) -> Result<ValidationReport, ModelError> {
        let mut checks = Vec::new();

        let mean = self.mean_offspring();
        let supercritical = mean > 1.0 && mean.is_finite();
        checks.push(ConditionCheck {
            condition: Condition::Supercriticality,
            passed: supercritical,
            note: format!("mean offspring = {mean}"),
        });

        let (non_lattice, lattice_note) = match &self.family {
            Family::FixedLifetime { lifetime, .. } => {
                (false, format!("lifetime concentrated on {lifetime} * N"))
            }
            _ => (true, "lifetime law has a density".to_string()),
        };
        checks.push(ConditionCheck {
            condition: Condition::NonLattice,
            passed: non_lattice,
            note: lattice_note,
        });

        // Finite for the whole catalogue: every offspring law here has
        // finite E(L log L) (bounded support or geometric tail), and the
        // correlated family has E(L^2) < inf since T has all moments.
        checks.push(ConditionCheck {
            condition: Condition::LLogLMoment,
            passed: true,
            note: "finite by the offspring law's light tail".to_string(),
        });

        if let Some(failed) = checks.iter().find(|c| !c.passed) {
            return Err(ModelError::Rejected {
                condition: failed.condition,
                detail: failed.note.clone(),
            });
        }
        Ok(ValidationReport { checks })
    }
}

impl fmt::Display for LifetimeOffspringModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}
