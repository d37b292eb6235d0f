//! Adaptive quadrature for the moment functionals.
//!
//! All integrands in this crate are smooth between known break points and
//! exponentially damped at infinity, so adaptive Simpson with Richardson
//! correction plus a certified exponential tail bound is enough to reach
//! absolute tolerances of 1e-12.

use thiserror::Error;

/// Absolute tolerance used by the moment functionals.
pub const MOMENT_TOL: f64 = 1e-12;
/// Budget on integrand evaluations per integral.
pub const EVAL_BUDGET: usize = 1_000_000;

const MAX_DEPTH: u32 = 60;
// Panels must split a few times before the error estimate is trusted,
// otherwise an integrand whose mass sits between the initial sample
// points can pass for zero.
const MIN_DEPTH: u32 = 3;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("quadrature did not reach tolerance within {0} evaluations")]
    BudgetExhausted(usize),
    #[error("integrand tail does not decay below tolerance within a finite horizon")]
    TailTooHeavy,
}

struct Ctx<'a, F: Fn(f64) -> f64> {
    f: &'a F,
    evals: usize,
}

impl<F: Fn(f64) -> f64> Ctx<'_, F> {
    fn eval(&mut self, x: f64) -> Result<f64, QuadratureError> {
        if self.evals >= EVAL_BUDGET {
            return Err(QuadratureError::BudgetExhausted(EVAL_BUDGET));
        }
        self.evals += 1;
        Ok((self.f)(x))
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    ctx: &mut Ctx<F>,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64, QuadratureError> {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = ctx.eval(lm)?;
    let frm = ctx.eval(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || (depth >= MIN_DEPTH && delta.abs() <= 15.0 * eps) {
        return Ok(left + right + delta / 15.0);
    }
    let half = 0.5 * eps;
    Ok(
        simpson_step(ctx, a, fa, m, fm, lm, flm, left, half, depth + 1)?
            + simpson_step(ctx, m, fm, b, fb, rm, frm, right, half, depth + 1)?,
    )
}

/// Adaptive Simpson integral of `f` over `[a, b]` with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    let mut ctx = Ctx { f: &f, evals: 0 };
    let fa = ctx.eval(a)?;
    let fb = ctx.eval(b)?;
    let m = 0.5 * (a + b);
    let fm = ctx.eval(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&mut ctx, a, fa, b, fb, m, fm, whole, tol, 0)
}

/// Integral of `f` over consecutive segments `[points[0], points[n-1]]`,
/// splitting at every interior point so that kinks never straddle a panel.
pub fn integrate_segments<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol: f64,
) -> Result<f64, QuadratureError> {
    let spans = points.len().saturating_sub(1);
    if spans == 0 {
        return Ok(0.0);
    }
    let per = tol / spans as f64;
    let mut total = 0.0;
    for w in points.windows(2) {
        total += integrate(&f, w[0], w[1], per)?;
    }
    Ok(total)
}

/// Integral of `h(t) * exp(-rate * t)` over `[0, infinity)`.
///
/// `growth_cap` must satisfy `|h(t)| <= growth_cap * (1 + t)^2` for all
/// `t >= 0`; every moment integrand in this crate does. The horizon is
/// grown until the certified closed-form remainder for the capped
/// integrand drops below half the tolerance, and the finite part is
/// handled adaptively.
pub fn integrate_exp_decay<F>(
    h: F,
    rate: f64,
    growth_cap: f64,
    tol: f64,
) -> Result<f64, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    assert!(rate > 0.0, "exponential damping rate must be positive");
    // integral of (1+t)^2 e^{-r t} over [s, inf)
    let remainder = |s: f64| {
        let u = 1.0 + s;
        growth_cap
            * (-rate * s).exp()
            * (u * u / rate + 2.0 * u / (rate * rate) + 2.0 / (rate * rate * rate))
    };
    let mut horizon = (1.0f64).max(2.0 / rate);
    while remainder(horizon) > 0.5 * tol {
        horizon *= 1.5;
        if horizon > 1e9 {
            return Err(QuadratureError::TailTooHeavy);
        }
    }
    // Dyadic initial break points keep the exponentially concentrated
    // mass near zero visible to the adaptive refinement.
    let mut points = vec![0.0];
    let mut x = 1.0 / rate;
    while x < horizon {
        points.push(x);
        x *= 2.0;
    }
    points.push(horizon);
    integrate_segments(|t| h(t) * (-rate * t).exp(), &points, 0.5 * tol)
}
