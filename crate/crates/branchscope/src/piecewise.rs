//! Piecewise-linear test functions and census characteristics.
//!
//! All bounded nonnegative functions the toolkit integrates against or
//! sums over individuals are represented this way: a sorted knot list,
//! zero to the left of the first knot, linear interpolation between
//! knots, constant at the last knot's value to the right. This class is
//! closed under the requirements of the limiting-law evaluators
//! (bounded, continuous on the support, nonnegative) and integrates in
//! closed form per segment.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PiecewiseError {
    #[error("knot list is empty")]
    Empty,
    #[error("knot abscissae must be finite and strictly increasing (index {0})")]
    UnorderedKnots(usize),
    #[error("knot values must be finite and nonnegative (index {0})")]
    NegativeValue(usize),
}

/// Bounded nonnegative piecewise-linear function on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self, PiecewiseError> {
        if knots.is_empty() {
            return Err(PiecewiseError::Empty);
        }
        for (i, &(x, y)) in knots.iter().enumerate() {
            if !x.is_finite() || (i > 0 && x <= knots[i - 1].0) {
                return Err(PiecewiseError::UnorderedKnots(i));
            }
            if !y.is_finite() || y < 0.0 {
                return Err(PiecewiseError::NegativeValue(i));
            }
        }
        Ok(Self { knots })
    }

    /// The zero function.
    pub fn zero() -> Self {
        Self {
            knots: vec![(0.0, 0.0)],
        }
    }

    /// Constant `c` on `[from, infinity)`, zero below.
    pub fn constant_from(from: f64, c: f64) -> Self {
        Self {
            knots: vec![(from, c)],
        }
    }

    /// Ramp: zero up to `x0`, linear to `height` over `width`, constant after.
    pub fn ramp(x0: f64, width: f64, height: f64) -> Self {
        assert!(width > 0.0 && height >= 0.0);
        Self {
            knots: vec![(x0, 0.0), (x0 + width, height)],
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn first_knot(&self) -> (f64, f64) {
        self.knots[0]
    }

    pub fn last_knot(&self) -> (f64, f64) {
        *self.knots.last().expect("nonempty by construction")
    }

    /// Upper bound of the function values.
    pub fn sup(&self) -> f64 {
        self.knots.iter().map(|&(_, y)| y).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.knots.iter().all(|&(_, y)| y == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if x < k[0].0 {
            return 0.0;
        }
        if x >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        // Binary search for the segment containing x.
        let i = match k.binary_search_by(|&(kx, _)| kx.partial_cmp(&x).unwrap()) {
            Ok(i) => return k[i].1,
            Err(i) => i, // first knot strictly greater than x; i >= 1 here
        };
        let (x0, y0) = k[i - 1];
        let (x1, y1) = k[i];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}
