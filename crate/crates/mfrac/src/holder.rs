//! Specifications of the pointwise Hölder exponent function H(t).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Grid density used to validate and bound non-constant H functions.
const CHECK_GRID: usize = 10_000;

/// A time-varying Hölder exponent on [0, 1] with 0 < inf H <= sup H < 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HolderFunction {
    Constant { h: f64 },
    /// `h0 + amplitude * sin(2 pi frequency t)`.
    Sinusoid {
        h0: f64,
        amplitude: f64,
        frequency: f64,
    },
    /// Piecewise-linear interpolation of `(t, H)` pairs covering [0, 1].
    Tabulated { points: Vec<(f64, f64)> },
}

impl HolderFunction {
    pub fn constant(h: f64) -> Result<Self> {
        let f = HolderFunction::Constant { h };
        f.validate()?;
        Ok(f)
    }

    pub fn sinusoid(h0: f64, amplitude: f64, frequency: f64) -> Result<Self> {
        let f = HolderFunction::Sinusoid {
            h0,
            amplitude,
            frequency,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Result<Self> {
        let f = HolderFunction::Tabulated { points };
        f.validate()?;
        Ok(f)
    }

    /// The paper's benchmark exponent `0.5 + 0.3 sin(2 pi t)`.
    pub fn bench_sinusoid() -> Self {
        HolderFunction::Sinusoid {
            h0: 0.5,
            amplitude: 0.3,
            frequency: 1.0,
        }
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            HolderFunction::Constant { h } => *h,
            HolderFunction::Sinusoid {
                h0,
                amplitude,
                frequency,
            } => h0 + amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin(),
            HolderFunction::Tabulated { points } => {
                if t <= points[0].0 {
                    return points[0].1;
                }
                if t >= points[points.len() - 1].0 {
                    return points[points.len() - 1].1;
                }
                let i = points.partition_point(|p| p.0 <= t) - 1;
                let (t0, h0) = points[i];
                let (t1, h1) = points[i + 1];
                if t1 == t0 {
                    return h0;
                }
                h0 + (h1 - h0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// (inf H, sup H) over [0, 1], evaluated on a 10^4-point grid for
    /// non-constant kinds.
    pub fn range(&self) -> (f64, f64) {
        match self {
            HolderFunction::Constant { h } => (*h, *h),
            _ => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..=CHECK_GRID {
                    let v = self.evaluate(i as f64 / CHECK_GRID as f64);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                (lo, hi)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let HolderFunction::Tabulated { points } = self {
            if points.len() < 2 {
                return Err(Error::invalid("tabulated H needs at least 2 points"));
            }
            if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                return Err(Error::invalid("tabulated H times must strictly increase"));
            }
        }
        let (lo, hi) = self.range();
        if !(lo > 0.0 && hi < 1.0 && lo.is_finite() && hi.is_finite()) {
            return Err(Error::invalid(format!(
                "H must satisfy 0 < inf H <= sup H < 1 on [0,1], got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sinusoid_evaluates_h0_plus_a_sin() {
        let h = HolderFunction::bench_sinusoid();
        assert_relative_eq!(h.evaluate(0.0), 0.5);
        assert_relative_eq!(h.evaluate(0.25), 0.8);
        assert_relative_eq!(h.evaluate(0.75), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn range_bounds_are_enforced() {
        assert!(HolderFunction::constant(0.5).is_ok());
        assert!(HolderFunction::constant(0.0).is_err());
        assert!(HolderFunction::constant(1.0).is_err());
        assert!(HolderFunction::sinusoid(0.5, 0.6, 1.0).is_err());
        let (lo, hi) = HolderFunction::bench_sinusoid().range();
        assert_relative_eq!(lo, 0.2, epsilon = 1e-6);
        assert_relative_eq!(hi, 0.8, epsilon = 1e-6);
    }

    #[test]
    fn tabulated_interpolates_and_validates() {
        let h = HolderFunction::tabulated(vec![(0.0, 0.3), (0.5, 0.7), (1.0, 0.4)]).unwrap();
        assert_relative_eq!(h.evaluate(0.25), 0.5);
        assert_relative_eq!(h.evaluate(0.75), 0.55);
        assert!(HolderFunction::tabulated(vec![(0.0, 0.3), (0.0, 0.7)]).is_err());
        assert!(HolderFunction::tabulated(vec![(0.0, 0.3), (1.0, 1.2)]).is_err());
    }
}
