//! Closed-form and quadrature oracles for generalized-increment variances
//! and covariances of fractional Brownian motion.
//!
//! For a sequence `a` with Q >= 1 vanishing moments and an fBm `B_H` with
//! `E B_H(t)^2 = t^(2H)`,
//!
//! ```text
//! Var(sum_k a_k B_H((j+k)/n)) = C_a(H) n^(-2H),
//! C_a(alpha) = -1/2 sum_{j,k} a_j a_k |j-k|^(2 alpha).
//! ```
//!
//! The same constant equals the normalized harmonizable integral
//! `int |A(eta)|^2 |eta|^(-2a-1) deta / int |1-e^(i eta)|^2 |eta|^(-2a-1) deta`
//! with `A(eta) = sum_k a_k e^(ik eta)`; [`c_tilde_integral`] evaluates that
//! representation numerically as an independent cross-check of
//! [`c_tilde_closed`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::increments::IncrementSequence;
use crate::quad::singular_cosine_integral_tol;

/// Quadrature tolerance for the integral route.
const INTEGRAL_TOL: f64 = 1e-6;

/// The variance constant by the exact finite sum
/// `-1/2 sum_{j,k} a_j a_k |j-k|^(2 alpha)`.
pub fn c_tilde_closed(a: &IncrementSequence, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let c = a.coefficients();
    let mut sum = 0.0;
    for (j, &aj) in c.iter().enumerate() {
        for (k, &ak) in c.iter().enumerate() {
            if j != k {
                sum += aj * ak * ((j as f64 - k as f64).abs()).powf(2.0 * alpha);
            }
        }
    }
    Ok(-0.5 * sum)
}

/// The variance constant by quadrature of the harmonizable representation.
///
/// `|A(eta)|^2` expands into the cosine polynomial
/// `-2 sum_{m>=1} b_m (1 - cos(m eta))` with autocorrelations
/// `b_m = sum_j a_j a_{j+m}` (the constant term drops because `A(0) = 0`),
/// so the integral reduces to singular cosine integrals evaluated
/// numerically per lag. The unit-variance normalization divides by the
/// first-difference sequence's integral.
pub fn c_tilde_integral(a: &IncrementSequence, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let beta = 2.0 * alpha;
    let c = a.coefficients();
    let p = a.order_p();
    let mut numerator = 0.0;
    for m in 1..=p {
        let b_m: f64 = (0..=p - m).map(|j| c[j] * c[j + m]).sum();
        if b_m != 0.0 {
            numerator += -2.0 * b_m * singular_cosine_integral_tol(m as f64, beta, INTEGRAL_TOL)?;
        }
    }
    let denominator = 2.0 * singular_cosine_integral_tol(1.0, beta, INTEGRAL_TOL)?;
    Ok(numerator / denominator)
}

/// A variance constant with both evaluation routes cross-checked.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceConstant {
    pub alpha: f64,
    pub value: f64,
    pub integral_value: f64,
}

impl VarianceConstant {
    /// Computes both routes and verifies they agree within 1e-4 relative.
    pub fn new(a: &IncrementSequence, alpha: f64) -> Result<Self> {
        let value = c_tilde_closed(a, alpha)?;
        let integral_value = c_tilde_integral(a, alpha)?;
        if value <= 0.0 {
            return Err(Error::NumericalFailure {
                msg: format!("variance constant must be positive, got {value}"),
                achieved: value,
            });
        }
        let rel = (integral_value - value).abs() / value;
        if rel > 1e-4 {
            return Err(Error::NumericalFailure {
                msg: format!("integral and closed-form C(alpha={alpha}) disagree"),
                achieved: rel,
            });
        }
        Ok(VarianceConstant {
            alpha,
            value,
            integral_value,
        })
    }
}

/// Covariance of fBm with `E B(t)^2 = t^(2h)`.
pub fn fbm_covariance(h: f64, s: f64, t: f64) -> f64 {
    0.5 * (s.abs().powf(2.0 * h) + t.abs().powf(2.0 * h) - (s - t).abs().powf(2.0 * h))
}

/// Exact covariance of two generalized fBm increments on the grid 1/n:
/// `Cov(sum_j a_j B((k+j)/n), sum_l a_l B((k2+l)/n))`.
pub fn fbm_increment_covariance(
    a: &IncrementSequence,
    h: f64,
    grid_n: usize,
    k: usize,
    k2: usize,
) -> Result<f64> {
    if !(0.0..1.0).contains(&h) || h == 0.0 {
        return Err(Error::invalid(format!("h must be in (0,1), got {h}")));
    }
    let p = a.order_p();
    if grid_n < p + 2 {
        return Err(Error::invalid("grid too small for the sequence order"));
    }
    let max_index = grid_n - p - 1;
    if k > max_index || k2 > max_index {
        return Err(Error::invalid(format!(
            "increment index out of range: need k, k2 <= {max_index}, got ({k}, {k2})"
        )));
    }
    let n = grid_n as f64;
    let c = a.coefficients();
    let mut sum = 0.0;
    for (j, &aj) in c.iter().enumerate() {
        for (l, &al) in c.iter().enumerate() {
            sum += aj * al * fbm_covariance(h, (k + j) as f64 / n, (k2 + l) as f64 / n);
        }
    }
    Ok(sum)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha <= 0.0 || alpha >= 1.0 || !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be in (0,1), got {alpha}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::make_difference_sequence;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_first_difference_is_one() {
        let a = make_difference_sequence(1).unwrap();
        for alpha in [0.1, 0.37, 0.5, 0.9] {
            assert_relative_eq!(c_tilde_closed(&a, alpha).unwrap(), 1.0);
        }
    }

    #[test]
    fn closed_form_second_difference_brownian() {
        // -1/2 (2(-2-2) + 2*2) = 2: a second difference of Bm is the
        // difference of two independent unit-grid increments.
        let a = make_difference_sequence(2).unwrap();
        assert_relative_eq!(c_tilde_closed(&a, 0.5).unwrap(), 2.0);
    }

    #[test]
    fn integral_first_difference_is_one_for_any_alpha() {
        let a = make_difference_sequence(1).unwrap();
        for alpha in [0.1, 0.33, 0.5, 0.77, 0.9] {
            assert_relative_eq!(c_tilde_integral(&a, alpha).unwrap(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn integral_agrees_with_closed_form() {
        for q in 1..=5 {
            let a = make_difference_sequence(q).unwrap();
            for i in 1..=9 {
                let alpha = i as f64 / 10.0;
                let closed = c_tilde_closed(&a, alpha).unwrap();
                let integral = c_tilde_integral(&a, alpha).unwrap();
                assert_relative_eq!(integral, closed, max_relative = 1e-4);
            }
        }
    }

    #[test]
    fn constant_is_positive_on_sweep() {
        for q in 1..=5 {
            let a = make_difference_sequence(q).unwrap();
            let mut alpha = 0.01;
            while alpha < 1.0 {
                assert!(
                    c_tilde_closed(&a, alpha).unwrap() > 0.0,
                    "C must be positive at q={q} alpha={alpha}"
                );
                alpha += 0.01;
            }
        }
    }

    #[test]
    fn alpha_domain_is_open_unit_interval() {
        let a = make_difference_sequence(2).unwrap();
        assert!(c_tilde_closed(&a, 0.0).is_err());
        assert!(c_tilde_closed(&a, 1.0).is_err());
        assert!(c_tilde_integral(&a, 1.5).is_err());
    }

    #[test]
    fn variance_identity_on_the_diagonal() {
        // Var(D_a B_{j,n}) = C_a(h) n^(-2h)
        for (q, h) in [(2usize, 0.3), (2, 0.7), (3, 0.5), (4, 0.62)] {
            let a = make_difference_sequence(q).unwrap();
            let n = 128;
            for k in [0usize, 5, 100] {
                let var = fbm_increment_covariance(&a, h, n, k, k).unwrap();
                let want = c_tilde_closed(&a, h).unwrap() * (n as f64).powf(-2.0 * h);
                assert_relative_eq!(var, want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn brownian_second_difference_decorrelates() {
        let a = make_difference_sequence(2).unwrap();
        for gap in 2..30 {
            let cov = fbm_increment_covariance(&a, 0.5, 256, 10, 10 + gap).unwrap();
            assert!(cov.abs() < 1e-15, "gap {gap}: {cov}");
        }
    }

    #[test]
    fn covariance_decay_ratio_is_bounded() {
        // |Cov| <= const * n^(-2h) |k-k2|^(-(2Q-2h)) over gaps 2..=100.
        let a = make_difference_sequence(2).unwrap();
        let (h, n, q) = (0.3, 512usize, 2.0);
        let scale = (n as f64).powf(-2.0 * h);
        let mut max_ratio: f64 = 0.0;
        for gap in 2..=100usize {
            let cov = fbm_increment_covariance(&a, h, n, 50, 50 + gap).unwrap();
            let envelope = scale * (gap as f64).powf(-(2.0 * q - 2.0 * h));
            max_ratio = max_ratio.max(cov.abs() / envelope);
        }
        assert!(
            max_ratio < 10.0,
            "decay envelope violated: max ratio {max_ratio}"
        );
    }

    #[test]
    fn increment_covariance_matrix_is_psd() {
        use nalgebra::DMatrix;
        let a = make_difference_sequence(2).unwrap();
        for h in [0.3, 0.5, 0.8] {
            let w = 64;
            let m = DMatrix::from_fn(w, w, |i, j| {
                fbm_increment_covariance(&a, h, 256, i, j).unwrap()
            });
            let trace = m.trace();
            let eig = m.symmetric_eigenvalues();
            let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min >= -1e-8 * trace, "h={h}: min eigenvalue {min}");
        }
    }

    #[test]
    fn index_bounds_are_checked() {
        let a = make_difference_sequence(2).unwrap();
        assert!(fbm_increment_covariance(&a, 0.5, 64, 62, 0).is_err());
        assert!(fbm_increment_covariance(&a, 0.5, 64, 61, 61).is_ok());
        assert!(fbm_increment_covariance(&a, 1.2, 64, 0, 0).is_err());
    }

    #[test]
    fn variance_constant_cross_checks() {
        let a = make_difference_sequence(3).unwrap();
        let vc = VarianceConstant::new(&a, 0.42).unwrap();
        assert!(vc.value > 0.0);
        assert_relative_eq!(vc.value, vc.integral_value, max_relative = 1e-4);
    }
}
