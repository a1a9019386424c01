//! Exact multifractional covariance by quadrature, and a dense-factorization
//! sampler built on it.
//!
//! The harmonizable kernel gives, for the un-normalized process,
//!
//! ```text
//! Cov(X(s), X(t)) = int_R (e^{is xi} - 1)(e^{-it xi} - 1) |xi|^{-H(s)-H(t)-1} dxi.
//! ```
//!
//! The real part of the numerator is `1 + cos((s-t)xi) - cos(s xi) - cos(t xi)`,
//! which regroups into three singular cosine integrals
//! `F(s) + F(t) - F(|s-t|)` at exponent `alpha = H(s) + H(t)`; see
//! [`crate::quad`]. No unit-variance rescaling is applied here, so
//! comparisons against the normalized simulators must divide by
//! [`harmonizable_normalizer`] per time point.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::holder::HolderFunction;
use crate::path::{PathMeta, SamplePath};
use crate::quad::singular_cosine_integral_tol;
use crate::seed::stream_rng;

/// Absolute accuracy target of the covariance quadrature.
const COV_TOL: f64 = 1e-6;

/// Largest grid the dense sampler accepts (cubic factorization cost).
pub const MAX_EXACT_GRID: usize = 512;

/// Covariance of the un-normalized harmonizable mBm at times s, t in [0, 1].
pub fn mbm_covariance_exact(h: &HolderFunction, s: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(Error::invalid(format!(
            "times must lie in [0,1], got ({s}, {t})"
        )));
    }
    if s == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    let alpha = h.evaluate(s) + h.evaluate(t);
    let d = (s - t).abs();
    // Each term carries a third of the absolute budget.
    let f_s = singular_cosine_integral_tol(s, alpha, COV_TOL / 3.0)?;
    let f_t = singular_cosine_integral_tol(t, alpha, COV_TOL / 3.0)?;
    let f_d = singular_cosine_integral_tol(d, alpha, COV_TOL / 3.0)?;
    Ok(2.0 * (f_s + f_t - f_d))
}

/// Variance of the un-normalized harmonizable fBm at t = 1, i.e. the factor
/// separating the harmonizable convention from `E B(1)^2 = 1`.
pub fn harmonizable_normalizer(h: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&h) || h == 0.0 {
        return Err(Error::invalid(format!("h must be in (0,1), got {h}")));
    }
    Ok(4.0 * singular_cosine_integral_tol(1.0, 2.0 * h, COV_TOL / 4.0)?)
}

/// Exact Gaussian sample from the dense covariance matrix
/// `[mbm_covariance_exact(t_i, t_j)]`, by Cholesky factorization with
/// escalating diagonal jitter up to 1e-10.
pub fn simulate_mbm_exact(h: &HolderFunction, grid_n: usize, seed: u64) -> Result<SamplePath> {
    h.validate()?;
    if grid_n < 2 {
        return Err(Error::invalid("grid_n must be >= 2"));
    }
    if grid_n > MAX_EXACT_GRID {
        return Err(Error::invalid(format!(
            "grid_n must be <= {MAX_EXACT_GRID} for the dense sampler, got {grid_n}"
        )));
    }
    // X(0) = 0 exactly; factor only the interior + endpoint block.
    let n = grid_n;
    let mut cov = DMatrix::zeros(n, n);
    for i in 0..n {
        let ti = (i + 1) as f64 / n as f64;
        for j in i..n {
            let tj = (j + 1) as f64 / n as f64;
            let c = mbm_covariance_exact(h, ti, tj)?;
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    let mut factor = None;
    for jitter in [0.0, 1e-12, 1e-11, 1e-10] {
        let mut m = cov.clone();
        if jitter > 0.0 {
            for i in 0..n {
                m[(i, i)] += jitter;
            }
        }
        if let Some(chol) = m.cholesky() {
            factor = Some((chol, jitter));
            break;
        }
    }
    let (chol, jitter) = factor.ok_or(Error::NumericalFailure {
        msg: "covariance matrix is not positive semidefinite within jitter 1e-10".into(),
        achieved: 1e-10,
    })?;
    let mut rng = stream_rng(seed, "mbm-exact");
    let z = DMatrix::from_fn(n, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
    let x = chol.l() * z;
    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);
    values.extend(x.column(0).iter().copied());
    let meta = PathMeta::new("mbm-exact", Some(seed))
        .with_param("holder", serde_json::to_value(h)?)
        .with_param("grid_n", grid_n as u64)
        .with_param("jitter", jitter);
    SamplePath::new(values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::derive_seed;
    use crate::theory::fbm_covariance;
    use approx::assert_relative_eq;

    #[test]
    fn vanishes_at_the_origin() {
        let h = HolderFunction::bench_sinusoid();
        assert_eq!(mbm_covariance_exact(&h, 0.0, 0.7).unwrap(), 0.0);
        assert_eq!(mbm_covariance_exact(&h, 0.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn is_symmetric() {
        let h = HolderFunction::bench_sinusoid();
        for (s, t) in [(0.2, 0.9), (0.31, 0.32), (0.5, 1.0)] {
            let a = mbm_covariance_exact(&h, s, t).unwrap();
            let b = mbm_covariance_exact(&h, t, s).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_h_reproduces_fbm_correlation_structure() {
        // Dividing out the common normalization constant must leave the fBm
        // covariance exactly.
        for hv in [0.3, 0.5, 0.75] {
            let h = HolderFunction::constant(hv).unwrap();
            let norm = harmonizable_normalizer(hv).unwrap();
            for (s, t) in [(0.25, 0.75), (0.1, 0.9), (0.6, 0.6)] {
                let got = mbm_covariance_exact(&h, s, t).unwrap() / norm;
                let want = fbm_covariance(hv, s, t);
                assert_relative_eq!(got, want, max_relative = 1e-6, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn normalizer_is_brownian_at_half() {
        // At h = 1/2 the harmonizable variance at t = 1 is
        // int |e^{i xi} - 1|^2 / xi^2 dxi = 2 pi.
        assert_relative_eq!(
            harmonizable_normalizer(0.5).unwrap(),
            2.0 * std::f64::consts::PI,
            max_relative = 1e-8
        );
    }

    #[test]
    fn covariance_matrix_is_psd_on_small_grids() {
        let h = HolderFunction::bench_sinusoid();
        let n = 24;
        let m = DMatrix::from_fn(n, n, |i, j| {
            let ti = (i + 1) as f64 / n as f64;
            let tj = (j + 1) as f64 / n as f64;
            mbm_covariance_exact(&h, ti, tj).unwrap()
        });
        // Normalize to unit diagonal before the eigenvalue floor.
        let d: Vec<f64> = (0..n).map(|i| m[(i, i)].sqrt()).collect();
        let corr = DMatrix::from_fn(n, n, |i, j| m[(i, j)] / (d[i] * d[j]));
        let min = corr
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-8, "min normalized eigenvalue {min}");
    }

    #[test]
    fn exact_sampler_is_deterministic_and_respects_bounds() {
        let h = HolderFunction::constant(0.4).unwrap();
        let a = simulate_mbm_exact(&h, 16, 5).unwrap();
        let b = simulate_mbm_exact(&h, 16, 5).unwrap();
        assert_eq!(a.values(), b.values());
        assert_eq!(a.values()[0], 0.0);
        assert!(simulate_mbm_exact(&h, MAX_EXACT_GRID + 1, 5).is_err());
    }

    #[test]
    fn exact_sampler_brownian_increment_variance() {
        // Constant h = 1/2: increments i.i.d. with variance 2 pi / N under
        // the un-normalized convention.
        let h = HolderFunction::constant(0.5).unwrap();
        let n = 32;
        let scenarios = 1000;
        let mut sum = 0.0;
        let mut count = 0usize;
        for s in 0..scenarios {
            let p = simulate_mbm_exact(&h, n, derive_seed(13, &format!("exact-bm/{s}"))).unwrap();
            let v = p.values();
            for i in 1..=n {
                let d = v[i] - v[i - 1];
                sum += d * d;
                count += 1;
            }
        }
        let got = sum / count as f64;
        let want = 2.0 * std::f64::consts::PI / n as f64;
        // ~4 sigma for chi-square averaging with scenario-level batching.
        assert_relative_eq!(got, want, max_relative = 0.05);
    }

    #[test]
    fn exact_sampler_matches_quadrature_covariance() {
        // Sample covariance at probe pairs vs the quadrature kernel, within
        // 4 standard errors over 10^4 scenarios.
        let h = HolderFunction::bench_sinusoid();
        let n = 24;
        let scenarios = 10_000;
        let pairs = [(3usize, 17usize), (5, 9), (12, 21), (8, 8), (1, 23)];
        let mut sums = [[0.0f64; 2]; 5];
        for s in 0..scenarios {
            let p = simulate_mbm_exact(&h, n, derive_seed(14, &format!("exact-cov/{s}"))).unwrap();
            let v = p.values();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                let prod = v[i] * v[j];
                sums[k][0] += prod;
                sums[k][1] += prod * prod;
            }
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            let mean = sums[k][0] / scenarios as f64;
            let var = sums[k][1] / scenarios as f64 - mean * mean;
            let se = (var / scenarios as f64).sqrt();
            let want =
                mbm_covariance_exact(&h, i as f64 / n as f64, j as f64 / n as f64).unwrap();
            assert!(
                (mean - want).abs() < 4.0 * se,
                "pair ({i},{j}): got {mean}, want {want}, se {se}"
            );
        }
    }
}
