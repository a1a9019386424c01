//! Circulant-embedding sampler for fractional Gaussian noise.
//!
//! The covariance of unit-spacing fGn is embedded in a circulant matrix of
//! size m >= 2n whose eigenvalues come from one FFT of the first row. A
//! Hermitian-symmetric complex Gaussian vector weighted by the eigenvalue
//! square roots transforms back into a real Gaussian vector with exactly the
//! target covariance. Multiple Hurst levels can share one set of Gaussian
//! draws (common random numbers), which keeps multifractional synthesis
//! continuous across levels.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// Relative floor for embedding eigenvalues: values in
/// `[-NEG_EIG_REL_TOL * max, 0)` are clipped to zero, anything lower forces
/// a larger embedding.
const NEG_EIG_REL_TOL: f64 = 1e-10;

/// Embedding size cap as a multiple of n.
const MAX_EMBED_FACTOR: usize = 1 << 16;

/// Autocovariance of unit-spacing fractional Gaussian noise:
/// `(|lag+1|^(2h) - 2|lag|^(2h) + |lag-1|^(2h)) / 2`.
pub fn fgn_covariance(h: f64, lag: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&h) || h == 0.0 {
        return Err(Error::invalid(format!("h must be in (0,1), got {h}")));
    }
    let k = lag as f64;
    let two_h = 2.0 * h;
    Ok(0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h)))
}

/// Square-rooted circulant eigenvalues for one Hurst level, plus whether any
/// tiny negative eigenvalue was clipped.
struct LevelSpectrum {
    sqrt_eigs: Vec<f64>,
    clipped: bool,
}

/// An embedding shared by one or more Hurst levels.
pub(crate) struct Embedding {
    pub m: usize,
    levels: Vec<LevelSpectrum>,
    pub clipped: bool,
}

fn try_level(h: f64, m: usize) -> Result<Option<LevelSpectrum>> {
    let mut row: Vec<Complex<f64>> = Vec::with_capacity(m);
    for j in 0..m {
        let lag = j.min(m - j);
        row.push(Complex::new(fgn_covariance(h, lag)?, 0.0));
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut row);
    let eigs: Vec<f64> = row.iter().map(|c| c.re).collect();
    let max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -NEG_EIG_REL_TOL * max {
        return Ok(None);
    }
    let clipped = min < 0.0;
    let sqrt_eigs = eigs.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(Some(LevelSpectrum { sqrt_eigs, clipped }))
}

/// Builds a common embedding for all `levels`, doubling the size until every
/// level's spectrum is admissible.
pub(crate) fn build_embedding(levels: &[f64], n: usize) -> Result<Embedding> {
    let mut m = (2 * n).next_power_of_two();
    let max_m = MAX_EMBED_FACTOR.saturating_mul(n);
    loop {
        let mut specs = Vec::with_capacity(levels.len());
        let mut ok = true;
        for &h in levels {
            match try_level(h, m)? {
                Some(spec) => specs.push(spec),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            let clipped = specs.iter().any(|s| s.clipped);
            return Ok(Embedding {
                m,
                levels: specs,
                clipped,
            });
        }
        m *= 2;
        if m > max_m {
            return Err(Error::SimulationFailure(format!(
                "circulant embedding stayed indefinite up to size {max_m} for levels {levels:?}"
            )));
        }
    }
}

/// One canonical vector of standard normal draws for an embedding of size m.
///
/// The order is fixed so that every Hurst level sharing the draws sees the
/// same underlying noise.
pub(crate) fn gaussian_draws(rng: &mut ChaCha12Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.sample(StandardNormal)).collect()
}

impl Embedding {
    /// Synthesizes the first `n` fGn samples of level `level` from shared
    /// draws (`draws.len() == m`).
    pub(crate) fn synthesize(&self, level: usize, draws: &[f64], n: usize) -> Vec<f64> {
        let m = self.m;
        let half = m / 2;
        let sqrt_eigs = &self.levels[level].sqrt_eigs;
        let inv_sqrt_m = 1.0 / (m as f64).sqrt();
        let mut y = vec![Complex::new(0.0, 0.0); m];
        y[0] = Complex::new(sqrt_eigs[0] * draws[0], 0.0);
        y[half] = Complex::new(sqrt_eigs[half] * draws[m - 1], 0.0);
        for j in 1..half {
            let re = draws[2 * j - 1];
            let im = draws[2 * j];
            let w = sqrt_eigs[j] * std::f64::consts::FRAC_1_SQRT_2;
            y[j] = Complex::new(w * re, w * im);
            y[m - j] = Complex::new(w * re, -(w * im));
        }
        FftPlanner::new().plan_fft_forward(m).process(&mut y);
        y[..n].iter().map(|c| c.re * inv_sqrt_m).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::stream_rng;
    use approx::assert_relative_eq;

    #[test]
    fn fgn_covariance_examples() {
        assert_relative_eq!(fgn_covariance(0.5, 0).unwrap(), 1.0);
        assert_relative_eq!(fgn_covariance(0.5, 1).unwrap(), 0.0);
        assert_relative_eq!(
            fgn_covariance(0.75, 1).unwrap(),
            0.414213562373,
            epsilon = 1e-10
        );
        assert!(fgn_covariance(0.0, 1).is_err());
        assert!(fgn_covariance(1.0, 1).is_err());
    }

    #[test]
    fn synthesized_noise_has_target_covariance() {
        // Sample covariance over many scenarios vs fgn_covariance, h = 0.8
        // (a level where the embedding genuinely mixes frequencies).
        let h = 0.8;
        let n = 64;
        let emb = build_embedding(&[h], n).unwrap();
        let scenarios = 20_000;
        let mut rng = stream_rng(31, "fgn-cov-test");
        let mut acc = vec![0.0f64; 4];
        for _ in 0..scenarios {
            let draws = gaussian_draws(&mut rng, emb.m);
            let x = emb.synthesize(0, &draws, n);
            for (lag, a) in acc.iter_mut().enumerate() {
                *a += x[10] * x[10 + lag];
            }
        }
        for (lag, a) in acc.iter().enumerate() {
            let got = a / scenarios as f64;
            let want = fgn_covariance(h, lag).unwrap();
            // 4 sigma with Var(xy) <= 1 + rho^2 <= 2 per product.
            let tol = 4.0 * (2.0f64 / scenarios as f64).sqrt();
            assert!(
                (got - want).abs() < tol,
                "lag {lag}: got {got}, want {want}, tol {tol}"
            );
        }
    }
}
