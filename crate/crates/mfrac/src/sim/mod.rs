//! Gaussian process simulation: Bm, fBm, mBm and the transform catalog.

mod cov;
mod fgn;
mod phi;

pub use cov::{harmonizable_normalizer, mbm_covariance_exact, simulate_mbm_exact};
pub use fgn::fgn_covariance;
pub use phi::{apply_phi, PhiForm, PhiTag};

use crate::error::{Error, Result};
use crate::holder::HolderFunction;
use crate::path::{PathMeta, SamplePath};
use crate::seed::stream_rng;

/// Default Hurst-grid step of the multifractional synthesizer.
pub const DEFAULT_HURST_STEP: f64 = 0.05;

/// One fBm realization with `E B(t)^2 = t^(2h)` on `t = u / grid_n`.
///
/// Exact circulant embedding of the fGn covariance, scaled by
/// `grid_n^(-h)` and cumulative-summed; the path starts at 0 and is a
/// deterministic function of `(h, grid_n, seed)`.
pub fn simulate_fbm(h: f64, grid_n: usize, seed: u64) -> Result<SamplePath> {
    if !(0.0..1.0).contains(&h) || h == 0.0 {
        return Err(Error::invalid(format!("h must be in (0,1), got {h}")));
    }
    if grid_n < 2 {
        return Err(Error::invalid("grid_n must be >= 2"));
    }
    let embedding = fgn::build_embedding(&[h], grid_n)?;
    let mut rng = stream_rng(seed, "gaussian-path");
    let draws = fgn::gaussian_draws(&mut rng, embedding.m);
    let noise = embedding.synthesize(0, &draws, grid_n);
    let scale = (grid_n as f64).powf(-h);
    let mut values = Vec::with_capacity(grid_n + 1);
    values.push(0.0);
    let mut acc = 0.0;
    for g in noise {
        acc += g * scale;
        values.push(acc);
    }
    let meta = PathMeta::new("fbm", Some(seed))
        .with_param("h", h)
        .with_param("grid_n", grid_n as u64)
        .with_param("embedding_m", embedding.m as u64)
        .with_param("eigenvalues_clipped", embedding.clipped);
    SamplePath::new(values, meta)
}

/// One mBm realization via the Hurst-field method with the default grid
/// step ([`DEFAULT_HURST_STEP`]).
pub fn simulate_mbm(h: &HolderFunction, grid_n: usize, seed: u64) -> Result<SamplePath> {
    simulate_mbm_with_step(h, grid_n, seed, DEFAULT_HURST_STEP)
}

/// One mBm realization via the Hurst-field method.
///
/// fBm paths are synthesized on the Hurst grid `{h_min, h_min+step, ...,
/// h_max}` from common random numbers (one set of draws feeds every level),
/// then each sample interpolates linearly across the two levels bracketing
/// `H(u/N)`. A constant H degenerates to [`simulate_fbm`] bit-for-bit.
pub fn simulate_mbm_with_step(
    h: &HolderFunction,
    grid_n: usize,
    seed: u64,
    step: f64,
) -> Result<SamplePath> {
    h.validate()?;
    if grid_n < 2 {
        return Err(Error::invalid("grid_n must be >= 2"));
    }
    if !(step > 0.0) {
        return Err(Error::invalid("Hurst grid step must be positive"));
    }
    let (h_min, h_max) = h.range();
    if h_max - h_min < 1e-12 {
        return simulate_fbm(h_min, grid_n, seed);
    }

    let mut levels = Vec::new();
    let mut level = h_min;
    while level < h_max - 1e-12 {
        levels.push(level);
        level += step;
    }
    levels.push(h_max);

    let embedding = fgn::build_embedding(&levels, grid_n)?;
    let mut rng = stream_rng(seed, "gaussian-path");
    let draws = fgn::gaussian_draws(&mut rng, embedding.m);

    let n = grid_n as f64;
    let paths: Vec<Vec<f64>> = levels
        .iter()
        .enumerate()
        .map(|(idx, &hl)| {
            let noise = embedding.synthesize(idx, &draws, grid_n);
            let scale = n.powf(-hl);
            let mut values = Vec::with_capacity(grid_n + 1);
            values.push(0.0);
            let mut acc = 0.0;
            for g in noise {
                acc += g * scale;
                values.push(acc);
            }
            values
        })
        .collect();

    let mut values = Vec::with_capacity(grid_n + 1);
    for u in 0..=grid_n {
        let hu = h.evaluate(u as f64 / n).clamp(h_min, h_max);
        let i = match levels.partition_point(|&l| l <= hu) {
            0 => 0,
            idx => (idx - 1).min(levels.len() - 2),
        };
        let (lo, hi) = (levels[i], levels[i + 1]);
        let w = ((hu - lo) / (hi - lo)).clamp(0.0, 1.0);
        values.push((1.0 - w) * paths[i][u] + w * paths[i + 1][u]);
    }

    let meta = PathMeta::new("mbm", Some(seed))
        .with_param("holder", serde_json::to_value(h)?)
        .with_param("grid_n", grid_n as u64)
        .with_param("hurst_step", step)
        .with_param("hurst_levels", levels.len() as u64)
        .with_param("embedding_m", embedding.m as u64)
        .with_param("eigenvalues_clipped", embedding.clipped);
    SamplePath::new(values, meta)
}
