//! Pointwise Hölder exponent estimators.
//!
//! Three methods over a path observed on the uniform grid:
//!
//! * **LGQV** — the two-resolution localized generalized quadratic
//!   variation. With `V_n(t0)` the sum of squared generalized increments
//!   over the shrinking neighborhood `|i/n - t0| <= v(n)`,
//!
//!   ```text
//!   H_hat(t0) = 1/2 (1 + log2(v(2n)/v(n)) + log2(V_n(t0)/V_2n(t0))),
//!   ```
//!
//!   computed from the full path (resolution 2n) and its even-index
//!   subsample (resolution n). The estimator depends only on the ratio of
//!   the two variations, so it is invariant under scaling and shifting of
//!   the path.
//! * **Classic GQV** — single-resolution limit form
//!   `1/2 (1 - gamma - ln V_n(t0) / ln n)` with the constant-exponent
//!   radius `v(n) = n^-gamma`.
//! * **Oscillation** — the log-log slope of max-min oscillations over
//!   windows of `ceil(n^alpha)..floor(n^beta)` samples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::increments::{make_difference_sequence, IncrementSequence};
use crate::path::SamplePath;

/// Default classic-GQV radius exponent.
pub const DEFAULT_GQV_GAMMA: f64 = 0.7;
/// Default oscillation window exponents.
pub const DEFAULT_OSC_ALPHA: f64 = 0.1;
pub const DEFAULT_OSC_BETA: f64 = 0.3;
/// Default clip range for reported exponents.
pub const DEFAULT_CLIP: (f64, f64) = (0.001, 0.999);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lgqv,
    Gqv,
    Oscillation,
}

/// Estimator choice plus tuning parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub method: Method,
    /// Vanishing-moment sequence for the quadratic-variation methods.
    pub increments: IncrementSequence,
    pub gqv_gamma: f64,
    pub osc_alpha: f64,
    pub osc_beta: f64,
    pub clip_range: (f64, f64),
}

impl EstimatorConfig {
    /// LGQV with the order-q binomial difference sequence.
    pub fn lgqv(q: usize) -> Result<Self> {
        Ok(EstimatorConfig {
            method: Method::Lgqv,
            increments: make_difference_sequence(q)?,
            gqv_gamma: DEFAULT_GQV_GAMMA,
            osc_alpha: DEFAULT_OSC_ALPHA,
            osc_beta: DEFAULT_OSC_BETA,
            clip_range: DEFAULT_CLIP,
        })
    }

    /// Classic GQV with gamma = 0.7 and second differences.
    pub fn gqv() -> Self {
        EstimatorConfig {
            method: Method::Gqv,
            increments: make_difference_sequence(2).unwrap(),
            gqv_gamma: DEFAULT_GQV_GAMMA,
            osc_alpha: DEFAULT_OSC_ALPHA,
            osc_beta: DEFAULT_OSC_BETA,
            clip_range: DEFAULT_CLIP,
        }
    }

    /// Oscillation method with windows `[n^0.1, n^0.3]`.
    pub fn oscillation() -> Self {
        EstimatorConfig {
            method: Method::Oscillation,
            increments: make_difference_sequence(2).unwrap(),
            gqv_gamma: DEFAULT_GQV_GAMMA,
            osc_alpha: DEFAULT_OSC_ALPHA,
            osc_beta: DEFAULT_OSC_BETA,
            clip_range: DEFAULT_CLIP,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.clip_range;
        if !(0.0 < lo && lo < hi && hi < 1.0) {
            return Err(Error::invalid(format!("bad clip range ({lo}, {hi})")));
        }
        if !(0.0 < self.gqv_gamma && self.gqv_gamma < 1.0) {
            return Err(Error::invalid("gqv_gamma must be in (0,1)"));
        }
        if !(0.0 < self.osc_alpha && self.osc_alpha < self.osc_beta && self.osc_beta < 1.0) {
            return Err(Error::invalid("need 0 < osc_alpha < osc_beta < 1"));
        }
        Ok(())
    }

    /// Report label, e.g. `GQV`, `LGQV(2)`, `OSC`.
    pub fn label(&self) -> String {
        match self.method {
            Method::Gqv => "GQV".into(),
            Method::Lgqv => format!("LGQV({})", self.increments.moments_q()),
            Method::Oscillation => "OSC".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointFlag {
    Ok,
    /// The raw estimate fell outside the clip range and was clipped.
    Clipped,
    /// No estimate at this point (empty neighborhood or zero variation).
    Degenerate,
}

/// Estimated exponent series on an evaluation grid.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateSeries {
    pub t_grid: Vec<f64>,
    /// `None` marks a degenerate point.
    pub h_hat: Vec<Option<f64>>,
    /// Neighborhood sizes actually used (finest resolution for LGQV,
    /// number of usable radii for the oscillation method).
    pub n_points_used: Vec<usize>,
    pub flags: Vec<PointFlag>,
    pub config: EstimatorConfig,
    pub warnings: Vec<String>,
}

impl EstimateSeries {
    /// `(t, h_hat)` over non-missing points.
    pub fn valid_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t_grid
            .iter()
            .zip(&self.h_hat)
            .filter_map(|(&t, h)| h.map(|v| (t, v)))
    }

    /// Writes `t,h_hat,n_points,flags` rows; missing estimates leave the
    /// h_hat field empty.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,h_hat,n_points,flags")?;
        for i in 0..self.t_grid.len() {
            let h = match self.h_hat[i] {
                Some(v) => v.to_string(),
                None => String::new(),
            };
            let flag = match self.flags[i] {
                PointFlag::Ok => "ok",
                PointFlag::Clipped => "clipped",
                PointFlag::Degenerate => "degenerate",
            };
            writeln!(w, "{},{},{},{}", self.t_grid[i], h, self.n_points_used[i], flag)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The LGQV radius `v(n) = n^-gamma(n)` with
/// `gamma(n) = 1/2 + (2/3) ln(ln n)/ln n`.
pub fn lgqv_radius(n: usize) -> Result<f64> {
    Ok((n as f64).powf(-lgqv_gamma(n)?))
}

/// The LGQV radius exponent; decreasing in n, crossing the classic 0.7
/// near n = 380.
pub fn lgqv_gamma(n: usize) -> Result<f64> {
    if n < 16 {
        return Err(Error::invalid(format!("lgqv radius needs n >= 16, got {n}")));
    }
    let ln_n = (n as f64).ln();
    Ok(0.5 + (2.0 / 3.0) * ln_n.ln() / ln_n)
}

/// The neighborhood index set `{i in 0..=n-p-1 : |i/n - t0| <= radius}`,
/// count-adjusted toward `round(2 n radius)` by half a grid step when that
/// reaches the target exactly.
pub fn neighborhood(t0: f64, n: usize, radius: f64, p: usize) -> Result<Vec<usize>> {
    if !(0.0 < t0 && t0 < 1.0) {
        return Err(Error::invalid(format!("t0 must be in (0,1), got {t0}")));
    }
    if radius < 1.0 / n as f64 {
        return Err(Error::invalid(format!(
            "radius must be >= 1/n = {}, got {radius}",
            1.0 / n as f64
        )));
    }
    if n < p + 2 {
        return Err(Error::invalid("grid too small for sequence order"));
    }
    let (lo, hi) = neighborhood_range(t0, n, radius, n - p - 1)
        .ok_or(Error::DegenerateNeighborhood { t0 })?;
    Ok((lo..=hi).collect())
}

/// Contiguous index range of the neighborhood, clipped to `0..=max_index`.
///
/// When the raw count is one off `round(2 n radius)`, one boundary is moved
/// by (at most) half a grid step to hit the target: the nearer excluded
/// neighbor is pulled in, or the farther edge index dropped. Symmetric ties
/// keep the raw window. `None` when empty.
fn neighborhood_range(t0: f64, n: usize, radius: f64, max_index: usize) -> Option<(usize, usize)> {
    let nf = n as f64;
    let lo = ((t0 - radius) * nf - 1e-9).ceil().max(0.0) as usize;
    let hi_f = ((t0 + radius) * nf + 1e-9).floor().min(max_index as f64);
    if hi_f < 0.0 || lo as f64 > hi_f {
        return None;
    }
    let hi = hi_f as usize;
    let count = hi - lo + 1;
    let target = (2.0 * nf * radius).round() as usize;
    let dist = |i: usize| (i as f64 / nf - t0).abs();
    if count + 1 == target {
        // Candidates just outside the window, admissible within half a step.
        let half = 0.5 / nf + 1e-9;
        let left = (lo > 0 && dist(lo - 1) <= radius + half).then(|| dist(lo - 1));
        let right = (hi < max_index && dist(hi + 1) <= radius + half).then(|| dist(hi + 1));
        match (left, right) {
            (Some(dl), Some(dr)) if (dl - dr).abs() > 1e-12 => {
                return Some(if dl < dr { (lo - 1, hi) } else { (lo, hi + 1) });
            }
            (Some(_), None) => return Some((lo - 1, hi)),
            (None, Some(_)) => return Some((lo, hi + 1)),
            _ => {}
        }
    } else if count == target + 1 && count >= 2 {
        let (dl, dr) = (dist(lo), dist(hi));
        if dl > dr + 1e-12 {
            return Some((lo + 1, hi));
        }
        if dr > dl + 1e-12 {
            return Some((lo, hi - 1));
        }
        // Tie: both edges sit at the same distance, keep the raw window.
    }
    Some((lo, hi))
}

/// Squared generalized increments at one stride, with prefix sums for O(1)
/// window queries.
struct QvTable {
    prefix: Vec<f64>,
    /// Effective resolution grid_n / stride.
    n_eff: usize,
    p: usize,
}

impl QvTable {
    fn new(path: &SamplePath, a: &IncrementSequence, stride: usize) -> Result<Self> {
        let grid_n = path.grid_n();
        if stride == 0 || grid_n % stride != 0 {
            return Err(Error::invalid(format!(
                "stride {stride} must divide grid_n {grid_n}"
            )));
        }
        let n_eff = grid_n / stride;
        let p = a.order_p();
        if n_eff < p + 1 {
            return Err(Error::invalid("path too short for the sequence order"));
        }
        let values = path.values();
        let coeffs = a.coefficients();
        // Increment at effective index j spans samples stride*(j..=j+p).
        let mut prefix = Vec::with_capacity(n_eff - p + 2);
        prefix.push(0.0);
        let mut acc = 0.0;
        for j in 0..=(n_eff - p) {
            let d: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, &ak)| ak * values[stride * (j + k)])
                .sum();
            acc += d * d;
            prefix.push(acc);
        }
        Ok(QvTable { prefix, n_eff, p })
    }

    /// Largest usable increment index.
    fn max_index(&self) -> usize {
        self.n_eff - self.p
    }

    fn window_sum(&self, lo: usize, hi: usize) -> f64 {
        self.prefix[hi + 1] - self.prefix[lo]
    }
}

/// `V_n(t0)`: sum of squared generalized increments over the neighborhood,
/// at effective resolution `grid_n / stride`.
///
/// Unlike [`neighborhood`], every available increment participates (start
/// indices `0..=n-p`), so the sum uses the full sampled path.
pub fn quadratic_variation(
    path: &SamplePath,
    a: &IncrementSequence,
    t0: f64,
    radius: f64,
    stride: usize,
) -> Result<f64> {
    let table = QvTable::new(path, a, stride)?;
    let (lo, hi) = neighborhood_range(t0, table.n_eff, radius, table.max_index())
        .ok_or(Error::DegenerateNeighborhood { t0 })?;
    Ok(table.window_sum(lo, hi))
}

/// Estimator algebra of the two-resolution statistic: recovers H exactly
/// when `var_coarse / var_fine = (v_coarse / v_fine) 2^(2H-1)`.
pub fn lgqv_combine(v_fine: f64, v_coarse: f64, var_fine: f64, var_coarse: f64) -> f64 {
    0.5 * (1.0 + (v_fine / v_coarse).log2() + (var_coarse / var_fine).log2())
}

/// Dispatches on `config.method`.
pub fn estimate(path: &SamplePath, config: &EstimatorConfig, t_grid: &[f64]) -> Result<EstimateSeries> {
    match config.method {
        Method::Lgqv => estimate_lgqv(path, config, t_grid),
        Method::Gqv => estimate_gqv(path, config, t_grid),
        Method::Oscillation => estimate_oscillation(path, config, t_grid),
    }
}

/// All interior grid points `i / grid_n`, `i = 1..grid_n-1`.
pub fn default_t_grid(grid_n: usize) -> Vec<f64> {
    (1..grid_n).map(|i| i as f64 / grid_n as f64).collect()
}

fn check_t_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::invalid("empty evaluation grid"));
    }
    if let Some(&t) = t_grid.iter().find(|&&t| !(0.0 < t && t < 1.0)) {
        return Err(Error::invalid(format!("t0 must be in (0,1), got {t}")));
    }
    Ok(())
}

/// LGQV estimates on a path with even `grid_n = 2n`.
pub fn estimate_lgqv(
    path: &SamplePath,
    config: &EstimatorConfig,
    t_grid: &[f64],
) -> Result<EstimateSeries> {
    config.validate()?;
    check_t_grid(t_grid)?;
    let grid_n = path.grid_n();
    if grid_n % 2 != 0 {
        return Err(Error::invalid(format!("lgqv needs an even grid_n, got {grid_n}")));
    }
    let n = grid_n / 2;
    if n < 16 {
        return Err(Error::invalid(format!("lgqv needs grid_n >= 32, got {grid_n}")));
    }
    let a = &config.increments;
    let v_fine = lgqv_radius(grid_n)?;
    let v_coarse = lgqv_radius(n)?;
    let fine = QvTable::new(path, a, 1)?;
    let coarse = QvTable::new(path, a, 2)?;

    let mut out = SeriesBuilder::new(config, t_grid);
    for &t0 in t_grid {
        let fine_range = neighborhood_range(t0, grid_n, v_fine, fine.max_index());
        let coarse_range = neighborhood_range(t0, n, v_coarse, coarse.max_index());
        let (fr, cr) = match (fine_range, coarse_range) {
            (Some(fr), Some(cr)) => (fr, cr),
            _ => {
                out.push_degenerate(t0, 0, "empty neighborhood");
                continue;
            }
        };
        let used = fr.1 - fr.0 + 1;
        let var_fine = fine.window_sum(fr.0, fr.1);
        let var_coarse = coarse.window_sum(cr.0, cr.1);
        if !(var_fine > 0.0) || !(var_coarse > 0.0) {
            out.push_degenerate(t0, used, "zero quadratic variation");
            continue;
        }
        out.push_estimate(lgqv_combine(v_fine, v_coarse, var_fine, var_coarse), used);
    }
    Ok(out.finish())
}

/// Classic GQV estimates with radius `n^-gamma`.
pub fn estimate_gqv(
    path: &SamplePath,
    config: &EstimatorConfig,
    t_grid: &[f64],
) -> Result<EstimateSeries> {
    config.validate()?;
    check_t_grid(t_grid)?;
    let n = path.grid_n();
    if n < 16 {
        return Err(Error::invalid(format!("gqv needs grid_n >= 16, got {n}")));
    }
    let gamma = config.gqv_gamma;
    let radius = (n as f64).powf(-gamma);
    let table = QvTable::new(path, &config.increments, 1)?;
    let ln_n = (n as f64).ln();

    let mut out = SeriesBuilder::new(config, t_grid);
    for &t0 in t_grid {
        let Some((lo, hi)) = neighborhood_range(t0, n, radius, table.max_index()) else {
            out.push_degenerate(t0, 0, "empty neighborhood");
            continue;
        };
        let v = table.window_sum(lo, hi);
        if !(v > 0.0) {
            out.push_degenerate(t0, hi - lo + 1, "zero quadratic variation");
            continue;
        }
        out.push_estimate(0.5 * (1.0 - gamma - v.ln() / ln_n), hi - lo + 1);
    }
    Ok(out.finish())
}

/// Oscillation estimates from the log-log slope of max-min over windows of
/// `ceil(n^alpha)..=floor(n^beta)` samples.
pub fn estimate_oscillation(
    path: &SamplePath,
    config: &EstimatorConfig,
    t_grid: &[f64],
) -> Result<EstimateSeries> {
    config.validate()?;
    check_t_grid(t_grid)?;
    let n = path.grid_n();
    let r_lo = (n as f64).powf(config.osc_alpha).ceil() as usize;
    let r_hi = (n as f64).powf(config.osc_beta).floor() as usize;
    if r_lo >= r_hi {
        return Err(Error::invalid(format!(
            "oscillation needs ceil(n^alpha) < floor(n^beta); got [{r_lo}, {r_hi}] at n = {n}"
        )));
    }
    let values = path.values();

    let mut out = SeriesBuilder::new(config, t_grid);
    for &t0 in t_grid {
        let center = (t0 * n as f64).round().clamp(0.0, n as f64) as usize;
        let mut points = Vec::with_capacity(r_hi - r_lo + 1);
        for r in r_lo..=r_hi {
            let lo = center.saturating_sub(r);
            let hi = (center + r).min(n);
            let window = &values[lo..=hi];
            let max = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = window.iter().cloned().fold(f64::INFINITY, f64::min);
            let osc = max - min;
            if osc > 0.0 {
                points.push(((r as f64 / n as f64).ln(), osc.ln()));
            }
        }
        if points.len() < 2 {
            out.push_degenerate(t0, points.len(), "oscillation degenerate");
            continue;
        }
        out.push_estimate(ls_slope(&points), points.len());
    }
    Ok(out.finish())
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

struct SeriesBuilder<'a> {
    config: &'a EstimatorConfig,
    t_grid: Vec<f64>,
    h_hat: Vec<Option<f64>>,
    n_points: Vec<usize>,
    flags: Vec<PointFlag>,
    warnings: Vec<String>,
    clip_events: usize,
}

impl<'a> SeriesBuilder<'a> {
    fn new(config: &'a EstimatorConfig, t_grid: &[f64]) -> Self {
        SeriesBuilder {
            config,
            t_grid: t_grid.to_vec(),
            h_hat: Vec::with_capacity(t_grid.len()),
            n_points: Vec::with_capacity(t_grid.len()),
            flags: Vec::with_capacity(t_grid.len()),
            warnings: Vec::new(),
            clip_events: 0,
        }
    }

    fn push_estimate(&mut self, raw: f64, used: usize) {
        let (lo, hi) = self.config.clip_range;
        let (value, flag) = if raw < lo {
            (lo, PointFlag::Clipped)
        } else if raw > hi {
            (hi, PointFlag::Clipped)
        } else {
            (raw, PointFlag::Ok)
        };
        if flag == PointFlag::Clipped {
            self.clip_events += 1;
        }
        self.h_hat.push(Some(value));
        self.n_points.push(used);
        self.flags.push(flag);
    }

    fn push_degenerate(&mut self, t0: f64, used: usize, why: &str) {
        self.warnings.push(format!("t0={t0}: {why}"));
        self.h_hat.push(None);
        self.n_points.push(used);
        self.flags.push(PointFlag::Degenerate);
    }

    fn finish(mut self) -> EstimateSeries {
        if self.clip_events > 0 {
            self.warnings
                .push(format!("{} estimates clipped to the clip range", self.clip_events));
        }
        EstimateSeries {
            t_grid: self.t_grid,
            h_hat: self.h_hat,
            n_points_used: self.n_points,
            flags: self.flags,
            config: self.config.clone(),
            warnings: self.warnings,
        }
    }
}

/// Convergence diagnostics for a radius choice (Theorem conditions and rate
/// bound terms).
#[derive(Debug, Clone, Serialize)]
pub struct RadiusDiagnostics {
    /// Summands `v^l n^((l-2)h) |ln n|^(2-l/2)`, l = 0..=4.
    pub condition_i_terms: [f64; 5],
    pub condition_i_sum: f64,
    /// `1 / (n v)^2`.
    pub condition_ii_summand: f64,
    /// `sqrt(condition_i_sum)`.
    pub rate_sqrt_condition_i: f64,
    /// `v^h sqrt(|ln v|)`.
    pub rate_radius_pow_h: f64,
    /// `v ln n`.
    pub rate_radius_log_n: f64,
    /// `1 / (n v)`.
    pub rate_inv_n_radius: f64,
}

pub fn radius_diagnostics(n: usize, h: f64, radius: f64) -> Result<RadiusDiagnostics> {
    if n < 16 {
        return Err(Error::invalid("diagnostics need n >= 16"));
    }
    if !(0.0 < h && h < 1.0) {
        return Err(Error::invalid("h must be in (0,1)"));
    }
    if !(0.0 < radius && radius <= 1.0) {
        return Err(Error::invalid("radius must be in (0,1]"));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let mut terms = [0.0; 5];
    for (l, term) in terms.iter_mut().enumerate() {
        let lf = l as f64;
        *term = radius.powf(lf) * nf.powf((lf - 2.0) * h) * ln_n.powf(2.0 - lf / 2.0);
    }
    let sum: f64 = terms.iter().sum();
    Ok(RadiusDiagnostics {
        condition_i_terms: terms,
        condition_i_sum: sum,
        condition_ii_summand: 1.0 / (nf * radius).powi(2),
        rate_sqrt_condition_i: sum.sqrt(),
        rate_radius_pow_h: radius.powf(h) * radius.ln().abs().sqrt(),
        rate_radius_log_n: radius * ln_n,
        rate_inv_n_radius: 1.0 / (nf * radius),
    })
}
