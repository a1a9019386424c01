//! Financial time-series ingestion and the empirical pipeline: calendar
//! alignment across markets, price rescaling, burn-in removal, period
//! segmentation, per-period exponent summaries and two-sample mean tests.

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader, Read};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::estimate::{default_t_grid, estimate, EstimatorConfig};
use crate::path::{PathMeta, SamplePath};

/// Default number of post-listing observations dropped before estimation.
pub const DEFAULT_BURNIN: usize = 100;

/// Smallest segment (in samples) any estimator can work with; burn-in must
/// leave more than this behind.
pub const MIN_ESTIMATION_LEN: usize = 33;

/// One market's daily price history for one ticker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    pub ticker: String,
    pub market: String,
    /// Strictly increasing dates with positive prices.
    pub observations: Vec<(NaiveDate, f64)>,
}

impl PriceSeries {
    pub fn new(ticker: &str, market: &str, observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        for (i, (date, price)) in observations.iter().enumerate() {
            if *price <= 0.0 || !price.is_finite() {
                return Err(Error::invalid(format!("non-positive price {price} at {date}")));
            }
            if i > 0 && observations[i - 1].0 >= *date {
                return Err(Error::invalid(format!("dates not strictly increasing at {date}")));
            }
        }
        Ok(PriceSeries {
            ticker: ticker.to_string(),
            market: market.to_string(),
            observations,
        })
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.observations.iter().map(|o| o.0).collect()
    }

    pub fn prices(&self) -> Vec<f64> {
        self.observations.iter().map(|o| o.1).collect()
    }
}

/// Parses a `date,price` CSV (ISO-8601 dates, `.` decimal separator).
pub fn load_price_csv<R: Read>(reader: R, ticker: &str, market: &str) -> Result<PriceSeries> {
    let buf = BufReader::new(reader);
    let mut observations = Vec::new();
    for (idx, line) in buf.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        if idx == 0 {
            if line.trim() != "date,price" {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected header `date,price`, got `{line}`"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let date_str = parts.next().unwrap_or("");
        let price_str = parts.next().ok_or(Error::Parse {
            line: lineno,
            msg: "missing price column".into(),
        })?;
        let date = NaiveDate::parse_from_str(date_str.trim(), "%Y-%m-%d").map_err(|e| {
            Error::Parse {
                line: lineno,
                msg: format!("bad date `{date_str}`: {e}"),
            }
        })?;
        let price: f64 = price_str.trim().parse().map_err(|e| Error::Parse {
            line: lineno,
            msg: format!("bad price `{price_str}`: {e}"),
        })?;
        if price <= 0.0 || !price.is_finite() {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("price must be positive, got {price}"),
            });
        }
        if let Some(&(prev, _)) = observations.last() {
            if prev >= date {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("dates must strictly increase ({prev} then {date})"),
                });
            }
        }
        observations.push((date, price));
    }
    PriceSeries::new(ticker, market, observations)
}

/// Restricts every series to the common trading days (the intersection of
/// all date sets), preserving date order. Idempotent.
pub fn align_common_days(series: &[PriceSeries]) -> Result<Vec<PriceSeries>> {
    if series.len() < 2 {
        return Err(Error::invalid("alignment needs at least 2 series"));
    }
    let mut common: BTreeSet<NaiveDate> = series[0].observations.iter().map(|o| o.0).collect();
    for s in &series[1..] {
        let dates: BTreeSet<NaiveDate> = s.observations.iter().map(|o| o.0).collect();
        common = common.intersection(&dates).copied().collect();
    }
    if common.is_empty() {
        return Err(Error::invalid("no common trading days across the series"));
    }
    series
        .iter()
        .map(|s| {
            let obs = s
                .observations
                .iter()
                .filter(|(d, _)| common.contains(d))
                .cloned()
                .collect();
            PriceSeries::new(&s.ticker, &s.market, obs)
        })
        .collect()
}

/// Rescales prices so the initial level is 1, cumulating daily log-returns,
/// and maps observations onto the uniform grid (trading-time convention).
pub fn rescale_to_unit(series: &PriceSeries) -> Result<SamplePath> {
    if series.observations.len() < 2 {
        return Err(Error::invalid("rescaling needs at least 2 observations"));
    }
    let prices = series.prices();
    let mut values = Vec::with_capacity(prices.len());
    let mut level = 1.0f64;
    values.push(level);
    for w in prices.windows(2) {
        level *= (w[1].ln() - w[0].ln()).exp();
        values.push(level);
    }
    let meta = PathMeta::new("rescale_to_unit", None)
        .with_param("ticker", series.ticker.clone())
        .with_param("market", series.market.clone());
    SamplePath::new(values, meta)
}

/// Drops the first `count` observations and re-normalizes the grid to [0, 1].
pub fn drop_burnin(path: &SamplePath, count: usize) -> Result<SamplePath> {
    if count == 0 {
        return Ok(path.clone());
    }
    if path.len() <= count + MIN_ESTIMATION_LEN - 1 {
        return Err(Error::invalid(format!(
            "path of {} samples leaves fewer than {MIN_ESTIMATION_LEN} after burn-in {count}",
            path.len()
        )));
    }
    SamplePath::new(path.values()[count..].to_vec(), path.meta.clone())
}

/// Crisis window used to segment a series into prior / within / post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSplit {
    pub within_start: NaiveDate,
    pub within_end: NaiveDate,
}

impl Default for PeriodSplit {
    /// The 2007-2008 window keyed to the reported per-period tables.
    fn default() -> Self {
        PeriodSplit {
            within_start: NaiveDate::from_ymd_opt(2007, 1, 1).unwrap(),
            within_end: NaiveDate::from_ymd_opt(2008, 12, 31).unwrap(),
        }
    }
}

impl PeriodSplit {
    pub fn validate(&self) -> Result<()> {
        if self.within_start > self.within_end {
            return Err(Error::invalid("within_start must be <= within_end"));
        }
        Ok(())
    }

    pub fn period_of(&self, date: NaiveDate) -> Period {
        if date < self.within_start {
            Period::Prior
        } else if date <= self.within_end {
            Period::Within
        } else {
            Period::Post
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Period {
    Prior,
    Within,
    Post,
}

impl Period {
    pub const ALL: [Period; 3] = [Period::Prior, Period::Within, Period::Post];

    pub fn as_str(self) -> &'static str {
        match self {
            Period::Prior => "prior",
            Period::Within => "within",
            Period::Post => "post",
        }
    }
}

/// One (period, method) cell of the empirical summary table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub period: Period,
    pub method: String,
    /// Time-averaged estimated exponent; `None` when the segment was too
    /// short or degenerate throughout.
    pub avg_h: Option<f64>,
    /// Observations in the segment.
    pub n_obs: usize,
    /// Estimated exponents over the segment grid, for downstream tests.
    #[serde(skip)]
    pub h_series: Vec<f64>,
}

/// Estimates each crisis period independently and averages the exponent
/// over the segment's interior grid.
///
/// `dates` must parallel `path` sample-for-sample. Segments shorter than
/// each estimator's minimum are marked missing rather than failing the
/// table. The segment grid is re-normalized to [0, 1]; an odd-length
/// segment loses its last sample for the two-resolution estimator.
pub fn period_summaries(
    path: &SamplePath,
    dates: &[NaiveDate],
    split: &PeriodSplit,
    configs: &[EstimatorConfig],
) -> Result<Vec<PeriodSummary>> {
    split.validate()?;
    if dates.len() != path.len() {
        return Err(Error::invalid(format!(
            "dates ({}) and path ({}) lengths differ",
            dates.len(),
            path.len()
        )));
    }
    let values = path.values();
    let mut out = Vec::new();
    for period in Period::ALL {
        let idx: Vec<usize> = (0..dates.len())
            .filter(|&i| split.period_of(dates[i]) == period)
            .collect();
        let n_obs = idx.len();
        for cfg in configs {
            let mut summary = PeriodSummary {
                period,
                method: cfg.label(),
                avg_h: None,
                n_obs,
                h_series: Vec::new(),
            };
            if n_obs >= MIN_ESTIMATION_LEN {
                let mut segment: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
                // The two-resolution estimator needs an even grid (odd
                // sample count); trim one sample when necessary.
                if matches!(cfg.method, crate::estimate::Method::Lgqv) && segment.len() % 2 == 0 {
                    segment.pop();
                }
                let sub = SamplePath::new(segment, path.meta.clone())?;
                let grid = default_t_grid(sub.grid_n());
                if let Ok(est) = estimate(&sub, cfg, &grid) {
                    let hs: Vec<f64> = est.valid_points().map(|(_, h)| h).collect();
                    if !hs.is_empty() {
                        summary.avg_h = Some(hs.iter().sum::<f64>() / hs.len() as f64);
                        summary.h_series = hs;
                    }
                }
            }
            out.push(summary);
        }
    }
    Ok(out)
}

/// Welch's unequal-variance two-sample t test.
#[derive(Debug, Clone, Serialize)]
pub struct WelchTest {
    pub statistic: f64,
    pub dof: f64,
    pub p_value: f64,
    pub level: f64,
    pub reject: bool,
}

pub fn welch_t_test(sample_a: &[f64], sample_b: &[f64], level: f64) -> Result<WelchTest> {
    if sample_a.len() < 2 || sample_b.len() < 2 {
        return Err(Error::invalid("each sample needs at least 2 points"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::invalid("significance level must be in (0,1)"));
    }
    let (na, nb) = (sample_a.len() as f64, sample_b.len() as f64);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let (ma, mb) = (mean(sample_a), mean(sample_b));
    let var = |s: &[f64], m: f64| s.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (s.len() - 1) as f64;
    let (va, vb) = (var(sample_a, ma), var(sample_b, mb));
    if va <= 0.0 && vb <= 0.0 {
        return Err(Error::invalid("both samples have zero variance"));
    }
    let se2 = va / na + vb / nb;
    let statistic = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / ((va / na).powi(2) / (na - 1.0) + (vb / nb).powi(2) / (nb - 1.0));
    let t_dist = StudentsT::new(0.0, 1.0, dof)
        .map_err(|e| Error::invalid(format!("bad Welch dof {dof}: {e}")))?;
    let p_value = 2.0 * (1.0 - t_dist.cdf(statistic.abs()));
    Ok(WelchTest {
        statistic,
        dof,
        p_value,
        level,
        reject: p_value < level,
    })
}

/// Synthetic fixture: cross-listed tickers on three markets with partially
/// overlapping trading calendars and geometric-Brownian prices
/// (`exp` of an H = 1/2 path), for pipeline tests and demos in place of
/// licensed market data.
pub fn synthetic_fixture(
    tickers: &[&str],
    start: NaiveDate,
    end: NaiveDate,
    seed: u64,
) -> Result<Vec<PriceSeries>> {
    use crate::seed::{derive_seed, stream_rng};
    use rand::Rng;

    let markets = ["CN", "HK", "US"];
    let weekdays: Vec<NaiveDate> = start
        .iter_days()
        .take_while(|d| *d <= end)
        .filter(|d| {
            use chrono::Datelike;
            d.weekday().number_from_monday() <= 5
        })
        .collect();
    let mut out = Vec::new();
    for ticker in tickers {
        for market in markets {
            // Market-specific holidays thin the calendar so alignment has
            // real work to do.
            let mut cal_rng = stream_rng(seed, &format!("fixture-cal/{ticker}/{market}"));
            let dates: Vec<NaiveDate> = weekdays
                .iter()
                .filter(|_| cal_rng.gen::<f64>() > 0.03)
                .copied()
                .collect();
            let n = dates.len() - 1;
            let path_seed = derive_seed(seed, &format!("fixture-path/{ticker}/{market}"));
            let log_price = crate::sim::simulate_fbm(0.5, n, path_seed)?;
            let observations = dates
                .iter()
                .zip(log_price.values())
                .map(|(&d, &x)| (d, 10.0 * x.exp()))
                .collect();
            out.push(PriceSeries::new(ticker, market, observations)?);
        }
    }
    Ok(out)
}
