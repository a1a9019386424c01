//! Monte-Carlo benchmark harness: scenario generation, estimation and RMSE
//! aggregation per (transform, method, path length) cell.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{default_t_grid, estimate, EstimateSeries, EstimatorConfig};
use crate::holder::HolderFunction;
use crate::seed::derive_seed;
use crate::sim::{apply_phi, simulate_mbm, PhiForm, PhiTag};

/// Fraction of failed scenarios above which a cell is marked unreliable.
const UNRELIABLE_FAILURE_RATE: f64 = 0.10;

/// Benchmark design: exponent function, transform catalog, path lengths,
/// scenario count, estimator set and the master seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchSpec {
    pub holder: HolderFunction,
    pub forms: Vec<PhiTag>,
    pub sizes: Vec<usize>,
    pub scenarios: usize,
    pub methods: Vec<EstimatorConfig>,
    pub master_seed: u64,
}

impl BenchSpec {
    /// The benchmark design of the simulation study: sinusoidal exponent,
    /// the full transform catalog, n = 100..=1000, 100 scenarios, and the
    /// GQV / LGQV(2..=5) / OSC estimator set.
    pub fn table1(master_seed: u64) -> Self {
        BenchSpec {
            holder: HolderFunction::bench_sinusoid(),
            forms: PhiTag::ALL.to_vec(),
            sizes: (1..=10).map(|k| k * 100).collect(),
            scenarios: 100,
            methods: default_methods(),
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.holder.validate()?;
        if self.scenarios == 0 {
            return Err(Error::invalid("scenarios must be >= 1"));
        }
        if self.forms.is_empty() || self.sizes.is_empty() || self.methods.is_empty() {
            return Err(Error::invalid("forms, sizes and methods must be non-empty"));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 32) {
            return Err(Error::invalid(format!("sizes must be >= 32, got {n}")));
        }
        for m in &self.methods {
            m.validate()?;
        }
        Ok(())
    }
}

/// GQV, LGQV with Q = 2..=5, oscillation.
pub fn default_methods() -> Vec<EstimatorConfig> {
    let mut methods = vec![EstimatorConfig::gqv()];
    for q in 2..=5 {
        methods.push(EstimatorConfig::lgqv(q).unwrap());
    }
    methods.push(EstimatorConfig::oscillation());
    methods
}

/// Root-mean-squared error of an estimate against the true exponent over
/// the non-missing grid points.
pub fn rmse(estimate: &EstimateSeries, truth: &HolderFunction) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (t, h) in estimate.valid_points() {
        let d = h - truth.evaluate(t);
        sum += d * d;
        count += 1;
    }
    if count == 0 {
        return Err(Error::invalid("estimate has no valid points"));
    }
    Ok((sum / count as f64).sqrt())
}

/// Aggregated accuracy of one (form, method, n) cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RmseCell {
    pub form: PhiTag,
    pub method: String,
    pub n: usize,
    pub avg: f64,
    pub std: f64,
    pub max: f64,
    pub min: f64,
    /// Scenario count that produced a usable RMSE.
    pub used_scenarios: usize,
    pub failed_scenarios: usize,
    pub unreliable: bool,
}

/// Full benchmark output with provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RmseReport {
    pub master_seed: u64,
    pub scenarios: usize,
    pub holder: HolderFunction,
    pub cells: Vec<RmseCell>,
}

impl RmseReport {
    pub fn cell(&self, form: PhiTag, method: &str, n: usize) -> Option<&RmseCell> {
        self.cells
            .iter()
            .find(|c| c.form == form && c.method == method && c.n == n)
    }

    /// One CSV row per cell.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "form,method,n,avg_rmse,std_rmse,max_rmse,min_rmse,used,failed,unreliable"
        )?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{}",
                c.form.as_str(),
                c.method,
                c.n,
                c.avg,
                c.std,
                c.max,
                c.min,
                c.used_scenarios,
                c.failed_scenarios,
                c.unreliable
            )?;
        }
        Ok(())
    }
}

/// Per-scenario estimate traces of one (form, n) pair, for plotting
/// estimated exponents against the truth.
#[derive(Debug, Clone, Serialize)]
pub struct TraceSet {
    pub form: PhiTag,
    pub n: usize,
    pub t_grid: Vec<f64>,
    pub truth: Vec<f64>,
    /// Method label -> mean estimate across scenarios (missing points
    /// excluded per t0).
    pub mean_estimates: Vec<(String, Vec<Option<f64>>)>,
}

/// The seed label of one scenario path; the auxiliary W path (when a form
/// needs one) appends `/aux`.
fn scenario_label(form: PhiTag, n: usize, scenario: usize) -> String {
    format!("form={}/n={n}/scn={scenario}", form.as_str())
}

fn run_scenario(
    spec: &BenchSpec,
    form: PhiTag,
    n: usize,
    scenario: usize,
    t_grid: &[f64],
) -> Vec<Option<(f64, EstimateSeries)>> {
    let label = scenario_label(form, n, scenario);
    let path_seed = derive_seed(spec.master_seed, &label);
    let phi = if form.needs_aux() {
        let aux = derive_seed(spec.master_seed, &format!("{label}/aux"));
        PhiForm::with_aux(form, aux)
    } else {
        PhiForm::new(form)
    };
    let observed = simulate_mbm(&spec.holder, n, path_seed)
        .and_then(|x| apply_phi(&x, &phi.expect("catalog forms are valid")));
    let observed = match observed {
        Ok(p) => p,
        Err(_) => return vec![None; spec.methods.len()],
    };
    spec.methods
        .iter()
        .map(|cfg| {
            estimate(&observed, cfg, t_grid)
                .ok()
                .and_then(|est| rmse(&est, &spec.holder).ok().map(|r| (r, est)))
        })
        .collect()
}

/// Runs the full benchmark. Deterministic in `spec` (including
/// `master_seed`) and independent of the worker thread count: scenarios are
/// seeded by counter-derived labels and aggregated in scenario order.
pub fn run_benchmark(spec: &BenchSpec) -> Result<RmseReport> {
    run_benchmark_inner(spec, None)
}

/// As [`run_benchmark`], also returning mean-estimate traces for the given
/// path length (the data behind the estimate-vs-truth figures).
pub fn run_benchmark_with_traces(spec: &BenchSpec, trace_n: usize) -> Result<(RmseReport, Vec<TraceSet>)> {
    let mut traces = Vec::new();
    let report = run_benchmark_inner(spec, Some((trace_n, &mut traces)))?;
    Ok((report, traces))
}

fn run_benchmark_inner(
    spec: &BenchSpec,
    mut trace_sink: Option<(usize, &mut Vec<TraceSet>)>,
) -> Result<RmseReport> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &form in &spec.forms {
        for &n in &spec.sizes {
            let t_grid = default_t_grid(n);
            // Scenario-level parallelism; results land in scenario order.
            let per_scenario: Vec<Vec<Option<(f64, EstimateSeries)>>> = (0..spec.scenarios)
                .into_par_iter()
                .map(|s| run_scenario(spec, form, n, s, &t_grid))
                .collect();
            let want_traces = matches!(trace_sink, Some((tn, _)) if tn == n);
            for (mi, method) in spec.methods.iter().enumerate() {
                let values: Vec<f64> = per_scenario
                    .iter()
                    .filter_map(|row| row[mi].as_ref().map(|(r, _)| *r))
                    .collect();
                let failed = spec.scenarios - values.len();
                let unreliable =
                    (failed as f64) > UNRELIABLE_FAILURE_RATE * spec.scenarios as f64;
                let cell = if values.is_empty() {
                    RmseCell {
                        form,
                        method: method.label(),
                        n,
                        avg: f64::NAN,
                        std: f64::NAN,
                        max: f64::NAN,
                        min: f64::NAN,
                        used_scenarios: 0,
                        failed_scenarios: failed,
                        unreliable: true,
                    }
                } else {
                    let count = values.len() as f64;
                    let avg = values.iter().sum::<f64>() / count;
                    let var = if values.len() > 1 {
                        values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (count - 1.0)
                    } else {
                        0.0
                    };
                    RmseCell {
                        form,
                        method: method.label(),
                        n,
                        avg,
                        std: var.sqrt(),
                        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
                        used_scenarios: values.len(),
                        failed_scenarios: failed,
                        unreliable,
                    }
                };
                cells.push(cell);
            }
            if want_traces {
                if let Some((_, sink)) = trace_sink.as_mut() {
                    sink.push(build_trace(spec, form, n, &t_grid, &per_scenario));
                }
            }
        }
    }
    Ok(RmseReport {
        master_seed: spec.master_seed,
        scenarios: spec.scenarios,
        holder: spec.holder.clone(),
        cells,
    })
}

fn build_trace(
    spec: &BenchSpec,
    form: PhiTag,
    n: usize,
    t_grid: &[f64],
    per_scenario: &[Vec<Option<(f64, EstimateSeries)>>],
) -> TraceSet {
    let mut mean_estimates = Vec::new();
    for (mi, method) in spec.methods.iter().enumerate() {
        let mut sums = vec![0.0f64; t_grid.len()];
        let mut counts = vec![0usize; t_grid.len()];
        for row in per_scenario {
            if let Some((_, est)) = &row[mi] {
                for (i, h) in est.h_hat.iter().enumerate() {
                    if let Some(v) = h {
                        sums[i] += v;
                        counts[i] += 1;
                    }
                }
            }
        }
        let means = sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| (c > 0).then(|| s / c as f64))
            .collect();
        mean_estimates.push((method.label(), means));
    }
    TraceSet {
        form,
        n,
        t_grid: t_grid.to_vec(),
        truth: t_grid.iter().map(|&t| spec.holder.evaluate(t)).collect(),
        mean_estimates,
    }
}
