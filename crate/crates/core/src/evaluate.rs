//! Simulation comparison harness.
//!
//! For each repetition of a scenario: generate a batch, fit every method,
//! score the fitted fdr/Fdr at the simulated z values against the truth
//! oracle, and record mean absolute and mean squared errors plus the
//! parameter estimates. Repetitions are independent (counter-based
//! generation), so they are evaluated in parallel and aggregated by
//! repetition index; results are bit-identical regardless of thread count.
//!
//! A fit failure marks that (method, repetition) as failed and the study
//! continues; failed repetitions are excluded from the quantile summaries
//! but their indices are reported.

use rayon::prelude::*;
use serde::Serialize;

use crate::fitting::{mle_fit, plugin_fit, FitOptions};
use crate::models::{FdrRow, FdrTable, ModelKind, StatisticBatch};
use crate::simulate::{generate, SimulationScenario, TruthOracle};
use crate::{Error, Result};

/// Quantile levels reported in every summary, ascending.
pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// One estimation strategy entered in the study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum MethodSpec {
    /// Score with externally supplied (eta0, sigma); no fitting.
    Plugin { kind: ModelKind, eta0: f64, sigma: f64 },
    /// Empirical-null maximum likelihood, the "native" fit of a family.
    Mle { kind: ModelKind },
    /// Pseudo-method that returns the oracle's own values; zero-error
    /// reference row.
    Truth,
}

impl MethodSpec {
    /// Stable label used in summaries and on the command line.
    pub fn name(&self) -> String {
        match self {
            MethodSpec::Plugin { kind, .. } => format!("{kind}-plugin"),
            MethodSpec::Mle { kind } => format!("{kind}-native"),
            MethodSpec::Truth => "truth".into(),
        }
    }

    /// Parse a method label; plugin methods take the scenario's true
    /// parameters.
    pub fn parse(name: &str, scenario: &SimulationScenario) -> Result<Self> {
        match name {
            "bum-native" => Ok(MethodSpec::Mle { kind: ModelKind::Bum }),
            "hnd-native" => Ok(MethodSpec::Mle { kind: ModelKind::Hnd }),
            "bum-plugin" => Ok(MethodSpec::Plugin {
                kind: ModelKind::Bum,
                eta0: scenario.eta0_true,
                sigma: scenario.null_sd,
            }),
            "hnd-plugin" => Ok(MethodSpec::Plugin {
                kind: ModelKind::Hnd,
                eta0: scenario.eta0_true,
                sigma: scenario.null_sd,
            }),
            "truth" => Ok(MethodSpec::Truth),
            other => Err(Error::Input(format!(
                "unknown method {other:?}; expected one of bum-native, hnd-native, \
                 bum-plugin, hnd-plugin, truth"
            ))),
        }
    }
}

/// Outcome of one (method, repetition) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RepRecord {
    pub rep: usize,
    pub mae_fdr: f64,
    #[serde(rename = "mae_Fdr")]
    pub mae_tail_fdr: f64,
    pub mse_fdr: f64,
    #[serde(rename = "mse_Fdr")]
    pub mse_tail_fdr: f64,
    pub eta0_hat: f64,
    pub sigma_hat: f64,
    pub converged: bool,
    pub at_boundary: bool,
}

/// Per-metric quantiles at [`QUANTILE_LEVELS`] over successful repetitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantileSummary {
    pub levels: [f64; 5],
    pub mae_fdr: [f64; 5],
    #[serde(rename = "mae_Fdr")]
    pub mae_tail_fdr: [f64; 5],
    pub mse_fdr: [f64; 5],
    #[serde(rename = "mse_Fdr")]
    pub mse_tail_fdr: [f64; 5],
    pub eta0_hat: [f64; 5],
    pub sigma_hat: [f64; 5],
}

impl QuantileSummary {
    fn from_reps(reps: &[RepRecord]) -> Option<Self> {
        if reps.is_empty() {
            return None;
        }
        let col = |metric: fn(&RepRecord) -> f64| -> [f64; 5] {
            let mut v: Vec<f64> = reps.iter().map(metric).collect();
            v.sort_by(|a, b| a.partial_cmp(b).expect("metrics are finite"));
            QUANTILE_LEVELS.map(|q| quantile(&v, q))
        };
        Some(QuantileSummary {
            levels: QUANTILE_LEVELS,
            mae_fdr: col(|r| r.mae_fdr),
            mae_tail_fdr: col(|r| r.mae_tail_fdr),
            mse_fdr: col(|r| r.mse_fdr),
            mse_tail_fdr: col(|r| r.mse_tail_fdr),
            eta0_hat: col(|r| r.eta0_hat),
            sigma_hat: col(|r| r.sigma_hat),
        })
    }

    /// Median of a metric (level 0.5).
    pub fn median(values: &[f64; 5]) -> f64 {
        values[2]
    }
}

/// All repetitions of one method, ordered by repetition index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodSeries {
    pub method: String,
    pub spec: MethodSpec,
    /// Successful repetitions only.
    pub reps: Vec<RepRecord>,
    /// Indices of repetitions whose fit failed.
    pub failed_reps: Vec<usize>,
    /// None when every repetition failed.
    pub quantiles: Option<QuantileSummary>,
}

/// Full study output: the scenario it ran on plus one series per method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalSummary {
    pub scenario: SimulationScenario,
    pub methods: Vec<MethodSeries>,
}

/// Signed median parameter bias of one method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamBias {
    pub method: String,
    pub eta0_bias: f64,
    pub sigma_bias: f64,
}

/// Run every method on every repetition of the scenario.
///
/// Deterministic given the scenario: repetition r always sees the stream
/// (seed, r), whatever the thread schedule. Fit failures never abort the
/// study; they are recorded in `failed_reps` of the affected method.
pub fn run_study(scenario: &SimulationScenario, methods: &[MethodSpec]) -> Result<EvalSummary> {
    if methods.is_empty() {
        return Err(Error::Input("method list must not be empty".into()));
    }
    let oracle = scenario.oracle();
    let per_rep: Vec<Result<Vec<Option<RepRecord>>>> = (0..scenario.reps)
        .into_par_iter()
        .map(|rep| {
            let batch = generate(scenario, rep)?;
            Ok(methods
                .iter()
                .map(|spec| evaluate_once(&oracle, &batch, spec, rep))
                .collect())
        })
        .collect();
    // sequential unwrap keeps the reported error deterministic (lowest rep)
    let per_rep: Vec<Vec<Option<RepRecord>>> = per_rep.into_iter().collect::<Result<_>>()?;

    let methods = methods
        .iter()
        .enumerate()
        .map(|(j, spec)| {
            let mut reps = Vec::new();
            let mut failed_reps = Vec::new();
            for (rep, row) in per_rep.iter().enumerate() {
                match row[j] {
                    Some(record) => reps.push(record),
                    None => failed_reps.push(rep),
                }
            }
            let quantiles = QuantileSummary::from_reps(&reps);
            MethodSeries {
                method: spec.name(),
                spec: *spec,
                reps,
                failed_reps,
                quantiles,
            }
        })
        .collect();

    Ok(EvalSummary {
        scenario: *scenario,
        methods,
    })
}

/// Median estimate minus truth, per method; methods with no successful
/// repetition are skipped.
pub fn param_bias(summary: &EvalSummary) -> Vec<ParamBias> {
    let scenario = &summary.scenario;
    summary
        .methods
        .iter()
        .filter_map(|series| {
            let q = series.quantiles.as_ref()?;
            Some(ParamBias {
                method: series.method.clone(),
                eta0_bias: QuantileSummary::median(&q.eta0_hat) - scenario.eta0_true,
                sigma_bias: QuantileSummary::median(&q.sigma_hat) - scenario.null_sd,
            })
        })
        .collect()
}

/// Linear-interpolation quantile of a sorted sample: h = (n-1)q, then
/// interpolate between the neighbors of h (the R type 7 convention).
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(
        !sorted.is_empty() && (0.0..=1.0).contains(&q),
        "quantile needs a nonempty sample and q in [0, 1]"
    );
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 == sorted.len() {
        sorted[lo]
    } else {
        sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
    }
}

fn evaluate_once(
    oracle: &TruthOracle,
    batch: &StatisticBatch,
    spec: &MethodSpec,
    rep: usize,
) -> Option<RepRecord> {
    let scenario = oracle.scenario();
    let (fit, table) = match *spec {
        MethodSpec::Plugin { kind, eta0, sigma } => plugin_fit(kind, eta0, sigma, batch).ok()?,
        MethodSpec::Mle { kind } => mle_fit(kind, batch, &FitOptions::default()).ok()?,
        MethodSpec::Truth => {
            // the pseudo-method's predictions are the oracle's own values,
            // scored through the same error path as the real methods
            let rows = batch
                .values()
                .iter()
                .map(|&z| FdrRow {
                    raw: z,
                    y: z.abs() / scenario.null_sd,
                    fdr: oracle.true_local_fdr(z),
                    tail_fdr: oracle.true_tail_fdr(z),
                })
                .collect();
            let errors = score_errors(oracle, &FdrTable { rows });
            return Some(RepRecord {
                rep,
                mae_fdr: errors.0,
                mae_tail_fdr: errors.1,
                mse_fdr: errors.2,
                mse_tail_fdr: errors.3,
                eta0_hat: scenario.eta0_true,
                sigma_hat: scenario.null_sd,
                converged: true,
                at_boundary: false,
            });
        }
    };
    let errors = score_errors(oracle, &table);
    Some(RepRecord {
        rep,
        mae_fdr: errors.0,
        mae_tail_fdr: errors.1,
        mse_fdr: errors.2,
        mse_tail_fdr: errors.3,
        eta0_hat: fit.eta0_hat,
        sigma_hat: fit.sigma_hat,
        converged: fit.converged,
        at_boundary: fit.at_boundary,
    })
}

/// (mae_fdr, mae_Fdr, mse_fdr, mse_Fdr) of a scored table against the truth.
fn score_errors(oracle: &TruthOracle, table: &FdrTable) -> (f64, f64, f64, f64) {
    let m = table.rows.len() as f64;
    let (mut mae_l, mut mae_t, mut mse_l, mut mse_t) = (0.0, 0.0, 0.0, 0.0);
    for row in &table.rows {
        let dl = row.fdr - oracle.true_local_fdr(row.raw);
        let dt = row.tail_fdr - oracle.true_tail_fdr(row.raw);
        mae_l += dl.abs();
        mae_t += dt.abs();
        mse_l += dl * dl;
        mse_t += dt * dt;
    }
    (mae_l / m, mae_t / m, mse_l / m, mse_t / m)
}
