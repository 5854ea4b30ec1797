//! Model fitting.
//!
//! Two routes to a [`ThresholdModel`]:
//!
//! * [`plugin_fit`]: externally supplied (eta0, sigma) are plugged into the
//!   family's eta0 <-> s mapping and the batch is scored as-is.
//! * [`mle_fit`]: (s, sigma) maximize the marginal z-score likelihood
//!   sum_i log f(z_i), f(z) = eta0 phi(z; 0, sigma) / fdr(y(z)).
//!
//! The likelihood lives on the z-score scale for both families so their
//! fits are directly comparable; the phi factor is the volume element that
//! carries the native-scale marginal over to z. Maximization is a coarse
//! grid over (s, sigma) followed by Nelder-Mead refinement in unconstrained
//! coordinates (log sigma; logit s for BUM, log(s - s_min) for HND). The
//! HND likelihood has a kink in s at every observation (the plateau edge
//! crossing a y_i), which is why the derivative-free simplex is used.

use crate::models::{
    hnd, FdrTable, ModelKind, StatisticBatch, StatisticScale, ThresholdModel,
};
use crate::numerics::{nelder_mead, OptimizerSpec};
use crate::{Error, Result};
use serde::Serialize;

/// How a model was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMode {
    Plugin,
    Mle,
}

/// A fitted model plus diagnostics.
///
/// `log_likelihood` is the z-scale marginal log-likelihood at the reported
/// parameters; it is always present for MLE fits and present for plugin
/// fits when the batch is on the z-score scale (on other scales there is
/// nothing to evaluate it on). `at_boundary` flags estimates within 1e-6 of
/// a parameter bound; a BUM fit pinned at s = 1 is reported as exactly
/// eta0_hat = s_hat = 1.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub model_kind: ModelKind,
    pub mode: FitMode,
    pub s_hat: f64,
    pub sigma_hat: f64,
    pub eta0_hat: f64,
    pub log_likelihood: Option<f64>,
    pub converged: bool,
    pub at_boundary: bool,
    pub n_obs: usize,
    #[serde(skip)]
    pub model: ThresholdModel,
}

/// Search region and optimizer settings for [`mle_fit`].
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub sigma_bounds: (f64, f64),
    /// None takes the family default: BUM [1e-6, 1], HND [1e-4, 50].
    pub s_bounds: Option<(f64, f64)>,
    /// Start-grid resolution per axis.
    pub grid_points: usize,
    pub optimizer: OptimizerSpec,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            sigma_bounds: (0.05, 20.0),
            s_bounds: None,
            grid_points: 25,
            optimizer: OptimizerSpec::default(),
        }
    }
}

const BOUNDARY_TOL: f64 = 1e-6;

impl FitOptions {
    fn resolved_s_bounds(&self, kind: ModelKind) -> (f64, f64) {
        self.s_bounds.unwrap_or(match kind {
            ModelKind::Bum => (1e-6, 1.0),
            ModelKind::Hnd => (hnd::S_MIN, hnd::S_INVERSION_MAX),
        })
    }

    fn validate(&self, kind: ModelKind) -> Result<()> {
        let (s_lo, s_hi) = self.resolved_s_bounds(kind);
        let (sig_lo, sig_hi) = self.sigma_bounds;
        let ordered = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi;
        if !ordered(s_lo, s_hi) || !ordered(sig_lo, sig_hi) {
            return Err(Error::Domain(format!(
                "fit bounds must be ordered and positive (s {s_lo}..{s_hi}, sigma {sig_lo}..{sig_hi})"
            )));
        }
        match kind {
            ModelKind::Bum if s_hi > 1.0 => {
                return Err(Error::Domain(format!("BUM s upper bound must be <= 1, got {s_hi}")));
            }
            ModelKind::Hnd if s_lo < hnd::S_MIN => {
                return Err(Error::Domain(format!(
                    "HND s lower bound must be >= {}, got {s_lo}",
                    hnd::S_MIN
                )));
            }
            _ => {}
        }
        if self.grid_points < 2 {
            return Err(Error::Domain("grid_points must be >= 2".into()));
        }
        Ok(())
    }
}

/// Construct the model for (eta0, sigma) and score the batch.
pub fn plugin_fit(
    kind: ModelKind,
    eta0: f64,
    sigma: f64,
    batch: &StatisticBatch,
) -> Result<(FitResult, FdrTable)> {
    let model = ThresholdModel::from_eta0(kind, eta0, sigma)?;
    let table = model.score_batch(batch)?;
    let log_likelihood = if batch.scale() == StatisticScale::ZScore {
        Some(batch_log_likelihood(&model, batch.values())?)
    } else {
        None
    };
    let result = FitResult {
        model_kind: kind,
        mode: FitMode::Plugin,
        s_hat: model.s(),
        sigma_hat: model.sigma(),
        eta0_hat: model.eta0(),
        log_likelihood,
        converged: true,
        at_boundary: false,
        n_obs: batch.len(),
        model,
    };
    Ok((result, table))
}

/// z-scale marginal log-likelihood of a batch at the given parameters.
pub fn log_likelihood(
    kind: ModelKind,
    s: f64,
    sigma: f64,
    batch: &StatisticBatch,
) -> Result<f64> {
    if batch.scale() != StatisticScale::ZScore {
        return Err(Error::Input(
            "log-likelihood is defined on the z-score scale".into(),
        ));
    }
    let model = ThresholdModel::new(kind, s, sigma)?;
    batch_log_likelihood(&model, batch.values())
}

fn batch_log_likelihood(model: &ThresholdModel, zs: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &z in zs {
        total += model.log_marginal_z(z)?;
    }
    Ok(total)
}

/// Maximize the marginal likelihood over (s, sigma).
///
/// Coarse grid (linear in s for BUM, log for HND; log in sigma), then
/// Nelder-Mead from the best cell. Grid ties break toward larger s, the
/// more conservative null proportion. Non-convergence of the simplex is
/// reported, not raised; the best point found is still returned.
pub fn mle_fit(
    kind: ModelKind,
    batch: &StatisticBatch,
    opts: &FitOptions,
) -> Result<(FitResult, FdrTable)> {
    opts.validate(kind)?;
    if batch.scale() != StatisticScale::ZScore {
        return Err(Error::Input(
            "maximum-likelihood fitting needs z-score input".into(),
        ));
    }
    if batch.len() < 10 {
        return Err(Error::Input(format!(
            "maximum-likelihood fitting needs at least 10 observations, got {}",
            batch.len()
        )));
    }
    let zs = batch.values();
    let (s_lo, s_hi) = opts.resolved_s_bounds(kind);
    let (sig_lo, sig_hi) = opts.sigma_bounds;

    let ll_at = |s: f64, sigma: f64| -> f64 {
        match ThresholdModel::new(kind, s, sigma)
            .and_then(|m| batch_log_likelihood(&m, zs))
        {
            Ok(v) => v,
            Err(_) => f64::NEG_INFINITY,
        }
    };

    // coarse start grid
    let n = opts.grid_points;
    let s_grid: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            match kind {
                ModelKind::Bum => s_lo + (s_hi - s_lo) * t,
                ModelKind::Hnd => (s_lo.ln() + (s_hi.ln() - s_lo.ln()) * t).exp(),
            }
        })
        .collect();
    let sig_grid: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (sig_lo.ln() + (sig_hi.ln() - sig_lo.ln()) * t).exp()
        })
        .collect();

    let mut best = (s_grid[0], sig_grid[0], f64::NEG_INFINITY);
    for &sigma in &sig_grid {
        for &s in &s_grid {
            let ll = ll_at(s, sigma);
            if ll > best.2 || (ll == best.2 && s > best.0) {
                best = (s, sigma, ll);
            }
        }
    }

    // unconstrained refinement coordinates
    let to_s = move |x: f64| -> f64 {
        match kind {
            ModelKind::Bum => sigmoid(x).clamp(s_lo, s_hi),
            ModelKind::Hnd => (s_lo + x.exp()).clamp(s_lo, s_hi),
        }
    };
    let from_s = move |s: f64| -> f64 {
        match kind {
            ModelKind::Bum => logit(s.clamp(s_lo, 1.0 - 1e-9)),
            ModelKind::Hnd => (s - s_lo).max(1e-12).ln(),
        }
    };
    let to_sigma = move |x: f64| x.exp().clamp(sig_lo, sig_hi);

    let objective = |x: &[f64]| -ll_at(to_s(x[0]), to_sigma(x[1]));
    let start = [from_s(best.0), best.1.ln()];
    let opt = nelder_mead(&objective, &start, &opts.optimizer);

    let mut s_hat = to_s(opt.x[0]);
    let mut sigma_hat = to_sigma(opt.x[1]);
    // the simplex never loses its start vertex, but clamping in the
    // back-map is not injective; keep the grid point on an exact tie-or-miss
    if -opt.f < best.2 || ll_at(s_hat, sigma_hat) < best.2 {
        s_hat = best.0;
        sigma_hat = best.1;
    }

    let mut at_boundary = s_hat - s_lo <= BOUNDARY_TOL
        || s_hi - s_hat <= BOUNDARY_TOL
        || sigma_hat - sig_lo <= BOUNDARY_TOL
        || sig_hi - sigma_hat <= BOUNDARY_TOL;
    if kind == ModelKind::Bum && s_hat >= 1.0 - BOUNDARY_TOL {
        // pinned pure-null fit is reported as exactly 1
        s_hat = 1.0;
        at_boundary = true;
    }

    let model = ThresholdModel::new(kind, s_hat, sigma_hat)?;
    let table = model.score_batch(batch)?;
    let result = FitResult {
        model_kind: kind,
        mode: FitMode::Mle,
        s_hat,
        sigma_hat,
        eta0_hat: model.eta0(),
        log_likelihood: Some(batch_log_likelihood(&model, zs)?),
        converged: opt.converged,
        at_boundary,
        n_obs: batch.len(),
        model,
    };
    Ok((result, table))
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}
