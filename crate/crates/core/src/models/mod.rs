//! Threshold-curve mixture models.
//!
//! Both models describe a two-component mixture f = eta0 f0 + (1 - eta0) fA
//! through the pair (null density f0, local fdr curve): the local fdr
//! fdr(y) = eta0 f0(y) / f(y) is modeled directly as a parametric monotone
//! curve, and everything else (marginal, alternative, tail Fdr) follows from
//! the identities
//!
//! ```text
//! f(y)   = eta0 f0(y) / fdr(y)
//! Fdr(y) = eta0 (1 - F0(y)) / (1 - F(y))
//! 1/eta0 = integral of f0 / fdr
//! ```
//!
//! [`bum::BumModel`] works on the unit interval (y = 1 - p), with a uniform
//! null. [`hnd::HndModel`] works on [0, inf) (y = |z|/sigma), with a
//! half-normal null. [`ThresholdModel`] is the model-generic handle the
//! fitting, simulation, and CLI layers use.

pub mod bum;
pub mod hnd;

pub use bum::{BumDensities, BumModel};
pub use hnd::{HndDensities, HndModel};

use crate::{Error, Result};
use serde::Serialize;

/// Scale on which a raw statistic is expressed.
///
/// Two-sided conventions throughout: z-scores fold as |z|/sigma, p-values
/// map through y = 1 - p (BUM) or y = Phi^-1(1 - p/2) (HND).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticScale {
    PValue,
    ZScore,
    NativeY,
}

/// Model family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Bum,
    Hnd,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Bum => "bum",
            ModelKind::Hnd => "hnd",
        })
    }
}

/// Observed test statistics with their declared scale.
///
/// Construction validates every value against the scale (p in [0,1], z
/// finite, native y >= 0); error messages carry the 1-based row position.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticBatch {
    values: Vec<f64>,
    scale: StatisticScale,
}

impl StatisticBatch {
    pub fn new(values: Vec<f64>, scale: StatisticScale) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("statistic batch is empty".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            let ok = match scale {
                StatisticScale::PValue => (0.0..=1.0).contains(&v),
                StatisticScale::ZScore => v.is_finite(),
                StatisticScale::NativeY => v >= 0.0 && !v.is_nan(),
            };
            if !ok {
                return Err(Error::Input(format!(
                    "row {}: value {v} is not valid on the {scale:?} scale",
                    i + 1
                )));
            }
        }
        Ok(StatisticBatch { values, scale })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scale(&self) -> StatisticScale {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// One scored observation: the raw statistic as supplied, its native y,
/// and the two error rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdrRow {
    pub raw: f64,
    pub y: f64,
    pub fdr: f64,
    #[serde(rename = "Fdr")]
    pub tail_fdr: f64,
}

/// Scored batch, one row per observation, input order preserved.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct FdrTable {
    pub rows: Vec<FdrRow>,
}

/// One point of a threshold-curve plot on a chosen scale: the error rates
/// plus the null/marginal/alternative densities expressed on that scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub fdr: f64,
    #[serde(rename = "Fdr")]
    pub tail_fdr: f64,
    pub f: f64,
    pub f0: f64,
    #[serde(rename = "fA")]
    pub f_alt: f64,
}

/// A fitted or constructed model of either family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdModel {
    Bum(BumModel),
    Hnd(HndModel),
}

impl ThresholdModel {
    pub fn new(kind: ModelKind, s: f64, sigma: f64) -> Result<Self> {
        Ok(match kind {
            ModelKind::Bum => ThresholdModel::Bum(BumModel::new(s, sigma)?),
            ModelKind::Hnd => ThresholdModel::Hnd(HndModel::new(s, sigma)?),
        })
    }

    /// Construct from a null proportion. BUM: s = eta0 identically.
    /// HND: inverts the strictly increasing eta0(s) map.
    pub fn from_eta0(kind: ModelKind, eta0: f64, sigma: f64) -> Result<Self> {
        match kind {
            ModelKind::Bum => Self::new(kind, eta0, sigma),
            ModelKind::Hnd => Ok(ThresholdModel::Hnd(HndModel::from_eta0(eta0, sigma)?)),
        }
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            ThresholdModel::Bum(_) => ModelKind::Bum,
            ThresholdModel::Hnd(_) => ModelKind::Hnd,
        }
    }

    pub fn s(&self) -> f64 {
        match self {
            ThresholdModel::Bum(m) => m.s(),
            ThresholdModel::Hnd(m) => m.s(),
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            ThresholdModel::Bum(m) => m.sigma(),
            ThresholdModel::Hnd(m) => m.sigma(),
        }
    }

    pub fn eta0(&self) -> f64 {
        match self {
            ThresholdModel::Bum(m) => m.eta0(),
            ThresholdModel::Hnd(m) => m.eta0(),
        }
    }

    pub fn to_native_y(&self, x: f64, scale: StatisticScale) -> Result<f64> {
        match self {
            ThresholdModel::Bum(m) => m.to_native_y(x, scale),
            ThresholdModel::Hnd(m) => m.to_native_y(x, scale),
        }
    }

    pub fn local_fdr(&self, y: f64) -> Result<f64> {
        match self {
            ThresholdModel::Bum(m) => m.local_fdr(y),
            ThresholdModel::Hnd(m) => m.local_fdr(y),
        }
    }

    pub fn tail_fdr(&self, y: f64) -> Result<f64> {
        match self {
            ThresholdModel::Bum(m) => m.tail_fdr(y),
            ThresholdModel::Hnd(m) => m.tail_fdr(y),
        }
    }

    /// log of the marginal z-score density (two-sided, on all of R).
    pub fn log_marginal_z(&self, z: f64) -> Result<f64> {
        match self {
            ThresholdModel::Bum(m) => m.log_marginal_z(z),
            ThresholdModel::Hnd(m) => m.log_marginal_z(z),
        }
    }

    /// Score a batch: convert each statistic to native y and evaluate both
    /// error rates. Output order matches input order; errors name the
    /// offending 1-based row.
    pub fn score_batch(&self, batch: &StatisticBatch) -> Result<FdrTable> {
        let mut rows = Vec::with_capacity(batch.len());
        for (i, &raw) in batch.values().iter().enumerate() {
            let row = self
                .score_one(raw, batch.scale())
                .map_err(|e| at_row(e, i))?;
            rows.push(row);
        }
        Ok(FdrTable { rows })
    }

    fn score_one(&self, raw: f64, scale: StatisticScale) -> Result<FdrRow> {
        let y = self.to_native_y(raw, scale)?;
        Ok(FdrRow {
            raw,
            y,
            fdr: self.local_fdr(y)?,
            tail_fdr: self.tail_fdr(y)?,
        })
    }

    /// Evaluate one curve point on the requested scale.
    ///
    /// Densities are densities *of the plotted variable*: on the z scale the
    /// folded |z| (null 2 phi(x/sigma)/sigma), on the p scale the p-value
    /// (null uniform, marginal eta0/fdr by the probability-integral
    /// transform), on the native scale the model's own f0/f/fA. The p = 0
    /// row of an impure model has f = fA = inf: the alternative piles up an
    /// integrable spike at the origin.
    pub fn curve_point(&self, x: f64, scale: StatisticScale) -> Result<CurvePoint> {
        let y = self.to_native_y(x, scale)?;
        let fdr = self.local_fdr(y)?;
        let tail_fdr = self.tail_fdr(y)?;
        let eta0 = self.eta0();
        let (f0, f, direct_alt) = match scale {
            StatisticScale::ZScore => {
                let sigma = self.sigma();
                let f0 = 2.0 * crate::numerics::norm_pdf(x / sigma) / sigma;
                (f0, 2.0 * self.log_marginal_z(x)?.exp(), None)
            }
            StatisticScale::PValue => {
                let f = if fdr == 0.0 { f64::INFINITY } else { eta0 / fdr };
                (1.0, f, None)
            }
            StatisticScale::NativeY => match self {
                ThresholdModel::Bum(m) => {
                    let d = m.densities(y)?;
                    (d.f0, d.f, Some(d.f_alt))
                }
                ThresholdModel::Hnd(m) => {
                    let d = m.densities(y)?;
                    (d.f0, d.f, Some(d.f_alt))
                }
            },
        };
        let f_alt = match direct_alt {
            Some(v) => v,
            None if eta0 == 1.0 => 0.0,
            // rounding can push the plateau difference a hair negative
            None => ((f - eta0 * f0) / (1.0 - eta0)).max(0.0),
        };
        Ok(CurvePoint {
            x,
            fdr,
            tail_fdr,
            f,
            f0,
            f_alt,
        })
    }
}

fn at_row(err: Error, index: usize) -> Error {
    match err {
        Error::Domain(m) => Error::Domain(format!("row {}: {m}", index + 1)),
        other => other,
    }
}

/// Probabilities may leave [0,1] by rounding only. Within 1e-9 they are
/// clamped; anything further out is a genuine inconsistency.
pub(crate) fn clamp_unit(x: f64, what: &str) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else if (-1e-9..0.0).contains(&x) {
        Ok(0.0)
    } else if x > 1.0 && x <= 1.0 + 1e-9 {
        Ok(1.0)
    } else {
        Err(Error::Inconsistent(format!("{what} = {x} is outside [0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hnd(s: f64) -> ThresholdModel {
        ThresholdModel::new(ModelKind::Hnd, s, 1.0).unwrap()
    }

    fn bum(s: f64) -> ThresholdModel {
        ThresholdModel::new(ModelKind::Bum, s, 1.0).unwrap()
    }

    /// 1000-point grid on the model's native range (BUM stops short of the
    /// y = 1 singularity).
    fn native_grid(model: &ThresholdModel) -> Vec<f64> {
        let hi = match model.kind() {
            ModelKind::Bum => 0.999,
            ModelKind::Hnd => 8.0,
        };
        (0..1000).map(|i| hi * i as f64 / 999.0).collect()
    }

    #[test]
    fn batch_validation() {
        assert!(StatisticBatch::new(vec![], StatisticScale::ZScore).is_err());
        assert!(StatisticBatch::new(vec![0.0, f64::NAN], StatisticScale::ZScore).is_err());
        assert!(StatisticBatch::new(vec![0.5, 1.2], StatisticScale::PValue).is_err());
        assert!(StatisticBatch::new(vec![-0.1], StatisticScale::NativeY).is_err());
        let err = StatisticBatch::new(vec![0.5, 2.0], StatisticScale::PValue).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let b = StatisticBatch::new(vec![-1.5, 0.0, 3.0], StatisticScale::ZScore).unwrap();
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn from_eta0_dispatch() {
        let b = ThresholdModel::from_eta0(ModelKind::Bum, 0.8, 1.0).unwrap();
        assert_eq!(b.s(), 0.8);
        assert_eq!(b.eta0(), 0.8);
        let h = ThresholdModel::from_eta0(ModelKind::Hnd, 0.8, 1.0).unwrap();
        assert!((h.s() - 0.862).abs() < 1e-3);
        assert!((h.eta0() - 0.8).abs() < 1e-10);
    }

    #[test]
    fn score_batch_reference_rows() {
        // z = 0 under the standard impure model: fdr = 1, Fdr = eta0
        let h = hnd(0.862);
        let batch = StatisticBatch::new(vec![0.0], StatisticScale::ZScore).unwrap();
        let table = h.score_batch(&batch).unwrap();
        assert_eq!(table.rows[0].fdr, 1.0);
        assert_eq!(table.rows[0].tail_fdr, h.eta0());
        assert!((table.rows[0].tail_fdr - 0.8).abs() < 1e-3);

        // pure-null BUM scores everything as certainly null
        let pure = bum(1.0);
        let batch =
            StatisticBatch::new(vec![-4.0, 0.0, 2.5, 7.0], StatisticScale::ZScore).unwrap();
        for row in pure.score_batch(&batch).unwrap().rows {
            assert_eq!(row.fdr, 1.0);
            assert_eq!(row.tail_fdr, 1.0);
        }

        // z-scale invariance: (sigma = 2, z = 3.724) == (sigma = 1, z = 1.862)
        let wide = ThresholdModel::new(ModelKind::Hnd, 0.862, 2.0).unwrap();
        let narrow = hnd(0.862);
        let a = wide
            .score_batch(&StatisticBatch::new(vec![3.724], StatisticScale::ZScore).unwrap())
            .unwrap();
        let b = narrow
            .score_batch(&StatisticBatch::new(vec![1.862], StatisticScale::ZScore).unwrap())
            .unwrap();
        assert_eq!(a.rows[0].y.to_bits(), b.rows[0].y.to_bits());
        assert_eq!(a.rows[0].fdr.to_bits(), b.rows[0].fdr.to_bits());
        assert!((a.rows[0].fdr - (-0.5f64).exp()).abs() < 1e-15);

        // order preserved, rows aligned with input
        let zs = vec![2.0, -1.0, 0.5];
        let table = narrow
            .score_batch(&StatisticBatch::new(zs.clone(), StatisticScale::ZScore).unwrap())
            .unwrap();
        for (row, z) in table.rows.iter().zip(&zs) {
            assert_eq!(row.raw, *z);
            assert_eq!(row.y, z.abs());
        }
    }

    #[test]
    fn score_batch_errors_name_the_row() {
        // native-y batch validation is scale-generic, so a y > 1 reaches the
        // BUM range check inside score_batch
        let batch = StatisticBatch::new(vec![0.5, 1.5], StatisticScale::NativeY).unwrap();
        let err = bum(0.8).score_batch(&batch).unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
    }

    #[test]
    fn eq3_identity_grid() {
        // f(y) * fdr(y) = eta0 * f0(y) pointwise, 1000-point grids
        for model in [bum(0.2), bum(0.8), bum(0.95)] {
            let ThresholdModel::Bum(inner) = model else { unreachable!() };
            for y in native_grid(&model) {
                let d = inner.densities(y).unwrap();
                let lhs = d.f * model.local_fdr(y).unwrap();
                assert!((lhs - model.eta0() * d.f0).abs() < 1e-12, "BUM y={y}");
            }
        }
        for model in [hnd(0.1), hnd(0.862), hnd(4.0)] {
            let ThresholdModel::Hnd(inner) = model else { unreachable!() };
            for y in native_grid(&model) {
                let d = inner.densities(y).unwrap();
                let lhs = d.f * model.local_fdr(y).unwrap();
                assert!((lhs - model.eta0() * d.f0).abs() < 1e-12, "HND y={y}");
            }
        }
    }

    #[test]
    fn hnd_inflection_properties() {
        // fdr has its inflection one unit past the plateau edge, where its
        // value is e^{-1/2} and its slope is -e^{-1/2}
        let target = (-0.5f64).exp();
        for s in [0.5, 0.862, 2.0] {
            let model = hnd(s);
            let fdr = |y: f64| model.local_fdr(y).unwrap();

            let step = 1e-3;
            let second = |y: f64| fdr(y + step) - 2.0 * fdr(y) + fdr(y - step);
            let mut crossing = None;
            let mut y = s + 0.5;
            while y < s + 1.5 {
                if second(y) <= 0.0 && second(y + step) > 0.0 {
                    crossing = Some(y + step / 2.0);
                    break;
                }
                y += step;
            }
            let crossing = crossing.expect("no inflection found");
            assert!((crossing - (s + 1.0)).abs() < 1e-3, "s={s} at {crossing}");

            assert!((fdr(s + 1.0) - target).abs() < 1e-9);
            let h = 1e-5;
            let slope = (fdr(s + 1.0 + h) - fdr(s + 1.0 - h)) / (2.0 * h);
            assert!((slope + target).abs() < 1e-4, "s={s} slope={slope}");
        }
    }

    #[test]
    fn scale_invariance_p_vs_z() {
        // two-sided p for |z|: p = erfc(|z| / sqrt 2); scoring either
        // representation gives the same error rates to 1e-9
        for model in [bum(0.8), hnd(0.862), bum(0.35), hnd(2.0)] {
            for i in 0..=60 {
                let z = 0.1 * i as f64;
                let p = crate::numerics::erfc(z / std::f64::consts::SQRT_2);
                let from_z = model
                    .score_batch(&StatisticBatch::new(vec![z], StatisticScale::ZScore).unwrap())
                    .unwrap();
                let from_p = model
                    .score_batch(&StatisticBatch::new(vec![p], StatisticScale::PValue).unwrap())
                    .unwrap();
                let dz = from_z.rows[0];
                let dp = from_p.rows[0];
                assert!((dz.fdr - dp.fdr).abs() <= 1e-9, "z={z} {} {}", dz.fdr, dp.fdr);
                assert!(
                    (dz.tail_fdr - dp.tail_fdr).abs() <= 1e-9,
                    "z={z} {} {}",
                    dz.tail_fdr,
                    dp.tail_fdr
                );
            }
        }
    }

    #[test]
    fn curve_point_reference() {
        let h = ThresholdModel::from_eta0(ModelKind::Hnd, 0.8, 1.0).unwrap();
        let at0 = h.curve_point(0.0, StatisticScale::ZScore).unwrap();
        assert_eq!(at0.fdr, 1.0);
        assert!((at0.tail_fdr - 0.8).abs() < 1e-10);
        assert!((at0.f0 - 2.0 * crate::numerics::norm_pdf(0.0)).abs() < 1e-15);
        assert!((at0.f - h.eta0() * at0.f0).abs() < 1e-12);
        assert!(at0.f_alt < 1e-12); // plateau: exactly zero up to rounding

        // pure-null BUM: fdr identically 1, marginal equals null
        let pure = bum(1.0);
        for i in 0..10 {
            let p = pure.curve_point(0.1 * i as f64, StatisticScale::PValue).unwrap();
            assert_eq!(p.fdr, 1.0);
            assert_eq!(p.f0, 1.0);
            assert!((p.f - 1.0).abs() < 1e-12);
            assert_eq!(p.f_alt, 0.0);
        }

        // the two families disagree visibly at z = 2 for the same eta0
        let b = ThresholdModel::from_eta0(ModelKind::Bum, 0.8, 1.0).unwrap();
        let hz = h.curve_point(2.0, StatisticScale::ZScore).unwrap();
        let bz = b.curve_point(2.0, StatisticScale::ZScore).unwrap();
        assert!((hz.fdr - bz.fdr).abs() > 0.05, "{} vs {}", hz.fdr, bz.fdr);

        // p = 0 row of an impure model: the alternative spikes
        let p0 = h.curve_point(0.0, StatisticScale::PValue).unwrap();
        assert_eq!(p0.fdr, 0.0);
        assert_eq!(p0.tail_fdr, 0.0);
        assert!(p0.f.is_infinite());

        // native-scale points route through the model's own densities
        let ThresholdModel::Hnd(inner) = h else { unreachable!() };
        let ny = h.curve_point(1.5, StatisticScale::NativeY).unwrap();
        let d = inner.densities(1.5).unwrap();
        assert_eq!(ny.f.to_bits(), d.f.to_bits());
        assert_eq!(ny.f_alt.to_bits(), d.f_alt.to_bits());

        // z-scale marginal matches eta0 f0 / fdr on the folded scale
        let z2 = h.curve_point(2.0, StatisticScale::ZScore).unwrap();
        assert!((z2.f - h.eta0() * z2.f0 / z2.fdr).abs() < 1e-12);
    }

    #[test]
    fn clamp_unit_policy() {
        assert_eq!(clamp_unit(0.5, "t").unwrap(), 0.5);
        assert_eq!(clamp_unit(-5e-10, "t").unwrap(), 0.0);
        assert_eq!(clamp_unit(1.0 + 5e-10, "t").unwrap(), 1.0);
        assert!(clamp_unit(-1e-8, "t").is_err());
        assert!(clamp_unit(1.0 + 1e-8, "t").is_err());
        assert!(clamp_unit(f64::NAN, "t").is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        // fdr and Fdr non-increasing in y; Fdr <= fdr pointwise; density
        // positivity and CDF monotonicity, both families
        #[test]
        fn monotone_and_ordered_bum(s in 0.05f64..1.0) {
            let model = bum(s);
            let ThresholdModel::Bum(inner) = model else { unreachable!() };
            let mut prev_fdr = f64::INFINITY;
            let mut prev_tail = f64::INFINITY;
            let mut prev_cdf = -1.0f64;
            for y in native_grid(&model) {
                let fdr = model.local_fdr(y).unwrap();
                let tail = model.tail_fdr(y).unwrap();
                prop_assert!((0.0..=1.0).contains(&fdr));
                prop_assert!((0.0..=1.0).contains(&tail));
                prop_assert!(fdr <= prev_fdr + 1e-15);
                prop_assert!(tail <= prev_tail + 1e-15);
                prop_assert!(tail <= fdr + 1e-12);
                let d = inner.densities(y).unwrap();
                prop_assert!(d.f >= 0.0 && d.f_alt >= 0.0);
                prop_assert!((0.0..=1.0).contains(&d.cdf));
                prop_assert!(d.cdf >= prev_cdf - 1e-15);
                prev_fdr = fdr;
                prev_tail = tail;
                prev_cdf = d.cdf;
            }
        }

        #[test]
        fn monotone_and_ordered_hnd(s in 0.1f64..5.0) {
            let model = hnd(s);
            let ThresholdModel::Hnd(inner) = model else { unreachable!() };
            let mut prev_fdr = f64::INFINITY;
            let mut prev_tail = f64::INFINITY;
            let mut prev_cdf = -1.0f64;
            for y in native_grid(&model) {
                let fdr = model.local_fdr(y).unwrap();
                let tail = model.tail_fdr(y).unwrap();
                prop_assert!((0.0..=1.0).contains(&fdr));
                prop_assert!((0.0..=1.0).contains(&tail));
                prop_assert!(fdr <= prev_fdr + 1e-15);
                prop_assert!(tail <= prev_tail + 1e-15);
                prop_assert!(tail <= fdr + 1e-12);
                let d = inner.densities(y).unwrap();
                prop_assert!(d.f >= 0.0 && d.f_alt >= 0.0);
                prop_assert!((0.0..=1.0).contains(&d.cdf));
                prop_assert!(d.cdf >= prev_cdf - 1e-15);
                prev_fdr = fdr;
                prev_tail = tail;
                prev_cdf = d.cdf;
            }
        }

        // scoring never panics and keeps Fdr(0) = eta0 for any (s, sigma)
        #[test]
        fn fdr_at_origin(s in 0.05f64..1.0, sigma in 0.1f64..5.0) {
            let b = ThresholdModel::new(ModelKind::Bum, s, sigma).unwrap();
            prop_assert_eq!(b.tail_fdr(0.0).unwrap(), b.eta0());
            let h = ThresholdModel::new(ModelKind::Hnd, s.max(1e-4) * 3.0, sigma).unwrap();
            prop_assert_eq!(h.tail_fdr(0.0).unwrap(), h.eta0());
        }
    }
}
