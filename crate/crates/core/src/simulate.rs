//! Synthetic z-score batches from the two benchmark mixture scenarios,
//! plus the exact truth oracle for the generating mixture.
//!
//! A scenario draws each observation from
//!
//! ```text
//! eta0 N(0, null_sd^2)  +  (1 - eta0) U(+-[alt_lo, alt_hi])
//! ```
//!
//! with the two uniform sides carrying equal weight. The `separated`
//! preset uses alt [5, 10] (no overlap with the null to speak of), the
//! `overlapping` preset alt [2, 10]; both use eta0 = 0.8, null sd = 2.
//!
//! Generation is counter-based: repetition r consumes its own stream
//! derived from (seed, r), so batches are bit-identical across runs and
//! platforms, independent across repetitions, and safe to generate in
//! parallel or out of order.

use crate::models::{StatisticBatch, StatisticScale};
use crate::numerics::{erfc, norm_quantile};
use crate::numerics::normal::SQRT_2;
use crate::{Error, Result};
use serde::Serialize;

/// One benchmark mixture configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationScenario {
    pub eta0_true: f64,
    pub null_sd: f64,
    pub alt_lo: f64,
    pub alt_hi: f64,
    /// Observations per repetition.
    pub m: usize,
    /// Number of repetitions.
    #[serde(rename = "B")]
    pub reps: usize,
    pub seed: u64,
}

impl SimulationScenario {
    pub fn new(
        eta0_true: f64,
        null_sd: f64,
        alt_lo: f64,
        alt_hi: f64,
        m: usize,
        reps: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta0_true) {
            return Err(Error::Input(format!("eta0 must be in [0, 1], got {eta0_true}")));
        }
        if !(null_sd > 0.0 && null_sd.is_finite()) {
            return Err(Error::Input(format!("null_sd must be positive, got {null_sd}")));
        }
        if !(0.0 < alt_lo && alt_lo < alt_hi && alt_hi.is_finite()) {
            return Err(Error::Input(format!(
                "alternative bounds must satisfy 0 < alt_lo < alt_hi, got [{alt_lo}, {alt_hi}]"
            )));
        }
        if m < 1 || reps < 1 {
            return Err(Error::Input(format!("m and B must be >= 1, got m={m}, B={reps}")));
        }
        Ok(SimulationScenario {
            eta0_true,
            null_sd,
            alt_lo,
            alt_hi,
            m,
            reps,
            seed,
        })
    }

    /// Null and alternative well apart: N(0, 4) vs U(+-[5, 10]).
    pub fn separated() -> Self {
        SimulationScenario::new(0.8, 2.0, 5.0, 10.0, 200, 100, 1).unwrap()
    }

    /// Alternative reaching into the null bulk: N(0, 4) vs U(+-[2, 10]).
    pub fn overlapping() -> Self {
        SimulationScenario::new(0.8, 2.0, 2.0, 10.0, 200, 100, 1).unwrap()
    }

    /// Parse a `key = value` scenario file.
    ///
    /// Keys: eta0, null_sd, alt_lo, alt_hi (required); m, B, seed
    /// (defaults 200, 100, 1). `#` starts a comment; blank lines are
    /// skipped; a repeated key is an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut eta0 = None;
        let mut null_sd = None;
        let mut alt_lo = None;
        let mut alt_hi = None;
        let mut m: Option<usize> = None;
        let mut reps: Option<usize> = None;
        let mut seed: Option<u64> = None;
        for (idx, raw_line) in text.lines().enumerate() {
            let line = match raw_line.split_once('#') {
                Some((before, _)) => before,
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Input(format!(
                    "line {lineno}: expected `key = value`, got {line:?}"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            fn put<T: std::str::FromStr>(
                slot: &mut Option<T>,
                key: &str,
                value: &str,
                lineno: usize,
            ) -> Result<()> {
                if slot.is_some() {
                    return Err(Error::Input(format!("line {lineno}: duplicate key {key}")));
                }
                match value.parse::<T>() {
                    Ok(v) => {
                        *slot = Some(v);
                        Ok(())
                    }
                    Err(_) => Err(Error::Input(format!(
                        "line {lineno}: cannot parse {value:?} as a value for {key}"
                    ))),
                }
            }
            match key {
                "eta0" => put(&mut eta0, key, value, lineno)?,
                "null_sd" => put(&mut null_sd, key, value, lineno)?,
                "alt_lo" => put(&mut alt_lo, key, value, lineno)?,
                "alt_hi" => put(&mut alt_hi, key, value, lineno)?,
                "m" => put(&mut m, key, value, lineno)?,
                "B" => put(&mut reps, key, value, lineno)?,
                "seed" => put(&mut seed, key, value, lineno)?,
                other => {
                    return Err(Error::Input(format!("line {lineno}: unknown key {other:?}")));
                }
            }
        }
        let require = |slot: Option<f64>, key: &str| {
            slot.ok_or_else(|| Error::Input(format!("scenario file is missing key {key}")))
        };
        SimulationScenario::new(
            require(eta0, "eta0")?,
            require(null_sd, "null_sd")?,
            require(alt_lo, "alt_lo")?,
            require(alt_hi, "alt_hi")?,
            m.unwrap_or(200),
            reps.unwrap_or(100),
            seed.unwrap_or(1),
        )
    }

    pub fn oracle(&self) -> TruthOracle {
        TruthOracle { scenario: *self }
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD6E8_FEB8_6659_FD93;

/// splitmix64 finalizer: the standard 30/27/31 xor-shift-multiply chain.
fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Counter-based splitmix64 stream.
///
/// The algorithm is fixed and platform-independent: stream initialization
/// is state = mix(mix(seed + GOLDEN) ^ (stream * GOLDEN + SALT)), and each
/// output advances the counter by the golden-ratio increment and finalizes
/// it, out = mix(state += GOLDEN). Distinct (seed, stream) pairs give
/// effectively independent sequences, one per simulation repetition.
#[derive(Debug, Clone)]
pub struct RngStream {
    state: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let s0 = mix(seed.wrapping_add(GOLDEN));
        RngStream {
            state: mix(s0 ^ stream.wrapping_mul(GOLDEN).wrapping_add(STREAM_SALT)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform on (0, 1), both endpoints strictly excluded: the top 53 bits
    /// are centered in their cell, so the extremes are 2^-54 and 1 - 2^-54.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * 2f64.powi(-53)
    }

    /// Standard normal by inversion; exact to the quantile function's
    /// accuracy, monotone in the underlying uniform.
    pub fn next_normal(&mut self) -> f64 {
        norm_quantile(self.next_uniform()).expect("uniform is strictly inside (0, 1)")
    }
}

/// Draw repetition `rep` of the scenario: m z-scores, each null with
/// probability eta0 (N(0, null_sd^2)) and otherwise uniform on a side of
/// +-[alt_lo, alt_hi], sides equally likely.
pub fn generate(scenario: &SimulationScenario, rep: usize) -> Result<StatisticBatch> {
    if rep >= scenario.reps {
        return Err(Error::Input(format!(
            "repetition index {rep} is out of range for B = {}",
            scenario.reps
        )));
    }
    let mut rng = RngStream::new(scenario.seed, rep as u64);
    let values = (0..scenario.m)
        .map(|_| {
            if rng.next_uniform() < scenario.eta0_true {
                scenario.null_sd * rng.next_normal()
            } else {
                let side = if rng.next_uniform() < 0.5 { -1.0 } else { 1.0 };
                let mag = scenario.alt_lo + (scenario.alt_hi - scenario.alt_lo) * rng.next_uniform();
                side * mag
            }
        })
        .collect();
    StatisticBatch::new(values, StatisticScale::ZScore)
}

/// Closed-form fdr/Fdr of the generating mixture, evaluated on folded |z|.
///
/// Folded null density 2 phi(z; 0, null_sd), folded alternative density
/// 1/(alt_hi - alt_lo) on [alt_lo, alt_hi]. Points where the mixture
/// density (or both tails) vanish return 1: no data ever lands there, and
/// 1 is the correct limit beyond the alternative's support.
#[derive(Debug, Clone, Copy)]
pub struct TruthOracle {
    scenario: SimulationScenario,
}

impl TruthOracle {
    pub fn scenario(&self) -> &SimulationScenario {
        &self.scenario
    }

    /// Folded alternative density at y = |z|.
    pub fn folded_alt_density(&self, y: f64) -> f64 {
        let sc = &self.scenario;
        if (sc.alt_lo..=sc.alt_hi).contains(&y) {
            1.0 / (sc.alt_hi - sc.alt_lo)
        } else {
            0.0
        }
    }

    /// Folded null density at y = |z|.
    pub fn folded_null_density(&self, y: f64) -> f64 {
        2.0 * crate::numerics::norm_pdf(y / self.scenario.null_sd) / self.scenario.null_sd
    }

    /// P(|Z| >= y) under the alternative: piecewise linear.
    fn alt_tail(&self, y: f64) -> f64 {
        let sc = &self.scenario;
        if y <= sc.alt_lo {
            1.0
        } else if y >= sc.alt_hi {
            0.0
        } else {
            (sc.alt_hi - y) / (sc.alt_hi - sc.alt_lo)
        }
    }

    /// CDF of |Z| under the full mixture.
    pub fn mixture_cdf_abs(&self, y: f64) -> f64 {
        let sc = &self.scenario;
        let null_cdf = crate::numerics::erf(y / (sc.null_sd * SQRT_2));
        sc.eta0_true * null_cdf + (1.0 - sc.eta0_true) * (1.0 - self.alt_tail(y))
    }

    pub fn true_local_fdr(&self, z: f64) -> f64 {
        let sc = &self.scenario;
        let y = z.abs();
        let num = sc.eta0_true * self.folded_null_density(y);
        let den = num + (1.0 - sc.eta0_true) * self.folded_alt_density(y);
        if den == 0.0 {
            1.0
        } else {
            num / den
        }
    }

    pub fn true_tail_fdr(&self, z: f64) -> f64 {
        let sc = &self.scenario;
        let y = z.abs();
        let num = sc.eta0_true * erfc(y / (sc.null_sd * SQRT_2));
        let den = num + (1.0 - sc.eta0_true) * self.alt_tail(y);
        if den == 0.0 {
            1.0
        } else {
            num / den
        }
    }
}
