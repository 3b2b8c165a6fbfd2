//! Spectral-ensemble generation, dephasing weights, ensemble averages, the
//! delay-sweep correlation, and closed-form reference dips.
//!
//! Everything here is deterministic by construction: each pair draws from its
//! own RNG stream keyed by (seed, pair index), and every reduction uses a
//! fixed pairwise summation tree, so a given seed produces bit-identical
//! results no matter how many worker threads run the job.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::model::{
    is_half_pi, output_intensities, pair_coincidence, swapped_intensities, Convention,
    ModelParams, SpdcPair,
};

/// Spectral shape of the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumShape {
    /// Uniform detunings on [−Δ, Δ]; `bandwidth` is the half-width Δ.
    Rect,
    /// Normal detunings; `bandwidth` is the standard deviation σ.
    Gaussian,
}

impl fmt::Display for SpectrumShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumShape::Rect => write!(f, "rect"),
            SpectrumShape::Gaussian => write!(f, "gaussian"),
        }
    }
}

/// How an ensemble of pairs is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumConfig {
    pub shape: SpectrumShape,
    /// Spectral width in rad/s (half-width for `Rect`, σ for `Gaussian`).
    pub bandwidth: f64,
    /// Number of pairs N.
    pub n_pairs: usize,
    /// RNG seed; fully determines the ensemble.
    pub seed: u64,
}

/// Ensemble-averaged port intensities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntensitySummary {
    pub mean_ic: f64,
    pub mean_id: f64,
}

/// Correlation curve over a delay grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve {
    /// Strictly increasing delays (s).
    pub tau_grid: Vec<f64>,
    /// Ensemble mean of the per-pair coincidence at each delay.
    pub r_raw: Vec<f64>,
    /// `r_raw` in units of I₀²/2 (classical level = 1, range [0, 2]).
    pub r_norm: Vec<f64>,
    /// Per-pair normalized traces, one row per pair, when requested.
    pub per_pair: Option<Vec<Vec<f64>>>,
}

/// Base block below which sums run as a plain left-to-right fold.
const SUM_BLOCK: usize = 64;
/// Range length above which the pairwise tree is evaluated on worker threads.
const PAR_BLOCK: usize = 16 * 1024;

/// Pairwise sum of f(lo..hi). The tree splits every range at its midpoint,
/// so the result depends only on (lo, hi), never on scheduling.
fn pairwise_map_sum<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64,
{
    let n = hi - lo;
    if n <= SUM_BLOCK {
        return (lo..hi).map(f).sum();
    }
    let mid = lo + n / 2;
    pairwise_map_sum(lo, mid, f) + pairwise_map_sum(mid, hi, f)
}

/// Parallel evaluation of the same pairwise tree as [`pairwise_map_sum`];
/// bit-identical to the sequential result.
fn par_pairwise_map_sum<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let n = hi - lo;
    if n <= PAR_BLOCK {
        return pairwise_map_sum(lo, hi, f);
    }
    let mid = lo + n / 2;
    let (a, b) = rayon::join(
        || par_pairwise_map_sum(lo, mid, f),
        || par_pairwise_map_sum(mid, hi, f),
    );
    a + b
}

/// RNG stream for one pair: ChaCha8 keyed by the run seed, stream = index.
fn pair_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Stream salt for dephasing-weight draws, so weights stay independent of the
/// detuning draws when a caller reuses one seed for both.
const Q_WEIGHT_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

fn validate_spectrum(cfg: &SpectrumConfig) -> Result<()> {
    if cfg.n_pairs == 0 {
        return Err(Error::Config("n_pairs must be >= 1".into()));
    }
    if !cfg.bandwidth.is_finite() || cfg.bandwidth <= 0.0 {
        return Err(Error::Config(format!(
            "bandwidth must be > 0 (got {})",
            cfg.bandwidth
        )));
    }
    Ok(())
}

/// Draws N i.i.d. detunings from the configured spectrum, all with unit
/// dephasing weight. Deterministic for a fixed seed regardless of how many
/// threads run the sampling.
pub fn sample_spectrum(cfg: &SpectrumConfig) -> Result<Vec<SpdcPair>> {
    use rayon::prelude::*;

    validate_spectrum(cfg)?;
    let pairs = (0..cfg.n_pairs)
        .into_par_iter()
        .map(|j| {
            let mut rng = pair_rng(cfg.seed, j as u64);
            let delta_omega = match cfg.shape {
                SpectrumShape::Rect => {
                    let u: f64 = rng.random();
                    cfg.bandwidth * (2.0 * u - 1.0)
                }
                SpectrumShape::Gaussian => {
                    Normal::new(0.0, cfg.bandwidth).expect("validated σ > 0").sample(&mut rng)
                }
            };
            SpdcPair::new(delta_omega)
        })
        .collect();
    Ok(pairs)
}

/// Draws one dephasing weight per pair, uniform on [1 − q, 1], fixed for the
/// whole run. `q = 0` returns the input unchanged.
pub fn apply_q_weight(pairs: &[SpdcPair], q: f64, seed: u64) -> Result<Vec<SpdcPair>> {
    use rayon::prelude::*;

    if !q.is_finite() || !(0.0..=1.0).contains(&q) {
        return Err(Error::Config(format!("q must be within [0, 1] (got {q})")));
    }
    if q == 0.0 {
        return Ok(pairs.to_vec());
    }
    let weighted = pairs
        .par_iter()
        .enumerate()
        .map(|(j, pair)| {
            let mut rng = pair_rng(seed ^ Q_WEIGHT_SALT, j as u64);
            let u: f64 = rng.random();
            SpdcPair { delta_omega: pair.delta_omega, q_weight: 1.0 - q * u }
        })
        .collect();
    Ok(weighted)
}

/// Ensemble- and swap-averaged port intensities at delay τ:
///
/// ```text
///   ⟨Ī_c⟩ = (1/2N) Σ_j [(I_c)_j + (I'_c)_j]   (and likewise for d)
/// ```
///
/// Both come out equal to I₀ for every (τ, θ₀, Q) because the sine terms of
/// each pair cancel against its swapped term.
pub fn mean_intensities(pairs: &[SpdcPair], tau: f64, p: &ModelParams) -> Result<IntensitySummary> {
    if pairs.is_empty() {
        return Err(Error::Config("ensemble is empty".into()));
    }
    let denom = 2.0 * pairs.len() as f64;
    let sum_c = par_pairwise_map_sum(0, pairs.len(), &|j| {
        let (ic, _) = output_intensities(&pairs[j], tau, p);
        let (ic2, _) = swapped_intensities(&pairs[j], tau, p);
        ic + ic2
    });
    let sum_d = par_pairwise_map_sum(0, pairs.len(), &|j| {
        let (_, id) = output_intensities(&pairs[j], tau, p);
        let (_, id2) = swapped_intensities(&pairs[j], tau, p);
        id + id2
    });
    Ok(IntensitySummary { mean_ic: sum_c / denom, mean_id: sum_d / denom })
}

/// Ensemble mean of the per-pair coincidence at one delay.
pub fn correlation_at(pairs: &[SpdcPair], tau: f64, p: &ModelParams) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::Config("ensemble is empty".into()));
    }
    let sum = par_pairwise_map_sum(0, pairs.len(), &|j| pair_coincidence(&pairs[j], tau, p));
    Ok(sum / pairs.len() as f64)
}

/// Sweeps [`correlation_at`] over a strictly increasing delay grid.
///
/// With `keep_traces`, the curve also carries one normalized trace per pair
/// (row j is R_j(τ)/(I₀²/2) over the grid).
pub fn correlation_sweep(
    pairs: &[SpdcPair],
    tau_grid: &[f64],
    p: &ModelParams,
    keep_traces: bool,
) -> Result<CorrelationCurve> {
    use rayon::prelude::*;

    if pairs.is_empty() {
        return Err(Error::Config("ensemble is empty".into()));
    }
    if tau_grid.is_empty() {
        return Err(Error::Config("tau grid is empty".into()));
    }
    if !tau_grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Config("tau grid must be strictly increasing".into()));
    }

    let r_raw: Vec<f64> = tau_grid
        .par_iter()
        .map(|&tau| pairwise_map_sum(0, pairs.len(), &|j| pair_coincidence(&pairs[j], tau, p)) / pairs.len() as f64)
        .collect();
    let unit = p.r_norm_unit();
    let r_norm: Vec<f64> = r_raw.iter().map(|&r| r / unit).collect();

    let per_pair = if keep_traces {
        let rows: Vec<Vec<f64>> = pairs
            .par_iter()
            .map(|pair| tau_grid.iter().map(|&tau| pair_coincidence(pair, tau, p) / unit).collect())
            .collect();
        Some(rows)
    } else {
        None
    };

    Ok(CorrelationCurve { tau_grid: tau_grid.to_vec(), r_raw, r_norm, per_pair })
}

/// Uniform delay grid of `n_points` values with spacing `tau_max / ⌊n/2⌋`,
/// centered so that τ = 0 is always a grid point. Odd counts span
/// [−τ_max, τ_max] inclusive; even counts stop one step short of +τ_max.
pub fn tau_grid(n_points: usize, tau_max: f64) -> Result<Vec<f64>> {
    if n_points == 0 {
        return Err(Error::Config("tau_points must be >= 1".into()));
    }
    if !tau_max.is_finite() || tau_max <= 0.0 {
        return Err(Error::Config(format!("tau_max must be > 0 (got {tau_max})")));
    }
    if n_points == 1 {
        return Ok(vec![0.0]);
    }
    // ratio first, then scale: the endpoints hit ±tau_max exactly and the
    // center point is exactly zero
    let center = (n_points / 2) as f64;
    Ok((0..n_points).map(|k| ((k as f64 - center) / center) * tau_max).collect())
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Closed-form normalized dip for θ₀ = ±π/2:
///
/// ```text
///   Rect:      r_norm(τ) = 1 − sin(sΔτ)/(sΔτ)
///   Gaussian:  r_norm(τ) = 1 − exp(−(sστ)²/2)
/// ```
///
/// with s = 2 for the single-phase convention and s = 4 for the intensity
/// product. Follows from ⟨sin²φ⟩ = (1 − ⟨cos 2φ⟩)/2 and the characteristic
/// function of the spectral distribution. Other θ₀ have no simple closed form
/// and are rejected.
pub fn analytic_dip(
    shape: SpectrumShape,
    bandwidth: f64,
    theta0: f64,
    tau: f64,
    convention: Convention,
) -> Result<f64> {
    if !bandwidth.is_finite() || bandwidth <= 0.0 {
        return Err(Error::Config(format!("bandwidth must be > 0 (got {bandwidth})")));
    }
    if !is_half_pi(theta0) {
        return Err(Error::Domain(format!(
            "analytic dip requires theta0 = ±π/2 (got {theta0} rad)"
        )));
    }
    let scale = match convention {
        Convention::SinglePhase => 2.0,
        Convention::IntensityProduct => 4.0,
    };
    let x = scale * bandwidth * tau;
    let value = match shape {
        SpectrumShape::Rect => 1.0 - sinc(x),
        SpectrumShape::Gaussian => 1.0 - (-0.5 * x * x).exp(),
    };
    Ok(value)
}
