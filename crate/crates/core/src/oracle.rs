//! Independent two-photon amplitude check of the coherence model.
//!
//! A pair with detunings ±δω and relative delay τ meets on the same 50/50
//! splitter as the coherence model (transmission t = 1/√2, reflection
//! r = i/√2). A coincidence has two indistinguishable paths: both photons
//! transmitted (amplitude t² = 1/2) or both reflected (amplitude r² = −1/2,
//! picking up the frequency-exchange phase 2δωτ). Summing the paths gives
//!
//! ```text
//!   p(δω, τ) = |t² + r²·e^{i2δωτ}|² = (1 − cos 2δωτ)/2,
//! ```
//!
//! which is exactly the single-phase coherence coincidence at θ₀ = ±π/2, so
//! the two routes must agree per pair to round-off.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{is_half_pi, pair_coincidence, ComplexAmp, Convention, ModelParams, SpdcPair};

/// Largest oracle deviation the `compare` subcommand accepts before
/// signalling a regression.
pub const MAX_ORACLE_DEVIATION: f64 = 1e-9;

/// Coincidence probability of one detuned pair, with the two path amplitudes
/// it was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumPairResult {
    /// |amp_both_transmitted + amp_both_reflected|², in [0, 1].
    pub p_coincidence: f64,
    pub amp_both_transmitted: ComplexAmp,
    pub amp_both_reflected: ComplexAmp,
}

/// Deviation statistics between the coherence model and the amplitude oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationReport {
    pub max_abs_dev: f64,
    pub rms_dev: f64,
    pub n_samples: usize,
    pub convention: Convention,
}

/// Brute-force amplitude sum for one pair.
pub fn quantum_pair_coincidence(delta_omega: f64, tau: f64) -> QuantumPairResult {
    let psi = 2.0 * delta_omega * tau;
    let amp_tt = ComplexAmp::new(0.5, 0.0);
    let amp_rr = ComplexAmp::new(-0.5 * psi.cos(), -0.5 * psi.sin());
    QuantumPairResult {
        p_coincidence: (amp_tt + amp_rr).norm_sqr(),
        amp_both_transmitted: amp_tt,
        amp_both_reflected: amp_rr,
    }
}

/// Compares the per-pair coherence coincidence (normalized by I₀²) against
/// the amplitude oracle over every (pair, τ) sample.
///
/// Only the single-phase convention at θ₀ = ±π/2 with no dephasing is
/// comparable; anything else is rejected with the violated precondition.
pub fn compare_models(
    pairs: &[SpdcPair],
    tau_grid: &[f64],
    p: &ModelParams,
) -> Result<DeviationReport> {
    if p.convention != Convention::SinglePhase {
        return Err(Error::Domain(format!(
            "compare requires convention = eq8 (got {})",
            p.convention
        )));
    }
    if !is_half_pi(p.theta0) {
        return Err(Error::Domain(format!(
            "compare requires theta0 = ±π/2 (got {} rad)",
            p.theta0
        )));
    }
    if p.q != 0.0 {
        return Err(Error::Domain(format!("compare requires q = 0 (got {})", p.q)));
    }
    if let Some(j) = pairs.iter().position(|pair| pair.q_weight != 1.0) {
        return Err(Error::Domain(format!(
            "compare requires q = 0, but pair {j} carries q_weight {}",
            pairs[j].q_weight
        )));
    }
    if pairs.is_empty() || tau_grid.is_empty() {
        return Err(Error::Config("ensemble or tau grid is empty".into()));
    }

    let i0_sq = p.i0 * p.i0;
    let mut max_abs: f64 = 0.0;
    let mut sum_sq: f64 = 0.0;
    for pair in pairs {
        for &tau in tau_grid {
            let model = pair_coincidence(pair, tau, p) / i0_sq;
            let oracle = quantum_pair_coincidence(pair.delta_omega, tau).p_coincidence;
            let dev = (model - oracle).abs();
            max_abs = max_abs.max(dev);
            sum_sq += dev * dev;
        }
    }
    let n_samples = pairs.len() * tau_grid.len();
    Ok(DeviationReport {
        max_abs_dev: max_abs,
        rms_dev: (sum_sq / n_samples as f64).sqrt(),
        n_samples,
        convention: p.convention,
    })
}
