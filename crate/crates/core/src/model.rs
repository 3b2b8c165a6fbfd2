//! Per-pair mathematics of the coherence model of Hong-Ou-Mandel
//! interference.
//!
//! A signal/idler pair meets on a lossless 50/50 beam splitter through input
//! paths a and b. With the common carrier oscillation factored out, the input
//! fields in units of the single-photon amplitude E₀ are
//!
//! ```text
//!   (E_a, E_b) = (1, e^{i(2Δ + θ₀)}),   Δ = w · δω · τ,
//! ```
//!
//! where δω is the pair's angular detuning (rad/s), τ the idler arrival delay
//! (s), w a dephasing weight in [0, 1], and θ₀ the inherent idler phase shift
//! relative to the signal. Output amplitudes, port intensities, the swapped
//! entanglement terms, and the per-pair coincidence are exact functions of
//! (Δ, θ₀, I₀) with I₀ = E₀².

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// A complex field amplitude in units of the single-photon amplitude E₀.
pub type ComplexAmp = Complex64;

/// Accepted deviation of θ₀ from ±π/2 where an operation requires the exact
/// dip condition (absorbs the degrees-to-radians boundary conversion).
pub(crate) const HALF_PI_TOL: f64 = 1e-12;

/// Returns true when θ₀ is ±π/2 up to [`HALF_PI_TOL`].
pub(crate) fn is_half_pi(theta0: f64) -> bool {
    (theta0.abs() - std::f64::consts::FRAC_PI_2).abs() <= HALF_PI_TOL
}

/// One signal/idler pair drawn from the source spectrum.
///
/// The pair is symmetric: the signal sits at +δω, the idler at −δω, so a
/// single signed detuning determines both photons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcPair {
    /// Angular detuning δω of the signal from the degenerate center (rad/s).
    pub delta_omega: f64,
    /// Multiplicative dephasing weight, in [1 − Q, 1]; exactly 1 when Q = 0.
    pub q_weight: f64,
}

impl SpdcPair {
    /// A pair with no dephasing (weight 1).
    pub fn new(delta_omega: f64) -> Self {
        Self { delta_omega, q_weight: 1.0 }
    }

    /// The pair phase Δ = w · δω · τ accumulated at delay τ.
    pub fn phase(&self, tau: f64) -> f64 {
        self.q_weight * self.delta_omega * tau
    }
}

/// Which per-pair coincidence formula a run uses.
///
/// The two conventions differ by a factor of two in the τ scaling of the
/// coincidence phase; they agree at τ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convention {
    /// R = I₀²·cos²(Δ + θ₀): the pair phase enters the correlation once.
    #[serde(rename = "eq8")]
    SinglePhase,
    /// R = I_c·I_d = I₀²·cos²(2Δ + θ₀): the literal product of the two
    /// port intensities.
    #[serde(rename = "product45")]
    IntensityProduct,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::SinglePhase => write!(f, "eq8"),
            Convention::IntensityProduct => write!(f, "product45"),
        }
    }
}

/// Run-level physical parameters shared by every pair.
#[derive(Debug, Clone, Copy)]
pub struct ModelParams {
    /// Inherent idler phase shift θ₀ (rad).
    pub theta0: f64,
    /// Dephasing factor Q ∈ [0, 1]; 0 disables phase fluctuation.
    pub q: f64,
    /// Single-photon intensity I₀ = E₀² (arbitrary units), > 0.
    pub i0: f64,
    /// Per-pair coincidence formula.
    pub convention: Convention,
}

impl ModelParams {
    pub fn new(theta0: f64, q: f64, i0: f64, convention: Convention) -> Result<Self> {
        if !theta0.is_finite() {
            return Err(Error::Config(format!("theta0 must be finite (got {theta0})")));
        }
        if !q.is_finite() || !(0.0..=1.0).contains(&q) {
            return Err(Error::Config(format!("q must be within [0, 1] (got {q})")));
        }
        if !i0.is_finite() || i0 <= 0.0 {
            return Err(Error::Config(format!("i0 must be > 0 (got {i0})")));
        }
        Ok(Self { theta0, q, i0, convention })
    }

    /// Parameters with the given θ₀ and Q = 0, I₀ = 1, single-phase
    /// convention.
    pub fn with_theta0(theta0: f64) -> Self {
        Self { theta0, q: 0.0, i0: 1.0, convention: Convention::SinglePhase }
    }

    /// Normalization unit I₀²/2 for correlation values; the fully dephased
    /// classical level maps to 1 in these units.
    pub fn r_norm_unit(&self) -> f64 {
        0.5 * self.i0 * self.i0
    }
}

/// 50/50 beam-splitter transform with the symmetric i-on-reflection phase:
///
/// ```text
///   (c, d) = (a + i·b, i·a + b) / √2
/// ```
///
/// Unitary: |c|² + |d|² = |a|² + |b|² up to round-off.
pub fn bs_transform(a: ComplexAmp, b: ComplexAmp) -> (ComplexAmp, ComplexAmp) {
    let c = (a + ComplexAmp::i() * b).scale(FRAC_1_SQRT_2);
    let d = (ComplexAmp::i() * a + b).scale(FRAC_1_SQRT_2);
    (c, d)
}

/// Input fields (E_a, E_b) = (1, e^{i(2Δ + θ₀)}) of one pair at delay τ, in
/// units of E₀. The 1/√2 splitter prefactor lives in [`bs_transform`].
pub fn pair_input_fields(pair: &SpdcPair, tau: f64, p: &ModelParams) -> (ComplexAmp, ComplexAmp) {
    let a = ComplexAmp::new(1.0, 0.0);
    let b = ComplexAmp::from_polar(1.0, 2.0 * pair.phase(tau) + p.theta0);
    (a, b)
}

/// Output amplitudes (E_c, E_d) of one pair: the beam-splitter transform of
/// [`pair_input_fields`], i.e.
///
/// ```text
///   c = (1 + i·e^{i(2Δ+θ₀)})/√2,   d = (i + e^{i(2Δ+θ₀)})/√2.
/// ```
pub fn output_amplitudes(pair: &SpdcPair, tau: f64, p: &ModelParams) -> (ComplexAmp, ComplexAmp) {
    let (a, b) = pair_input_fields(pair, tau, p);
    bs_transform(a, b)
}

/// Port intensities of one pair, (I_c, I_d) = I₀·(1 ∓ sin(2Δ + θ₀)).
///
/// Consistent with I₀·|E_c|² and I₀·|E_d|² from [`output_amplitudes`].
pub fn output_intensities(pair: &SpdcPair, tau: f64, p: &ModelParams) -> (f64, f64) {
    let s = (2.0 * pair.phase(tau) + p.theta0).sin();
    (p.i0 * (1.0 - s), p.i0 * (1.0 + s))
}

/// Port intensities of the swapped path-photon correlation term of the
/// entangled state: the sine flips sign, (I'_c, I'_d) = I₀·(1 ± sin(2Δ + θ₀)).
///
/// Per pair the swap terms cancel: I_c + I'_c = I_d + I'_d = 2I₀.
pub fn swapped_intensities(pair: &SpdcPair, tau: f64, p: &ModelParams) -> (f64, f64) {
    let s = (2.0 * pair.phase(tau) + p.theta0).sin();
    (p.i0 * (1.0 + s), p.i0 * (1.0 - s))
}

/// Per-pair coincidence R between the two output ports.
///
/// `SinglePhase` evaluates I₀²·cos²(Δ + θ₀) in the double-angle form
/// I₀²·(1 + cos(2Δ + 2θ₀))/2, which is exactly zero at τ = 0 for
/// θ₀ = ±π/2. `IntensityProduct` multiplies the two port intensities.
/// Both conventions give R(τ=0) = I₀²·cos²(θ₀), and R stays in [0, I₀²].
pub fn pair_coincidence(pair: &SpdcPair, tau: f64, p: &ModelParams) -> f64 {
    match p.convention {
        Convention::SinglePhase => {
            let m = 0.5 * (1.0 + (2.0 * (pair.phase(tau) + p.theta0)).cos());
            (p.i0 * p.i0) * m
        }
        Convention::IntensityProduct => {
            let (ic, id) = output_intensities(pair, tau, p);
            ic * id
        }
    }
}
