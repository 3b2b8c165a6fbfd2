//! Coherence-model simulation of Hong-Ou-Mandel two-photon interference.
//!
//! The library treats each signal/idler pair as a pair of classical field
//! amplitudes with a definite relative phase meeting on a 50/50 beam
//! splitter, and builds the measured quantities from ensembles of such pairs:
//!
//! - [`model`] — exact per-pair quantities: beam-splitter transform, output
//!   amplitudes and intensities, swapped entanglement terms, coincidence.
//! - [`ensemble`] — seeded spectral ensembles, dephasing weights, uniform
//!   intensity averages, the delay-sweep correlation ⟨R(τ)⟩, and closed-form
//!   reference dips.
//! - [`oracle`] — an independent two-photon amplitude computation of the
//!   coincidence probability, used to cross-validate the coherence route.
//! - [`config`] / [`output`] — experiment files, panel presets, and byte
//!   deterministic CSV/JSON emission for the `hom` binary.
//!
//! Ensemble evaluation is deterministic under any thread count: RNG streams
//! are keyed per pair and reductions use a fixed pairwise tree.

pub mod config;
pub mod ensemble;
pub mod error;
pub mod model;
pub mod oracle;
pub mod output;

pub use config::{parse_config, ConfigError, ExperimentConfig, Panel};
pub use ensemble::{
    analytic_dip, apply_q_weight, correlation_at, correlation_sweep, mean_intensities,
    sample_spectrum, tau_grid, CorrelationCurve, IntensitySummary, SpectrumConfig, SpectrumShape,
};
pub use error::{Error, Result};
pub use model::{
    bs_transform, output_amplitudes, output_intensities, pair_coincidence, pair_input_fields,
    swapped_intensities, ComplexAmp, Convention, ModelParams, SpdcPair,
};
pub use oracle::{
    compare_models, quantum_pair_coincidence, DeviationReport, QuantumPairResult,
    MAX_ORACLE_DEVIATION,
};
