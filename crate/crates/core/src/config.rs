//! Experiment configuration: line-oriented `key = value` files, validation,
//! and the dip-panel presets.

use std::collections::HashSet;
use std::str::FromStr;

use thiserror::Error;

use crate::ensemble::{self, SpectrumConfig, SpectrumShape};
use crate::error::{Error as LibError, Result as LibResult};
use crate::model::{Convention, ModelParams, SpdcPair};

/// Errors raised while parsing a configuration document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {detail}")]
    InvalidValue { line: usize, key: String, detail: String },
    #[error("line {line}: `{key}` out of range: {detail}")]
    OutOfRange { line: usize, key: String, detail: String },
    #[error("missing required key `{key}`")]
    MissingKey { key: String },
}

/// A fully validated experiment description.
///
/// θ₀ is configured in degrees here and converted to radians once, at
/// [`ExperimentConfig::model_params`]; the library itself is radians-only.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub theta0_deg: f64,
    pub q: f64,
    pub spectrum: SpectrumShape,
    /// Spectral width in rad/s.
    pub bandwidth: f64,
    pub n_pairs: usize,
    pub seed: u64,
    pub tau_points: usize,
    /// The delay grid spans ±tau_max with tau_max = value / bandwidth.
    pub tau_max_over_bandwidth: f64,
    pub convention: Convention,
    pub i0: f64,
    pub keep_traces: bool,
}

impl ExperimentConfig {
    pub fn model_params(&self) -> LibResult<ModelParams> {
        ModelParams::new(self.theta0_deg.to_radians(), self.q, self.i0, self.convention)
    }

    pub fn spectrum_config(&self) -> SpectrumConfig {
        SpectrumConfig {
            shape: self.spectrum,
            bandwidth: self.bandwidth,
            n_pairs: self.n_pairs,
            seed: self.seed,
        }
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max_over_bandwidth / self.bandwidth
    }

    pub fn tau_grid(&self) -> LibResult<Vec<f64>> {
        ensemble::tau_grid(self.tau_points, self.tau_max())
    }

    /// Samples the spectrum and applies the dephasing weights, both keyed by
    /// the configured seed.
    pub fn build_ensemble(&self) -> LibResult<Vec<SpdcPair>> {
        let pairs = ensemble::sample_spectrum(&self.spectrum_config())?;
        ensemble::apply_q_weight(&pairs, self.q, self.seed)
    }

    /// The configuration with a panel's (θ₀, Q) preset applied; panel `b`
    /// additionally keeps per-pair traces.
    pub fn for_panel(&self, panel: Panel) -> ExperimentConfig {
        let (theta0_deg, q) = match panel {
            Panel::A | Panel::B => (90.0, 0.0),
            Panel::C => (0.0, 0.0),
            Panel::D => (90.0, 0.5),
            Panel::E => (45.0, 0.0),
            Panel::F => (90.0, 1.0),
        };
        let mut cfg = self.clone();
        cfg.theta0_deg = theta0_deg;
        cfg.q = q;
        if panel == Panel::B {
            cfg.keep_traces = true;
        }
        cfg
    }
}

/// Dip panels: `a`/`b` the bunching dip, `c` thermal, `d` partially dephased,
/// `e` classical, `f` fully dephased.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Panel {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl FromStr for Panel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" => Ok(Panel::A),
            "b" => Ok(Panel::B),
            "c" => Ok(Panel::C),
            "d" => Ok(Panel::D),
            "e" => Ok(Panel::E),
            "f" => Ok(Panel::F),
            other => Err(format!("unknown panel `{other}` (expected one of a..f)")),
        }
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse::<f64>().map_err(|e| ConfigError::InvalidValue {
        line,
        key: key.to_string(),
        detail: e.to_string(),
    })
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize, ConfigError> {
    value.parse::<usize>().map_err(|e| ConfigError::InvalidValue {
        line,
        key: key.to_string(),
        detail: e.to_string(),
    })
}

fn out_of_range(line: usize, key: &str, detail: &str) -> ConfigError {
    ConfigError::OutOfRange { line, key: key.to_string(), detail: detail.to_string() }
}

/// Parses a `key = value` document into a validated configuration.
///
/// `#` starts a comment, blank lines are skipped, keys are case-sensitive and
/// may appear at most once, and unknown keys are a hard error. `bandwidth`
/// and `seed` are required; every other key has a documented default.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut theta0_deg: f64 = 90.0;
    let mut q: f64 = 0.0;
    let mut spectrum = SpectrumShape::Rect;
    let mut bandwidth: Option<f64> = None;
    let mut n_pairs: usize = 100_000;
    let mut seed: Option<u64> = None;
    let mut tau_points: usize = 400;
    let mut tau_max_over_bandwidth: f64 = 10.0;
    let mut convention = Convention::SinglePhase;
    let mut i0: f64 = 1.0;
    let mut keep_traces = false;

    let mut seen: HashSet<String> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let (key, value) = match content.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => return Err(ConfigError::Syntax { line }),
        };
        if key.is_empty() || value.is_empty() {
            return Err(ConfigError::Syntax { line });
        }
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
        }

        match key {
            "theta0_deg" => {
                let v = parse_f64(line, key, value)?;
                if !v.is_finite() {
                    return Err(out_of_range(line, key, "must be finite"));
                }
                theta0_deg = v;
            }
            "q" => {
                let v = parse_f64(line, key, value)?;
                if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                    return Err(out_of_range(line, key, "must be within [0, 1]"));
                }
                q = v;
            }
            "spectrum" => {
                spectrum = match value {
                    "rect" => SpectrumShape::Rect,
                    "gaussian" => SpectrumShape::Gaussian,
                    other => {
                        return Err(ConfigError::InvalidValue {
                            line,
                            key: key.to_string(),
                            detail: format!("expected `rect` or `gaussian`, got `{other}`"),
                        })
                    }
                };
            }
            "bandwidth" => {
                let v = parse_f64(line, key, value)?;
                if !v.is_finite() || v <= 0.0 {
                    return Err(out_of_range(line, key, "must be > 0"));
                }
                bandwidth = Some(v);
            }
            "n_pairs" => {
                let v = parse_usize(line, key, value)?;
                if v == 0 {
                    return Err(out_of_range(line, key, "must be >= 1"));
                }
                n_pairs = v;
            }
            "seed" => {
                let v = value.parse::<u64>().map_err(|e| ConfigError::InvalidValue {
                    line,
                    key: key.to_string(),
                    detail: e.to_string(),
                })?;
                seed = Some(v);
            }
            "tau_points" => {
                let v = parse_usize(line, key, value)?;
                if v == 0 {
                    return Err(out_of_range(line, key, "must be >= 1"));
                }
                tau_points = v;
            }
            "tau_max_over_bandwidth" => {
                let v = parse_f64(line, key, value)?;
                if !v.is_finite() || v <= 0.0 {
                    return Err(out_of_range(line, key, "must be > 0"));
                }
                tau_max_over_bandwidth = v;
            }
            "convention" => {
                convention = match value {
                    "eq8" => Convention::SinglePhase,
                    "product45" => Convention::IntensityProduct,
                    other => {
                        return Err(ConfigError::InvalidValue {
                            line,
                            key: key.to_string(),
                            detail: format!("expected `eq8` or `product45`, got `{other}`"),
                        })
                    }
                };
            }
            "i0" => {
                let v = parse_f64(line, key, value)?;
                if !v.is_finite() || v <= 0.0 {
                    return Err(out_of_range(line, key, "must be > 0"));
                }
                i0 = v;
            }
            "keep_traces" => {
                keep_traces = match value {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(ConfigError::InvalidValue {
                            line,
                            key: key.to_string(),
                            detail: format!("expected `true` or `false`, got `{other}`"),
                        })
                    }
                };
            }
            _ => return Err(ConfigError::UnknownKey { line, key: key.to_string() }),
        }
    }

    let bandwidth = bandwidth.ok_or(ConfigError::MissingKey { key: "bandwidth".into() })?;
    let seed = seed.ok_or(ConfigError::MissingKey { key: "seed".into() })?;

    Ok(ExperimentConfig {
        theta0_deg,
        q,
        spectrum,
        bandwidth,
        n_pairs,
        seed,
        tau_points,
        tau_max_over_bandwidth,
        convention,
        i0,
        keep_traces,
    })
}

impl From<ConfigError> for LibError {
    fn from(e: ConfigError) -> Self {
        LibError::Config(e.to_string())
    }
}
