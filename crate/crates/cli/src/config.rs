//! Experiment configuration: one JSON document, flags override fields.

use std::path::PathBuf;

use nswishart::analytics::{DEFAULT_POINTS, DEFAULT_QUAD_POINTS};
use nswishart::sampling::SpectrumOptions;
use nswishart::{EnsembleConfig, EtaKind, EtaSpec};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MethodChoice {
    /// ellipse for diagonal η, spectrum expansion for other normal η, level set otherwise
    Auto,
    Ellipse,
    Spectrum,
    Levelset,
    /// skip the contour
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticsConfig {
    #[serde(default = "default_method")]
    pub contour_method: MethodChoice,
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default = "default_bins")]
    pub bins: usize,
    #[serde(default = "default_quad")]
    pub quad_points: usize,
}

impl Default for AnalyticsConfig {
    fn default() -> Self {
        AnalyticsConfig {
            contour_method: default_method(),
            n_points: default_points(),
            bins: default_bins(),
            quad_points: default_quad(),
        }
    }
}

fn default_method() -> MethodChoice {
    MethodChoice::Auto
}
fn default_points() -> usize {
    DEFAULT_POINTS
}
fn default_bins() -> usize {
    50
}
fn default_quad() -> usize {
    DEFAULT_QUAD_POINTS
}
fn one() -> usize {
    1
}

/// Accepts either a full η object or the shorthand string `"zero"`.
pub fn eta_field<'de, D: Deserializer<'de>>(d: D) -> Result<EtaKind, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Field {
        Name(String),
        Kind(EtaKind),
    }
    match Field::deserialize(d)? {
        Field::Kind(k) => Ok(k),
        Field::Name(s) if s == "zero" => Ok(EtaKind::Zero),
        Field::Name(s) => Err(serde::de::Error::custom(format!(
            "eta: unknown shorthand {s:?}; use \"zero\" or an object like {{\"kind\": \"diagonal\", \"c\": 0.25}}"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Defaults to `2n`.
    #[serde(default)]
    pub t: Option<usize>,
    #[serde(default = "one")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(deserialize_with = "eta_field")]
    pub eta: EtaKind,
    #[serde(default)]
    pub singular_values: bool,
    #[serde(default)]
    pub analytics: AnalyticsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub emit_svg: bool,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        config.check()?;
        Ok(config)
    }

    pub fn check(&self) -> Result<(), CliError> {
        let a = &self.analytics;
        if a.bins == 0 {
            return Err(CliError::Config("analytics.bins must be >= 1".into()));
        }
        if a.quad_points < 3 {
            return Err(CliError::Config("analytics.quad_points must be >= 3".into()));
        }
        self.ensemble().validate()?;
        Ok(())
    }

    pub fn t(&self) -> usize {
        self.t.unwrap_or(2 * self.n)
    }

    pub fn ensemble(&self) -> EnsembleConfig {
        let spectrum = SpectrumOptions {
            eigenvalues: true,
            singular_values: self.singular_values,
        };
        EnsembleConfig::new(self.n, self.t(), self.realizations, self.seed, EtaSpec::new(self.eta.clone(), self.n))
            .with_spectrum(spectrum)
    }
}
