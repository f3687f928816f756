use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::amh::AmhConfig;
use crate::bayes::{GaussianPrior, MeasuredData};
use crate::error::{Error, Result};
use crate::fem::{bundled, BeamModel};
use crate::mcdwis::McdwisConfig;

/// Prefix selecting a model shipped with the crate instead of a file.
pub const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerKind {
    Amh,
    Mcdwis,
}

impl SamplerKind {
    pub fn name(self) -> &'static str {
        match self {
            SamplerKind::Amh => "amh",
            SamplerKind::Mcdwis => "mcdwis",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "amh" => Ok(SamplerKind::Amh),
            "mcdwis" => Ok(SamplerKind::Mcdwis),
            other => Err(Error::Config(format!(
                "unknown sampler `{other}` (expected amh or mcdwis)"
            ))),
        }
    }
}

/// Data generated from the model itself at a known `θ_true`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub theta_true: Vec<f64>,
    /// Relative noise `c`.
    pub noise: f64,
    pub n_modes: usize,
    /// Defaults to the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    /// Defaults to the starting point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<Vec<f64>>,
    /// Standard deviations `σ`; also scale the sampler proposals.
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub samplers: Vec<SamplerKind>,
    /// Model file, or `builtin:cantilever` / `builtin:aircraft_frame`.
    pub model: String,
    /// Measured-data file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
    /// Starting `θ_0`; defaults to the model's nominal values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<Vec<f64>>,
    pub prior: PriorSpec,
    #[serde(default)]
    pub mcdwis: McdwisConfig,
    #[serde(default)]
    pub amh: AmhConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config serializes")
    }
}

/// Loads a model from a file path or a `builtin:` name, resolving relative
/// paths against `base`.
pub fn load_model(source: &str, base: &Path) -> Result<BeamModel> {
    if let Some(name) = source.strip_prefix(BUILTIN_PREFIX) {
        return match name {
            "cantilever" => Ok(bundled::cantilever(20)),
            "aircraft_frame" | "frame" => Ok(bundled::aircraft_frame()),
            other => Err(Error::Config(format!(
                "unknown builtin model `{other}` (expected cantilever or aircraft_frame)"
            ))),
        };
    }
    BeamModel::load(base.join(source))
}

/// A validated experiment with every input loaded.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub model: BeamModel,
    pub data: MeasuredData,
    pub start: Vec<f64>,
    pub prior: GaussianPrior,
    pub sigma: Vec<f64>,
}

impl Prepared {
    /// Validates `config` and loads model and data. Synthetic data are
    /// generated here.
    pub fn new(config: &ExperimentConfig, base: &Path) -> Result<Self> {
        let model = load_model(&config.model, base)?;
        let space = model.parameter_space();
        let d = space.dim();
        let start = config.start.clone().unwrap_or_else(|| model.nominal().to_vec());
        if start.len() != d {
            return Err(Error::shape("start", d, start.len()));
        }
        space.check(&start)?;
        if config.prior.std.len() != d {
            return Err(Error::shape("prior std", d, config.prior.std.len()));
        }
        if config.prior.std.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Config("prior std must be positive".into()));
        }
        let mean = config.prior.mean.clone().unwrap_or_else(|| start.clone());
        let prior = GaussianPrior::diagonal(mean, &config.prior.std)?;
        if config.samplers.contains(&SamplerKind::Mcdwis) {
            config.mcdwis.validate()?;
        }
        if config.samplers.contains(&SamplerKind::Amh) {
            config.amh.validate()?;
        }
        let data = match (&config.data, &config.synthetic) {
            (Some(_), Some(_)) | (None, None) => {
                return Err(Error::Config(
                    "exactly one of `data` and `[synthetic]` must be given".into(),
                ))
            }
            (Some(path), None) => MeasuredData::load(base.join(path))?,
            (None, Some(syn)) => {
                let solver = crate::fem::FrequencySolver::new(model.clone());
                let mut rng = crate::rng::synthetic_stream(syn.seed.unwrap_or(config.seed));
                crate::synthetic::generate_synthetic_data(
                    &solver,
                    &syn.theta_true,
                    syn.n_modes,
                    syn.noise,
                    &mut rng,
                )?
            }
        };
        let mut resolved = config.clone();
        resolved.output_dir = None;
        resolved.start = Some(start.clone());
        resolved.prior.mean = Some(prior.mean().to_vec());
        resolved.mcdwis.kappa = Some(config.mcdwis.kappa());
        resolved.amh.adaptation_start = Some(config.amh.adaptation_start());
        let mut samplers = resolved.samplers.clone();
        samplers.sort();
        samplers.dedup();
        resolved.samplers = samplers;
        Ok(Self {
            sigma: config.prior.std.clone(),
            config: resolved,
            model,
            data,
            start,
            prior,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
model = "builtin:cantilever"
samplers = ["mcdwis", "amh"]
[synthetic]
theta_true = [7800.0, 1e-9, 1e-9]
noise = 0.01
n_modes = 3
[prior]
std = [500.0, 2e-10, 2e-10]
[mcdwis]
generations = 10
burn_in = 2
"#;

    #[test]
    fn partial_sections_take_defaults() {
        let c = ExperimentConfig::from_toml(MINIMAL, Path::new("x.toml")).unwrap();
        assert_eq!(c.mcdwis.generations, 10);
        assert_eq!(c.mcdwis.n_max, McdwisConfig::default().n_max);
        assert_eq!(c.amh, AmhConfig::default());
        let p = Prepared::new(&c, Path::new(".")).unwrap();
        assert_eq!(p.data.len(), 3);
        assert_eq!(p.config.samplers, vec![SamplerKind::Amh, SamplerKind::Mcdwis]);
        let echo = ExperimentConfig::from_toml(&p.config.to_toml(), Path::new("echo")).unwrap();
        assert_eq!(echo, p.config);
    }

    #[test]
    fn data_and_synthetic_are_exclusive() {
        let mut c = ExperimentConfig::from_toml(MINIMAL, Path::new("x.toml")).unwrap();
        c.data = Some("d.toml".into());
        assert!(matches!(Prepared::new(&c, Path::new(".")), Err(Error::Config(_))));
        c.data = None;
        c.synthetic = None;
        assert!(matches!(Prepared::new(&c, Path::new(".")), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_keys_and_models_rejected() {
        let bad = format!("{MINIMAL}\nextra = 1\n");
        assert!(ExperimentConfig::from_toml(&bad, Path::new("x")).is_err());
        assert!(load_model("builtin:wing", Path::new(".")).is_err());
        assert!(SamplerKind::parse("hmc").is_err());
    }
}
