//! TOML experiment configuration.
//!
//! ```toml
//! [model]
//! dimension = 1
//! alpha = 0.0
//! beta = 1.0
//! seed = 7
//! kernel = { family = "geometric", q = 0.5 }
//! weights = { family = "uniform", lo = 0.0, hi = 1.0 }
//!
//! [run]
//! n = 100
//! seed_count = 20      # seeds = master_seed + i for i in 0..seed_count
//! master_seed = 1000
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "json", "svg"]
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{Engine, PsMode};
use crate::kernels::{sha256_hex, DiagonalConvention, Kernel, KernelFamily, ModelParams, WeightFamily, WeightLaw};
use crate::sampler::SamplingOptions;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dimension: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Seed of the single realization used when `run` lists no seeds.
    #[serde(default)]
    pub seed: u64,
    /// Presence probability of each loop `{x}`; default 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loop_probability: Option<f64>,
    /// `restricted` (default) or `full`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<DiagonalConvention>,
    /// Certified `v² ≥ E[a²]`; default the exact second moment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_second_moment: Option<f64>,
    pub kernel: KernelFamily,
    pub weights: WeightFamily,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeConfig {
    Center,
    Trace,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Box radius of single-scale commands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Ascending radii for `converge`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_list: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_count: Option<u64>,
    /// Defaults to `model.seed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    /// Kernel tail mass dropped by truncation; default 1e-9.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc_tol: Option<f64>,
    /// Hard cap on the truncation radius; default 4096.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_range: Option<usize>,
    /// Positive ascending energies for `lifshitz`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub e_grid: Option<Vec<f64>>,
    /// Radius of `Q = Λ_{q_radius}` for `concentration`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_radius: Option<usize>,
    /// Long-edge length threshold `R` for `concentration`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Vec<f64>>,
    /// `center` (default) or `trace` for `pastur-shubin`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeConfig>,
    /// Trace-mode buffer `n − m`; default `⌈√n⌉`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub buffer: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    /// Cache directory; default `<directory>/cache`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json, Format::Svg]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: default_directory(),
            formats: default_formats(),
            cache_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().trim().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        sha256_hex(&serde_json::to_vec(self).expect("config serializes"))
    }

    pub fn params(&self) -> Result<ModelParams> {
        let m = &self.model;
        let kernel = Kernel::new(m.kernel.clone(), m.dimension)?;
        let weights = match m.weight_second_moment {
            Some(v2) => WeightLaw::with_bound(m.weights.clone(), v2)?,
            None => WeightLaw::new(m.weights.clone())?,
        };
        let mut p = ModelParams::new(kernel, weights, m.alpha, m.beta, m.seed)?;
        if let Some(lp) = m.loop_probability {
            p = p.with_loop_probability(lp)?;
        }
        if let Some(dc) = m.diagonal {
            p = p.with_diagonal(dc);
        }
        Ok(p)
    }

    /// Explicit `seeds`, else `master_seed + i` for `i < seed_count`, else `[model.seed]`.
    pub fn seeds(&self) -> Result<Vec<u64>> {
        let r = &self.run;
        match (&r.seeds, r.seed_count) {
            (Some(_), Some(_)) => Err(Error::invalid("run.seeds", "give either seeds or seed_count, not both")),
            (Some(s), None) if s.is_empty() => Err(Error::invalid("run.seeds", "must not be empty")),
            (Some(s), None) => Ok(s.clone()),
            (None, Some(0)) => Err(Error::invalid("run.seed_count", "must be at least 1")),
            (None, Some(c)) => {
                let base = r.master_seed.unwrap_or(self.model.seed);
                (0..c)
                    .map(|i| {
                        base.checked_add(i)
                            .ok_or_else(|| Error::invalid("run.master_seed", "master_seed + seed_count overflows"))
                    })
                    .collect()
            }
            (None, None) => Ok(vec![self.model.seed]),
        }
    }

    pub fn sampling(&self) -> Result<SamplingOptions> {
        let d = SamplingOptions::default();
        let trunc_tol = self.run.trunc_tol.unwrap_or(d.trunc_tol);
        if !(trunc_tol > 0.0 && trunc_tol <= 1.0) {
            return Err(Error::invalid("run.trunc_tol", format!("{trunc_tol} is outside the valid range (0, 1]")));
        }
        Ok(SamplingOptions {
            trunc_tol,
            max_range: self.run.max_range.unwrap_or(d.max_range),
        })
    }

    pub fn engine(&self) -> Result<Engine> {
        Ok(Engine::new(self.sampling()?))
    }

    pub fn require_n(&self) -> Result<usize> {
        self.run.n.ok_or_else(|| Error::invalid("run.n", "required by this command"))
    }

    pub fn mode(&self) -> PsMode {
        match self.run.mode.unwrap_or(ModeConfig::Center) {
            ModeConfig::Center => PsMode::Center,
            ModeConfig::Trace => PsMode::Trace {
                buffer: self.run.buffer,
            },
        }
    }

    pub fn cache_dir(&self) -> PathBuf {
        self.output
            .cache_dir
            .clone()
            .unwrap_or_else(|| self.output.directory.join("cache"))
    }

    pub fn wants(&self, f: Format) -> bool {
        self.output.formats.contains(&f)
    }
}
