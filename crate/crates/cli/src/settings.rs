//! Embedding parameters merged from defaults, an optional TOML file and flags.

use std::path::Path;

use anyhow::{bail, Context, Result};
use causal_hierarchy::repair::RepairConfig;
use causal_hierarchy::EmbeddingConfig;
use serde::Deserialize;

/// `dim` here is the total spacetime dimension, as on the command line.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSection {
    pub dim: Option<usize>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub seed: Option<u64>,
    pub max_sweeps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsFile {
    #[serde(default)]
    pub embedding: EmbeddingSection,
    #[serde(default)]
    pub repair: RepairConfig,
}

impl SettingsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Flags win over the file, which wins over built-in defaults.
pub fn resolve(flags: &EmbeddingSection, file: &SettingsFile) -> Result<EmbeddingConfig> {
    let base = EmbeddingConfig::default();
    let total = flags.dim.or(file.embedding.dim).unwrap_or(base.dim + 1);
    if total < 2 {
        bail!("--dim is the total spacetime dimension and must be at least 2, got {total}");
    }
    let config = EmbeddingConfig {
        dim: total - 1,
        eps1: flags.eps1.or(file.embedding.eps1).unwrap_or(base.eps1),
        eps2: flags.eps2.or(file.embedding.eps2).unwrap_or(base.eps2),
        seed: flags.seed.or(file.embedding.seed).unwrap_or(base.seed),
        max_sweeps: flags
            .max_sweeps
            .or(file.embedding.max_sweeps)
            .unwrap_or(base.max_sweeps),
    };
    config.validate()?;
    Ok(config)
}
