//! The JSON run configuration file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use insight_core::search::{Preset, SearchConfig};
use insight_core::IntrConfig;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "camelCase")]
pub enum Format {
    #[default]
    Json,
    #[value(alias = "md")]
    #[serde(alias = "md")]
    Markdown,
}

/// A run configuration. `preset` and `search` are mutually exclusive;
/// `iterations`, `intr` and command-line flags override either.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfigFile {
    pub preset: Option<String>,
    pub search: Option<SearchConfig>,
    pub intr: Option<IntrConfig>,
    pub iterations: Option<u64>,
    pub input: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("malformed config {}", path.display()))
    }

    /// The search configuration before command-line overrides, with the
    /// preset name if one was used.
    pub fn base_search(&self) -> anyhow::Result<(SearchConfig, Option<Preset>)> {
        let mut cfg = match (&self.preset, &self.search) {
            (Some(_), Some(_)) => bail!("config sets both `preset` and `search`"),
            (Some(name), None) => {
                let preset: Preset = name.parse()?;
                let cfg = preset.config(SearchConfig::default().iterations, 0);
                return Ok((self.apply_overrides(cfg), Some(preset)));
            }
            (None, Some(search)) => search.clone(),
            (None, None) => SearchConfig::default(),
        };
        cfg = self.apply_overrides(cfg);
        Ok((cfg, None))
    }

    fn apply_overrides(&self, mut cfg: SearchConfig) -> SearchConfig {
        if let Some(intr) = self.intr {
            cfg.intr = intr;
        }
        if let Some(n) = self.iterations {
            cfg.iterations = n;
        }
        if let Some(&seed) = self.seeds.first() {
            cfg.seed = seed;
        }
        cfg
    }
}
