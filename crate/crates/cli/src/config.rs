//! Pipeline configuration. Precedence: command-line flags, then the TOML
//! config file, then built-in defaults.

use std::path::{Path, PathBuf};

use accord_core::corpus::WindowSizes;
use accord_core::extraction::ExtractorConfig;
use accord_core::generation::GenerationConfig;
use accord_core::selection::SelectionConfig;
use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub exemplars: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub work_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub min_score: f64,
    pub window_sizes: WindowSizes,
    pub extraction: ExtractorConfig,
    pub generation: GenerationConfig,
    pub selection: SelectionConfig,
    pub port: u16,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            paths: Paths::default(),
            min_score: 1.0,
            window_sizes: WindowSizes::both(),
            extraction: ExtractorConfig::default(),
            generation: GenerationConfig::default(),
            selection: SelectionConfig::default(),
            port: 8080,
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let raw = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&raw).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// `flag`, else the config value, else an error naming the missing input.
pub fn required(flag: &Option<PathBuf>, config: &Option<PathBuf>, name: &str) -> anyhow::Result<PathBuf> {
    match flag.as_ref().or(config.as_ref()) {
        Some(p) => Ok(p.clone()),
        None => bail!("missing --{name} (or paths.{} in the config file)", name.replace('-', "_")),
    }
}

/// Errors unless `path` exists, so bad inputs fail before any work starts.
pub fn existing(path: PathBuf) -> anyhow::Result<PathBuf> {
    if !path.exists() {
        bail!("input not found: {}", path.display());
    }
    Ok(path)
}

/// Provenance sidecar for a sets file: `sets.jsonl` → `sets.provenance.jsonl`.
pub fn provenance_path(sets: &Path) -> PathBuf {
    let stem = sets.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sets".into());
    sets.with_file_name(format!("{stem}.provenance.jsonl"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_overrides_defaults() {
        let cfg: PipelineConfig = toml::from_str(
            r#"
            min_score = 2.0
            window_sizes = [1]
            [selection]
            k = 2
            relations = ["is-a"]
            [extraction]
            binary_threshold = 0.7
            "#,
        )
        .unwrap();
        assert_eq!(cfg.min_score, 2.0);
        assert_eq!(cfg.selection.k, 2);
        assert_eq!(cfg.extraction.binary_threshold, 0.7);
        assert_eq!(cfg.extraction.relation_threshold, 0.5);
        assert!(!cfg.window_sizes.contains(2));
        assert!(toml::from_str::<PipelineConfig>("bogus = 1").is_err());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(provenance_path(Path::new("out/sets.jsonl")), PathBuf::from("out/sets.provenance.jsonl"));
    }
}
