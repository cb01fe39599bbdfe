use std::path::Path;

use anyhow::{bail, Context, Result};
use mapq_core::experiment::{ExperimentConfig, Method};

#[derive(serde::Deserialize)]
#[serde(untagged)]
enum ConfigFile {
    One(Box<ExperimentConfig>),
    Batch(Vec<ExperimentConfig>),
}

pub fn parse_configs(text: &str) -> Result<Vec<ExperimentConfig>> {
    let parsed: ConfigFile = match serde_json::from_str(text) {
        Ok(c) => c,
        // Re-parse as a single object for a precise error message.
        Err(_) if !text.trim_start().starts_with('[') => {
            ConfigFile::One(Box::new(serde_json::from_str(text).context("invalid experiment config")?))
        }
        Err(_) => ConfigFile::Batch(serde_json::from_str(text).context("invalid experiment batch")?),
    };
    let configs = match parsed {
        ConfigFile::One(c) => vec![*c],
        ConfigFile::Batch(v) => v,
    };
    for (i, c) in configs.iter().enumerate() {
        c.validate().with_context(|| format!("experiment {}", i + 1))?;
    }
    Ok(configs)
}

pub fn load_configs(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_configs(&text).with_context(|| path.display().to_string())
}

pub fn parse_budgets(s: &str) -> Result<Vec<u64>> {
    let budgets = s
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<u64>().with_context(|| format!("bad budget {t:?}")))
        .collect::<Result<Vec<_>>>()?;
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        bail!("budgets must be strictly increasing");
    }
    Ok(budgets)
}

/// Budgets used when `--budget` is absent.
pub fn default_budgets(c: &ExperimentConfig) -> Vec<u64> {
    let d = c.model.dim();
    match c.method {
        Method::Tp => {
            let top = match d {
                1 | 2 => 32,
                3 | 4 => 12,
                _ => 4,
            };
            (1..=top).collect()
        }
        Method::Sm => (0..=if d <= 2 { 8 } else { 5 }).collect(),
        Method::Asgq => {
            let mut v: Vec<u64> = (0..=20).map(|k| (100.0 * 1.5f64.powi(k)).round() as u64).collect();
            v.dedup();
            v
        }
        Method::Mc => vec![1_000, 10_000, 100_000, 1_000_000],
        Method::Cos2d => vec![16, 32, 64, 128, 256],
    }
}
