//! Run configuration, optionally loaded from the TOML file named by the
//! `OVSG_CONFIG` environment variable. Command line flags override it.

use crate::FormatError;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    /// Human-oriented lines.
    Text,
    /// Machine-diffable `key value` lines.
    Structured,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Vertex cap for the exact game solver.
    pub vertex_cap: usize,
    /// Node cap for the offline branch and bound solvers.
    pub node_cap: u64,
    /// Memo entries the game solver keeps.
    pub memo_cap: usize,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            vertex_cap: 12,
            node_cap: 10_000_000,
            memo_cap: 1_000_000,
            seed: 0,
            out_dir: None,
            format: OutputFormat::Text,
        }
    }
}

impl RunConfig {
    /// Default config, overridden by `OVSG_CONFIG` when the variable is set.
    pub fn from_env() -> Result<Self, FormatError> {
        match std::env::var_os("OVSG_CONFIG") {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    FormatError::new(format!("cannot read {}: {e}", path.to_string_lossy()))
                })?;
                Self::from_toml(&text)
            }
            None => Ok(RunConfig::default()),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, FormatError> {
        let table: toml::Table =
            text.parse().map_err(|e| FormatError::new(format!("bad config: {e}")))?;
        let mut config = RunConfig::default();
        for (key, value) in &table {
            match key.as_str() {
                "vertex-cap" => config.vertex_cap = read_int(key, value)? as usize,
                "node-cap" => config.node_cap = read_int(key, value)? as u64,
                "memo-cap" => config.memo_cap = read_int(key, value)? as usize,
                "seed" => config.seed = read_int(key, value)? as u64,
                "out-dir" => {
                    let s = value
                        .as_str()
                        .ok_or_else(|| FormatError::new(format!("{key} must be a string")))?;
                    config.out_dir = Some(PathBuf::from(s));
                }
                "format" => {
                    config.format = match value.as_str() {
                        Some("text") => OutputFormat::Text,
                        Some("structured") => OutputFormat::Structured,
                        _ => {
                            return Err(FormatError::new("format must be text or structured"));
                        }
                    }
                }
                other => {
                    return Err(FormatError::new(format!("unknown config key {other}")));
                }
            }
        }
        Ok(config)
    }
}

fn read_int(key: &str, value: &toml::Value) -> Result<i64, FormatError> {
    let n = value
        .as_integer()
        .ok_or_else(|| FormatError::new(format!("{key} must be an integer")))?;
    if n < 0 {
        return Err(FormatError::new(format!("{key} must be positive")));
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides() {
        let config =
            RunConfig::from_toml("vertex-cap = 9\nseed = 7\nformat = \"structured\"\n").unwrap();
        assert_eq!(config.vertex_cap, 9);
        assert_eq!(config.seed, 7);
        assert_eq!(config.format, OutputFormat::Structured);
        assert_eq!(config.node_cap, RunConfig::default().node_cap);
    }

    #[test]
    fn rejects_unknown_keys_and_negatives() {
        assert!(RunConfig::from_toml("nope = 1\n").is_err());
        assert!(RunConfig::from_toml("seed = -4\n").is_err());
    }
}
