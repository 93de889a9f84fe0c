use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable naming a TOML file with a [`SimConfig`].
pub const CONFIG_ENV: &str = "SCENERY_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verbosity {
    /// Every output event of a DEF'd node.
    #[default]
    Full,
    /// Only boolean, integer and time events.
    Discrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Sampling ticks per second.
    pub tick_rate: f64,
    /// Seconds taken by a viewpoint transition.
    pub transition_duration: f64,
    pub verbosity: Verbosity,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { tick_rate: 30.0, transition_duration: 2.0, verbosity: Verbosity::Full }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("tick_rate must be positive and finite, got {0}")]
    TickRate(f64),
    #[error("transition_duration must be non-negative and finite, got {0}")]
    Duration(f64),
}

impl SimConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: SimConfig = toml::from_str(text)?;
        cfg.check()
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        SimConfig::from_toml(&text)
    }

    /// Reads the file named by `SCENERY_CONFIG`, or the defaults when the
    /// variable is unset.
    pub fn from_env() -> Result<Self, ConfigError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) => SimConfig::load(Path::new(&p)),
            None => Ok(SimConfig::default()),
        }
    }

    pub fn check(self) -> Result<Self, ConfigError> {
        if !(self.tick_rate.is_finite() && self.tick_rate > 0.0) {
            return Err(ConfigError::TickRate(self.tick_rate));
        }
        if !(self.transition_duration.is_finite() && self.transition_duration >= 0.0) {
            return Err(ConfigError::Duration(self.transition_duration));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c = SimConfig::from_toml("tick_rate = 60\nverbosity = \"discrete\"").unwrap();
        assert_eq!(c.tick_rate, 60.0);
        assert_eq!(c.transition_duration, 2.0);
        assert_eq!(c.verbosity, Verbosity::Discrete);
        assert!(SimConfig::from_toml("tick_rate = 0").is_err());
        assert!(SimConfig::from_toml("tickrate = 10").is_err());
    }
}
