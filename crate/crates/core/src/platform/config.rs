use super::PlatformError;
use crate::features::{Multiplier, SpaceConfig};
use crate::protocol::DEFAULT_ROUNDS_PER_STAGE;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Deployment settings. Loaded from an optional TOML file, then overridden
/// by `INSTLAB_*` environment variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlatformConfig {
    pub port: u16,
    pub data_dir: PathBuf,
    pub seed: u64,
    pub rounds_per_stage: u32,
    pub features: usize,
    pub multiplier: Multiplier,
    /// Tables opened with a room and on each expansion.
    pub tables_per_room: u32,
    /// Seeded Player-1 moves per new room.
    pub seed_policy: u32,
    pub max_tables_per_room: u32,
    /// Pool Player-2 history across presentations of a game when
    /// estimating Player-1 bonuses.
    pub pool_presentations: bool,
    /// Idle time after which a session is abandoned.
    pub timeout_secs: u64,
    pub bootstrap_resamples: usize,
}

impl Default for PlatformConfig {
    fn default() -> Self {
        PlatformConfig {
            port: 8080,
            data_dir: PathBuf::from("data"),
            seed: 0,
            rounds_per_stage: DEFAULT_ROUNDS_PER_STAGE,
            features: 3,
            multiplier: Multiplier::integer(2),
            tables_per_room: 8,
            seed_policy: 2,
            max_tables_per_room: 100_000,
            pool_presentations: true,
            timeout_secs: 600,
            bootstrap_resamples: 10_000,
        }
    }
}

pub const ENV_PREFIX: &str = "INSTLAB_";

impl PlatformConfig {
    pub fn from_toml(text: &str) -> Result<Self, PlatformError> {
        toml::from_str(text).map_err(|e| PlatformError::Config(e.to_string()))
    }

    /// Reads `path` if given, then applies environment overrides.
    pub fn load(path: Option<&Path>) -> Result<Self, PlatformError> {
        let mut config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| PlatformError::Config(format!("{}: {e}", p.display())))?;
                PlatformConfig::from_toml(&text)?
            }
            None => PlatformConfig::default(),
        };
        config.apply_env(std::env::vars())?;
        Ok(config)
    }

    /// Applies `INSTLAB_PORT`, `INSTLAB_DATA_DIR`, `INSTLAB_SEED`,
    /// `INSTLAB_ROUNDS_PER_STAGE` and `INSTLAB_MULTIPLIER`.
    pub fn apply_env<I: IntoIterator<Item = (String, String)>>(&mut self, vars: I) -> Result<(), PlatformError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, PlatformError> {
            value.parse().map_err(|_| PlatformError::Config(format!("{key}: cannot parse `{value}`")))
        }
        for (key, value) in vars {
            let Some(name) = key.strip_prefix(ENV_PREFIX) else { continue };
            match name {
                "PORT" => self.port = parse(&key, &value)?,
                "DATA_DIR" => self.data_dir = PathBuf::from(value),
                "SEED" => self.seed = parse(&key, &value)?,
                "ROUNDS_PER_STAGE" => self.rounds_per_stage = parse(&key, &value)?,
                "MULTIPLIER" => {
                    self.multiplier = value.parse().map_err(|e: String| PlatformError::Config(format!("{key}: {e}")))?
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), PlatformError> {
        let bad = |m: &str| Err(PlatformError::Config(m.to_string()));
        if self.rounds_per_stage == 0 {
            return bad("rounds_per_stage must be at least 1");
        }
        if self.tables_per_room == 0 || self.seed_policy > self.tables_per_room {
            return bad("tables_per_room must be positive and at least seed_policy");
        }
        if self.max_tables_per_room < self.tables_per_room {
            return bad("max_tables_per_room is below tables_per_room");
        }
        if self.bootstrap_resamples == 0 {
            return bad("bootstrap_resamples must be positive");
        }
        Ok(())
    }

    /// The game space this deployment serves.
    pub fn space_config(&self) -> SpaceConfig {
        SpaceConfig { efficiency_multiplier: self.multiplier, rng_seed: self.seed, ..SpaceConfig::with_features(self.features) }
    }

    pub fn log_path(&self) -> PathBuf {
        self.data_dir.join("events.jsonl")
    }
}
