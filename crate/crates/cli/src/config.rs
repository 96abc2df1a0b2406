use std::path::{Path, PathBuf};

use dctpred_core::imagecodec::RingContext;
use dctpred_core::tvcore::DescentConfig;
use dctpred_core::videocodec::ModeMaskTable;
use dctpred_core::{Error, Result};
use serde::Deserialize;

/// Overrides read from `--config`. Anything left out keeps the library
/// default. Relative paths are taken from the config file's directory.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    /// Default mask for the image commands, e.g. "c10,c01".
    pub image_mask: Option<String>,
    pub ring: Option<RingContext>,
    pub image_descent: Option<DescentConfig>,
    pub video_descent: Option<DescentConfig>,
    /// Descent for `restore` and `position-study`.
    pub restore_descent: Option<DescentConfig>,
    pub optimal_descent: Option<DescentConfig>,
    /// Mode mask table (TOML) for the intra commands.
    pub mode_table: Option<PathBuf>,
}

impl CliConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
        let mut cfg: CliConfig = toml::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))?;
        if let Some(t) = &cfg.mode_table {
            if t.is_relative() {
                cfg.mode_table = Some(path.parent().unwrap_or(Path::new(".")).join(t));
            }
        }
        for d in [&cfg.image_descent, &cfg.video_descent, &cfg.restore_descent, &cfg.optimal_descent].into_iter().flatten() {
            d.validate()?;
        }
        Ok(cfg)
    }

    pub fn mode_table(&self) -> Result<ModeMaskTable> {
        match &self.mode_table {
            Some(p) => ModeMaskTable::from_toml_str(&std::fs::read_to_string(p)?),
            None => Ok(ModeMaskTable::default()),
        }
    }
}
