//! Library side of the `mien` CLI: evaluation, artifact export, and suite
//! generation, kept separate from argument parsing so tests can drive them
//! directly.

pub mod explain;
pub mod gen;
pub mod report;

use anyhow::Context;
use mien_core::classify::{default_weight_matrix, table4_preset, WeightMatrix};
use mien_core::config::WeightSource;
use mien_core::raster::Rect;
use mien_core::Config;
use std::path::Path;

/// Load a config file or fall back to the defaults.
pub fn load_config(path: Option<&Path>) -> anyhow::Result<Config> {
    match path {
        Some(p) => Ok(Config::load(p)?),
        None => Ok(Config::default()),
    }
}

/// Resolve the voting weights the config names.
pub fn resolve_weights(cfg: &Config) -> anyhow::Result<WeightMatrix> {
    Ok(match &cfg.weights {
        WeightSource::Eq8 => default_weight_matrix(),
        WeightSource::Table4 => table4_preset(),
        WeightSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read weight file {}", path.display()))?;
            serde_json::from_str(&text)
                .with_context(|| format!("malformed weight file {}", path.display()))?
        }
    })
}

/// Parse a face rectangle given as `x0,y0,w,h`.
pub fn parse_rect(text: &str) -> anyhow::Result<Rect> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        anyhow::bail!("face rect must be `x0,y0,w,h`, got `{text}`");
    }
    let mut vals = [0usize; 4];
    for (v, p) in vals.iter_mut().zip(&parts) {
        *v = p
            .parse()
            .with_context(|| format!("bad face-rect component `{p}`"))?;
    }
    Ok(Rect::new(vals[0], vals[1], vals[2], vals[3]))
}
