//! Materialize synthetic suites as PNG files plus a CSV manifest.

use anyhow::Context;
use mien_core::io::save_color_png;
use mien_core::synthcorpus::generate_suite;
use std::path::Path;

/// Generate `count` faces per emotion under `out_dir` and write
/// `manifest.csv` with the ground-truth feature columns. Returns the number
/// of faces written.
pub fn write_suite(count: usize, seed: u64, out_dir: &Path) -> anyhow::Result<usize> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let suite = generate_suite(count, seed)?;
    let mut writer = csv::Writer::from_path(out_dir.join("manifest.csv"))?;
    writer.write_record(["path", "emotion", "mo", "lc", "w", "ebc", "ebm"])?;
    for (i, (image, emotion, truth)) in suite.iter().enumerate() {
        let name = format!("{i:03}_{}.png", emotion.name().to_ascii_lowercase());
        save_color_png(image, &out_dir.join(&name))?;
        writer.write_record([
            name,
            emotion.name().to_string(),
            truth.mo.to_string(),
            truth.lc.to_string(),
            truth.w.to_string(),
            truth.ebc.to_string(),
            truth.ebm.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(suite.len())
}
