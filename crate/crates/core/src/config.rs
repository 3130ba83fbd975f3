//! Pipeline configuration: every tunable the extractors consume, plus the
//! rule thresholds and the voting-weight source.

use crate::edges::CannyParams;
use crate::error::{Error, Result};
use std::path::Path;

/// Structuring-element radii used by the extractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SeRadii {
    /// Lip dilation before the corner map.
    pub lip_dilate: usize,
    /// Opening that denoises the mouth edge image.
    pub lip_open: usize,
    /// Morphological gradient for the eyebrow mean extractor.
    pub brow_gradient: usize,
    /// Opening that denoises the binarized eyebrow mask.
    pub brow_open: usize,
}

impl Default for SeRadii {
    fn default() -> Self {
        SeRadii {
            lip_dilate: 2,
            lip_open: 2,
            brow_gradient: 1,
            brow_open: 1,
        }
    }
}

/// Moving-average smoothing of the mouth row-sum signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Smoothing {
    pub window: usize,
    pub passes: usize,
}

impl Default for Smoothing {
    fn default() -> Self {
        Smoothing { window: 9, passes: 2 }
    }
}

/// Peak acceptance for the mouth row-sum signal.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct PeakParams {
    /// Minimum height as a fraction of the global maximum.
    pub min_prominence_fraction: f64,
    /// Minimum distance in rows between accepted peaks.
    pub min_separation: usize,
}

impl Default for PeakParams {
    fn default() -> Self {
        PeakParams {
            min_prominence_fraction: 0.2,
            min_separation: 10,
        }
    }
}

/// Region-of-interest geometry, as fractions of the 381x281 face frame.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RoiGeometry {
    /// Eyebrow window width as a fraction of the frame width.
    pub brow_width_frac: f64,
    /// Top of the eyebrow window: eye row minus this fraction of the height.
    pub brow_top_frac: f64,
    /// Bottom of the eyebrow window: eye row minus this fraction.
    pub brow_bottom_frac: f64,
    /// Top of the wrinkle window: mean eye row minus this fraction.
    pub wrinkle_top_frac: f64,
    /// Bottom of the wrinkle window: mean eye row minus this fraction.
    pub wrinkle_bottom_frac: f64,
    /// Eye search band, as fractions of the frame height.
    pub eye_band_top: f64,
    pub eye_band_bottom: f64,
}

impl Default for RoiGeometry {
    fn default() -> Self {
        RoiGeometry {
            brow_width_frac: 0.35,
            brow_top_frac: 0.18,
            brow_bottom_frac: 0.02,
            wrinkle_top_frac: 0.25,
            wrinkle_bottom_frac: 0.05,
            eye_band_top: 0.20,
            eye_band_bottom: 0.55,
        }
    }
}

/// Rule thresholds for the five features.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct RuleThresholds {
    pub mo: f64,
    pub lc: f64,
    pub w: f64,
    pub ebc: f64,
    pub ebm: f64,
}

impl Default for RuleThresholds {
    fn default() -> Self {
        RuleThresholds {
            mo: 25.0,
            lc: 50.0,
            w: 200.0,
            ebc: 0.5,
            ebm: 0.7,
        }
    }
}

/// Where the weighted-majority-voting weights come from.
#[derive(Debug, Clone, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSource {
    /// Weights computed from the per-feature accuracy table.
    #[default]
    Eq8,
    /// The published preset (known not to row-normalize exactly).
    Table4,
    /// A JSON file holding a 5x5 weight matrix.
    File(std::path::PathBuf),
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Config {
    pub rules: RuleThresholds,
    pub weights: WeightSource,
    pub se_radii: SeRadii,
    pub canny: CannyParams,
    pub smoothing: Smoothing,
    pub peaks: PeakParams,
    pub roi: RoiGeometry,
    /// Eye-map binarization threshold as a fraction of the band maximum.
    pub eye_binarize_fraction: f64,
    /// Binarization threshold for the eyebrow curvature extractor.
    pub brow_binarize_threshold: f64,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Config = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.canny.validate()?;
        let unit = |name: &str, v: f64| -> Result<()> {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        unit("eye_binarize_fraction", self.eye_binarize_fraction)?;
        unit("brow_binarize_threshold", self.brow_binarize_threshold)?;
        unit("peaks.min_prominence_fraction", self.peaks.min_prominence_fraction)?;
        if self.smoothing.window == 0 || self.smoothing.window % 2 == 0 {
            return Err(Error::Config(format!(
                "smoothing.window must be odd, got {}",
                self.smoothing.window
            )));
        }
        if self.roi.eye_band_top >= self.roi.eye_band_bottom {
            return Err(Error::Config("eye band top must be above the bottom".into()));
        }
        if self.roi.brow_top_frac <= self.roi.brow_bottom_frac {
            return Err(Error::Config("brow window top must be above its bottom".into()));
        }
        if self.roi.wrinkle_top_frac <= self.roi.wrinkle_bottom_frac {
            return Err(Error::Config("wrinkle window top must be above its bottom".into()));
        }
        for (name, v) in [
            ("rules.mo", self.rules.mo),
            ("rules.lc", self.rules.lc),
            ("rules.w", self.rules.w),
            ("rules.ebc", self.rules.ebc),
            ("rules.ebm", self.rules.ebm),
        ] {
            if v <= 0.0 {
                return Err(Error::Config(format!(
                    "{name} threshold must be positive, got {v}"
                )));
            }
        }
        if self.se_radii.lip_dilate < 1
            || self.se_radii.lip_open < 1
            || self.se_radii.brow_gradient < 1
            || self.se_radii.brow_open < 1
        {
            return Err(Error::Config("structuring-element radii must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for Config {
    fn default() -> Config {
        Config {
            rules: RuleThresholds::default(),
            weights: WeightSource::Eq8,
            se_radii: SeRadii::default(),
            canny: CannyParams::default(),
            smoothing: Smoothing::default(),
            peaks: PeakParams::default(),
            roi: RoiGeometry::default(),
            eye_binarize_fraction: 0.8,
            brow_binarize_threshold: 0.5,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn default_thresholds_match_rule_table() {
        let c = Config::default();
        assert_eq!(c.rules.mo, 25.0);
        assert_eq!(c.rules.lc, 50.0);
        assert_eq!(c.rules.w, 200.0);
        assert_eq!(c.rules.ebc, 0.5);
        assert_eq!(c.rules.ebm, 0.7);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: Config = serde_json::from_str(r#"{"rules": {"mo": 30.0}}"#).unwrap();
        assert_eq!(cfg.rules.mo, 30.0);
        assert_eq!(cfg.rules.lc, 50.0);
        assert_eq!(cfg.smoothing.window, 9);
    }

    #[test]
    fn bad_config_rejected() {
        let mut cfg = Config::default();
        cfg.smoothing.window = 4;
        assert!(cfg.validate().is_err());
        let mut cfg = Config::default();
        cfg.eye_binarize_fraction = 1.5;
        assert!(cfg.validate().is_err());
    }
}
