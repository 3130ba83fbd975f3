//! Procedural generator of oracle-labeled synthetic faces.
//!
//! Each face is stylized rather than photorealistic: every feature is drawn
//! so that the feature vector it implies is known analytically and lies
//! strictly inside the target emotion's rule region with at least a 10%
//! margin on every threshold. That gives the extractors a corpus with exact
//! ground truth.
//!
//! Layout constraints the renderer maintains:
//! - eye blobs sit inside the eye search band and below the wrinkle window;
//! - brow strokes hug the outer half of their window so they never cross
//!   the wrinkle window's columns;
//! - forehead furrows sit above the brow windows so they never enter them;
//! - the lip bar keeps clear of the elliptic mask boundary.

use crate::classify::{Emotion, FEATURES};
use crate::classify::{RuleTable, Side};
use crate::config::Config;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use crate::locate::{derive_regions, EyeCenter, EyePair, FaceRegions};
use crate::raster::{ycbcr_to_rgb, ColorImage, Rect, FACE_HEIGHT, FACE_WIDTH};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SKIN: (f64, f64, f64) = (184.0, 103.0, 157.0); // (Y, Cb, Cr)
const LIP: (f64, f64, f64) = (70.0, 140.0, 191.0);
const EYE_RGB: [u8; 3] = [255, 120, 20];
const BROW_RGB: [u8; 3] = [40, 25, 15];
const FURROW_Y: f64 = 90.0;
const STROKE_THICKNESS: usize = 6;
const MOUTH_CENTER_ROW: f64 = 300.0;
const MOUTH_CENTER_COL: f64 = 140.0;
/// Width of the luminance ramp flanking the dark lip core. Chosen so corner
/// detection lands on the core boundary after the radius-2 dilation.
const LIP_RAMP: f64 = 12.0;
const FURROW_MARGIN_COLS: usize = 6;

/// Parameters of one synthetic face.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceSpec {
    pub emotion: Emotion,
    /// Rows between the two lip bands; 0 draws a single band (closed mouth).
    pub mouth_open_rows: u32,
    /// Columns spanned by the dark lip core.
    pub corner_span: u32,
    /// Per-column top row of the brow stroke, relative to the brow window.
    pub brow_heights: Vec<u32>,
    pub furrow_count: u32,
    /// (row, col) centers of the two eye blobs, left first.
    pub eye_centers: [(u32, u32); 2],
    pub seed: u64,
}

impl FaceSpec {
    fn eyes(&self) -> EyePair {
        EyePair {
            left: EyeCenter {
                row: self.eye_centers[0].0 as f64,
                col: self.eye_centers[0].1 as f64,
            },
            right: EyeCenter {
                row: self.eye_centers[1].0 as f64,
                col: self.eye_centers[1].1 as f64,
            },
        }
    }
}

/// Feature vector the spec implies, before any rendering.
fn implied_features(spec: &FaceSpec, regions: &FaceRegions) -> Result<FeatureVector> {
    if spec.brow_heights.len() < 8 {
        return Err(Error::InvalidArgument(
            "brow profile needs at least 8 columns".into(),
        ));
    }
    let rect_h = regions.left_brow.h;
    for &h in &spec.brow_heights {
        if h as usize + STROKE_THICKNESS > rect_h {
            return Err(Error::InvalidArgument(format!(
                "brow stroke at height {h} leaves the {rect_h}-row brow window"
            )));
        }
    }
    let diffs: f64 = spec
        .brow_heights
        .windows(2)
        .map(|p| (p[1] as f64 - p[0] as f64).abs())
        .sum();
    let ebc = diffs / spec.brow_heights.len() as f64;
    let mean_top: f64 =
        spec.brow_heights.iter().map(|&h| h as f64).sum::<f64>() / spec.brow_heights.len() as f64;
    let ebm = (mean_top + (STROKE_THICKNESS as f64 - 1.0) / 2.0) / rect_h as f64;

    let furrow_len = regions.wrinkle.w.saturating_sub(2 * FURROW_MARGIN_COLS);
    let w = 2 * furrow_len * spec.furrow_count as usize;

    Ok(FeatureVector {
        mo: spec.mouth_open_rows as f64,
        lc: spec.corner_span as f64,
        w: w as f64,
        ebc,
        ebm,
    })
}

/// Verify the vector sits strictly inside the emotion's rule region with a
/// 10% margin on every threshold.
fn check_margins(fv: &FeatureVector, emotion: Emotion, rules: &RuleTable) -> Result<()> {
    for f in FEATURES {
        let threshold = rules.threshold(f);
        let value = f.value_of(fv);
        let needed = rules.rows[emotion.index()][f.index()];
        let ok = match needed {
            Side::High => value >= 1.1 * threshold,
            Side::Low => value <= 0.9 * threshold,
        };
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "{emotion}: {} = {value} misses the 10% margin around {threshold}",
                f.name()
            )));
        }
    }
    Ok(())
}

fn blend(px: [u8; 3], target: [u8; 3], t: f64) -> [u8; 3] {
    let mut out = [0u8; 3];
    for ch in 0..3 {
        out[ch] = (px[ch] as f64 + t * (target[ch] as f64 - px[ch] as f64))
            .round()
            .clamp(0.0, 255.0) as u8;
    }
    out
}

fn draw_eye_blob(img: &mut ColorImage, center: (u32, u32)) {
    let (er, ec) = (center.0 as f64, center.1 as f64);
    for r in (center.0 as i64 - 10).max(0)..(center.0 as i64 + 11).min(FACE_HEIGHT as i64) {
        for c in (center.1 as i64 - 10).max(0)..(center.1 as i64 + 11).min(FACE_WIDTH as i64) {
            let d = ((r as f64 - er).powi(2) + (c as f64 - ec).powi(2)).sqrt();
            let t = ((9.0 - d) / 2.0).clamp(0.0, 1.0);
            if t > 0.0 {
                let px = img.get(r as usize, c as usize);
                img.set(r as usize, c as usize, blend(px, EYE_RGB, t));
            }
        }
    }
}

fn draw_brow(img: &mut ColorImage, window: Rect, heights: &[u32], hug_left: bool) {
    let len = heights.len().min(window.w);
    let x0 = if hug_left {
        window.x0
    } else {
        window.x0 + window.w - len
    };
    for (i, &h) in heights.iter().take(len).enumerate() {
        // Mirror the profile on the right brow so the face stays symmetric.
        let col = if hug_left { x0 + i } else { x0 + len - 1 - i };
        let top = window.y0 + h as usize;
        for r in top..top + STROKE_THICKNESS {
            img.set(r, col, BROW_RGB);
        }
    }
}

fn draw_furrows(img: &mut ColorImage, spec: &FaceSpec, regions: &FaceRegions) -> Result<()> {
    let count = spec.furrow_count as usize;
    if count == 0 {
        return Ok(());
    }
    let brow_top = regions.left_brow.y0.min(regions.right_brow.y0);
    let band_top = regions.wrinkle.y0 + 4;
    let band_bottom = brow_top.saturating_sub(4);
    if band_bottom <= band_top || (count > 1 && (band_bottom - band_top) / (count - 1) < 7) {
        return Err(Error::InvalidArgument(format!(
            "no room for {count} furrows between the wrinkle window top and the brow windows"
        )));
    }
    let x0 = regions.wrinkle.x0 + FURROW_MARGIN_COLS;
    let x1 = regions.wrinkle.x0 + regions.wrinkle.w - FURROW_MARGIN_COLS;
    let shift = (spec.seed % 3) as i64 - 1;
    for i in 0..count {
        let center = if count == 1 {
            (band_top + band_bottom) / 2
        } else {
            band_top + i * (band_bottom - band_top) / (count - 1)
        };
        let center = (center as i64 + shift).max(band_top as i64) as usize;
        // Luminance dip with soft shoulders, skin chroma preserved.
        for (dr, y) in [(-2i64, 120.0), (-1, FURROW_Y), (0, FURROW_Y), (1, FURROW_Y), (2, 120.0)] {
            let r = (center as i64 + dr) as usize;
            let px = ycbcr_to_rgb(y, SKIN.1, SKIN.2);
            for c in x0..x1 {
                img.set(r, c, px);
            }
        }
    }
    Ok(())
}

fn draw_mouth(img: &mut ColorImage, spec: &FaceSpec) {
    let span = spec.corner_span as f64;
    let core_start = MOUTH_CENTER_COL - span / 2.0;
    let core_end = MOUTH_CENTER_COL + span / 2.0;
    let bands: Vec<f64> = if spec.mouth_open_rows == 0 {
        vec![MOUTH_CENTER_ROW]
    } else {
        let half = spec.mouth_open_rows as f64 / 2.0;
        vec![MOUTH_CENTER_ROW - half, MOUTH_CENTER_ROW + half]
    };
    let bar_top = bands[0] - 3.0;
    let bar_bottom = bands[bands.len() - 1] + 3.0;
    let sigma = 4.0;

    for r in 230..FACE_HEIGHT {
        let rf = r as f64;
        let mut bump: f64 = 0.0;
        for &b in &bands {
            bump = bump.max((-(rf - b) * (rf - b) / (2.0 * sigma * sigma)).exp());
        }
        let vert = if rf < bar_top {
            1.0 - (bar_top - rf) / 6.0
        } else if rf > bar_bottom {
            1.0 - (rf - bar_bottom) / 6.0
        } else {
            1.0
        }
        .clamp(0.0, 1.0);
        if bump < 1e-4 && vert <= 0.0 {
            continue;
        }
        for c in 0..FACE_WIDTH {
            let cf = c as f64;
            let horiz = if cf < core_start {
                1.0 - (core_start - cf) / LIP_RAMP
            } else if cf > core_end {
                1.0 - (cf - core_end) / LIP_RAMP
            } else {
                1.0
            }
            .clamp(0.0, 1.0);
            if horiz <= 0.0 {
                continue;
            }
            let chroma_t = bump * horiz;
            let darkness = vert * horiz;
            let y = SKIN.0 + darkness * (LIP.0 - SKIN.0);
            let cb = SKIN.1 + chroma_t * (LIP.1 - SKIN.1);
            let cr = SKIN.2 + chroma_t * (LIP.2 - SKIN.2);
            img.set(r, c, ycbcr_to_rgb(y, cb, cr));
        }
    }
}

/// Render the face a spec describes and return it with the feature vector
/// the construction implies. Fails if the implied vector misses its
/// emotion's rule region by less than the 10% margin.
pub fn generate_face(spec: &FaceSpec) -> Result<(ColorImage, FeatureVector)> {
    let cfg = Config::default();
    let regions = derive_regions(&spec.eyes(), &cfg)
        .map_err(|e| Error::InvalidArgument(format!("eye centers yield no regions: {e}")))?;
    let truth = implied_features(spec, &regions)?;
    check_margins(&truth, spec.emotion, &RuleTable::with_thresholds(cfg.rules))?;

    let mut img = ColorImage::new(
        FACE_WIDTH,
        FACE_HEIGHT,
        ycbcr_to_rgb(SKIN.0, SKIN.1, SKIN.2),
    );
    draw_furrows(&mut img, spec, &regions)?;
    draw_eye_blob(&mut img, spec.eye_centers[0]);
    draw_eye_blob(&mut img, spec.eye_centers[1]);
    draw_brow(&mut img, regions.left_brow, &spec.brow_heights, true);
    draw_brow(&mut img, regions.right_brow, &spec.brow_heights, false);
    draw_mouth(&mut img, spec);
    Ok((img, truth))
}

/// Triangle-wave brow profile with unit slope: curvature 1 at every step.
fn curved_profile(base: u32, phase: usize, len: usize) -> Vec<u32> {
    (0..len)
        .map(|i| {
            let m = (i + phase) % 16;
            let tri = if m <= 8 { m } else { 16 - m } as u32;
            base + tri
        })
        .collect()
}

fn jittered_spec(emotion: Emotion, rng: &mut ChaCha8Rng) -> FaceSpec {
    let base_row: u32 = rng.random_range(150..=156);
    let delta: i64 = rng.random_range(-1..=1);
    let left = (base_row, rng.random_range(85..=95));
    let right = ((base_row as i64 + delta) as u32, rng.random_range(185..=195));

    let open = matches!(emotion, Emotion::Surprise | Emotion::Happy);
    let mouth_open_rows = if open { rng.random_range(33..=50) } else { 0 };
    let corner_span = if open {
        rng.random_range(62..=90)
    } else {
        rng.random_range(30..=44)
    };
    let furrow_count = if matches!(emotion, Emotion::Disgust | Emotion::Surprise) {
        3
    } else {
        0
    };
    let curved = matches!(emotion, Emotion::Surprise | Emotion::Neutral | Emotion::Happy);
    let brow_heights = if curved {
        curved_profile(rng.random_range(41..=46), rng.random_range(0..16), 48)
    } else {
        vec![rng.random_range(15..=30); 48]
    };

    FaceSpec {
        emotion,
        mouth_open_rows,
        corner_span,
        brow_heights,
        furrow_count,
        eye_centers: [left, right],
        seed: rng.random::<u64>(),
    }
}

/// Deterministic suite of `count` labeled faces per emotion, with parameter
/// jitter inside each emotion's margin region.
pub fn generate_suite(
    count: usize,
    seed: u64,
) -> Result<Vec<(ColorImage, Emotion, FeatureVector)>> {
    if count < 1 {
        return Err(Error::InvalidArgument("suite count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count * crate::classify::EMOTIONS.len());
    for emotion in crate::classify::EMOTIONS {
        for _ in 0..count {
            let spec = jittered_spec(emotion, &mut rng);
            let (img, truth) = generate_face(&spec)?;
            out.push((img, emotion, truth));
        }
    }
    Ok(out)
}

/// Paint a rectangle with plain skin. Used by occlusion tests to cover an
/// eye or brow region.
pub fn occlude(img: &mut ColorImage, rect: Rect) -> Result<()> {
    rect.check_within(img.width(), img.height())?;
    let skin = ycbcr_to_rgb(SKIN.0, SKIN.1, SKIN.2);
    for r in rect.y0..rect.y0 + rect.h {
        for c in rect.x0..rect.x0 + rect.w {
            img.set(r, c, skin);
        }
    }
    Ok(())
}
