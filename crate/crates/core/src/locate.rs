//! Chroma-based eye localization and derivation of the facial regions of
//! interest (eyebrows, forehead wrinkles, lips) from the eye positions.

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exec::process_rows;
use crate::raster::{ChromaImage, Plane, Rect, FACE_HEIGHT, FACE_WIDTH};

/// Located eye centroids in pixel coordinates (fractional).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EyeCenter {
    pub row: f64,
    pub col: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EyePair {
    pub left: EyeCenter,
    pub right: EyeCenter,
}

/// The four regions every extractor works on, all inside the 381x281 frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FaceRegions {
    pub left_brow: Rect,
    pub right_brow: Rect,
    pub wrinkle: Rect,
    pub lips: Rect,
}

/// The fixed lips window: row pixels 250 to 381 (1-based, inclusive) and
/// every column of the face frame.
pub fn lips_rect() -> Rect {
    Rect::new(0, 249, FACE_WIDTH, 132)
}

/// Eye map before rescaling: `cr^2 * (cr^2 - cr/cb)^4` on unit-interval
/// chroma, with `cb` clamped below at 1/255.
pub fn eye_map_raw(c: &ChromaImage) -> Plane<f64> {
    let (w, h) = (c.width(), c.height());
    let mut out = Plane::new(w, h, 0.0);
    process_rows(out.samples_mut(), w, |r, row| {
        for (col, dst) in row.iter_mut().enumerate() {
            let cr = c.cr.get(r, col) as f64 / 255.0;
            let cb = c.cb.get(r, col).max(1) as f64 / 255.0;
            let bracket = cr * cr - cr / cb;
            let b2 = bracket * bracket;
            *dst = cr * cr * b2 * b2;
        }
    });
    out
}

/// Eye map rescaled so the plane maximum maps to 1.
pub fn eye_map(c: &ChromaImage) -> Plane<f64> {
    eye_map_raw(c).rescale_max_to_unit()
}

/// Rows of the eye search band for a frame of height `h`.
fn eye_band(cfg: &Config, h: usize) -> (usize, usize) {
    let top = (cfg.roi.eye_band_top * h as f64).round() as usize;
    let bottom = ((cfg.roi.eye_band_bottom * h as f64).round() as usize).min(h);
    (top.min(h), bottom)
}

/// Locate both eyes on an eye map: binarize at a fraction of the band
/// maximum, then take the centroid of the first white connected component
/// met scanning columns left-to-right (left eye) and right-to-left (right).
pub fn locate_eyes(em: &Plane<f64>, cfg: &Config) -> Result<EyePair> {
    let (w, h) = (em.width(), em.height());
    let (band_top, band_bottom) = eye_band(cfg, h);
    if band_top >= band_bottom {
        return Err(Error::extraction("locate_eyes", "empty eye search band"));
    }

    let mut band_max = 0.0f64;
    for r in band_top..band_bottom {
        for &v in em.row(r) {
            if v > band_max {
                band_max = v;
            }
        }
    }
    if band_max <= 0.0 {
        return Err(Error::extraction(
            "locate_eyes",
            "no response in the eye search band",
        ));
    }
    let threshold = cfg.eye_binarize_fraction * band_max;
    let white = |r: usize, c: usize| em.get(r, c) >= threshold;

    // Label white pixels inside the band with 8-connected components.
    let mut labels = vec![0u32; w * h];
    let mut next = 1u32;
    let mut stack = Vec::new();
    for r in band_top..band_bottom {
        for c in 0..w {
            if !white(r, c) || labels[r * w + c] != 0 {
                continue;
            }
            let label = next;
            next += 1;
            labels[r * w + c] = label;
            stack.push((r, c));
            while let Some((pr, pc)) = stack.pop() {
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        let nr = pr as i64 + dr;
                        let nc = pc as i64 + dc;
                        if nr < band_top as i64
                            || nr >= band_bottom as i64
                            || nc < 0
                            || nc >= w as i64
                        {
                            continue;
                        }
                        let (nr, nc) = (nr as usize, nc as usize);
                        if white(nr, nc) && labels[nr * w + nc] == 0 {
                            labels[nr * w + nc] = label;
                            stack.push((nr, nc));
                        }
                    }
                }
            }
        }
    }

    let first_label = |cols: &mut dyn Iterator<Item = usize>| -> Option<u32> {
        for c in cols {
            for r in band_top..band_bottom {
                let l = labels[r * w + c];
                if l != 0 {
                    return Some(l);
                }
            }
        }
        None
    };
    let left_label = first_label(&mut (0..w))
        .ok_or_else(|| Error::extraction("locate_eyes", "no white pixels in the eye band"))?;
    let right_label = first_label(&mut (0..w).rev()).expect("a left component implies a right one");
    if left_label == right_label {
        return Err(Error::extraction(
            "locate_eyes",
            "only one eye candidate found",
        ));
    }

    let centroid = |label: u32| -> EyeCenter {
        let (mut sr, mut sc, mut n) = (0.0, 0.0, 0.0);
        for r in band_top..band_bottom {
            for c in 0..w {
                if labels[r * w + c] == label {
                    sr += r as f64;
                    sc += c as f64;
                    n += 1.0;
                }
            }
        }
        EyeCenter {
            row: sr / n,
            col: sc / n,
        }
    };
    let left = centroid(left_label);
    let right = centroid(right_label);
    if left.col >= right.col {
        return Err(Error::extraction(
            "locate_eyes",
            "eye candidates are not horizontally ordered",
        ));
    }
    Ok(EyePair { left, right })
}

fn clamped_row(v: f64, h: usize) -> usize {
    (v.round().max(0.0) as usize).min(h)
}

/// Derive the eyebrow, wrinkle, and lips rectangles from the eye positions.
/// The lips window is fixed; the others follow the eyes and are clamped to
/// the frame.
pub fn derive_regions(eyes: &EyePair, cfg: &Config) -> Result<FaceRegions> {
    let (w, h) = (FACE_WIDTH, FACE_HEIGHT);
    for eye in [&eyes.left, &eyes.right] {
        if eye.row < 0.0 || eye.row >= h as f64 || eye.col < 0.0 || eye.col >= w as f64 {
            return Err(Error::extraction(
                "derive_regions",
                "eye position outside the face frame",
            ));
        }
    }

    // Odd width so the window centers exactly on the eye column.
    let brow_half = (cfg.roi.brow_width_frac * w as f64 / 2.0).round() as usize;
    let brow_w = (2 * brow_half + 1).min(w);
    let brow_rect = |eye: &EyeCenter| -> Result<Rect> {
        let x0 = ((eye.col.round() as i64) - brow_half as i64)
            .clamp(0, (w - brow_w) as i64) as usize;
        let top = clamped_row(eye.row - cfg.roi.brow_top_frac * h as f64, h);
        let bottom = clamped_row(eye.row - cfg.roi.brow_bottom_frac * h as f64, h);
        if bottom <= top {
            return Err(Error::extraction(
                "derive_regions",
                "eyebrow window clamped to zero area",
            ));
        }
        Ok(Rect::new(x0, top, brow_w, bottom - top))
    };

    let mean_row = (eyes.left.row + eyes.right.row) / 2.0;
    let wx0 = eyes.left.col.round() as usize;
    let wx1 = eyes.right.col.round() as usize;
    let wtop = clamped_row(mean_row - cfg.roi.wrinkle_top_frac * h as f64, h);
    let wbottom = clamped_row(mean_row - cfg.roi.wrinkle_bottom_frac * h as f64, h);
    if wx1 <= wx0 || wbottom <= wtop {
        return Err(Error::extraction(
            "derive_regions",
            "wrinkle window clamped to zero area",
        ));
    }

    Ok(FaceRegions {
        left_brow: brow_rect(&eyes.left)?,
        right_brow: brow_rect(&eyes.right)?,
        wrinkle: Rect::new(wx0, wtop, wx1 - wx0, wbottom - wtop),
        lips: lips_rect(),
    })
}
