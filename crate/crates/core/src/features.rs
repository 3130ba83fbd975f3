//! The five feature extractors — mouth opening (MO), lip-corner distance
//! (LC), forehead-wrinkle intensity (W), eyebrow curvature (EBC), eyebrow
//! mean position (EBM) — and the end-to-end extractor that orchestrates
//! them.

use crate::config::Config;
use crate::edges::{
    binarize, canny, find_peaks, smooth_1d, sobel_magnitude, CannyParams, PeakSet, Polarity,
};
use crate::error::{Error, Result};
use crate::exec::process_rows;
use crate::locate::{derive_regions, eye_map, locate_eyes, EyePair, FaceRegions};
use crate::morphology::{dilate, disk_se, gradient_u8, open};
use crate::raster::{apply_elliptic_mask, resize_face, to_ycbcr, ChromaImage, ColorImage, Plane};

/// The five scalar features for one face.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureVector {
    /// Mouth opening in rows; 0 when the mouth is closed.
    pub mo: f64,
    /// Euclidean distance between the two lip corners, in pixels.
    pub lc: f64,
    /// Count of white pixels in the wrinkle-region edge image.
    pub w: f64,
    /// Normalized eyebrow curvature.
    pub ebc: f64,
    /// Mean eyebrow row divided by the window height, in `[0, 1]`.
    pub ebm: f64,
}

/// Per-column row of the first foreground pixel in an eyebrow edge image.
/// Columns with no foreground are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BrowLine {
    pub heights: Vec<Option<usize>>,
}

impl BrowLine {
    /// (column, row) of every present point, in column order.
    pub fn points(&self) -> Vec<(usize, usize)> {
        self.heights
            .iter()
            .enumerate()
            .filter_map(|(c, h)| h.map(|r| (c, r)))
            .collect()
    }
}

/// Detected lip corners as (row, col) points plus their distance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MouthCorners {
    pub left: (usize, usize),
    pub right: (usize, usize),
    pub distance: f64,
}

/// Unit-interval chroma planes of a region: `cr / 255` and `max(cb, 1) / 255`.
/// The clamp keeps the `cr / cb` ratio finite.
pub fn unit_chroma(c: &ChromaImage) -> (Plane<f64>, Plane<f64>) {
    let cr = Plane::from_samples(
        c.width(),
        c.height(),
        c.cr.samples().iter().map(|&v| v as f64 / 255.0).collect(),
    );
    let cb = Plane::from_samples(
        c.width(),
        c.height(),
        c.cb.samples().iter().map(|&v| v.max(1) as f64 / 255.0).collect(),
    );
    (cr, cb)
}

/// Scale factor of the mouth map: `0.95 * mean(cr^2) / mean(cr / cb)` over
/// the region, on unit-interval chroma.
pub fn compute_n_from_unit(cr: &Plane<f64>, cb: &Plane<f64>) -> f64 {
    let k = cr.samples().len() as f64;
    let mut sum_cr2 = 0.0;
    let mut sum_ratio = 0.0;
    for (&r, &b) in cr.samples().iter().zip(cb.samples()) {
        sum_cr2 += r * r;
        sum_ratio += r / b;
    }
    if sum_ratio == 0.0 {
        // cr is identically zero, so the map is too; any n works.
        return 0.0;
    }
    0.95 * (sum_cr2 / k) / (sum_ratio / k)
}

pub fn compute_n(lips: &ChromaImage) -> f64 {
    let (cr, cb) = unit_chroma(lips);
    compute_n_from_unit(&cr, &cb)
}

/// Mouth map before rescaling: `cr^2 * (cr^2 - n * cr / cb)^2` with `n` from
/// [`compute_n_from_unit`].
pub fn mouth_map_raw_from_unit(cr: &Plane<f64>, cb: &Plane<f64>) -> Plane<f64> {
    let n = compute_n_from_unit(cr, cb);
    let (w, h) = (cr.width(), cr.height());
    let mut out = Plane::new(w, h, 0.0);
    process_rows(out.samples_mut(), w, |r, row| {
        for (c, dst) in row.iter_mut().enumerate() {
            let rr = cr.get(r, c);
            let bb = cb.get(r, c);
            let bracket = rr * rr - n * rr / bb;
            *dst = rr * rr * bracket * bracket;
        }
    });
    out
}

pub fn mouth_map_raw(lips: &ChromaImage) -> Plane<f64> {
    let (cr, cb) = unit_chroma(lips);
    mouth_map_raw_from_unit(&cr, &cb)
}

/// Mouth map rescaled so its maximum maps to 1.
pub fn mouth_map(lips: &ChromaImage) -> Plane<f64> {
    mouth_map_raw(lips).rescale_max_to_unit()
}

/// Intermediates of the mouth-opening pipeline, kept for inspection.
#[derive(Debug, Clone)]
pub struct MouthTrace {
    pub map: Plane<f64>,
    pub edges: Plane<f64>,
    pub row_sums: Vec<f64>,
    pub smoothed: Vec<f64>,
    pub peaks: PeakSet,
}

fn mouth_opening_traced(lips: &ChromaImage, cfg: &Config) -> Result<MouthTrace> {
    let stage = "mouth_opening";
    let map = mouth_map(lips);
    let edges = sobel_magnitude(&map)
        .map_err(|e| Error::extraction(stage, e.to_string()))?;
    let se = disk_se(cfg.se_radii.lip_open).map_err(|e| Error::extraction(stage, e.to_string()))?;
    let opened = open(&edges, &se);
    let row_sums: Vec<f64> = opened.rows().map(|row| row.iter().sum()).collect();
    let smoothed = smooth_1d(&row_sums, cfg.smoothing.window, cfg.smoothing.passes)
        .map_err(|e| Error::extraction(stage, e.to_string()))?;
    let peaks = find_peaks(
        &smoothed,
        cfg.peaks.min_prominence_fraction,
        cfg.peaks.min_separation,
    );
    Ok(MouthTrace {
        map,
        edges: opened,
        row_sums,
        smoothed,
        peaks,
    })
}

/// Mouth opening: peak count of the smoothed row-sum signal and the distance
/// in rows between the two tallest peaks. Fewer than two peaks means the
/// mouth is closed and MO is 0.
pub fn mouth_opening(lips: &ChromaImage, cfg: &Config) -> Result<(usize, f64)> {
    let trace = mouth_opening_traced(lips, cfg)?;
    Ok(mouth_opening_from_peaks(&trace.peaks))
}

fn mouth_opening_from_peaks(peaks: &PeakSet) -> (usize, f64) {
    match peaks.two_tallest() {
        Some((a, b)) => (peaks.len(), a.abs_diff(b) as f64),
        None => (peaks.len(), 0.0),
    }
}

/// Eyebrow mean position from a morphological-gradient image: per column,
/// rows brighter than (column mean + 1 column std) are "high"; the mean of
/// each column's high rows is averaged over columns and divided by the
/// window height.
pub fn ebm_from_gradient(g: &Plane<u8>) -> Result<f64> {
    let (w, h) = (g.width(), g.height());
    let mut col_means = Vec::new();
    for c in 0..w {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in 0..h {
            let v = g.get(r, c) as f64;
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / h as f64;
        let var = (sum_sq / h as f64 - mean * mean).max(0.0);
        let cutoff = mean + var.sqrt();
        let mut pos_sum = 0.0;
        let mut count = 0.0;
        for r in 0..h {
            if g.get(r, c) as f64 > cutoff {
                pos_sum += r as f64;
                count += 1.0;
            }
        }
        if count > 0.0 {
            col_means.push(pos_sum / count);
        }
    }
    if col_means.is_empty() {
        return Err(Error::extraction(
            "eyebrow_mean",
            "no high-intensity gradient pixels in any column",
        ));
    }
    let mean_row = col_means.iter().sum::<f64>() / col_means.len() as f64;
    Ok(mean_row / h as f64)
}

/// Eyebrow mean (method "MGII"): morphological gradient of the grayscale
/// window, then [`ebm_from_gradient`].
pub fn eyebrow_mean_mgii(brow: &Plane<u8>, cfg: &Config) -> Result<f64> {
    let se = disk_se(cfg.se_radii.brow_gradient)
        .map_err(|e| Error::extraction("eyebrow_mean", e.to_string()))?;
    let g = gradient_u8(brow, &se);
    ebm_from_gradient(&g)
}

/// First foreground (nonzero) row per column of an edge image.
pub fn brow_line_from_edges(edges: &Plane<f64>) -> BrowLine {
    let heights = (0..edges.width())
        .map(|c| (0..edges.height()).find(|&r| edges.get(r, c) > 0.0))
        .collect();
    BrowLine { heights }
}

/// Normalized curvature of a brow line: the sum of absolute height
/// differences between consecutive present columns, divided by the number of
/// present points.
pub fn curvature_from_line(line: &BrowLine) -> Result<f64> {
    let points = line.points();
    if points.len() < 2 {
        return Err(Error::extraction(
            "eyebrow_curvature",
            format!("brow line has {} points; need at least 2", points.len()),
        ));
    }
    let total: f64 = points
        .windows(2)
        .map(|p| (p[1].1 as f64 - p[0].1 as f64).abs())
        .sum();
    Ok(total / points.len() as f64)
}

fn dcl_from_gray(gray: &Plane<u8>, cfg: &Config) -> Result<(Plane<f64>, BrowLine, f64)> {
    let stage = "eyebrow_curvature";
    let mask = binarize(gray, cfg.brow_binarize_threshold, Polarity::DarkForeground);
    let se = disk_se(cfg.se_radii.brow_open).map_err(|e| Error::extraction(stage, e.to_string()))?;
    let cleaned = open(&mask, &se);
    let edges = sobel_magnitude(&cleaned).map_err(|e| Error::extraction(stage, e.to_string()))?;
    let line = brow_line_from_edges(&edges);
    let n = curvature_from_line(&line)?;
    Ok((edges, line, n))
}

/// Eyebrow curvature (method "DCL"): grayscale, binarize dark-foreground,
/// denoise the mask with an opening, Sobel, then trace the first foreground
/// pixel per column and measure the line's normalized curvature.
pub fn eyebrow_curvature_dcl(brow: &ColorImage, cfg: &Config) -> Result<f64> {
    let gray = to_ycbcr(brow).y;
    dcl_from_gray(&gray, cfg).map(|(_, _, n)| n)
}

/// Corner map on a luminance plane: `(1 - g)^6` with `g` normalized to
/// `[0, 1]`. Strictly decreasing in luminance.
pub fn corner_map(lips_gray: &Plane<u8>) -> Plane<f64> {
    let samples = lips_gray
        .samples()
        .iter()
        .map(|&v| (1.0 - v as f64 / 255.0).powi(6))
        .collect();
    Plane::from_samples(lips_gray.width(), lips_gray.height(), samples)
}

/// Locate the lip corners: dilate the luminance plane, build the corner map,
/// then scan columns from each side for the first pixel reaching half the
/// global maximum. Pixels that are pure black before dilation are treated as
/// masked background and take no part in the search.
pub fn mouth_corners(lips: &ChromaImage, cfg: &Config) -> Result<MouthCorners> {
    let stage = "mouth_corners";
    let se = disk_se(cfg.se_radii.lip_dilate)
        .map_err(|e| Error::extraction(stage, e.to_string()))?;
    let dilated = dilate(&lips.y, &se);
    let map = corner_map(&dilated);
    let (w, h) = (map.width(), map.height());
    let masked = |r: usize, c: usize| lips.y.get(r, c) == 0;

    let mut max = 0.0f64;
    for r in 0..h {
        for c in 0..w {
            if !masked(r, c) && map.get(r, c) > max {
                max = map.get(r, c);
            }
        }
    }
    if max <= 0.0 {
        return Err(Error::extraction(
            stage,
            "corner map has no response in the lips window",
        ));
    }
    let half = max / 2.0;

    let scan = |cols: &mut dyn Iterator<Item = usize>| -> Option<(usize, usize)> {
        for c in cols {
            for r in 0..h {
                if !masked(r, c) && map.get(r, c) >= half {
                    return Some((r, c));
                }
            }
        }
        None
    };
    let left = scan(&mut (0..w)).expect("max > 0 guarantees a qualifying pixel");
    let right = scan(&mut (0..w).rev()).expect("max > 0 guarantees a qualifying pixel");
    let dr = left.0 as f64 - right.0 as f64;
    let dc = left.1 as f64 - right.1 as f64;
    Ok(MouthCorners {
        left,
        right,
        distance: dr.hypot(dc),
    })
}

/// Wrinkle intensity: the number of edge pixels the Canny detector finds in
/// the wrinkle window.
pub fn wrinkle_intensity(wr: &Plane<u8>, params: &CannyParams) -> Result<u32> {
    let edges = canny(wr, params)
        .map_err(|e| Error::extraction("wrinkle_intensity", e.to_string()))?;
    Ok(edges.samples().iter().filter(|&&v| v != 0).count() as u32)
}

/// Everything the end-to-end extractor produces, including the intermediate
/// planes for inspection and export.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub features: FeatureVector,
    pub eyes: EyePair,
    pub regions: FaceRegions,
    /// The masked, resized face all regions refer to.
    pub face: ColorImage,
    pub eye_map: Plane<f64>,
    pub mouth: MouthTrace,
    pub corners: MouthCorners,
    pub corner_map: Plane<f64>,
    /// Left-brow intermediates.
    pub brow_gray: Plane<u8>,
    pub brow_gradient: Plane<u8>,
    pub brow_edges: Plane<f64>,
    pub brow_line: BrowLine,
    pub wrinkle_canny: Plane<u8>,
}

/// Run the whole pipeline on a face crop and keep the intermediates.
pub fn extract_traced(face: &ColorImage, cfg: &Config) -> Result<Extraction> {
    let masked = apply_elliptic_mask(face, face.full_frame())
        .map_err(|e| Error::extraction("elliptic_mask", e.to_string()))?;
    let resized = resize_face(&masked);
    let chroma = to_ycbcr(&resized);

    let em = eye_map(&chroma);
    let eyes = locate_eyes(&em, cfg)?;
    let regions = derive_regions(&eyes, cfg)?;

    let lips = chroma
        .crop(regions.lips)
        .map_err(|e| Error::extraction("mouth_opening", e.to_string()))?;
    let mouth = mouth_opening_traced(&lips, cfg)?;
    let (_, mo) = mouth_opening_from_peaks(&mouth.peaks);

    let corners = mouth_corners(&lips, cfg)?;
    let corner_se = disk_se(cfg.se_radii.lip_dilate)
        .map_err(|e| Error::extraction("mouth_corners", e.to_string()))?;
    let corner_map_plane = corner_map(&dilate(&lips.y, &corner_se));

    let mut ebm_sum = 0.0;
    let mut ebc_sum = 0.0;
    let mut left_trace: Option<(Plane<u8>, Plane<u8>, Plane<f64>, BrowLine)> = None;
    for (i, rect) in [regions.left_brow, regions.right_brow].iter().enumerate() {
        let gray = chroma
            .y
            .crop(*rect)
            .map_err(|e| Error::extraction("eyebrow_mean", e.to_string()))?;
        let gradient_se = disk_se(cfg.se_radii.brow_gradient)
            .map_err(|e| Error::extraction("eyebrow_mean", e.to_string()))?;
        let grad = gradient_u8(&gray, &gradient_se);
        ebm_sum += ebm_from_gradient(&grad)?;
        let (edges, line, ebc) = dcl_from_gray(&gray, cfg)?;
        ebc_sum += ebc;
        if i == 0 {
            left_trace = Some((gray, grad, edges, line));
        }
    }
    let (brow_gray, brow_gradient, brow_edges, brow_line) =
        left_trace.expect("left brow is always processed");

    let wrinkle_gray = chroma
        .y
        .crop(regions.wrinkle)
        .map_err(|e| Error::extraction("wrinkle_intensity", e.to_string()))?;
    let wrinkle_edges = canny(&wrinkle_gray, &cfg.canny)
        .map_err(|e| Error::extraction("wrinkle_intensity", e.to_string()))?;
    let w = wrinkle_edges.samples().iter().filter(|&&v| v != 0).count() as f64;

    let features = FeatureVector {
        mo,
        lc: corners.distance,
        w,
        ebc: ebc_sum / 2.0,
        ebm: ebm_sum / 2.0,
    };
    Ok(Extraction {
        features,
        eyes,
        regions,
        face: resized,
        eye_map: em,
        mouth,
        corners,
        corner_map: corner_map_plane,
        brow_gray,
        brow_gradient,
        brow_edges,
        brow_line,
        wrinkle_canny: wrinkle_edges,
    })
}

/// Run the whole pipeline on a face crop: elliptic mask, resize, chroma
/// conversion, eye localization, region derivation, then the five
/// extractors. Brow features are averaged over the two brow windows.
pub fn extract_features(face: &ColorImage, cfg: &Config) -> Result<FeatureVector> {
    extract_traced(face, cfg).map(|e| e.features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_plane(w: usize, h: usize, v: f64) -> Plane<f64> {
        Plane::new(w, h, v)
    }

    #[test]
    fn n_uniform_closed_form() {
        for &c in &[0.25, 0.5, 1.0] {
            let cr = unit_plane(8, 8, c);
            let cb = unit_plane(8, 8, c);
            let n = compute_n_from_unit(&cr, &cb);
            assert!((n - 0.95 * c * c).abs() < 1e-12, "c = {c}: n = {n}");
        }
    }

    #[test]
    fn n_checkerboard() {
        let cr = Plane::from_fn(8, 8, |r, c| if (r + c) % 2 == 0 { 0.4 } else { 0.8 });
        let cb = unit_plane(8, 8, 0.5);
        let n = compute_n_from_unit(&cr, &cb);
        assert!((n - 0.95 * 0.40 / 1.2).abs() < 1e-12);
    }

    #[test]
    fn n_via_u8_chroma() {
        // Uniform cr = cb = 204 means c = 0.8 exactly.
        let lips = ChromaImage {
            y: Plane::new(4, 4, 100),
            cb: Plane::new(4, 4, 204),
            cr: Plane::new(4, 4, 204),
        };
        let c = 204.0 / 255.0;
        assert!((compute_n(&lips) - 0.95 * c * c).abs() < 1e-12);
    }

    #[test]
    fn mouth_map_uniform_closed_form() {
        for &c in &[0.25, 0.5, 1.0] {
            let cr = unit_plane(6, 6, c);
            let cb = unit_plane(6, 6, c);
            let m = mouth_map_raw_from_unit(&cr, &cb);
            let expect = 0.0025 * c.powi(6);
            for &v in m.samples() {
                assert!((v - expect).abs() < 1e-12, "c = {c}: {v} vs {expect}");
            }
        }
    }

    #[test]
    fn mouth_map_zero_cr_is_zero() {
        let cr = unit_plane(4, 4, 0.0);
        let cb = unit_plane(4, 4, 0.5);
        assert!(mouth_map_raw_from_unit(&cr, &cb)
            .samples()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn mouth_map_lip_brighter_than_skin() {
        // Left half lip-like (cr 0.8, cb 0.5), right half skin (cr 0.6, cb 0.6).
        let cr = Plane::from_fn(16, 8, |_, c| if c < 8 { 0.8 } else { 0.6 });
        let cb = Plane::from_fn(16, 8, |_, c| if c < 8 { 0.5 } else { 0.6 });
        let m = mouth_map_raw_from_unit(&cr, &cb);
        assert!(m.get(4, 2) > m.get(4, 12));
    }

    /// Lips-like chroma patch: skin background with soft high-`cr` bands.
    fn lips_patch(h: usize, w: usize, band_rows: &[f64]) -> ChromaImage {
        let skin = (157.0, 103.0, 184.0); // (cr, cb, y)
        let lip = (191.0, 140.0, 70.0);
        let sigma = 4.0;
        let mut y = Plane::new(w, h, 0u8);
        let mut cb = Plane::new(w, h, 0u8);
        let mut cr = Plane::new(w, h, 0u8);
        for r in 0..h {
            let mut weight: f64 = 0.0;
            for &b in band_rows {
                let d = r as f64 - b;
                weight = weight.max((-d * d / (2.0 * sigma * sigma)).exp());
            }
            for c in 0..w {
                let edge = 20.0;
                let horiz = ((c as f64).min(w as f64 - 1.0 - c as f64) / edge).clamp(0.0, 1.0);
                let t = weight * horiz;
                cr.set(r, c, (skin.0 + t * (lip.0 - skin.0)).round() as u8);
                cb.set(r, c, (skin.1 + t * (lip.1 - skin.1)).round() as u8);
                y.set(r, c, (skin.2 + t * (lip.2 - skin.2)).round() as u8);
            }
        }
        ChromaImage { y, cb, cr }
    }

    #[test]
    fn mouth_opening_two_bands() {
        let cfg = Config::default();
        for sep in [20.0, 40.0, 60.0] {
            let mid = 66.0;
            let patch = lips_patch(132, 281, &[mid - sep / 2.0, mid + sep / 2.0]);
            let (peaks, mo) = mouth_opening(&patch, &cfg).unwrap();
            assert_eq!(peaks, 2, "separation {sep}");
            assert!(
                (mo - sep).abs() <= cfg.smoothing.window as f64 / 2.0,
                "separation {sep}: mo = {mo}"
            );
        }
    }

    #[test]
    fn mouth_opening_single_band_is_closed() {
        let cfg = Config::default();
        let patch = lips_patch(132, 281, &[66.0]);
        let (peaks, mo) = mouth_opening(&patch, &cfg).unwrap();
        assert_eq!(peaks, 1);
        assert_eq!(mo, 0.0);
    }

    #[test]
    fn mouth_opening_blank_skin() {
        let cfg = Config::default();
        let patch = lips_patch(132, 281, &[]);
        let (peaks, mo) = mouth_opening(&patch, &cfg).unwrap();
        assert_eq!(peaks, 0);
        assert_eq!(mo, 0.0);
    }

    #[test]
    fn ebm_single_row_band() {
        let mut g = Plane::new(10, 20, 0u8);
        for c in 0..10 {
            g.set(14, c, 200);
        }
        let ebm = ebm_from_gradient(&g).unwrap();
        assert!((ebm - 0.7).abs() < 1e-12);
    }

    #[test]
    fn ebm_top_row_is_zero() {
        let mut g = Plane::new(10, 20, 0u8);
        for c in 0..10 {
            g.set(0, c, 200);
        }
        assert_eq!(ebm_from_gradient(&g).unwrap(), 0.0);
    }

    #[test]
    fn ebm_uniform_window_fails() {
        let brow = Plane::new(30, 20, 180u8);
        let err = eyebrow_mean_mgii(&brow, &Config::default()).unwrap_err();
        assert_eq!(err.stage(), Some("eyebrow_mean"));
    }

    fn line_of(heights: &[usize]) -> BrowLine {
        BrowLine {
            heights: heights.iter().map(|&h| Some(h)).collect(),
        }
    }

    #[test]
    fn curvature_flat_ramp_and_v() {
        assert_eq!(curvature_from_line(&line_of(&[5, 5, 5, 5, 5])).unwrap(), 0.0);
        assert_eq!(curvature_from_line(&line_of(&[0, 1, 2, 3, 4])).unwrap(), 0.8);
        assert_eq!(curvature_from_line(&line_of(&[2, 1, 0, 1, 2])).unwrap(), 0.8);
    }

    #[test]
    fn curvature_skips_absent_columns() {
        let line = BrowLine {
            heights: vec![Some(3), None, Some(5), Some(5), None, Some(1)],
        };
        // Differences over present points: |5-3| + |5-5| + |1-5| = 6; 4 points.
        assert_eq!(curvature_from_line(&line).unwrap(), 1.5);
    }

    #[test]
    fn curvature_needs_two_points() {
        let line = BrowLine {
            heights: vec![None, Some(4), None],
        };
        assert!(curvature_from_line(&line).is_err());
    }

    proptest! {
        #[test]
        fn curvature_invariant_under_translation_and_mirror(
            heights in proptest::collection::vec(0usize..40, 2..60),
            shift in 0usize..20,
        ) {
            let base = curvature_from_line(&line_of(&heights)).unwrap();
            let shifted: Vec<usize> = heights.iter().map(|&h| h + shift).collect();
            let mirrored: Vec<usize> = heights.iter().rev().cloned().collect();
            prop_assert!((curvature_from_line(&line_of(&shifted)).unwrap() - base).abs() < 1e-12);
            prop_assert!((curvature_from_line(&line_of(&mirrored)).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn dcl_flat_stroke_is_low_v_stroke_is_high() {
        let cfg = Config::default();
        // 60x40 windows with a 6-row-thick dark stroke on light background.
        let flat = ColorImage::from_pixels(
            60,
            40,
            (0..40 * 60)
                .map(|i| {
                    let (r, c) = (i / 60, i % 60);
                    if (15..21).contains(&r) && (5..55).contains(&c) {
                        [40, 25, 15]
                    } else {
                        [224, 172, 140]
                    }
                })
                .collect(),
        );
        let flat_n = eyebrow_curvature_dcl(&flat, &cfg).unwrap();
        assert!(flat_n < 0.3, "flat stroke curvature {flat_n}");

        let v = ColorImage::from_pixels(
            60,
            40,
            (0..40 * 60)
                .map(|i| {
                    let (r, c) = (i / 60, i % 60);
                    let apex = (c as i64 - 30).unsigned_abs() as usize / 2 + 10;
                    if (5..55).contains(&c) && (apex..apex + 6).contains(&r) {
                        [40, 25, 15]
                    } else {
                        [224, 172, 140]
                    }
                })
                .collect(),
        );
        let v_n = eyebrow_curvature_dcl(&v, &cfg).unwrap();
        assert!(v_n > 0.35, "v stroke curvature {v_n}");
    }

    #[test]
    fn corner_map_formula_and_monotonicity() {
        let p = Plane::from_samples(4, 1, vec![0u8, 51, 204, 255]);
        let m = corner_map(&p);
        assert_eq!(m.get(0, 0), 1.0);
        assert!((m.get(0, 1) - (0.8f64).powi(6)).abs() < 1e-12);
        assert!((m.get(0, 2) - (0.2f64).powi(6)).abs() < 1e-12);
        assert_eq!(m.get(0, 3), 0.0);
        assert!(m.get(0, 0) > m.get(0, 1));
        assert!(m.get(0, 1) > m.get(0, 2));
    }

    /// Luminance-only lips window: dark bar spanning the given columns.
    fn corner_patch(span_start: usize, span_end: usize) -> ChromaImage {
        let (w, h) = (281, 132);
        let ramp = 12.0;
        let y = Plane::from_fn(w, h, |r, c| {
            let horiz = if c < span_start {
                1.0 - (span_start as f64 - c as f64) / ramp
            } else if c > span_end {
                1.0 - (c as f64 - span_end as f64) / ramp
            } else {
                1.0
            }
            .clamp(0.0, 1.0);
            let vert = if (50..=80).contains(&r) {
                1.0
            } else if r < 50 {
                1.0 - (50.0 - r as f64) / 6.0
            } else {
                1.0 - (r as f64 - 80.0) / 6.0
            }
            .clamp(0.0, 1.0);
            let darkness = horiz * vert;
            (184.0 - darkness * 114.0).round() as u8
        });
        ChromaImage {
            cb: Plane::new(w, h, 103),
            cr: Plane::new(w, h, 157),
            y,
        }
    }

    #[test]
    fn corners_recover_bar_span() {
        let cfg = Config::default();
        for span in [40usize, 80, 120] {
            let start = 140 - span / 2;
            let end = 140 + span / 2;
            let patch = corner_patch(start, end);
            let corners = mouth_corners(&patch, &cfg).unwrap();
            assert!(
                (corners.distance - span as f64).abs() <= 4.0,
                "span {span}: lc = {}",
                corners.distance
            );
            assert!((corners.left.1 as f64 - start as f64).abs() <= 2.0);
            assert!((corners.right.1 as f64 - end as f64).abs() <= 2.0);
        }
    }

    #[test]
    fn corners_mirror_invariant() {
        let cfg = Config::default();
        let patch = corner_patch(90, 170);
        let base = mouth_corners(&patch, &cfg).unwrap();
        let mirrored = ChromaImage {
            y: patch.y.mirror_horizontal(),
            cb: patch.cb.mirror_horizontal(),
            cr: patch.cr.mirror_horizontal(),
        };
        let m = mouth_corners(&mirrored, &cfg).unwrap();
        assert!((m.distance - base.distance).abs() < 1e-9);
        assert_eq!(m.left.1, patch.y.width() - 1 - base.right.1);
        assert_eq!(m.right.1, patch.y.width() - 1 - base.left.1);
    }

    #[test]
    fn corners_fail_on_uniform_white() {
        let cfg = Config::default();
        let patch = ChromaImage {
            y: Plane::new(40, 30, 255),
            cb: Plane::new(40, 30, 128),
            cr: Plane::new(40, 30, 128),
        };
        let err = mouth_corners(&patch, &cfg).unwrap_err();
        assert_eq!(err.stage(), Some("mouth_corners"));
    }

    /// Wrinkle window with `n` dark horizontal furrows of length `len`.
    /// Returns the window and the furrow boundary length the construction
    /// implies (two edges per furrow).
    pub(crate) fn furrow_patch(n: usize, len: usize) -> (Plane<u8>, usize) {
        let (w, h) = (100, 76);
        let mut p = Plane::new(w, h, 184u8);
        let x0 = (w - len) / 2;
        for i in 0..n {
            let row = 14 + i * 16;
            for c in x0..x0 + len {
                for (dr, v) in [(0, 120u8), (1, 90), (2, 90), (3, 90), (4, 120)] {
                    p.set(row + dr, c, v);
                }
            }
        }
        (p, 2 * n * len)
    }

    #[test]
    fn wrinkles_constant_window_is_zero() {
        let p = Plane::new(100, 76, 184u8);
        assert_eq!(wrinkle_intensity(&p, &CannyParams::default()).unwrap(), 0);
    }

    #[test]
    fn wrinkles_count_matches_boundary_length() {
        let (p, expected) = furrow_patch(3, 40);
        let w = wrinkle_intensity(&p, &CannyParams::default()).unwrap() as f64;
        let expected = expected as f64;
        assert!(
            (w - expected).abs() <= 0.2 * expected,
            "w = {w}, expected about {expected}"
        );
    }

    #[test]
    fn wrinkles_monotone_in_furrows() {
        let (p3, _) = furrow_patch(3, 40);
        let (p4, _) = furrow_patch(4, 40);
        let params = CannyParams::default();
        assert!(
            wrinkle_intensity(&p4, &params).unwrap() > wrinkle_intensity(&p3, &params).unwrap()
        );
    }
}
