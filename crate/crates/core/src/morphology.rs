//! Binary and grayscale morphological operators.
//!
//! Boundary policy: dilation treats out-of-bounds samples as the minimum
//! value (0), erosion as the maximum representable value (255 for 8-bit
//! planes, +inf for real planes). This keeps the erosion/dilation duality
//! exact on full-range planes.

use crate::error::{Error, Result};
use crate::exec::process_rows;
use crate::raster::{Plane, Sample};

/// A flat structuring element: a binary mask with an origin cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    width: usize,
    height: usize,
    mask: Vec<bool>,
    origin: (usize, usize),
    /// (dr, dc) of every true cell relative to the origin.
    offsets: Vec<(i64, i64)>,
}

impl StructuringElement {
    pub fn new(width: usize, height: usize, mask: Vec<bool>, origin: (usize, usize)) -> Self {
        assert_eq!(mask.len(), width * height, "mask size mismatch");
        assert!(origin.0 < height && origin.1 < width, "origin outside grid");
        assert!(mask.iter().any(|&m| m), "mask must have at least one true cell");
        let mut offsets = Vec::new();
        for r in 0..height {
            for c in 0..width {
                if mask[r * width + c] {
                    offsets.push((r as i64 - origin.0 as i64, c as i64 - origin.1 as i64));
                }
            }
        }
        StructuringElement {
            width,
            height,
            mask,
            origin,
            offsets,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn origin(&self) -> (usize, usize) {
        self.origin
    }

    pub fn offsets(&self) -> &[(i64, i64)] {
        &self.offsets
    }

    pub fn true_cell_count(&self) -> usize {
        self.offsets.len()
    }

    /// 180-degree rotation about the origin.
    pub fn reflect(&self) -> StructuringElement {
        let mut mask = vec![false; self.mask.len()];
        for r in 0..self.height {
            for c in 0..self.width {
                mask[r * self.width + c] =
                    self.mask[(self.height - 1 - r) * self.width + (self.width - 1 - c)];
            }
        }
        let origin = (
            self.height - 1 - self.origin.0,
            self.width - 1 - self.origin.1,
        );
        StructuringElement::new(self.width, self.height, mask, origin)
    }
}

/// Disk ("spherical") structuring element: cells whose center lies within
/// `radius` of the origin under the Euclidean metric.
pub fn disk_se(radius: usize) -> Result<StructuringElement> {
    if radius < 1 {
        return Err(Error::InvalidArgument(
            "disk structuring element radius must be >= 1".into(),
        ));
    }
    let side = 2 * radius + 1;
    let r2 = (radius * radius) as i64;
    let mut mask = vec![false; side * side];
    for r in 0..side {
        for c in 0..side {
            let dr = r as i64 - radius as i64;
            let dc = c as i64 - radius as i64;
            mask[r * side + c] = dr * dr + dc * dc <= r2;
        }
    }
    Ok(StructuringElement::new(side, side, mask, (radius, radius)))
}

/// Per-pixel maximum over the reflected SE footprint; out-of-bounds reads 0.
pub fn dilate<T: Sample>(p: &Plane<T>, se: &StructuringElement) -> Plane<T> {
    let (w, h) = (p.width(), p.height());
    let mut out = Plane::new(w, h, T::PAD_MIN);
    let offsets = se.offsets();
    process_rows(out.samples_mut(), w, |r, row| {
        for (c, dst) in row.iter_mut().enumerate() {
            let mut best = T::PAD_MIN;
            for &(dr, dc) in offsets {
                let v = p.get_padded(r as i64 - dr, c as i64 - dc, T::PAD_MIN);
                if v > best {
                    best = v;
                }
            }
            *dst = best;
        }
    });
    out
}

/// Per-pixel minimum over the SE footprint; out-of-bounds reads the maximum
/// representable value.
pub fn erode<T: Sample>(p: &Plane<T>, se: &StructuringElement) -> Plane<T> {
    let (w, h) = (p.width(), p.height());
    let mut out = Plane::new(w, h, T::PAD_MAX);
    let offsets = se.offsets();
    process_rows(out.samples_mut(), w, |r, row| {
        for (c, dst) in row.iter_mut().enumerate() {
            let mut best = T::PAD_MAX;
            for &(dr, dc) in offsets {
                let v = p.get_padded(r as i64 + dr, c as i64 + dc, T::PAD_MAX);
                if v < best {
                    best = v;
                }
            }
            *dst = best;
        }
    });
    out
}

/// Morphological opening: erosion followed by dilation.
pub fn open<T: Sample>(p: &Plane<T>, se: &StructuringElement) -> Plane<T> {
    dilate(&erode(p, se), se)
}

/// Morphological gradient: dilation minus erosion, saturating at 0.
pub fn gradient_u8(p: &Plane<u8>, se: &StructuringElement) -> Plane<u8> {
    let d = dilate(p, se);
    let e = erode(p, se);
    let samples = d
        .samples()
        .iter()
        .zip(e.samples())
        .map(|(&a, &b)| a.saturating_sub(b))
        .collect();
    Plane::from_samples(p.width(), p.height(), samples)
}

/// Morphological gradient on a real plane, clamped below at 0.
pub fn gradient_f64(p: &Plane<f64>, se: &StructuringElement) -> Plane<f64> {
    let d = dilate(p, se);
    let e = erode(p, se);
    let samples = d
        .samples()
        .iter()
        .zip(e.samples())
        .map(|(&a, &b)| (a - b).max(0.0))
        .collect();
    Plane::from_samples(p.width(), p.height(), samples)
}
