//! Image containers, color-space conversion, and geometric preprocessing.

use crate::error::{Error, Result};
use crate::exec::process_rows;

/// Width of the canonical face frame in pixels (columns).
pub const FACE_WIDTH: usize = 281;
/// Height of the canonical face frame in pixels (rows).
pub const FACE_HEIGHT: usize = 381;

/// Scalar sample stored in a [`Plane`].
///
/// `u8` planes carry 8-bit image data; `f64` planes carry unit-interval or
/// gradient-magnitude maps. `PAD_MIN`/`PAD_MAX` are the out-of-bounds fills
/// used by dilation and erosion respectively.
pub trait Sample: Copy + PartialOrd + Send + Sync + 'static {
    const PAD_MIN: Self;
    const PAD_MAX: Self;
    /// Divisor that maps samples onto `[0, 1]` (255 for 8-bit, 1 for real).
    const NORM: f64;
    fn to_f64(self) -> f64;
}

impl Sample for u8 {
    const PAD_MIN: Self = 0;
    const PAD_MAX: Self = u8::MAX;
    const NORM: f64 = 255.0;
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Sample for f64 {
    const PAD_MIN: Self = 0.0;
    const PAD_MAX: Self = f64::INFINITY;
    const NORM: f64 = 1.0;
    fn to_f64(self) -> f64 {
        self
    }
}

/// A single-channel 2-D grid of scalar samples in row-major order.
///
/// The universal intermediate of every kernel: chroma maps, edge images,
/// binary masks, and morphology all flow through planes.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane<T> {
    width: usize,
    height: usize,
    samples: Vec<T>,
}

impl<T: Sample> Plane<T> {
    pub fn new(width: usize, height: usize, fill: T) -> Self {
        assert!(width >= 1 && height >= 1, "plane dimensions must be >= 1");
        Plane {
            width,
            height,
            samples: vec![fill; width * height],
        }
    }

    pub fn from_samples(width: usize, height: usize, samples: Vec<T>) -> Self {
        assert!(width >= 1 && height >= 1, "plane dimensions must be >= 1");
        assert_eq!(samples.len(), width * height, "sample count mismatch");
        Plane {
            width,
            height,
            samples,
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                samples.push(f(r, c));
            }
        }
        Plane::from_samples(width, height, samples)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        debug_assert!(row < self.height && col < self.width);
        self.samples[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: T) {
        debug_assert!(row < self.height && col < self.width);
        self.samples[row * self.width + col] = v;
    }

    /// Sample at signed coordinates, yielding `pad` outside the plane.
    #[inline]
    pub fn get_padded(&self, row: i64, col: i64, pad: T) -> T {
        if row < 0 || col < 0 || row >= self.height as i64 || col >= self.width as i64 {
            pad
        } else {
            self.samples[row as usize * self.width + col as usize]
        }
    }

    #[inline]
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    #[inline]
    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        &self.samples[r * self.width..(r + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.samples.chunks(self.width)
    }

    /// Maximum sample value, by partial order.
    pub fn max_sample(&self) -> T {
        let mut m = self.samples[0];
        for &v in &self.samples[1..] {
            if v > m {
                m = v;
            }
        }
        m
    }

    pub fn crop(&self, r: Rect) -> Result<Plane<T>> {
        r.check_within(self.width, self.height)?;
        let mut samples = Vec::with_capacity(r.w * r.h);
        for row in r.y0..r.y0 + r.h {
            let start = row * self.width + r.x0;
            samples.extend_from_slice(&self.samples[start..start + r.w]);
        }
        Ok(Plane::from_samples(r.w, r.h, samples))
    }

    /// Flip left-right. Used by symmetry tests and the synthetic corpus.
    pub fn mirror_horizontal(&self) -> Plane<T> {
        Plane::from_fn(self.width, self.height, |r, c| {
            self.get(r, self.width - 1 - c)
        })
    }

    pub fn transpose(&self) -> Plane<T> {
        Plane::from_fn(self.height, self.width, |r, c| self.get(c, r))
    }

    /// Pointwise conversion to a real-valued plane.
    pub fn to_f64(&self) -> Plane<f64> {
        Plane {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|v| v.to_f64()).collect(),
        }
    }
}

impl Plane<f64> {
    /// Rescale so the plane maximum maps to 1. A non-positive maximum leaves
    /// the plane unchanged.
    pub fn rescale_max_to_unit(mut self) -> Plane<f64> {
        let m = self.max_sample();
        if m > 0.0 {
            for v in &mut self.samples {
                *v /= m;
            }
        }
        self
    }

    /// Quantize a unit-interval plane to 8 bits for export.
    pub fn to_u8_clamped(&self) -> Plane<u8> {
        Plane {
            width: self.width,
            height: self.height,
            samples: self
                .samples
                .iter()
                .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
                .collect(),
        }
    }
}

/// An axis-aligned pixel rectangle: offset (`x0`, `y0`) = (col, row), extent `w` x `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x0: usize,
    pub y0: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x0: usize, y0: usize, w: usize, h: usize) -> Self {
        Rect { x0, y0, w, h }
    }

    pub fn check_within(&self, width: usize, height: usize) -> Result<()> {
        if self.w < 1
            || self.h < 1
            || self.x0 + self.w > width
            || self.y0 + self.h > height
        {
            return Err(Error::RectOutOfBounds {
                rect: *self,
                width,
                height,
            });
        }
        Ok(())
    }

    /// Rect of `inner` expressed in the parent frame of `self`.
    /// `crop(crop(img, a), b) == crop(img, a.compose(b))`.
    pub fn compose(&self, inner: Rect) -> Rect {
        Rect {
            x0: self.x0 + inner.x0,
            y0: self.y0 + inner.y0,
            w: inner.w,
            h: inner.h,
        }
    }
}

/// An 8-bit RGB image in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl ColorImage {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        ColorImage {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        assert_eq!(pixels.len(), width * height, "pixel count mismatch");
        ColorImage {
            width,
            height,
            pixels,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, px: [u8; 3]) {
        self.pixels[row * self.width + col] = px;
    }

    #[inline]
    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn crop(&self, r: Rect) -> Result<ColorImage> {
        r.check_within(self.width, self.height)?;
        let mut pixels = Vec::with_capacity(r.w * r.h);
        for row in r.y0..r.y0 + r.h {
            let start = row * self.width + r.x0;
            pixels.extend_from_slice(&self.pixels[start..start + r.w]);
        }
        Ok(ColorImage::from_pixels(r.w, r.h, pixels))
    }

    pub fn mirror_horizontal(&self) -> ColorImage {
        let mut out = self.clone();
        for r in 0..self.height {
            for c in 0..self.width {
                out.set(r, c, self.get(r, self.width - 1 - c));
            }
        }
        out
    }

    pub fn full_frame(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }
}

/// Y/Cb/Cr planes of a color face image, all 8-bit and equally sized.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromaImage {
    pub y: Plane<u8>,
    pub cb: Plane<u8>,
    pub cr: Plane<u8>,
}

impl ChromaImage {
    #[inline]
    pub fn width(&self) -> usize {
        self.y.width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.y.height()
    }

    pub fn crop(&self, r: Rect) -> Result<ChromaImage> {
        Ok(ChromaImage {
            y: self.y.crop(r)?,
            cb: self.cb.crop(r)?,
            cr: self.cr.crop(r)?,
        })
    }
}

/// Full-range BT.601-style RGB -> YCbCr conversion, rounded to nearest and
/// clamped to `[0, 255]`. Achromatic pixels map to Cb = Cr = 128.
pub fn to_ycbcr(img: &ColorImage) -> ChromaImage {
    let (w, h) = (img.width(), img.height());
    let mut triples = vec![[0u8; 3]; w * h];
    process_rows(&mut triples, w, |r, row| {
        for (c, out) in row.iter_mut().enumerate() {
            let [red, green, blue] = img.get(r, c);
            let (red, green, blue) = (red as f64, green as f64, blue as f64);
            let luma = 0.299 * red + 0.587 * green + 0.114 * blue;
            out[0] = luma.round().clamp(0.0, 255.0) as u8;
            out[1] = (128.0 + 0.564 * (blue - luma)).round().clamp(0.0, 255.0) as u8;
            out[2] = (128.0 + 0.713 * (red - luma)).round().clamp(0.0, 255.0) as u8;
        }
    });

    ChromaImage {
        y: Plane::from_samples(w, h, triples.iter().map(|t| t[0]).collect()),
        cb: Plane::from_samples(w, h, triples.iter().map(|t| t[1]).collect()),
        cr: Plane::from_samples(w, h, triples.iter().map(|t| t[2]).collect()),
    }
}

/// Inverse of [`to_ycbcr`] for synthesizing pixels with chosen chroma.
/// Channels are rounded and clamped, so extreme targets may not round-trip.
pub fn ycbcr_to_rgb(y: f64, cb: f64, cr: f64) -> [u8; 3] {
    let r = y + (cr - 128.0) / 0.713;
    let b = y + (cb - 128.0) / 0.564;
    let g = (y - 0.299 * r - 0.114 * b) / 0.587;
    [
        r.round().clamp(0.0, 255.0) as u8,
        g.round().clamp(0.0, 255.0) as u8,
        b.round().clamp(0.0, 255.0) as u8,
    ]
}

/// Black out pixels outside the axis-aligned ellipse inscribed in `face`.
/// Pixels inside the ellipse are left untouched, so the mask is idempotent.
pub fn apply_elliptic_mask(img: &ColorImage, face: Rect) -> Result<ColorImage> {
    face.check_within(img.width(), img.height())?;
    let a = face.w as f64 / 2.0;
    let b = face.h as f64 / 2.0;
    let cx = face.x0 as f64 + a;
    let cy = face.y0 as f64 + b;

    let mut out = img.clone();
    let w = out.width;
    process_rows(&mut out.pixels, w, |r, row| {
        let dy = (r as f64 + 0.5 - cy) / b;
        for (c, px) in row.iter_mut().enumerate() {
            let dx = (c as f64 + 0.5 - cx) / a;
            if dx * dx + dy * dy > 1.0 {
                *px = [0, 0, 0];
            }
        }
    });
    Ok(out)
}

/// Resize to the canonical 381x281 (rows x columns) face frame with bilinear
/// interpolation. Source corners map to destination corners, so an input
/// already at the target size passes through pixel-for-pixel.
pub fn resize_face(img: &ColorImage) -> ColorImage {
    resize_bilinear(img, FACE_WIDTH, FACE_HEIGHT)
}

pub fn resize_bilinear(img: &ColorImage, dst_w: usize, dst_h: usize) -> ColorImage {
    let (sw, sh) = (img.width(), img.height());
    let x_ratio = if dst_w > 1 {
        (sw - 1) as f64 / (dst_w - 1) as f64
    } else {
        0.0
    };
    let y_ratio = if dst_h > 1 {
        (sh - 1) as f64 / (dst_h - 1) as f64
    } else {
        0.0
    };

    let mut out = ColorImage::new(dst_w, dst_h, [0, 0, 0]);
    process_rows(&mut out.pixels, dst_w, |r, row| {
        let sy = r as f64 * y_ratio;
        let y0 = sy.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let ty = sy - y0 as f64;
        for (c, px) in row.iter_mut().enumerate() {
            let sx = c as f64 * x_ratio;
            let x0 = sx.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let tx = sx - x0 as f64;

            let p00 = img.get(y0, x0);
            let p01 = img.get(y0, x1);
            let p10 = img.get(y1, x0);
            let p11 = img.get(y1, x1);
            for ch in 0..3 {
                let top = (1.0 - tx) * p00[ch] as f64 + tx * p01[ch] as f64;
                let bot = (1.0 - tx) * p10[ch] as f64 + tx * p11[ch] as f64;
                px[ch] = ((1.0 - ty) * top + ty * bot).round().clamp(0.0, 255.0) as u8;
            }
        }
    });
    out
}
