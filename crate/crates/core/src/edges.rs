//! Edge detection and the 1-D signal utilities shared by the mouth,
//! eyebrow, and wrinkle pipelines.

use crate::error::{Error, Result};
use crate::exec::process_rows;
use crate::raster::{Plane, Sample};

/// Canny parameters. The thresholds are fractions of the per-image maximum
/// gradient magnitude, so they adapt to the dynamic range of each region.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CannyParams {
    pub low_threshold: f64,
    pub high_threshold: f64,
    pub gaussian_sigma: f64,
}

impl Default for CannyParams {
    fn default() -> Self {
        CannyParams {
            low_threshold: 0.1,
            high_threshold: 0.25,
            gaussian_sigma: 1.4,
        }
    }
}

impl CannyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.low_threshold > 0.0 && self.low_threshold < self.high_threshold) {
            return Err(Error::InvalidArgument(format!(
                "canny thresholds must satisfy 0 < low < high, got low={} high={}",
                self.low_threshold, self.high_threshold
            )));
        }
        if !(self.gaussian_sigma > 0.0) {
            return Err(Error::InvalidArgument(
                "canny gaussian sigma must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Which side of the threshold becomes foreground in [`binarize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Polarity {
    /// Values below the threshold become foreground (dark eyebrows on skin).
    DarkForeground,
    /// Values at or above the threshold become foreground.
    LightForeground,
}

/// Local maxima of a 1-D signal with their positions in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSet {
    pub positions: Vec<usize>,
    pub heights: Vec<f64>,
}

impl PeakSet {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Positions of the two tallest peaks (taller first; ties resolved by
    /// earlier position). `None` with fewer than two peaks.
    pub fn two_tallest(&self) -> Option<(usize, usize)> {
        if self.len() < 2 {
            return None;
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.heights[b]
                .partial_cmp(&self.heights[a])
                .unwrap()
                .then(self.positions[a].cmp(&self.positions[b]))
        });
        Some((self.positions[order[0]], self.positions[order[1]]))
    }
}

// The kernels are evaluated as paired differences so that flat regions
// cancel exactly instead of leaving accumulation-order rounding residue.
fn sobel_pair(p: &Plane<f64>) -> (Plane<f64>, Plane<f64>) {
    let (w, h) = (p.width(), p.height());
    let mut gx = Plane::new(w, h, 0.0);
    let mut gy = Plane::new(w, h, 0.0);
    process_rows(gx.samples_mut(), w, |r, row| {
        if r == 0 || r == h - 1 {
            return;
        }
        for c in 1..w - 1 {
            // [-1 0 1; -2 0 2; -1 0 1]
            row[c] = (p.get(r - 1, c + 1) - p.get(r - 1, c - 1))
                + 2.0 * (p.get(r, c + 1) - p.get(r, c - 1))
                + (p.get(r + 1, c + 1) - p.get(r + 1, c - 1));
        }
    });
    process_rows(gy.samples_mut(), w, |r, row| {
        if r == 0 || r == h - 1 {
            return;
        }
        for c in 1..w - 1 {
            // [-1 -2 -1; 0 0 0; 1 2 1]
            let top = p.get(r - 1, c - 1) + 2.0 * p.get(r - 1, c) + p.get(r - 1, c + 1);
            let bottom = p.get(r + 1, c - 1) + 2.0 * p.get(r + 1, c) + p.get(r + 1, c + 1);
            row[c] = bottom - top;
        }
    });
    (gx, gy)
}

/// Gradient magnitude `sqrt(Gx^2 + Gy^2)` with the standard 3x3 Sobel
/// kernels. Border pixels are 0.
pub fn sobel_magnitude<T: Sample>(p: &Plane<T>) -> Result<Plane<f64>> {
    if p.width() < 3 || p.height() < 3 {
        return Err(Error::InvalidArgument(format!(
            "sobel requires a plane of at least 3x3, got {}x{}",
            p.width(),
            p.height()
        )));
    }
    let pf = p.to_f64();
    let (gx, gy) = sobel_pair(&pf);
    let samples = gx
        .samples()
        .iter()
        .zip(gy.samples())
        .map(|(&x, &y)| x.hypot(y))
        .collect();
    Ok(Plane::from_samples(p.width(), p.height(), samples))
}

/// Separable Gaussian blur with kernel radius `ceil(3 sigma)` and replicated
/// borders, in f64 throughout.
pub fn gaussian_blur<T: Sample>(p: &Plane<T>, sigma: f64) -> Plane<f64> {
    let pf = p.to_f64();
    if sigma <= 0.0 {
        return pf;
    }
    let radius = (3.0 * sigma).ceil().max(1.0) as i64;
    let mut kernel = Vec::with_capacity(2 * radius as usize + 1);
    for i in -radius..=radius {
        kernel.push((-((i * i) as f64) / (2.0 * sigma * sigma)).exp());
    }
    let norm: f64 = kernel.iter().sum();
    for k in &mut kernel {
        *k /= norm;
    }

    let (w, h) = (p.width(), p.height());
    let clamp_r = |v: i64| v.clamp(0, h as i64 - 1) as usize;
    let clamp_c = |v: i64| v.clamp(0, w as i64 - 1) as usize;

    let mut horiz = Plane::new(w, h, 0.0);
    process_rows(horiz.samples_mut(), w, |r, row| {
        for (c, dst) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &k) in kernel.iter().enumerate() {
                acc += k * pf.get(r, clamp_c(c as i64 + i as i64 - radius));
            }
            *dst = acc;
        }
    });
    let mut out = Plane::new(w, h, 0.0);
    process_rows(out.samples_mut(), w, |r, row| {
        for (c, dst) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (i, &k) in kernel.iter().enumerate() {
                acc += k * horiz.get(clamp_r(r as i64 + i as i64 - radius), c);
            }
            *dst = acc;
        }
    });
    out
}

/// Blurred gradient magnitude, the quantity Canny thresholds against.
pub fn canny_gradient<T: Sample>(p: &Plane<T>, sigma: f64) -> Result<Plane<f64>> {
    sobel_magnitude(&gaussian_blur(p, sigma))
}

/// Classic Canny detector: Gaussian blur, Sobel gradient, non-maximum
/// suppression, double-threshold hysteresis. Output is binary (0/255).
pub fn canny<T: Sample>(p: &Plane<T>, params: &CannyParams) -> Result<Plane<u8>> {
    params.validate()?;
    if p.width() < 5 || p.height() < 5 {
        return Err(Error::InvalidArgument(format!(
            "canny requires a plane of at least 5x5, got {}x{}",
            p.width(),
            p.height()
        )));
    }
    let blurred = gaussian_blur(p, params.gaussian_sigma);
    let (gx, gy) = sobel_pair(&blurred);
    let mag = Plane::from_samples(
        p.width(),
        p.height(),
        gx.samples()
            .iter()
            .zip(gy.samples())
            .map(|(&x, &y)| x.hypot(y))
            .collect(),
    );
    let max_mag = mag.max_sample();
    if max_mag <= 0.0 {
        return Ok(Plane::new(p.width(), p.height(), 0));
    }
    let low = params.low_threshold * max_mag;
    let high = params.high_threshold * max_mag;

    let thinned = non_maximum_suppression(&mag, &gx, &gy);
    Ok(hysteresis(&thinned, low, high))
}

/// Suppress pixels that are not local maxima along the quantized gradient
/// direction. The comparison is strict on the "before" neighbor only, so a
/// perfectly symmetric step keeps a single-pixel line.
fn non_maximum_suppression(mag: &Plane<f64>, gx: &Plane<f64>, gy: &Plane<f64>) -> Plane<f64> {
    let (w, h) = (mag.width(), mag.height());
    let mut out = Plane::new(w, h, 0.0);
    process_rows(out.samples_mut(), w, |r, row| {
        if r == 0 || r == h - 1 {
            return;
        }
        for c in 1..w - 1 {
            let m = mag.get(r, c);
            if m <= 0.0 {
                continue;
            }
            let x = gx.get(r, c);
            let y = gy.get(r, c);
            let mut angle = y.atan2(x).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            // (before, after) neighbors along the gradient direction.
            let (before, after) = if !(22.5..157.5).contains(&angle) {
                (mag.get(r, c - 1), mag.get(r, c + 1))
            } else if angle < 67.5 {
                (mag.get(r - 1, c - 1), mag.get(r + 1, c + 1))
            } else if angle < 112.5 {
                (mag.get(r - 1, c), mag.get(r + 1, c))
            } else {
                (mag.get(r - 1, c + 1), mag.get(r + 1, c - 1))
            };
            if m > before && m >= after {
                row[c] = m;
            }
        }
    });
    out
}

fn hysteresis(thinned: &Plane<f64>, low: f64, high: f64) -> Plane<u8> {
    let (w, h) = (thinned.width(), thinned.height());
    let mut out = Plane::new(w, h, 0u8);
    let mut stack = Vec::new();
    for r in 0..h {
        for c in 0..w {
            if thinned.get(r, c) >= high && out.get(r, c) == 0 {
                out.set(r, c, 255);
                stack.push((r, c));
                while let Some((pr, pc)) = stack.pop() {
                    for dr in -1i64..=1 {
                        for dc in -1i64..=1 {
                            if dr == 0 && dc == 0 {
                                continue;
                            }
                            let nr = pr as i64 + dr;
                            let nc = pc as i64 + dc;
                            if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                                continue;
                            }
                            let (nr, nc) = (nr as usize, nc as usize);
                            if out.get(nr, nc) == 0 && thinned.get(nr, nc) >= low {
                                out.set(nr, nc, 255);
                                stack.push((nr, nc));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Threshold a plane into a 0/255 binary mask. `u8` samples are first
/// normalized to `[0, 1]`; `f64` planes are used as-is.
pub fn binarize<T: Sample>(p: &Plane<T>, threshold: f64, polarity: Polarity) -> Plane<u8> {
    let samples = p
        .samples()
        .iter()
        .map(|&v| {
            let x = v.to_f64() / T::NORM;
            let fg = match polarity {
                Polarity::DarkForeground => x < threshold,
                Polarity::LightForeground => x >= threshold,
            };
            if fg {
                255
            } else {
                0
            }
        })
        .collect();
    Plane::from_samples(p.width(), p.height(), samples)
}

/// Centered moving average applied `passes` times. Near the boundaries the
/// average runs over the available sub-window, so the output keeps the input
/// length. `window` must be odd and no longer than the signal.
pub fn smooth_1d(signal: &[f64], window: usize, passes: usize) -> Result<Vec<f64>> {
    if window == 0 || window % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "smoothing window must be odd and >= 1, got {window}"
        )));
    }
    if window > signal.len() {
        return Err(Error::InvalidArgument(format!(
            "smoothing window {window} longer than signal of {} samples",
            signal.len()
        )));
    }
    let half = window / 2;
    let mut cur = signal.to_vec();
    for _ in 0..passes {
        let mut next = vec![0.0; cur.len()];
        for (i, out) in next.iter_mut().enumerate() {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(cur.len() - 1);
            let sum: f64 = cur[lo..=hi].iter().sum();
            *out = sum / (hi - lo + 1) as f64;
        }
        cur = next;
    }
    Ok(cur)
}

/// Find local maxima at least `min_prominence_fraction` of the global
/// maximum tall, greedily suppressing any peak closer than `min_separation`
/// to an already accepted, taller peak.
pub fn find_peaks(signal: &[f64], min_prominence_fraction: f64, min_separation: usize) -> PeakSet {
    let mut candidates: Vec<(usize, f64)> = Vec::new();
    if signal.len() >= 3 {
        let global_max = signal.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let floor = min_prominence_fraction * global_max;
        for i in 1..signal.len() - 1 {
            if signal[i] > signal[i - 1] && signal[i] > signal[i + 1] && signal[i] >= floor {
                candidates.push((i, signal[i]));
            }
        }
    }
    // Tallest first; earlier position wins ties.
    candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut accepted: Vec<(usize, f64)> = Vec::new();
    for (pos, height) in candidates {
        if accepted
            .iter()
            .all(|&(p, _)| pos.abs_diff(p) >= min_separation)
        {
            accepted.push((pos, height));
        }
    }
    accepted.sort_by_key(|&(p, _)| p);
    PeakSet {
        positions: accepted.iter().map(|&(p, _)| p).collect(),
        heights: accepted.iter().map(|&(_, h)| h).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sobel_constant_is_zero() {
        let p = Plane::new(8, 8, 120u8);
        let m = sobel_magnitude(&p).unwrap();
        assert!(m.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sobel_vertical_step_response() {
        let p = Plane::from_fn(12, 8, |_, c| if c < 6 { 0u8 } else { 255 });
        let m = sobel_magnitude(&p).unwrap();
        // Two columns adjacent to the step respond with |Gx| = 4 * 255.
        assert_eq!(m.get(4, 5), 1020.0);
        assert_eq!(m.get(4, 6), 1020.0);
        assert_eq!(m.get(4, 3), 0.0);
        assert_eq!(m.get(4, 9), 0.0);
    }

    #[test]
    fn sobel_commutes_with_transpose() {
        let p = Plane::from_fn(9, 11, |r, c| ((r * 31 + c * 17) % 251) as u8);
        let a = sobel_magnitude(&p.transpose()).unwrap();
        let b = sobel_magnitude(&p).unwrap().transpose();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn sobel_rejects_tiny_planes() {
        assert!(sobel_magnitude(&Plane::new(2, 5, 0u8)).is_err());
    }

    #[test]
    fn canny_constant_has_no_edges() {
        let p = Plane::new(20, 20, 90u8);
        let e = canny(&p, &CannyParams::default()).unwrap();
        assert!(e.samples().iter().all(|&v| v == 0));
    }

    #[test]
    fn canny_step_edge_is_thin_and_connected() {
        let p = Plane::from_fn(24, 24, |_, c| if c < 12 { 40u8 } else { 200 });
        let e = canny(&p, &CannyParams::default()).unwrap();
        // Every interior row crosses the edge exactly once.
        for r in 1..23 {
            let count = (0..24).filter(|&c| e.get(r, c) != 0).count();
            assert_eq!(count, 1, "row {r} has {count} edge pixels");
        }
        // And the chain is vertically connected: all in the same column band.
        let cols: Vec<usize> = (1..23)
            .map(|r| (0..24).position(|c| e.get(r, c) != 0).unwrap())
            .collect();
        for pair in cols.windows(2) {
            assert!(pair[0].abs_diff(pair[1]) <= 1);
        }
    }

    #[test]
    fn canny_edges_exceed_low_threshold() {
        let p = Plane::from_fn(32, 32, |r, c| ((r * r + 3 * c * r + c) % 256) as u8);
        let params = CannyParams::default();
        let e = canny(&p, &params).unwrap();
        let mag = canny_gradient(&p, params.gaussian_sigma).unwrap();
        let low = params.low_threshold * mag.max_sample();
        for r in 0..32 {
            for c in 0..32 {
                if e.get(r, c) != 0 {
                    assert!(mag.get(r, c) >= low);
                }
            }
        }
    }

    #[test]
    fn canny_rejects_bad_thresholds() {
        let p = Plane::new(10, 10, 0u8);
        let bad = CannyParams {
            low_threshold: 0.5,
            high_threshold: 0.2,
            gaussian_sigma: 1.0,
        };
        assert!(canny(&p, &bad).is_err());
    }

    #[test]
    fn binarize_polarity() {
        let dark = Plane::new(3, 3, 0u8);
        let light = Plane::new(3, 3, 255u8);
        let all = |p: &Plane<u8>, v: u8| p.samples().iter().all(|&x| x == v);
        assert!(all(&binarize(&dark, 0.5, Polarity::DarkForeground), 255));
        assert!(all(&binarize(&light, 0.5, Polarity::DarkForeground), 0));
        // 127/255 = 0.498 < 0.5, so mid-gray is dark-foreground.
        let mid = Plane::new(3, 3, 127u8);
        assert!(all(&binarize(&mid, 0.5, Polarity::DarkForeground), 255));
        assert!(all(&binarize(&mid, 0.5, Polarity::LightForeground), 0));
    }

    #[test]
    fn smooth_window_1_is_identity() {
        let s = vec![3.0, -1.0, 4.0, 1.0, 5.0];
        assert_eq!(smooth_1d(&s, 1, 3).unwrap(), s);
    }

    #[test]
    fn smooth_constant_unchanged() {
        let s = vec![2.5; 11];
        assert_eq!(smooth_1d(&s, 5, 2).unwrap(), s);
    }

    #[test]
    fn smooth_impulse() {
        let s = vec![0.0, 0.0, 9.0, 0.0, 0.0];
        assert_eq!(smooth_1d(&s, 3, 1).unwrap(), vec![0.0, 3.0, 3.0, 3.0, 0.0]);
    }

    #[test]
    fn smooth_rejects_even_or_oversized_window() {
        let s = vec![1.0; 6];
        assert!(smooth_1d(&s, 4, 1).is_err());
        assert!(smooth_1d(&s, 7, 1).is_err());
    }

    #[test]
    fn peaks_basic() {
        let s = vec![0.0, 1.0, 0.0, 0.0, 2.0, 0.0];
        let p = find_peaks(&s, 0.4, 1);
        assert_eq!(p.positions, vec![1, 4]);
        assert_eq!(p.heights, vec![1.0, 2.0]);
    }

    #[test]
    fn peaks_monotone_and_zero_signals() {
        let up: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(find_peaks(&up, 0.1, 1).is_empty());
        let zeros = vec![0.0; 10];
        assert!(find_peaks(&zeros, 0.1, 1).is_empty());
    }

    #[test]
    fn peaks_respect_separation() {
        // Peaks at 4 (h=3), 7 (h=5), 13 (h=4): 7 wins, 4 is suppressed
        // (distance 3 < 5), 13 survives (distance 6 >= 5).
        let mut s = vec![0.0; 18];
        s[4] = 3.0;
        s[7] = 5.0;
        s[13] = 4.0;
        let p = find_peaks(&s, 0.1, 5);
        assert_eq!(p.positions, vec![7, 13]);
        for w in p.positions.windows(2) {
            assert!(w[1] - w[0] >= 5);
        }
    }

    #[test]
    fn two_tallest_orders_by_height() {
        let p = PeakSet {
            positions: vec![2, 9, 15],
            heights: vec![4.0, 9.0, 6.0],
        };
        assert_eq!(p.two_tallest(), Some((9, 15)));
    }
}
