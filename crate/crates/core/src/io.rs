//! Reading PNG / binary PPM images and writing PNG exports.

use crate::error::Result;
use crate::raster::{ColorImage, Plane};
use image::ImageReader;
use std::path::Path;

/// Load a PNG or binary PPM (P6) image as RGB.
pub fn load_color_image(path: &Path) -> Result<ColorImage> {
    let img = ImageReader::open(path)?.with_guessed_format()?.decode()?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| [p.0[0], p.0[1], p.0[2]]).collect();
    Ok(ColorImage::from_pixels(w, h, pixels))
}

pub fn save_color_png(img: &ColorImage, path: &Path) -> Result<()> {
    let mut buf = image::RgbImage::new(img.width() as u32, img.height() as u32);
    for (i, px) in img.pixels().iter().enumerate() {
        let (r, c) = (i / img.width(), i % img.width());
        buf.put_pixel(c as u32, r as u32, image::Rgb(*px));
    }
    buf.save(path)?;
    Ok(())
}

pub fn save_gray_png(p: &Plane<u8>, path: &Path) -> Result<()> {
    let mut buf = image::GrayImage::new(p.width() as u32, p.height() as u32);
    for r in 0..p.height() {
        for c in 0..p.width() {
            buf.put_pixel(c as u32, r as u32, image::Luma([p.get(r, c)]));
        }
    }
    buf.save(path)?;
    Ok(())
}

/// Export a real-valued plane as an 8-bit PNG, rescaled so its maximum maps
/// to white.
pub fn save_unit_png(p: &Plane<f64>, path: &Path) -> Result<()> {
    save_gray_png(&p.clone().rescale_max_to_unit().to_u8_clamped(), path)
}
