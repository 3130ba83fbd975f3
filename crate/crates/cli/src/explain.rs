//! Export of the pipeline's intermediate planes for visual inspection.

use anyhow::Context;
use mien_core::features::Extraction;
use mien_core::io::{save_color_png, save_gray_png, save_unit_png};
use mien_core::raster::{ColorImage, Plane};
use std::path::{Path, PathBuf};

const CROSS: [u8; 3] = [255, 0, 0];

fn draw_cross(img: &mut ColorImage, row: i64, col: i64, arm: i64) {
    for d in -arm..=arm {
        for (r, c) in [(row + d, col), (row, col + d)] {
            if r >= 0 && c >= 0 && (r as usize) < img.height() && (c as usize) < img.width() {
                img.set(r as usize, c as usize, CROSS);
            }
        }
    }
}

fn gray_to_color(p: &Plane<u8>) -> ColorImage {
    let pixels = p.samples().iter().map(|&v| [v, v, v]).collect();
    ColorImage::from_pixels(p.width(), p.height(), pixels)
}

/// Write the nine inspection artifacts for one extraction and return their
/// paths in a fixed order.
pub fn write_artifacts(extraction: &Extraction, out_dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let mut written = Vec::new();
    let mut path = |name: &str| {
        let p = out_dir.join(name);
        written.push(p.clone());
        p
    };

    save_unit_png(&extraction.eye_map, &path("eye_map.png"))?;

    let mut eyes = extraction.face.clone();
    draw_cross(
        &mut eyes,
        extraction.eyes.left.row.round() as i64,
        extraction.eyes.left.col.round() as i64,
        5,
    );
    draw_cross(
        &mut eyes,
        extraction.eyes.right.row.round() as i64,
        extraction.eyes.right.col.round() as i64,
        5,
    );
    save_color_png(&eyes, &path("eyes_overlay.png"))?;

    save_unit_png(&extraction.mouth.map, &path("mouth_map.png"))?;
    save_unit_png(&extraction.mouth.edges, &path("mouth_edges.png"))?;

    {
        let p = path("row_sums.csv");
        let mut writer = csv::Writer::from_path(&p)?;
        writer.write_record(["row", "raw", "smoothed", "peak"])?;
        for (i, (raw, smoothed)) in extraction
            .mouth
            .row_sums
            .iter()
            .zip(&extraction.mouth.smoothed)
            .enumerate()
        {
            let peak = extraction.mouth.peaks.positions.contains(&i);
            writer.write_record([
                i.to_string(),
                raw.to_string(),
                smoothed.to_string(),
                (peak as u8).to_string(),
            ])?;
        }
        writer.flush()?;
    }

    save_gray_png(&extraction.brow_gradient, &path("brow_gradient.png"))?;

    let mut brow = gray_to_color(&extraction.brow_gray);
    for (col, row) in extraction.brow_line.points() {
        brow.set(row, col, CROSS);
    }
    save_color_png(&brow, &path("brow_line.png"))?;

    let mut corners = gray_to_color(
        &extraction
            .corner_map
            .clone()
            .rescale_max_to_unit()
            .to_u8_clamped(),
    );
    for (row, col) in [extraction.corners.left, extraction.corners.right] {
        draw_cross(&mut corners, row as i64, col as i64, 3);
    }
    save_color_png(&corners, &path("corner_map.png"))?;

    save_gray_png(&extraction.wrinkle_canny, &path("wrinkle_canny.png"))?;

    Ok(written)
}
