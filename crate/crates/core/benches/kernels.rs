//! Kernel benchmarks on the canonical 381x281 face frame.
//!
//! With the default `parallel` feature each kernel is measured twice: under
//! a single-thread rayon pool and under the default pool, so the parallel
//! speedup is visible in one run. Build with `--no-default-features` to
//! measure the true sequential fallback.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use mien_core::classify::Emotion;
use mien_core::edges::{canny, sobel_magnitude, CannyParams};
use mien_core::features::{extract_features, mouth_map};
use mien_core::locate::{eye_map, lips_rect};
use mien_core::morphology::{dilate, disk_se};
use mien_core::raster::{to_ycbcr, ColorImage, Rect};
use mien_core::synthcorpus::{generate_face, FaceSpec};
use mien_core::Config;

fn bench_face() -> ColorImage {
    let spec = FaceSpec {
        emotion: Emotion::Surprise,
        mouth_open_rows: 40,
        corner_span: 80,
        brow_heights: (0..48)
            .map(|i| {
                let m = i % 16;
                43 + if m <= 8 { m } else { 16 - m } as u32
            })
            .collect(),
        furrow_count: 3,
        eye_centers: [(152, 90), (152, 190)],
        seed: 1,
    };
    generate_face(&spec).unwrap().0
}

#[cfg(feature = "parallel")]
fn single_thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
}

macro_rules! bench_modes {
    ($c:expr, $name:expr, $body:expr) => {{
        let f = $body;
        #[cfg(feature = "parallel")]
        {
            let pool = single_thread_pool();
            $c.bench_function(concat!($name, "/par-1thread"), |b| {
                b.iter(|| pool.install(&f))
            });
            $c.bench_function(concat!($name, "/par-default"), |b| b.iter(&f));
        }
        #[cfg(not(feature = "parallel"))]
        $c.bench_function(concat!($name, "/seq"), |b| b.iter(&f));
    }};
}

fn bench_kernels(c: &mut Criterion) {
    let cfg = Config::default();
    let face = bench_face();
    let chroma = to_ycbcr(&face);
    let lips = chroma.crop(lips_rect()).unwrap();
    let lip_map = mouth_map(&lips);
    let se = disk_se(2).unwrap();
    let wrinkle = chroma.y.crop(Rect::new(90, 55, 100, 76)).unwrap();
    let canny_params = CannyParams::default();

    bench_modes!(c, "to_ycbcr_381x281", || black_box(to_ycbcr(black_box(&face))));
    bench_modes!(c, "eye_map_381x281", || black_box(eye_map(black_box(&chroma))));
    bench_modes!(c, "dilate_disk2_132x281", || black_box(dilate(
        black_box(&lips.y),
        &se
    )));
    bench_modes!(c, "sobel_132x281", || black_box(
        sobel_magnitude(black_box(&lip_map)).unwrap()
    ));
    bench_modes!(c, "canny_100x76", || black_box(
        canny(black_box(&wrinkle), &canny_params).unwrap()
    ));
    bench_modes!(c, "extract_features_full", || black_box(
        extract_features(black_box(&face), &cfg).unwrap()
    ));
}

criterion_group!(benches, bench_kernels);
criterion_main!(benches);
