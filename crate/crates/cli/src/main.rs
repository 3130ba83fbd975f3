use anyhow::Context;
use clap::{Parser, Subcommand};
use mien_cli::report::{evaluate, format_table, read_manifest};
use mien_cli::{load_config, parse_rect, resolve_weights};
use mien_core::classify::{Method, EMOTIONS};
use mien_core::features::{extract_features, extract_traced, FeatureVector};
use mien_core::io::load_color_image;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "mien",
    about = "Rule-based facial emotion recognition from chroma, morphology, and edge features",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify one face image and print the decision as JSON.
    Classify {
        image: PathBuf,
        /// Classification method: rules, mv, or wmv.
        #[arg(long, default_value = "wmv")]
        method: String,
        /// Face bounding box `x0,y0,w,h` when the image is not pre-cropped.
        #[arg(long)]
        face_rect: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Export the pipeline's intermediate images for one face.
    Explain {
        image: PathBuf,
        out_dir: PathBuf,
        #[arg(long)]
        face_rect: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Classify a labeled corpus and report per-emotion accuracy.
    Evaluate {
        corpus_dir: PathBuf,
        /// Manifest CSV; defaults to `<corpus_dir>/manifest.csv`.
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "wmv")]
        method: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Worker threads (0 = one per core).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Also write the full report as JSON to this path.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Generate a synthetic labeled suite: `count` faces per emotion.
    Gen {
        count: usize,
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Serialize)]
struct ClassifyOutput {
    label: String,
    method: Method,
    fallback_used: bool,
    scores: BTreeMap<&'static str, f64>,
    features: FeatureVector,
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Classify {
            image,
            method,
            face_rect,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let method: Method = method.parse()?;
            let weights = resolve_weights(&cfg)?;
            let rules = mien_core::classify::RuleTable::with_thresholds(cfg.rules);
            let face = load_face(&image, face_rect.as_deref())?;
            let fv = extract_features(&face, &cfg)?;
            let decision = mien_cli::report::decide(&fv, method, &rules, &weights);
            let mut scores = BTreeMap::new();
            for e in EMOTIONS {
                scores.insert(e.name(), decision.scores[e.index()]);
            }
            let output = ClassifyOutput {
                label: decision.label.name().to_string(),
                method,
                fallback_used: decision.fallback_used,
                scores,
                features: fv,
            };
            println!("{}", serde_json::to_string(&output)?);
        }
        Command::Explain {
            image,
            out_dir,
            face_rect,
            config,
        } => {
            let cfg = load_config(config.as_deref())?;
            let face = load_face(&image, face_rect.as_deref())?;
            let extraction = extract_traced(&face, &cfg)?;
            let files = mien_cli::explain::write_artifacts(&extraction, &out_dir)?;
            for f in files {
                println!("{}", f.display());
            }
        }
        Command::Evaluate {
            corpus_dir,
            manifest,
            method,
            config,
            threads,
            json,
        } => {
            let cfg = load_config(config.as_deref())?;
            let method: Method = method.parse()?;
            let weights = resolve_weights(&cfg)?;
            let manifest = manifest.unwrap_or_else(|| corpus_dir.join("manifest.csv"));
            let rows = read_manifest(&manifest)?;
            let report = evaluate(&corpus_dir, &rows, method, &cfg, &weights, threads)?;
            print!("{}", format_table(&report));
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&report)?;
                std::fs::write(&path, text)
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
        Command::Gen { count, out_dir, seed } => {
            let written = mien_cli::gen::write_suite(count, seed, &out_dir)?;
            println!(
                "wrote {written} faces and manifest.csv to {}",
                out_dir.display()
            );
        }
    }
    Ok(())
}

fn load_face(
    image: &std::path::Path,
    face_rect: Option<&str>,
) -> anyhow::Result<mien_core::raster::ColorImage> {
    let img = load_color_image(image)
        .with_context(|| format!("cannot load image {}", image.display()))?;
    match face_rect {
        Some(text) => {
            let rect = parse_rect(text)?;
            Ok(img.crop(rect)?)
        }
        None => Ok(img),
    }
}
