//! Corpus evaluation: manifest-driven batch classification, accuracy
//! accounting, and the report the CLI prints and serializes.

use anyhow::{bail, Context};
use mien_core::classify::{
    feature_votes, majority_vote, rule_classify, weighted_majority_vote, Emotion, Method,
    RuleTable, WeightMatrix, EMOTIONS,
};
use mien_core::features::{extract_features, FeatureVector};
use mien_core::io::load_color_image;
use mien_core::Config;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// One manifest row: an image path (relative to the corpus directory) and
/// its label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    pub path: String,
    pub label: String,
}

/// Read a manifest CSV with a `path,emotion` header; extra columns (such as
/// the generator's ground-truth features) are ignored.
pub fn read_manifest(path: &Path) -> anyhow::Result<Vec<ManifestRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot open manifest {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .with_context(|| format!("manifest {} lacks a `{name}` column", path.display()))
    };
    let path_col = find("path")?;
    let label_col = find("emotion")?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let get = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let row = ManifestRow {
            path: get(path_col),
            label: get(label_col),
        };
        if row.path.is_empty() {
            bail!("manifest {} has a row without a path", path.display());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("manifest {} has no data rows", path.display());
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ItemRecord {
    pub path: String,
    pub label: String,
    /// True when the label is outside the recognized emotion set; the image
    /// is not evaluated.
    pub skipped: bool,
    pub prediction: Option<Emotion>,
    pub fallback_used: Option<bool>,
    pub features: Option<FeatureVector>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmotionStats {
    pub emotion: Emotion,
    pub count: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Timing {
    pub per_image_ms: Vec<f64>,
    pub median_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub method: Method,
    pub total: usize,
    pub evaluated: usize,
    pub failures: usize,
    pub skipped: usize,
    /// Percent correct over all non-skipped items; failures count against.
    pub overall_accuracy: f64,
    pub per_emotion: Vec<EmotionStats>,
    /// `confusion[truth][predicted]` in emotion row order.
    pub confusion: [[usize; 5]; 5],
    pub items: Vec<ItemRecord>,
    /// Wall-clock timing; excluded from determinism comparisons.
    pub timing: Timing,
}

/// Classify one feature vector with the requested method.
pub fn decide(
    fv: &FeatureVector,
    method: Method,
    rules: &RuleTable,
    weights: &WeightMatrix,
) -> mien_core::classify::Decision {
    match method {
        Method::Rules => rule_classify(fv, rules),
        Method::Mv => majority_vote(&feature_votes(fv, rules), weights),
        Method::Wmv => weighted_majority_vote(&feature_votes(fv, rules), weights),
    }
}

/// Evaluate every manifest row. Images are processed by a worker pool of
/// `threads` threads (0 = one per core); results merge in manifest order,
/// so the report is identical at any thread count.
pub fn evaluate(
    corpus_dir: &Path,
    rows: &[ManifestRow],
    method: Method,
    cfg: &Config,
    weights: &WeightMatrix,
    threads: usize,
) -> anyhow::Result<EvalReport> {
    let rules = RuleTable::with_thresholds(cfg.rules);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot build worker pool")?;

    let outcomes: Vec<(ItemRecord, f64)> = pool.install(|| {
        rows.par_iter()
            .map(|row| {
                let started = Instant::now();
                let record = evaluate_one(corpus_dir, row, method, cfg, &rules, weights);
                (record, started.elapsed().as_secs_f64() * 1e3)
            })
            .collect()
    });

    let mut confusion = [[0usize; 5]; 5];
    let mut per_count = [0usize; 5];
    let mut evaluated = 0;
    let mut failures = 0;
    let mut skipped = 0;
    let mut per_image_ms = Vec::with_capacity(outcomes.len());
    for (record, ms) in &outcomes {
        if record.skipped {
            skipped += 1;
            continue;
        }
        per_image_ms.push(*ms);
        let truth: Emotion = record.label.parse().expect("non-skipped label parses");
        per_count[truth.index()] += 1;
        match record.prediction {
            Some(pred) => {
                evaluated += 1;
                confusion[truth.index()][pred.index()] += 1;
            }
            None => failures += 1,
        }
    }
    let graded = evaluated + failures;
    let correct: usize = (0..5).map(|i| confusion[i][i]).sum();
    let overall_accuracy = if graded > 0 {
        100.0 * correct as f64 / graded as f64
    } else {
        0.0
    };
    let per_emotion = EMOTIONS
        .iter()
        .map(|&e| {
            let count = per_count[e.index()];
            let correct = confusion[e.index()][e.index()];
            EmotionStats {
                emotion: e,
                count,
                correct,
                accuracy: if count > 0 {
                    100.0 * correct as f64 / count as f64
                } else {
                    0.0
                },
            }
        })
        .collect();

    let median_ms = median(&per_image_ms);
    Ok(EvalReport {
        method,
        total: rows.len(),
        evaluated,
        failures,
        skipped,
        overall_accuracy,
        per_emotion,
        confusion,
        items: outcomes.into_iter().map(|(r, _)| r).collect(),
        timing: Timing {
            per_image_ms,
            median_ms,
        },
    })
}

fn evaluate_one(
    corpus_dir: &Path,
    row: &ManifestRow,
    method: Method,
    cfg: &Config,
    rules: &RuleTable,
    weights: &WeightMatrix,
) -> ItemRecord {
    let mut record = ItemRecord {
        path: row.path.clone(),
        label: row.label.clone(),
        skipped: false,
        prediction: None,
        fallback_used: None,
        features: None,
        error: None,
    };
    if row.label.parse::<Emotion>().is_err() {
        record.skipped = true;
        return record;
    }
    let full: PathBuf = corpus_dir.join(&row.path);
    let image = match load_color_image(&full) {
        Ok(img) => img,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };
    match extract_features(&image, cfg) {
        Ok(fv) => {
            let decision = decide(&fv, method, rules, weights);
            record.prediction = Some(decision.label);
            record.fallback_used = Some(decision.fallback_used);
            record.features = Some(fv);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 0 {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    }
}

/// Render the human-readable summary table.
pub fn format_table(report: &EvalReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Evaluated {} of {} images ({} failures, {} skipped) with method {:?}",
        report.evaluated, report.total, report.failures, report.skipped, report.method
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "{:<10}{:>7}{:>9}{:>11}", "Emotion", "Count", "Correct", "Accuracy");
    for s in &report.per_emotion {
        let _ = writeln!(
            out,
            "{:<10}{:>7}{:>9}{:>10.1}%",
            s.emotion.name(),
            s.count,
            s.correct,
            s.accuracy
        );
    }
    let graded = report.evaluated + report.failures;
    let _ = writeln!(
        out,
        "{:<10}{:>7}{:>9}{:>10.1}%",
        "Overall",
        graded,
        (0..5).map(|i| report.confusion[i][i]).sum::<usize>(),
        report.overall_accuracy
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "Confusion (rows = truth, columns = predicted):");
    let _ = write!(out, "{:<10}", "");
    for e in EMOTIONS {
        let _ = write!(out, "{:>9}", e.name());
    }
    let _ = writeln!(out);
    for t in EMOTIONS {
        let _ = write!(out, "{:<10}", t.name());
        for p in EMOTIONS {
            let _ = write!(out, "{:>9}", report.confusion[t.index()][p.index()]);
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "Median per-image time: {:.2} ms", report.timing.median_ms);
    out
}
