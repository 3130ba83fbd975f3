//! End-to-end pipeline tests on synthetic faces with known ground truth.

use mien_core::classify::{
    default_weight_matrix, feature_votes, majority_vote, rule_classify, weighted_majority_vote,
    Emotion, RuleTable,
};
use mien_core::features::{extract_features, extract_traced};
use mien_core::raster::Rect;
use mien_core::synthcorpus::{generate_face, generate_suite, occlude, FaceSpec};
use mien_core::Config;

fn happy_spec() -> FaceSpec {
    FaceSpec {
        emotion: Emotion::Happy,
        mouth_open_rows: 40,
        corner_span: 80,
        brow_heights: (0..48)
            .map(|i| {
                let m = i % 16;
                43 + if m <= 8 { m } else { 16 - m } as u32
            })
            .collect(),
        furrow_count: 0,
        eye_centers: [(152, 90), (152, 190)],
        seed: 3,
    }
}

fn disgust_spec() -> FaceSpec {
    FaceSpec {
        emotion: Emotion::Disgust,
        mouth_open_rows: 0,
        corner_span: 32,
        brow_heights: vec![18; 48],
        furrow_count: 3,
        eye_centers: [(151, 88), (152, 189)],
        seed: 4,
    }
}

#[test]
fn happy_face_lands_in_happy_region() {
    let cfg = Config::default();
    let (img, _) = generate_face(&happy_spec()).unwrap();
    let fv = extract_features(&img, &cfg).unwrap();
    assert!(fv.mo > 25.0, "mo = {}", fv.mo);
    assert!(fv.lc > 50.0, "lc = {}", fv.lc);
    assert!(fv.w < 200.0, "w = {}", fv.w);
    assert!(fv.ebc > 0.5, "ebc = {}", fv.ebc);
    assert!(fv.ebm > 0.7, "ebm = {}", fv.ebm);
    let d = rule_classify(&fv, &RuleTable::default());
    assert_eq!(d.label, Emotion::Happy);
    assert!(!d.fallback_used);
}

#[test]
fn disgust_face_lands_in_disgust_region() {
    let cfg = Config::default();
    let (img, _) = generate_face(&disgust_spec()).unwrap();
    let fv = extract_features(&img, &cfg).unwrap();
    assert!(fv.mo < 25.0);
    assert!(fv.lc < 50.0);
    assert!(fv.w > 200.0, "w = {}", fv.w);
    assert!(fv.ebc < 0.5);
    assert!(fv.ebm < 0.7);
    assert_eq!(
        rule_classify(&fv, &RuleTable::default()).label,
        Emotion::Disgust
    );
}

#[test]
fn occluded_eye_reports_locate_eyes_failure() {
    let cfg = Config::default();
    let (mut img, _) = generate_face(&happy_spec()).unwrap();
    // Cover the left eye blob with skin.
    occlude(&mut img, Rect::new(70, 130, 45, 45)).unwrap();
    let err = extract_features(&img, &cfg).unwrap_err();
    assert_eq!(err.stage(), Some("locate_eyes"));
    assert!(err.to_string().contains("locate_eyes"));
}

#[test]
fn extraction_is_deterministic() {
    let cfg = Config::default();
    let (img, _) = generate_face(&happy_spec()).unwrap();
    let a = extract_features(&img, &cfg).unwrap();
    let b = extract_features(&img, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn methods_agree_on_strict_region_faces() {
    let cfg = Config::default();
    let rules = RuleTable::with_thresholds(cfg.rules);
    let wm = default_weight_matrix();
    for (img, emotion, _) in generate_suite(2, 9).unwrap() {
        let fv = extract_features(&img, &cfg).unwrap();
        let vp = feature_votes(&fv, &rules);
        let r = rule_classify(&fv, &rules).label;
        let m = majority_vote(&vp, &wm).label;
        let w = weighted_majority_vote(&vp, &wm).label;
        assert_eq!(r, emotion);
        assert_eq!(m, emotion);
        assert_eq!(w, emotion);
    }
}

#[test]
fn eyes_land_near_blob_centers() {
    let cfg = Config::default();
    let spec = happy_spec();
    let (img, _) = generate_face(&spec).unwrap();
    let extraction = extract_traced(&img, &cfg).unwrap();
    let left = extraction.eyes.left;
    let right = extraction.eyes.right;
    assert!((left.row - 152.0).abs() <= 2.0, "left row {}", left.row);
    assert!((left.col - 90.0).abs() <= 2.0, "left col {}", left.col);
    assert!((right.row - 152.0).abs() <= 2.0);
    assert!((right.col - 190.0).abs() <= 2.0);
}

#[test]
fn trace_carries_all_intermediates() {
    let cfg = Config::default();
    let (img, _) = generate_face(&disgust_spec()).unwrap();
    let t = extract_traced(&img, &cfg).unwrap();
    assert_eq!(t.eye_map.width(), 281);
    assert_eq!(t.mouth.map.height(), 132);
    assert_eq!(t.mouth.row_sums.len(), 132);
    assert_eq!(t.mouth.smoothed.len(), 132);
    // Closed mouth: exactly one accepted peak.
    assert_eq!(t.mouth.peaks.len(), 1);
    assert!(t.brow_line.points().len() >= 2);
    assert_eq!(t.wrinkle_canny.width(), t.regions.wrinkle.w);
}

#[test]
fn mirrored_face_keeps_lip_distance() {
    let cfg = Config::default();
    let (img, _) = generate_face(&happy_spec()).unwrap();
    let a = extract_features(&img, &cfg).unwrap();
    let b = extract_features(&img.mirror_horizontal(), &cfg).unwrap();
    assert!((a.lc - b.lc).abs() <= 2.0, "lc {} vs mirrored {}", a.lc, b.lc);
    assert!((a.mo - b.mo).abs() <= 2.0);
}
