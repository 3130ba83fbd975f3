//! Rule-table classification, per-feature vote generation, majority voting,
//! weighted majority voting, and accuracy-derived voting weights.

use crate::config::RuleThresholds;
use crate::error::{Error, Result};
use crate::features::FeatureVector;
use std::fmt;

/// The five recognized emotions, in rule-table row order. That order also
/// breaks every tie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Emotion {
    Disgust,
    Surprise,
    Angry,
    Neutral,
    Happy,
}

pub const EMOTIONS: [Emotion; 5] = [
    Emotion::Disgust,
    Emotion::Surprise,
    Emotion::Angry,
    Emotion::Neutral,
    Emotion::Happy,
];

impl Emotion {
    pub fn index(self) -> usize {
        EMOTIONS.iter().position(|&e| e == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Disgust => "Disgust",
            Emotion::Surprise => "Surprise",
            Emotion::Angry => "Angry",
            Emotion::Neutral => "Neutral",
            Emotion::Happy => "Happy",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Emotion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Emotion> {
        match s.trim().to_ascii_lowercase().as_str() {
            "disgust" => Ok(Emotion::Disgust),
            "surprise" => Ok(Emotion::Surprise),
            "angry" | "anger" => Ok(Emotion::Angry),
            "neutral" => Ok(Emotion::Neutral),
            "happy" => Ok(Emotion::Happy),
            other => Err(Error::InvalidArgument(format!("unknown emotion `{other}`"))),
        }
    }
}

/// The five features in the order the accuracy and weight tables use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Feature {
    Ebm,
    Lc,
    Ebc,
    W,
    Mo,
}

pub const FEATURES: [Feature; 5] = [
    Feature::Ebm,
    Feature::Lc,
    Feature::Ebc,
    Feature::W,
    Feature::Mo,
];

impl Feature {
    pub fn index(self) -> usize {
        FEATURES.iter().position(|&f| f == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Ebm => "EBM",
            Feature::Lc => "LC",
            Feature::Ebc => "EBC",
            Feature::W => "W",
            Feature::Mo => "MO",
        }
    }

    pub fn value_of(self, fv: &FeatureVector) -> f64 {
        match self {
            Feature::Ebm => fv.ebm,
            Feature::Lc => fv.lc,
            Feature::Ebc => fv.ebc,
            Feature::W => fv.w,
            Feature::Mo => fv.mo,
        }
    }
}

/// Which side of a threshold a feature value falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Low,
    High,
}

/// Equality resolves to the high side; the published rules use only strict
/// inequalities and never assign the boundary.
pub fn side(value: f64, threshold: f64) -> Side {
    if value >= threshold {
        Side::High
    } else {
        Side::Low
    }
}

/// Per-emotion threshold predicates over the five features.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RuleTable {
    pub thresholds: RuleThresholds,
    /// `rows[emotion][feature]` in the orders of [`EMOTIONS`] and [`FEATURES`].
    pub rows: [[Side; 5]; 5],
}

impl Default for RuleTable {
    fn default() -> Self {
        RuleTable::with_thresholds(RuleThresholds::default())
    }
}

impl RuleTable {
    /// The published rule rows with custom thresholds.
    pub fn with_thresholds(thresholds: RuleThresholds) -> Self {
        use Side::{High as H, Low as L};
        // Feature order: EBM, LC, EBC, W, MO.
        RuleTable {
            thresholds,
            rows: [
                [L, L, L, H, L], // Disgust
                [H, H, H, H, H], // Surprise
                [L, L, L, L, L], // Angry
                [H, L, H, L, L], // Neutral
                [H, H, H, L, H], // Happy
            ],
        }
    }

    pub fn threshold(&self, f: Feature) -> f64 {
        match f {
            Feature::Ebm => self.thresholds.ebm,
            Feature::Lc => self.thresholds.lc,
            Feature::Ebc => self.thresholds.ebc,
            Feature::W => self.thresholds.w,
            Feature::Mo => self.thresholds.mo,
        }
    }

    pub fn sides_of(&self, fv: &FeatureVector) -> [Side; 5] {
        let mut out = [Side::Low; 5];
        for f in FEATURES {
            out[f.index()] = side(f.value_of(fv), self.threshold(f));
        }
        out
    }
}

impl fmt::Display for RuleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Print in the familiar column order MO LC W EBC EBM.
        let order = [Feature::Mo, Feature::Lc, Feature::W, Feature::Ebc, Feature::Ebm];
        for feat in order {
            write!(f, "{:<10}", feat.name())?;
        }
        writeln!(f, "Emotion")?;
        for e in EMOTIONS {
            for feat in order {
                let s = self.rows[e.index()][feat.index()];
                let sign = if s == Side::High { '>' } else { '<' };
                write!(f, "{:<10}", format!("{sign}{}", self.threshold(feat)))?;
            }
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Per-emotion, per-feature voting weights.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WeightMatrix {
    /// `weights[emotion][feature]` in the orders of [`EMOTIONS`] and [`FEATURES`].
    pub weights: [[f64; 5]; 5],
}

impl fmt::Display for WeightMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<10}", "Emotion")?;
        for feat in FEATURES {
            write!(f, "{:<10}", feat.name())?;
        }
        writeln!(f)?;
        for e in EMOTIONS {
            write!(f, "{:<10}", e.name())?;
            for feat in FEATURES {
                write!(f, "{:<10.4}", self.weights[e.index()][feat.index()])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Per-feature accuracy rates (percent), `[emotion][feature]`.
///
/// Rows follow [`EMOTIONS`], columns [`FEATURES`].
pub const INDIVIDUAL_ACCURACY: [[f64; 5]; 5] = [
    [70.0, 99.0, 99.0, 61.0, 99.0],   // Disgust
    [80.0, 98.0, 98.0, 63.0, 96.0],   // Surprise
    [80.0, 97.0, 98.0, 65.0, 98.0],   // Angry
    [90.0, 99.0, 99.0, 70.0, 97.0],   // Neutral
    [75.0, 98.0, 90.0, 67.46, 97.0],  // Happy
];

/// Weight of each feature: its accuracy rate divided by the emotion row's
/// accuracy sum. Every row therefore sums to 1.
pub fn compute_weights(acc: &[[f64; 5]; 5]) -> Result<WeightMatrix> {
    let mut weights = [[0.0; 5]; 5];
    for (e, row) in acc.iter().enumerate() {
        let sum: f64 = row.iter().sum();
        for (f, &a) in row.iter().enumerate() {
            if a <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "accuracy for {} / {} must be positive, got {a}",
                    EMOTIONS[e],
                    FEATURES[f].name()
                )));
            }
            weights[e][f] = a / sum;
        }
    }
    Ok(WeightMatrix { weights })
}

/// Weights derived from the per-feature accuracy table.
pub fn default_weight_matrix() -> WeightMatrix {
    compute_weights(&INDIVIDUAL_ACCURACY).expect("published accuracies are positive")
}

/// The published weight preset. Its Disgust and Happy rows are reproduced
/// verbatim (they do not normalize exactly); the remaining rows come from
/// the accuracy table.
pub fn table4_preset() -> WeightMatrix {
    let mut wm = default_weight_matrix();
    wm.weights[Emotion::Disgust.index()] = [0.183, 0.236, 0.236, 0.160, 0.236];
    wm.weights[Emotion::Happy.index()] = [0.1943, 0.2305, 0.1787, 0.1735, 0.222];
    wm
}

/// Classification method used for a [`Decision`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rules,
    Mv,
    Wmv,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rules" => Ok(Method::Rules),
            "mv" => Ok(Method::Mv),
            "wmv" => Ok(Method::Wmv),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// A classification outcome: the label, the method that produced it, the
/// per-emotion support scores (in [`EMOTIONS`] order), and whether a
/// fallback or tie-break decided it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Decision {
    pub label: Emotion,
    pub method: Method,
    pub scores: [f64; 5],
    pub fallback_used: bool,
}

/// Per feature, the set of emotions whose rule-table predicate that feature
/// value satisfies. `votes[feature][emotion]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VoteProfile {
    pub votes: [[bool; 5]; 5],
}

impl VoteProfile {
    pub fn contains(&self, f: Feature, e: Emotion) -> bool {
        self.votes[f.index()][e.index()]
    }

    /// Number of features voting for `e`.
    pub fn count(&self, e: Emotion) -> usize {
        FEATURES.iter().filter(|f| self.contains(**f, e)).count()
    }
}

/// First emotion (in row order) attaining the maximum score.
fn argmax_by_row_order(scores: &[f64; 5]) -> (Emotion, bool) {
    let mut best = EMOTIONS[0];
    let mut best_score = scores[0];
    let mut ties = 1;
    for &e in &EMOTIONS[1..] {
        let s = scores[e.index()];
        if s > best_score {
            best = e;
            best_score = s;
            ties = 1;
        } else if s == best_score {
            ties += 1;
        }
    }
    (best, ties > 1)
}

/// Classify by the rule table: an exact row match wins; otherwise the row
/// with the fewest disagreeing predicates does, with ties resolved by row
/// order. Scores count matching predicates.
pub fn rule_classify(fv: &FeatureVector, rules: &RuleTable) -> Decision {
    let sides = rules.sides_of(fv);
    let mut scores = [0.0; 5];
    for e in EMOTIONS {
        let matches = rules.rows[e.index()]
            .iter()
            .zip(&sides)
            .filter(|(a, b)| a == b)
            .count();
        scores[e.index()] = matches as f64;
    }
    let (label, _) = argmax_by_row_order(&scores);
    Decision {
        label,
        method: Method::Rules,
        scores,
        fallback_used: scores[label.index()] < 5.0,
    }
}

/// For each feature, the set of emotions consistent with that feature's
/// side of its threshold.
pub fn feature_votes(fv: &FeatureVector, rules: &RuleTable) -> VoteProfile {
    let sides = rules.sides_of(fv);
    let mut votes = [[false; 5]; 5];
    for f in FEATURES {
        for e in EMOTIONS {
            votes[f.index()][e.index()] = rules.rows[e.index()][f.index()] == sides[f.index()];
        }
    }
    VoteProfile { votes }
}

/// Majority voting: an emotion named by at least three of the five feature
/// classifiers wins (ties among those resolved by weighted score, then row
/// order). With no three-vote majority the weighted vote decides and
/// `fallback_used` is set.
pub fn majority_vote(vp: &VoteProfile, wm: &WeightMatrix) -> Decision {
    let mut counts = [0.0; 5];
    for e in EMOTIONS {
        counts[e.index()] = vp.count(e) as f64;
    }
    let max_count = counts.iter().cloned().fold(0.0, f64::max);
    if max_count >= 3.0 {
        let wmv_scores = weighted_scores(vp, wm);
        let mut label = None;
        let mut best_score = f64::NEG_INFINITY;
        for e in EMOTIONS {
            if counts[e.index()] == max_count && wmv_scores[e.index()] > best_score {
                label = Some(e);
                best_score = wmv_scores[e.index()];
            }
        }
        return Decision {
            label: label.expect("some emotion attains the max count"),
            method: Method::Mv,
            scores: counts,
            fallback_used: false,
        };
    }
    let mut decision = weighted_majority_vote(vp, wm);
    decision.method = Method::Mv;
    decision.fallback_used = true;
    decision
}

fn weighted_scores(vp: &VoteProfile, wm: &WeightMatrix) -> [f64; 5] {
    let mut scores = [0.0; 5];
    for e in EMOTIONS {
        for f in FEATURES {
            if vp.contains(f, e) {
                scores[e.index()] += wm.weights[e.index()][f.index()];
            }
        }
    }
    scores
}

/// Weighted majority voting: each feature contributes its weight to every
/// emotion it votes for; the highest total wins. `fallback_used` marks a
/// decision that needed the row-order tie-break.
pub fn weighted_majority_vote(vp: &VoteProfile, wm: &WeightMatrix) -> Decision {
    let scores = weighted_scores(vp, wm);
    let (label, tied) = argmax_by_row_order(&scores);
    Decision {
        label,
        method: Method::Wmv,
        scores,
        fallback_used: tied,
    }
}

/// Percentage of predictions matching their labels.
pub fn accuracy(pairs: &[(Emotion, Emotion)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument(
            "accuracy of an empty prediction set is undefined".into(),
        ));
    }
    let correct = pairs.iter().filter(|(t, p)| t == p).count();
    Ok(100.0 * correct as f64 / pairs.len() as f64)
}
