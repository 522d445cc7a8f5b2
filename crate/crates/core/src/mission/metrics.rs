use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{CellCategory, OccupancyGrid};

/// Precision, recall and F1 for the obstacle class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct F1Score {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl F1Score {
    /// Ratios from raw counts; an empty denominator gives 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        Self {
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
            f1: ratio(2 * tp, 2 * tp + fn_ + fp),
        }
    }
}

/// Obstacle is the positive class; predicted Unknown counts as negative.
pub fn f1_score(predicted: &OccupancyGrid, truth: &OccupancyGrid) -> Result<F1Score> {
    predicted.check_same_dims(truth)?;
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&p, &t) in predicted.cells().iter().zip(truth.cells()) {
        let p = p == CellCategory::Obstacle;
        let t = t == CellCategory::Obstacle;
        match (p, t) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(F1Score::from_counts(tp, fp, fn_))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_prediction() {
        let g = OccupancyGrid::parse("###\n#.#\n###\n").unwrap();
        let s = f1_score(&g, &g).unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn hand_counts() {
        // TP=3, FP=1, FN=2
        let truth = OccupancyGrid::parse("#####.\n").unwrap();
        let pred = OccupancyGrid::parse("###.?#\n").unwrap();
        let s = f1_score(&pred, &truth).unwrap();
        assert_eq!((s.true_positives, s.false_positives, s.false_negatives), (3, 1, 2));
        assert!((s.precision - 0.75).abs() < 1e-12);
        assert!((s.recall - 0.6).abs() < 1e-12);
        assert!((s.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_predictions_are_negatives() {
        let truth = OccupancyGrid::parse("#.\n").unwrap();
        let blank = OccupancyGrid::unknown(1, 2);
        let s = f1_score(&blank, &truth).unwrap();
        assert_eq!(s.false_negatives, 1);
        assert_eq!(s.f1, 0.0);
    }

    #[test]
    fn dims_must_match() {
        let a = OccupancyGrid::unknown(1, 2);
        let b = OccupancyGrid::unknown(2, 1);
        assert!(f1_score(&a, &b).is_err());
    }
}
