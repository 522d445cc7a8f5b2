//! F1 of raw observations versus thresholded predictions as observations
//! accumulate.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{f1_score, PredictorChoice};
use crate::error::{Error, Result};
use crate::grid::{CellCategory, Coord, OccupancyGrid};
use crate::predictor::ThresholdConfig;
use crate::sensing::{sense, ObservationMap, SensorRig};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    /// Snapshot points, in sense operations. Sorted and deduplicated on use.
    pub observation_counts: Vec<usize>,
    pub thresholds: ThresholdConfig,
    pub rig: SensorRig,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            observation_counts: vec![1, 2, 4, 8, 16, 32],
            thresholds: ThresholdConfig::default(),
            rig: SensorRig::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalRow {
    pub map_id: String,
    pub observations: usize,
    pub baseline_f1: f64,
    pub predicted_f1: f64,
}

pub const EVAL_HEADER: &str = "map_id,observations,baseline_f1,predicted_f1";

pub fn eval_csv(rows: &[EvalRow]) -> String {
    let mut out = format!("{EVAL_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.map_id, r.observations, r.baseline_f1, r.predicted_f1
        );
    }
    out
}

/// Grow a random tree of sense poses: the root is a random Free cell and
/// every later pose is a Free cell seen from an earlier one. Returns the
/// accumulated map after each pose, so entry `k` holds `k + 1` senses.
pub fn observation_tree(
    truth: &OccupancyGrid,
    rig: &SensorRig,
    poses: usize,
    seed: u64,
) -> Result<Vec<ObservationMap>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let free: Vec<Coord> = truth.coords().filter(|&c| truth.is_free(c)).collect();
    let root = *free
        .choose(&mut rng)
        .ok_or_else(|| Error::Config("map has no free cell".into()))?;
    let mut obs = ObservationMap::new(truth.height(), truth.width());
    let mut snapshots = Vec::with_capacity(poses);
    let mut visited = vec![root];
    let mut pose = root;
    for _ in 0..poses {
        let readings = sense(truth, pose, rig)?;
        obs.absorb(&readings)?;
        snapshots.push(obs.clone());
        let parent = *visited.choose(&mut rng).expect("root is visited");
        let children: Vec<Coord> = sense(truth, parent, rig)?
            .into_iter()
            .filter(|&(c, cat)| cat == CellCategory::Free && c != parent)
            .map(|(c, _)| c)
            .collect();
        pose = children.choose(&mut rng).copied().unwrap_or(parent);
        visited.push(pose);
    }
    Ok(snapshots)
}

/// One row per map and snapshot point.
pub fn evaluate_predictor(
    maps: &[(String, OccupancyGrid)],
    predictor: &PredictorChoice,
    cfg: &EvalConfig,
) -> Result<Vec<EvalRow>> {
    cfg.thresholds.validate()?;
    cfg.rig.validate()?;
    let mut counts = cfg.observation_counts.clone();
    counts.sort_unstable();
    counts.dedup();
    if counts.first() == Some(&0) {
        return Err(Error::Config("observation counts start at 1".into()));
    }
    let Some(&deepest) = counts.last() else {
        return Err(Error::Config("no observation counts".into()));
    };
    let mut rows = Vec::new();
    for (k, (map_id, truth)) in maps.iter().enumerate() {
        let model = predictor.instantiate(truth);
        let snapshots = observation_tree(truth, &cfg.rig, deepest, cfg.seed + k as u64)?;
        for &n in &counts {
            let obs = &snapshots[n - 1];
            let constructed = match &model {
                Some(p) => p.construct(obs, &cfg.thresholds)?,
                None => obs.grid().clone(),
            };
            rows.push(EvalRow {
                map_id: map_id.clone(),
                observations: n,
                baseline_f1: f1_score(obs.grid(), truth)?.f1,
                predicted_f1: f1_score(&constructed, truth)?.f1,
            });
        }
    }
    Ok(rows)
}
