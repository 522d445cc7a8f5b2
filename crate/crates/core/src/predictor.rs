//! Map prediction: probability maps, confidence thresholding, and overlaying
//! observations onto the thresholded prediction.

use crate::error::{Error, Result};
use crate::grid::{CellCategory, OccupancyGrid, ProbabilityGrid};
use crate::sensing::ObservationMap;

/// Per-class confidence levels. A cell is called Free when its obstacle
/// probability is at most `(1 - delta_free) / 2` and Obstacle when it is at
/// least `(1 + delta_obstacle) / 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdConfig {
    pub delta_free: f64,
    pub delta_obstacle: f64,
}

impl Default for ThresholdConfig {
    /// 93% confidence for vacancy, 95% for occupancy.
    fn default() -> Self {
        Self {
            delta_free: 0.93,
            delta_obstacle: 0.95,
        }
    }
}

impl ThresholdConfig {
    pub const fn new(delta_free: f64, delta_obstacle: f64) -> Self {
        Self {
            delta_free,
            delta_obstacle,
        }
    }

    /// The 85%/85% setting used for the single-map walkthrough.
    pub const fn preset_85() -> Self {
        Self::new(0.85, 0.85)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("delta_free", self.delta_free), ("delta_obstacle", self.delta_obstacle)] {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::Config(format!("{name}={d} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn free_cut(&self) -> f64 {
        (1.0 - self.delta_free) / 2.0
    }

    pub fn obstacle_cut(&self) -> f64 {
        (1.0 + self.delta_obstacle) / 2.0
    }

    /// Classify one probability. Obstacle is tested first, so when both
    /// deltas are zero a probability of exactly 0.5 is an obstacle.
    pub fn classify(&self, p: f64) -> CellCategory {
        if p >= self.obstacle_cut() {
            CellCategory::Obstacle
        } else if p <= self.free_cut() {
            CellCategory::Free
        } else {
            CellCategory::Unknown
        }
    }
}

pub fn threshold(p: &ProbabilityGrid, cfg: &ThresholdConfig) -> OccupancyGrid {
    let (h, w) = p.dims();
    let cells = p.values().iter().map(|&v| cfg.classify(v)).collect();
    OccupancyGrid::from_cells(h, w, cells).expect("dims carried over from the probability grid")
}

/// Overlay observed cells onto a predicted map; observations always win.
pub fn synthesize(obs: &ObservationMap, predicted: &OccupancyGrid) -> Result<OccupancyGrid> {
    obs.check_same_dims(predicted)?;
    let (h, w) = obs.dims();
    let cells = obs
        .cells()
        .iter()
        .zip(predicted.cells())
        .map(|(&o, &p)| if o.is_known() { o } else { p })
        .collect();
    OccupancyGrid::from_cells(h, w, cells)
}

/// Something that maps a partial observation to obstacle probabilities over
/// the whole grid.
pub trait Predictor: Send + Sync {
    fn predict(&self, obs: &ObservationMap) -> Result<ProbabilityGrid>;

    /// Threshold the prediction and overlay the observations.
    fn construct(&self, obs: &ObservationMap, cfg: &ThresholdConfig) -> Result<OccupancyGrid> {
        let p = self.predict(obs)?;
        if p.dims() != obs.dims() {
            return Err(Error::DimensionMismatch {
                left: obs.dims(),
                right: p.dims(),
            });
        }
        synthesize(obs, &threshold(&p, cfg))
    }
}

/// Observed Free is 0, observed Obstacle is 1, everything else 0.5.
pub fn null_predict(obs: &ObservationMap) -> ProbabilityGrid {
    let (h, w) = obs.dims();
    let values = obs
        .cells()
        .iter()
        .map(|c| match c {
            CellCategory::Free => 0.0,
            CellCategory::Obstacle => 1.0,
            CellCategory::Unknown => 0.5,
        })
        .collect();
    ProbabilityGrid::from_values(h, w, values).expect("values are in range")
}

/// Ground truth as a probability map, after checking the observations
/// against it.
pub fn oracle_predict(obs: &ObservationMap, truth: &OccupancyGrid) -> Result<ProbabilityGrid> {
    obs.check_same_dims(truth)?;
    if let Some(i) = obs
        .cells()
        .iter()
        .zip(truth.cells())
        .position(|(o, t)| o.is_known() && o != t)
    {
        return Err(Error::Contradiction(obs.coord(i)));
    }
    let (h, w) = truth.dims();
    let values = truth
        .cells()
        .iter()
        .map(|c| match c {
            CellCategory::Free => 0.0,
            CellCategory::Obstacle => 1.0,
            CellCategory::Unknown => 0.5,
        })
        .collect();
    ProbabilityGrid::from_values(h, w, values)
}

/// Observation-only baseline.
#[derive(Clone, Copy, Debug, Default)]
pub struct NullPredictor;

impl Predictor for NullPredictor {
    fn predict(&self, obs: &ObservationMap) -> Result<ProbabilityGrid> {
        Ok(null_predict(obs))
    }
}

/// Perfect knowledge of the map; an upper bound for planner integration.
#[derive(Clone, Debug)]
pub struct OraclePredictor {
    truth: OccupancyGrid,
}

impl OraclePredictor {
    pub fn new(truth: OccupancyGrid) -> Self {
        Self { truth }
    }
}

impl Predictor for OraclePredictor {
    fn predict(&self, obs: &ObservationMap) -> Result<ProbabilityGrid> {
        oracle_predict(obs, &self.truth)
    }
}

/// Returns the same probability map regardless of the observations. Handy
/// for scripted scenarios.
#[derive(Clone, Debug)]
pub struct FixedPredictor {
    map: ProbabilityGrid,
}

impl FixedPredictor {
    pub fn new(map: ProbabilityGrid) -> Self {
        Self { map }
    }
}

impl Predictor for FixedPredictor {
    fn predict(&self, obs: &ObservationMap) -> Result<ProbabilityGrid> {
        if self.map.dims() != obs.dims() {
            return Err(Error::DimensionMismatch {
                left: obs.dims(),
                right: self.map.dims(),
            });
        }
        Ok(self.map.clone())
    }
}
