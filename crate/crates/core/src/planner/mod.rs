//! Frontier-based waypoint selection.
//!
//! All three planners work on the constructed map: they solve shortest
//! paths from the agent, keep the frontier cells that are reachable, and pick
//! one of them.
//!
//! * [`plan_random`] picks uniformly and the agent follows the whole path.
//! * [`plan_nearest_frontier`] maximizes `1 / (1 + dist)`.
//! * [`plan_cost_utility`] maximizes `reward / (1 + dist)` where the reward
//!   is the number of Unknown cells the rig would see from the candidate.
//!
//! The greedy planners are re-run after every step. Ties go to the lowest
//! `(row, col)`.

mod frontier;
mod graph;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use frontier::{detect_frontier, is_frontier, Frontier};
pub use graph::{neighbors, shortest_paths, step_allowed, DistanceField, PathCost};

use crate::error::{Error, Result};
use crate::grid::{CellCategory, Coord, OccupancyGrid};
use crate::sensing::{visible_cells, SensorRig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PlannerKind {
    Random,
    NearestFrontier,
    CostUtility,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [
        PlannerKind::Random,
        PlannerKind::NearestFrontier,
        PlannerKind::CostUtility,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Random => "random",
            PlannerKind::NearestFrontier => "nearest",
            PlannerKind::CostUtility => "cost-utility",
        }
    }

    /// Whether the agent follows a whole path before replanning.
    pub fn commits_to_path(self) -> bool {
        self == PlannerKind::Random
    }

    pub fn is_stochastic(self) -> bool {
        self == PlannerKind::Random
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PlannerKind::Random),
            "nearest" | "nearest-frontier" => Ok(PlannerKind::NearestFrontier),
            "cost-utility" | "cost_utility" => Ok(PlannerKind::CostUtility),
            _ => Err(Error::Config(format!("unknown planner {s:?}"))),
        }
    }
}

/// What a planner decides from.
#[derive(Clone, Debug)]
pub struct PlannerState {
    pub pose: Coord,
    /// The constructed map: observations over the thresholded prediction.
    pub map: OccupancyGrid,
    pub rig: SensorRig,
    field: Option<DistanceField>,
    rng: ChaCha8Rng,
}

impl PlannerState {
    pub fn new(pose: Coord, map: OccupancyGrid, rig: SensorRig, seed: u64) -> Self {
        Self {
            pose,
            map,
            rig,
            field: None,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn update(&mut self, pose: Coord, map: OccupancyGrid) {
        self.pose = pose;
        self.map = map;
        self.field = None;
    }

    /// Shortest paths from the current pose, cached until the next update.
    pub fn field(&mut self) -> Result<&DistanceField> {
        if self.field.is_none() {
            self.field = Some(shortest_paths(&self.map, self.pose)?);
        }
        Ok(self.field.as_ref().expect("just computed"))
    }

    /// Frontier cells reachable from the pose, row-major. The pose itself
    /// is never a candidate.
    pub fn reachable_frontier(&mut self) -> Result<Vec<Coord>> {
        let frontier = detect_frontier(&self.map);
        let pose = self.pose;
        let field = self.field()?;
        Ok(frontier
            .cells()
            .iter()
            .copied()
            .filter(|&c| c != pose && field.is_reachable(c))
            .collect())
    }
}

/// A chosen waypoint and the shortest path to it, pose excluded.
#[derive(Clone, Debug, PartialEq)]
pub struct Plan {
    pub waypoint: Coord,
    pub path: Vec<Coord>,
    pub utility: f64,
}

impl Plan {
    pub fn first_step(&self) -> Option<Coord> {
        self.path.first().copied()
    }
}

fn plan_to(state: &mut PlannerState, waypoint: Coord, utility: f64) -> Result<Plan> {
    let mut path = state.field()?.path_to(waypoint).expect("waypoint is reachable");
    path.remove(0);
    Ok(Plan {
        waypoint,
        path,
        utility,
    })
}

/// `reward / (1 + cost)`.
pub fn utility(reward: f64, cost: f64) -> f64 {
    reward / (1.0 + cost)
}

/// Unknown cells the rig would report from `v` on `map`, with Unknown cells
/// letting beams through.
pub fn exploration_reward(map: &OccupancyGrid, v: Coord, rig: &SensorRig) -> usize {
    visible_cells(map, v, rig)
        .iter()
        .filter(|(_, cat)| *cat == CellCategory::Unknown)
        .count()
}

/// Index of the maximum; the first wins on ties, so row-major candidate
/// order gives the row-major tie-break.
fn argmax(scores: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.enumerate() {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// Uniformly random reachable frontier cell. `None` when there is none.
pub fn plan_random(state: &mut PlannerState) -> Result<Option<Plan>> {
    let candidates = state.reachable_frontier()?;
    if candidates.is_empty() {
        return Ok(None);
    }
    let pick = candidates[state.rng.gen_range(0..candidates.len())];
    plan_to(state, pick, f64::NAN).map(Some)
}

pub fn plan_nearest_frontier(state: &mut PlannerState) -> Result<Option<Plan>> {
    plan_by_utility(state, |_, _| 1.0)
}

pub fn plan_cost_utility(state: &mut PlannerState) -> Result<Option<Plan>> {
    let rig = state.rig.clone();
    plan_by_utility(state, |map, v| exploration_reward(map, v, &rig) as f64)
}

/// Greedy selection over the reachable frontier with an arbitrary reward.
pub fn plan_by_utility(
    state: &mut PlannerState,
    reward: impl Fn(&OccupancyGrid, Coord) -> f64,
) -> Result<Option<Plan>> {
    let candidates = state.reachable_frontier()?;
    let field = state.field()?;
    let costs: Vec<f64> = candidates.iter().map(|&v| field.distance(v)).collect();
    let scores: Vec<f64> = candidates
        .iter()
        .zip(costs)
        .map(|(&v, cost)| utility(reward(&state.map, v), cost))
        .collect();
    match argmax(scores.iter().copied()) {
        Some(i) => plan_to(state, candidates[i], scores[i]).map(Some),
        None => Ok(None),
    }
}

pub fn plan(kind: PlannerKind, state: &mut PlannerState) -> Result<Option<Plan>> {
    match kind {
        PlannerKind::Random => plan_random(state),
        PlannerKind::NearestFrontier => plan_nearest_frontier(state),
        PlannerKind::CostUtility => plan_cost_utility(state),
    }
}

/// Instruction from the fail-safe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fallback {
    /// Pick the next waypoint on the observation-only map.
    UseObservationMap,
}

/// Detect a prediction that seals the agent off: nothing reachable on the
/// planning map while the raw observations still lead somewhere.
pub fn failsafe_check(state: &mut PlannerState, obs: &OccupancyGrid) -> Result<Option<Fallback>> {
    if !state.reachable_frontier()?.is_empty() {
        return Ok(None);
    }
    if !obs.is_free(state.pose) {
        return Ok(None);
    }
    let field = shortest_paths(obs, state.pose)?;
    let open = detect_frontier(obs)
        .cells()
        .iter()
        .any(|&c| c != state.pose && field.is_reachable(c));
    Ok(open.then_some(Fallback::UseObservationMap))
}
