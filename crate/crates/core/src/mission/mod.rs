//! The mapping loop: sense, accumulate, predict, threshold, synthesize,
//! plan and move, until the constructed map reaches the coverage goal.

pub mod bench;
pub mod eval;
mod metrics;

use std::collections::VecDeque;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use metrics::{f1_score, F1Score};

use crate::error::{Error, Result};
use crate::grid::{CellCategory, Coord, OccupancyGrid};
use crate::kv::KeyValues;
use crate::nn::LearnedPredictor;
use crate::planner::{detect_frontier, failsafe_check, plan, step_allowed, PlannerKind, PlannerState};
use crate::predictor::{NullPredictor, OraclePredictor, Predictor, ThresholdConfig};
use crate::sensing::{sense, ObservationMap, SensorRig};

/// Which map predictor feeds the constructed map.
#[derive(Clone)]
pub enum PredictorChoice {
    /// No prediction stage at all; the constructed map is the observation
    /// map. Kept as a control for the prediction pipeline.
    Disabled,
    Null,
    Oracle,
    Learned {
        path: PathBuf,
        model: Arc<LearnedPredictor>,
    },
}

impl PredictorChoice {
    /// Parse `off`, `null`, `oracle` or `learned:PATH`. Learned weights are
    /// loaded here.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "off" | "none" => Ok(Self::Disabled),
            "null" => Ok(Self::Null),
            "oracle" => Ok(Self::Oracle),
            _ => match s.strip_prefix("learned:") {
                Some(path) => {
                    let path = PathBuf::from(path);
                    let model = Arc::new(LearnedPredictor::load(&path)?);
                    Ok(Self::Learned { path, model })
                }
                None => Err(Error::Config(format!("unknown predictor {s:?}"))),
            },
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Disabled => "off".into(),
            Self::Null => "null".into(),
            Self::Oracle => "oracle".into(),
            Self::Learned { path, .. } => format!("learned:{}", path.display()),
        }
    }

    /// The predictor to use on `truth`, `None` for the disabled stage.
    pub fn instantiate(&self, truth: &OccupancyGrid) -> Option<Arc<dyn Predictor>> {
        match self {
            Self::Disabled => None,
            Self::Null => Some(Arc::new(NullPredictor)),
            Self::Oracle => Some(Arc::new(OraclePredictor::new(truth.clone()))),
            Self::Learned { model, .. } => Some(model.clone()),
        }
    }
}

impl fmt::Debug for PredictorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PredictorChoice({})", self.name())
    }
}

impl fmt::Display for PredictorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&self.name())
    }
}

impl PartialEq for PredictorChoice {
    fn eq(&self, other: &Self) -> bool {
        self.name() == other.name()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StartPolicy {
    /// First Free cell in row-major order.
    #[default]
    TopLeft,
    At(Coord),
}

impl StartPolicy {
    pub fn resolve(self, truth: &OccupancyGrid) -> Result<Coord> {
        match self {
            StartPolicy::TopLeft => truth
                .coords()
                .find(|&c| truth.get(c) == CellCategory::Free)
                .ok_or_else(|| Error::Config("map has no free cell".into())),
            StartPolicy::At(c) => {
                if !truth.in_bounds(c) {
                    Err(Error::OutOfBounds(c))
                } else if !truth.is_free(c) {
                    Err(Error::NotFree(c))
                } else {
                    Ok(c)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MissionConfig {
    pub planner: PlannerKind,
    pub predictor: PredictorChoice,
    pub thresholds: ThresholdConfig,
    /// Fraction of the map that must be non-Unknown in the constructed map.
    pub coverage_goal: f64,
    pub rig: SensorRig,
    pub start: StartPolicy,
    pub seed: u64,
    /// Decision steps before giving up; `None` means ten per map cell.
    pub step_cap: Option<usize>,
    pub failsafe: bool,
    /// Minimum final F1 for a goal-reaching mission to count as a success.
    pub f1_floor: f64,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            planner: PlannerKind::NearestFrontier,
            predictor: PredictorChoice::Null,
            thresholds: ThresholdConfig::default(),
            coverage_goal: 0.98,
            rig: SensorRig::default(),
            start: StartPolicy::TopLeft,
            seed: 0,
            step_cap: None,
            failsafe: true,
            f1_floor: 0.9,
        }
    }
}

impl MissionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.coverage_goal > 0.0 && self.coverage_goal <= 1.0) {
            return Err(Error::Config(format!(
                "coverage_goal={} outside (0, 1]",
                self.coverage_goal
            )));
        }
        if self.step_cap == Some(0) {
            return Err(Error::Config("step_cap must be positive".into()));
        }
        self.thresholds.validate()?;
        self.rig.validate()
    }

    /// Overlay settings from a `key=value` config file.
    pub fn apply_key_values(mut self, kv: &KeyValues) -> Result<Self> {
        for key in kv.keys() {
            let known = [
                "planner",
                "predictor",
                "delta_free",
                "delta_obstacle",
                "coverage_goal",
                "beams",
                "beam_range",
                "first_beam_azimuth",
                "seed",
                "step_cap",
                "failsafe",
                "f1_floor",
                "start_row",
                "start_col",
            ];
            if !known.contains(&key) {
                return Err(Error::Config(format!("unknown config key {key:?}")));
            }
        }
        if let Some(v) = kv.get_parsed("planner")? {
            self.planner = v;
        }
        if let Some(v) = kv.get("predictor") {
            self.predictor = PredictorChoice::parse(v)?;
        }
        if let Some(v) = kv.get_parsed("delta_free")? {
            self.thresholds.delta_free = v;
        }
        if let Some(v) = kv.get_parsed("delta_obstacle")? {
            self.thresholds.delta_obstacle = v;
        }
        if let Some(v) = kv.get_parsed("coverage_goal")? {
            self.coverage_goal = v;
        }
        let beams = kv.get_parsed("beams")?.unwrap_or(self.rig.beam_count);
        let range = kv.get_parsed("beam_range")?.unwrap_or(self.rig.range);
        let azimuth = kv
            .get_parsed("first_beam_azimuth")?
            .unwrap_or(self.rig.first_beam_azimuth);
        self.rig = SensorRig {
            first_beam_azimuth: azimuth,
            ..SensorRig::new(beams, range)
        };
        if let Some(v) = kv.get_parsed("seed")? {
            self.seed = v;
        }
        if let Some(v) = kv.get_parsed("step_cap")? {
            self.step_cap = Some(v);
        }
        if let Some(v) = kv.get_parsed("failsafe")? {
            self.failsafe = v;
        }
        if let Some(v) = kv.get_parsed("f1_floor")? {
            self.f1_floor = v;
        }
        match (kv.get_parsed("start_row")?, kv.get_parsed("start_col")?) {
            (Some(r), Some(c)) => self.start = StartPolicy::At(Coord::new(r, c)),
            (None, None) => {}
            _ => return Err(Error::Config("start_row and start_col go together".into())),
        }
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationCause {
    GoalReached,
    FrontierExhausted,
    StepCap,
    Sealed,
}

impl TerminationCause {
    pub fn name(self) -> &'static str {
        match self {
            TerminationCause::GoalReached => "goal_reached",
            TerminationCause::FrontierExhausted => "frontier_exhausted",
            TerminationCause::StepCap => "step_cap",
            TerminationCause::Sealed => "sealed",
        }
    }
}

impl fmt::Display for TerminationCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepEntry {
    pub step: usize,
    pub pose: Coord,
    pub path_length: f64,
    pub coverage: f64,
    pub frontier_size: usize,
    /// Set when this step's waypoint came from the fail-safe.
    pub fallback: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MissionRecord {
    pub planner: PlannerKind,
    pub predictor: String,
    pub seed: u64,
    pub entries: Vec<StepEntry>,
    /// Mapping time: total Euclidean distance travelled.
    pub path_length: f64,
    pub moves: usize,
    pub coverage: f64,
    pub score: F1Score,
    pub success: bool,
    pub cause: TerminationCause,
    pub fallbacks: usize,
}

impl MissionRecord {
    pub fn trajectory(&self) -> Vec<Coord> {
        self.entries.iter().map(|e| e.pose).collect()
    }

    /// One JSON object per step followed by a summary object.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("plain data"));
            out.push('\n');
        }
        let summary = serde_json::json!({
            "summary": {
                "planner": self.planner.name(),
                "predictor": self.predictor,
                "seed": self.seed,
                "path_length": self.path_length,
                "moves": self.moves,
                "coverage": self.coverage,
                "f1": self.score.f1,
                "precision": self.score.precision,
                "recall": self.score.recall,
                "success": self.success,
                "cause": self.cause.name(),
                "fallbacks": self.fallbacks,
            }
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

/// Run one mission on `truth` with the predictor named in `cfg`.
pub fn run_mission(truth: &OccupancyGrid, cfg: &MissionConfig) -> Result<MissionRecord> {
    let predictor = cfg.predictor.instantiate(truth);
    run_mission_with(truth, cfg, predictor.as_deref())
}

/// Run one mission with an explicit predictor; `None` skips the prediction
/// stage entirely. `cfg.predictor` is only used for labelling the record.
pub fn run_mission_with(
    truth: &OccupancyGrid,
    cfg: &MissionConfig,
    predictor: Option<&dyn Predictor>,
) -> Result<MissionRecord> {
    cfg.validate()?;
    let (h, w) = truth.dims();
    let mut pose = cfg.start.resolve(truth)?;
    let cap = cfg.step_cap.unwrap_or(10 * h * w);

    let mut obs = ObservationMap::new(h, w);
    let mut constructed: Option<OccupancyGrid> = None;
    let mut planner = PlannerState::new(pose, OccupancyGrid::unknown(h, w), cfg.rig.clone(), cfg.seed);
    let mut committed: VecDeque<Coord> = VecDeque::new();
    let mut committed_on_obs = false;

    let mut entries = Vec::new();
    let mut path_length = 0.0;
    let mut moves = 0;
    let mut fallbacks = 0;
    let mut used_fallback = false;

    let cause = loop {
        let readings = sense(truth, pose, &cfg.rig)?;
        let fresh = obs.absorb(&readings)?;
        if fresh > 0 || constructed.is_none() {
            constructed = Some(match predictor {
                Some(p) => p.construct(&obs, &cfg.thresholds)?,
                None => obs.grid().clone(),
            });
        }
        let map = constructed.as_ref().expect("constructed above");
        let coverage = map.coverage();
        entries.push(StepEntry {
            step: entries.len(),
            pose,
            path_length,
            coverage,
            frontier_size: detect_frontier(map).len(),
            fallback: used_fallback,
        });
        if coverage >= cfg.coverage_goal {
            break TerminationCause::GoalReached;
        }
        if entries.len() > cap {
            break TerminationCause::StepCap;
        }

        let planning_map = if committed_on_obs { obs.grid() } else { map };
        let next = match committed.front() {
            Some(&c) if step_allowed(planning_map, pose, c) => committed.pop_front(),
            _ => None,
        };
        used_fallback = committed_on_obs && next.is_some();
        let next = match next {
            Some(c) => c,
            None => {
                committed.clear();
                planner.update(pose, map.clone());
                let mut chosen = plan(cfg.planner, &mut planner)?;
                let mut on_obs = false;
                if chosen.is_none() && failsafe_check(&mut planner, obs.grid())?.is_some() {
                    if !cfg.failsafe {
                        break TerminationCause::Sealed;
                    }
                    planner.update(pose, obs.grid().clone());
                    chosen = plan(cfg.planner, &mut planner)?;
                    on_obs = true;
                    fallbacks += 1;
                }
                let Some(chosen) = chosen else {
                    break TerminationCause::FrontierExhausted;
                };
                used_fallback = on_obs;
                let mut path: VecDeque<Coord> = chosen.path.into();
                let first = path.pop_front().expect("waypoint differs from the pose");
                if cfg.planner.commits_to_path() {
                    committed = path;
                    committed_on_obs = on_obs;
                }
                first
            }
        };

        if !step_allowed(truth, pose, next) {
            // a predicted opening that is not there: learn it by contact and replan
            let contact: Vec<_> = [next, Coord::new(pose.row, next.col), Coord::new(next.row, pose.col)]
                .into_iter()
                .map(|c| (c, truth.get(c)))
                .collect();
            if obs.absorb(&contact)? > 0 {
                constructed = None;
            }
            committed.clear();
            continue;
        }
        path_length += pose.distance(next);
        moves += 1;
        pose = next;
        if committed.is_empty() {
            committed_on_obs = false;
        }
    };

    let map = constructed.expect("at least one sensing pass");
    let score = f1_score(&map, truth)?;
    Ok(MissionRecord {
        planner: cfg.planner,
        predictor: cfg.predictor.name(),
        seed: cfg.seed,
        entries,
        path_length,
        moves,
        coverage: map.coverage(),
        score,
        success: cause == TerminationCause::GoalReached && score.f1 >= cfg.f1_floor,
        cause,
        fallbacks,
    })
}
