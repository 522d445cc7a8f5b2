//! Grid-world indoor exploration with prediction-aided frontier planning.
//!
//! An agent with a ray-cast range sensor explores a categorical occupancy
//! grid. Its partial observations are completed by a map predictor, the
//! prediction is thresholded and merged back under the observations, and a
//! frontier planner picks where to go next on the merged map.
//!
//! ```
//! use gridmapper::{generate_floorplan, run_mission, GeneratorConfig, MissionConfig, PlannerKind};
//!
//! let truth = generate_floorplan(&GeneratorConfig { height: 24, width: 24, split_depth_range: 1..=2, ..GeneratorConfig::with_seed(7) })?;
//! let cfg = MissionConfig { planner: PlannerKind::CostUtility, ..MissionConfig::default() };
//! let record = run_mission(&truth, &cfg)?;
//! assert!(record.coverage >= 0.98);
//! # Ok::<(), gridmapper::Error>(())
//! ```

pub mod error;
pub mod grid;
pub mod kv;
pub mod mission;
pub mod nn;
pub mod planner;
pub mod predictor;
pub mod sensing;
pub mod worldgen;

pub use error::{Error, Result};
pub use grid::{CellCategory, Coord, OccupancyGrid, OneHotGrid, ProbabilityGrid};
pub use kv::KeyValues;
pub use mission::bench::{run_benchmark, BenchReport, BenchSuite, Dataset};
pub use mission::eval::{evaluate_predictor, EvalConfig};
pub use mission::{
    f1_score, run_mission, run_mission_with, F1Score, MissionConfig, MissionRecord, PredictorChoice, StartPolicy,
    TerminationCause,
};
pub use nn::{LearnedPredictor, PredictorWeights};
pub use planner::{plan, PlannerKind, PlannerState};
pub use predictor::{
    synthesize, threshold, FixedPredictor, NullPredictor, OraclePredictor, Predictor, ThresholdConfig,
};
pub use sensing::{sense, ObservationMap, SensorRig};
pub use worldgen::{generate_dataset, generate_floorplan, GeneratorConfig};
