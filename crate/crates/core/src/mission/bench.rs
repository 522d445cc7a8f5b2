//! Batch experiments: every map × planner × predictor combination, with
//! mapping times compared against the observation-only nearest-frontier
//! run on the same map.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{run_mission, MissionConfig, PredictorChoice, TerminationCause};
use crate::error::{Error, Result};
use crate::grid::OccupancyGrid;
use crate::planner::PlannerKind;

/// A named set of ground-truth maps.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub name: String,
    pub maps: Vec<(String, OccupancyGrid)>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, maps: Vec<(String, OccupancyGrid)>) -> Self {
        Self {
            name: name.into(),
            maps,
        }
    }

    /// Every `.grid` file in `dir`, keyed by file stem, sorted by name.
    pub fn load_dir(name: impl Into<String>, dir: &Path) -> Result<Self> {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        paths.retain(|p| p.extension().is_some_and(|e| e == "grid"));
        paths.sort();
        let maps = paths
            .iter()
            .map(|p| {
                let id = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                Ok((id, OccupancyGrid::load(p)?))
            })
            .collect::<Result<_>>()?;
        Ok(Self::new(name, maps))
    }
}

#[derive(Clone, Debug)]
pub struct BenchSuite {
    pub datasets: Vec<Dataset>,
    pub planners: Vec<PlannerKind>,
    pub predictors: Vec<PredictorChoice>,
    /// Template for every mission; planner, predictor and seed are overridden.
    pub base: MissionConfig,
    /// Seeds per map for stochastic planners: `base.seed + k`.
    pub random_runs: usize,
}

impl BenchSuite {
    pub fn new(datasets: Vec<Dataset>) -> Self {
        Self {
            datasets,
            planners: PlannerKind::ALL.to_vec(),
            predictors: vec![PredictorChoice::Null, PredictorChoice::Oracle],
            base: MissionConfig::default(),
            random_runs: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.datasets.iter().all(|d| d.maps.is_empty()) {
            return Err(Error::Config("benchmark suite has no maps".into()));
        }
        if self.planners.is_empty() || self.predictors.is_empty() {
            return Err(Error::Config("benchmark suite needs a planner and a predictor".into()));
        }
        if self.random_runs == 0 {
            return Err(Error::Config("random_runs must be positive".into()));
        }
        self.base.validate()
    }
}

/// One mission, one CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRow {
    pub dataset: String,
    pub map_id: String,
    pub planner: PlannerKind,
    pub predictor: String,
    pub seed: u64,
    pub path_length: f64,
    pub coverage: f64,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub success: bool,
    pub cause: TerminationCause,
}

pub const RUNS_HEADER: &str =
    "dataset,map_id,planner,predictor,seed,path_length,coverage,f1,precision,recall,success,cause";

impl RunRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.map_id,
            self.planner,
            self.predictor,
            self.seed,
            self.path_length,
            self.coverage,
            self.f1,
            self.precision,
            self.recall,
            self.success,
            self.cause
        )
    }
}

/// Aggregate over the maps of one dataset for one planner × predictor.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dataset: String,
    pub planner: PlannerKind,
    pub predictor: String,
    pub maps: usize,
    pub mean_time: f64,
    pub median_time: f64,
    /// Per-map `1 - time / baseline_time`, then averaged.
    pub mean_reduction: f64,
    pub median_reduction: f64,
    pub success_rate: f64,
    pub mean_f1: f64,
}

pub const SUMMARY_HEADER: &str =
    "dataset,planner,predictor,maps,mean_time,median_time,mean_reduction,median_reduction,success_rate,mean_f1";

impl SummaryRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.dataset,
            self.planner,
            self.predictor,
            self.maps,
            self.mean_time,
            self.median_time,
            self.mean_reduction,
            self.median_reduction,
            self.success_rate,
            self.mean_f1
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub runs: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
}

impl BenchReport {
    pub fn runs_csv(&self) -> String {
        let mut out = format!("{RUNS_HEADER}\n");
        for r in &self.runs {
            let _ = writeln!(out, "{}", r.to_csv());
        }
        out
    }

    pub fn summary_csv(&self) -> String {
        let mut out = format!("{SUMMARY_HEADER}\n");
        for r in &self.summary {
            let _ = writeln!(out, "{}", r.to_csv());
        }
        out
    }

    pub fn find(&self, dataset: &str, planner: PlannerKind, predictor: &str) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.dataset == dataset && r.planner == planner && r.predictor == predictor)
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// `1 - time / baseline`; zero when the baseline never moved.
pub fn reduction(time: f64, baseline: f64) -> f64 {
    if baseline > 0.0 {
        1.0 - time / baseline
    } else {
        0.0
    }
}

struct Job<'a> {
    dataset: &'a str,
    map_id: &'a str,
    truth: &'a OccupancyGrid,
    planner: PlannerKind,
    predictor: &'a PredictorChoice,
    seed: u64,
}

pub fn run_benchmark(suite: &BenchSuite) -> Result<BenchReport> {
    suite.validate()?;
    let baseline_predictor = PredictorChoice::Null;
    let mut jobs = Vec::new();
    for ds in &suite.datasets {
        for (map_id, truth) in &ds.maps {
            let mut push = |planner: PlannerKind, predictor| {
                let runs = if planner.is_stochastic() { suite.random_runs } else { 1 };
                for k in 0..runs as u64 {
                    jobs.push(Job {
                        dataset: &ds.name,
                        map_id,
                        truth,
                        planner,
                        predictor,
                        seed: suite.base.seed + k,
                    });
                }
            };
            for &planner in &suite.planners {
                for predictor in &suite.predictors {
                    push(planner, predictor);
                }
            }
            let covered = suite.planners.contains(&PlannerKind::NearestFrontier)
                && suite.predictors.contains(&baseline_predictor);
            if !covered {
                push(PlannerKind::NearestFrontier, &baseline_predictor);
            }
        }
    }

    let mut all: Vec<RunRow> = jobs
        .par_iter()
        .map(|job| {
            let cfg = MissionConfig {
                planner: job.planner,
                predictor: job.predictor.clone(),
                seed: job.seed,
                ..suite.base.clone()
            };
            let rec = run_mission(job.truth, &cfg)?;
            Ok(RunRow {
                dataset: job.dataset.to_string(),
                map_id: job.map_id.to_string(),
                planner: job.planner,
                predictor: job.predictor.name(),
                seed: job.seed,
                path_length: rec.path_length,
                coverage: rec.coverage,
                f1: rec.score.f1,
                precision: rec.score.precision,
                recall: rec.score.recall,
                success: rec.success,
                cause: rec.cause,
            })
        })
        .collect::<Result<_>>()?;
    all.sort_by(|a, b| {
        (&a.dataset, &a.map_id, a.planner, &a.predictor, a.seed).cmp(&(
            &b.dataset,
            &b.map_id,
            b.planner,
            &b.predictor,
            b.seed,
        ))
    });

    // per (dataset, map): baseline time
    let baseline_name = baseline_predictor.name();
    let baseline: BTreeMap<(&str, &str), f64> = all
        .iter()
        .filter(|r| r.planner == PlannerKind::NearestFrontier && r.predictor == baseline_name)
        .map(|r| ((r.dataset.as_str(), r.map_id.as_str()), r.path_length))
        .collect();

    let mut summary = Vec::new();
    for ds in &suite.datasets {
        for &planner in &suite.planners {
            for predictor in &suite.predictors {
                let name = predictor.name();
                let mut times = Vec::new();
                let mut reductions = Vec::new();
                let mut successes = 0usize;
                let mut runs = 0usize;
                let mut f1s = Vec::new();
                for (map_id, _) in &ds.maps {
                    let rows: Vec<&RunRow> = all
                        .iter()
                        .filter(|r| {
                            r.dataset == ds.name && &r.map_id == map_id && r.planner == planner && r.predictor == name
                        })
                        .collect();
                    let per_map: Vec<f64> = rows.iter().map(|r| r.path_length).collect();
                    let t = mean(&per_map);
                    times.push(t);
                    reductions.push(reduction(t, baseline[&(ds.name.as_str(), map_id.as_str())]));
                    successes += rows.iter().filter(|r| r.success).count();
                    runs += rows.len();
                    f1s.push(mean(&rows.iter().map(|r| r.f1).collect::<Vec<_>>()));
                }
                summary.push(SummaryRow {
                    dataset: ds.name.clone(),
                    planner,
                    predictor: name,
                    maps: ds.maps.len(),
                    mean_time: mean(&times),
                    median_time: median(&times),
                    mean_reduction: mean(&reductions),
                    median_reduction: median(&reductions),
                    success_rate: if runs == 0 {
                        f64::NAN
                    } else {
                        successes as f64 / runs as f64
                    },
                    mean_f1: mean(&f1s),
                });
            }
        }
    }

    // runs that only exist to supply the baseline are not reported
    all.retain(|r| suite.planners.contains(&r.planner) && suite.predictors.iter().any(|p| p.name() == r.predictor));
    Ok(BenchReport { runs: all, summary })
}
