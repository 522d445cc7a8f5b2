//! One mission per planner on the same floorplan, with and without the
//! oracle predictor.

use gridmapper::{generate_floorplan, run_mission, GeneratorConfig, MissionConfig, PlannerKind, PredictorChoice};

fn main() -> gridmapper::Result<()> {
    let truth = generate_floorplan(&GeneratorConfig::with_seed(3))?;
    for predictor in [PredictorChoice::Null, PredictorChoice::Oracle] {
        for planner in PlannerKind::ALL {
            let cfg = MissionConfig {
                planner,
                predictor: predictor.clone(),
                ..MissionConfig::default()
            };
            let rec = run_mission(&truth, &cfg)?;
            println!(
                "{:<7} {:<13} {:>8.2} length {:>5} moves  coverage {:.3}  F1 {:.3}  {}",
                predictor.name(),
                planner.name(),
                rec.path_length,
                rec.moves,
                rec.coverage,
                rec.score.f1,
                rec.cause
            );
        }
    }
    Ok(())
}
