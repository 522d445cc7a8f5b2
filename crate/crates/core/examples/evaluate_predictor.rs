//! F1 against the ground truth as observations accumulate, for raw
//! observations and for the oracle's completed map.

use gridmapper::mission::eval::eval_csv;
use gridmapper::{evaluate_predictor, generate_dataset, EvalConfig, GeneratorConfig, PredictorChoice};

fn main() -> gridmapper::Result<()> {
    let maps: Vec<_> = generate_dataset(&GeneratorConfig::with_seed(900), 3)?
        .into_iter()
        .enumerate()
        .map(|(k, g)| (format!("held_out_{k}"), g))
        .collect();
    let rows = evaluate_predictor(&maps, &PredictorChoice::Oracle, &EvalConfig::default())?;
    print!("{}", eval_csv(&rows));
    Ok(())
}
