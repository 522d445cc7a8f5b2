//! Planner × predictor comparison over a generated suite.
//!
//! `cargo run --release --example benchmark_suite -- [maps] [random_runs]`

use gridmapper::{generate_floorplan, run_benchmark, BenchSuite, Dataset, GeneratorConfig, PredictorChoice};

fn main() -> gridmapper::Result<()> {
    let mut args = std::env::args().skip(1);
    let maps: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    let random_runs: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);

    let grids = (0..maps)
        .map(|s| {
            Ok((
                format!("map_{s:06}"),
                generate_floorplan(&GeneratorConfig::with_seed(s))?,
            ))
        })
        .collect::<gridmapper::Result<Vec<_>>>()?;
    let mut suite = BenchSuite::new(vec![Dataset::new("generated", grids)]);
    suite.predictors = vec![PredictorChoice::Null, PredictorChoice::Oracle];
    suite.random_runs = random_runs;

    let started = std::time::Instant::now();
    let report = run_benchmark(&suite)?;
    print!("{}", report.summary_csv());
    eprintln!("{} missions in {:.1?}", report.runs.len(), started.elapsed());
    Ok(())
}
