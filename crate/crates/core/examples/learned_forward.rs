//! Build an untrained network, write it as an MPW1 file, load it back and
//! run a prediction.
//!
//! `cargo run --release --example learned_forward -- [weights.mpw1]`

use gridmapper::nn::{load_weights, save_weights};
use gridmapper::predictor::Predictor;
use gridmapper::{
    generate_floorplan, sense, GeneratorConfig, LearnedPredictor, ObservationMap, PredictorWeights, SensorRig,
};

fn main() -> gridmapper::Result<()> {
    let model = match std::env::args().nth(1) {
        Some(path) => LearnedPredictor::load(path)?,
        None => {
            let weights = PredictorWeights::random((32, 32), 9, 2.0);
            let bytes = save_weights(&weights)?;
            println!(
                "{} layers, {} parameters, {} bytes",
                weights.layers.len(),
                weights.param_count(),
                bytes.len()
            );
            LearnedPredictor::new(load_weights(&bytes)?)?
        }
    };
    let (h, w) = model.weights().input_dims;
    let cfg = GeneratorConfig {
        height: h,
        width: w,
        ..GeneratorConfig::with_seed(1)
    };
    let truth = generate_floorplan(&cfg)?;
    let pose = truth.coords().find(|&c| truth.is_free(c)).expect("free cell");
    let mut obs = ObservationMap::new(h, w);
    obs.absorb(&sense(&truth, pose, &SensorRig::default())?)?;

    let p = model.predict(&obs)?;
    let (lo, hi) = p
        .values()
        .iter()
        .fold((1.0f64, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!("obstacle probability range [{lo:.4}, {hi:.4}]");
    let constructed = model.construct(&obs, &Default::default())?;
    println!(
        "coverage: observed {:.3}, constructed {:.3}",
        obs.grid().coverage(),
        constructed.coverage()
    );
    Ok(())
}
