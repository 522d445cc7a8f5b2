use std::path::PathBuf;

use gridmapper::nn::{load_weights, save_weights};
use gridmapper::predictor::Predictor;
use gridmapper::{LearnedPredictor, ObservationMap, OccupancyGrid, OneHotGrid, ThresholdConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn cases() -> Vec<(OccupancyGrid, Vec<f64>)> {
    let text = std::fs::read_to_string(fixture("random_13x11.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let grid = OccupancyGrid::parse(c["grid"].as_str().unwrap()).unwrap();
            let p = c["probabilities"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_f64().unwrap())
                .collect();
            (grid, p)
        })
        .collect()
}

#[test]
fn externally_written_file_decodes() {
    let bytes = std::fs::read(fixture("random_13x11.mpw1")).unwrap();
    let w = load_weights(&bytes).unwrap();
    assert_eq!(w.input_dims, (13, 11));
    assert!(w.is_standard_layout());
    // the codec writes byte-identical files
    assert_eq!(save_weights(&w).unwrap(), bytes);
}

#[test]
fn forward_matches_reference_outputs() {
    let model = LearnedPredictor::load(fixture("random_13x11.mpw1")).unwrap();
    for (k, (grid, expected)) in cases().into_iter().enumerate() {
        let got = model.weights().forward(&OneHotGrid::encode(&grid)).unwrap();
        let err = got
            .values()
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-5, "case {k}: max error {err}");
    }
}

#[test]
fn learned_construct_keeps_observations() {
    let model = LearnedPredictor::load(fixture("random_13x11.mpw1")).unwrap();
    for (grid, _) in cases() {
        let obs = ObservationMap::from_grid(grid.clone());
        let built = model.construct(&obs, &ThresholdConfig::preset_85()).unwrap();
        for c in grid.coords() {
            if grid.get(c).is_known() {
                assert_eq!(built.get(c), grid.get(c));
            }
        }
    }
}

#[test]
fn wrong_input_size_is_rejected() {
    let model = LearnedPredictor::load(fixture("random_13x11.mpw1")).unwrap();
    let obs = ObservationMap::new(12, 11);
    assert!(model.predict(&obs).is_err());
}
