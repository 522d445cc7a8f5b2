//! Walk a few poses through a floorplan and watch the observation map fill in.

use gridmapper::{generate_floorplan, sense, Coord, GeneratorConfig, ObservationMap, SensorRig};

fn main() -> gridmapper::Result<()> {
    let cfg = GeneratorConfig {
        height: 24,
        width: 40,
        split_depth_range: 2..=3,
        ..GeneratorConfig::with_seed(5)
    };
    let truth = generate_floorplan(&cfg)?;
    let rig = SensorRig::default();
    let mut obs = ObservationMap::new(truth.height(), truth.width());

    let poses: Vec<Coord> = truth
        .coords()
        .filter(|&c| truth.is_free(c))
        .step_by(97)
        .take(4)
        .collect();
    for pose in poses {
        let readings = sense(&truth, pose, &rig)?;
        let fresh = obs.absorb(&readings)?;
        println!(
            "pose ({:>2},{:>2}): {:>3} readings, {:>3} new cells, coverage {:.3}",
            pose.row,
            pose.col,
            readings.len(),
            fresh,
            obs.grid().coverage()
        );
    }
    assert!(obs.consistent_with(&truth));
    print!("{}", obs.grid().to_text());
    Ok(())
}
