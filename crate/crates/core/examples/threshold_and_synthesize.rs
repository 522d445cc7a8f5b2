//! Turn a probability map into a categorical prediction and lay the
//! observations over it.

use gridmapper::{synthesize, threshold, ObservationMap, OccupancyGrid, ProbabilityGrid, ThresholdConfig};

fn main() -> gridmapper::Result<()> {
    let obs = ObservationMap::from_grid(OccupancyGrid::parse("#####\n#..??\n#.???\n")?);
    let p = ProbabilityGrid::from_values(
        3,
        5,
        vec![
            0.99, 0.99, 0.98, 0.97, 0.99, //
            0.99, 0.01, 0.02, 0.03, 0.60, //
            0.99, 0.50, 0.02, 0.98, 0.99,
        ],
    )?;
    for cfg in [ThresholdConfig::default(), ThresholdConfig::preset_85()] {
        println!(
            "delta_free={} delta_obstacle={}: free if p <= {:.4}, obstacle if p >= {:.4}",
            cfg.delta_free,
            cfg.delta_obstacle,
            cfg.free_cut(),
            cfg.obstacle_cut()
        );
        let predicted = threshold(&p, &cfg);
        let constructed = synthesize(&obs, &predicted)?;
        print!(
            "predicted:\n{}constructed:\n{}",
            predicted.to_text(),
            constructed.to_text()
        );
        println!(
            "coverage {:.3} -> {:.3}\n",
            obs.grid().coverage(),
            constructed.coverage()
        );
    }
    Ok(())
}
