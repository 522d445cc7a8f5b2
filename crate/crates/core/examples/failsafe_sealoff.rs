//! A prediction that walls off the only corridor. With the fail-safe the
//! agent plans on its raw observations until the corridor is seen open.

use gridmapper::{run_mission_with, CellCategory, FixedPredictor, MissionConfig, OccupancyGrid, ProbabilityGrid};

fn main() -> gridmapper::Result<()> {
    let (h, w) = (12, 50);
    let mut text = String::new();
    for r in 0..h {
        for c in 0..w {
            let room = (1..=10).contains(&c) || (39..=48).contains(&c);
            let free = (1..=10).contains(&r) && (room || (r == 5 && (11..=38).contains(&c)));
            text.push(if free { '.' } else { '#' });
        }
        text.push('\n');
    }
    let truth = OccupancyGrid::parse(&text)?;
    // exact in the first room, a wall across the far corridor, undecided in the second room
    let values = truth
        .coords()
        .map(|c| match (c.row, c.col) {
            (_, 39..) => 0.5,
            (5, 20..) => 1.0,
            _ if truth.get(c) == CellCategory::Obstacle => 1.0,
            _ => 0.0,
        })
        .collect();
    let predictor = FixedPredictor::new(ProbabilityGrid::from_values(h, w, values)?);

    for failsafe in [true, false] {
        let cfg = MissionConfig {
            failsafe,
            ..MissionConfig::default()
        };
        let rec = run_mission_with(&truth, &cfg, Some(&predictor))?;
        println!(
            "failsafe={failsafe}: {} after {} moves, {} fallbacks, coverage {:.3}",
            rec.cause, rec.moves, rec.fallbacks, rec.coverage
        );
    }
    Ok(())
}
