//! Compare the three planners' first decision on a partially known map.

use gridmapper::planner::{detect_frontier, plan};
use gridmapper::{Coord, OccupancyGrid, PlannerKind, PlannerState, SensorRig};

fn main() -> gridmapper::Result<()> {
    let map = OccupancyGrid::parse(
        "############\n\
         #....#??????\n\
         #....#??????\n\
         #.........??\n\
         #....#??????\n\
         ######??????\n",
    )?;
    let frontier = detect_frontier(&map);
    println!("{} frontier cells: {:?}", frontier.len(), frontier.cells());
    for kind in PlannerKind::ALL {
        let mut state = PlannerState::new(Coord::new(1, 1), map.clone(), SensorRig::default(), 0);
        match plan(kind, &mut state)? {
            Some(p) => println!(
                "{kind:>12}: waypoint ({},{}) utility {:>7}, {} steps, first step {:?}",
                p.waypoint.row,
                p.waypoint.col,
                if p.utility.is_nan() {
                    "-".to_string()
                } else {
                    format!("{:.4}", p.utility)
                },
                p.path.len(),
                p.first_step()
            ),
            None => println!("{kind:>12}: nothing reachable"),
        }
    }
    Ok(())
}
