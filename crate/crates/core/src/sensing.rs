//! Range-sensor model and observation accumulation.
//!
//! A rig is a fan of fixed beams around the agent. Each beam walks the grid
//! in half-cell increments from the pose center, rounding to the nearest
//! cell and skipping repeats. When consecutive cells are diagonal neighbors
//! the beam passes a cell corner; if both cells flanking that corner are
//! obstacles the beam is blocked there, so rays never leak through a sealed
//! wall corner.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::grid::{CellCategory, Coord, OccupancyGrid};

pub type Readings = Vec<(Coord, CellCategory)>;

#[derive(Clone, Debug, PartialEq)]
pub struct SensorRig {
    pub beam_count: usize,
    /// Degrees between neighboring beams.
    pub angular_spacing: f64,
    /// Maximum range in cells, measured between cell centers.
    pub range: f64,
    /// Azimuth of beam 0 in degrees, counter-clockwise from east.
    pub first_beam_azimuth: f64,
}

impl Default for SensorRig {
    fn default() -> Self {
        Self::new(16, 20.0)
    }
}

impl SensorRig {
    /// Evenly spaced beams covering the full circle.
    pub fn new(beam_count: usize, range: f64) -> Self {
        Self {
            beam_count,
            angular_spacing: 360.0 / beam_count as f64,
            range,
            first_beam_azimuth: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beam_count == 0 {
            return Err(Error::Config("sensor rig needs at least one beam".into()));
        }
        if (self.beam_count as f64 * self.angular_spacing - 360.0).abs() > 1e-9 {
            return Err(Error::Config("beams must cover exactly 360 degrees".into()));
        }
        if self.range.is_nan() || self.range <= 0.0 {
            return Err(Error::Config("beam range must be positive".into()));
        }
        Ok(())
    }

    /// Unit beam directions as `(d_row, d_col)`.
    ///
    /// Angles are reduced to a quadrant before the trig call and rotated back
    /// with exact sign swaps, so a rig rotated by 90 degrees yields exactly
    /// rotated directions.
    pub fn directions(&self) -> Vec<(f64, f64)> {
        (0..self.beam_count)
            .map(|k| {
                let deg = (self.first_beam_azimuth + k as f64 * self.angular_spacing).rem_euclid(360.0);
                let quadrant = (deg / 90.0).floor() as u32 % 4;
                let base = (deg - 90.0 * quadrant as f64).to_radians();
                let (mut x, mut y) = (base.cos(), base.sin());
                for _ in 0..quadrant {
                    (x, y) = (-y, x);
                }
                // +y is north, which is decreasing row
                (-y, x)
            })
            .collect()
    }
}

/// Walk one beam from `pose` over `grid`, calling `visit` for every cell it
/// reports. Obstacles stop the beam; Free and Unknown cells let it pass.
fn trace_beam(
    grid: &OccupancyGrid,
    pose: Coord,
    dir: (f64, f64),
    range: f64,
    visit: &mut impl FnMut(Coord, CellCategory),
) {
    let (r0, c0) = (pose.row as f64, pose.col as f64);
    let mut prev = pose;
    let mut k = 1u32;
    loop {
        let t = 0.5 * k as f64;
        k += 1;
        if t > range + 1e-9 {
            return;
        }
        let (r, c) = ((r0 + t * dir.0).round(), (c0 + t * dir.1).round());
        if r < 0.0 || c < 0.0 {
            return;
        }
        let cell = Coord::new(r as usize, c as usize);
        if cell == prev {
            continue;
        }
        if !grid.in_bounds(cell) || pose.distance(cell) > range {
            return;
        }
        if cell.row != prev.row && cell.col != prev.col {
            let a = Coord::new(prev.row, cell.col);
            let b = Coord::new(cell.row, prev.col);
            let (ca, cb) = (grid.get(a), grid.get(b));
            for (corner, cat) in [(a, ca), (b, cb)] {
                if cat == CellCategory::Obstacle && pose.distance(corner) <= range {
                    visit(corner, cat);
                }
            }
            if ca == CellCategory::Obstacle && cb == CellCategory::Obstacle {
                // the beam touches the far cell only at its corner
                if grid.get(cell) == CellCategory::Obstacle {
                    visit(cell, CellCategory::Obstacle);
                }
                return;
            }
        }
        let cat = grid.get(cell);
        visit(cell, cat);
        if cat == CellCategory::Obstacle {
            return;
        }
        prev = cell;
    }
}

/// Every cell reported by the rig at `pose`, sorted and deduplicated. The
/// pose itself is always included.
pub fn visible_cells(grid: &OccupancyGrid, pose: Coord, rig: &SensorRig) -> Readings {
    let mut out = vec![(pose, grid.get(pose))];
    let mut visit = |c, cat| out.push((c, cat));
    for dir in rig.directions() {
        trace_beam(grid, pose, dir, rig.range, &mut visit);
    }
    out.sort_unstable_by_key(|(c, _)| *c);
    out.dedup_by_key(|(c, _)| *c);
    out
}

/// Noise-free range readings from the true map at `pose`.
pub fn sense(truth: &OccupancyGrid, pose: Coord, rig: &SensorRig) -> Result<Readings> {
    if !truth.in_bounds(pose) {
        return Err(Error::OutOfBounds(pose));
    }
    if truth.get(pose) != CellCategory::Free {
        return Err(Error::NotFree(pose));
    }
    Ok(visible_cells(truth, pose, rig))
}

/// Everything observed so far; Unknown where nothing has been seen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationMap(OccupancyGrid);

impl ObservationMap {
    pub fn new(height: usize, width: usize) -> Self {
        Self(OccupancyGrid::unknown(height, width))
    }

    /// Wrap an existing partial grid as an observation map.
    pub fn from_grid(grid: OccupancyGrid) -> Self {
        Self(grid)
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.0
    }

    pub fn into_grid(self) -> OccupancyGrid {
        self.0
    }

    /// Union with `readings`, returning a new map.
    pub fn accumulate(&self, readings: &[(Coord, CellCategory)]) -> Result<Self> {
        let mut next = self.clone();
        next.absorb(readings)?;
        Ok(next)
    }

    /// In-place union. Either all readings are applied or, on a
    /// contradiction, none are. Returns how many cells became known.
    pub fn absorb(&mut self, readings: &[(Coord, CellCategory)]) -> Result<usize> {
        for &(c, cat) in readings {
            let current = self.0.try_get(c).ok_or(Error::OutOfBounds(c))?;
            if current.is_known() && cat.is_known() && current != cat {
                return Err(Error::Contradiction(c));
            }
        }
        let mut fresh = 0;
        for &(c, cat) in readings {
            if cat.is_known() && !self.0.get(c).is_known() {
                self.0.set(c, cat);
                fresh += 1;
            }
        }
        Ok(fresh)
    }

    /// True when every known cell matches `truth`.
    pub fn consistent_with(&self, truth: &OccupancyGrid) -> bool {
        self.0.dims() == truth.dims()
            && self
                .0
                .cells()
                .iter()
                .zip(truth.cells())
                .all(|(o, t)| !o.is_known() || o == t)
    }
}

impl Deref for ObservationMap {
    type Target = OccupancyGrid;

    fn deref(&self) -> &OccupancyGrid {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CellCategory::*;

    fn open_map(n: usize) -> OccupancyGrid {
        let mut g = OccupancyGrid::filled(n, n, Free);
        for i in 0..n {
            for c in [
                Coord::new(0, i),
                Coord::new(n - 1, i),
                Coord::new(i, 0),
                Coord::new(i, n - 1),
            ] {
                g.set(c, Obstacle);
            }
        }
        g
    }

    #[test]
    fn default_rig_matches_testbed() {
        let rig = SensorRig::default();
        assert_eq!(rig.beam_count, 16);
        assert_eq!(rig.angular_spacing, 22.5);
        assert_eq!(rig.range, 20.0);
        rig.validate().unwrap();
        let bad = SensorRig {
            angular_spacing: 20.0,
            ..rig
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn east_beam_on_open_map() {
        let g = open_map(45);
        let pose = Coord::new(22, 22);
        let seen = sense(&g, pose, &SensorRig::default()).unwrap();
        let east: Vec<_> = seen.iter().filter(|(c, _)| c.row == 22 && c.col > 22).collect();
        assert_eq!(east.len(), 20);
        for (i, (c, cat)) in east.iter().enumerate() {
            assert_eq!(c.col, 23 + i);
            assert_eq!(*cat, Free);
        }
    }

    #[test]
    fn wall_five_cells_east() {
        let mut g = open_map(45);
        let pose = Coord::new(22, 22);
        for r in 0..45 {
            g.set(Coord::new(r, 27), Obstacle);
        }
        let seen = sense(&g, pose, &SensorRig::default()).unwrap();
        let east: Vec<_> = seen
            .iter()
            .filter(|(c, _)| c.row == 22 && c.col > 22)
            .copied()
            .collect();
        assert_eq!(
            east,
            vec![
                (Coord::new(22, 23), Free),
                (Coord::new(22, 24), Free),
                (Coord::new(22, 25), Free),
                (Coord::new(22, 26), Free),
                (Coord::new(22, 27), Obstacle),
            ]
        );
    }

    #[test]
    fn one_cell_pocket_sees_its_eight_walls() {
        let g = OccupancyGrid::parse("###\n#.#\n###\n").unwrap();
        let seen = sense(&g, Coord::new(1, 1), &SensorRig::default()).unwrap();
        assert_eq!(seen.len(), 9);
        assert!(seen.contains(&(Coord::new(1, 1), Free)));
        assert_eq!(seen.iter().filter(|(_, c)| *c == Obstacle).count(), 8);
    }

    #[test]
    fn diagonal_beam_cannot_slip_through_corner() {
        // (1,3) lies exactly on the NE beam, past the corner shared by (1,2) and (2,3)
        let g = OccupancyGrid::parse(
            "######\n\
             #.#..#\n\
             #..#.#\n\
             #....#\n\
             ######\n",
        )
        .unwrap();
        let seen = sense(&g, Coord::new(2, 2), &SensorRig::default()).unwrap();
        assert!(!seen.iter().any(|(c, _)| *c == Coord::new(1, 3)));
        assert!(seen.contains(&(Coord::new(1, 2), Obstacle)));
        assert!(seen.contains(&(Coord::new(2, 3), Obstacle)));
    }

    #[test]
    fn sense_rejects_bad_pose() {
        let g = OccupancyGrid::parse("###\n#.#\n###\n").unwrap();
        assert!(matches!(
            sense(&g, Coord::new(0, 0), &SensorRig::default()),
            Err(Error::NotFree(_))
        ));
        assert!(matches!(
            sense(&g, Coord::new(5, 0), &SensorRig::default()),
            Err(Error::OutOfBounds(_))
        ));
    }

    #[test]
    fn accumulate_identities() {
        let g = open_map(30);
        let empty = ObservationMap::new(30, 30);
        assert_eq!(empty.accumulate(&[]).unwrap(), empty);

        let readings = sense(&g, Coord::new(10, 10), &SensorRig::default()).unwrap();
        let once = empty.accumulate(&readings).unwrap();
        assert_eq!(once.count(Unknown), 900 - readings.len());
        for (c, cat) in &readings {
            assert_eq!(once.get(*c), *cat);
        }
        assert_eq!(once.accumulate(&readings).unwrap(), once);
    }

    #[test]
    fn contradiction_is_rejected_atomically() {
        let mut obs = ObservationMap::new(2, 2);
        obs.absorb(&[(Coord::new(0, 0), Free)]).unwrap();
        let before = obs.clone();
        let err = obs.absorb(&[(Coord::new(1, 1), Free), (Coord::new(0, 0), Obstacle)]);
        assert!(matches!(err, Err(Error::Contradiction(_))));
        assert_eq!(obs, before);
    }
}
