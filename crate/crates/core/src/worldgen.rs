//! Synthetic rectangular floorplans.
//!
//! A closed rectangle is split recursively by one-cell-thick axis-aligned
//! walls. Every wall gets one door gap, and no later wall is allowed to end
//! against a door, so the free space always stays one connected component
//! under 4-neighbor moves.

use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{CellCategory, Coord, OccupancyGrid};
use crate::kv::KeyValues;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub height: usize,
    pub width: usize,
    pub min_room_side: usize,
    pub door_width: usize,
    pub split_depth_range: RangeInclusive<u32>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            height: 64,
            width: 64,
            min_room_side: 6,
            door_width: 2,
            split_depth_range: 3..=5,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_room_side < 3 {
            return Err(Error::Config("min_room_side must be at least 3".into()));
        }
        if self.door_width < 1 || self.door_width > self.min_room_side {
            return Err(Error::Config("door_width must be in 1..=min_room_side".into()));
        }
        if self.height < 2 * self.min_room_side || self.width < 2 * self.min_room_side {
            return Err(Error::Config(format!(
                "{}x{} is too small for rooms of side {}",
                self.height, self.width, self.min_room_side
            )));
        }
        if self.split_depth_range.is_empty() {
            return Err(Error::Config("split_depth_range is empty".into()));
        }
        Ok(())
    }

    pub fn to_key_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        kv.set("seed", self.seed);
        kv.set("height", self.height);
        kv.set("width", self.width);
        kv.set("min_room_side", self.min_room_side);
        kv.set("door_width", self.door_width);
        kv.set("split_depth_min", self.split_depth_range.start());
        kv.set("split_depth_max", self.split_depth_range.end());
        kv
    }

    /// Overlay any generator keys found in `kv` onto `self`.
    pub fn apply_key_values(mut self, kv: &KeyValues) -> Result<Self> {
        if let Some(v) = kv.get_parsed("seed")? {
            self.seed = v;
        }
        if let Some(v) = kv.get_parsed("height")? {
            self.height = v;
        }
        if let Some(v) = kv.get_parsed("width")? {
            self.width = v;
        }
        if let Some(v) = kv.get_parsed("min_room_side")? {
            self.min_room_side = v;
        }
        if let Some(v) = kv.get_parsed("door_width")? {
            self.door_width = v;
        }
        let lo = kv
            .get_parsed("split_depth_min")?
            .unwrap_or(*self.split_depth_range.start());
        let hi = kv
            .get_parsed("split_depth_max")?
            .unwrap_or(*self.split_depth_range.end());
        self.split_depth_range = lo..=hi;
        Ok(self)
    }
}

/// Inclusive free-space rectangle.
#[derive(Clone, Copy, Debug)]
struct Room {
    top: usize,
    left: usize,
    bottom: usize,
    right: usize,
}

impl Room {
    fn height(&self) -> usize {
        self.bottom - self.top + 1
    }

    fn width(&self) -> usize {
        self.right - self.left + 1
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Orientation {
    /// Wall runs top to bottom at a fixed column.
    Vertical,
    /// Wall runs left to right at a fixed row.
    Horizontal,
}

struct Builder<'a> {
    cfg: &'a GeneratorConfig,
    grid: OccupancyGrid,
    door: Vec<bool>,
    rng: ChaCha8Rng,
}

impl Builder<'_> {
    fn is_door(&self, c: Coord) -> bool {
        self.door[self.grid.index(c)]
    }

    fn wall_positions(&self, room: Room, orientation: Orientation) -> Vec<usize> {
        let min = self.cfg.min_room_side;
        let (lo, hi) = match orientation {
            Orientation::Vertical => (room.left, room.right),
            Orientation::Horizontal => (room.top, room.bottom),
        };
        if hi < lo + 2 * min {
            return Vec::new();
        }
        ((lo + min)..=(hi - min))
            .filter(|&p| {
                // the cells this wall would abut on either end
                let (a, b) = match orientation {
                    Orientation::Vertical => (Coord::new(room.top - 1, p), Coord::new(room.bottom + 1, p)),
                    Orientation::Horizontal => (Coord::new(p, room.left - 1), Coord::new(p, room.right + 1)),
                };
                !self.is_door(a) && !self.is_door(b)
            })
            .collect()
    }

    fn split(&mut self, room: Room, depth: u32) {
        if depth == 0 {
            return;
        }
        let preferred = if room.width() > room.height() {
            Orientation::Vertical
        } else if room.height() > room.width() {
            Orientation::Horizontal
        } else if self.rng.gen_bool(0.5) {
            Orientation::Vertical
        } else {
            Orientation::Horizontal
        };
        let other = match preferred {
            Orientation::Vertical => Orientation::Horizontal,
            Orientation::Horizontal => Orientation::Vertical,
        };
        let (orientation, positions) = match self.wall_positions(room, preferred) {
            p if !p.is_empty() => (preferred, p),
            _ => (other, self.wall_positions(room, other)),
        };
        if positions.is_empty() {
            return;
        }
        let at = positions[self.rng.gen_range(0..positions.len())];
        let dw = self.cfg.door_width;
        match orientation {
            Orientation::Vertical => {
                let door = self.rng.gen_range(room.top..=room.bottom + 1 - dw);
                for row in room.top..=room.bottom {
                    let c = Coord::new(row, at);
                    if (door..door + dw).contains(&row) {
                        let i = self.grid.index(c);
                        self.door[i] = true;
                    } else {
                        self.grid.set(c, CellCategory::Obstacle);
                    }
                }
                self.split(Room { right: at - 1, ..room }, depth - 1);
                self.split(Room { left: at + 1, ..room }, depth - 1);
            }
            Orientation::Horizontal => {
                let door = self.rng.gen_range(room.left..=room.right + 1 - dw);
                for col in room.left..=room.right {
                    let c = Coord::new(at, col);
                    if (door..door + dw).contains(&col) {
                        let i = self.grid.index(c);
                        self.door[i] = true;
                    } else {
                        self.grid.set(c, CellCategory::Obstacle);
                    }
                }
                self.split(Room { bottom: at - 1, ..room }, depth - 1);
                self.split(Room { top: at + 1, ..room }, depth - 1);
            }
        }
    }
}

/// Generate one ground-truth floorplan. Output is a pure function of `cfg`.
pub fn generate_floorplan(cfg: &GeneratorConfig) -> Result<OccupancyGrid> {
    cfg.validate()?;
    let (h, w) = (cfg.height, cfg.width);
    let mut grid = OccupancyGrid::filled(h, w, CellCategory::Free);
    for c in 0..w {
        grid.set(Coord::new(0, c), CellCategory::Obstacle);
        grid.set(Coord::new(h - 1, c), CellCategory::Obstacle);
    }
    for r in 0..h {
        grid.set(Coord::new(r, 0), CellCategory::Obstacle);
        grid.set(Coord::new(r, w - 1), CellCategory::Obstacle);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let depth = rng.gen_range(cfg.split_depth_range.clone());
    let mut b = Builder {
        cfg,
        grid,
        door: vec![false; h * w],
        rng,
    };
    let interior = Room {
        top: 1,
        left: 1,
        bottom: h - 2,
        right: w - 2,
    };
    b.split(interior, depth);
    Ok(b.grid)
}

/// `count` floorplans from consecutive seeds starting at `cfg.seed`.
pub fn generate_dataset(cfg: &GeneratorConfig, count: usize) -> Result<Vec<OccupancyGrid>> {
    if count == 0 {
        return Err(Error::Config("count must be at least 1".into()));
    }
    (0..count as u64)
        .map(|k| {
            generate_floorplan(&GeneratorConfig {
                seed: cfg.seed + k,
                ..cfg.clone()
            })
        })
        .collect()
}

/// Write `map_<seed>.grid` with a `map_<seed>.meta` sidecar into `dir`.
pub fn save_with_sidecar(dir: &Path, cfg: &GeneratorConfig, grid: &OccupancyGrid) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let stem = format!("map_{:06}", cfg.seed);
    let grid_path = dir.join(format!("{stem}.grid"));
    grid.save(&grid_path)?;
    let mut meta = cfg.to_key_values();
    meta.set("generator", "bsp");
    meta.set("fraction_of_walls", format!("{:.6}", grid.fraction_of_walls()?));
    std::fs::write(dir.join(format!("{stem}.meta")), meta.to_text())?;
    Ok(grid_path)
}
