use crate::grid::{CellCategory, Coord, OccupancyGrid};

/// Free cells with at least one Unknown 4-neighbor, in row-major order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Frontier {
    cells: Vec<Coord>,
}

impl Frontier {
    pub fn cells(&self) -> &[Coord] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.cells.binary_search(&c).is_ok()
    }
}

pub fn is_frontier(map: &OccupancyGrid, c: Coord) -> bool {
    map.get(c) == CellCategory::Free && map.neighbors4(c).any(|n| map.get(n) == CellCategory::Unknown)
}

pub fn detect_frontier(map: &OccupancyGrid) -> Frontier {
    Frontier {
        cells: map.coords().filter(|&c| is_frontier(map, c)).collect(),
    }
}
