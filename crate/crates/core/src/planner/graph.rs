//! Shortest paths over the free cells of a map.
//!
//! Nodes are Free cells, edges join 8-adjacent Free cells, and a diagonal
//! edge is dropped when both cells flanking it are Obstacle. Costs are kept
//! as exact counts of straight and diagonal moves so equal-length paths
//! always compare equal.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::grid::{CellCategory, Coord, OccupancyGrid, EIGHT_WAY};

/// Length of a grid path as `straight + diagonal * sqrt(2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PathCost {
    pub straight: u32,
    pub diagonal: u32,
}

impl PathCost {
    pub fn value(self) -> f64 {
        f64::from(self.straight) + f64::from(self.diagonal) * SQRT_2
    }

    fn step(self, diagonal: bool) -> Self {
        if diagonal {
            Self {
                diagonal: self.diagonal + 1,
                ..self
            }
        } else {
            Self {
                straight: self.straight + 1,
                ..self
            }
        }
    }
}

impl Ord for PathCost {
    // distinct (straight, diagonal) pairs never share a value, and on grids
    // of practical size their values are far apart relative to f64 rounding
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.value().total_cmp(&other.value())
    }
}

impl PartialOrd for PathCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Whether a single move from `from` by `delta` is allowed on `map`.
pub fn step_allowed(map: &OccupancyGrid, from: Coord, to: Coord) -> bool {
    let dr = to.row as isize - from.row as isize;
    let dc = to.col as isize - from.col as isize;
    if (dr, dc) == (0, 0) || dr.abs() > 1 || dc.abs() > 1 {
        return false;
    }
    if !map.is_free(from) || !map.is_free(to) {
        return false;
    }
    if dr != 0 && dc != 0 {
        let a = map.get(Coord::new(from.row, to.col));
        let b = map.get(Coord::new(to.row, from.col));
        if a == CellCategory::Obstacle && b == CellCategory::Obstacle {
            return false;
        }
    }
    true
}

/// Neighbors reachable in one move, with whether the move is diagonal.
pub fn neighbors(map: &OccupancyGrid, c: Coord) -> impl Iterator<Item = (Coord, bool)> + '_ {
    EIGHT_WAY.iter().filter_map(move |&d| {
        let n = map.neighbor(c, d)?;
        step_allowed(map, c, n).then_some((n, d.0 != 0 && d.1 != 0))
    })
}

#[derive(PartialEq, Eq)]
struct Entry {
    cost: PathCost,
    index: usize,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then on index
        other.cost.cmp(&self.cost).then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Result of a single-source shortest-path solve.
#[derive(Clone, Debug)]
pub struct DistanceField {
    source: Coord,
    height: usize,
    width: usize,
    cost: Vec<Option<PathCost>>,
    pred: Vec<Option<usize>>,
}

impl DistanceField {
    pub fn source(&self) -> Coord {
        self.source
    }

    fn index(&self, c: Coord) -> Option<usize> {
        (c.row < self.height && c.col < self.width).then(|| c.row * self.width + c.col)
    }

    pub fn cost(&self, c: Coord) -> Option<PathCost> {
        self.cost[self.index(c)?]
    }

    /// Path length to `c`, infinite when unreachable.
    pub fn distance(&self, c: Coord) -> f64 {
        self.cost(c).map_or(f64::INFINITY, PathCost::value)
    }

    pub fn is_reachable(&self, c: Coord) -> bool {
        self.cost(c).is_some()
    }

    pub fn predecessor(&self, c: Coord) -> Option<Coord> {
        let p = self.pred[self.index(c)?]?;
        Some(Coord::new(p / self.width, p % self.width))
    }

    /// Cells from the source to `target`, both included.
    pub fn path_to(&self, target: Coord) -> Option<Vec<Coord>> {
        self.cost(target)?;
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.predecessor(cur) {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Dijkstra from `source` over the free-cell graph of `map`.
pub fn shortest_paths(map: &OccupancyGrid, source: Coord) -> Result<DistanceField> {
    if !map.in_bounds(source) {
        return Err(Error::OutOfBounds(source));
    }
    if !map.is_free(source) {
        return Err(Error::NotFree(source));
    }
    let n = map.len();
    let mut cost: Vec<Option<PathCost>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    let s = map.index(source);
    cost[s] = Some(PathCost::default());
    heap.push(Entry {
        cost: PathCost::default(),
        index: s,
    });
    while let Some(Entry { cost: d, index }) = heap.pop() {
        if done[index] {
            continue;
        }
        done[index] = true;
        for (nb, diagonal) in neighbors(map, map.coord(index)) {
            let j = map.index(nb);
            if done[j] {
                continue;
            }
            let candidate = d.step(diagonal);
            if cost[j].is_none_or(|old| candidate < old) {
                cost[j] = Some(candidate);
                pred[j] = Some(index);
                heap.push(Entry {
                    cost: candidate,
                    index: j,
                });
            }
        }
    }
    Ok(DistanceField {
        source,
        height: map.height(),
        width: map.width(),
        cost,
        pred,
    })
}
