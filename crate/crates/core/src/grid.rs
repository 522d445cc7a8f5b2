//! Occupancy grids and the categorical cell model.
//!
//! Every map in the crate is row-major with `(row 0, col 0)` at the top-left.
//! Cells hold one of three categories; the agent's position is tracked by the
//! planner and only ever drawn on top of a grid, never stored in one.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cell address, `(row, col)`. Ordering is row-major, which the planners
/// rely on for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub row: usize,
    pub col: usize,
}

impl Coord {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Offset by a signed delta, `None` if it would go negative.
    pub fn offset(self, drow: isize, dcol: isize) -> Option<Coord> {
        let row = self.row.checked_add_signed(drow)?;
        let col = self.col.checked_add_signed(dcol)?;
        Some(Coord { row, col })
    }

    /// Euclidean distance between cell centers.
    pub fn distance(self, other: Coord) -> f64 {
        let dr = self.row as f64 - other.row as f64;
        let dc = self.col as f64 - other.col as f64;
        (dr * dr + dc * dc).sqrt()
    }
}

impl From<(usize, usize)> for Coord {
    fn from((row, col): (usize, usize)) -> Self {
        Coord { row, col }
    }
}

/// The three storable categories.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellCategory {
    Free,
    Obstacle,
    Unknown,
}

impl CellCategory {
    pub const ALL: [CellCategory; 3] = [CellCategory::Free, CellCategory::Obstacle, CellCategory::Unknown];

    /// Channel index in the one-hot encoding: free, obstacle, unknown.
    pub fn channel(self) -> usize {
        match self {
            CellCategory::Free => 0,
            CellCategory::Obstacle => 1,
            CellCategory::Unknown => 2,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            CellCategory::Free => '.',
            CellCategory::Obstacle => '#',
            CellCategory::Unknown => '?',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            '.' => Some(CellCategory::Free),
            '#' => Some(CellCategory::Obstacle),
            '?' => Some(CellCategory::Unknown),
            _ => None,
        }
    }

    pub fn is_known(self) -> bool {
        self != CellCategory::Unknown
    }
}

pub const ORTHOGONAL: [(isize, isize); 4] = [(-1, 0), (0, 1), (1, 0), (0, -1)];

pub const EIGHT_WAY: [(isize, isize); 8] = [(-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1)];

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OccupancyGrid {
    height: usize,
    width: usize,
    cells: Vec<CellCategory>,
}

impl OccupancyGrid {
    pub fn filled(height: usize, width: usize, category: CellCategory) -> Self {
        Self {
            height,
            width,
            cells: vec![category; height * width],
        }
    }

    pub fn unknown(height: usize, width: usize) -> Self {
        Self::filled(height, width, CellCategory::Unknown)
    }

    pub fn from_cells(height: usize, width: usize, cells: Vec<CellCategory>) -> Result<Self> {
        if cells.len() != height * width {
            return Err(Error::Shape(format!(
                "{} cells for a {height}x{width} grid",
                cells.len()
            )));
        }
        Ok(Self { height, width, cells })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[CellCategory] {
        &self.cells
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.row < self.height && c.col < self.width
    }

    pub fn index(&self, c: Coord) -> usize {
        c.row * self.width + c.col
    }

    pub fn coord(&self, index: usize) -> Coord {
        Coord::new(index / self.width, index % self.width)
    }

    /// Category at `c`; out-of-bounds reads panic.
    pub fn get(&self, c: Coord) -> CellCategory {
        assert!(self.in_bounds(c), "{c:?} outside {}x{}", self.height, self.width);
        self.cells[self.index(c)]
    }

    /// Category at `c`, or `None` outside the grid.
    pub fn try_get(&self, c: Coord) -> Option<CellCategory> {
        self.in_bounds(c).then(|| self.cells[self.index(c)])
    }

    pub fn set(&mut self, c: Coord, category: CellCategory) {
        let i = self.index(c);
        self.cells[i] = category;
    }

    pub fn is_free(&self, c: Coord) -> bool {
        self.try_get(c) == Some(CellCategory::Free)
    }

    pub fn coords(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.cells.len()).map(move |i| self.coord(i))
    }

    /// In-bounds neighbor at the given delta.
    pub fn neighbor(&self, c: Coord, (dr, dc): (isize, isize)) -> Option<Coord> {
        c.offset(dr, dc).filter(|n| self.in_bounds(*n))
    }

    pub fn neighbors4(&self, c: Coord) -> impl Iterator<Item = Coord> + '_ {
        ORTHOGONAL.iter().filter_map(move |d| self.neighbor(c, *d))
    }

    pub fn count(&self, category: CellCategory) -> usize {
        self.cells.iter().filter(|&&c| c == category).count()
    }

    /// Fraction of cells that are not Unknown.
    pub fn coverage(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        1.0 - self.count(CellCategory::Unknown) as f64 / self.cells.len() as f64
    }

    /// True when the outermost ring is entirely Obstacle.
    pub fn boundary_closed(&self) -> bool {
        self.coords()
            .filter(|c| c.row == 0 || c.col == 0 || c.row + 1 == self.height || c.col + 1 == self.width)
            .all(|c| self.get(c) == CellCategory::Obstacle)
    }

    /// Parse the `.grid` text format: one line per row, `#` obstacle,
    /// `.` free, `?` unknown.
    pub fn parse(text: &str) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::Format {
                line: 1,
                msg: "empty input".into(),
            });
        }
        let mut width = None;
        let mut cells = Vec::new();
        let mut height = 0;
        for (i, line) in text.split_terminator('\n').enumerate() {
            let line_no = i + 1;
            let start = cells.len();
            for ch in line.chars() {
                let cat = CellCategory::from_char(ch).ok_or_else(|| Error::Format {
                    line: line_no,
                    msg: format!("unexpected character {ch:?}"),
                })?;
                cells.push(cat);
            }
            let row_width = cells.len() - start;
            match width {
                None if row_width == 0 => {
                    return Err(Error::Format {
                        line: line_no,
                        msg: "empty row".into(),
                    })
                }
                None => width = Some(row_width),
                Some(w) if w != row_width => {
                    return Err(Error::Format {
                        line: line_no,
                        msg: format!("row has {row_width} cells, expected {w}"),
                    })
                }
                Some(_) => {}
            }
            height += 1;
        }
        let width = width.unwrap_or(0);
        Self::from_cells(height, width, cells)
    }

    /// Render in the `.grid` text format, every row newline-terminated.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.height * (self.width + 1));
        for row in self.cells.chunks(self.width.max(1)) {
            out.extend(row.iter().map(|c| c.to_char()));
            out.push('\n');
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Share of Obstacle cells. Only defined for fully known grids.
    pub fn fraction_of_walls(&self) -> Result<f64> {
        if self.cells.contains(&CellCategory::Unknown) {
            return Err(Error::UnknownCells);
        }
        Ok(self.count(CellCategory::Obstacle) as f64 / self.cells.len() as f64)
    }

    pub fn one_hot(&self) -> OneHotGrid {
        OneHotGrid::encode(self)
    }

    pub(crate) fn check_same_dims(&self, other: &OccupancyGrid) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for OccupancyGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OccupancyGrid {}x{}", self.height, self.width)?;
        f.write_str(&self.to_text())
    }
}

/// Obstacle probabilities, one per cell, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityGrid {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl ProbabilityGrid {
    pub fn uniform(height: usize, width: usize, p: f64) -> Self {
        Self {
            height,
            width,
            values: vec![p; height * width],
        }
    }

    pub fn from_values(height: usize, width: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != height * width {
            return Err(Error::Shape(format!(
                "{} values for a {height}x{width} grid",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Shape(format!("probability {v} outside [0, 1]")));
        }
        Ok(Self { height, width, values })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, c: Coord) -> f64 {
        self.values[c.row * self.width + c.col]
    }
}

/// Three-channel one-hot encoding with channel order `[free, obstacle, unknown]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneHotGrid {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl OneHotGrid {
    pub const CHANNELS: usize = 3;

    pub fn encode(grid: &OccupancyGrid) -> Self {
        let plane = grid.len();
        let mut data = vec![0.0; Self::CHANNELS * plane];
        for (i, cat) in grid.cells().iter().enumerate() {
            data[cat.channel() * plane + i] = 1.0;
        }
        Self {
            height: grid.height(),
            width: grid.width(),
            data,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Channel-major data, `3 * height * width` values.
    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn channel(&self, channel: usize) -> &[f32] {
        let plane = self.height * self.width;
        &self.data[channel * plane..(channel + 1) * plane]
    }

    pub fn decode(&self) -> Result<OccupancyGrid> {
        let plane = self.height * self.width;
        let cells = (0..plane)
            .map(|i| {
                let hot: Vec<_> = CellCategory::ALL
                    .iter()
                    .filter(|cat| self.data[cat.channel() * plane + i] == 1.0)
                    .collect();
                match hot.as_slice() {
                    [cat] => Ok(**cat),
                    _ => Err(Error::Shape(format!("cell {i} is not one-hot"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        OccupancyGrid::from_cells(self.height, self.width, cells)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use CellCategory::*;

    #[test]
    fn one_hot_single_free_cell() {
        let g = OccupancyGrid::from_cells(1, 1, vec![Free]).unwrap();
        let h = g.one_hot();
        assert_eq!(h.channel(0), &[1.0]);
        assert_eq!(h.channel(1), &[0.0]);
        assert_eq!(h.channel(2), &[0.0]);
    }

    #[test]
    fn one_hot_obstacle_unknown_row() {
        let g = OccupancyGrid::from_cells(1, 2, vec![Obstacle, Unknown]).unwrap();
        let h = g.one_hot();
        assert_eq!(h.channel(0), &[0.0, 0.0]);
        assert_eq!(h.channel(1), &[1.0, 0.0]);
        assert_eq!(h.channel(2), &[0.0, 1.0]);
        assert_eq!(h.decode().unwrap(), g);
    }

    #[test]
    fn parse_examples() {
        let g = OccupancyGrid::parse("##\n##\n").unwrap();
        assert_eq!(g.dims(), (2, 2));
        assert_eq!(g.count(Obstacle), 4);

        let g = OccupancyGrid::parse("#.#\n").unwrap();
        assert_eq!(g.cells(), &[Obstacle, Free, Obstacle]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            OccupancyGrid::parse("#?\n#"),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(matches!(OccupancyGrid::parse(""), Err(Error::Format { .. })));
        assert!(matches!(
            OccupancyGrid::parse("#x\n"),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(matches!(
            OccupancyGrid::parse("##\n\n##\n"),
            Err(Error::Format { line: 2, .. })
        ));
        assert!(matches!(OccupancyGrid::parse("## \n"), Err(Error::Format { .. })));
    }

    #[test]
    fn text_round_trip_is_byte_exact() {
        let text = "####\n#.?#\n####\n";
        assert_eq!(OccupancyGrid::parse(text).unwrap().to_text(), text);
    }

    #[test]
    fn fraction_of_walls_examples() {
        let all = OccupancyGrid::parse("##\n##\n").unwrap();
        assert_eq!(all.fraction_of_walls().unwrap(), 1.0);
        let one = OccupancyGrid::parse("#.\n..\n").unwrap();
        assert_eq!(one.fraction_of_walls().unwrap(), 0.25);
        let partial = OccupancyGrid::parse("#?\n..\n").unwrap();
        assert!(matches!(partial.fraction_of_walls(), Err(Error::UnknownCells)));
    }

    #[test]
    fn coverage_counts_known_cells() {
        let g = OccupancyGrid::parse("#?\n?.\n").unwrap();
        assert_eq!(g.coverage(), 0.5);
    }

    #[test]
    fn probability_grid_rejects_out_of_range() {
        assert!(ProbabilityGrid::from_values(1, 2, vec![0.0, 1.5]).is_err());
        assert!(ProbabilityGrid::from_values(1, 2, vec![0.0]).is_err());
    }

    #[test]
    fn coord_order_is_row_major() {
        let mut v = vec![Coord::new(1, 0), Coord::new(0, 5), Coord::new(0, 2)];
        v.sort();
        assert_eq!(v, vec![Coord::new(0, 2), Coord::new(0, 5), Coord::new(1, 0)]);
    }
}
