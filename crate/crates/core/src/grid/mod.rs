//! Octile grid maps: cells, costs, neighbor generation and the octile heuristic.
//!
//! Costs are integers in deci-cost units: a cardinal move costs 10 and a
//! diagonal move costs 14, so every sum is exact and ties compare exactly.

mod format;
pub mod maps;
mod problems;

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use arrayvec::ArrayVec;

pub use format::{parse_map, parse_scenario, write_map, write_scenario, ParseError};
pub use problems::{generate_problems, generate_problems_with_limit, Problem, ProblemError};

/// Largest supported cell count. Keeps every state id inside a `u32` and every
/// path cost far away from `u64` overflow.
pub const MAX_CELLS: u64 = 1 << 26;

/// A grid cell. `x` is the column, `y` the row; row 0 is the top (north) edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Coord {
    pub x: u32,
    pub y: u32,
}

impl Coord {
    pub const fn new(x: u32, y: u32) -> Self {
        Coord { x, y }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Path or heuristic cost in deci-cost units.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(pub u64);

impl Cost {
    pub const ZERO: Cost = Cost(0);
    pub const CARDINAL: Cost = Cost(10);
    pub const DIAGONAL: Cost = Cost(14);
    /// Sentinel for "unreachable"; absorbs any addition.
    pub const INFINITE: Cost = Cost(u64::MAX);

    pub const fn value(self) -> u64 {
        self.0
    }

    pub const fn is_infinite(self) -> bool {
        self.0 == u64::MAX
    }
}

impl Add for Cost {
    type Output = Cost;

    #[inline]
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0.saturating_add(rhs.0))
    }
}

impl AddAssign for Cost {
    #[inline]
    fn add_assign(&mut self, rhs: Cost) {
        *self = *self + rhs;
    }
}

impl Sub for Cost {
    type Output = Cost;

    #[inline]
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0.saturating_sub(rhs.0))
    }
}

impl fmt::Display for Cost {
    /// Formats in ordinary cost units, e.g. `Cost(164)` prints as `16.4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}.{}", self.0 / 10, self.0 % 10)
        }
    }
}

/// The eight move directions in tie-break order: N, NE, E, SE, S, SW, W, NW.
pub const DIRECTIONS: [(i32, i32); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

/// Successors of one cell, at most eight.
pub type Neighbors = ArrayVec<(Coord, Cost), 8>;

/// Octile distance between two cells, ignoring obstacles.
///
/// ```
/// use knn_lrta::grid::{octile, Coord, Cost};
/// assert_eq!(octile(Coord::new(0, 0), Coord::new(3, 5)), Cost(62));
/// ```
#[inline]
pub fn octile(a: Coord, b: Coord) -> Cost {
    let dx = a.x.abs_diff(b.x) as u64;
    let dy = a.y.abs_diff(b.y) as u64;
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    Cost(14 * lo + 10 * (hi - lo))
}

/// An immutable passability grid with octile connectivity.
#[derive(Clone, PartialEq, Eq)]
pub struct GridMap {
    width: u32,
    height: u32,
    passable: Vec<bool>,
    passable_ids: Vec<u32>,
}

impl fmt::Debug for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridMap")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("passable_count", &self.passable_ids.len())
            .finish()
    }
}

impl GridMap {
    /// Builds a map from a row-major passability vector.
    ///
    /// Panics if the dimensions are zero, exceed [`MAX_CELLS`], or disagree
    /// with `passable.len()`.
    pub fn from_cells(width: u32, height: u32, passable: Vec<bool>) -> Self {
        let cells = width as u64 * height as u64;
        assert!(cells > 0, "map must have at least one cell");
        assert!(cells <= MAX_CELLS, "map has {cells} cells, limit is {MAX_CELLS}");
        assert_eq!(passable.len() as u64, cells, "cell vector does not match dimensions");
        let passable_ids = passable.iter().enumerate().filter(|(_, &p)| p).map(|(i, _)| i as u32).collect();
        GridMap { width, height, passable, passable_ids }
    }

    /// An obstacle-free map.
    pub fn open(width: u32, height: u32) -> Self {
        Self::from_cells(width, height, vec![true; width as usize * height as usize])
    }

    /// Builds a map from rows of map characters (see [`parse_map`] for the
    /// character set). Handy for hand-drawn test maps.
    ///
    /// ```
    /// use knn_lrta::grid::GridMap;
    /// let map = GridMap::from_rows(&["...", ".@.", "..."]).unwrap();
    /// assert_eq!(map.passable_count(), 8);
    /// ```
    pub fn from_rows<S: AsRef<str>>(rows: &[S]) -> Result<Self, ParseError> {
        format::parse_body(rows.iter().map(|r| r.as_ref()), 0)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn cell_count(&self) -> usize {
        self.passable.len()
    }

    /// Number of passable cells.
    pub fn passable_count(&self) -> usize {
        self.passable_ids.len()
    }

    /// Linear ids of all passable cells in row-major order.
    pub fn passable_ids(&self) -> &[u32] {
        &self.passable_ids
    }

    #[inline]
    pub fn contains(&self, c: Coord) -> bool {
        c.x < self.width && c.y < self.height
    }

    #[inline]
    pub fn is_passable(&self, c: Coord) -> bool {
        self.contains(c) && self.passable[self.id(c) as usize]
    }

    /// Row-major linear id, `y * width + x`.
    #[inline]
    pub fn id(&self, c: Coord) -> u32 {
        c.y * self.width + c.x
    }

    #[inline]
    pub fn coord(&self, id: u32) -> Coord {
        Coord::new(id % self.width, id / self.width)
    }

    #[inline]
    fn passable_at(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && x < self.width as i64
            && y < self.height as i64
            && self.passable[(y as usize) * self.width as usize + x as usize]
    }

    /// Legal moves out of `s`, in N, NE, E, SE, S, SW, W, NW order.
    ///
    /// A diagonal move is legal only when both cardinal cells it passes
    /// between are passable, so agents never cut corners.
    #[inline]
    pub fn neighbors(&self, s: Coord) -> Neighbors {
        let mut out = Neighbors::new();
        let (x, y) = (s.x as i64, s.y as i64);
        for &(dx, dy) in &DIRECTIONS {
            let (nx, ny) = (x + dx as i64, y + dy as i64);
            if !self.passable_at(nx, ny) {
                continue;
            }
            let cost = if dx != 0 && dy != 0 {
                if !self.passable_at(nx, y) || !self.passable_at(x, ny) {
                    continue;
                }
                Cost::DIAGONAL
            } else {
                Cost::CARDINAL
            };
            out.push((Coord::new(nx as u32, ny as u32), cost));
        }
        out
    }

    /// Cost of the single move `a -> b`, or `None` if it is not a legal edge.
    pub fn edge_cost(&self, a: Coord, b: Coord) -> Option<Cost> {
        if !self.is_passable(a) {
            return None;
        }
        self.neighbors(a).into_iter().find(|&(n, _)| n == b).map(|(_, c)| c)
    }
}

/// A sequence of states joined by legal moves, with its total cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub states: Vec<Coord>,
    pub cost: Cost,
}

impl Path {
    pub fn start(&self) -> Coord {
        self.states[0]
    }

    pub fn goal(&self) -> Coord {
        *self.states.last().expect("paths are never empty")
    }

    /// Number of moves (edges) in the path.
    pub fn moves(&self) -> usize {
        self.states.len().saturating_sub(1)
    }
}

/// Reasons a path fails [`validate_path`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PathError {
    #[error("path is empty")]
    Empty,
    #[error("path starts at {found}, expected {expected}")]
    WrongStart { expected: Coord, found: Coord },
    #[error("path ends at {found}, expected {expected}")]
    WrongGoal { expected: Coord, found: Coord },
    #[error("illegal move {from} -> {to} at step {step}")]
    IllegalMove { step: usize, from: Coord, to: Coord },
    #[error("path reports cost {reported} but its edges sum to {actual}")]
    CostMismatch { reported: Cost, actual: Cost },
}

/// Re-checks a path edge by edge: endpoints, legality of every move, and the
/// reported cost against the re-summed edge costs.
pub fn validate_path(map: &GridMap, path: &Path, start: Coord, goal: Coord) -> Result<(), PathError> {
    let first = *path.states.first().ok_or(PathError::Empty)?;
    if first != start {
        return Err(PathError::WrongStart { expected: start, found: first });
    }
    if path.goal() != goal {
        return Err(PathError::WrongGoal { expected: goal, found: path.goal() });
    }
    if !map.is_passable(first) {
        return Err(PathError::IllegalMove { step: 0, from: first, to: first });
    }
    let mut total = Cost::ZERO;
    for (step, w) in path.states.windows(2).enumerate() {
        match map.edge_cost(w[0], w[1]) {
            Some(c) => total += c,
            None => return Err(PathError::IllegalMove { step, from: w[0], to: w[1] }),
        }
    }
    if total != path.cost {
        return Err(PathError::CostMismatch { reported: path.cost, actual: total });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octile_examples() {
        assert_eq!(octile(Coord::new(0, 0), Coord::new(0, 0)), Cost(0));
        assert_eq!(octile(Coord::new(0, 0), Coord::new(3, 5)), Cost(62));
        assert_eq!(octile(Coord::new(2, 7), Coord::new(2, 3)), Cost(40));
        assert_eq!(octile(Coord::new(3, 5), Coord::new(0, 0)), Cost(62));
    }

    #[test]
    fn interior_cell_has_eight_neighbors() {
        let map = GridMap::open(5, 5);
        let n = map.neighbors(Coord::new(2, 2));
        assert_eq!(n.len(), 8);
        assert_eq!(n.iter().filter(|(_, c)| *c == Cost::CARDINAL).count(), 4);
        assert_eq!(n.iter().filter(|(_, c)| *c == Cost::DIAGONAL).count(), 4);
        // fixed enumeration order
        let dirs: Vec<_> = n.iter().map(|(c, _)| (c.x as i32 - 2, c.y as i32 - 2)).collect();
        assert_eq!(dirs, DIRECTIONS.to_vec());
    }

    #[test]
    fn blocked_east_neighbor_removes_three_moves() {
        let map = GridMap::from_rows(&[".....", ".....", "...@.", ".....", "....."]).unwrap();
        let n = map.neighbors(Coord::new(2, 2));
        assert_eq!(n.len(), 5);
        for (c, _) in &n {
            assert!(c.x <= 2, "{c} should have been excluded");
        }
    }

    #[test]
    fn corner_cell_has_three_neighbors() {
        let map = GridMap::open(5, 5);
        assert_eq!(map.neighbors(Coord::new(0, 0)).len(), 3);
    }

    #[test]
    fn cost_display_and_sentinel() {
        assert_eq!(Cost(164).to_string(), "16.4");
        assert_eq!(Cost::INFINITE + Cost(10), Cost::INFINITE);
        assert_eq!(Cost::INFINITE.to_string(), "inf");
    }

    #[test]
    fn validate_path_catches_corner_cut() {
        let map = GridMap::from_rows(&["..", "@."]).unwrap();
        let bad = Path { states: vec![Coord::new(0, 0), Coord::new(1, 1)], cost: Cost(14) };
        assert!(matches!(
            validate_path(&map, &bad, Coord::new(0, 0), Coord::new(1, 1)),
            Err(PathError::IllegalMove { .. })
        ));
        let good = Path { states: vec![Coord::new(0, 0), Coord::new(1, 0), Coord::new(1, 1)], cost: Cost(20) };
        validate_path(&map, &good, Coord::new(0, 0), Coord::new(1, 1)).unwrap();
        let wrong_cost = Path { cost: Cost(19), ..good };
        assert!(matches!(
            validate_path(&map, &wrong_cost, Coord::new(0, 0), Coord::new(1, 1)),
            Err(PathError::CostMismatch { .. })
        ));
    }
}
