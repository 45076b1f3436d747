//! Ground-truth grid environments: occupancy, semantics, goals, file format,
//! and the procedural generator suite.
//!
//! Coordinate convention used across the whole crate: `(row, col)` with row 0
//! at the top and rows increasing downward. "Up" decreases the row, "Right"
//! increases the column.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub mod gen;
mod io;

pub use io::{load_environment, save_environment, EnvFileError};

/// A grid coordinate, `(row, col)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }

    /// In-bounds 4-neighbors in the fixed order up, down, left, right.
    pub fn neighbors4(self, rows: usize, cols: usize) -> impl Iterator<Item = Cell> {
        let Cell { row, col } = self;
        let up = (row > 0).then(|| Cell::new(row - 1, col));
        let down = (row + 1 < rows).then(|| Cell::new(row + 1, col));
        let left = (col > 0).then(|| Cell::new(row, col - 1));
        let right = (col + 1 < cols).then(|| Cell::new(row, col + 1));
        [up, down, left, right].into_iter().flatten()
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Discrete structural label of a cell.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize,
)]
pub enum CellLabel {
    Free,
    Wall,
    Door,
}

impl CellLabel {
    /// Whether this label is consistent with the given occupancy value.
    pub fn matches_occupancy(self, occupied: bool) -> bool {
        match self {
            CellLabel::Free => !occupied,
            CellLabel::Wall | CellLabel::Door => occupied,
        }
    }
}

/// Attribute names with defined meaning. Other keys are legal but opaque.
pub const ATTR_ROOM_NUMBER: &str = "room_number";
pub const ATTR_SIGN_TEXT: &str = "sign_text";

/// Per-cell semantic payload: a structural label plus free-form string
/// attributes (room numbers, sign text, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSemantics {
    pub label: CellLabel,
    pub attributes: BTreeMap<String, String>,
}

impl CellSemantics {
    pub fn free() -> Self {
        Self { label: CellLabel::Free, attributes: BTreeMap::new() }
    }

    pub fn wall() -> Self {
        Self { label: CellLabel::Wall, attributes: BTreeMap::new() }
    }

    pub fn door(room_number: impl Into<String>) -> Self {
        let mut attributes = BTreeMap::new();
        attributes.insert(ATTR_ROOM_NUMBER.to_string(), room_number.into());
        Self { label: CellLabel::Door, attributes }
    }

    pub fn room_number(&self) -> Option<&str> {
        self.attributes.get(ATTR_ROOM_NUMBER).map(String::as_str)
    }

    pub fn sign_text(&self) -> Option<&str> {
        self.attributes.get(ATTR_SIGN_TEXT).map(String::as_str)
    }
}

/// Binary occupancy grid: 0 = free, 1 = occupied. Row-major storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    rows: usize,
    cols: usize,
    cells: Vec<u8>,
}

impl OccupancyGrid {
    /// Grid with every cell set to `value` (0 or 1).
    pub fn filled(rows: usize, cols: usize, value: u8) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
        assert!(value <= 1, "occupancy values are 0 or 1");
        Self { rows, cols, cells: vec![value; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.row < self.rows && cell.col < self.cols
    }

    pub fn get(&self, cell: Cell) -> u8 {
        self.cells[cell.row * self.cols + cell.col]
    }

    pub fn set(&mut self, cell: Cell, value: u8) {
        assert!(value <= 1);
        self.cells[cell.row * self.cols + cell.col] = value;
    }

    pub fn is_free(&self, cell: Cell) -> bool {
        self.get(cell) == 0
    }

    /// All cells in row-major order.
    pub fn iter_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let cols = self.cols;
        (0..self.rows).flat_map(move |r| (0..cols).map(move |c| Cell::new(r, c)))
    }
}

/// Semantic grid parallel to an occupancy grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticGrid {
    rows: usize,
    cols: usize,
    cells: Vec<CellSemantics>,
}

impl SemanticGrid {
    /// Semantics implied by the occupancy grid alone: Free/Wall, no attributes.
    pub fn implied_by(occupancy: &OccupancyGrid) -> Self {
        let cells = occupancy
            .iter_cells()
            .map(|c| if occupancy.is_free(c) { CellSemantics::free() } else { CellSemantics::wall() })
            .collect();
        Self { rows: occupancy.rows(), cols: occupancy.cols(), cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, cell: Cell) -> &CellSemantics {
        &self.cells[cell.row * self.cols + cell.col]
    }

    pub fn get_mut(&mut self, cell: Cell) -> &mut CellSemantics {
        &mut self.cells[cell.row * self.cols + cell.col]
    }
}

/// A complete ground-truth environment: the POMDP's fixed map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    pub name: String,
    pub occupancy: OccupancyGrid,
    pub semantics: SemanticGrid,
    pub start: Cell,
}

impl Environment {
    pub fn rows(&self) -> usize {
        self.occupancy.rows()
    }

    pub fn cols(&self) -> usize {
        self.occupancy.cols()
    }

    /// All `(identifier, cell)` pairs carrying a room number, row-major.
    pub fn room_cells(&self) -> impl Iterator<Item = (&str, Cell)> + '_ {
        self.occupancy.iter_cells().filter_map(move |c| {
            self.semantics.get(c).room_number().map(|id| (id, c))
        })
    }

    /// The unique cell whose room number equals `identifier`.
    pub fn goal_cell(&self, identifier: &str) -> Result<Cell, GoalError> {
        let mut found = None;
        for (id, cell) in self.room_cells() {
            if id == identifier {
                match found {
                    None => found = Some(cell),
                    Some(first) => {
                        return Err(GoalError::AmbiguousGoal(identifier.to_string(), first, cell))
                    }
                }
            }
        }
        found.ok_or_else(|| GoalError::GoalNotFound(identifier.to_string()))
    }

    pub fn goal_spec(&self, identifier: &str) -> Result<GoalSpec, GoalError> {
        Ok(GoalSpec { identifier: identifier.to_string(), target_cell: self.goal_cell(identifier)? })
    }

    /// Check every type invariant; used by the loader and generators.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let (rows, cols) = (self.rows(), self.cols());
        if self.semantics.rows() != rows || self.semantics.cols() != cols {
            return Err(ValidationError::DimensionMismatch {
                occ: (rows, cols),
                sem: (self.semantics.rows(), self.semantics.cols()),
            });
        }
        if !self.occupancy.in_bounds(self.start) {
            return Err(ValidationError::StartOutOfBounds(self.start));
        }
        if !self.occupancy.is_free(self.start) {
            return Err(ValidationError::StartOccupied(self.start));
        }
        for cell in self.occupancy.iter_cells() {
            let sem = self.semantics.get(cell);
            let occupied = !self.occupancy.is_free(cell);
            if !sem.label.matches_occupancy(occupied) {
                return Err(ValidationError::CorrelationMismatch {
                    cell,
                    label: sem.label,
                    occupied,
                });
            }
            if sem.attributes.keys().any(String::is_empty) {
                return Err(ValidationError::EmptyAttributeKey(cell));
            }
            if sem.room_number().is_some() {
                let adjacent_free = self.occupancy.is_free(cell)
                    || cell
                        .neighbors4(rows, cols)
                        .any(|n| self.occupancy.is_free(n));
                if !adjacent_free {
                    return Err(ValidationError::IsolatedRoomCell(cell));
                }
            }
        }
        Ok(())
    }
}

/// A resolved navigation goal: identifier plus its unique cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalSpec {
    pub identifier: String,
    pub target_cell: Cell,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GoalError {
    #[error("goal identifier {0:?} not found in environment")]
    GoalNotFound(String),
    #[error("goal identifier {0:?} is ambiguous: found at {1} and {2}")]
    AmbiguousGoal(String, Cell, Cell),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("semantic grid is {sem:?} but occupancy grid is {occ:?}")]
    DimensionMismatch { occ: (usize, usize), sem: (usize, usize) },
    #[error("start cell {0} is out of bounds")]
    StartOutOfBounds(Cell),
    #[error("start cell {0} is occupied")]
    StartOccupied(Cell),
    #[error("cell {cell} has label {label:?} but occupancy {}", if *occupied { 1 } else { 0 })]
    CorrelationMismatch { cell: Cell, label: CellLabel, occupied: bool },
    #[error("cell {0} has an empty attribute key")]
    EmptyAttributeKey(Cell),
    #[error("room-number cell {0} has no free 4-neighbor and is not free itself")]
    IsolatedRoomCell(Cell),
}

/// A room identifier split into its numeric part and alphanumeric suffix,
/// e.g. `"641A"` -> `(641, "A")`. Ordering: numeric part first, then suffix,
/// so `"641" < "641A" < "641B" < "642"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RoomId {
    pub number: u64,
    pub suffix: String,
}

impl RoomId {
    /// Parse `digits [letters]`; anything else is not a room identifier.
    pub fn parse(id: &str) -> Option<RoomId> {
        let digits_end = id.find(|c: char| !c.is_ascii_digit()).unwrap_or(id.len());
        if digits_end == 0 {
            return None;
        }
        let (digits, suffix) = id.split_at(digits_end);
        if !suffix.chars().all(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        let number = digits.parse().ok()?;
        Some(RoomId { number, suffix: suffix.to_string() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_env() -> Environment {
        // 1x3 corridor: free, free, door "7".
        let mut occupancy = OccupancyGrid::filled(1, 3, 0);
        occupancy.set(Cell::new(0, 2), 1);
        let mut semantics = SemanticGrid::implied_by(&occupancy);
        *semantics.get_mut(Cell::new(0, 2)) = CellSemantics::door("7");
        Environment { name: "tiny".into(), occupancy, semantics, start: Cell::new(0, 0) }
    }

    #[test]
    fn goal_cell_direct_lookup() {
        let env = tiny_env();
        assert_eq!(env.goal_cell("7"), Ok(Cell::new(0, 2)));
    }

    #[test]
    fn goal_cell_missing_identifier() {
        let env = tiny_env();
        assert_eq!(env.goal_cell("999"), Err(GoalError::GoalNotFound("999".into())));
    }

    #[test]
    fn goal_cell_duplicate_is_ambiguous() {
        let mut env = tiny_env();
        env.occupancy.set(Cell::new(0, 1), 1);
        *env.semantics.get_mut(Cell::new(0, 1)) = CellSemantics::door("7");
        assert_eq!(
            env.goal_cell("7"),
            Err(GoalError::AmbiguousGoal("7".into(), Cell::new(0, 1), Cell::new(0, 2)))
        );
    }

    #[test]
    fn validate_catches_correlation_mismatch() {
        let mut env = tiny_env();
        // Claim the door cell is Free while occupancy says occupied.
        env.semantics.get_mut(Cell::new(0, 2)).label = CellLabel::Free;
        assert!(matches!(env.validate(), Err(ValidationError::CorrelationMismatch { .. })));
    }

    #[test]
    fn validate_catches_occupied_start() {
        let mut env = tiny_env();
        env.start = Cell::new(0, 2);
        assert_eq!(env.validate(), Err(ValidationError::StartOccupied(Cell::new(0, 2))));
    }

    #[test]
    fn validate_catches_isolated_room_cell() {
        // 3x3 all walls except a free start corner; room cell in the middle of
        // the far edge has no free neighbor.
        let mut occupancy = OccupancyGrid::filled(3, 3, 1);
        occupancy.set(Cell::new(0, 0), 0);
        let mut semantics = SemanticGrid::implied_by(&occupancy);
        *semantics.get_mut(Cell::new(2, 2)) = CellSemantics::door("1");
        let env = Environment {
            name: "iso".into(),
            occupancy,
            semantics,
            start: Cell::new(0, 0),
        };
        assert_eq!(env.validate(), Err(ValidationError::IsolatedRoomCell(Cell::new(2, 2))));
    }

    #[test]
    fn room_id_ordering() {
        let a = RoomId::parse("641").unwrap();
        let b = RoomId::parse("641A").unwrap();
        let c = RoomId::parse("641B").unwrap();
        let d = RoomId::parse("642").unwrap();
        assert!(a < b && b < c && c < d);
        assert_eq!(RoomId::parse("x641"), None);
        assert_eq!(RoomId::parse(""), None);
        assert_eq!(RoomId::parse("64 1"), None);
    }

    #[test]
    fn neighbors4_order_and_clipping() {
        let cells: Vec<Cell> = Cell::new(0, 0).neighbors4(3, 3).collect();
        assert_eq!(cells, vec![Cell::new(1, 0), Cell::new(0, 1)]);
        let cells: Vec<Cell> = Cell::new(1, 1).neighbors4(3, 3).collect();
        assert_eq!(
            cells,
            vec![Cell::new(0, 1), Cell::new(2, 1), Cell::new(1, 0), Cell::new(1, 2)]
        );
    }
}
