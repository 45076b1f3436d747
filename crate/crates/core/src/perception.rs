//! The k×k partial observation model and the agent's accumulated seen-grids.
//!
//! The agent perceives a local k×k window (Chebyshev radius (k−1)/2) centered
//! at its position, clipped at map borders, with full visibility inside the
//! window (no occlusion). Observations are fused into a `SeenOccupancyGrid`
//! (−1 unknown / 0 free / 1 occupied) and a `SeenSemanticGrid` of attribute
//! maps, both initialized fully unknown.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::grid::{Cell, CellSemantics, Environment, ATTR_ROOM_NUMBER, ATTR_SIGN_TEXT};

/// One clipped k×k sensor reading.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub center: Cell,
    /// Window side length; odd, >= 1.
    pub k: usize,
    pub patch: Vec<ObservedCell>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservedCell {
    pub cell: Cell,
    pub occupied: bool,
    pub semantics: CellSemantics,
}

/// Ground-truth readout of the in-bounds cells of the k×k window around
/// `agent_pos`. Out-of-bounds cells are clipped, not padded.
pub fn observe(env: &Environment, agent_pos: Cell, k: usize) -> Observation {
    assert!(k % 2 == 1, "window side length k must be odd, got {k}");
    let radius = (k - 1) / 2;
    let (rows, cols) = (env.rows(), env.cols());
    let r0 = agent_pos.row.saturating_sub(radius);
    let r1 = (agent_pos.row + radius).min(rows - 1);
    let c0 = agent_pos.col.saturating_sub(radius);
    let c1 = (agent_pos.col + radius).min(cols - 1);
    let mut patch = Vec::with_capacity((r1 - r0 + 1) * (c1 - c0 + 1));
    for row in r0..=r1 {
        for col in c0..=c1 {
            let cell = Cell::new(row, col);
            patch.push(ObservedCell {
                cell,
                occupied: !env.occupancy.is_free(cell),
                semantics: env.semantics.get(cell).clone(),
            });
        }
    }
    Observation { center: agent_pos, k, patch }
}

/// Occupancy as seen so far: −1 unknown, 0 free, 1 occupied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeenOccupancyGrid {
    rows: usize,
    cols: usize,
    cells: Vec<i8>,
}

impl SeenOccupancyGrid {
    pub fn unknown(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        Self { rows, cols, cells: vec![-1; rows * cols] }
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

    pub fn get(&self, cell: Cell) -> i8 {
        self.cells[cell.row * self.cols + cell.col]
    }

    fn set(&mut self, cell: Cell, value: i8) {
        self.cells[cell.row * self.cols + cell.col] = value;
    }

    pub fn is_known_free(&self, cell: Cell) -> bool {
        self.get(cell) == 0
    }

    pub fn known_count(&self) -> usize {
        self.cells.iter().filter(|&&v| v != -1).count()
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let cols = self.cols;
        (0..self.rows).flat_map(move |r| (0..cols).map(move |c| Cell::new(r, c)))
    }

    /// Row strings over the alphabet `-`, `0`, `1` (snapshot/wire encoding).
    pub fn to_row_strings(&self) -> Vec<String> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| match self.get(Cell::new(r, c)) {
                        -1 => '-',
                        0 => '0',
                        _ => '1',
                    })
                    .collect()
            })
            .collect()
    }
}

/// Attributes seen so far; empty maps mean nothing observed at that cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeenSemanticGrid {
    rows: usize,
    cols: usize,
    cells: Vec<BTreeMap<String, String>>,
}

impl SeenSemanticGrid {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: vec![BTreeMap::new(); rows * cols] }
    }

    pub fn get(&self, cell: Cell) -> &BTreeMap<String, String> {
        &self.cells[cell.row * self.cols + cell.col]
    }

    fn get_mut(&mut self, cell: Cell) -> &mut BTreeMap<String, String> {
        &mut self.cells[cell.row * self.cols + cell.col]
    }

    /// Cells with at least one seen attribute, row-major.
    pub fn iter_non_empty(&self) -> impl Iterator<Item = (Cell, &BTreeMap<String, String>)> {
        self.cells.iter().enumerate().filter(|&(_i, m)| !m.is_empty()).map(|(i, m)| (Cell::new(i / self.cols, i % self.cols), m))
    }
}

/// The agent's world model: seen grids plus predictor-inferred pattern notes.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentBelief {
    pub seen_occ: SeenOccupancyGrid,
    pub seen_sem: SeenSemanticGrid,
    pub pattern_notes: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FuseConflict {
    #[error("cell {cell}: observed occupancy {observed} contradicts previously seen {prior}")]
    Occupancy { cell: Cell, prior: i8, observed: i8 },
    #[error("cell {cell}: attribute {key:?} observed as {observed:?}, previously {prior:?}")]
    Attribute { cell: Cell, key: String, prior: String, observed: String },
}

impl AgentBelief {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            seen_occ: SeenOccupancyGrid::unknown(rows, cols),
            seen_sem: SeenSemanticGrid::empty(rows, cols),
            pattern_notes: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.seen_occ.rows()
    }

    pub fn cols(&self) -> usize {
        self.seen_occ.cols()
    }

    /// Write an observation into the seen grids. Re-observing a cell with the
    /// same values is a no-op; a contradiction means the environment mutated
    /// underneath us and is reported as a `FuseConflict`.
    pub fn fuse(&mut self, obs: &Observation) -> Result<(), FuseConflict> {
        for observed in &obs.patch {
            let cell = observed.cell;
            assert!(self.seen_occ.in_bounds(cell), "observation cell {cell} out of bounds");
            let value = i8::from(observed.occupied);
            let prior = self.seen_occ.get(cell);
            if prior != -1 && prior != value {
                return Err(FuseConflict::Occupancy { cell, prior, observed: value });
            }
            for (key, val) in &observed.semantics.attributes {
                if let Some(existing) = self.seen_sem.get(cell).get(key) {
                    if existing != val {
                        return Err(FuseConflict::Attribute {
                            cell,
                            key: key.clone(),
                            prior: existing.clone(),
                            observed: val.clone(),
                        });
                    }
                }
            }
            self.seen_occ.set(cell, value);
            let attrs = self.seen_sem.get_mut(cell);
            for (key, val) in &observed.semantics.attributes {
                attrs.insert(key.clone(), val.clone());
            }
        }
        Ok(())
    }

    /// The cell whose seen room number equals `goal`, if observed; row-major
    /// first match.
    pub fn goal_visible(&self, goal: &str) -> Option<Cell> {
        self.seen_sem
            .iter_non_empty()
            .find(|(_, attrs)| attrs.get(ATTR_ROOM_NUMBER).map(String::as_str) == Some(goal))
            .map(|(cell, _)| cell)
    }

    /// Fraction of cells that have left the unknown state.
    pub fn explored_fraction(&self) -> f64 {
        self.seen_occ.known_count() as f64 / (self.rows() * self.cols()) as f64
    }

    /// Append pattern notes not already present, preserving order.
    pub fn add_pattern_notes<I, S>(&mut self, notes: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        for note in notes {
            let note = note.as_ref();
            if !self.pattern_notes.iter().any(|n| n == note) {
                self.pattern_notes.push(note.to_string());
            }
        }
    }

    /// Belief snapshot in the environment file schema, with the seen-occupancy
    /// alphabet `-`/`0`/`1` and an extra `pattern_notes` array. `agent` fills
    /// the `start` slot.
    pub fn snapshot_json(&self, name: &str, agent: Cell) -> Vec<u8> {
        #[derive(serde::Serialize)]
        struct Snapshot<'a> {
            name: &'a str,
            rows: usize,
            cols: usize,
            start: [usize; 2],
            occupancy: Vec<String>,
            semantics: Vec<SnapshotEntry>,
            pattern_notes: &'a [String],
        }
        #[derive(serde::Serialize)]
        struct SnapshotEntry {
            cell: [usize; 2],
            label: &'static str,
            #[serde(skip_serializing_if = "Option::is_none")]
            room_number: Option<String>,
            #[serde(skip_serializing_if = "Option::is_none")]
            sign_text: Option<String>,
        }
        let semantics = self
            .seen_sem
            .iter_non_empty()
            .map(|(cell, attrs)| SnapshotEntry {
                cell: [cell.row, cell.col],
                label: match self.seen_occ.get(cell) {
                    0 => "Free",
                    _ if attrs.contains_key(ATTR_ROOM_NUMBER) => "Door",
                    _ => "Wall",
                },
                room_number: attrs.get(ATTR_ROOM_NUMBER).cloned(),
                sign_text: attrs.get(ATTR_SIGN_TEXT).cloned(),
            })
            .collect();
        let snapshot = Snapshot {
            name,
            rows: self.rows(),
            cols: self.cols(),
            start: [agent.row, agent.col],
            occupancy: self.seen_occ.to_row_strings(),
            semantics,
            pattern_notes: &self.pattern_notes,
        };
        let mut out = serde_json::to_vec_pretty(&snapshot).expect("snapshot serialization");
        out.push(b'\n');
        out
    }
}
