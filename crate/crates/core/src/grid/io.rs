//! Environment file format: UTF-8 JSON with canonical key order.
//!
//! ```json
//! {
//!   "name": "...", "rows": 2, "cols": 2,
//!   "start": [0, 0],
//!   "occupancy": ["00", "01"],
//!   "semantics": [
//!     { "cell": [1, 1], "label": "Door", "room_number": "621" }
//!   ]
//! }
//! ```
//!
//! Cells absent from `semantics` default to the label implied by occupancy
//! (Free or Wall) with no attributes. Validation is strict: unknown keys are
//! rejected and every listed label must match the occupancy bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{
    Cell, CellLabel, Environment, OccupancyGrid, SemanticGrid, ValidationError,
    ATTR_ROOM_NUMBER, ATTR_SIGN_TEXT,
};

#[derive(Debug, Error)]
pub enum EnvFileError {
    /// Malformed JSON or schema mismatch; carries serde's line/column locus.
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("validation error: {0}")]
    Validation(#[from] ValidationError),
    #[error("occupancy has {got} rows, header says {expected}")]
    OccupancyRowCount { expected: usize, got: usize },
    #[error("occupancy row {row} has {got} cells, header says {expected}")]
    OccupancyRowLength { row: usize, expected: usize, got: usize },
    #[error("occupancy row {row} contains {ch:?}; only '0' and '1' are allowed")]
    BadOccupancyChar { row: usize, ch: char },
    #[error("semantics entry for cell {0} is out of bounds")]
    SemanticsOutOfBounds(Cell),
    #[error("duplicate semantics entry for cell {0}")]
    DuplicateSemantics(Cell),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvFile {
    name: String,
    rows: usize,
    cols: usize,
    start: [usize; 2],
    occupancy: Vec<String>,
    semantics: Vec<SemEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SemEntry {
    cell: [usize; 2],
    label: CellLabel,
    #[serde(skip_serializing_if = "Option::is_none")]
    room_number: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sign_text: Option<String>,
}

/// Parse and validate an environment file.
pub fn load_environment(bytes: &[u8]) -> Result<Environment, EnvFileError> {
    let file: EnvFile = serde_json::from_slice(bytes)?;
    if file.rows == 0 || file.cols == 0 {
        return Err(ValidationError::DimensionMismatch {
            occ: (file.rows, file.cols),
            sem: (file.rows, file.cols),
        }
        .into());
    }
    if file.occupancy.len() != file.rows {
        return Err(EnvFileError::OccupancyRowCount {
            expected: file.rows,
            got: file.occupancy.len(),
        });
    }
    let mut occupancy = OccupancyGrid::filled(file.rows, file.cols, 0);
    for (row, line) in file.occupancy.iter().enumerate() {
        if line.chars().count() != file.cols {
            return Err(EnvFileError::OccupancyRowLength {
                row,
                expected: file.cols,
                got: line.chars().count(),
            });
        }
        for (col, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => occupancy.set(Cell::new(row, col), 1),
                _ => return Err(EnvFileError::BadOccupancyChar { row, ch }),
            }
        }
    }
    let mut semantics = SemanticGrid::implied_by(&occupancy);
    let mut seen = vec![false; file.rows * file.cols];
    for entry in &file.semantics {
        let cell = Cell::new(entry.cell[0], entry.cell[1]);
        if !occupancy.in_bounds(cell) {
            return Err(EnvFileError::SemanticsOutOfBounds(cell));
        }
        let idx = cell.row * file.cols + cell.col;
        if seen[idx] {
            return Err(EnvFileError::DuplicateSemantics(cell));
        }
        seen[idx] = true;
        let sem = semantics.get_mut(cell);
        sem.label = entry.label;
        if let Some(room) = &entry.room_number {
            sem.attributes.insert(ATTR_ROOM_NUMBER.to_string(), room.clone());
        }
        if let Some(sign) = &entry.sign_text {
            sem.attributes.insert(ATTR_SIGN_TEXT.to_string(), sign.clone());
        }
    }
    let env = Environment {
        name: file.name,
        occupancy,
        semantics,
        start: Cell::new(file.start[0], file.start[1]),
    };
    env.validate()?;
    Ok(env)
}

/// Serialize an environment in canonical form. Saving, loading, and saving
/// again yields byte-identical output.
pub fn save_environment(env: &Environment) -> Vec<u8> {
    let occupancy = (0..env.rows())
        .map(|r| {
            (0..env.cols())
                .map(|c| if env.occupancy.is_free(Cell::new(r, c)) { '0' } else { '1' })
                .collect()
        })
        .collect();
    // Emit only entries that differ from the occupancy-implied default.
    let semantics = env
        .occupancy
        .iter_cells()
        .filter_map(|cell| {
            let sem = env.semantics.get(cell);
            if sem.label == CellLabel::Door || !sem.attributes.is_empty() {
                Some(SemEntry {
                    cell: [cell.row, cell.col],
                    label: sem.label,
                    room_number: sem.room_number().map(str::to_string),
                    sign_text: sem.sign_text().map(str::to_string),
                })
            } else {
                None
            }
        })
        .collect();
    let file = EnvFile {
        name: env.name.clone(),
        rows: env.rows(),
        cols: env.cols(),
        start: [env.start.row, env.start.col],
        occupancy,
        semantics,
    };
    let mut out = serde_json::to_vec_pretty(&file).expect("environment serialization");
    out.push(b'\n');
    out
}
