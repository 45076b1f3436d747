//! Goal-region prediction: the pluggable seat for the language model.
//!
//! A predictor receives the agent's seen grids and position and answers with
//! an optional region (up/down/left/right of the agent) where the goal likely
//! lies, plus free-form reasoning and inferred pattern notes. Abstention
//! (no region) is first-class: the control loop maps it to "no new evidence"
//! and falls back to frontier exploration.

use std::time::Duration;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::belief::Region;
use crate::grid::Cell;
use crate::perception::{SeenOccupancyGrid, SeenSemanticGrid};

mod external;
mod rule;
mod sign;

pub use external::{
    build_wire_request, parse_wire_response, post_json, ExternalPredictor, Transcript,
    TranscriptRecord, TranscriptReplayPredictor, TranscriptWriter,
};
pub use rule::RulePredictor;
pub use sign::parse_sign;

/// Everything a predictor may look at for one query.
#[derive(Debug, Clone, Copy)]
pub struct PredictionQuery<'a> {
    pub goal: &'a str,
    pub agent_pos: Cell,
    pub seen_occ: &'a SeenOccupancyGrid,
    pub seen_sem: &'a SeenSemanticGrid,
    pub pattern_notes: &'a [String],
}

/// A single prediction: reasoning text, inferred patterns, and the region
/// (absent when the predictor abstains).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PredictionResult {
    pub reasoning: String,
    pub patterns: Vec<String>,
    pub region: Option<Region>,
}

impl PredictionResult {
    pub fn abstain() -> Self {
        Self::default()
    }

    pub fn region(region: Region) -> Self {
        Self { region: Some(region), ..Self::default() }
    }
}

#[derive(Debug, Error)]
pub enum PredictorError {
    #[error("predictor request timed out after {0:?}")]
    Timeout(Duration),
    #[error("predictor transport error: {0}")]
    Transport(String),
    #[error("replay transcript exhausted at query {0}")]
    ReplayExhausted(usize),
}

/// The goal-region prediction contract. Implementations must be deterministic
/// given identical queries, or report `deterministic() == false` (external
/// LLMs) so callers know to record transcripts for replay.
pub trait GoalRegionPredictor {
    fn predict(&mut self, query: &PredictionQuery<'_>) -> Result<PredictionResult, PredictorError>;

    fn deterministic(&self) -> bool {
        true
    }
}

/// Replays a fixed script of regions/abstentions, abstaining once exhausted.
#[derive(Debug, Clone)]
pub struct ScriptedPredictor {
    script: Vec<Option<Region>>,
    next: usize,
}

impl ScriptedPredictor {
    pub fn new(script: Vec<Option<Region>>) -> Self {
        Self { script, next: 0 }
    }

    /// A predictor that abstains on every query.
    pub fn always_abstain() -> Self {
        Self::new(Vec::new())
    }
}

impl GoalRegionPredictor for ScriptedPredictor {
    fn predict(&mut self, _query: &PredictionQuery<'_>) -> Result<PredictionResult, PredictorError> {
        let entry = self.script.get(self.next).copied().flatten();
        self.next += 1;
        Ok(match entry {
            Some(region) => PredictionResult::region(region),
            None => PredictionResult::abstain(),
        })
    }
}

/// Seeded-uniform choice among the four regions: the degenerate "no usable
/// semantics" behavior, reproducible per (seed, query ordinal).
#[derive(Debug, Clone)]
pub struct UniformPredictor {
    rng: ChaCha8Rng,
}

impl UniformPredictor {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl GoalRegionPredictor for UniformPredictor {
    fn predict(&mut self, _query: &PredictionQuery<'_>) -> Result<PredictionResult, PredictorError> {
        let region = Region::all()[self.rng.gen_range(0..4)];
        Ok(PredictionResult::region(region))
    }
}

/// Ground-truth test double: always names a half-plane that contains the
/// goal cell. When it knows the map it prefers, among the truthful regions,
/// the one the ground-truth shortest path actually enters next; otherwise it
/// falls back to the axis with the larger offset (column axis on ties).
/// Abstains only when no half-plane relative to the agent contains the goal.
#[derive(Debug, Clone)]
pub struct OraclePredictor {
    goal_cell: Cell,
    /// BFS distance over ground-truth free cells to the goal's success set.
    distance: Option<DistanceField>,
}

#[derive(Debug, Clone)]
struct DistanceField {
    rows: usize,
    cols: usize,
    values: Vec<Option<usize>>,
}

impl OraclePredictor {
    /// Goal-cell-only oracle: truthful half-planes by offset magnitude.
    pub fn new(goal_cell: Cell) -> Self {
        Self { goal_cell, distance: None }
    }

    /// Map-aware oracle: truthful half-planes aligned with the ground-truth
    /// shortest path where possible.
    pub fn for_env(env: &crate::grid::Environment, goal_cell: Cell) -> Self {
        let (rows, cols) = (env.rows(), env.cols());
        let idx = |c: Cell| c.row * cols + c.col;
        let mut values: Vec<Option<usize>> = vec![None; rows * cols];
        let mut queue = std::collections::VecDeque::new();
        // Seed with the success set: the goal cell itself when free, else its
        // free 4-neighbors.
        if env.occupancy.is_free(goal_cell) {
            values[idx(goal_cell)] = Some(0);
            queue.push_back(goal_cell);
        } else {
            for n in goal_cell.neighbors4(rows, cols) {
                if env.occupancy.is_free(n) {
                    values[idx(n)] = Some(0);
                    queue.push_back(n);
                }
            }
        }
        while let Some(cur) = queue.pop_front() {
            for n in cur.neighbors4(rows, cols) {
                if env.occupancy.is_free(n) && values[idx(n)].is_none() {
                    values[idx(n)] = Some(values[idx(cur)].unwrap() + 1);
                    queue.push_back(n);
                }
            }
        }
        Self { goal_cell, distance: Some(DistanceField { rows, cols, values }) }
    }

    fn truthful(&self, pos: Cell, region: Region) -> bool {
        region.contains(pos, self.goal_cell)
    }

    /// The direction of the distance-descending neighbor, if known.
    fn path_step(&self, pos: Cell) -> Option<Region> {
        let field = self.distance.as_ref()?;
        let at = |c: Cell| field.values[c.row * field.cols + c.col];
        let here = at(pos)?;
        let mut best: Option<(usize, Region)> = None;
        for next in pos.neighbors4(field.rows, field.cols) {
            if let Some(d) = at(next) {
                if d < here {
                    let region = match (next.row as i64 - pos.row as i64,
                                        next.col as i64 - pos.col as i64) {
                        (-1, 0) => Region::Up,
                        (1, 0) => Region::Down,
                        (0, -1) => Region::Left,
                        _ => Region::Right,
                    };
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, region));
                    }
                }
            }
        }
        best.map(|(_, r)| r)
    }
}

impl GoalRegionPredictor for OraclePredictor {
    fn predict(&mut self, query: &PredictionQuery<'_>) -> Result<PredictionResult, PredictorError> {
        let pos = query.agent_pos;
        if let Some(step) = self.path_step(pos) {
            if self.truthful(pos, step) {
                return Ok(PredictionResult::region(step));
            }
        }
        let dr = self.goal_cell.row as i64 - pos.row as i64;
        let dc = self.goal_cell.col as i64 - pos.col as i64;
        let region = if dc.abs() >= dr.abs() && dc != 0 {
            Some(if dc > 0 { Region::Right } else { Region::Left })
        } else if dr != 0 {
            Some(if dr > 0 { Region::Down } else { Region::Up })
        } else {
            None
        };
        Ok(PredictionResult { reasoning: String::new(), patterns: Vec::new(), region })
    }
}
