//! The confidence grid: a non-negative score field over cells acting as a
//! belief heatmap over the goal's location.
//!
//! Update pipeline per prediction, in this order: exponential decay, then the
//! +1 half-plane increment for the predicted region, then resetting explored
//! non-goal cells to zero. Scores are not normalized; the grid is a score
//! field, not a distribution.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::grid::{Cell, ATTR_ROOM_NUMBER};
use crate::perception::AgentBelief;

/// A predicted goal region relative to the agent: the open half-plane of all
/// cells strictly above/below/left/right of the agent's row or column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Up,
    Down,
    Left,
    Right,
}

impl Region {
    pub fn all() -> [Region; 4] {
        [Region::Up, Region::Down, Region::Left, Region::Right]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Region::Up => "up",
            Region::Down => "down",
            Region::Left => "left",
            Region::Right => "right",
        }
    }

    /// Whether `cell` lies in this region's half-plane relative to `agent`.
    pub fn contains(self, agent: Cell, cell: Cell) -> bool {
        match self {
            Region::Up => cell.row < agent.row,
            Region::Down => cell.row > agent.row,
            Region::Left => cell.col < agent.col,
            Region::Right => cell.col > agent.col,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "up" => Ok(Region::Up),
            "down" => Ok(Region::Down),
            "left" => Ok(Region::Left),
            "right" => Ok(Region::Right),
            other => Err(format!("unknown region {other:?}")),
        }
    }
}

/// Belief heatmap over goal location. All values are >= 0; the grid starts at
/// all zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceGrid {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    alpha: f64,
}

impl ConfidenceGrid {
    pub fn new(rows: usize, cols: usize, alpha: f64) -> Self {
        assert!(rows > 0 && cols > 0, "grid dimensions must be positive");
        assert!(
            alpha > 0.0 && alpha < 1.0,
            "decay factor must lie in the open interval (0, 1), got {alpha}"
        );
        Self { rows, cols, values: vec![0.0; rows * cols], alpha }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn value(&self, cell: Cell) -> f64 {
        self.values[cell.row * self.cols + cell.col]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `C <- alpha * C`.
    pub fn decay(&mut self) {
        for v in &mut self.values {
            *v *= self.alpha;
        }
    }

    /// Add 1 to every cell of the predicted half-plane relative to `agent`.
    pub fn apply_prediction(&mut self, agent: Cell, region: Region) {
        for row in 0..self.rows {
            for col in 0..self.cols {
                let cell = Cell::new(row, col);
                if region.contains(agent, cell) {
                    self.values[row * self.cols + col] += 1.0;
                }
            }
        }
    }

    /// Zero every explored cell that is not the seen goal cell. Unexplored
    /// cells and the goal cell (if seen) keep their values.
    pub fn reset_explored(&mut self, belief: &AgentBelief, goal: &str) {
        debug_assert_eq!((belief.rows(), belief.cols()), (self.rows, self.cols));
        for row in 0..self.rows {
            for col in 0..self.cols {
                let cell = Cell::new(row, col);
                if belief.seen_occ.get(cell) == -1 {
                    continue;
                }
                let is_goal = belief.seen_sem.get(cell).get(ATTR_ROOM_NUMBER).map(String::as_str)
                    == Some(goal);
                if !is_goal {
                    self.values[row * self.cols + col] = 0.0;
                }
            }
        }
    }

    /// Centroid of the argmax set: component-wise arithmetic mean rounded
    /// half-away-from-zero. For an all-uniform grid the argmax set is the
    /// whole grid and the result is the grid center.
    pub fn argmax_centroid(&self) -> Cell {
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut row_sum, mut col_sum, mut count) = (0usize, 0usize, 0usize);
        for (i, &v) in self.values.iter().enumerate() {
            if v == max {
                row_sum += i / self.cols;
                col_sum += i % self.cols;
                count += 1;
            }
        }
        // f64::round rounds half away from zero.
        let row = (row_sum as f64 / count as f64).round() as usize;
        let col = (col_sum as f64 / count as f64).round() as usize;
        Cell::new(row, col)
    }

    /// True iff `max - min <= epsilon`.
    pub fn is_uniform(&self, epsilon: f64) -> bool {
        debug_assert!(epsilon >= 0.0);
        self.max_value() - self.min_value() <= epsilon
    }

    /// Heatmap export: values carry 17 significant digits so parsing yields
    /// the exact same f64s.
    pub fn to_json(&self) -> String {
        let values: Vec<String> = self.values.iter().map(|v| format!("{v:.16e}")).collect();
        format!(
            "{{\"rows\":{},\"cols\":{},\"alpha\":{:.16e},\"values\":[{}]}}",
            self.rows,
            self.cols,
            self.alpha,
            values.join(",")
        )
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        #[derive(Deserialize)]
        struct Heatmap {
            rows: usize,
            cols: usize,
            alpha: f64,
            values: Vec<f64>,
        }
        let raw: Heatmap = serde_json::from_str(text)?;
        let mut grid = ConfidenceGrid::new(raw.rows, raw.cols, raw.alpha);
        assert_eq!(raw.values.len(), raw.rows * raw.cols, "heatmap value count mismatch");
        grid.values = raw.values;
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(grid: &mut ConfidenceGrid, cell: Cell, v: f64) {
        let cols = grid.cols;
        grid.values[cell.row * cols + cell.col] = v;
    }

    #[test]
    fn decay_of_zero_grid_stays_zero() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        grid.decay();
        assert!(grid.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decay_scales_single_cell() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        set(&mut grid, Cell::new(1, 1), 1.0);
        grid.decay();
        assert_eq!(grid.value(Cell::new(1, 1)), 0.9);
    }

    #[test]
    fn right_half_plane_from_center() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        grid.apply_prediction(Cell::new(1, 1), Region::Right);
        for row in 0..3 {
            for col in 0..3 {
                let expected = if col == 2 { 1.0 } else { 0.0 };
                assert_eq!(grid.value(Cell::new(row, col)), expected);
            }
        }
    }

    #[test]
    fn empty_half_plane_is_a_noop() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        grid.apply_prediction(Cell::new(1, 2), Region::Right);
        assert!(grid.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decay_then_double_right_gives_1_9() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        grid.decay();
        grid.apply_prediction(Cell::new(1, 1), Region::Right);
        grid.decay();
        grid.apply_prediction(Cell::new(1, 1), Region::Right);
        for row in 0..3 {
            assert!((grid.value(Cell::new(row, 2)) - 1.9).abs() < 1e-12);
        }
    }

    #[test]
    fn reset_explored_leaves_unexplored_belief_untouched() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        grid.apply_prediction(Cell::new(1, 0), Region::Right);
        let before = grid.clone();
        let belief = AgentBelief::new(3, 3);
        grid.reset_explored(&belief, "9");
        assert_eq!(grid, before);
    }

    #[test]
    fn argmax_centroid_single_max() {
        let mut grid = ConfidenceGrid::new(4, 5, 0.9);
        set(&mut grid, Cell::new(2, 3), 2.0);
        assert_eq!(grid.argmax_centroid(), Cell::new(2, 3));
    }

    #[test]
    fn argmax_centroid_mean_of_two() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        set(&mut grid, Cell::new(0, 0), 1.0);
        set(&mut grid, Cell::new(2, 2), 1.0);
        assert_eq!(grid.argmax_centroid(), Cell::new(1, 1));
    }

    #[test]
    fn argmax_centroid_rounds_half_away_from_zero() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        set(&mut grid, Cell::new(0, 0), 1.0);
        set(&mut grid, Cell::new(1, 0), 1.0);
        // Mean row 0.5 rounds to 1.
        assert_eq!(grid.argmax_centroid(), Cell::new(1, 0));
    }

    #[test]
    fn uniform_zero_grid() {
        let grid = ConfidenceGrid::new(3, 3, 0.9);
        assert!(grid.is_uniform(1e-9));
    }

    #[test]
    fn one_hot_grid_is_not_uniform() {
        let mut grid = ConfidenceGrid::new(3, 3, 0.9);
        set(&mut grid, Cell::new(1, 1), 1.0);
        assert!(!grid.is_uniform(1e-9));
    }

    #[test]
    fn heatmap_json_round_trips_exactly() {
        let mut grid = ConfidenceGrid::new(2, 3, 0.9);
        set(&mut grid, Cell::new(0, 1), 1.0 / 3.0);
        set(&mut grid, Cell::new(1, 2), 0.123_456_789_012_345_68);
        let parsed = ConfidenceGrid::from_json(&grid.to_json()).unwrap();
        assert_eq!(grid, parsed);
    }

    #[test]
    #[should_panic(expected = "decay factor")]
    fn alpha_one_rejected() {
        ConfidenceGrid::new(2, 2, 1.0);
    }
}
