//! Shortest-path search over known free space and frontier extraction.
//!
//! Planning treats unknown cells as non-traversable, uses 4-connectivity with
//! unit step costs, and breaks ties deterministically so identical inputs
//! always produce identical paths.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use thiserror::Error;

use crate::grid::Cell;
use crate::perception::SeenOccupancyGrid;

/// A 4-connected path through known free cells, start and target inclusive.
/// Only a door-style target sanctioned by `allow_occupied_target` may be
/// non-free, and only as the final cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub cells: Vec<Cell>,
}

impl Path {
    /// Number of moves, i.e. `cells.len() - 1`.
    pub fn steps(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }
}

/// Known-free cells with at least one unknown 4-neighbor.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrontierSet {
    cells: BTreeSet<Cell>,
}

impl FrontierSet {
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.contains(&cell)
    }

    /// Members in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.cells.iter().copied()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("start cell {0} is not known-free")]
    InvalidStart(Cell),
    #[error("no known-free path from {from} to {to}")]
    NoPath { from: Cell, to: Cell },
    #[error("no reachable frontier")]
    NoFrontier,
}

struct Node {
    f: usize,
    g: usize,
    cell: Cell,
}

// Max-heap ordering arranged so that `pop` yields: smallest f, then largest g,
// then smallest (row, col).
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .cmp(&self.f)
            .then_with(|| self.g.cmp(&other.g))
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

/// Minimum-length 4-connected path through cells with `seen_occ == 0`, unit
/// step cost, Manhattan heuristic. With `allow_occupied_target` the final cell
/// may be the occupied/door target, reached from a free 4-neighbor. Ties
/// between equal-f nodes break by larger g, then row-major cell order.
pub fn astar(
    seen: &SeenOccupancyGrid,
    start: Cell,
    target: Cell,
    allow_occupied_target: bool,
) -> Result<Path, PlanError> {
    if !seen.in_bounds(start) || !seen.is_known_free(start) {
        return Err(PlanError::InvalidStart(start));
    }
    if !seen.in_bounds(target) {
        return Err(PlanError::NoPath { from: start, to: target });
    }
    if start == target {
        return Ok(Path { cells: vec![start] });
    }
    let (rows, cols) = (seen.rows(), seen.cols());
    let idx = |c: Cell| c.row * cols + c.col;
    let enterable =
        |c: Cell| seen.is_known_free(c) || (allow_occupied_target && c == target);
    if !enterable(target) {
        return Err(PlanError::NoPath { from: start, to: target });
    }

    let mut g_score: Vec<usize> = vec![usize::MAX; rows * cols];
    let mut came_from: Vec<Option<Cell>> = vec![None; rows * cols];
    let mut open = BinaryHeap::new();
    g_score[idx(start)] = 0;
    open.push(Node { f: start.manhattan(target), g: 0, cell: start });

    while let Some(Node { g, cell, .. }) = open.pop() {
        if g > g_score[idx(cell)] {
            continue; // stale entry
        }
        if cell == target {
            let mut cells = vec![cell];
            let mut cur = cell;
            while let Some(prev) = came_from[idx(cur)] {
                cells.push(prev);
                cur = prev;
            }
            cells.reverse();
            return Ok(Path { cells });
        }
        // A non-free cell can only ever be the terminal target; do not expand
        // through it.
        if !seen.is_known_free(cell) {
            continue;
        }
        for next in cell.neighbors4(rows, cols) {
            if !enterable(next) {
                continue;
            }
            let tentative = g + 1;
            if tentative < g_score[idx(next)] {
                g_score[idx(next)] = tentative;
                came_from[idx(next)] = Some(cell);
                open.push(Node { f: tentative + next.manhattan(target), g: tentative, cell: next });
            }
        }
    }
    Err(PlanError::NoPath { from: start, to: target })
}

/// Exactly the cells that are known-free with >= 1 unknown 4-neighbor.
pub fn find_frontiers(seen: &SeenOccupancyGrid) -> FrontierSet {
    let (rows, cols) = (seen.rows(), seen.cols());
    let cells = seen
        .iter_cells()
        .filter(|&c| {
            seen.is_known_free(c) && c.neighbors4(rows, cols).any(|n| seen.get(n) == -1)
        })
        .collect();
    FrontierSet { cells }
}

/// BFS distances over known-free cells from `from`; `None` marks unreachable.
fn reachable_distances(seen: &SeenOccupancyGrid, from: Cell) -> Vec<Option<usize>> {
    let (rows, cols) = (seen.rows(), seen.cols());
    let idx = |c: Cell| c.row * cols + c.col;
    let mut dist = vec![None; rows * cols];
    if !seen.is_known_free(from) {
        return dist;
    }
    let mut queue = VecDeque::new();
    dist[idx(from)] = Some(0);
    queue.push_back(from);
    while let Some(cur) = queue.pop_front() {
        let d = dist[idx(cur)].unwrap();
        for n in cur.neighbors4(rows, cols) {
            if seen.is_known_free(n) && dist[idx(n)].is_none() {
                dist[idx(n)] = Some(d + 1);
                queue.push_back(n);
            }
        }
    }
    dist
}

/// The frontier cell with minimum path length from `agent`, ties broken by
/// row-major order. Unreachable frontiers are skipped.
pub fn nearest_frontier(seen: &SeenOccupancyGrid, agent: Cell) -> Result<Cell, PlanError> {
    if !seen.in_bounds(agent) || !seen.is_known_free(agent) {
        return Err(PlanError::InvalidStart(agent));
    }
    let cols = seen.cols();
    let dist = reachable_distances(seen, agent);
    find_frontiers(seen)
        .iter()
        .filter_map(|c| dist[c.row * cols + c.col].map(|d| (d, c)))
        .min_by_key(|&(d, c)| (d, c))
        .map(|(_, c)| c)
        .ok_or(PlanError::NoFrontier)
}

/// The known-free cell reachable from `agent` that minimizes Manhattan
/// distance to `desired`; ties by shorter path from the agent, then row-major
/// order. The agent's own cell is always a candidate, so this never fails for
/// a valid agent position.
pub fn snap_to_reachable(
    seen: &SeenOccupancyGrid,
    agent: Cell,
    desired: Cell,
) -> Result<Cell, PlanError> {
    if !seen.in_bounds(agent) || !seen.is_known_free(agent) {
        return Err(PlanError::InvalidStart(agent));
    }
    let cols = seen.cols();
    let dist = reachable_distances(seen, agent);
    let best = seen
        .iter_cells()
        .filter_map(|c| dist[c.row * cols + c.col].map(|d| (c.manhattan(desired), d, c)))
        .min_by_key(|&(m, d, c)| (m, d, c))
        .map(|(_, _, c)| c)
        .expect("agent cell is always reachable from itself");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Environment, OccupancyGrid, SemanticGrid};
    use crate::perception::{observe, AgentBelief};

    /// Fully reveal an occupancy pattern into a seen grid. '#' = occupied,
    /// '.' = free, '?' = left unknown.
    fn seen_from_art(art: &[&str]) -> SeenOccupancyGrid {
        let rows = art.len();
        let cols = art[0].len();
        let mut occupancy = OccupancyGrid::filled(rows, cols, 0);
        let mut unknown = Vec::new();
        for (r, line) in art.iter().enumerate() {
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '#' => occupancy.set(Cell::new(r, c), 1),
                    '?' => unknown.push(Cell::new(r, c)),
                    '.' => {}
                    _ => panic!("bad art char {ch:?}"),
                }
            }
        }
        let semantics = SemanticGrid::implied_by(&occupancy);
        let env = Environment {
            name: "art".into(),
            occupancy,
            semantics,
            start: Cell::new(0, 0),
        };
        let mut belief = AgentBelief::new(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                let cell = Cell::new(r, c);
                if !unknown.contains(&cell) {
                    belief.fuse(&observe(&env, cell, 1)).unwrap();
                }
            }
        }
        belief.seen_occ
    }

    #[test]
    fn straight_corridor_path() {
        let seen = seen_from_art(&["...."]);
        let path = astar(&seen, Cell::new(0, 0), Cell::new(0, 3), false).unwrap();
        assert_eq!(path.cells.len(), 4);
        assert_eq!(path.steps(), 3);
    }

    #[test]
    fn separating_wall_gives_no_path() {
        let seen = seen_from_art(&[".#.", ".#.", ".#."]);
        assert_eq!(
            astar(&seen, Cell::new(0, 0), Cell::new(0, 2), false),
            Err(PlanError::NoPath { from: Cell::new(0, 0), to: Cell::new(0, 2) })
        );
    }

    #[test]
    fn unknown_cells_are_not_traversable() {
        let seen = seen_from_art(&[".?.", ".?.", "..."]);
        let path = astar(&seen, Cell::new(0, 0), Cell::new(0, 2), false).unwrap();
        assert_eq!(path.steps(), 6); // around via the bottom row
    }

    #[test]
    fn occupied_target_requires_permission() {
        let seen = seen_from_art(&["..#"]);
        assert!(astar(&seen, Cell::new(0, 0), Cell::new(0, 2), false).is_err());
        let path = astar(&seen, Cell::new(0, 0), Cell::new(0, 2), true).unwrap();
        assert_eq!(path.cells, vec![Cell::new(0, 0), Cell::new(0, 1), Cell::new(0, 2)]);
    }

    #[test]
    fn occupied_cells_never_appear_mid_path() {
        let seen = seen_from_art(&["...", ".#.", "..."]);
        let path = astar(&seen, Cell::new(0, 0), Cell::new(1, 1), true).unwrap();
        for cell in &path.cells[..path.cells.len() - 1] {
            assert!(seen.is_known_free(*cell));
        }
    }

    #[test]
    fn invalid_start_reported() {
        let seen = seen_from_art(&["#.."]);
        assert_eq!(
            astar(&seen, Cell::new(0, 0), Cell::new(0, 2), false),
            Err(PlanError::InvalidStart(Cell::new(0, 0)))
        );
    }

    #[test]
    fn fully_known_grid_has_no_frontiers() {
        let seen = seen_from_art(&["...", "...", "..."]);
        assert!(find_frontiers(&seen).is_empty());
    }

    #[test]
    fn lone_known_cell_is_the_only_frontier() {
        let seen = seen_from_art(&["??", "?."]);
        let frontiers = find_frontiers(&seen);
        assert_eq!(frontiers.len(), 1);
        assert!(frontiers.contains(Cell::new(1, 1)));
    }

    #[test]
    fn nearest_frontier_prefers_shorter_path() {
        // Frontier cells: (0,1) at distance 1, (1,2) and (2,1) at distance 3.
        let seen = seen_from_art(&["..?", "...", "..?"]);
        assert_eq!(nearest_frontier(&seen, Cell::new(0, 0)), Ok(Cell::new(0, 1)));
    }

    #[test]
    fn no_unknown_cells_means_no_frontier() {
        let seen = seen_from_art(&["...", "..."]);
        assert_eq!(nearest_frontier(&seen, Cell::new(0, 0)), Err(PlanError::NoFrontier));
    }

    #[test]
    fn unreachable_frontiers_are_skipped() {
        let seen = seen_from_art(&["..#.?"]);
        // (0,3) borders the unknown (0,4) but is cut off by the wall at (0,2).
        assert_eq!(nearest_frontier(&seen, Cell::new(0, 0)), Err(PlanError::NoFrontier));
    }

    #[test]
    fn snap_returns_desired_when_reachable() {
        let seen = seen_from_art(&["...", "...", "..."]);
        assert_eq!(
            snap_to_reachable(&seen, Cell::new(0, 0), Cell::new(2, 2)),
            Ok(Cell::new(2, 2))
        );
    }

    #[test]
    fn snap_moves_off_unknown_cells() {
        let seen = seen_from_art(&["..?"]);
        assert_eq!(
            snap_to_reachable(&seen, Cell::new(0, 0), Cell::new(0, 2)),
            Ok(Cell::new(0, 1))
        );
    }

    #[test]
    fn snap_falls_back_to_agent_when_isolated() {
        let seen = seen_from_art(&[".#?"]);
        assert_eq!(
            snap_to_reachable(&seen, Cell::new(0, 0), Cell::new(0, 2)),
            Ok(Cell::new(0, 0))
        );
    }
}
