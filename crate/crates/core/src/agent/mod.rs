//! Goal extraction, the navigation control loop, termination semantics, and
//! episode traces.
//!
//! One episode is one isolated state machine over an immutable environment.
//! Per iteration the agent observes and fuses its k×k window, goes straight
//! to the goal once it has been seen, and otherwise asks the predictor for a
//! goal region, updates the confidence grid (decay, half-plane increment,
//! explored reset), and takes one step toward the argmax centroid — or toward
//! the nearest frontier when the grid carries no signal.

use std::io::Write;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::Serialize;
use thiserror::Error;

use crate::belief::{ConfidenceGrid, Region};
use crate::grid::{Cell, Environment, GoalSpec};
use crate::perception::{observe, AgentBelief};
use crate::planning::{astar, nearest_frontier, snap_to_reachable, PlanError};
use crate::predictor::{GoalRegionPredictor, PredictionQuery, PredictionResult};

mod baselines;

pub use baselines::{
    describe_observation, run_frontier, run_frontier_with, run_history_llm, run_history_llm_with,
    run_step_llm, run_step_llm_with, summarize_history, ActionChooser, ExternalActionChooser,
    HistoryChooser, HistoryEntry, HistorySummary, RandomActions, RandomHistoryChooser,
    ReplayActionChooser, ScriptedActions,
};

/// Which control policy an episode runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Ours,
    FrontierOnly,
    StepLlm,
    HistoryLlm,
}

/// The four primitive moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepAction {
    Up,
    Down,
    Left,
    Right,
}

impl StepAction {
    pub fn all() -> [StepAction; 4] {
        [StepAction::Up, StepAction::Down, StepAction::Left, StepAction::Right]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StepAction::Up => "up",
            StepAction::Down => "down",
            StepAction::Left => "left",
            StepAction::Right => "right",
        }
    }

    /// The action moving from `from` to an adjacent cell `to`, if any.
    pub fn between(from: Cell, to: Cell) -> Option<StepAction> {
        let dr = to.row as i64 - from.row as i64;
        let dc = to.col as i64 - from.col as i64;
        match (dr, dc) {
            (-1, 0) => Some(StepAction::Up),
            (1, 0) => Some(StepAction::Down),
            (0, -1) => Some(StepAction::Left),
            (0, 1) => Some(StepAction::Right),
            _ => None,
        }
    }
}

impl FromStr for StepAction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "up" => Ok(StepAction::Up),
            "down" => Ok(StepAction::Down),
            "left" => Ok(StepAction::Left),
            "right" => Ok(StepAction::Right),
            other => Err(format!("unknown action {other:?}")),
        }
    }
}

/// Per-episode configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    /// Field-of-view window side length; odd.
    pub k: usize,
    /// Confidence decay factor in (0, 1).
    pub alpha: f64,
    /// Maximum step budget T.
    pub horizon: usize,
    /// Threshold for treating the confidence grid as uniform.
    pub uniformity_epsilon: f64,
    pub policy: Policy,
}

impl AgentConfig {
    /// Defaults for an environment of the given size: k = 5, alpha = 0.9,
    /// epsilon = 1e-9, and the per-policy horizon.
    pub fn new(policy: Policy, rows: usize, cols: usize) -> Self {
        Self {
            k: 5,
            alpha: 0.9,
            horizon: Self::default_horizon(policy, rows, cols),
            uniformity_epsilon: 1e-9,
            policy,
        }
    }

    /// 10·(rows+cols) for the planning policies, 4·rows·cols for the
    /// step-choosing policies.
    pub fn default_horizon(policy: Policy, rows: usize, cols: usize) -> usize {
        match policy {
            Policy::Ours | Policy::FrontierOnly => 10 * (rows + cols),
            Policy::StepLlm | Policy::HistoryLlm => 4 * rows * cols,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k.is_multiple_of(2) || self.k == 0 {
            return Err(ConfigError::EvenWindow(self.k));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::BadAlpha(self.alpha));
        }
        if self.horizon == 0 {
            return Err(ConfigError::ZeroHorizon);
        }
        if self.uniformity_epsilon < 0.0 {
            return Err(ConfigError::NegativeEpsilon(self.uniformity_epsilon));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("window side length k must be odd and positive, got {0}")]
    EvenWindow(usize),
    #[error("decay factor must lie in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("horizon must be positive")]
    ZeroHorizon,
    #[error("uniformity epsilon must be non-negative, got {0}")]
    NegativeEpsilon(f64),
}

/// Terminal episode status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EpisodeStatus {
    /// Reached the goal within the horizon.
    Success,
    /// Step budget exhausted.
    Timeout,
    /// Known space fully explored without ever seeing the goal.
    Exhausted,
}

/// One trace entry per executed step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub t: usize,
    pub pos: [usize; 2],
    pub action: Option<StepAction>,
    pub goal_visible: bool,
    /// `None` when no predictor query happened this step; otherwise the
    /// (possibly abstaining) answer.
    pub prediction: Option<PredictionTrace>,
    pub subgoal: Option<[usize; 2]>,
    pub frontier_used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionTrace {
    pub region: Option<Region>,
}

/// A finished episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub status: EpisodeStatus,
    pub steps: usize,
    pub trajectory: Vec<Cell>,
    pub records: Vec<StepRecord>,
    pub goal: String,
    pub horizon: usize,
    pub pattern_notes: Vec<String>,
}

impl Episode {
    pub fn success(&self) -> bool {
        self.status == EpisodeStatus::Success
    }

    /// Episode trace export: one JSON object per step, then a final summary
    /// record.
    pub fn write_trace<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut w, record)?;
            w.write_all(b"\n")?;
        }
        #[derive(Serialize)]
        struct Summary<'a> {
            status: &'a EpisodeStatus,
            steps: usize,
            r#return: i64,
        }
        serde_json::to_writer(
            &mut w,
            &Summary { status: &self.status, steps: self.steps, r#return: episode_return(self) },
        )?;
        w.write_all(b"\n")
    }
}

/// Reward accumulated under the −1-per-non-goal-cell model: −steps on
/// success, −T on failure.
pub fn episode_return(episode: &Episode) -> i64 {
    if episode.success() {
        -(episode.steps as i64)
    } else {
        -(episode.horizon as i64)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("no goal identifier found in command {0:?}")]
pub struct NoGoalFound(pub String);

/// Extract the goal identifier from a natural-language command: the last
/// token shaped like a room number ("621", "641L").
pub fn extract_goal(command: &str) -> Result<String, NoGoalFound> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| Regex::new(r"[0-9]+[A-Za-z]?").expect("goal regex compiles"));
    re.find_iter(command)
        .last()
        .map(|m| m.as_str().to_string())
        .ok_or_else(|| NoGoalFound(command.to_string()))
}

/// Deterministic single-cell transition: move one cell in direction `a`
/// unless blocked by the map edge or an occupied cell.
pub fn step_transition(env: &Environment, pos: Cell, action: StepAction) -> Cell {
    let (rows, cols) = (env.rows(), env.cols());
    let next = match action {
        StepAction::Up if pos.row > 0 => Cell::new(pos.row - 1, pos.col),
        StepAction::Down if pos.row + 1 < rows => Cell::new(pos.row + 1, pos.col),
        StepAction::Left if pos.col > 0 => Cell::new(pos.row, pos.col - 1),
        StepAction::Right if pos.col + 1 < cols => Cell::new(pos.row, pos.col + 1),
        _ => return pos,
    };
    if env.occupancy.is_free(next) {
        next
    } else {
        pos
    }
}

/// Success condition: standing on a free goal cell, or 4-adjacent to an
/// occupied (door) goal cell, which the agent cannot enter.
pub fn is_success(env: &Environment, goal: &GoalSpec, pos: Cell) -> bool {
    if env.occupancy.is_free(goal.target_cell) {
        pos == goal.target_cell
    } else {
        pos.manhattan(goal.target_cell) == 1
    }
}

/// Number of trajectory cells violating ground-truth occupancy; must be zero
/// for every policy.
pub fn occupancy_violations(env: &Environment, trajectory: &[Cell]) -> usize {
    trajectory.iter().filter(|&&c| !env.occupancy.is_free(c)).count()
}

/// Streaming observer for per-step rendering/snapshotting.
pub trait StepSink {
    fn on_state(&mut self, ctx: &StepContext<'_>);
}

/// Snapshot of the episode state after the fuse at time `t`.
pub struct StepContext<'a> {
    pub t: usize,
    pub pos: Cell,
    pub belief: &'a AgentBelief,
    pub confidence: Option<&'a ConfidenceGrid>,
    pub trajectory: &'a [Cell],
}

/// Sink that ignores everything.
pub struct NoopSink;

impl StepSink for NoopSink {
    fn on_state(&mut self, _ctx: &StepContext<'_>) {}
}

pub fn run_ours(
    env: &Environment,
    goal: &GoalSpec,
    cfg: &AgentConfig,
    predictor: &mut dyn GoalRegionPredictor,
) -> Episode {
    run_ours_with(env, goal, cfg, predictor, &mut NoopSink)
}

/// The confidence-grid control loop.
pub fn run_ours_with(
    env: &Environment,
    goal: &GoalSpec,
    cfg: &AgentConfig,
    predictor: &mut dyn GoalRegionPredictor,
    sink: &mut dyn StepSink,
) -> Episode {
    debug_assert_eq!(cfg.policy, Policy::Ours);
    cfg.validate().expect("invalid agent config");
    let mut state = EpisodeInProgress::new(env, goal, cfg);
    let mut confidence = ConfidenceGrid::new(env.rows(), env.cols(), cfg.alpha);

    let status = 'episode: loop {
        state.observe_and_fuse(env);
        state.emit(sink, Some(&confidence));
        if is_success(env, goal, state.pos) {
            break EpisodeStatus::Success;
        }
        if state.steps >= cfg.horizon {
            break EpisodeStatus::Timeout;
        }

        // Goal already seen: follow a shortest path, fusing along the way.
        if let Some(goal_cell) = state.belief.goal_visible(&goal.identifier) {
            let allow_occupied = state.belief.seen_occ.get(goal_cell) == 1;
            if let Ok(path) = astar(&state.belief.seen_occ, state.pos, goal_cell, allow_occupied) {
                for &next in &path.cells[1..] {
                    if state.belief.seen_occ.get(next) == 1 {
                        break; // door terminal; success fires from its neighbor
                    }
                    state.execute(env, next, true, None, None, false);
                    state.observe_and_fuse(env);
                    state.emit(sink, Some(&confidence));
                    if is_success(env, goal, state.pos) {
                        break 'episode EpisodeStatus::Success;
                    }
                    if state.steps >= cfg.horizon {
                        break 'episode EpisodeStatus::Timeout;
                    }
                }
                continue;
            }
            // No known-free path to the seen goal yet: fall through and keep
            // exploring via the prediction machinery.
        }

        let result = state.query_predictor(predictor);
        confidence.decay();
        if let Some(region) = result.region {
            confidence.apply_prediction(state.pos, region);
        }
        confidence.reset_explored(&state.belief, &goal.identifier);

        let centroid = confidence.argmax_centroid();
        let snapped = snap_to_reachable(&state.belief.seen_occ, state.pos, centroid)
            .expect("agent position is known-free");
        let (subgoal, frontier_used) =
            if confidence.is_uniform(cfg.uniformity_epsilon) || snapped == state.pos {
                match nearest_frontier(&state.belief.seen_occ, state.pos) {
                    Ok(frontier) => (frontier, true),
                    Err(PlanError::NoFrontier) => break EpisodeStatus::Exhausted,
                    Err(e) => unreachable!("agent position is known-free: {e}"),
                }
            } else {
                (snapped, false)
            };
        let path = astar(&state.belief.seen_occ, state.pos, subgoal, false)
            .expect("subgoals are reachable known-free cells");
        let next = path.cells.get(1).copied().unwrap_or(state.pos);
        state.execute(env, next, false, Some(result.region), Some(subgoal), frontier_used);
    };
    state.finish(status)
}

/// Shared bookkeeping for every run_* loop.
pub(crate) struct EpisodeInProgress {
    pub pos: Cell,
    pub steps: usize,
    pub trajectory: Vec<Cell>,
    pub records: Vec<StepRecord>,
    pub belief: AgentBelief,
    pub goal: String,
    pub horizon: usize,
    pub k: usize,
}

impl EpisodeInProgress {
    pub fn new(env: &Environment, goal: &GoalSpec, cfg: &AgentConfig) -> Self {
        Self {
            pos: env.start,
            steps: 0,
            trajectory: vec![env.start],
            records: Vec::new(),
            belief: AgentBelief::new(env.rows(), env.cols()),
            goal: goal.identifier.clone(),
            horizon: cfg.horizon,
            k: cfg.k,
        }
    }

    pub fn observe_and_fuse(&mut self, env: &Environment) {
        let obs = observe(env, self.pos, self.k);
        self.belief.fuse(&obs).expect("static ground truth never conflicts");
    }

    pub fn emit(&self, sink: &mut dyn StepSink, confidence: Option<&ConfidenceGrid>) {
        sink.on_state(&StepContext {
            t: self.steps,
            pos: self.pos,
            belief: &self.belief,
            confidence,
            trajectory: &self.trajectory,
        });
    }

    pub fn query_predictor(&mut self, predictor: &mut dyn GoalRegionPredictor) -> PredictionResult {
        let query = PredictionQuery {
            goal: &self.goal,
            agent_pos: self.pos,
            seen_occ: &self.belief.seen_occ,
            seen_sem: &self.belief.seen_sem,
            pattern_notes: &self.belief.pattern_notes,
        };
        // Transport failures and timeouts degrade to abstention; the episode
        // keeps running on frontier fallback.
        let result = predictor.predict(&query).unwrap_or_else(|_| PredictionResult::abstain());
        self.belief.add_pattern_notes(result.patterns.iter().map(String::as_str));
        result
    }

    /// Move to `next` (must equal pos, or be 4-adjacent and free) and record
    /// the step.
    pub fn execute(
        &mut self,
        env: &Environment,
        next: Cell,
        goal_visible: bool,
        prediction: Option<Option<Region>>,
        subgoal: Option<Cell>,
        frontier_used: bool,
    ) {
        let action = StepAction::between(self.pos, next);
        let landed = match action {
            Some(a) => step_transition(env, self.pos, a),
            None => self.pos,
        };
        debug_assert_eq!(landed, next, "planned steps follow known-free cells");
        self.record_step(action, landed, goal_visible, prediction, subgoal, frontier_used);
    }

    /// Record an attempted action and the resulting position (which may be
    /// unchanged for blocked or absent actions).
    pub fn record_step(
        &mut self,
        action: Option<StepAction>,
        landed: Cell,
        goal_visible: bool,
        prediction: Option<Option<Region>>,
        subgoal: Option<Cell>,
        frontier_used: bool,
    ) {
        self.records.push(StepRecord {
            t: self.steps,
            pos: [landed.row, landed.col],
            action,
            goal_visible,
            prediction: prediction.map(|region| PredictionTrace { region }),
            subgoal: subgoal.map(|c| [c.row, c.col]),
            frontier_used,
        });
        self.pos = landed;
        self.steps += 1;
        self.trajectory.push(landed);
    }

    pub fn finish(self, status: EpisodeStatus) -> Episode {
        debug_assert_eq!(self.steps, self.trajectory.len() - 1);
        Episode {
            status,
            steps: self.steps,
            trajectory: self.trajectory,
            records: self.records,
            goal: self.goal,
            horizon: self.horizon,
            pattern_notes: self.belief.pattern_notes,
        }
    }
}
