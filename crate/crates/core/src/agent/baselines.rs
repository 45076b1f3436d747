//! Baseline policies: random-frontier exploration, step-by-step action
//! selection, and the history-summarizing NavGPT-style loop.

use std::collections::BTreeMap;
use std::time::Duration;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::grid::{Cell, Environment, GoalSpec, ATTR_ROOM_NUMBER, ATTR_SIGN_TEXT};
use crate::perception::{observe, Observation, SeenOccupancyGrid, SeenSemanticGrid};
use crate::planning::{astar, find_frontiers};
use crate::predictor::{post_json, Transcript, TranscriptRecord, TranscriptWriter};

use super::{
    is_success, step_transition, AgentConfig, Episode, EpisodeInProgress, EpisodeStatus,
    NoopSink, Policy, StepAction, StepSink,
};

pub fn run_frontier(env: &Environment, goal: &GoalSpec, cfg: &AgentConfig, rng_seed: u64) -> Episode {
    run_frontier_with(env, goal, cfg, rng_seed, &mut NoopSink)
}

/// Frontier-exploration baseline: if the goal is visible, walk a final A*
/// path to it; otherwise sample one frontier uniformly at random and advance
/// one step along an A* path through known free space. Frontiers that turn
/// out unreachable are dropped and the draw repeats.
pub fn run_frontier_with(
    env: &Environment,
    goal: &GoalSpec,
    cfg: &AgentConfig,
    rng_seed: u64,
    sink: &mut dyn StepSink,
) -> Episode {
    debug_assert_eq!(cfg.policy, Policy::FrontierOnly);
    cfg.validate().expect("invalid agent config");
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut state = EpisodeInProgress::new(env, goal, cfg);

    let status = 'episode: loop {
        state.observe_and_fuse(env);
        state.emit(sink, None);
        if is_success(env, goal, state.pos) {
            break EpisodeStatus::Success;
        }
        if state.steps >= cfg.horizon {
            break EpisodeStatus::Timeout;
        }

        if let Some(goal_cell) = state.belief.goal_visible(&goal.identifier) {
            let allow_occupied = state.belief.seen_occ.get(goal_cell) == 1;
            if let Ok(path) = astar(&state.belief.seen_occ, state.pos, goal_cell, allow_occupied) {
                for &next in &path.cells[1..] {
                    if state.belief.seen_occ.get(next) == 1 {
                        break;
                    }
                    state.execute(env, next, true, None, None, false);
                    state.observe_and_fuse(env);
                    state.emit(sink, None);
                    if is_success(env, goal, state.pos) {
                        break 'episode EpisodeStatus::Success;
                    }
                    if state.steps >= cfg.horizon {
                        break 'episode EpisodeStatus::Timeout;
                    }
                }
                continue;
            }
        }

        let mut candidates: Vec<Cell> =
            find_frontiers(&state.belief.seen_occ).iter().collect();
        let step = loop {
            if candidates.is_empty() {
                break None;
            }
            let pick = rng.gen_range(0..candidates.len());
            let target = candidates[pick];
            match astar(&state.belief.seen_occ, state.pos, target, false) {
                Ok(path) => break Some((target, path.cells.get(1).copied().unwrap_or(state.pos))),
                Err(_) => {
                    candidates.remove(pick);
                }
            }
        };
        match step {
            Some((target, next)) => {
                state.execute(env, next, false, None, Some(target), true);
            }
            None => break EpisodeStatus::Exhausted,
        }
    };
    state.finish(status)
}

/// Chooses the next primitive action from (goal, position, seen grids).
/// `None` models a malformed/invalid answer and consumes the step as a no-op.
pub trait ActionChooser {
    fn choose(
        &mut self,
        goal: &str,
        pos: Cell,
        seen_occ: &SeenOccupancyGrid,
        seen_sem: &SeenSemanticGrid,
    ) -> Option<StepAction>;
}

impl<F> ActionChooser for F
where
    F: FnMut(&str, Cell, &SeenOccupancyGrid, &SeenSemanticGrid) -> Option<StepAction>,
{
    fn choose(
        &mut self,
        goal: &str,
        pos: Cell,
        seen_occ: &SeenOccupancyGrid,
        seen_sem: &SeenSemanticGrid,
    ) -> Option<StepAction> {
        self(goal, pos, seen_occ, seen_sem)
    }
}

/// Replays a fixed action sequence, then abstains.
#[derive(Debug, Clone)]
pub struct ScriptedActions {
    script: Vec<StepAction>,
    next: usize,
}

impl ScriptedActions {
    pub fn new(script: Vec<StepAction>) -> Self {
        Self { script, next: 0 }
    }
}

impl ActionChooser for ScriptedActions {
    fn choose(
        &mut self,
        _goal: &str,
        _pos: Cell,
        _seen_occ: &SeenOccupancyGrid,
        _seen_sem: &SeenSemanticGrid,
    ) -> Option<StepAction> {
        let action = self.script.get(self.next).copied();
        self.next += 1;
        action
    }
}

/// Seeded uniformly random actions.
#[derive(Debug, Clone)]
pub struct RandomActions {
    rng: ChaCha8Rng,
}

impl RandomActions {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl ActionChooser for RandomActions {
    fn choose(
        &mut self,
        _goal: &str,
        _pos: Cell,
        _seen_occ: &SeenOccupancyGrid,
        _seen_sem: &SeenSemanticGrid,
    ) -> Option<StepAction> {
        Some(StepAction::all()[self.rng.gen_range(0..4)])
    }
}

/// External step chooser over the wire protocol; the response body is
/// `{"action": "up"|"down"|"left"|"right"}`. Malformed answers become
/// `None` (a consumed no-op step). Requests reuse the predictor request
/// schema; request/response pairs go to the transcript when configured.
pub struct ExternalActionChooser {
    endpoint: String,
    timeout: Duration,
    k: usize,
    agent: ureq::Agent,
    transcript: Option<TranscriptWriter>,
    queries: usize,
}

impl ExternalActionChooser {
    pub fn new(endpoint: impl Into<String>, timeout: Duration, k: usize) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        Self { endpoint: endpoint.into(), timeout, k, agent, transcript: None, queries: 0 }
    }

    pub fn with_transcript(mut self, writer: TranscriptWriter) -> Self {
        self.transcript = Some(writer);
        self
    }
}

impl ActionChooser for ExternalActionChooser {
    fn choose(
        &mut self,
        goal: &str,
        pos: Cell,
        seen_occ: &SeenOccupancyGrid,
        seen_sem: &SeenSemanticGrid,
    ) -> Option<StepAction> {
        let t = self.queries;
        self.queries += 1;
        let request = serde_json::json!({
            "goal": goal,
            "agent": [pos.row, pos.col],
            "k": self.k,
            "seen_occupancy": seen_occ.to_row_strings(),
            "semantics": wire_semantics(seen_sem),
            "pattern_notes": [],
        });
        let outcome = post_json(&self.agent, &self.endpoint, &request, self.timeout);
        if let Some(writer) = &self.transcript {
            let response = outcome.as_ref().cloned().unwrap_or(serde_json::Value::Null);
            writer.append(&TranscriptRecord { t, request, response });
        }
        outcome.ok().and_then(|v| parse_action(&v))
    }
}

fn wire_semantics(seen_sem: &SeenSemanticGrid) -> Vec<serde_json::Value> {
    seen_sem
        .iter_non_empty()
        .map(|(cell, attrs)| {
            let mut entry = serde_json::json!({"cell": [cell.row, cell.col]});
            if let Some(room) = attrs.get(ATTR_ROOM_NUMBER) {
                entry["room_number"] = serde_json::Value::String(room.clone());
            }
            if let Some(sign) = attrs.get(ATTR_SIGN_TEXT) {
                entry["sign_text"] = serde_json::Value::String(sign.clone());
            }
            entry
        })
        .collect()
}

fn parse_action(value: &serde_json::Value) -> Option<StepAction> {
    value.get("action")?.as_str()?.parse().ok()
}

/// Replays recorded `{"action": ...}` responses by ordinal.
pub struct ReplayActionChooser {
    responses: Vec<serde_json::Value>,
    next: usize,
}

impl ReplayActionChooser {
    pub fn new(transcript: &Transcript) -> Self {
        Self { responses: transcript.records.iter().map(|r| r.response.clone()).collect(), next: 0 }
    }
}

impl ActionChooser for ReplayActionChooser {
    fn choose(
        &mut self,
        _goal: &str,
        _pos: Cell,
        _seen_occ: &SeenOccupancyGrid,
        _seen_sem: &SeenSemanticGrid,
    ) -> Option<StepAction> {
        let t = self.next;
        self.next += 1;
        self.responses.get(t).and_then(parse_action)
    }
}

pub fn run_step_llm(
    env: &Environment,
    goal: &GoalSpec,
    cfg: &AgentConfig,
    chooser: &mut dyn ActionChooser,
) -> Episode {
    run_step_llm_with(env, goal, cfg, chooser, &mut NoopSink)
}

/// Step-by-step action selection without global planning: observe, fuse, ask
/// the chooser for one action, apply the blocked-move transition, repeat.
pub fn run_step_llm_with(
    env: &Environment,
    goal: &GoalSpec,
    cfg: &AgentConfig,
    chooser: &mut dyn ActionChooser,
    sink: &mut dyn StepSink,
) -> Episode {
    debug_assert!(matches!(cfg.policy, Policy::StepLlm | Policy::HistoryLlm));
    cfg.validate().expect("invalid agent config");
    let mut state = EpisodeInProgress::new(env, goal, cfg);
    let status = loop {
        state.observe_and_fuse(env);
        state.emit(sink, None);
        if is_success(env, goal, state.pos) {
            break EpisodeStatus::Success;
        }
        if state.steps >= cfg.horizon {
            break EpisodeStatus::Timeout;
        }
        let action = chooser.choose(
            &state.goal,
            state.pos,
            &state.belief.seen_occ,
            &state.belief.seen_sem,
        );
        let landed = match action {
            Some(a) => step_transition(env, state.pos, a),
            None => state.pos, // malformed answer: no-op, step consumed
        };
        state.record_step(action, landed, false, None, None, false);
    };
    state.finish(status)
}

/// One remembered step of the NavGPT-style loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryEntry {
    pub observation: String,
    pub reasoning: String,
    pub action: String,
}

/// What the chooser gets to see: the most recent entries within the budget
/// plus visit counts over all cells touched so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistorySummary {
    pub recent: Vec<HistoryEntry>,
    pub visit_counts: BTreeMap<Cell, usize>,
}

/// Compress the append-only history to its most recent `budget` entries.
pub fn summarize_history(
    entries: &[HistoryEntry],
    visits: &BTreeMap<Cell, usize>,
    budget: usize,
) -> HistorySummary {
    let start = entries.len().saturating_sub(budget);
    HistorySummary { recent: entries[start..].to_vec(), visit_counts: visits.clone() }
}

/// Deterministic one-line rendering of an observation for history entries.
pub fn describe_observation(obs: &Observation) -> String {
    let mut free = 0usize;
    let mut occupied = 0usize;
    let mut labels: Vec<String> = Vec::new();
    for cell in &obs.patch {
        if cell.occupied {
            occupied += 1;
        } else {
            free += 1;
        }
        if let Some(room) = cell.semantics.room_number() {
            labels.push(format!("room {room}@{}", cell.cell));
        }
        if cell.semantics.sign_text().is_some() {
            labels.push(format!("sign@{}", cell.cell));
        }
    }
    let labels = if labels.is_empty() { String::new() } else { format!("; {}", labels.join(", ")) };
    format!("at {}: {free} free, {occupied} occupied{labels}", obs.center)
}

/// Chooses the next action from the goal, position, and summarized history.
pub trait HistoryChooser {
    /// Returns (reasoning, action); `None` consumes the step as a no-op.
    fn choose(
        &mut self,
        goal: &str,
        pos: Cell,
        summary: &HistorySummary,
    ) -> (String, Option<StepAction>);
}

/// Seeded random history chooser (offline default; ignores the summary).
#[derive(Debug, Clone)]
pub struct RandomHistoryChooser {
    rng: ChaCha8Rng,
}

impl RandomHistoryChooser {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl HistoryChooser for RandomHistoryChooser {
    fn choose(
        &mut self,
        _goal: &str,
        _pos: Cell,
        _summary: &HistorySummary,
    ) -> (String, Option<StepAction>) {
        (String::new(), Some(StepAction::all()[self.rng.gen_range(0..4)]))
    }
}

pub fn run_history_llm(
    env: &Environment,
    goal: &GoalSpec,
    cfg: &AgentConfig,
    chooser: &mut dyn HistoryChooser,
    summary_budget: usize,
) -> Episode {
    run_history_llm_with(env, goal, cfg, chooser, summary_budget, &mut NoopSink)
}

/// NavGPT-style loop: step-by-step action selection fed by an append-only
/// textual history of (observation, reasoning, action) that is compressed to
/// the `summary_budget` most recent entries plus visit counts before each
/// query.
pub fn run_history_llm_with(
    env: &Environment,
    goal: &GoalSpec,
    cfg: &AgentConfig,
    chooser: &mut dyn HistoryChooser,
    summary_budget: usize,
    sink: &mut dyn StepSink,
) -> Episode {
    debug_assert_eq!(cfg.policy, Policy::HistoryLlm);
    cfg.validate().expect("invalid agent config");
    let mut state = EpisodeInProgress::new(env, goal, cfg);
    let mut history: Vec<HistoryEntry> = Vec::new();
    let mut visits: BTreeMap<Cell, usize> = BTreeMap::new();
    *visits.entry(state.pos).or_default() += 1;

    let status = loop {
        let obs = observe(env, state.pos, cfg.k);
        state.belief.fuse(&obs).expect("static ground truth never conflicts");
        state.emit(sink, None);
        if is_success(env, goal, state.pos) {
            break EpisodeStatus::Success;
        }
        if state.steps >= cfg.horizon {
            break EpisodeStatus::Timeout;
        }
        let summary = summarize_history(&history, &visits, summary_budget);
        let (reasoning, action) = chooser.choose(&state.goal, state.pos, &summary);
        let landed = match action {
            Some(a) => step_transition(env, state.pos, a),
            None => state.pos,
        };
        history.push(HistoryEntry {
            observation: describe_observation(&obs),
            reasoning,
            action: action.map(StepAction::as_str).unwrap_or("none").to_string(),
        });
        state.record_step(action, landed, false, None, None, false);
        *visits.entry(state.pos).or_default() += 1;
    };
    state.finish(status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellSemantics, OccupancyGrid, SemanticGrid};

    fn corridor_env() -> Environment {
        let mut occupancy = OccupancyGrid::filled(1, 5, 0);
        occupancy.set(Cell::new(0, 4), 1);
        let mut semantics = SemanticGrid::implied_by(&occupancy);
        *semantics.get_mut(Cell::new(0, 4)) = CellSemantics::door("9");
        Environment { name: "c".into(), occupancy, semantics, start: Cell::new(0, 0) }
    }

    #[test]
    fn scripted_optimal_actions_match_shortest_path() {
        let env = corridor_env();
        let goal = env.goal_spec("9").unwrap();
        let cfg = AgentConfig { k: 3, ..AgentConfig::new(Policy::StepLlm, 1, 5) };
        let mut chooser =
            ScriptedActions::new(vec![StepAction::Right, StepAction::Right, StepAction::Right]);
        let episode = run_step_llm(&env, &goal, &cfg, &mut chooser);
        assert_eq!(episode.status, EpisodeStatus::Success);
        assert_eq!(episode.steps, 3); // oracle shortest: start (0,0) -> (0,3)
    }

    #[test]
    fn oscillating_chooser_times_out() {
        let env = corridor_env();
        let goal = env.goal_spec("9").unwrap();
        let cfg = AgentConfig { k: 3, horizon: 40, ..AgentConfig::new(Policy::StepLlm, 1, 5) };
        let mut flip = false;
        let mut chooser = |_: &str, _: Cell, _: &SeenOccupancyGrid, _: &SeenSemanticGrid| {
            flip = !flip;
            Some(if flip { StepAction::Right } else { StepAction::Left })
        };
        let episode = run_step_llm(&env, &goal, &cfg, &mut chooser);
        assert_eq!(episode.status, EpisodeStatus::Timeout);
        assert_eq!(episode.steps, 40);
    }

    #[test]
    fn malformed_actions_consume_steps_in_place() {
        let env = corridor_env();
        let goal = env.goal_spec("9").unwrap();
        let cfg = AgentConfig { k: 3, horizon: 2, ..AgentConfig::new(Policy::StepLlm, 1, 5) };
        let mut chooser = ScriptedActions::new(vec![]);
        let episode = run_step_llm(&env, &goal, &cfg, &mut chooser);
        assert_eq!(episode.status, EpisodeStatus::Timeout);
        assert_eq!(episode.trajectory, vec![Cell::new(0, 0); 3]);
    }

    #[test]
    fn frontier_with_fixed_seed_is_reproducible() {
        let env = corridor_env();
        let goal = env.goal_spec("9").unwrap();
        let cfg = AgentConfig { k: 3, ..AgentConfig::new(Policy::FrontierOnly, 1, 5) };
        let a = run_frontier(&env, &goal, &cfg, 11);
        let b = run_frontier(&env, &goal, &cfg, 11);
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.status, EpisodeStatus::Success);
    }

    #[test]
    fn frontier_goal_visible_at_start_is_pure_astar() {
        let env = corridor_env();
        let goal = env.goal_spec("9").unwrap();
        // k = 11 sees the whole corridor from the start.
        let cfg = AgentConfig { k: 11, ..AgentConfig::new(Policy::FrontierOnly, 1, 5) };
        let episode = run_frontier(&env, &goal, &cfg, 0);
        assert_eq!(episode.status, EpisodeStatus::Success);
        assert_eq!(episode.steps, 3);
        assert_eq!(
            episode.trajectory,
            vec![Cell::new(0, 0), Cell::new(0, 1), Cell::new(0, 2), Cell::new(0, 3)]
        );
    }

    #[test]
    fn zero_budget_history_matches_step_policy_with_same_seed() {
        let env = corridor_env();
        let goal = env.goal_spec("9").unwrap();
        let cfg = AgentConfig { k: 3, horizon: 60, ..AgentConfig::new(Policy::HistoryLlm, 1, 5) };
        let mut history_chooser = RandomHistoryChooser::new(3);
        let history_episode = run_history_llm(&env, &goal, &cfg, &mut history_chooser, 0);
        let step_cfg = AgentConfig { policy: Policy::StepLlm, ..cfg };
        let mut step_chooser = RandomActions::new(3);
        let step_episode = run_step_llm(&env, &goal, &step_cfg, &mut step_chooser);
        assert_eq!(history_episode.trajectory, step_episode.trajectory);
        assert_eq!(history_episode.status, step_episode.status);
    }

    #[test]
    fn summary_respects_budget() {
        let entries: Vec<HistoryEntry> = (0..10)
            .map(|i| HistoryEntry {
                observation: format!("obs {i}"),
                reasoning: String::new(),
                action: "up".into(),
            })
            .collect();
        let visits = BTreeMap::new();
        for budget in [0, 1, 3, 10, 99] {
            let summary = summarize_history(&entries, &visits, budget);
            assert!(summary.recent.len() <= budget);
            if budget <= 10 && budget > 0 {
                assert_eq!(summary.recent.len(), budget);
                assert_eq!(summary.recent.last().unwrap().observation, "obs 9");
            }
        }
    }
}
