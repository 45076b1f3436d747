//! SPL/SR metrics, the shortest-path oracle, the benchmark suite runner, and
//! report rendering.
//!
//! SPL per episode is `S · L / max(P, L)` with the 0/0 case (goal at start,
//! reached immediately) counting as 1. Aggregates are mean ± population
//! standard deviation over episodes, reported per environment, per group
//! (Small/Large/Noisy), and overall, mirroring the benchmark table layout.

use std::collections::VecDeque;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{
    episode_return, occupancy_violations, run_frontier, run_history_llm, run_ours, run_step_llm,
    AgentConfig, Episode, EpisodeStatus, Policy, RandomActions, RandomHistoryChooser,
};
use crate::grid::gen::{generate_with_layout, Family, GeneratorParams};
use crate::grid::{load_environment, Cell, Environment, GoalSpec};
use crate::predictor::{OraclePredictor, RulePredictor, UniformPredictor};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("metric over an empty record set")]
    EmptyInput,
    #[error("goal {0:?} is unreachable from the start")]
    Unreachable(String),
    #[error("suite error: {0}")]
    Suite(String),
    #[error(transparent)]
    Generation(#[from] crate::grid::gen::GenerationError),
    #[error(transparent)]
    EnvFile(#[from] crate::grid::EnvFileError),
    #[error(transparent)]
    Goal(#[from] crate::grid::GoalError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// One finished benchmark episode.
#[derive(Debug, Clone, Serialize)]
pub struct EpisodeRecord {
    pub env: String,
    pub group: String,
    pub policy: String,
    pub seed: u64,
    pub goal: String,
    pub success: bool,
    /// Oracle shortest-path steps L.
    pub oracle_len: usize,
    /// Actual steps taken P.
    pub steps: usize,
    pub status: EpisodeStatus,
    pub spl: f64,
    pub r#return: i64,
    /// Relative trace filename, when traces are written.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(skip)]
    pub trajectory: Vec<Cell>,
}

/// Ground-truth shortest path length from the start to the success set: the
/// goal cell itself when free, otherwise its free 4-neighbors.
pub fn oracle_shortest(env: &Environment, goal: &GoalSpec) -> Result<usize, EvalError> {
    let (rows, cols) = (env.rows(), env.cols());
    let idx = |c: Cell| c.row * cols + c.col;
    let target_free = env.occupancy.is_free(goal.target_cell);
    let is_target = |c: Cell| {
        if target_free {
            c == goal.target_cell
        } else {
            c.manhattan(goal.target_cell) == 1
        }
    };
    if is_target(env.start) {
        return Ok(0);
    }
    let mut dist = vec![usize::MAX; rows * cols];
    let mut queue = VecDeque::new();
    dist[idx(env.start)] = 0;
    queue.push_back(env.start);
    while let Some(cur) = queue.pop_front() {
        for next in cur.neighbors4(rows, cols) {
            if !env.occupancy.is_free(next) || dist[idx(next)] != usize::MAX {
                continue;
            }
            dist[idx(next)] = dist[idx(cur)] + 1;
            if is_target(next) {
                return Ok(dist[idx(next)]);
            }
            queue.push_back(next);
        }
    }
    Err(EvalError::Unreachable(goal.identifier.clone()))
}

/// One episode's SPL contribution.
pub fn episode_spl(success: bool, oracle_len: usize, steps: usize) -> f64 {
    if !success {
        0.0
    } else if oracle_len == 0 {
        1.0 // goal at the start; 0/0 counts as a perfect episode
    } else {
        oracle_len as f64 / oracle_len.max(steps) as f64
    }
}

/// Success weighted by Path Length over a record set.
pub fn spl(records: &[EpisodeRecord]) -> Result<f64, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let total: f64 = records.iter().map(|r| episode_spl(r.success, r.oracle_len, r.steps)).sum();
    Ok(total / records.len() as f64)
}

/// Fraction of successful episodes.
pub fn success_rate(records: &[EpisodeRecord]) -> Result<f64, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    Ok(records.iter().filter(|r| r.success).count() as f64 / records.len() as f64)
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

// ---------------------------------------------------------------------------
// Benchmark suite
// ---------------------------------------------------------------------------

/// Suite file: the list of environments to benchmark. Family entries are
/// regenerated per episode seed (varying the start cell); path entries load a
/// fixed environment and use the seed only for policy randomness.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default)]
    pub name: String,
    pub environments: Vec<SuiteEnv>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteEnv {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Group label for path entries; families carry their own.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rooms: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    /// Explicit goal identifiers; mutually exclusive with `goal_count`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goals: Option<Vec<String>>,
    /// First N rooms in corridor order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub goal_count: Option<usize>,
    /// Per-environment horizon; the global override wins when both are set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
}

impl Suite {
    pub fn from_json(bytes: &[u8]) -> Result<Self, EvalError> {
        let suite: Suite =
            serde_json::from_slice(bytes).map_err(|e| EvalError::Suite(e.to_string()))?;
        if suite.environments.is_empty() {
            return Err(EvalError::Suite("suite lists no environments".into()));
        }
        for entry in &suite.environments {
            match (&entry.family, &entry.path) {
                (Some(_), Some(_)) => {
                    return Err(EvalError::Suite(
                        "suite entry has both family and path".into(),
                    ))
                }
                (None, None) => {
                    return Err(EvalError::Suite(
                        "suite entry needs either family or path".into(),
                    ))
                }
                _ => {}
            }
        }
        Ok(suite)
    }
}

/// A benchmarkable policy, with its predictor/chooser baked in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchPolicy {
    OursRule,
    OursOracle,
    OursUniform,
    Frontier,
    StepRandom,
    HistoryRandom,
}

impl BenchPolicy {
    pub fn all() -> [BenchPolicy; 6] {
        [
            BenchPolicy::OursRule,
            BenchPolicy::OursOracle,
            BenchPolicy::OursUniform,
            BenchPolicy::Frontier,
            BenchPolicy::StepRandom,
            BenchPolicy::HistoryRandom,
        ]
    }

    pub fn slug(self) -> &'static str {
        match self {
            BenchPolicy::OursRule => "ours-rule",
            BenchPolicy::OursOracle => "ours-oracle",
            BenchPolicy::OursUniform => "ours-uniform",
            BenchPolicy::Frontier => "frontier",
            BenchPolicy::StepRandom => "step-random",
            BenchPolicy::HistoryRandom => "history-random",
        }
    }

    fn policy(self) -> Policy {
        match self {
            BenchPolicy::OursRule | BenchPolicy::OursOracle | BenchPolicy::OursUniform => {
                Policy::Ours
            }
            BenchPolicy::Frontier => Policy::FrontierOnly,
            BenchPolicy::StepRandom => Policy::StepLlm,
            BenchPolicy::HistoryRandom => Policy::HistoryLlm,
        }
    }
}

impl FromStr for BenchPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchPolicy::all()
            .into_iter()
            .find(|p| p.slug() == s)
            .ok_or_else(|| format!("unknown policy {s:?}"))
    }
}

/// Runner configuration shared by every episode.
#[derive(Debug, Clone, Serialize)]
pub struct BenchConfig {
    pub k: usize,
    pub alpha: f64,
    pub uniformity_epsilon: f64,
    /// Overrides the per-policy default horizon when set.
    pub horizon: Option<usize>,
    pub summary_budget: usize,
    pub jobs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            k: 5,
            alpha: 0.9,
            uniformity_epsilon: 1e-9,
            horizon: None,
            summary_budget: 8,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PolicyStats {
    pub policy: String,
    pub episodes: usize,
    pub spl_mean: f64,
    pub spl_std: f64,
    pub sr_mean: f64,
    pub sr_std: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub env: String,
    pub stats: Vec<PolicyStats>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupReport {
    pub name: String,
    pub rows: Vec<ReportRow>,
    pub overall: Vec<PolicyStats>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkReport {
    pub suite: String,
    pub config: BenchConfig,
    pub policies: Vec<String>,
    pub seeds: Vec<u64>,
    pub groups: Vec<GroupReport>,
    /// Safety-audit findings and per-episode failures; empty in a clean run.
    pub anomalies: Vec<String>,
    pub episodes: Vec<EpisodeRecord>,
}

/// Run every (environment, goal, policy, seed) episode and aggregate.
pub fn run_benchmark(
    suite: &Suite,
    policies: &[BenchPolicy],
    seeds: &[u64],
    cfg: &BenchConfig,
) -> Result<BenchmarkReport, EvalError> {
    if suite.environments.is_empty() || policies.is_empty() || seeds.is_empty() {
        return Err(EvalError::EmptyInput);
    }

    // Materialize one environment instance per (entry, seed).
    struct Instance {
        entry_order: usize,
        env: Environment,
        group: String,
        env_label: String,
        seed: u64,
        goals: Vec<GoalSpec>,
        horizon: Option<usize>,
    }
    let mut instances = Vec::new();
    for (entry_order, entry) in suite.environments.iter().enumerate() {
        if let Some(family_slug) = &entry.family {
            let family: Family =
                family_slug.parse().map_err(EvalError::Suite)?;
            let mut params = GeneratorParams::default();
            if let Some(rooms) = entry.rooms {
                params.rooms = rooms;
            }
            if let Some(noise) = entry.noise {
                params.noise = noise;
            }
            for &seed in seeds {
                let (env, layout) = generate_with_layout(family, seed, &params)?;
                let goals = resolve_goals(&env, entry, Some(&layout.rooms))?;
                instances.push(Instance {
                    entry_order,
                    env,
                    group: family.group().to_string(),
                    env_label: family.slug().to_string(),
                    seed,
                    goals,
                    horizon: entry.horizon,
                });
            }
        } else if let Some(path) = &entry.path {
            let env = load_environment(&std::fs::read(path)?)?;
            let goals = resolve_goals(&env, entry, None)?;
            let group = entry.group.clone().unwrap_or_else(|| "Small".to_string());
            for &seed in seeds {
                instances.push(Instance {
                    entry_order,
                    env: env.clone(),
                    group: group.clone(),
                    env_label: env.name.clone(),
                    seed,
                    goals: goals.clone(),
                    horizon: entry.horizon,
                });
            }
        }
    }

    // Expand into episode jobs and run them (optionally in parallel).
    struct Job<'a> {
        instance: &'a Instance,
        policy: BenchPolicy,
        goal: &'a GoalSpec,
    }
    let jobs: Vec<Job> = instances
        .iter()
        .flat_map(|instance| {
            policies.iter().flat_map(move |&policy| {
                instance.goals.iter().map(move |goal| Job { instance, policy, goal })
            })
        })
        .collect();

    let run_job = |job: &Job| -> (EpisodeRecord, Option<String>) {
        let instance = job.instance;
        let horizon = cfg.horizon.or(instance.horizon);
        let episode =
            run_episode_with_horizon(&instance.env, job.goal, job.policy, instance.seed, cfg, horizon);
        let oracle_len = oracle_shortest(&instance.env, job.goal).unwrap_or(usize::MAX);
        let success = episode.success();
        let violation = (occupancy_violations(&instance.env, &episode.trajectory) > 0).then(|| {
            format!(
                "occupancy violation: env {} seed {} policy {} goal {}",
                instance.env_label,
                instance.seed,
                job.policy.slug(),
                job.goal.identifier
            )
        });
        let record = EpisodeRecord {
            env: instance.env_label.clone(),
            group: instance.group.clone(),
            policy: job.policy.slug().to_string(),
            seed: instance.seed,
            goal: job.goal.identifier.clone(),
            success,
            oracle_len,
            steps: episode.steps,
            status: episode.status,
            spl: episode_spl(success, oracle_len, episode.steps),
            r#return: episode_return(&episode),
            trace: None,
            trajectory: episode.trajectory,
        };
        (record, violation)
    };

    let results: Vec<(EpisodeRecord, Option<String>)> = if cfg.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build()
            .map_err(|e| EvalError::Suite(e.to_string()))?;
        pool.install(|| jobs.par_iter().map(run_job).collect())
    } else {
        jobs.iter().map(run_job).collect()
    };

    let mut episodes: Vec<EpisodeRecord> = Vec::with_capacity(results.len());
    let mut anomalies = Vec::new();
    for (record, violation) in results {
        episodes.push(record);
        anomalies.extend(violation);
    }
    episodes.sort_by(|a, b| {
        (&a.env, &a.policy, a.seed, &a.goal).cmp(&(&b.env, &b.policy, b.seed, &b.goal))
    });

    // Aggregate per (group, env, policy), preserving suite and policy order.
    let env_order: Vec<(String, String)> = {
        let mut seen = Vec::new();
        let mut ordered: Vec<(usize, String, String)> = instances
            .iter()
            .map(|i| (i.entry_order, i.group.clone(), i.env_label.clone()))
            .collect();
        ordered.sort_by_key(|(order, _, _)| *order);
        for (_, group, label) in ordered {
            if !seen.contains(&(group.clone(), label.clone())) {
                seen.push((group, label));
            }
        }
        seen
    };
    let stats_for = |records: Vec<&EpisodeRecord>, policy: BenchPolicy| -> PolicyStats {
        let spls: Vec<f64> =
            records.iter().map(|r| r.spl).collect();
        let srs: Vec<f64> = records.iter().map(|r| f64::from(u8::from(r.success))).collect();
        let (spl_mean, spl_std) = mean_std(&spls);
        let (sr_mean, sr_std) = mean_std(&srs);
        PolicyStats {
            policy: policy.slug().to_string(),
            episodes: records.len(),
            spl_mean,
            spl_std,
            sr_mean,
            sr_std,
        }
    };
    let mut groups: Vec<GroupReport> = Vec::new();
    for group_name in ["Small", "Large", "Noisy"] {
        let group_envs: Vec<&(String, String)> =
            env_order.iter().filter(|(g, _)| g == group_name).collect();
        if group_envs.is_empty() {
            continue;
        }
        let mut rows = Vec::new();
        for (_, env_label) in &group_envs {
            let stats = policies
                .iter()
                .map(|&policy| {
                    let records: Vec<&EpisodeRecord> = episodes
                        .iter()
                        .filter(|r| &r.env == env_label && r.policy == policy.slug())
                        .collect();
                    stats_for(records, policy)
                })
                .collect();
            rows.push(ReportRow { env: env_label.clone(), stats });
        }
        let overall = policies
            .iter()
            .map(|&policy| {
                let records: Vec<&EpisodeRecord> = episodes
                    .iter()
                    .filter(|r| r.group == group_name && r.policy == policy.slug())
                    .collect();
                stats_for(records, policy)
            })
            .collect();
        groups.push(GroupReport { name: group_name.to_string(), rows, overall });
    }

    Ok(BenchmarkReport {
        suite: suite.name.clone(),
        config: cfg.clone(),
        policies: policies.iter().map(|p| p.slug().to_string()).collect(),
        seeds: seeds.to_vec(),
        groups,
        anomalies,
        episodes,
    })
}

fn resolve_goals(
    env: &Environment,
    entry: &SuiteEnv,
    layout_rooms: Option<&[(String, Cell)]>,
) -> Result<Vec<GoalSpec>, EvalError> {
    let ordered: Vec<String> = match layout_rooms {
        Some(rooms) => rooms.iter().map(|(id, _)| id.clone()).collect(),
        None => env.room_cells().map(|(id, _)| id.to_string()).collect(),
    };
    let ids: Vec<String> = match (&entry.goals, entry.goal_count) {
        (Some(_), Some(_)) => {
            return Err(EvalError::Suite("suite entry has both goals and goal_count".into()))
        }
        (Some(goals), None) => goals.clone(),
        (None, Some(count)) => ordered.into_iter().take(count).collect(),
        (None, None) => ordered,
    };
    if ids.is_empty() {
        return Err(EvalError::Suite("suite entry resolves to no goals".into()));
    }
    ids.iter().map(|id| env.goal_spec(id).map_err(EvalError::from)).collect()
}

/// Run one episode under a benchmark policy. The episode seed feeds every
/// source of policy randomness.
pub fn run_episode(
    env: &Environment,
    goal: &GoalSpec,
    policy: BenchPolicy,
    seed: u64,
    cfg: &BenchConfig,
) -> Episode {
    run_episode_with_horizon(env, goal, policy, seed, cfg, cfg.horizon)
}

fn run_episode_with_horizon(
    env: &Environment,
    goal: &GoalSpec,
    policy: BenchPolicy,
    seed: u64,
    cfg: &BenchConfig,
    horizon: Option<usize>,
) -> Episode {
    let mut agent_cfg = AgentConfig::new(policy.policy(), env.rows(), env.cols());
    agent_cfg.k = cfg.k;
    agent_cfg.alpha = cfg.alpha;
    agent_cfg.uniformity_epsilon = cfg.uniformity_epsilon;
    if let Some(horizon) = horizon {
        agent_cfg.horizon = horizon;
    }
    match policy {
        BenchPolicy::OursRule => run_ours(env, goal, &agent_cfg, &mut RulePredictor),
        BenchPolicy::OursOracle => {
            run_ours(env, goal, &agent_cfg, &mut OraclePredictor::for_env(env, goal.target_cell))
        }
        BenchPolicy::OursUniform => {
            run_ours(env, goal, &agent_cfg, &mut UniformPredictor::new(seed))
        }
        BenchPolicy::Frontier => run_frontier(env, goal, &agent_cfg, seed),
        BenchPolicy::StepRandom => {
            run_step_llm(env, goal, &agent_cfg, &mut RandomActions::new(seed))
        }
        BenchPolicy::HistoryRandom => run_history_llm(
            env,
            goal,
            &agent_cfg,
            &mut RandomHistoryChooser::new(seed),
            cfg.summary_budget,
        ),
    }
}

impl BenchmarkReport {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("report serialization");
        out.push(b'\n');
        out
    }

    /// Per-episode rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("env,group,policy,seed,goal,status,success,oracle_len,steps,spl,return\n");
        for r in &self.episodes {
            out.push_str(&format!(
                "{},{},{},{},{},{:?},{},{},{},{:.6},{}\n",
                r.env,
                r.group,
                r.policy,
                r.seed,
                r.goal,
                r.status,
                u8::from(r.success),
                r.oracle_len,
                r.steps,
                r.spl,
                r.r#return,
            ));
        }
        out
    }

    /// Plain-text table: one row per environment plus a per-group Overall
    /// row; "mean ± std" at 2 decimal places for SPL and SR.
    pub fn to_text_table(&self) -> String {
        let env_width = self
            .groups
            .iter()
            .flat_map(|g| g.rows.iter().map(|r| r.env.len()))
            .chain(["Overall".len()])
            .max()
            .unwrap_or(8)
            .max(8);
        let cell = |mean: f64, std: f64| format!("{mean:.2} \u{00b1} {std:.2}");
        let col_width = self.policies.iter().map(|p| p.len()).max().unwrap_or(10).max(2 * 13);
        let mut out = String::new();
        out.push_str(&format!("{:6} {:env_width$}", "Group", "Env."));
        for policy in &self.policies {
            out.push_str(&format!(" | {policy:^col_width$}"));
        }
        out.push('\n');
        out.push_str(&format!("{:6} {:env_width$}", "", ""));
        for _ in &self.policies {
            out.push_str(&format!(
                " | {:^13}{:^13}",
                "SPL", "SR"
            ));
        }
        out.push('\n');
        for group in &self.groups {
            for (i, row) in group.rows.iter().enumerate() {
                let group_label = if i == 0 { group.name.as_str() } else { "" };
                out.push_str(&format!("{:6} {:env_width$}", group_label, row.env));
                for stats in &row.stats {
                    out.push_str(&format!(
                        " | {:^13}{:^13}",
                        cell(stats.spl_mean, stats.spl_std),
                        cell(stats.sr_mean, stats.sr_std)
                    ));
                }
                out.push('\n');
            }
            out.push_str(&format!("{:6} {:env_width$}", "", "Overall"));
            for stats in &group.overall {
                out.push_str(&format!(
                    " | {:^13}{:^13}",
                    cell(stats.spl_mean, stats.spl_std),
                    cell(stats.sr_mean, stats.sr_std)
                ));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellSemantics, OccupancyGrid, SemanticGrid};

    fn record(success: bool, oracle_len: usize, steps: usize) -> EpisodeRecord {
        EpisodeRecord {
            env: "e".into(),
            group: "Small".into(),
            policy: "p".into(),
            seed: 0,
            goal: "g".into(),
            success,
            oracle_len,
            steps,
            status: if success { EpisodeStatus::Success } else { EpisodeStatus::Timeout },
            spl: episode_spl(success, oracle_len, steps),
            r#return: 0,
            trace: None,
            trajectory: Vec::new(),
        }
    }

    #[test]
    fn spl_perfect_episode() {
        assert_eq!(spl(&[record(true, 10, 10)]).unwrap(), 1.0);
    }

    #[test]
    fn spl_failure_contributes_zero() {
        assert_eq!(spl(&[record(false, 10, 3)]).unwrap(), 0.0);
    }

    #[test]
    fn spl_half_for_double_length() {
        assert!((spl(&[record(true, 5, 10)]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spl_guard_for_zero_oracle() {
        assert_eq!(spl(&[record(true, 0, 0)]).unwrap(), 1.0);
    }

    #[test]
    fn spl_empty_input_errors() {
        assert!(matches!(spl(&[]), Err(EvalError::EmptyInput)));
        assert!(matches!(success_rate(&[]), Err(EvalError::EmptyInput)));
    }

    #[test]
    fn success_rate_counts() {
        let records: Vec<EpisodeRecord> =
            (0..10).map(|i| record(i < 3, 5, 5)).collect();
        assert!((success_rate(&records).unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn oracle_zero_when_start_adjacent_to_door() {
        let mut occupancy = OccupancyGrid::filled(1, 2, 0);
        occupancy.set(Cell::new(0, 1), 1);
        let mut semantics = SemanticGrid::implied_by(&occupancy);
        *semantics.get_mut(Cell::new(0, 1)) = CellSemantics::door("9");
        let env = Environment { name: "t".into(), occupancy, semantics, start: Cell::new(0, 0) };
        let goal = env.goal_spec("9").unwrap();
        assert_eq!(oracle_shortest(&env, &goal).unwrap(), 0);
    }

    #[test]
    fn oracle_counts_corridor_steps() {
        // Corridor of 7 cells, door at the far end: success set is the cell
        // before the door, 5 steps away.
        let mut occupancy = OccupancyGrid::filled(1, 7, 0);
        occupancy.set(Cell::new(0, 6), 1);
        let mut semantics = SemanticGrid::implied_by(&occupancy);
        *semantics.get_mut(Cell::new(0, 6)) = CellSemantics::door("9");
        let env = Environment { name: "t".into(), occupancy, semantics, start: Cell::new(0, 0) };
        let goal = env.goal_spec("9").unwrap();
        assert_eq!(oracle_shortest(&env, &goal).unwrap(), 5);
    }

    #[test]
    fn oracle_unreachable_goal_errors() {
        let mut occupancy = OccupancyGrid::filled(1, 4, 0);
        occupancy.set(Cell::new(0, 1), 1);
        occupancy.set(Cell::new(0, 3), 1);
        let mut semantics = SemanticGrid::implied_by(&occupancy);
        *semantics.get_mut(Cell::new(0, 3)) = CellSemantics::door("9");
        let env = Environment { name: "t".into(), occupancy, semantics, start: Cell::new(0, 0) };
        let goal = env.goal_spec("9").unwrap();
        assert!(matches!(oracle_shortest(&env, &goal), Err(EvalError::Unreachable(_))));
    }

    #[test]
    fn suite_rejects_empty_and_ambiguous_entries() {
        assert!(Suite::from_json(br#"{"environments": []}"#).is_err());
        assert!(Suite::from_json(
            br#"{"environments": [{"family": "small-h-shape", "path": "x.json"}]}"#
        )
        .is_err());
        assert!(Suite::from_json(br#"{"environments": [{"goals": ["1"]}]}"#).is_err());
        assert!(Suite::from_json(
            br#"{"environments": [{"family": "small-h-shape", "goal_count": 2}]}"#
        )
        .is_ok());
    }
}
