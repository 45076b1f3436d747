//! semnav: generate benchmark environments, run single navigation episodes,
//! and execute SPL/SR benchmark suites.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use semnav_core::agent::{
    episode_return, extract_goal, occupancy_violations, run_frontier_with, run_history_llm_with,
    run_ours_with, run_step_llm_with, ActionChooser, AgentConfig, Episode, EpisodeStatus,
    ExternalActionChooser, NoopSink, Policy, RandomActions, RandomHistoryChooser,
    ReplayActionChooser, StepContext, StepSink,
};
use semnav_core::belief::Region;
use semnav_core::eval::{oracle_shortest, run_benchmark, BenchConfig, BenchPolicy, Suite};
use semnav_core::grid::gen::{generate_environment, Family, GeneratorParams};
use semnav_core::grid::{load_environment, save_environment, Environment};
use semnav_core::predictor::{
    ExternalPredictor, GoalRegionPredictor, OraclePredictor, RulePredictor, ScriptedPredictor,
    Transcript, TranscriptReplayPredictor, TranscriptWriter, UniformPredictor,
};
use semnav_core::render::{render_scene, GridView, RenderFormat, RenderLayer, RenderSpec, Scene};

#[derive(Parser)]
#[command(name = "semnav", about = "Semantic goal navigation simulator and benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an environment file.
    Gen(GenArgs),
    /// Run one navigation episode.
    Run(RunArgs),
    /// Run a benchmark suite and write reports.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Environment family slug (e.g. small-h-shape, noisy-polycam).
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Cell-flip rate for the noisy family.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    /// Number of numbered rooms.
    #[arg(long, default_value_t = 8)]
    rooms: usize,
    /// Odd rooms on one corridor side, even on the other.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    odd_even: bool,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Load the environment from a file (mutually exclusive with --family).
    #[arg(long, conflicts_with = "family")]
    env: Option<PathBuf>,
    #[arg(long, value_parser = parse_family)]
    family: Option<Family>,
    /// Generation seed for --family.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 8)]
    rooms: usize,
    /// Natural-language goal command, e.g. "Go to Room 621".
    #[arg(long)]
    goal: String,
    /// Policy: ours | frontier | step | navgpt.
    #[arg(long, default_value = "ours")]
    policy: String,
    /// Predictor: rule | oracle | uniform:<seed> | scripted:<path> | external[:<url>].
    #[arg(long, default_value = "rule")]
    predictor: String,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Maximum steps; per-policy default when omitted.
    #[arg(long)]
    horizon: Option<usize>,
    /// Episode seed for stochastic policies.
    #[arg(long, default_value_t = 0)]
    episode_seed: u64,
    /// History summary budget for the navgpt policy.
    #[arg(long, default_value_t = 8)]
    summary_budget: usize,
    /// Render per-step views: ascii | ppm | svg.
    #[arg(long, value_parser = parse_format)]
    render: Option<RenderFormat>,
    #[arg(long, default_value_t = 8)]
    cell_px: usize,
    /// Write the episode trace (NDJSON).
    #[arg(long, default_value_t = false)]
    trace: bool,
    /// Record external predictor exchanges for replay.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Replay a recorded transcript instead of contacting the endpoint.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Output directory for traces and renders.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// External predictor timeout in milliseconds.
    #[arg(long, default_value_t = 10_000)]
    timeout_ms: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Suite file (JSON).
    #[arg(long)]
    suite: PathBuf,
    /// Comma-separated policies: ours-rule, ours-oracle, ours-uniform,
    /// frontier, step-random, history-random.
    #[arg(long, default_value = "ours-rule,frontier,step-random")]
    policies: String,
    /// Episode seeds: "a,b,c" or a range "lo..hi".
    #[arg(long, default_value = "0..10")]
    seeds: String,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Global horizon override.
    #[arg(long)]
    horizon: Option<usize>,
    /// Worker threads for episode execution.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Output directory for report.json / report.csv / report.txt.
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_format(s: &str) -> Result<RenderFormat, String> {
    s.parse()
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    let params = GeneratorParams {
        rooms: args.rooms,
        noise: args.noise,
        odd_even_split: args.odd_even,
        ..GeneratorParams::default()
    };
    let env = generate_environment(args.family, args.seed, &params)?;
    let bytes = save_environment(&env);
    match &args.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {} ({} rooms)", path.display(), env.room_cells().count());
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
        }
    }
    Ok(0)
}

/// Streams per-step renders to the output directory: a fused belief view per
/// step, plus a confidence heatmap for image formats.
struct RenderSink {
    goal_cell: semnav_core::grid::Cell,
    spec: RenderSpec,
    heat_spec: Option<RenderSpec>,
    dir: PathBuf,
}

impl StepSink for RenderSink {
    fn on_state(&mut self, ctx: &StepContext<'_>) {
        let mut scene = Scene::new(GridView::Belief(ctx.belief));
        scene.confidence = ctx.confidence;
        scene.trajectory = Some(ctx.trajectory);
        scene.agent = Some(ctx.pos);
        scene.goal = Some(self.goal_cell);
        let bytes = render_scene(&scene, &self.spec).expect("render");
        let name = format!("step_{:04}.{}", ctx.t, self.spec.format.extension());
        fs::write(self.dir.join(name), bytes).expect("write render");
        if let (Some(heat_spec), Some(confidence)) = (&self.heat_spec, ctx.confidence) {
            let mut heat = Scene::new(GridView::Belief(ctx.belief));
            heat.confidence = Some(confidence);
            let bytes = render_scene(&heat, heat_spec).expect("render heatmap");
            let name = format!("conf_{:04}.{}", ctx.t, heat_spec.format.extension());
            fs::write(self.dir.join(name), bytes).expect("write heatmap");
        }
    }
}

/// Keeps the latest belief snapshot so the final one can be written after the
/// episode ends, forwarding every state to an inner sink.
struct SnapshotSink<'a> {
    inner: &'a mut dyn StepSink,
    name: String,
    latest: Vec<u8>,
}

impl StepSink for SnapshotSink<'_> {
    fn on_state(&mut self, ctx: &StepContext<'_>) {
        self.latest = ctx.belief.snapshot_json(&self.name, ctx.pos);
        self.inner.on_state(ctx);
    }
}

fn cmd_run(args: RunArgs) -> Result<i32> {
    let env = match (&args.env, args.family) {
        (Some(path), None) => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            load_environment(&bytes)?
        }
        (None, Some(family)) => {
            let params = GeneratorParams {
                rooms: args.rooms,
                noise: args.noise,
                ..GeneratorParams::default()
            };
            generate_environment(family, args.seed, &params)?
        }
        _ => bail!("exactly one environment source: --env or --family"),
    };
    let goal_id = extract_goal(&args.goal)?;
    let goal = env.goal_spec(&goal_id)?;
    let policy = match args.policy.as_str() {
        "ours" => Policy::Ours,
        "frontier" => Policy::FrontierOnly,
        "step" => Policy::StepLlm,
        "navgpt" => Policy::HistoryLlm,
        other => bail!("unknown policy {other:?} (ours|frontier|step|navgpt)"),
    };
    let cfg = AgentConfig {
        k: args.k,
        alpha: args.alpha,
        horizon: args
            .horizon
            .unwrap_or_else(|| AgentConfig::default_horizon(policy, env.rows(), env.cols())),
        uniformity_epsilon: 1e-9,
        policy,
    };
    cfg.validate().map_err(|e| anyhow!(e))?;

    fs::create_dir_all(&args.out)?;
    let mut sink: Box<dyn StepSink> = match args.render {
        Some(format) => {
            let layers = [
                RenderLayer::Occupancy,
                RenderLayer::Semantics,
                RenderLayer::Trajectory,
                RenderLayer::Frontier,
            ];
            Box::new(RenderSink {
                goal_cell: goal.target_cell,
                spec: RenderSpec::new(layers, format, args.cell_px).map_err(|e| anyhow!(e))?,
                heat_spec: match format {
                    RenderFormat::Ascii => None,
                    other => Some(
                        RenderSpec::new([RenderLayer::Confidence], other, args.cell_px)
                            .map_err(|e| anyhow!(e))?,
                    ),
                },
                dir: args.out.clone(),
            })
        }
        None => Box::new(NoopSink),
    };

    let episode = if args.trace {
        let mut snapshot = SnapshotSink {
            inner: sink.as_mut(),
            name: format!("{}-belief", env.name),
            latest: Vec::new(),
        };
        let episode = run_policy(&args, &env, &goal, &cfg, &mut snapshot)?;
        fs::write(args.out.join("belief.json"), &snapshot.latest)?;
        let mut file = fs::File::create(args.out.join("trace.ndjson"))?;
        episode.write_trace(&mut file)?;
        episode
    } else {
        run_policy(&args, &env, &goal, &cfg, sink.as_mut())?
    };

    if occupancy_violations(&env, &episode.trajectory) > 0 {
        bail!("safety violation: trajectory crossed occupied cells");
    }
    // An unreachable goal leaves the oracle length (and SPL) undefined; the
    // episode itself still reports its terminal status.
    let oracle_len = oracle_shortest(&env, &goal).ok();
    let spl = oracle_len
        .map(|len| semnav_core::eval::episode_spl(episode.success(), len, episode.steps));
    println!(
        "{}",
        serde_json::json!({
            "status": format!("{:?}", episode.status),
            "steps": episode.steps,
            "oracle_len": oracle_len,
            "spl": spl,
            "return": episode_return(&episode),
        })
    );
    Ok(if episode.status == EpisodeStatus::Success { 0 } else { 1 })
}

fn run_policy(
    args: &RunArgs,
    env: &Environment,
    goal: &semnav_core::grid::GoalSpec,
    cfg: &AgentConfig,
    sink: &mut dyn StepSink,
) -> Result<Episode> {
    Ok(match cfg.policy {
        Policy::Ours => {
            let mut predictor = build_predictor(args, env, goal)?;
            run_ours_with(env, goal, cfg, predictor.as_mut(), sink)
        }
        Policy::FrontierOnly => run_frontier_with(env, goal, cfg, args.episode_seed, sink),
        Policy::StepLlm => {
            let mut chooser = build_action_chooser(args)?;
            run_step_llm_with(env, goal, cfg, chooser.as_mut(), sink)
        }
        Policy::HistoryLlm => {
            let mut chooser = RandomHistoryChooser::new(args.episode_seed);
            run_history_llm_with(env, goal, cfg, &mut chooser, args.summary_budget, sink)
        }
    })
}

/// Step-policy choosers: seeded random by default, or the external wire
/// protocol (`{"action": ...}` responses) when an external predictor or a
/// replay transcript is selected.
fn build_action_chooser(args: &RunArgs) -> Result<Box<dyn ActionChooser>> {
    if let Some(path) = &args.replay {
        let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
        let transcript = Transcript::from_reader(file)?;
        return Ok(Box::new(ReplayActionChooser::new(&transcript)));
    }
    let spec = args.predictor.as_str();
    if spec == "external" || spec.starts_with("external:") {
        let endpoint = if let Some(url) = spec.strip_prefix("external:") {
            url.to_string()
        } else {
            std::env::var("SEMNAV_PREDICTOR_URL")
                .context("external chooser needs external:<url> or SEMNAV_PREDICTOR_URL")?
        };
        let mut chooser =
            ExternalActionChooser::new(endpoint, Duration::from_millis(args.timeout_ms), args.k);
        if let Some(path) = &args.transcript {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let file = fs::File::create(path)?;
            chooser = chooser.with_transcript(TranscriptWriter::new(Box::new(file)));
        }
        return Ok(Box::new(chooser));
    }
    Ok(Box::new(RandomActions::new(args.episode_seed)))
}

fn build_predictor(
    args: &RunArgs,
    env: &Environment,
    goal: &semnav_core::grid::GoalSpec,
) -> Result<Box<dyn GoalRegionPredictor>> {
    if let Some(path) = &args.replay {
        let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
        let transcript = Transcript::from_reader(file)?;
        return Ok(Box::new(TranscriptReplayPredictor::new(&transcript)));
    }
    let spec = args.predictor.as_str();
    Ok(match spec {
        "rule" => Box::new(RulePredictor),
        "oracle" => Box::new(OraclePredictor::for_env(env, goal.target_cell)),
        _ if spec.starts_with("uniform:") => {
            let seed: u64 = spec["uniform:".len()..].parse().context("uniform:<seed>")?;
            Box::new(UniformPredictor::new(seed))
        }
        _ if spec.starts_with("scripted:") => {
            let path = &spec["scripted:".len()..];
            let mut text = String::new();
            fs::File::open(path)
                .with_context(|| format!("reading {path}"))?
                .read_to_string(&mut text)?;
            let raw: Vec<Option<String>> = serde_json::from_str(&text)
                .context("scripted predictor file: JSON array of regions and nulls")?;
            let script = raw
                .into_iter()
                .map(|entry| entry.map(|s| s.parse::<Region>()).transpose())
                .collect::<std::result::Result<Vec<Option<Region>>, _>>()
                .map_err(|e| anyhow!(e))?;
            Box::new(ScriptedPredictor::new(script))
        }
        _ if spec == "external" || spec.starts_with("external:") => {
            let endpoint = if let Some(url) = spec.strip_prefix("external:") {
                url.to_string()
            } else {
                std::env::var("SEMNAV_PREDICTOR_URL")
                    .context("external predictor needs external:<url> or SEMNAV_PREDICTOR_URL")?
            };
            let timeout = Duration::from_millis(args.timeout_ms);
            let mut predictor = ExternalPredictor::new(endpoint, timeout, args.k);
            if let Some(path) = &args.transcript {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    fs::create_dir_all(parent)?;
                }
                let file = fs::File::create(path)?;
                predictor = predictor.with_transcript(TranscriptWriter::new(Box::new(file)));
            } else {
                eprintln!(
                    "note: external predictor without --transcript; the run will not be replayable"
                );
            }
            Box::new(predictor)
        }
        other => bail!(
            "unknown predictor {other:?} (rule|oracle|uniform:<seed>|scripted:<path>|external[:<url>])"
        ),
    })
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: u64 = lo.trim().parse().context("seed range start")?;
        let hi: u64 = hi.trim().parse().context("seed range end")?;
        if lo >= hi {
            bail!("empty seed range {spec:?}");
        }
        return Ok((lo..hi).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("seed {s:?}")))
        .collect()
}

fn cmd_bench(args: BenchArgs) -> Result<i32> {
    let bytes =
        fs::read(&args.suite).with_context(|| format!("reading {}", args.suite.display()))?;
    let suite = Suite::from_json(&bytes)?;
    let policies = args
        .policies
        .split(',')
        .map(|s| s.trim().parse::<BenchPolicy>().map_err(|e| anyhow!(e)))
        .collect::<Result<Vec<_>>>()?;
    let seeds = parse_seeds(&args.seeds)?;
    let cfg = BenchConfig {
        k: args.k,
        alpha: args.alpha,
        horizon: args.horizon,
        jobs: args.jobs.max(1),
        ..BenchConfig::default()
    };
    let report = run_benchmark(&suite, &policies, &seeds, &cfg)?;
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("report.json"), report.to_json())?;
    fs::write(args.out.join("report.csv"), report.to_csv())?;
    let table = report.to_text_table();
    fs::write(args.out.join("report.txt"), &table)?;
    print!("{table}");
    for anomaly in &report.anomalies {
        eprintln!("anomaly: {anomaly}");
    }
    write_summary(&args.out, &report)?;
    Ok(0)
}

/// Headline numbers, handy for quick diffs between runs.
fn write_summary(dir: &Path, report: &semnav_core::eval::BenchmarkReport) -> Result<()> {
    let mut lines = String::new();
    for group in &report.groups {
        for stats in &group.overall {
            lines.push_str(&format!(
                "{} {} spl {:.4} sr {:.4}\n",
                group.name, stats.policy, stats.spl_mean, stats.sr_mean
            ));
        }
    }
    fs::write(dir.join("summary.txt"), lines)?;
    Ok(())
}
