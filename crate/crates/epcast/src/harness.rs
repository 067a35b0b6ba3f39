//! Experiment orchestration: configuration, replication, aggregation, and
//! file output.
//!
//! An experiment is a named scenario (synthetic mobility in an arena, or a
//! co-location trace) run for a number of independent replications. Each
//! replication builds its own world from a child seed, warms the online
//! estimators up, injects a batch of messages, and runs rounds until every
//! message has expired. Replications are embarrassingly parallel; results
//! are aggregated in replication order either way, so parallel and serial
//! runs produce byte-identical output.

use crate::baselines::{self, RUN_TYPE_FIXED, RUN_TYPE_TUNED};
use crate::metrics::{self, MetricsError, ReplicationStats, ResultRow};
use crate::mobility::{ArenaConfig, MobilityError, MobilityState};
use crate::protocol::{
    write_events_jsonl, Event, ProtocolConfig, ProtocolError, RemovalPolicy, World,
};
use crate::rng::{self, role};
use crate::traces::{self, TimeVaryingGraph, TraceError};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Mobility(#[from] MobilityError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

/// Which injection path each message takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    /// Tune per message against the origin's own degree estimate.
    Epcast,
    /// Tune against the population's minimum observed degree.
    EpcastHet,
    /// No tuning; every message floods at `fixed_beta`.
    FixedBeta,
}

impl RunMode {
    fn run_type(self) -> &'static str {
        match self {
            RunMode::Epcast | RunMode::EpcastHet => RUN_TYPE_TUNED,
            RunMode::FixedBeta => RUN_TYPE_FIXED,
        }
    }
}

fn default_tau() -> f64 {
    10.0
}
fn default_buffer() -> usize {
    5
}
fn default_messages() -> usize {
    20
}
fn default_deadline() -> f64 {
    600.0
}
fn default_replications() -> usize {
    30
}
fn default_max_replications() -> usize {
    100
}
fn default_warmup() -> u64 {
    20
}
fn default_gamma_bootstrap() -> f64 {
    0.05
}
fn default_mode() -> RunMode {
    RunMode::Epcast
}

/// Everything an experiment run needs, deserializable from a JSON file.
/// Exactly one of `arena` / `trace_path` must be set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Name stamped on every results row.
    pub scenario: String,
    /// Population size. Required with `arena`; optional with `trace_path`,
    /// where it must match the trace if given.
    #[serde(default)]
    pub node_count: Option<usize>,
    /// Synthetic mobility: nodes roam this arena and meet by proximity,
    /// within the arena's contact radius.
    #[serde(default)]
    pub arena: Option<ArenaConfig>,
    /// Co-location trace: contacts replayed from recorded sessions.
    #[serde(default)]
    pub trace_path: Option<PathBuf>,
    /// Round length in seconds. For traces this is also the slot width.
    #[serde(default = "default_tau")]
    pub tau_s: f64,
    #[serde(default = "default_buffer")]
    pub buffer_capacity: usize,
    /// Messages injected per replication, all at once after warmup.
    #[serde(default = "default_messages")]
    pub initial_messages: usize,
    /// Reach targets; message `i` uses `targets[i % targets.len()]`.
    pub targets: Vec<f64>,
    #[serde(default = "default_deadline")]
    pub deadline_s: f64,
    /// Replications to run before the variance check.
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Hard ceiling for the adaptive top-up.
    #[serde(default = "default_max_replications")]
    pub max_replications: usize,
    pub master_seed: u64,
    #[serde(default = "default_mode")]
    pub mode: RunMode,
    /// Per-copy probability for [`RunMode::FixedBeta`].
    #[serde(default)]
    pub fixed_beta: Option<f64>,
    /// Message-free rounds to converge the online estimators before
    /// injection.
    #[serde(default = "default_warmup")]
    pub warmup_rounds: u64,
    /// Removal rate assumed by tuning while eviction history is thin.
    #[serde(default = "default_gamma_bootstrap")]
    pub gamma_bootstrap: f64,
}

impl ExperimentConfig {
    /// Built-in arena scenarios, one per population ladder rung and
    /// coverage target: `rwp-{64,128,256,512}-psi{50,100}`.
    ///
    /// A 1 km square, 200 m contact radius, speeds 1–6 m/s with no pauses;
    /// 20 messages per replication, all at the named coverage target
    /// (psi50 = half the hosts, psi100 = all of them), 600 s deadline.
    /// Nothing evicts copies here except buffer pressure, so tuning
    /// bootstraps from the churn-driven removal rate these scenarios
    /// impose on themselves during dissemination (~0.02–0.04 per round
    /// measured; 0.025 assumed).
    pub fn preset(name: &str) -> Option<ExperimentConfig> {
        let (base, psi) = match name.rsplit_once("-psi") {
            Some((base, "50")) => (base, 0.5),
            Some((base, "100")) => (base, 1.0),
            _ => return None,
        };
        let nodes = match base {
            "rwp-64" => 64,
            "rwp-128" => 128,
            "rwp-256" => 256,
            "rwp-512" => 512,
            _ => return None,
        };
        Some(ExperimentConfig {
            scenario: name.to_string(),
            node_count: Some(nodes),
            arena: Some(ArenaConfig {
                side_m: 1000.0,
                range_m: 200.0,
                speed_min_mps: 1.0,
                speed_max_mps: 6.0,
                pause_s: 0.0,
            }),
            trace_path: None,
            tau_s: 10.0,
            buffer_capacity: 5,
            initial_messages: 20,
            targets: vec![psi],
            deadline_s: 600.0,
            replications: 30,
            max_replications: 100,
            master_seed: 42,
            mode: RunMode::Epcast,
            fixed_beta: None,
            warmup_rounds: 20,
            gamma_bootstrap: 0.025,
        })
    }

    pub fn preset_names() -> &'static [&'static str] {
        &[
            "rwp-64-psi50",
            "rwp-64-psi100",
            "rwp-128-psi50",
            "rwp-128-psi100",
            "rwp-256-psi50",
            "rwp-256-psi100",
            "rwp-512-psi50",
            "rwp-512-psi100",
        ]
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig, HarnessError> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        match (&self.arena, &self.trace_path) {
            (Some(_), Some(_)) => {
                return fail("set either arena or trace_path, not both".into());
            }
            (None, None) => return fail("one of arena or trace_path is required".into()),
            (Some(arena), None) => {
                arena.validate()?;
                if self.node_count.is_none() {
                    return fail("arena scenarios need node_count".into());
                }
            }
            (None, Some(_)) => {}
        }
        if let Some(n) = self.node_count {
            if n < 2 {
                return fail(format!("node_count must be >= 2, got {n}"));
            }
            if self.initial_messages > n {
                return fail("more messages than distinct origins".into());
            }
        }
        if self.targets.is_empty() {
            return fail("targets must not be empty".into());
        }
        for &t in &self.targets {
            if !(t > 0.0 && t <= 1.0) {
                return fail(format!("targets must lie in (0, 1], got {t}"));
            }
        }
        if self.initial_messages < self.targets.len() {
            return fail("need at least one message per target".into());
        }
        if !(self.tau_s > 0.0) {
            return fail(format!("tau_s must be > 0, got {}", self.tau_s));
        }
        if self.deadline_s < self.tau_s {
            return fail("deadline shorter than one round".into());
        }
        if self.replications < 2 {
            return fail("need at least 2 replications".into());
        }
        if self.max_replications < self.replications {
            return fail("max_replications below replications".into());
        }
        if self.mode == RunMode::FixedBeta {
            match self.fixed_beta {
                Some(b) if (0.0..=1.0).contains(&b) => {}
                _ => return fail("fixed-beta mode needs fixed_beta in [0, 1]".into()),
            }
        }
        if self.gamma_bootstrap < 0.0 {
            return fail("gamma_bootstrap must be >= 0".into());
        }
        Ok(())
    }

    fn protocol_config(&self) -> ProtocolConfig {
        ProtocolConfig {
            buffer_capacity: self.buffer_capacity,
            tau_s: self.tau_s,
            removal: RemovalPolicy::BufferOnly,
            sis_mode: false,
            gamma_bootstrap: self.gamma_bootstrap,
            ..ProtocolConfig::default()
        }
    }
}

/// Contact feeds a replication can run against.
enum Scenario {
    Arena { node_count: usize, arena: ArenaConfig },
    Trace(Arc<TimeVaryingGraph>),
}

impl Scenario {
    fn node_count(&self) -> usize {
        match self {
            Scenario::Arena { node_count, .. } => *node_count,
            Scenario::Trace(tvg) => tvg.node_count(),
        }
    }
}

/// Everything one replication produced.
struct Replication {
    rows: Vec<ResultRow>,
    /// Delivered fraction averaged over this replication's messages, per
    /// target — the per-replication samples behind the variance check.
    delivered_by_target: Vec<f64>,
    events: Vec<Event>,
}

fn run_replication(
    config: &ExperimentConfig,
    scenario: &Scenario,
    rep: u32,
) -> Result<Replication, HarnessError> {
    let rep_seed = rng::derive_seed(config.master_seed, role::REPLICATION, rep as u64);
    let node_count = scenario.node_count();
    let mut world = World::new(node_count, config.protocol_config(), rep_seed)?;
    let deadline_rounds = (config.deadline_s / config.tau_s).floor() as u64;

    // The contact feed as a closure over round index; returns false once the
    // feed is exhausted (only traces exhaust).
    let mut mobility = match scenario {
        Scenario::Arena { node_count, arena } => {
            Some(MobilityState::new(*node_count, *arena, rep_seed)?)
        }
        Scenario::Trace(_) => None,
    };
    let mut slot_cursor = 0usize;
    let mut next_snapshot = |world: &mut World| -> Result<bool, HarnessError> {
        match scenario {
            Scenario::Arena { arena, .. } => {
                let m = mobility.as_mut().expect("arena scenario has mobility");
                m.advance(config.tau_s);
                world.set_contacts(m.snapshot(arena.range_m))?;
                Ok(true)
            }
            Scenario::Trace(tvg) => {
                if slot_cursor >= tvg.slot_count() {
                    return Ok(false);
                }
                world.set_contacts(tvg.snapshot(slot_cursor).clone())?;
                slot_cursor += 1;
                Ok(true)
            }
        }
    };

    for _ in 0..config.warmup_rounds {
        if !next_snapshot(&mut world)? {
            return Err(HarnessError::Config(format!(
                "trace too short: exhausted during the {}-round warmup",
                config.warmup_rounds
            )));
        }
        world.run_round()?;
    }

    // Origins: distinct hosts, uniform, drawn before any mode-specific
    // branching so runs that differ only in mode share them.
    let mut origin_rng = rng::stream(rep_seed, role::ORIGINS, 0);
    let mut origins: Vec<u32> = Vec::with_capacity(config.initial_messages);
    while origins.len() < config.initial_messages {
        let candidate = origin_rng.gen_range(0..node_count as u32);
        if !origins.contains(&candidate) {
            origins.push(candidate);
        }
    }

    let injection_round = world.round();
    let mut msg_targets = Vec::with_capacity(config.initial_messages);
    for (i, &origin) in origins.iter().enumerate() {
        let target = config.targets[i % config.targets.len()];
        msg_targets.push(target);
        match config.mode {
            RunMode::Epcast => {
                world.epcast(origin, 0, target, config.deadline_s)?;
            }
            RunMode::EpcastHet => {
                world.epcast_heterogeneous(origin, 0, target, config.deadline_s)?;
            }
            RunMode::FixedBeta => {
                let beta = config.fixed_beta.expect("validated");
                baselines::inject_fixed(&mut world, origin, 0, beta, config.deadline_s)?;
            }
        }
    }

    // Expiry normally ends the run; the cap only catches configs whose
    // messages could never die (it is far beyond any deadline).
    let round_cap = injection_round + 10 * deadline_rounds.max(1);
    while world.live_message_count() > 0 && world.round() < round_cap {
        if !next_snapshot(&mut world)? {
            break;
        }
        world.run_round()?;
    }

    let run_type = config.mode.run_type().to_string();
    let mut rows = Vec::with_capacity(config.initial_messages);
    let mut by_target: Vec<(f64, Vec<f64>)> =
        config.targets.iter().map(|&t| (t, Vec::new())).collect();
    for (i, msg) in world.messages().iter().enumerate() {
        let delivered = world.reached_count(msg.id) as f64 / node_count as f64;
        let time_to_target = metrics::time_to_fraction(&world, msg.id, msg_targets[i])?
            .map(|round| round - injection_round);
        rows.push(ResultRow {
            scenario: config.scenario.clone(),
            run_type: run_type.clone(),
            replication: rep,
            msg: msg.id,
            delivered_fraction: delivered,
            total_broadcasts: world.broadcast_total(msg.id),
            replicas_per_host_per_msg: metrics::replicas_per_host(&world, msg.id)?,
            time_to_target,
        });
        by_target[i % config.targets.len()].1.push(delivered);
    }
    let delivered_by_target = by_target
        .into_iter()
        .map(|(_, samples)| samples.iter().sum::<f64>() / samples.len().max(1) as f64)
        .collect();

    Ok(Replication {
        rows,
        delivered_by_target,
        events: world.into_events(),
    })
}

/// Cross-replication summary for one reach target.
#[derive(Debug, Clone, Serialize)]
pub struct TargetSummary {
    pub target: f64,
    pub messages: usize,
    pub delivered: ReplicationStats,
    pub replicas_per_host: ReplicationStats,
    pub broadcasts: ReplicationStats,
    /// Share of messages that hit their target before the deadline.
    pub reached_share: f64,
    /// Mean rounds-to-target over the messages that reached it.
    pub mean_time_to_target: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateReport {
    pub scenario: String,
    pub mode: RunMode,
    pub node_count: usize,
    pub replications: usize,
    pub targets: Vec<TargetSummary>,
}

/// A finished experiment: every per-message row, the aggregate, and the
/// first replication's full event log.
#[derive(Debug)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub rows: Vec<ResultRow>,
    pub aggregate: AggregateReport,
    pub events_rep0: Vec<Event>,
}

fn aggregate_rows(
    config: &ExperimentConfig,
    node_count: usize,
    reps: usize,
    rows: &[ResultRow],
) -> Result<AggregateReport, HarnessError> {
    let mut targets = Vec::with_capacity(config.targets.len());
    for (slot, &target) in config.targets.iter().enumerate() {
        let group: Vec<&ResultRow> = rows
            .iter()
            .filter(|r| (r.msg as usize) % config.targets.len() == slot)
            .collect();
        let delivered: Vec<f64> = group.iter().map(|r| r.delivered_fraction).collect();
        let replicas: Vec<f64> = group.iter().map(|r| r.replicas_per_host_per_msg).collect();
        let broadcasts: Vec<f64> = group.iter().map(|r| r.total_broadcasts as f64).collect();
        let reached: Vec<u64> = group.iter().filter_map(|r| r.time_to_target).collect();
        targets.push(TargetSummary {
            target,
            messages: group.len(),
            delivered: metrics::aggregate(&delivered)?,
            replicas_per_host: metrics::aggregate(&replicas)?,
            broadcasts: metrics::aggregate(&broadcasts)?,
            reached_share: reached.len() as f64 / group.len().max(1) as f64,
            mean_time_to_target: if reached.is_empty() {
                None
            } else {
                Some(reached.iter().sum::<u64>() as f64 / reached.len() as f64)
            },
        });
    }
    Ok(AggregateReport {
        scenario: config.scenario.clone(),
        mode: config.mode,
        node_count,
        replications: reps,
        targets,
    })
}

/// Runs the whole experiment: at least `replications` runs, topped up in
/// batches until every target's delivered fraction has a relative standard
/// error within 5% or `max_replications` is hit.
pub fn run_experiment(config: &ExperimentConfig, parallel: bool) -> Result<RunOutput, HarnessError> {
    config.validate()?;
    let scenario = match (&config.arena, &config.trace_path) {
        (Some(arena), None) => Scenario::Arena {
            node_count: config.node_count.expect("validated"),
            arena: *arena,
        },
        (None, Some(path)) => {
            let tvg = traces::load_colocation_path(path, config.tau_s)?;
            if let Some(n) = config.node_count {
                if n != tvg.node_count() {
                    return Err(HarnessError::Config(format!(
                        "config says {n} nodes but the trace has {}",
                        tvg.node_count()
                    )));
                }
            }
            Scenario::Trace(Arc::new(tvg))
        }
        _ => unreachable!("validated"),
    };
    if config.initial_messages > scenario.node_count() {
        return Err(HarnessError::Config(
            "more messages than distinct origins in the trace".into(),
        ));
    }

    let run_batch = |start: usize, count: usize| -> Result<Vec<Replication>, HarnessError> {
        let indices: Vec<u32> = (start as u32..(start + count) as u32).collect();
        if parallel {
            indices
                .into_par_iter()
                .map(|rep| run_replication(config, &scenario, rep))
                .collect()
        } else {
            indices
                .into_iter()
                .map(|rep| run_replication(config, &scenario, rep))
                .collect()
        }
    };

    let mut replications = run_batch(0, config.replications)?;
    loop {
        let needs_more = {
            let mut worst: f64 = 0.0;
            for slot in 0..config.targets.len() {
                let samples: Vec<f64> = replications
                    .iter()
                    .map(|r| r.delivered_by_target[slot])
                    .collect();
                let stats = metrics::aggregate(&samples)?;
                worst = worst.max(stats.rel_stderr);
            }
            worst > 0.05
        };
        if !needs_more || replications.len() >= config.max_replications {
            break;
        }
        let batch = 10.min(config.max_replications - replications.len());
        let start = replications.len();
        replications.extend(run_batch(start, batch)?);
    }

    let reps = replications.len();
    let mut rows = Vec::with_capacity(reps * config.initial_messages);
    let mut events_rep0 = Vec::new();
    for (i, rep) in replications.into_iter().enumerate() {
        if i == 0 {
            events_rep0 = rep.events;
        }
        rows.extend(rep.rows);
    }
    let aggregate = aggregate_rows(config, scenario.node_count(), reps, &rows)?;
    Ok(RunOutput {
        config: config.clone(),
        rows,
        aggregate,
        events_rep0,
    })
}

/// Writes `results.csv`, `aggregate.json`, and `events-rep0.jsonl` under
/// `out_dir` (created if missing).
pub fn write_outputs(out: &RunOutput, out_dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(out_dir)?;
    let mut csv = BufWriter::new(File::create(out_dir.join("results.csv"))?);
    metrics::write_results_csv(&out.rows, &mut csv)?;
    csv.flush()?;

    let mut json = BufWriter::new(File::create(out_dir.join("aggregate.json"))?);
    serde_json::to_writer_pretty(&mut json, &out.aggregate)?;
    writeln!(json)?;
    json.flush()?;

    let mut jsonl = BufWriter::new(File::create(out_dir.join("events-rep0.jsonl"))?);
    write_events_jsonl(&out.events_rep0, &mut jsonl)?;
    jsonl.flush()?;
    Ok(())
}
