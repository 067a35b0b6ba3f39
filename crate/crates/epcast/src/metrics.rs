//! Measurement: delivery, cost, and timing read back from the event log,
//! plus cross-replication aggregation.
//!
//! Everything here recomputes from [`World::events`] rather than trusting
//! the engine's online counters, so the two can be checked against each
//! other in tests.

use crate::protocol::{EventKind, MessageId, World};
use serde::Serialize;
use std::collections::HashSet;
use std::io::{self, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("unknown message id {0}")]
    UnknownMessage(MessageId),
    #[error("aggregation needs at least 2 samples, got {0}")]
    InsufficientReplications(usize),
}

fn check_msg(world: &World, msg: MessageId) -> Result<(), MetricsError> {
    if world.message(msg).is_none() {
        return Err(MetricsError::UnknownMessage(msg));
    }
    Ok(())
}

/// Fraction of hosts that had stored `msg` by the end of `at_round`
/// (deliveries are first stores; later evictions don't undo them).
pub fn delivery_ratio(world: &World, msg: MessageId, at_round: u64) -> Result<f64, MetricsError> {
    check_msg(world, msg)?;
    let mut delivered: HashSet<u32> = HashSet::new();
    for e in world.events() {
        if e.kind == EventKind::Store && e.msg == msg && e.round <= at_round {
            delivered.insert(e.node);
        }
    }
    Ok(delivered.len() as f64 / world.node_count() as f64)
}

/// Earliest round by whose end at least `fraction` of hosts had stored
/// `msg`, or `None` if the log never gets there.
pub fn time_to_fraction(
    world: &World,
    msg: MessageId,
    fraction: f64,
) -> Result<Option<u64>, MetricsError> {
    check_msg(world, msg)?;
    let needed = (fraction * world.node_count() as f64).ceil().max(1.0) as usize;
    let mut delivered: HashSet<u32> = HashSet::new();
    for e in world.events() {
        if e.kind == EventKind::Store && e.msg == msg {
            delivered.insert(e.node);
            if delivered.len() >= needed {
                return Ok(Some(e.round));
            }
        }
    }
    Ok(None)
}

/// Broadcasts of `msg` counted from the log. Each buffered copy broadcasts
/// once per round, so this equals the message-rounds the copy population
/// spent alive — the discrete counterpart of integrating the infected count
/// over time.
pub fn total_broadcasts(world: &World, msg: MessageId) -> Result<u64, MetricsError> {
    check_msg(world, msg)?;
    Ok(world
        .events()
        .iter()
        .filter(|e| e.kind == EventKind::Broadcast && e.msg == msg)
        .count() as u64)
}

/// Average copy-rounds each host spent carrying `msg`.
pub fn replicas_per_host(world: &World, msg: MessageId) -> Result<f64, MetricsError> {
    Ok(total_broadcasts(world, msg)? as f64 / world.node_count() as f64)
}

/// Mean and spread of one metric across replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationStats {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    /// stderr / |mean|; infinite when the mean is zero but samples vary.
    pub rel_stderr: f64,
    /// Flags runs whose relative standard error exceeds 5% — the published
    /// numbers should not be trusted without more replications.
    pub high_variance: bool,
}

pub fn aggregate(samples: &[f64]) -> Result<ReplicationStats, MetricsError> {
    let n = samples.len();
    if n < 2 {
        return Err(MetricsError::InsufficientReplications(n));
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let stderr = (var / n as f64).sqrt();
    let rel_stderr = if mean != 0.0 {
        stderr / mean.abs()
    } else if stderr == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(ReplicationStats {
        n,
        mean,
        stderr,
        rel_stderr,
        high_variance: rel_stderr > 0.05,
    })
}

/// One line of the per-replication results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    /// `epcast` for tuned runs, `epidemic` for fixed-probability baselines.
    pub run_type: String,
    pub replication: u32,
    pub msg: MessageId,
    pub delivered_fraction: f64,
    pub total_broadcasts: u64,
    pub replicas_per_host_per_msg: f64,
    /// Rounds until the run's target fraction was reached, if it was.
    pub time_to_target: Option<u64>,
}

/// Writes the results table; an unmet target renders as `not_reached`.
pub fn write_results_csv<W: Write>(rows: &[ResultRow], w: &mut W) -> io::Result<()> {
    writeln!(
        w,
        "scenario,type,replication,msg,delivered_fraction,total_broadcasts,\
         replicas_per_host_per_msg,time_to_target"
    )?;
    for r in rows {
        let reached = match r.time_to_target {
            Some(rounds) => rounds.to_string(),
            None => "not_reached".to_string(),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            r.run_type,
            r.replication,
            r.msg,
            r.delivered_fraction,
            r.total_broadcasts,
            r.replicas_per_host_per_msg,
            reached
        )?;
    }
    Ok(())
}
