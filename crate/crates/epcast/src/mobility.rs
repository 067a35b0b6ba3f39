//! Random-Waypoint mobility over a bounded square arena.
//!
//! Each node independently draws a destination uniformly inside the arena
//! and a speed uniformly from the configured interval, walks there in a
//! straight line, optionally pauses, and repeats. Contact snapshots connect
//! every pair within radio range (disk graph, inclusive boundary).
//!
//! Every node owns a dedicated RNG stream, so enlarging the population
//! leaves the trajectories of existing nodes untouched.

use crate::contact::{ContactSnapshot, NodeId};
use crate::rng::{self, role};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MobilityError {
    #[error("invalid arena: {0}")]
    InvalidArena(String),
}

/// Square arena plus motion parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArenaConfig {
    /// Side of the square, metres.
    pub side_m: f64,
    /// Radio range, metres: pairs at distance <= range are in contact.
    pub range_m: f64,
    /// Speed interval, metres per second (0 < min <= max).
    pub speed_min_mps: f64,
    pub speed_max_mps: f64,
    /// Pause at each waypoint, seconds (0 disables pausing).
    pub pause_s: f64,
}

impl ArenaConfig {
    pub fn validate(&self) -> Result<(), MobilityError> {
        if !(self.side_m > 0.0) || !self.side_m.is_finite() {
            return Err(MobilityError::InvalidArena(format!(
                "side_m must be > 0, got {}",
                self.side_m
            )));
        }
        if !(self.range_m > 0.0) || !self.range_m.is_finite() {
            return Err(MobilityError::InvalidArena(format!(
                "range_m must be > 0, got {}",
                self.range_m
            )));
        }
        if !(self.speed_min_mps > 0.0) || self.speed_max_mps < self.speed_min_mps {
            return Err(MobilityError::InvalidArena(format!(
                "need 0 < speed_min <= speed_max, got [{}, {}]",
                self.speed_min_mps, self.speed_max_mps
            )));
        }
        if self.pause_s < 0.0 || !self.pause_s.is_finite() {
            return Err(MobilityError::InvalidArena(format!(
                "pause_s must be >= 0, got {}",
                self.pause_s
            )));
        }
        if self.range_m > self.side_m * std::f64::consts::SQRT_2 {
            // Legal, but every snapshot will be a complete graph.
            log::warn!(
                "range {}m covers the whole {}m arena; contact graphs will be complete",
                self.range_m,
                self.side_m
            );
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Vec2 {
    x: f64,
    y: f64,
}

impl Vec2 {
    fn dist(self, other: Vec2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Motion state of one node.
#[derive(Debug, Clone)]
struct NodeMotion {
    pos: Vec2,
    waypoint: Vec2,
    speed_mps: f64,
    pause_left_s: f64,
}

/// Positions and per-node RNG streams for the whole population.
#[derive(Debug, Clone)]
pub struct MobilityState {
    arena: ArenaConfig,
    nodes: Vec<NodeMotion>,
    rngs: Vec<ChaCha12Rng>,
}

fn uniform_point(rng: &mut ChaCha12Rng, side: f64) -> Vec2 {
    Vec2 {
        x: rng.gen_range(0.0..=side),
        y: rng.gen_range(0.0..=side),
    }
}

fn uniform_speed(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

impl MobilityState {
    /// Places `node_count` nodes uniformly at random, each with an initial
    /// waypoint and speed already drawn.
    pub fn new(node_count: usize, arena: ArenaConfig, seed: u64) -> Result<Self, MobilityError> {
        arena.validate()?;
        let mut nodes = Vec::with_capacity(node_count);
        let mut rngs = Vec::with_capacity(node_count);
        for id in 0..node_count {
            let mut rng = rng::stream(seed, role::MOBILITY, id as u64);
            let pos = uniform_point(&mut rng, arena.side_m);
            let waypoint = uniform_point(&mut rng, arena.side_m);
            let speed = uniform_speed(&mut rng, arena.speed_min_mps, arena.speed_max_mps);
            nodes.push(NodeMotion {
                pos,
                waypoint,
                speed_mps: speed,
                pause_left_s: 0.0,
            });
            rngs.push(rng);
        }
        Ok(MobilityState { arena, nodes, rngs })
    }

    #[must_use]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    #[must_use]
    pub fn arena(&self) -> &ArenaConfig {
        &self.arena
    }

    /// Position of `node` as `(x, y)` metres.
    #[must_use]
    pub fn position(&self, node: NodeId) -> (f64, f64) {
        let p = self.nodes[node as usize].pos;
        (p.x, p.y)
    }

    /// Advances every node by `dt_s` seconds of simulated time, consuming
    /// pauses and redrawing waypoints as they are reached.
    pub fn advance(&mut self, dt_s: f64) {
        let arena = self.arena;
        for (node, rng) in self.nodes.iter_mut().zip(self.rngs.iter_mut()) {
            let mut left = dt_s;
            while left > 0.0 {
                if node.pause_left_s > 0.0 {
                    let wait = node.pause_left_s.min(left);
                    node.pause_left_s -= wait;
                    left -= wait;
                    continue;
                }
                let dist = node.pos.dist(node.waypoint);
                let reach_time = dist / node.speed_mps;
                if reach_time > left {
                    let frac = left * node.speed_mps / dist;
                    node.pos.x += (node.waypoint.x - node.pos.x) * frac;
                    node.pos.y += (node.waypoint.y - node.pos.y) * frac;
                    left = 0.0;
                } else {
                    // Arrive, pause, and pick the next leg; the residual time
                    // is spent in later loop turns.
                    node.pos = node.waypoint;
                    left -= reach_time;
                    node.pause_left_s = arena.pause_s;
                    node.waypoint = uniform_point(rng, arena.side_m);
                    node.speed_mps =
                        uniform_speed(rng, arena.speed_min_mps, arena.speed_max_mps);
                }
            }
        }
    }

    /// Disk-graph contacts at the current instant: nodes at distance
    /// `<= range_m` (inclusive) are connected.
    #[must_use]
    pub fn snapshot(&self, range_m: f64) -> ContactSnapshot {
        let n = self.nodes.len();
        let mut edges = Vec::new();
        for a in 0..n {
            let pa = self.nodes[a].pos;
            for b in (a + 1)..n {
                if pa.dist(self.nodes[b].pos) <= range_m {
                    edges.push((a as NodeId, b as NodeId));
                }
            }
        }
        ContactSnapshot::from_edges(n, edges)
    }
}
