//! The round-based gossip engine.
//!
//! Hosts hold messages in a bounded FIFO buffer and rebroadcast every
//! buffered message to their current contacts once per round. A receiver
//! runs one independent Bernoulli trial per received copy, at the message's
//! tuned infectivity, and stores on the first success. A seen-set suppresses
//! duplicates: a host that has ever stored a message never stores it again,
//! which is what makes buffer eviction behave as absorbing removal. The
//! whole round executes against the buffer state frozen at round start, so
//! a copy can travel at most one hop per round.
//!
//! Epidemic reading of the state, per message: susceptible = never stored;
//! infected = currently buffered; recovered = stored at some point but
//! evicted since. Removal normally emerges from FIFO pressure alone
//! ([`RemovalPolicy::BufferOnly`]); synthetic studies can instead impose a
//! per-round eviction probability ([`RemovalPolicy::Stochastic`]) to realise
//! a model's removal rate exactly.

use crate::contact::{ContactSnapshot, NodeId};
use crate::rng::{self, role};
use crate::tuner::{self, TuneError, TuneRequest, TuneResult};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::collections::{HashSet, VecDeque};
use std::io::{self, Write};
use thiserror::Error;

/// Message identifier: dense, assigned in injection order.
pub type MessageId = u64;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error("invalid protocol config: {0}")]
    InvalidConfig(String),
    #[error("node {0} does not exist in this world")]
    UnknownNode(NodeId),
    #[error("target fraction {0} must lie in [1/N, 1]")]
    InvalidTarget(f64),
    #[error("deadline shorter than one round ({deadline_s}s at {tau_s}s per round)")]
    DeadlineTooShort { deadline_s: f64, tau_s: f64 },
    #[error("no contact snapshot set for this round")]
    MissingSnapshot,
    #[error("tuning failed: {0}")]
    Tune(#[from] TuneError),
}

/// How buffered messages leave a host.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalPolicy {
    /// Evictions happen only when a store overflows the FIFO buffer.
    BufferOnly,
    /// Additionally, every buffered message is evicted with probability
    /// `gamma` per round (evaluated after the round's stores).
    Stochastic { gamma: f64 },
}

/// Engine parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolConfig {
    /// FIFO buffer capacity per host.
    pub buffer_capacity: usize,
    /// Round length in seconds; deadlines are converted with
    /// `floor(deadline_s / tau_s)`.
    pub tau_s: f64,
    pub removal: RemovalPolicy,
    /// Reinfection mode: duplicate suppression is disabled, so a host whose
    /// copy was evicted can store the message again. Used for comparing
    /// absorbing against non-absorbing removal; the seen-set is still
    /// tracked for reach accounting.
    pub sis_mode: bool,
    /// Removal rate assumed by tuning before a node has observed enough
    /// evictions of its own.
    pub gamma_bootstrap: f64,
    /// Rounds of history behind the online rate estimates.
    pub estimate_window: usize,
    /// EMA weight of the newest degree observation.
    pub degree_alpha: f64,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            buffer_capacity: 5,
            tau_s: 10.0,
            removal: RemovalPolicy::BufferOnly,
            sis_mode: false,
            gamma_bootstrap: 0.05,
            estimate_window: 50,
            degree_alpha: 0.2,
        }
    }
}

impl ProtocolConfig {
    fn validate(&self) -> Result<(), ProtocolError> {
        if self.buffer_capacity == 0 {
            return Err(ProtocolError::InvalidConfig(
                "buffer_capacity must be >= 1".into(),
            ));
        }
        if !(self.tau_s > 0.0) {
            return Err(ProtocolError::InvalidConfig(format!(
                "tau_s must be > 0, got {}",
                self.tau_s
            )));
        }
        if let RemovalPolicy::Stochastic { gamma } = self.removal {
            if !(0.0..=1.0).contains(&gamma) {
                return Err(ProtocolError::InvalidConfig(format!(
                    "stochastic removal gamma must lie in [0, 1], got {gamma}"
                )));
            }
        }
        if self.gamma_bootstrap < 0.0 {
            return Err(ProtocolError::InvalidConfig(
                "gamma_bootstrap must be >= 0".into(),
            ));
        }
        if self.estimate_window == 0 {
            return Err(ProtocolError::InvalidConfig(
                "estimate_window must be >= 1".into(),
            ));
        }
        if !(self.degree_alpha > 0.0) || self.degree_alpha > 1.0 {
            return Err(ProtocolError::InvalidConfig(
                "degree_alpha must lie in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Immutable description of an injected message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Message {
    pub id: MessageId,
    /// Per-copy store probability stamped at injection.
    pub infectivity: f64,
    pub origin: NodeId,
    pub payload_len: u32,
    pub injected_round: u64,
    /// Last round the message participates in; it leaves all buffers at the
    /// end of this round.
    pub expiry_round: u64,
    /// Tuning outcome when the message was injected through [`World::epcast`]
    /// (`None` for fixed-probability injections).
    pub tune: Option<TuneResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Broadcast,
    Store,
    RejectSeen,
    Evict,
    Expire,
}

/// One protocol event. `detail` carries event-specific context (the storing
/// sender count, what triggered an eviction).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Event {
    pub round: u64,
    pub kind: EventKind,
    pub node: NodeId,
    pub msg: MessageId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Per-message activity of one round.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MessageRoundStats {
    pub broadcasts: u64,
    pub stores: u64,
    pub evictions: u64,
    pub expiries: u64,
    /// Hosts that have ever stored the message, cumulative.
    pub reached: u32,
}

/// What happened in one round, per live message (indexed by message id).
#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    pub round: u64,
    pub per_message: Vec<MessageRoundStats>,
}

/// Online estimates for one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    /// EMA of observed contact counts; the bootstrap before any observation
    /// is the node's current snapshot degree.
    pub degree: f64,
    /// Evictions per message-round held over the window; the configured
    /// bootstrap until at least 10 message-rounds were observed.
    pub gamma: f64,
    /// Message-rounds backing the gamma estimate.
    pub observed_message_rounds: u64,
}

#[derive(Debug, Clone)]
struct NodeState {
    buffer: VecDeque<MessageId>,
    seen: HashSet<MessageId>,
    degree_est: Option<f64>,
    /// Per-round (evictions, message-rounds-held) history, newest at back.
    history: VecDeque<(u32, u32)>,
    rng: ChaCha12Rng,
}

/// One simulation world: hosts, their buffers, and the event record.
#[derive(Debug)]
pub struct World {
    config: ProtocolConfig,
    round: u64,
    nodes: Vec<NodeState>,
    messages: Vec<Message>,
    contacts: Option<ContactSnapshot>,
    min_degree_est: Option<f64>,
    events: Vec<Event>,
    /// Online per-message counters, kept in lockstep with the event log.
    broadcast_totals: Vec<u64>,
    reached_counts: Vec<u32>,
    live_counts: Vec<bool>,
    /// Evictions per node since the last round's bookkeeping; injections
    /// between rounds accrue here too, so overflow they cause is attributed
    /// to the following round.
    current_evictions: Vec<u32>,
}

impl World {
    pub fn new(node_count: usize, config: ProtocolConfig, seed: u64) -> Result<Self, ProtocolError> {
        config.validate()?;
        let nodes = (0..node_count)
            .map(|id| NodeState {
                buffer: VecDeque::with_capacity(config.buffer_capacity),
                seen: HashSet::new(),
                degree_est: None,
                history: VecDeque::with_capacity(config.estimate_window),
                rng: rng::stream(seed, role::PROTOCOL, id as u64),
            })
            .collect();
        Ok(World {
            config,
            round: 0,
            nodes,
            messages: Vec::new(),
            contacts: None,
            min_degree_est: None,
            events: Vec::new(),
            broadcast_totals: Vec::new(),
            reached_counts: Vec::new(),
            live_counts: Vec::new(),
            current_evictions: vec![0; node_count],
        })
    }

    #[must_use]
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    #[must_use]
    pub fn round(&self) -> u64 {
        self.round
    }

    #[must_use]
    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    #[must_use]
    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    #[must_use]
    pub fn message(&self, id: MessageId) -> Option<&Message> {
        self.messages.get(id as usize)
    }

    /// Append-only record of everything that happened.
    #[must_use]
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Consumes the world, keeping only its event log.
    #[must_use]
    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    /// Messages still buffered somewhere and not expired.
    #[must_use]
    pub fn live_message_count(&self) -> usize {
        self.live_counts.iter().filter(|&&l| l).count()
    }

    /// Hosts that have ever stored `msg`.
    #[must_use]
    pub fn reached_count(&self, msg: MessageId) -> u32 {
        self.reached_counts[msg as usize]
    }

    /// Broadcasts of `msg` so far (online counter).
    #[must_use]
    pub fn broadcast_total(&self, msg: MessageId) -> u64 {
        self.broadcast_totals[msg as usize]
    }

    #[must_use]
    pub fn is_buffered(&self, node: NodeId, msg: MessageId) -> bool {
        self.nodes[node as usize].buffer.contains(&msg)
    }

    #[must_use]
    pub fn has_seen(&self, node: NodeId, msg: MessageId) -> bool {
        self.nodes[node as usize].seen.contains(&msg)
    }

    #[must_use]
    pub fn buffer_len(&self, node: NodeId) -> usize {
        self.nodes[node as usize].buffer.len()
    }

    /// Installs the contact snapshot the next round will run against.
    pub fn set_contacts(&mut self, snapshot: ContactSnapshot) -> Result<(), ProtocolError> {
        if snapshot.node_count() != self.nodes.len() {
            return Err(ProtocolError::InvalidConfig(format!(
                "snapshot covers {} nodes, world has {}",
                snapshot.node_count(),
                self.nodes.len()
            )));
        }
        self.contacts = Some(snapshot);
        Ok(())
    }

    /// Online rate estimates for `node` over up to `window` recent rounds.
    pub fn estimate_rates(&self, node: NodeId, window: usize) -> Result<RateEstimate, ProtocolError> {
        let state = self
            .nodes
            .get(node as usize)
            .ok_or(ProtocolError::UnknownNode(node))?;
        let degree = state.degree_est.unwrap_or_else(|| {
            self.contacts
                .as_ref()
                .map(|c| c.degree(node) as f64)
                .unwrap_or(0.0)
        });
        let mut evictions = 0u64;
        let mut held = 0u64;
        for &(e, h) in state.history.iter().rev().take(window) {
            evictions += e as u64;
            held += h as u64;
        }
        let gamma = if held >= 10 {
            evictions as f64 / held as f64
        } else {
            self.config.gamma_bootstrap
        };
        Ok(RateEstimate {
            degree,
            gamma,
            observed_message_rounds: held,
        })
    }

    /// Current lower-bound degree estimate across the population (EMA of the
    /// per-round minimum over nodes with at least one contact).
    #[must_use]
    pub fn min_degree_estimate(&self) -> Option<f64> {
        self.min_degree_est
    }

    fn check_injection(
        &self,
        origin: NodeId,
        infectivity: f64,
        deadline_s: f64,
    ) -> Result<u64, ProtocolError> {
        if origin as usize >= self.nodes.len() {
            return Err(ProtocolError::UnknownNode(origin));
        }
        debug_assert!((0.0..=1.0).contains(&infectivity));
        let deadline_rounds = (deadline_s / self.config.tau_s).floor();
        if deadline_rounds < 1.0 {
            return Err(ProtocolError::DeadlineTooShort {
                deadline_s,
                tau_s: self.config.tau_s,
            });
        }
        Ok(deadline_rounds as u64)
    }

    /// Injects a message with an explicitly chosen store probability —
    /// the untuned flooding path, also used by the tuned path once the
    /// probability is known.
    pub fn inject_with_lambda(
        &mut self,
        origin: NodeId,
        payload_len: u32,
        infectivity: f64,
        deadline_s: f64,
    ) -> Result<MessageId, ProtocolError> {
        if !(0.0..=1.0).contains(&infectivity) {
            return Err(ProtocolError::InvalidConfig(format!(
                "infectivity must lie in [0, 1], got {infectivity}"
            )));
        }
        let deadline_rounds = self.check_injection(origin, infectivity, deadline_s)?;
        self.admit(origin, payload_len, infectivity, deadline_rounds, None)
    }

    /// Tunes the store probability for `target_fraction` reach within
    /// `deadline_s`, then injects. Tuning inverts the infection model at the
    /// origin's current degree and removal estimates. An infeasible target
    /// falls back to flooding at probability 1.
    pub fn epcast(
        &mut self,
        origin: NodeId,
        payload_len: u32,
        target_fraction: f64,
        deadline_s: f64,
    ) -> Result<MessageId, ProtocolError> {
        self.epcast_inner(origin, payload_len, target_fraction, deadline_s, false)
    }

    /// Like [`World::epcast`], but tunes against the population's minimum
    /// observed degree instead of the origin's own — the reach target then
    /// extends to the worst-connected hosts, at a higher transmission cost.
    pub fn epcast_heterogeneous(
        &mut self,
        origin: NodeId,
        payload_len: u32,
        target_fraction: f64,
        deadline_s: f64,
    ) -> Result<MessageId, ProtocolError> {
        self.epcast_inner(origin, payload_len, target_fraction, deadline_s, true)
    }

    fn epcast_inner(
        &mut self,
        origin: NodeId,
        payload_len: u32,
        target_fraction: f64,
        deadline_s: f64,
        heterogeneous: bool,
    ) -> Result<MessageId, ProtocolError> {
        let n = self.nodes.len() as f64;
        if !(target_fraction >= 1.0 / n && target_fraction <= 1.0) {
            return Err(ProtocolError::InvalidTarget(target_fraction));
        }
        let deadline_rounds = self.check_injection(origin, 0.0, deadline_s)?;
        let rates = self.estimate_rates(origin, self.config.estimate_window)?;
        let degree = rates.degree.min(n - 1.0);

        let req = TuneRequest::new(
            self.nodes.len() as u32,
            degree,
            rates.gamma,
            deadline_rounds as f64,
            target_fraction,
        );
        let result = if heterogeneous {
            let k_min = self
                .min_degree_est
                .unwrap_or(degree)
                .min(degree);
            if k_min > 0.0 {
                tuner::tune_lambda_heterogeneous(&req, k_min)?
            } else {
                // No connectivity information at all: nothing can be
                // guaranteed, so flood.
                TuneResult {
                    lambda_star: 1.0,
                    achieved_fraction: 1.0 / n,
                    iterations: 0,
                    feasible: false,
                }
            }
        } else if degree > 0.0 {
            tuner::tune_lambda(&req)?
        } else {
            TuneResult {
                lambda_star: 1.0,
                achieved_fraction: 1.0 / n,
                iterations: 0,
                feasible: false,
            }
        };
        if !result.feasible {
            log::warn!(
                "target {target_fraction} unreachable within {deadline_rounds} rounds \
                 (best {:.4}); flooding at probability 1",
                result.achieved_fraction
            );
        }
        self.admit(origin, payload_len, result.lambda_star, deadline_rounds, Some(result))
    }

    fn admit(
        &mut self,
        origin: NodeId,
        payload_len: u32,
        infectivity: f64,
        deadline_rounds: u64,
        tune: Option<TuneResult>,
    ) -> Result<MessageId, ProtocolError> {
        let id = self.messages.len() as MessageId;
        self.messages.push(Message {
            id,
            infectivity,
            origin,
            payload_len,
            injected_round: self.round,
            expiry_round: self.round + deadline_rounds,
            tune,
        });
        self.broadcast_totals.push(0);
        self.reached_counts.push(0);
        self.live_counts.push(true);

        // The origin stores its own message: the single seed of the process.
        self.store(origin, id, "origin");
        Ok(id)
    }

    /// Puts `msg` into `node`'s buffer, evicting the FIFO head on overflow.
    fn store(&mut self, node: NodeId, msg: MessageId, detail: &str) {
        let round = self.round;
        let state = &mut self.nodes[node as usize];
        state.buffer.push_back(msg);
        if state.seen.insert(msg) {
            self.reached_counts[msg as usize] += 1;
        }
        self.events.push(Event {
            round,
            kind: EventKind::Store,
            node,
            msg,
            detail: Some(detail.to_string()),
        });
        if state.buffer.len() > self.config.buffer_capacity {
            let victim = state.buffer.pop_front().expect("overflowing buffer");
            self.current_evictions[node as usize] += 1;
            self.events.push(Event {
                round,
                kind: EventKind::Evict,
                node,
                msg: victim,
                detail: Some(format!("displaced_by:{msg}")),
            });
        }
    }

    /// Runs one protocol round against the installed contact snapshot.
    pub fn run_round(&mut self) -> Result<RoundReport, ProtocolError> {
        let contacts = self.contacts.as_ref().ok_or(ProtocolError::MissingSnapshot)?;
        let contacts = contacts.clone();
        self.round += 1;
        let round = self.round;
        let msg_count = self.messages.len();
        let mut stats = vec![MessageRoundStats::default(); msg_count];

        // Freeze round-start holder state: everything below reads from this,
        // so stores taking effect now cannot propagate further this round.
        let holders: Vec<Vec<MessageId>> = self
            .nodes
            .iter()
            .map(|s| s.buffer.iter().copied().collect())
            .collect();

        // Broadcasts: one per buffered message per holder, regardless of how
        // many contacts hear it.
        for (node, held) in holders.iter().enumerate() {
            for &msg in held {
                debug_assert!(round <= self.messages[msg as usize].expiry_round);
                self.broadcast_totals[msg as usize] += 1;
                stats[msg as usize].broadcasts += 1;
                self.events.push(Event {
                    round,
                    kind: EventKind::Broadcast,
                    node: node as NodeId,
                    msg,
                    detail: None,
                });
            }
        }

        // Receptions: per receiver, count incoming copies per message from
        // round-start holders among its contacts, then run one Bernoulli
        // trial per copy (receiver's own RNG stream, message ids ascending).
        let mut incoming: Vec<u32> = vec![0; msg_count];
        let mut touched: Vec<MessageId> = Vec::new();
        for receiver in 0..self.nodes.len() as NodeId {
            for &sender in contacts.neighbors(receiver) {
                for &msg in &holders[sender as usize] {
                    if incoming[msg as usize] == 0 {
                        touched.push(msg);
                    }
                    incoming[msg as usize] += 1;
                }
            }
            if touched.is_empty() {
                continue;
            }
            touched.sort_unstable();
            for &msg in &touched {
                let copies = incoming[msg as usize];
                incoming[msg as usize] = 0;
                let midx = msg as usize;

                // Duplicate suppression. With absorbing removal any host
                // that ever stored the message refuses it forever; in
                // reinfection mode only a currently buffered copy blocks a
                // new store.
                let currently_buffered = self.nodes[receiver as usize].buffer.contains(&msg);
                if self.config.sis_mode {
                    if currently_buffered {
                        continue;
                    }
                } else if self.nodes[receiver as usize].seen.contains(&msg) {
                    if !currently_buffered {
                        self.events.push(Event {
                            round,
                            kind: EventKind::RejectSeen,
                            node: receiver,
                            msg,
                            detail: Some(format!("copies:{copies}")),
                        });
                    }
                    continue;
                }

                let infectivity = self.messages[midx].infectivity;
                let state = &mut self.nodes[receiver as usize];
                let mut stored = false;
                for _ in 0..copies {
                    if state.rng.gen_bool(infectivity) {
                        stored = true;
                        break;
                    }
                }
                if stored {
                    self.store(receiver, msg, &format!("copies:{copies}"));
                    stats[midx].stores += 1;
                }
            }
            touched.clear();
        }

        // Stochastic removal: applies to copies that were present at round
        // start (they have broadcast at least once) and are still buffered.
        if let RemovalPolicy::Stochastic { gamma } = self.config.removal {
            if gamma > 0.0 {
                for node in 0..self.nodes.len() {
                    for &msg in &holders[node] {
                        let state = &mut self.nodes[node];
                        if !state.buffer.contains(&msg) {
                            continue;
                        }
                        if state.rng.gen_bool(gamma) {
                            state.buffer.retain(|&m| m != msg);
                            self.current_evictions[node] += 1;
                            self.events.push(Event {
                                round,
                                kind: EventKind::Evict,
                                node: node as NodeId,
                                msg,
                                detail: Some("removal_draw".to_string()),
                            });
                        }
                    }
                }
            }
        }

        // Expiry: messages whose last round this was leave every buffer.
        for msg in 0..msg_count {
            if self.messages[msg].expiry_round == round {
                for node in 0..self.nodes.len() {
                    let state = &mut self.nodes[node];
                    if state.buffer.contains(&(msg as MessageId)) {
                        state.buffer.retain(|&m| m != msg as MessageId);
                        stats[msg].expiries += 1;
                        self.events.push(Event {
                            round,
                            kind: EventKind::Expire,
                            node: node as NodeId,
                            msg: msg as MessageId,
                            detail: None,
                        });
                    }
                }
                self.live_counts[msg] = false;
            }
        }

        // Per-node estimate bookkeeping for this round.
        let window = self.config.estimate_window;
        let alpha = self.config.degree_alpha;
        for node in 0..self.nodes.len() {
            let observed = contacts.degree(node as NodeId) as f64;
            let state = &mut self.nodes[node];
            state.degree_est = Some(match state.degree_est {
                None => observed,
                Some(prev) => alpha * observed + (1.0 - alpha) * prev,
            });
            let held = holders[node].len() as u32;
            let evictions = std::mem::take(&mut self.current_evictions[node]);
            state.history.push_back((evictions, held));
            if state.history.len() > window {
                state.history.pop_front();
            }
        }
        if let Some(min_active) = contacts.min_active_degree() {
            let observed = min_active as f64;
            self.min_degree_est = Some(match self.min_degree_est {
                None => observed,
                Some(prev) => alpha * observed + (1.0 - alpha) * prev,
            });
        }

        // Eviction tallies per message for the report.
        for e in self.events.iter().rev() {
            if e.round != round {
                break;
            }
            if e.kind == EventKind::Evict {
                stats[e.msg as usize].evictions += 1;
            }
        }
        for (msg, st) in stats.iter_mut().enumerate() {
            st.reached = self.reached_counts[msg];
        }

        Ok(RoundReport {
            round,
            per_message: stats,
        })
    }
}

/// Streams the event log as JSON-lines, one event per line.
pub fn write_events_jsonl<W: Write>(events: &[Event], w: &mut W) -> io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut *w, e)?;
        writeln!(w)?;
    }
    Ok(())
}
