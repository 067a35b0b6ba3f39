//! Undirected contact graphs frozen for one protocol round.
//!
//! A snapshot is immutable once built: both the mobility sampler and the
//! trace loader produce one per round/slot, and the protocol engine reads
//! neighbour sets out of it without ever mutating them.

use std::io::{self, Write};

/// Node identifier inside one simulation world (dense, 0-based).
pub type NodeId = u32;

/// Symmetric contact graph over `node_count` nodes, valid for one round.
///
/// Adjacency lists are kept sorted so that every iteration order derived
/// from a snapshot is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactSnapshot {
    node_count: usize,
    neighbors: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl ContactSnapshot {
    /// Builds a snapshot from an edge iterator. Self-loops are ignored and
    /// duplicate edges collapse into one.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut neighbors = vec![Vec::new(); node_count];
        for (a, b) in edges {
            let (a, b) = (a as usize, b as usize);
            if a == b || a >= node_count || b >= node_count {
                continue;
            }
            neighbors[a].push(b as NodeId);
            neighbors[b].push(a as NodeId);
        }
        let mut edge_count = 0;
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        ContactSnapshot {
            node_count,
            neighbors,
            edge_count: edge_count / 2,
        }
    }

    /// Complete graph on `node_count` nodes.
    pub fn complete(node_count: usize) -> Self {
        let neighbors = (0..node_count)
            .map(|v| {
                (0..node_count as NodeId)
                    .filter(|&u| u as usize != v)
                    .collect()
            })
            .collect();
        ContactSnapshot {
            node_count,
            neighbors,
            edge_count: node_count * node_count.saturating_sub(1) / 2,
        }
    }

    /// Graph with no edges.
    pub fn empty(node_count: usize) -> Self {
        ContactSnapshot {
            node_count,
            neighbors: vec![Vec::new(); node_count],
            edge_count: 0,
        }
    }

    #[must_use]
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbour list of `node`.
    #[must_use]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.neighbors[node as usize]
    }

    #[must_use]
    pub fn degree(&self, node: NodeId) -> usize {
        self.neighbors[node as usize].len()
    }

    /// Mean degree over all nodes (0 for an empty world).
    #[must_use]
    pub fn mean_degree(&self) -> f64 {
        if self.node_count == 0 {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / self.node_count as f64
    }

    /// Minimum degree over nodes that have at least one contact this round.
    /// Returns `None` when the snapshot has no edges at all.
    #[must_use]
    pub fn min_active_degree(&self) -> Option<usize> {
        self.neighbors
            .iter()
            .filter(|l| !l.is_empty())
            .map(|l| l.len())
            .min()
    }

    /// Number of nodes with no contact this round.
    #[must_use]
    pub fn isolated_count(&self) -> usize {
        self.neighbors.iter().filter(|l| l.is_empty()).count()
    }

    /// Iterates every undirected edge exactly once, in `(a, b)` order with
    /// `a < b`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.neighbors.iter().enumerate().flat_map(|(a, list)| {
            let a = a as NodeId;
            list.iter().copied().filter(move |&b| a < b).map(move |b| (a, b))
        })
    }

    /// Appends this snapshot's edges as CSV rows `t,node_a,node_b`.
    /// Callers emit the header once per file.
    pub fn write_edges_csv<W: Write>(&self, w: &mut W, t: f64) -> io::Result<()> {
        for (a, b) in self.edges() {
            writeln!(w, "{t},{a},{b}")?;
        }
        Ok(())
    }
}
