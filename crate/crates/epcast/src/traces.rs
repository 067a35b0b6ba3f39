//! Co-location trace ingestion.
//!
//! Input is a CSV of association sessions, `node_id,location_id,start_s,end_s`
//! (header required, times in epoch seconds). Time is cut into fixed slots;
//! within a slot, every node whose session overlaps the slot by a positive
//! amount counts as present at its location, and all nodes present at the
//! same location form a clique. The result is one contact snapshot per slot.

use crate::contact::{ContactSnapshot, NodeId};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },
    #[error("trace contains no usable records")]
    EmptyTrace,
    #[error("slot width must be > 0, got {0}")]
    InvalidSlot(f64),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One association session: `node_id` was at `location_id` during
/// `[start_s, end_s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColocationRecord {
    pub node_id: String,
    pub location_id: String,
    pub start_s: f64,
    pub end_s: f64,
}

impl ColocationRecord {
    #[must_use]
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// Contact snapshots indexed by time slot.
#[derive(Debug, Clone)]
pub struct TimeVaryingGraph {
    slot_s: f64,
    /// Absolute index of the first slot: slot `k` covers
    /// `[k * slot_s, (k + 1) * slot_s)`.
    first_slot: i64,
    node_labels: Vec<String>,
    snapshots: Vec<ContactSnapshot>,
    /// Nodes with at least one session overlapping each slot (present nodes
    /// may still be isolated if nobody shares their location).
    present_counts: Vec<usize>,
}

/// Per-slot connectivity summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotDegrees {
    pub slot: i64,
    pub start_s: f64,
    /// Mean degree over nodes with degree >= 1 (0.0 when none).
    pub mean_degree: f64,
    /// Minimum degree over nodes with degree >= 1 (0 when none).
    pub min_degree: usize,
    /// Nodes with at least one contact in this slot.
    pub active_count: usize,
    /// Nodes present in the slot but without any contact.
    pub isolated_present_count: usize,
}

impl TimeVaryingGraph {
    /// Assembles a graph directly from prebuilt snapshots (synthetic
    /// scenarios, tests). All nodes count as present in every slot.
    pub fn from_snapshots(
        slot_s: f64,
        first_slot: i64,
        node_labels: Vec<String>,
        snapshots: Vec<ContactSnapshot>,
    ) -> Result<Self, TraceError> {
        if !(slot_s > 0.0) {
            return Err(TraceError::InvalidSlot(slot_s));
        }
        if snapshots.is_empty() {
            return Err(TraceError::EmptyTrace);
        }
        let n = node_labels.len();
        assert!(
            snapshots.iter().all(|s| s.node_count() == n),
            "every snapshot must cover all {n} nodes"
        );
        let present_counts = vec![n; snapshots.len()];
        Ok(TimeVaryingGraph {
            slot_s,
            first_slot,
            node_labels,
            snapshots,
            present_counts,
        })
    }

    #[must_use]
    pub fn slot_s(&self) -> f64 {
        self.slot_s
    }

    #[must_use]
    pub fn slot_count(&self) -> usize {
        self.snapshots.len()
    }

    #[must_use]
    pub fn first_slot(&self) -> i64 {
        self.first_slot
    }

    #[must_use]
    pub fn node_count(&self) -> usize {
        self.node_labels.len()
    }

    #[must_use]
    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    /// Index of a node label, if it appears in the trace.
    #[must_use]
    pub fn node_index(&self, label: &str) -> Option<NodeId> {
        self.node_labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .ok()
            .map(|i| i as NodeId)
    }

    /// Snapshot of the `idx`-th slot (0-based within the trace window).
    #[must_use]
    pub fn snapshot(&self, idx: usize) -> &ContactSnapshot {
        &self.snapshots[idx]
    }

    /// Wall-clock start of the `idx`-th slot.
    #[must_use]
    pub fn slot_start_s(&self, idx: usize) -> f64 {
        (self.first_slot + idx as i64) as f64 * self.slot_s
    }

    /// Connectivity summary for every slot.
    #[must_use]
    pub fn degree_series(&self) -> Vec<SlotDegrees> {
        self.snapshots
            .iter()
            .enumerate()
            .map(|(idx, snap)| {
                let active: Vec<usize> = (0..snap.node_count())
                    .map(|v| snap.degree(v as NodeId))
                    .filter(|&d| d > 0)
                    .collect();
                let active_count = active.len();
                let mean_degree = if active_count == 0 {
                    0.0
                } else {
                    active.iter().sum::<usize>() as f64 / active_count as f64
                };
                SlotDegrees {
                    slot: self.first_slot + idx as i64,
                    start_s: self.slot_start_s(idx),
                    mean_degree,
                    min_degree: active.iter().copied().min().unwrap_or(0),
                    active_count,
                    isolated_present_count: self.present_counts[idx].saturating_sub(active_count),
                }
            })
            .collect()
    }

    /// Writes every slot's edges as CSV rows `slot,node_a,node_b` using the
    /// original node labels.
    pub fn write_slot_edges_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "slot,node_a,node_b")?;
        for (idx, snap) in self.snapshots.iter().enumerate() {
            let slot = self.first_slot + idx as i64;
            for (a, b) in snap.edges() {
                writeln!(
                    w,
                    "{slot},{},{}",
                    self.node_labels[a as usize], self.node_labels[b as usize]
                )?;
            }
        }
        Ok(())
    }
}

/// Parses the session CSV. The header row is mandatory; data rows must have
/// exactly four fields with `start_s < end_s`.
pub fn parse_colocation<R: Read>(reader: R) -> Result<Vec<ColocationRecord>, TraceError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| TraceError::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let parse_err = |msg: String| TraceError::Parse { line, msg };
        if row.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, got {}", row.len())));
        }
        let start_s: f64 = row[2]
            .parse()
            .map_err(|_| parse_err(format!("bad start_s {:?}", &row[2])))?;
        let end_s: f64 = row[3]
            .parse()
            .map_err(|_| parse_err(format!("bad end_s {:?}", &row[3])))?;
        if !start_s.is_finite() || !end_s.is_finite() || start_s >= end_s {
            return Err(parse_err(format!(
                "need start_s < end_s, got [{start_s}, {end_s})"
            )));
        }
        records.push(ColocationRecord {
            node_id: row[0].to_string(),
            location_id: row[1].to_string(),
            start_s,
            end_s,
        });
    }
    Ok(records)
}

/// Clips sessions to an observation window and drops the ones shorter than
/// `min_duration_s` after clipping (a session of exactly the minimum is
/// kept). `window` is `[start, end)` in epoch seconds.
pub fn filter_short_contacts(
    records: &[ColocationRecord],
    min_duration_s: f64,
    window: Option<(f64, f64)>,
) -> Vec<ColocationRecord> {
    records
        .iter()
        .filter_map(|r| {
            let (lo, hi) = window.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
            let start = r.start_s.max(lo);
            let end = r.end_s.min(hi);
            if end - start >= min_duration_s && end > start {
                Some(ColocationRecord {
                    start_s: start,
                    end_s: end,
                    ..r.clone()
                })
            } else {
                None
            }
        })
        .collect()
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

/// Builds the per-slot contact graph from parsed records.
pub fn build_graph(
    records: &[ColocationRecord],
    slot_s: f64,
) -> Result<TimeVaryingGraph, TraceError> {
    if !(slot_s > 0.0) || !slot_s.is_finite() {
        return Err(TraceError::InvalidSlot(slot_s));
    }
    if records.is_empty() {
        return Err(TraceError::EmptyTrace);
    }

    // Stable node indices: sorted unique labels, independent of record order.
    let mut node_labels: Vec<String> = records.iter().map(|r| r.node_id.clone()).collect();
    node_labels.sort_unstable();
    node_labels.dedup();
    let node_of = |label: &str| -> NodeId {
        node_labels
            .binary_search_by(|l| l.as_str().cmp(label))
            .unwrap() as NodeId
    };

    let first_slot = records
        .iter()
        .map(|r| (r.start_s / slot_s).floor() as i64)
        .min()
        .unwrap();
    let last_slot = records
        .iter()
        .map(|r| ((r.end_s / slot_s).ceil() as i64) - 1)
        .max()
        .unwrap();
    let slot_count = (last_slot - first_slot + 1) as usize;

    // Presence per (slot, location): which nodes overlap the slot there.
    let mut presence: Vec<BTreeMap<&str, Vec<NodeId>>> = vec![BTreeMap::new(); slot_count];
    for r in records {
        let node = node_of(&r.node_id);
        let lo = (r.start_s / slot_s).floor() as i64;
        let hi = ((r.end_s / slot_s).ceil() as i64) - 1;
        for slot in lo..=hi {
            let slot_start = slot as f64 * slot_s;
            if overlap(r.start_s, r.end_s, slot_start, slot_start + slot_s) > 0.0 {
                presence[(slot - first_slot) as usize]
                    .entry(r.location_id.as_str())
                    .or_default()
                    .push(node);
            }
        }
    }

    let n = node_labels.len();
    let mut snapshots = Vec::with_capacity(slot_count);
    let mut present_counts = Vec::with_capacity(slot_count);
    for by_location in &mut presence {
        let mut edges = Vec::new();
        let mut present = vec![false; n];
        for nodes in by_location.values_mut() {
            nodes.sort_unstable();
            nodes.dedup();
            for &v in nodes.iter() {
                present[v as usize] = true;
            }
            for (i, &a) in nodes.iter().enumerate() {
                for &b in &nodes[i + 1..] {
                    edges.push((a, b));
                }
            }
        }
        snapshots.push(ContactSnapshot::from_edges(n, edges));
        present_counts.push(present.iter().filter(|&&p| p).count());
    }

    Ok(TimeVaryingGraph {
        slot_s,
        first_slot,
        node_labels,
        snapshots,
        present_counts,
    })
}

/// Parses and builds in one step.
pub fn load_colocation<R: Read>(reader: R, slot_s: f64) -> Result<TimeVaryingGraph, TraceError> {
    load_colocation_with(reader, slot_s, |_| {})
}

/// Like [`load_colocation`], with a transform applied to the parsed records
/// before the graph is built. The hook is the place for dataset-specific
/// preprocessing such as collapsing several physical locations into one
/// logical meeting point, or window/duration filtering beyond
/// [`filter_short_contacts`]. No transform is applied by default.
pub fn load_colocation_with<R: Read>(
    reader: R,
    slot_s: f64,
    transform: impl FnOnce(&mut Vec<ColocationRecord>),
) -> Result<TimeVaryingGraph, TraceError> {
    let mut records = parse_colocation(reader)?;
    transform(&mut records);
    build_graph(&records, slot_s)
}

/// Convenience wrapper reading from a file path.
pub fn load_colocation_path(
    path: impl AsRef<Path>,
    slot_s: f64,
) -> Result<TimeVaryingGraph, TraceError> {
    load_colocation(File::open(path)?, slot_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn rec(node: &str, loc: &str, start: f64, end: f64) -> ColocationRecord {
        ColocationRecord {
            node_id: node.into(),
            location_id: loc.into(),
            start_s: start,
            end_s: end,
        }
    }

    /// Independent O(records^2 x slots) oracle: an edge exists in a slot iff
    /// both sessions share the location and each overlaps the slot by a
    /// positive amount.
    fn oracle_edges(records: &[ColocationRecord], slot_s: f64) -> BTreeSet<(i64, String, String)> {
        let mut out = BTreeSet::new();
        if records.is_empty() {
            return out;
        }
        let lo = records
            .iter()
            .map(|r| (r.start_s / slot_s).floor() as i64)
            .min()
            .unwrap();
        let hi = records
            .iter()
            .map(|r| ((r.end_s / slot_s).ceil() as i64) - 1)
            .max()
            .unwrap();
        for a in records {
            for b in records {
                if a.node_id >= b.node_id || a.location_id != b.location_id {
                    continue;
                }
                for slot in lo..=hi {
                    let s0 = slot as f64 * slot_s;
                    let s1 = s0 + slot_s;
                    if overlap(a.start_s, a.end_s, s0, s1) > 0.0
                        && overlap(b.start_s, b.end_s, s0, s1) > 0.0
                    {
                        out.insert((slot, a.node_id.clone(), b.node_id.clone()));
                    }
                }
            }
        }
        out
    }

    fn graph_edges(g: &TimeVaryingGraph) -> BTreeSet<(i64, String, String)> {
        let mut out = BTreeSet::new();
        for idx in 0..g.slot_count() {
            for (a, b) in g.snapshot(idx).edges() {
                let (la, lb) = (
                    g.node_labels()[a as usize].clone(),
                    g.node_labels()[b as usize].clone(),
                );
                let (la, lb) = if la < lb { (la, lb) } else { (lb, la) };
                out.insert((g.first_slot() + idx as i64, la, lb));
            }
        }
        out
    }

    #[test]
    fn overlapping_sessions_meet_in_exactly_one_slot() {
        // [0, 120) and [60, 180) share only [60, 120), which is slot 1.
        let records = vec![rec("a", "ap1", 0.0, 120.0), rec("b", "ap1", 60.0, 180.0)];
        let g = build_graph(&records, 60.0).unwrap();
        assert_eq!(g.first_slot(), 0);
        assert_eq!(g.slot_count(), 3);
        assert_eq!(g.snapshot(0).edge_count(), 0, "a is alone before b arrives");
        assert_eq!(g.snapshot(1).edge_count(), 1);
        assert_eq!(g.snapshot(2).edge_count(), 0, "a is gone by slot 2");
    }

    #[test]
    fn hand_worked_five_record_case() {
        let records = vec![
            rec("n1", "L1", 0.0, 150.0),   // slots 0, 1, 2
            rec("n2", "L1", 30.0, 90.0),   // slots 0, 1
            rec("n3", "L1", 130.0, 240.0), // slots 2, 3
            rec("n4", "L2", 0.0, 60.0),    // slot 0
            rec("n5", "L2", 10.0, 70.0),   // slots 0, 1
        ];
        let g = build_graph(&records, 60.0).unwrap();
        let expected: BTreeSet<(i64, String, String)> = [
            (0, "n1", "n2"),
            (0, "n4", "n5"),
            (1, "n1", "n2"),
            (2, "n1", "n3"),
        ]
        .iter()
        .map(|(s, a, b)| (*s, a.to_string(), b.to_string()))
        .collect();
        assert_eq!(graph_edges(&g), expected);
        assert_eq!(graph_edges(&g), oracle_edges(&records, 60.0));
    }

    #[test]
    fn filter_clips_then_drops_short_sessions() {
        let records = vec![
            rec("a", "L", 100.0, 140.0),  // 20 s left after clipping, dropped
            rec("b", "L", 120.0, 180.0),  // exactly 60 s, kept
            rec("c", "L", 0.0, 300.0),    // clipped by the window below
            rec("d", "L", 500.0, 700.0),  // outside the window entirely
            rec("e", "L", 380.0, 410.0),  // 30 s inside window, dropped
        ];
        let kept = filter_short_contacts(&records, 60.0, Some((120.0, 400.0)));
        let ids: Vec<&str> = kept.iter().map(|r| r.node_id.as_str()).collect();
        assert_eq!(ids, vec!["b", "c"]);
        let c = &kept[1];
        assert_eq!((c.start_s, c.end_s), (120.0, 300.0));

        // Idempotent: re-filtering the output changes nothing.
        let again = filter_short_contacts(&kept, 60.0, Some((120.0, 400.0)));
        assert_eq!(again, kept);
    }

    #[test]
    fn shared_location_forms_a_clique() {
        let mut records: Vec<ColocationRecord> = (0..4)
            .map(|i| rec(&format!("m{i}"), "hall", 0.0, 60.0))
            .collect();
        // Six more nodes that exist in a later slot but meet nobody.
        for i in 0..6 {
            records.push(rec(&format!("x{i}"), &format!("solo{i}"), 60.0, 120.0));
        }
        let g = build_graph(&records, 60.0).unwrap();
        assert_eq!(g.node_count(), 10);
        assert_eq!(g.snapshot(0).edge_count(), 6); // 4 * 3 / 2

        let series = g.degree_series();
        assert_eq!(series[0].mean_degree, 3.0);
        assert_eq!(series[0].min_degree, 3);
        assert_eq!(series[0].active_count, 4);
        assert_eq!(series[0].isolated_present_count, 0);
        assert_eq!(series[1].active_count, 0);
        assert_eq!(series[1].mean_degree, 0.0);
        assert_eq!(series[1].isolated_present_count, 6);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(build_graph(&[], 60.0), Err(TraceError::EmptyTrace)));
        let csv = "node_id,location_id,start_s,end_s\n";
        assert!(matches!(
            load_colocation(csv.as_bytes(), 60.0),
            Err(TraceError::EmptyTrace)
        ));
        assert!(matches!(
            build_graph(&[rec("a", "L", 0.0, 10.0)], 0.0),
            Err(TraceError::InvalidSlot(_))
        ));
    }

    #[test]
    fn parse_reports_the_offending_line() {
        let csv = "node_id,location_id,start_s,end_s\n\
                   a,L1,0,100\n\
                   b,L1,oops,100\n";
        match parse_colocation(csv.as_bytes()) {
            Err(TraceError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }

        let reversed = "node_id,location_id,start_s,end_s\n\
                        a,L1,100,100\n";
        assert!(matches!(
            parse_colocation(reversed.as_bytes()),
            Err(TraceError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn round_trip_through_csv_text() {
        let csv = "node_id,location_id,start_s,end_s\n\
                   aa:bb,ap7,1082530800,1082530920\n\
                   cc:dd,ap7,1082530860,1082530980\n";
        let g = load_colocation(csv.as_bytes(), 60.0).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.node_index("aa:bb"), Some(0));
        assert_eq!(g.node_index("zz:zz"), None);
        let total: usize = (0..g.slot_count()).map(|i| g.snapshot(i).edge_count()).sum();
        assert!(total >= 1);

        let mut buf = Vec::new();
        g.write_slot_edges_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("slot,node_a,node_b\n"));
        assert!(text.contains("aa:bb,cc:dd"));
    }

    #[test]
    fn transform_hook_can_merge_locations() {
        let records = "node_id,location_id,start_s,end_s\n\
                       a,room1,0,60\n\
                       b,room2,0,60\n";
        let separate = load_colocation(records.as_bytes(), 60.0).unwrap();
        assert_eq!(separate.snapshot(0).edge_count(), 0);

        let merged = load_colocation_with(records.as_bytes(), 60.0, |recs| {
            for r in recs.iter_mut() {
                r.location_id = "building".into();
            }
        })
        .unwrap();
        assert_eq!(merged.snapshot(0).edge_count(), 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn matches_brute_force_oracle(
            raw in proptest::collection::vec(
                (0u8..6, 0u8..3, 0u32..540, 1u32..300),
                1..20,
            )
        ) {
            let records: Vec<ColocationRecord> = raw
                .iter()
                .map(|&(node, loc, start, len)| rec(
                    &format!("n{node}"),
                    &format!("L{loc}"),
                    start as f64,
                    (start + len) as f64,
                ))
                .collect();
            let g = build_graph(&records, 60.0).unwrap();
            prop_assert_eq!(graph_edges(&g), oracle_edges(&records, 60.0));
        }
    }
}
