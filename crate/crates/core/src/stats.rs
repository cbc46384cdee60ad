use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Counters and space figures of one traversal, serialized as the stats JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct TraversalStats {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// `succinct`, `classical`, or `fallback` (classical run chosen for small n).
    pub mode: String,
    pub levels: usize,
    pub iseg_sizes: Vec<usize>,
    pub edges: u64,
    pub peak_bits: u64,
    pub bits_per_vertex: f64,
    pub neighbor_reads: u64,
    /// Per level, index 0 is level 1.
    pub restore_full: Vec<u64>,
    pub restore_empty: Vec<u64>,
    pub dict_ops: u64,
    /// Longest group scan per restored level.
    pub max_scan: Vec<usize>,
    pub scan_violations: u64,
    pub steps: u64,
    pub meter: BTreeMap<String, u64>,
}

impl TraversalStats {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// `neighbor_reads / (m + n * levels)`.
    pub fn reads_ratio(&self) -> f64 {
        self.neighbor_reads as f64 / (self.m as f64 + self.n as f64 * self.levels.max(1) as f64)
    }
}
