//! Storage of one level: its window of the stack and its trailer stack.

use crate::dict::SuccinctDict;
use crate::error::{Error, Result};
use crate::meter::{PackedArray, SpaceMeter};

#[derive(Debug)]
pub(crate) enum Store {
    /// Level 1: explicit `(vertex, next)` pairs addressed by position modulo `cap`.
    Ring { vertex: PackedArray, next: PackedArray, cap: usize },
    /// Higher levels: vertex keyed, satellite `(seg << grp_bits) | group`.
    Dict(SuccinctDict),
}

#[derive(Debug)]
pub(crate) struct Level {
    pub(crate) s: usize,
    pub(crate) low: usize,
    /// Stack height as seen by this level.
    pub(crate) depth: usize,
    /// Window holds positions `lo..depth`; always a multiple of `s`.
    pub(crate) lo: usize,
    pub(crate) store: Store,
    pub(crate) grp_bits: u32,
    trail_v: PackedArray,
    trail_n: PackedArray,
    trail_len: usize,
    pub(crate) inserts: u64,
    pub(crate) full_restores: u64,
    pub(crate) empty_restores: u64,
}

impl Level {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new(
        meter: &SpaceMeter,
        idx: usize,
        n: usize,
        s: usize,
        cap: usize,
        low: usize,
        vertex_bits: u32,
        next_bits: u32,
        sat: Option<(u32, u32, u64)>,
    ) -> Level {
        let store = match sat {
            None => Store::Ring {
                vertex: meter.alloc("S_1", cap, vertex_bits),
                next: meter.alloc("S_1", cap, next_bits),
                cap,
            },
            Some((seg_bits, grp_bits, seed)) => {
                Store::Dict(SuccinctDict::new(meter, &format!("S_{idx}"), n, cap, seg_bits + grp_bits, seed))
            }
        };
        let trail_cap = n.div_ceil(s) + 2;
        let label = format!("T_{idx}");
        Level {
            s,
            low,
            depth: 0,
            lo: 0,
            store,
            grp_bits: sat.map_or(0, |s| s.1),
            trail_v: meter.alloc(&label, trail_cap, vertex_bits),
            trail_n: meter.alloc(&label, trail_cap, next_bits),
            trail_len: 0,
            inserts: 0,
            full_restores: 0,
            empty_restores: 0,
        }
    }

    /// Whether stack position `p` carries a trailer: the bottom or an i-segment top.
    pub(crate) fn is_trailer_pos(&self, p: usize) -> bool {
        p == 0 || (p + 1).is_multiple_of(self.s)
    }

    pub(crate) fn trailer_push(&mut self, level: usize, v: usize, next: usize) -> Result<()> {
        if self.trail_len == self.trail_v.len() {
            return Err(Error::InvariantViolation { level, step: 0, msg: "trailer stack full".into() });
        }
        self.trail_v.set_raw(self.trail_len, v as u64);
        self.trail_n.set_raw(self.trail_len, next as u64);
        self.trail_len += 1;
        Ok(())
    }

    pub(crate) fn trailer_pop(&mut self, level: usize) -> Result<()> {
        if self.trail_len == 0 {
            return Err(Error::TrailerUnderflow { level });
        }
        self.trail_len -= 1;
        Ok(())
    }

    pub(crate) fn trailer_len(&self) -> usize {
        self.trail_len
    }

    pub(crate) fn trailer(&self, level: usize, k: usize) -> Result<(usize, usize)> {
        if k >= self.trail_len {
            return Err(Error::TrailerUnderflow { level });
        }
        Ok((self.trail_v.get_raw(k) as usize, self.trail_n.get_raw(k) as usize))
    }

    pub(crate) fn pack(&self, seg: u64, grp: u64) -> u64 {
        (seg << self.grp_bits) | grp
    }

    pub(crate) fn unpack(&self, sat: u64) -> (u64, u64) {
        (sat >> self.grp_bits, sat & ((1u64 << self.grp_bits) - 1))
    }

    pub(crate) fn ring_put(&mut self, p: usize, v: usize, next: usize) {
        if let Store::Ring { vertex, next: nx, cap } = &mut self.store {
            vertex.set_raw(p % *cap, v as u64);
            nx.set_raw(p % *cap, next as u64);
        }
    }

    pub(crate) fn ring_get(&self, p: usize) -> (usize, usize) {
        match &self.store {
            Store::Ring { vertex, next, cap } => (vertex.get_raw(p % cap) as usize, next.get_raw(p % cap) as usize),
            Store::Dict(_) => unreachable!("ring access on a dictionary level"),
        }
    }

    pub(crate) fn dict(&self) -> Option<&SuccinctDict> {
        match &self.store {
            Store::Dict(d) => Some(d),
            Store::Ring { .. } => None,
        }
    }

    pub(crate) fn dict_mut(&mut self) -> Option<&mut SuccinctDict> {
        match &mut self.store {
            Store::Dict(d) => Some(d),
            Store::Ring { .. } => None,
        }
    }
}
