//! Window rebuilding.
//!
//! Below the top level a window is rebuilt one i-segment at a time from the
//! level above: starting from a trailer, each vertex's next pointer is the
//! first gray neighbor in its stored group that the level above places in the
//! same i-segment. Vertices already walked are whitened meanwhile, so neither
//! ancestors inside the segment nor self-loops can match; they are recolored
//! gray afterwards. The top level has nothing above it and replays the
//! component's DFS chain from its root instead.

use super::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum Dir {
    /// Bring the i-segment below the window back in.
    Fill,
    /// Drop the bottom i-segment of the window.
    Drain,
}

impl<'g> Hierarchy<'g> {
    /// `pending` is the vertex whose insert triggered the rebuild.
    pub(super) fn restore_full(&mut self, i: usize, pending: usize) -> Result<()> {
        let l = &mut self.lv[i - 1];
        l.full_restores += 1;
        let (lo, s) = (l.lo, l.s);
        if matches!(l.store, Store::Ring { .. }) {
            // The ring slots of the bottom segment are simply reused.
            l.lo += s;
            return Ok(());
        }
        if i == self.lv.len() {
            self.replay(i, lo, lo + s, Dir::Drain, pending)?;
        } else {
            self.walk(i, lo, Dir::Drain)?;
        }
        self.lv[i - 1].lo = lo + s;
        Ok(())
    }

    /// `pending` is the stack top about to be deleted.
    pub(super) fn restore_empty(&mut self, i: usize, pending: usize) -> Result<()> {
        let l = &mut self.lv[i - 1];
        l.empty_restores += 1;
        let (lo, s) = (l.lo, l.s);
        let a = lo - s;
        if i == self.lv.len() {
            self.replay(i, a, lo, Dir::Fill, pending)?;
        } else {
            self.walk(i, a, Dir::Fill)?;
        }
        self.lv[i - 1].lo = a;
        Ok(())
    }

    /// Walks stack positions `a..a + s` of level `i < L`.
    fn walk(&mut self, i: usize, a: usize, dir: Dir) -> Result<()> {
        let g = self.g;
        let s = self.lv[i - 1].s;
        let mut v = if a == 0 {
            self.lv[i - 1].trailer(i, 0)?.0
        } else {
            let (w, wn) = self.lv[i - 1].trailer(i, a / s)?;
            if wn < 2 || wn - 1 > g.degree_unchecked(w) {
                return Err(self.violation(i, format!("trailer ({w}, {wn}) has no child slot")));
            }
            g.neighbor_unchecked(w, wn - 1)
        };
        for p in a..a + s {
            self.colors.paint(v, Color::White);
            self.scratch.insert(v).map_err(|_| self.violation(i, format!("vertex {v} walked twice")))?;
            let (next, child) = if p + 1 == a + s {
                let (tv, tn) = self.lv[i - 1].trailer(i, (p + 1) / s)?;
                if tv != v {
                    return Err(self.violation(i, format!("walk reached {v} at segment top, trailer holds {tv}")));
                }
                (tn, 0)
            } else {
                self.locate_next(i, v, p)?
            };
            match dir {
                Dir::Fill if i == 1 => self.lv[0].ring_put(p, v, next),
                Dir::Fill => {
                    let sat = self.window_sat(i, p, v, next);
                    self.lv[i - 1].dict_mut().expect("dict level").insert(v, sat)?;
                }
                Dir::Drain => {
                    if self.lv[i - 1].dict_mut().expect("dict level").delete(v).is_err() {
                        return Err(self.violation(i, format!("walked vertex {v} missing from S_{i}")));
                    }
                }
            }
            v = child;
        }
        while let Ok(x) = self.scratch.find_any() {
            self.scratch.delete(x)?;
            self.colors.paint(x, Color::Gray);
        }
        Ok(())
    }

    /// `(next, child)` for the gray vertex `v` at position `p`, read off level `i + 1`.
    fn locate_next(&mut self, i: usize, v: usize, p: usize) -> Result<(usize, usize)> {
        let g = self.g;
        let want = (p / self.lv[i - 1].s) as u64;
        let deg = g.degree_unchecked(v);
        let (kind, grp) = {
            let up = &self.lv[i];
            let sat =
                up.dict().expect("dict level").lookup(v).ok_or(Error::MissingMirror { level: i + 1, vertex: v })?;
            let (seg, grp) = up.unpack(sat);
            if seg != want {
                return Err(
                    self.violation(i, format!("vertex {v} at position {p} mirrored in segment {seg}, expected {want}"))
                );
            }
            match self.table.classify(deg) {
                Some(j) if j <= i + 1 => {
                    let h = self.heavy[j].as_ref().expect("H_j").lookup(v);
                    (GroupKind::Heavy(j), h.ok_or(Error::MissingMirror { level: j, vertex: v })?)
                }
                _ => (GroupKind::Light(i + 1), grp),
            }
        };
        if grp == 0 {
            return Err(self.violation(i, format!("vertex {v} below the top has no group")));
        }
        let (start, len) = self
            .levels
            .group_range(kind, deg, grp as usize)
            .map_err(|_| self.violation(i, format!("group {grp} out of range for vertex {v}")))?;
        self.max_scan[i - 1] = self.max_scan[i - 1].max(len);
        if len > self.levels.scan_bound(i + 1) {
            self.scan_violations += 1;
        }
        let up = &self.lv[i];
        let dict = up.dict().expect("dict level");
        for k in start..start + len {
            let x = g.neighbor_unchecked(v, k);
            if self.colors.color(x) == Color::Gray && dict.lookup(x).is_some_and(|sx| up.unpack(sx).0 == want) {
                return Ok((k + 1, x));
            }
        }
        Err(Error::RestoreScanOverrun { level: i, vertex: v })
    }

    /// Rebuilds positions `from..to` of the top level by re-walking the
    /// component from its root.
    fn replay(&mut self, i: usize, from: usize, to: usize, dir: Dir, pending: usize) -> Result<()> {
        let g = self.g;
        let keep = self.colors.color(pending);
        for u in 1..=g.n() {
            if self.colors.color(u) == Color::Gray {
                self.colors.paint(u, Color::White);
            }
        }
        let d = self.lv[i - 1].depth;
        if to >= d {
            return Err(self.violation(i, format!("replay range ends at {to}, stack height {d}")));
        }
        let mut x = self.root;
        for p in 0..d {
            self.colors.paint(x, Color::Gray);
            let (next, child) = if p + 1 < d {
                let deg = g.degree_unchecked(x);
                let mut found = None;
                for k in 1..=deg {
                    let y = g.neighbor_unchecked(x, k);
                    if self.colors.color(y) == Color::White {
                        found = Some((k + 1, y));
                        break;
                    }
                }
                found.ok_or_else(|| self.violation(i, format!("replay lost the chain at {x}, position {p}")))?
            } else {
                (0, 0)
            };
            if (from..to).contains(&p) {
                match dir {
                    Dir::Fill if i == 1 => self.lv[0].ring_put(p, x, next),
                    Dir::Fill => {
                        let sat = self.window_sat(i, p, x, next);
                        self.lv[i - 1].dict_mut().expect("dict level").insert(x, sat)?;
                    }
                    Dir::Drain => {
                        if self.lv[i - 1].dict_mut().expect("dict level").delete(x).is_err() {
                            return Err(self.violation(i, format!("replayed vertex {x} missing from S_{i}")));
                        }
                    }
                }
            }
            x = child;
        }
        self.colors.paint(pending, keep);
        Ok(())
    }
}
