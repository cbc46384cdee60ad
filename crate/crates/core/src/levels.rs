//! Arithmetic of the level hierarchy.
//!
//! All logarithms are integer: `LL_1 = ceil(log2 n)`, `LL_i = ceil(log2 LL_{i-1})`,
//! and `log* n` is the first `i` with `LL_i <= 2`. Levels are numbered from 1.
//! Degree thresholds use `M = max(m, n)` so sparse graphs never produce
//! oversized groups.

use crate::error::{Error, Result};
use crate::meter::{bits_for, PackedArray, SpaceMeter};

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// `LL_i` for `n >= 2`, `i >= 1`.
pub fn iterated_log(n: u64, i: usize) -> u64 {
    assert!(n >= 2 && i >= 1);
    let mut v = ceil_log2(n);
    for _ in 1..i {
        v = ceil_log2(v).max(1);
    }
    v
}

/// Number of levels; 1 for `n <= 4`.
pub fn log_star(n: u64) -> usize {
    let n = n.max(2);
    let mut i = 1;
    let mut v = ceil_log2(n);
    while v > 2 {
        v = ceil_log2(v);
        i += 1;
    }
    i
}

pub fn alpha(n: u64) -> u64 {
    iterated_log(n.max(2), log_star(n))
}

/// Which neighbor-group granularity a stored group number refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    /// Vertex light at level `i >= 2`: groups of `ceil(deg / LL_{i-1}^3)`.
    Light(usize),
    /// Vertex of heavy class `j >= 2`: unit groups for `j = 2`, else `ceil(deg / LL_{j-2}^3)`.
    Heavy(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelParams {
    pub level: usize,
    pub ll: u64,
    /// `ceil(n / LL_i^2)`, before clamping.
    pub nominal_iseg_size: usize,
    /// Effective i-segment length used by the engine.
    pub iseg_size: usize,
    pub cap: usize,
    pub low_water: usize,
    /// `floor(M * LL_{i-1}^2 / n)`; `None` at level 1 where everything is light.
    pub light_threshold: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Levels {
    n: usize,
    m_eff: u64,
    params: Vec<LevelParams>,
}

impl Levels {
    /// Sizes for `n` vertices and `m` adjacency slots.
    ///
    /// `widen_top` stretches the top window over the whole stack so the top
    /// level never has to be rebuilt. `overrides` pins `(level, iseg_size)`
    /// pairs; each must be at least 3 and leave room for the level below
    /// (`s_{i+1} >= 4 s_i + 4`).
    pub fn new(n: usize, m: usize, widen_top: bool, overrides: &[(usize, usize)]) -> Result<Levels> {
        let n = n.max(1);
        let nn = n.max(2) as u64;
        let count = log_star(nn);
        let m_eff = (m as u64).max(n as u64);
        for &(lvl, _) in overrides {
            if lvl == 0 || lvl > count {
                return Err(Error::bad_input(
                    None,
                    format!("window override for level {lvl}, but there are {count} levels"),
                ));
            }
        }
        let mut params: Vec<LevelParams> = Vec::with_capacity(count);
        for i in 1..=count {
            let ll = iterated_log(nn, i);
            let nominal = (n as u64).div_ceil(ll * ll) as usize;
            let floor = params.last().map_or(3, |p| (4 * p.iseg_size + 4).max(3));
            let pinned = overrides.iter().rev().find(|o| o.0 == i).map(|o| o.1);
            let iseg_size = match pinned {
                Some(s) if s < floor => {
                    return Err(Error::bad_input(
                        None,
                        format!("window override {i}:{s} below the minimum {floor} for that level"),
                    ));
                }
                Some(s) => s,
                None if widen_top && i == count => nominal.max(floor).max(n.div_ceil(2)),
                None => nominal.max(floor),
            };
            let light_threshold = (i >= 2).then(|| {
                let l = iterated_log(nn, i - 1);
                m_eff * l * l / n as u64
            });
            params.push(LevelParams {
                level: i,
                ll,
                nominal_iseg_size: nominal,
                iseg_size,
                cap: (2 * iseg_size).min(n),
                low_water: iseg_size.div_ceil(2),
                light_threshold,
            });
        }
        Ok(Levels { n, m_eff, params })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `max(m, n)`.
    pub fn m_eff(&self) -> u64 {
        self.m_eff
    }

    pub fn count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self, i: usize) -> &LevelParams {
        &self.params[i - 1]
    }

    pub fn all(&self) -> &[LevelParams] {
        &self.params
    }

    pub fn ll(&self, i: usize) -> u64 {
        self.params[i - 1].ll
    }

    pub fn iseg_size(&self, i: usize) -> usize {
        self.params[i - 1].iseg_size
    }

    pub fn cap(&self, i: usize) -> usize {
        self.params[i - 1].cap
    }

    pub fn low_water(&self, i: usize) -> usize {
        self.params[i - 1].low_water
    }

    /// Base segment length `ceil(n / LL_1^2)`.
    pub fn seg1_size(&self) -> usize {
        self.params[0].nominal_iseg_size
    }

    pub fn is_light(&self, i: usize, deg: usize) -> bool {
        if i == 1 {
            return true;
        }
        let l = self.ll(i - 1);
        (self.n as u64) * deg as u64 <= self.m_eff * l * l
    }

    /// Smallest level at which `deg` is not light, if any.
    pub fn heavy_class(&self, deg: usize) -> Option<usize> {
        (2..=self.count()).find(|&j| !self.is_light(j, deg))
    }

    /// Neighbor slots per group.
    pub fn group_size(&self, kind: GroupKind, deg: usize) -> usize {
        let l = match kind {
            GroupKind::Light(i) => {
                debug_assert!(i >= 2);
                self.ll(i - 1)
            }
            GroupKind::Heavy(2) => return 1,
            GroupKind::Heavy(j) => self.ll(j - 2),
        };
        (deg as u64).div_ceil(l * l * l).max(1) as usize
    }

    /// Largest group number `kind` can produce for any degree up to `max_deg`.
    pub fn max_group(&self, kind: GroupKind, max_deg: usize) -> u64 {
        let l = match kind {
            GroupKind::Light(i) => self.ll(i - 1),
            GroupKind::Heavy(2) => return max_deg as u64,
            GroupKind::Heavy(j) => self.ll(j - 2),
        };
        (l * l * l).min(max_deg as u64)
    }

    /// Group containing neighbor slot `pos` (1-based).
    pub fn group_of(&self, kind: GroupKind, deg: usize, pos: usize) -> Result<usize> {
        if pos == 0 || pos > deg {
            return Err(Error::IndexOutOfRange { index: pos, limit: deg });
        }
        Ok(pos.div_ceil(self.group_size(kind, deg)))
    }

    /// `(first slot, length)` of group `group`, truncated at `deg`.
    pub fn group_range(&self, kind: GroupKind, deg: usize, group: usize) -> Result<(usize, usize)> {
        let g = self.group_size(kind, deg);
        if group == 0 || (group - 1) * g >= deg {
            return Err(Error::IndexOutOfRange { index: group, limit: deg.div_ceil(g) });
        }
        let start = (group - 1) * g + 1;
        Ok((start, g.min(deg - start + 1)))
    }

    /// Longest group scan allowed when classification happened at level `i >= 2`:
    /// `1 + ceil(M / (n * LL_{i-1}))`.
    pub fn scan_bound(&self, i: usize) -> usize {
        let l = self.ll(i - 1);
        1 + self.m_eff.div_ceil(self.n as u64 * l) as usize
    }

    /// 1-based i-segment number of the slot with `depth` entries below it.
    pub fn seg_index(&self, i: usize, depth: usize) -> usize {
        depth / self.iseg_size(i) + 1
    }

    pub fn is_iseg_top(&self, i: usize, depth: usize) -> bool {
        (depth + 1).is_multiple_of(self.iseg_size(i))
    }

    pub fn is_bottom(depth: usize) -> bool {
        depth == 0
    }
}

/// One-probe heavy classification: cell `k = ceil(n * deg / M)` holds the class.
#[derive(Debug)]
pub struct HeavyClassTable {
    cells: PackedArray,
    n: u64,
    m_eff: u64,
    top_band: bool,
}

impl HeavyClassTable {
    pub fn new(meter: &SpaceMeter, levels: &Levels) -> Self {
        let l1 = levels.ll(1);
        let len = (l1 * l1 + 1) as usize;
        let mut cells = meter.alloc("heavy_table", len, bits_for(levels.count() as u64));
        // k lies in class j >= 3 iff LL_{j-1}^2 < k <= LL_{j-2}^2; class 2 is everything past the end.
        for j in 3..=levels.count() {
            let lo = levels.ll(j - 1).pow(2) as usize;
            let hi = levels.ll(j - 2).pow(2) as usize;
            for k in lo + 1..=hi {
                cells.set_raw(k, j as u64);
            }
        }
        let (n, m_eff) = (levels.n() as u64, levels.m_eff());
        HeavyClassTable { cells, n, m_eff, top_band: levels.count() >= 2 }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn classify(&self, deg: usize) -> Option<usize> {
        let k = (self.n * deg as u64).div_ceil(self.m_eff) as usize;
        if k >= self.cells.len() {
            return self.top_band.then_some(2);
        }
        let j = self.cells.get_raw(k);
        (j != 0).then_some(j as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterated_logs() {
        assert_eq!((1..=3).map(|i| iterated_log(1 << 16, i)).collect::<Vec<_>>(), [16, 4, 2]);
        assert_eq!((1..=4).map(|i| iterated_log(1 << 20, i)).collect::<Vec<_>>(), [20, 5, 3, 2]);
        assert_eq!(iterated_log(4, 1), 2);
        assert_eq!((log_star(1 << 16), alpha(1 << 16)), (3, 2));
        assert_eq!((log_star(1 << 20), alpha(1 << 20)), (4, 2));
        assert_eq!((log_star(4), alpha(4)), (1, 2));
        assert_eq!(log_star(2), 1);
        assert_eq!(log_star(1 << 17), 4);
    }

    #[test]
    fn nominal_sizes() {
        let l = Levels::new(1 << 20, 1 << 22, false, &[]).unwrap();
        assert_eq!(l.params(1).nominal_iseg_size, 2622);
        assert_eq!(l.params(2).nominal_iseg_size, 41944);
        let l = Levels::new(1 << 16, 1 << 18, false, &[]).unwrap();
        assert_eq!(l.params(3).nominal_iseg_size, 16384);
        assert_eq!(2 * l.params(3).nominal_iseg_size, 32768);
        let thresholds: Vec<_> = l.all().iter().map(|p| p.light_threshold).collect();
        assert_eq!(thresholds, [None, Some(1024), Some(64)]);
    }

    #[test]
    fn clamps_and_overrides() {
        let l = Levels::new(1 << 16, 1 << 18, true, &[]).unwrap();
        assert!(l.iseg_size(3) >= 1 << 15);
        assert_eq!(l.cap(3), 1 << 16);
        for i in 2..=l.count() {
            assert!(l.iseg_size(i) >= 4 * l.iseg_size(i - 1) + 4);
        }
        let l = Levels::new(1 << 16, 1 << 18, false, &[(1, 3), (2, 16), (3, 68)]).unwrap();
        assert_eq!([l.iseg_size(1), l.iseg_size(2), l.iseg_size(3)], [3, 16, 68]);
        assert!(Levels::new(1 << 16, 1 << 18, false, &[(1, 2)]).is_err());
        assert!(Levels::new(1 << 16, 1 << 18, false, &[(1, 4), (2, 19)]).is_err());
        assert!(Levels::new(1 << 16, 1 << 18, false, &[(4, 100)]).is_err());
        let tiny = Levels::new(1, 0, true, &[]).unwrap();
        assert_eq!((tiny.count(), tiny.cap(1)), (1, 1));
    }

    #[test]
    fn light_and_heavy_examples() {
        let l = Levels::new(1 << 16, 1 << 18, false, &[]).unwrap();
        assert!(l.is_light(2, 1000));
        assert!(!l.is_light(2, 2000));
        assert!(l.is_light(1, usize::MAX / (1 << 20)));
        assert_eq!(l.heavy_class(2000), Some(2));
        assert_eq!(l.heavy_class(100), Some(3));
        assert_eq!(l.heavy_class(10), None);
    }

    /// Band inequalities evaluated directly, without the threshold helpers.
    fn band_scan(n: u64, m_eff: u64, count: usize, deg: u64) -> Option<usize> {
        let ll = |i: usize| iterated_log(n.max(2), i);
        for j in 2..=count {
            let below = n * deg > m_eff * ll(j - 1).pow(2);
            let above = j == 2 || n * deg <= m_eff * ll(j - 2).pow(2);
            if below && above {
                return Some(j);
            }
        }
        None
    }

    #[test]
    fn partition_and_table_exhaustive() {
        for &(n, m) in &[(4096usize, 16384usize), (4096, 100), (3000, 12000), (2, 2), (17, 5), (65536, 1 << 18)] {
            let l = Levels::new(n, m, false, &[]).unwrap();
            let meter = SpaceMeter::new();
            let table = HeavyClassTable::new(&meter, &l);
            for deg in 0..=n.max(m) {
                let class = l.heavy_class(deg);
                assert_eq!(class, band_scan(n as u64, l.m_eff(), l.count(), deg as u64), "n={n} deg={deg}");
                assert_eq!(table.classify(deg), class, "table n={n} deg={deg}");
                for i in 1..=l.count() {
                    let heavy_here = class.is_some_and(|j| j <= i);
                    assert!(l.is_light(i, deg) ^ heavy_here, "partition n={n} i={i} deg={deg}");
                }
            }
        }
    }

    #[test]
    fn group_cover_exhaustive() {
        let l = Levels::new(1 << 16, 1 << 18, false, &[]).unwrap();
        for kind in [GroupKind::Light(2), GroupKind::Light(3), GroupKind::Heavy(2), GroupKind::Heavy(3)] {
            for deg in 1..=10_000usize {
                let mut next = 1;
                let mut group = 1;
                while next <= deg {
                    let (start, len) = l.group_range(kind, deg, group).unwrap();
                    assert_eq!(start, next);
                    for pos in start..start + len {
                        assert_eq!(l.group_of(kind, deg, pos).unwrap(), group);
                    }
                    assert!(group as u64 <= l.max_group(kind, deg));
                    next += len;
                    group += 1;
                }
                assert_eq!(next, deg + 1);
                assert!(l.group_range(kind, deg, group).is_err());
            }
        }
        assert!(l.group_of(GroupKind::Light(2), 5, 6).is_err());
        assert_eq!(l.group_of(GroupKind::Light(2), 1000, 57).unwrap(), 57);
        assert_eq!(l.group_size(GroupKind::Light(3), 64), 1);
        assert_eq!(l.group_of(GroupKind::Heavy(2), 5000, 5000).unwrap(), 5000);
    }

    #[test]
    fn group_size_within_scan_bound() {
        for &(n, m) in &[(4096usize, 16384usize), (1 << 16, 1 << 18), (1000, 0)] {
            let l = Levels::new(n, m, false, &[]).unwrap();
            for deg in 0..=m.max(n) {
                for i in 2..=l.count() {
                    let g = match l.heavy_class(deg) {
                        Some(j) if j <= i => l.group_size(GroupKind::Heavy(j), deg),
                        _ => l.group_size(GroupKind::Light(i), deg),
                    };
                    assert!(g <= l.scan_bound(i), "n={n} deg={deg} i={i} g={g}");
                }
            }
        }
    }

    #[test]
    fn segments() {
        let l = Levels::new(1 << 16, 1 << 18, false, &[(1, 4)]).unwrap();
        assert_eq!((0..4).map(|d| l.seg_index(1, d)).collect::<Vec<_>>(), [1, 1, 1, 1]);
        assert_eq!(l.seg_index(1, 4), 2);
        assert!(l.is_iseg_top(1, 3));
        assert!(!l.is_iseg_top(1, 4));
        assert!(Levels::is_bottom(0));
    }
}
