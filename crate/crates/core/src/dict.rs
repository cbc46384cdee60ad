//! Bit-metered dictionaries.
//!
//! [`SuccinctDict`] maps keys of a universe `1..=u` to `r`-bit satellites with
//! a fixed capacity. It is laid out either as a Robin Hood open-addressing
//! table over quotiented keys (a seeded bijection scrambles the key, its
//! scaled high part picks the home slot and only the offset within that
//! slot's key interval plus a short displacement is stored) or as a direct-indexed presence bitmap, whichever
//! charges fewer bits.
//!
//! [`EnumDict`] is a membership set over `1..=n` backed by a 64-ary summary
//! bitmap tree, giving constant-depth updates and enumeration proportional to
//! the number of members.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::meter::{bits_for, PackedArray, SpaceMeter};

const DISP_BITS: u32 = 5;
const MAX_DISP: u64 = (1 << DISP_BITS) - 2;

/// Charged bits never exceed `C_DICT * (cap * (ceil(log2(u / cap)) + r + 1) + 64)`.
pub const C_DICT: u64 = 24;
/// Charged bits never exceed `C_ENUM * n + 64 * C_ENUM * levels`.
pub const C_ENUM: u64 = 2;

fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// Space budget for a dictionary of the given shape.
pub fn dict_bound(universe: usize, cap: usize, sat_width: u32) -> u64 {
    let cap = cap.max(1) as u64;
    let ratio = (universe as u64).div_ceil(cap);
    C_DICT * (cap * (ceil_log2(ratio) + sat_width as u64 + 1) + 64)
}

#[derive(Debug)]
enum Layout {
    Direct {
        present: PackedArray,
    },
    Hashed {
        slots: usize,
        key_bits: u32,
        rem_bits: u32,
        /// 0 = empty, otherwise `(disp + 1) << rem_bits | remainder`.
        tags: PackedArray,
    },
}

#[derive(Debug)]
pub struct SuccinctDict {
    universe: usize,
    cap: usize,
    sat_width: u32,
    seed: u64,
    len: usize,
    layout: Layout,
    sats: Option<PackedArray>,
    ops: Cell<u64>,
}

impl SuccinctDict {
    pub fn new(meter: &SpaceMeter, label: &str, universe: usize, cap: usize, sat_width: u32, seed: u64) -> Self {
        assert!(sat_width <= 64, "satellite width {sat_width} > 64");
        let universe = universe.max(1);
        let cap = cap.min(universe);
        // Load factor at most 2/3 keeps Robin Hood displacements short.
        let slots = (cap + cap.div_ceil(2)).max(2);
        let key_bits = bits_for(universe as u64 - 1);
        let key_max = if key_bits == 64 { u64::MAX } else { (1u64 << key_bits) - 1 };
        let rem_bits = bits_for(key_max / slots as u64 + 1);
        let direct_bits = universe as u64 * (1 + sat_width as u64);
        let hashed_bits = slots as u64 * (DISP_BITS + rem_bits + sat_width) as u64;
        let (layout, slots) = if direct_bits <= hashed_bits {
            (Layout::Direct { present: meter.alloc(label, universe, 1) }, universe)
        } else {
            let tags = meter.alloc(label, slots, DISP_BITS + rem_bits);
            (Layout::Hashed { slots, key_bits, rem_bits, tags }, slots)
        };
        let sats = (sat_width > 0).then(|| meter.alloc(label, slots, sat_width));
        SuccinctDict { universe, cap, sat_width, seed, len: 0, layout, sats, ops: Cell::new(0) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn sat_width(&self) -> u32 {
        self.sat_width
    }

    pub fn is_direct(&self) -> bool {
        matches!(self.layout, Layout::Direct { .. })
    }

    pub fn charged_bits(&self) -> u64 {
        let table = match &self.layout {
            Layout::Direct { present } => present.charged_bits(),
            Layout::Hashed { tags, .. } => tags.charged_bits(),
        };
        table + self.sats.as_ref().map_or(0, |s| s.charged_bits())
    }

    /// Insert, delete and lookup calls made so far.
    pub fn ops(&self) -> u64 {
        self.ops.get()
    }

    fn check_key(&self, key: usize) -> Result<()> {
        if key == 0 || key > self.universe {
            Err(Error::IndexOutOfRange { index: key, limit: self.universe })
        } else {
            Ok(())
        }
    }

    fn check_sat(&self, sat: u64) -> Result<()> {
        if self.sat_width < 64 && sat >> self.sat_width != 0 {
            Err(Error::ValueTooWide { value: sat, width: self.sat_width })
        } else {
            Ok(())
        }
    }

    /// Seeded bijection on `key_bits`-bit integers.
    fn scramble(&self, key: usize, key_bits: u32) -> u64 {
        let mask = if key_bits == 64 { u64::MAX } else { (1u64 << key_bits) - 1 };
        let shift = key_bits.div_ceil(2).max(1);
        let mut x = ((key - 1) as u64 ^ self.seed) & mask;
        for mult in [0x9E37_79B9_7F4A_7C15u64, 0xBF58_476D_1CE4_E5B9, 0x94D0_49BB_1331_11EB] {
            x = x.wrapping_mul(mult | 1) & mask;
            x ^= x >> shift;
        }
        x
    }

    /// Home slot `floor(y * slots / 2^k)` and the offset of `y` within the
    /// keys sharing that home; the pair determines `key`.
    fn place(&self, key: usize, key_bits: u32, slots: usize) -> (usize, u64) {
        let y = self.scramble(key, key_bits) as u128;
        let home = (y * slots as u128) >> key_bits;
        let start = (home << key_bits).div_ceil(slots as u128);
        (home as usize, (y - start) as u64)
    }

    /// Returns the slot index holding `key`, if present.
    fn find_slot(&self, key: usize) -> Option<usize> {
        match &self.layout {
            Layout::Direct { present } => (present.get_raw(key - 1) == 1).then_some(key - 1),
            Layout::Hashed { slots, key_bits, rem_bits, tags } => {
                let (home, rem) = self.place(key, *key_bits, *slots);
                for d in 0..=MAX_DISP {
                    let pos = (home + d as usize) % slots;
                    let tag = tags.get_raw(pos);
                    if tag == 0 {
                        return None;
                    }
                    let slot_disp = (tag >> rem_bits) - 1;
                    if slot_disp < d {
                        return None;
                    }
                    if slot_disp == d && tag & ((1u64 << rem_bits) - 1) == rem {
                        return Some(pos);
                    }
                }
                None
            }
        }
    }

    pub fn lookup(&self, key: usize) -> Option<u64> {
        self.ops.set(self.ops.get() + 1);
        if self.check_key(key).is_err() {
            return None;
        }
        self.find_slot(key).map(|pos| self.sats.as_ref().map_or(0, |s| s.get_raw(pos)))
    }

    pub fn contains(&self, key: usize) -> bool {
        self.lookup(key).is_some()
    }

    pub fn insert(&mut self, key: usize, sat: u64) -> Result<()> {
        self.ops.set(self.ops.get() + 1);
        self.check_key(key)?;
        self.check_sat(sat)?;
        if self.find_slot(key).is_some() {
            return Err(Error::DuplicateKey(key));
        }
        if self.len == self.cap {
            return Err(Error::CapacityExceeded { cap: self.cap });
        }
        let pos = match &mut self.layout {
            Layout::Direct { present } => {
                present.set_raw(key - 1, 1);
                key - 1
            }
            Layout::Hashed { .. } => self.hashed_insert(key)?,
        };
        if let Some(s) = self.sats.as_mut() {
            s.set_raw(pos, sat);
        }
        self.len += 1;
        Ok(())
    }

    fn hashed_insert(&mut self, key: usize) -> Result<usize> {
        let Layout::Hashed { slots, key_bits, rem_bits, .. } = self.layout else { unreachable!() };
        let (home, rem) = self.place(key, key_bits, slots);
        let Layout::Hashed { tags, .. } = &mut self.layout else { unreachable!() };
        let disp_of = |tag: u64| (tag >> rem_bits) - 1;

        // Robin Hood position: first slot that is empty or whose occupant is
        // closer to its home than we are to ours.
        let mut d = 0u64;
        let mut pos = home;
        loop {
            let tag = tags.get_raw(pos);
            if tag == 0 || disp_of(tag) < d {
                break;
            }
            d += 1;
            if d > MAX_DISP {
                return Err(Error::DictOverflow(key));
            }
            pos = (pos + 1) % slots;
        }
        // Every occupant from `pos` to the next hole moves one slot right.
        let mut end = pos;
        let mut shifted = 0usize;
        while tags.get_raw(end) != 0 {
            if disp_of(tags.get_raw(end)) + 1 > MAX_DISP {
                return Err(Error::DictOverflow(key));
            }
            end = (end + 1) % slots;
            shifted += 1;
            if shifted >= slots {
                return Err(Error::DictOverflow(key));
            }
        }
        let mut cur = end;
        while cur != pos {
            let prev = (cur + slots - 1) % slots;
            let tag = tags.get_raw(prev);
            tags.set_raw(cur, tag + (1u64 << rem_bits));
            if let Some(s) = self.sats.as_mut() {
                let v = s.get_raw(prev);
                s.set_raw(cur, v);
            }
            cur = prev;
        }
        tags.set_raw(pos, ((d + 1) << rem_bits) | rem);
        Ok(pos)
    }

    /// Removes `key`, returning its satellite.
    pub fn delete(&mut self, key: usize) -> Result<u64> {
        self.ops.set(self.ops.get() + 1);
        self.check_key(key)?;
        let pos = self.find_slot(key).ok_or(Error::KeyAbsent(key))?;
        let sat = self.sats.as_ref().map_or(0, |s| s.get_raw(pos));
        match &mut self.layout {
            Layout::Direct { present } => present.set_raw(pos, 0),
            Layout::Hashed { slots, rem_bits, tags, .. } => {
                let mut hole = pos;
                loop {
                    let next = (hole + 1) % *slots;
                    let tag = tags.get_raw(next);
                    if tag == 0 || (tag >> *rem_bits) == 1 {
                        tags.set_raw(hole, 0);
                        break;
                    }
                    tags.set_raw(hole, tag - (1u64 << *rem_bits));
                    if let Some(s) = self.sats.as_mut() {
                        let v = s.get_raw(next);
                        s.set_raw(hole, v);
                    }
                    hole = next;
                }
            }
        }
        self.len -= 1;
        Ok(sat)
    }

    /// Overwrites the satellite of a present key.
    pub fn update(&mut self, key: usize, sat: u64) -> Result<()> {
        self.ops.set(self.ops.get() + 1);
        self.check_key(key)?;
        self.check_sat(sat)?;
        let pos = self.find_slot(key).ok_or(Error::KeyAbsent(key))?;
        if let Some(s) = self.sats.as_mut() {
            s.set_raw(pos, sat);
        }
        Ok(())
    }
}

/// Enumerable membership set over `1..=n`.
#[derive(Debug)]
pub struct EnumDict {
    n: usize,
    len: usize,
    /// `levels[0]` holds one bit per key; each higher level one bit per
    /// non-zero word of the level below.
    levels: Vec<PackedArray>,
    ops: Cell<u64>,
}

impl EnumDict {
    pub fn new(meter: &SpaceMeter, label: &str, n: usize) -> Self {
        let mut levels = Vec::new();
        let mut bits = n.max(1);
        loop {
            let words = bits.div_ceil(64);
            levels.push(meter.alloc(label, words, 64));
            if words == 1 {
                break;
            }
            bits = words;
        }
        EnumDict { n, len: 0, levels, ops: Cell::new(0) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> u64 {
        self.ops.get()
    }

    pub fn charged_bits(&self) -> u64 {
        self.levels.iter().map(|l| l.charged_bits()).sum()
    }

    pub fn bound(n: usize) -> u64 {
        let levels = (n.max(2) as f64).log(64.0).ceil() as u64 + 1;
        C_ENUM * n as u64 + 64 * C_ENUM * levels
    }

    fn check(&self, key: usize) -> Result<usize> {
        if key == 0 || key > self.n {
            Err(Error::IndexOutOfRange { index: key, limit: self.n })
        } else {
            Ok(key - 1)
        }
    }

    fn bit(&self, idx: usize) -> bool {
        self.levels[0].get_raw(idx / 64) >> (idx % 64) & 1 == 1
    }

    pub fn member(&self, key: usize) -> bool {
        self.ops.set(self.ops.get() + 1);
        self.check(key).is_ok_and(|idx| self.bit(idx))
    }

    pub fn insert(&mut self, key: usize) -> Result<()> {
        self.ops.set(self.ops.get() + 1);
        let mut idx = self.check(key)?;
        if self.bit(idx) {
            return Err(Error::DuplicateKey(key));
        }
        for level in self.levels.iter_mut() {
            let w = level.get_raw(idx / 64);
            level.set_raw(idx / 64, w | 1 << (idx % 64));
            if w != 0 {
                break;
            }
            idx /= 64;
        }
        self.len += 1;
        Ok(())
    }

    pub fn delete(&mut self, key: usize) -> Result<()> {
        self.ops.set(self.ops.get() + 1);
        let mut idx = self.check(key)?;
        if !self.bit(idx) {
            return Err(Error::KeyAbsent(key));
        }
        for level in self.levels.iter_mut() {
            let w = level.get_raw(idx / 64) & !(1 << (idx % 64));
            level.set_raw(idx / 64, w);
            if w != 0 {
                break;
            }
            idx /= 64;
        }
        self.len -= 1;
        Ok(())
    }

    pub fn find_any(&self) -> Result<usize> {
        self.ops.set(self.ops.get() + 1);
        if self.len == 0 {
            return Err(Error::EmptySet);
        }
        let mut idx = 0usize;
        for level in self.levels.iter().rev() {
            let w = level.get_raw(idx);
            idx = idx * 64 + w.trailing_zeros() as usize;
        }
        Ok(idx + 1)
    }

    /// Members in ascending order.
    pub fn enumerate(&self) -> Vec<usize> {
        self.ops.set(self.ops.get() + 1);
        let mut out = Vec::with_capacity(self.len);
        if self.len > 0 {
            self.collect(self.levels.len() - 1, 0, &mut out);
        }
        out
    }

    fn collect(&self, level: usize, word: usize, out: &mut Vec<usize>) {
        let mut w = self.levels[level].get_raw(word);
        while w != 0 {
            let child = word * 64 + w.trailing_zeros() as usize;
            if level == 0 {
                out.push(child + 1);
            } else {
                self.collect(level - 1, child, out);
            }
            w &= w - 1;
        }
    }

    /// Removes every member, returning them in ascending order.
    pub fn drain(&mut self) -> Vec<usize> {
        let members = self.enumerate();
        for &k in &members {
            let _ = self.delete(k);
        }
        members
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeSet, HashMap};

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basic_dict_contract() {
        let m = SpaceMeter::new();
        let mut d = SuccinctDict::new(&m, "d", 1000, 4, 3, 1);
        assert!(!d.is_direct());
        d.insert(5, 0b101).unwrap();
        assert_eq!(d.lookup(5), Some(0b101));
        assert_eq!(d.insert(5, 1), Err(Error::DuplicateKey(5)));
        for k in [6, 7, 8] {
            d.insert(k, 1).unwrap();
        }
        assert_eq!(d.insert(9, 1), Err(Error::CapacityExceeded { cap: 4 }));
        assert_eq!(d.delete(7), Ok(1));
        assert_eq!(d.lookup(7), None);
        assert_eq!(d.delete(7), Err(Error::KeyAbsent(7)));
        assert!(matches!(d.insert(3, 8), Err(Error::ValueTooWide { .. })));
        assert!(matches!(d.insert(0, 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn delete_on_empty() {
        let m = SpaceMeter::new();
        let mut d = SuccinctDict::new(&m, "d", 100, 10, 4, 9);
        assert_eq!(d.delete(9), Err(Error::KeyAbsent(9)));
        d.insert(7, 3).unwrap();
        assert_eq!(d.delete(7), Ok(3));
        assert_eq!(d.lookup(7), None);
    }

    fn replay(universe: usize, cap: usize, width: u32, seed: u64, ops: usize) {
        let meter = SpaceMeter::new();
        let mut d = SuccinctDict::new(&meter, "d", universe, cap, width, seed);
        let mut oracle: HashMap<usize, u64> = HashMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mask = match width {
            0 => 0,
            64 => u64::MAX,
            w => (1u64 << w) - 1,
        };
        for _ in 0..ops {
            let key = rng.gen_range(1..=universe);
            match rng.gen_range(0..3) {
                0 => {
                    let sat = rng.gen::<u64>() & mask;
                    let expect = if oracle.contains_key(&key) {
                        Err(Error::DuplicateKey(key))
                    } else if oracle.len() == d.capacity() {
                        Err(Error::CapacityExceeded { cap: d.capacity() })
                    } else {
                        oracle.insert(key, sat);
                        Ok(())
                    };
                    assert_eq!(d.insert(key, sat), expect);
                }
                1 => assert_eq!(d.delete(key).ok(), oracle.remove(&key)),
                _ => assert_eq!(d.lookup(key), oracle.get(&key).copied()),
            }
            assert_eq!(d.len(), oracle.len());
        }
        for (&k, &v) in &oracle {
            assert_eq!(d.lookup(k), Some(v));
        }
        assert!(d.charged_bits() <= dict_bound(universe, cap, width));
    }

    #[test]
    fn matches_map_oracle_hashed_and_direct() {
        replay(5000, 300, 7, 1, 60_000);
        replay(5000, 1200, 7, 2, 60_000);
        replay(5000, 4000, 0, 3, 60_000);
        replay(64, 5, 64, 4, 20_000);
        replay(1 << 20, 1000, 12, 5, 50_000);
        replay(1, 1, 1, 6, 100);
    }

    #[test]
    fn deterministic_layout() {
        let m = SpaceMeter::new();
        let build = |seed| {
            let mut d = SuccinctDict::new(&m, "d", 10_000, 100, 5, seed);
            for k in (1..=100).map(|k| k * 97) {
                d.insert(k, (k % 31) as u64).unwrap();
            }
            d
        };
        let (a, b) = (build(11), build(11));
        assert_eq!(a.charged_bits(), b.charged_bits());
        let Layout::Hashed { tags: ta, .. } = &a.layout else { panic!() };
        let Layout::Hashed { tags: tb, .. } = &b.layout else { panic!() };
        assert!((0..ta.len()).all(|i| ta.get_raw(i) == tb.get_raw(i)));
    }

    #[test]
    fn enum_dict_contract() {
        let m = SpaceMeter::new();
        let mut e = EnumDict::new(&m, "e", 10);
        for k in [2, 9, 4] {
            e.insert(k).unwrap();
        }
        assert_eq!(e.enumerate().into_iter().collect::<BTreeSet<_>>(), BTreeSet::from([2, 4, 9]));
        e.delete(9).unwrap();
        assert!(!e.member(9));
        assert_eq!(e.delete(9), Err(Error::KeyAbsent(9)));
        assert!(e.member(e.find_any().unwrap()));
        assert_eq!(e.drain(), vec![2, 4]);
        assert_eq!(e.find_any(), Err(Error::EmptySet));
        assert!(e.charged_bits() <= EnumDict::bound(10));
    }

    #[test]
    fn enum_dict_matches_bitset() {
        for n in [1usize, 63, 64, 65, 4097, 300_000] {
            let m = SpaceMeter::new();
            let mut e = EnumDict::new(&m, "e", n);
            let mut oracle = BTreeSet::new();
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for step in 0..20_000 {
                let k = rng.gen_range(1..=n);
                if rng.gen_bool(0.6) {
                    assert_eq!(e.insert(k).is_ok(), oracle.insert(k));
                } else {
                    assert_eq!(e.delete(k).is_ok(), oracle.remove(&k));
                }
                assert_eq!(e.member(k), oracle.contains(&k));
                if step % 997 == 0 {
                    assert_eq!(e.enumerate(), oracle.iter().copied().collect::<Vec<_>>());
                }
            }
            assert!(e.charged_bits() <= EnumDict::bound(n), "n={n}");
        }
    }
}
