//! Metered working memory.
//!
//! Every working structure of the traversal is built from [`PackedArray`]s or
//! explicit scalar [`Charge`]s taken from one [`SpaceMeter`]. The meter keeps
//! the live total, the high-water mark and an allocation log, so the peak can
//! be audited after the fact.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use serde::Serialize;

use crate::error::{Error, Result};

/// Bits needed to store every value in `0..=max` (at least one).
pub fn bits_for(max: u64) -> u32 {
    (64 - max.leading_zeros()).max(1)
}

#[derive(Debug, Default)]
struct MeterState {
    current: u64,
    peak: u64,
    labels: BTreeMap<String, u64>,
    log: Vec<(String, i64)>,
}

/// Shared handle to one engine's workspace accounting.
#[derive(Debug, Clone, Default)]
pub struct SpaceMeter {
    state: Rc<RefCell<MeterState>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeterSnapshot {
    pub labels: BTreeMap<String, u64>,
    pub total_bits: u64,
    pub peak_bits: u64,
}

impl SpaceMeter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn current_bits(&self) -> u64 {
        self.state.borrow().current
    }

    pub fn peak_bits(&self) -> u64 {
        self.state.borrow().peak
    }

    /// Live bits per label.
    pub fn per_label(&self) -> BTreeMap<String, u64> {
        self.state.borrow().labels.clone()
    }

    /// Every allocation (+) and release (-) in order.
    pub fn log(&self) -> Vec<(String, i64)> {
        self.state.borrow().log.clone()
    }

    pub fn snapshot(&self) -> MeterSnapshot {
        let s = self.state.borrow();
        MeterSnapshot { labels: s.labels.clone(), total_bits: s.current, peak_bits: s.peak }
    }

    /// Charges `bits` under `label` until the returned guard is dropped.
    pub fn charge(&self, label: &str, bits: u64) -> Charge {
        {
            let mut s = self.state.borrow_mut();
            s.current += bits;
            s.peak = s.peak.max(s.current);
            *s.labels.entry(label.to_string()).or_default() += bits;
            s.log.push((label.to_string(), bits as i64));
        }
        Charge { meter: self.clone(), label: label.to_string(), bits }
    }

    fn release(&self, label: &str, bits: u64) {
        let mut s = self.state.borrow_mut();
        s.current -= bits;
        if let Some(b) = s.labels.get_mut(label) {
            *b -= bits;
            if *b == 0 {
                s.labels.remove(label);
            }
        }
        s.log.push((label.to_string(), -(bits as i64)));
    }

    /// Allocates a zeroed array of `len` cells of `width` bits.
    pub fn alloc(&self, label: &str, len: usize, width: u32) -> PackedArray {
        PackedArray::new(self, label, len, width)
    }
}

/// RAII accounting for a fixed number of bits.
#[derive(Debug)]
pub struct Charge {
    meter: SpaceMeter,
    label: String,
    bits: u64,
}

impl Charge {
    pub fn bits(&self) -> u64 {
        self.bits
    }
}

impl Drop for Charge {
    fn drop(&mut self) {
        self.meter.release(&self.label, self.bits);
    }
}

/// Fixed-length array of `width`-bit unsigned cells packed into 64-bit words.
#[derive(Debug)]
pub struct PackedArray {
    words: Vec<u64>,
    len: usize,
    width: u32,
    mask: u64,
    _charge: Charge,
}

impl PackedArray {
    fn new(meter: &SpaceMeter, label: &str, len: usize, width: u32) -> Self {
        assert!((1..=64).contains(&width), "packed width {width} outside 1..=64");
        let total = len as u64 * width as u64;
        let words = vec![0u64; total.div_ceil(64) as usize];
        let mask = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        PackedArray { words, len, width, mask, _charge: meter.charge(label, total) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn charged_bits(&self) -> u64 {
        self._charge.bits()
    }

    pub fn get(&self, i: usize) -> Result<u64> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange { index: i, limit: self.len });
        }
        Ok(self.get_raw(i))
    }

    pub fn set(&mut self, i: usize, value: u64) -> Result<()> {
        if i >= self.len {
            return Err(Error::IndexOutOfRange { index: i, limit: self.len });
        }
        if value & !self.mask != 0 {
            return Err(Error::ValueTooWide { value, width: self.width });
        }
        self.set_raw(i, value);
        Ok(())
    }

    #[inline]
    pub(crate) fn get_raw(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        let bit = i as u64 * self.width as u64;
        let (w, off) = ((bit / 64) as usize, (bit % 64) as u32);
        let lo = self.words[w] >> off;
        if off + self.width <= 64 {
            lo & self.mask
        } else {
            (lo | (self.words[w + 1] << (64 - off))) & self.mask
        }
    }

    #[inline]
    pub(crate) fn set_raw(&mut self, i: usize, value: u64) {
        debug_assert!(i < self.len && value & !self.mask == 0);
        let bit = i as u64 * self.width as u64;
        let (w, off) = ((bit / 64) as usize, (bit % 64) as u32);
        self.words[w] = (self.words[w] & !(self.mask << off)) | (value << off);
        if off + self.width > 64 {
            let spill = 64 - off;
            let hi_mask = self.mask >> spill;
            self.words[w + 1] = (self.words[w + 1] & !hi_mask) | (value >> spill);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    White = 0,
    Gray = 1,
    Black = 2,
}

/// Two bits per vertex, vertices `1..=n`.
#[derive(Debug)]
pub struct ColorArray {
    cells: PackedArray,
}

impl ColorArray {
    pub fn new(meter: &SpaceMeter, n: usize) -> Self {
        ColorArray { cells: meter.alloc("color", n, 2) }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn get(&self, v: usize) -> Result<Color> {
        if v == 0 || v > self.cells.len() {
            return Err(Error::IndexOutOfRange { index: v, limit: self.cells.len() });
        }
        Ok(self.color(v))
    }

    pub fn set(&mut self, v: usize, c: Color) -> Result<()> {
        if v == 0 || v > self.cells.len() {
            return Err(Error::IndexOutOfRange { index: v, limit: self.cells.len() });
        }
        self.paint(v, c);
        Ok(())
    }

    #[inline]
    pub(crate) fn color(&self, v: usize) -> Color {
        match self.cells.get_raw(v - 1) {
            0 => Color::White,
            1 => Color::Gray,
            2 => Color::Black,
            other => unreachable!("color cell holds {other}"),
        }
    }

    #[inline]
    pub(crate) fn paint(&mut self, v: usize, c: Color) {
        self.cells.set_raw(v - 1, c as u64);
    }
}
