//! Explicit-stack DFS with its stack and colors charged to the meter.

use super::RootOrder;
use crate::error::Result;
use crate::graph::Graph;
use crate::meter::{bits_for, Charge, Color, ColorArray, PackedArray, SpaceMeter};

pub(super) struct Classical<'g> {
    g: &'g Graph,
    colors: ColorArray,
    stack_v: PackedArray,
    stack_next: PackedArray,
    order: RootOrder,
    steps: u64,
    _scalars: Charge,
}

impl<'g> Classical<'g> {
    pub(super) fn new(g: &'g Graph, meter: &SpaceMeter, order: RootOrder) -> Self {
        let n = g.n();
        Classical {
            g,
            colors: ColorArray::new(meter, n),
            stack_v: meter.alloc("stack", n, bits_for(n as u64)),
            stack_next: meter.alloc("stack", n, bits_for(g.max_degree() as u64 + 1)),
            order,
            steps: 0,
            _scalars: meter.charge("scalars", 4 * 64),
        }
    }

    pub(super) fn steps(&self) -> u64 {
        self.steps
    }

    pub(super) fn run(&mut self, emit: &mut dyn FnMut(usize, usize)) -> Result<()> {
        let g = self.g;
        let mut top = 0usize;
        for u in self.order.roots(g.n()) {
            if self.colors.color(u) != Color::White {
                continue;
            }
            self.stack_v.set_raw(top, u as u64);
            self.stack_next.set_raw(top, 1);
            top += 1;
            while top > 0 {
                top -= 1;
                let v = self.stack_v.get_raw(top) as usize;
                let next = self.stack_next.get_raw(top) as usize;
                self.steps += 1;
                self.colors.paint(v, Color::Gray);
                let deg = g.degree_unchecked(v);
                let mut k = next;
                while k <= deg {
                    let w = g.neighbor_unchecked(v, k);
                    if self.colors.color(w) == Color::White {
                        emit(v, w);
                        self.stack_v.set_raw(top, v as u64);
                        self.stack_next.set_raw(top, (k + 1) as u64);
                        self.stack_v.set_raw(top + 1, w as u64);
                        self.stack_next.set_raw(top + 1, 1);
                        top += 2;
                        self.steps += 2;
                        break;
                    }
                    k += 1;
                }
                if k > deg {
                    self.colors.paint(v, Color::Black);
                }
            }
        }
        Ok(())
    }
}
