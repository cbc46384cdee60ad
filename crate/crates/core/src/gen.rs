//! Deterministic corpus generators and the inline `model:params` spec syntax.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenSpec {
    Path(usize),
    Star(usize),
    Grid(usize, usize),
    Gnm(usize, usize),
    /// Complete binary tree with levels `0..=depth`.
    Tree(u32),
}

impl GenSpec {
    pub fn generate(&self, seed: u64) -> Result<Graph> {
        match *self {
            GenSpec::Path(n) => path(n),
            GenSpec::Star(n) => star(n),
            GenSpec::Grid(r, c) => grid(r, c),
            GenSpec::Gnm(n, m) => random_gnm(n, m, seed),
            GenSpec::Tree(d) => full_binary_tree(d),
        }
    }
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::bad_input(None, format!("bad generator spec `{s}`"));
        let mut parts = s.split(':');
        let model = parts.next().ok_or_else(bad)?;
        let nums: Vec<usize> = parts.map(|p| p.parse::<usize>().map_err(|_| bad())).collect::<Result<_>>()?;
        let spec = match (model, nums.as_slice()) {
            ("path", [n]) => GenSpec::Path(*n),
            ("star", [n]) => GenSpec::Star(*n),
            ("grid", [r, c]) => GenSpec::Grid(*r, *c),
            ("gnm", [n, m]) => GenSpec::Gnm(*n, *m),
            ("tree", [d]) if *d < 31 => GenSpec::Tree(*d as u32),
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Path(n) => write!(f, "path:{n}"),
            GenSpec::Star(n) => write!(f, "star:{n}"),
            GenSpec::Grid(r, c) => write!(f, "grid:{r}:{c}"),
            GenSpec::Gnm(n, m) => write!(f, "gnm:{n}:{m}"),
            GenSpec::Tree(d) => write!(f, "tree:{d}"),
        }
    }
}

pub fn path(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..n).map(|v| (v, v + 1)).collect();
    Graph::build(n, &edges, false)
}

/// Center 1, leaves `2..=n`.
pub fn star(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (2..=n).map(|v| (1, v)).collect();
    Graph::build(n, &edges, false)
}

/// Row-major `rows × cols` lattice.
pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    let id = |r: usize, c: usize| r * cols + c + 1;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::build(rows * cols, &edges, false)
}

pub fn full_binary_tree(depth: u32) -> Result<Graph> {
    let n = (1usize << (depth + 1)) - 1;
    let edges: Vec<_> = (2..=n).map(|v| (v / 2, v)).collect();
    Graph::build(n, &edges, false)
}

/// `m` distinct non-loop undirected edges drawn uniformly with a seeded RNG.
pub fn random_gnm(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let max = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max {
        return Err(Error::bad_input(None, format!("gnm: {m} edges exceed the {max} possible on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let key = |u: usize, v: usize| if u < v { (u, v) } else { (v, u) };
    let mut draw = |count: usize| {
        let mut seen = HashSet::with_capacity(count);
        let mut order = Vec::with_capacity(count);
        while order.len() < count {
            let u = rng.gen_range(1..=n);
            let v = rng.gen_range(1..=n);
            if u != v && seen.insert(key(u, v)) {
                order.push(key(u, v));
            }
        }
        (seen, order)
    };
    let edges = if m <= max / 2 {
        draw(m).1
    } else {
        let (skip, _) = draw(max - m);
        let mut edges = Vec::with_capacity(m);
        for u in 1..=n {
            for v in u + 1..=n {
                if !skip.contains(&(u, v)) {
                    edges.push((u, v));
                }
            }
        }
        edges
    };
    Graph::build(n, &edges, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_models() {
        assert_eq!(path(4).unwrap().edges(), vec![(1, 2), (2, 3), (3, 4)]);
        let g = grid(2, 2).unwrap();
        assert_eq!((g.n(), g.edges().len()), (4, 4));
        let t = full_binary_tree(12).unwrap();
        assert_eq!((t.n(), t.edges().len()), (8191, 8190));
        assert_eq!(star(5).unwrap().degree(1).unwrap(), 4);
    }

    #[test]
    fn gnm_deterministic_and_simple() {
        let a = random_gnm(100, 300, 7).unwrap();
        let b = random_gnm(100, 300, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_gnm(100, 300, 8).unwrap());
        let e = a.edges();
        assert_eq!(e.len(), 300);
        assert!(e.iter().all(|&(u, v)| u < v));
        let dense = random_gnm(10, 44, 1).unwrap();
        assert_eq!(dense.edges().len(), 44);
        assert!(random_gnm(10, 46, 1).is_err());
        assert_eq!(random_gnm(2, 1, 3).unwrap().m(), 2);
    }

    #[test]
    fn spec_syntax() {
        for s in ["path:4", "star:9", "grid:3:5", "gnm:10:20", "tree:4"] {
            let spec: GenSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        for s in ["path", "grid:3", "gnm:a:b", "ring:5", "tree:40"] {
            assert!(s.parse::<GenSpec>().is_err(), "{s}");
        }
    }
}
