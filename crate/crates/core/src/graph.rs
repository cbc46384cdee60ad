//! Read-only compressed-sparse-row graph.
//!
//! This is the input memory of the traversal: it is never charged to the
//! [`SpaceMeter`](crate::SpaceMeter). Vertices are numbered `1..=n` and every
//! adjacency list is sorted ascending, which fixes the DFS tie-break.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

const BINARY_MAGIC: &[u8; 4] = b"SDFS";
const BINARY_VERSION: u8 = 1;

#[derive(Debug)]
pub struct Graph {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    directed: bool,
    read_counter: AtomicU64,
}

impl Clone for Graph {
    fn clone(&self) -> Self {
        Graph {
            n: self.n,
            offsets: self.offsets.clone(),
            targets: self.targets.clone(),
            directed: self.directed,
            read_counter: AtomicU64::new(self.reads()),
        }
    }
}

impl PartialEq for Graph {
    /// Structural equality; the read counter is instrumentation and ignored.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.directed == other.directed
            && self.offsets == other.offsets
            && self.targets == other.targets
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds the CSR form of `edges` over vertices `1..=n`.
    ///
    /// Undirected edges are materialized in both adjacency lists; an undirected
    /// self-loop therefore occupies two slots of its vertex's list.
    pub fn build(n: usize, edges: &[(usize, usize)], directed: bool) -> Result<Graph> {
        if n > u32::MAX as usize {
            return Err(Error::bad_input(None, format!("vertex count {n} exceeds u32 range")));
        }
        let mut counts = vec![0usize; n + 1];
        for &(u, v) in edges {
            for x in [u, v] {
                if x == 0 || x > n {
                    return Err(Error::bad_input(None, format!("edge ({u}, {v}) has endpoint outside 1..={n}")));
                }
            }
            counts[u] += 1;
            if !directed {
                counts[v] += 1;
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 1..=n {
            offsets[v] = offsets[v - 1] + counts[v];
        }
        let m = offsets[n];
        let mut fill: Vec<usize> = offsets[..n].to_vec();
        let mut targets = vec![0u32; m];
        for &(u, v) in edges {
            targets[fill[u - 1]] = v as u32;
            fill[u - 1] += 1;
            if !directed {
                targets[fill[v - 1]] = u as u32;
                fill[v - 1] += 1;
            }
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Graph { n, offsets, targets, directed, read_counter: AtomicU64::new(0) })
    }

    fn from_parts(n: usize, offsets: Vec<usize>, targets: Vec<u32>, directed: bool) -> Graph {
        Graph { n, offsets, targets, directed, read_counter: AtomicU64::new(0) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of adjacency slots (twice the edge count for undirected input).
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    #[inline]
    fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            Err(Error::IndexOutOfRange { index: v, limit: self.n })
        } else {
            Ok(())
        }
    }

    /// Degree of `v`. Does not count as a neighbor read.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_vertex(v)?;
        Ok(self.degree_unchecked(v))
    }

    #[inline]
    pub(crate) fn degree_unchecked(&self, v: usize) -> usize {
        self.offsets[v] - self.offsets[v - 1]
    }

    /// The `k`-th (1-based) neighbor of `v`; increments the read counter.
    pub fn neighbor(&self, v: usize, k: usize) -> Result<usize> {
        self.check_vertex(v)?;
        let deg = self.degree_unchecked(v);
        if k == 0 || k > deg {
            return Err(Error::IndexOutOfRange { index: k, limit: deg });
        }
        Ok(self.neighbor_unchecked(v, k))
    }

    #[inline]
    pub(crate) fn neighbor_unchecked(&self, v: usize, k: usize) -> usize {
        self.read_counter.fetch_add(1, Ordering::Relaxed);
        self.targets[self.offsets[v - 1] + k - 1] as usize
    }

    /// Total neighbor-slot reads since construction (or the last reset).
    pub fn reads(&self) -> u64 {
        self.read_counter.load(Ordering::Relaxed)
    }

    pub fn reset_reads(&self) {
        self.read_counter.store(0, Ordering::Relaxed);
    }

    pub fn max_degree(&self) -> usize {
        (1..=self.n).map(|v| self.degree_unchecked(v)).max().unwrap_or(0)
    }

    /// The edge list this graph was built from, up to order.
    ///
    /// For undirected graphs each edge is reported once with `u <= v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(if self.directed { self.m() } else { self.m() / 2 });
        for u in 1..=self.n {
            let adj = &self.targets[self.offsets[u - 1]..self.offsets[u]];
            if self.directed {
                out.extend(adj.iter().map(|&v| (u, v as usize)));
                continue;
            }
            let mut loops = 0usize;
            for &v in adj {
                let v = v as usize;
                if v > u {
                    out.push((u, v));
                } else if v == u {
                    loops += 1;
                }
            }
            out.extend(std::iter::repeat_n((u, u), loops / 2));
        }
        out
    }

    /// Parses the text edge-list format: a header `n m d` with `d` one of `u`
    /// or `dir`, followed by `m` lines `u v`.
    pub fn parse_text<R: Read>(reader: R) -> Result<Graph> {
        let reader = BufReader::new(reader);
        let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (header_line, header) = loop {
            match lines.next() {
                Some((no, line)) => {
                    let line = line.map_err(|e| Error::bad_input(Some(no), e.to_string()))?;
                    if !line.trim().is_empty() {
                        break (no, line);
                    }
                }
                None => return Err(Error::bad_input(Some(1), "missing header")),
            }
        };
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::bad_input(Some(header_line), "header must be `n m d`"));
        }
        let n: usize =
            fields[0].parse().map_err(|_| Error::bad_input(Some(header_line), "vertex count is not an integer"))?;
        let m: usize =
            fields[1].parse().map_err(|_| Error::bad_input(Some(header_line), "edge count is not an integer"))?;
        let directed = match fields[2] {
            "u" => false,
            "dir" => true,
            other => {
                return Err(Error::bad_input(
                    Some(header_line),
                    format!("direction must be `u` or `dir`, got `{other}`"),
                ))
            }
        };
        if n > u32::MAX as usize {
            return Err(Error::bad_input(Some(header_line), "vertex count exceeds u32 range"));
        }

        let mut edges = Vec::with_capacity(m.min(1 << 20));
        let mut last_line = header_line;
        for (no, line) in lines {
            let line = line.map_err(|e| Error::bad_input(Some(no), e.to_string()))?;
            last_line = no;
            let mut it = line.split_whitespace();
            let (a, b) = match (it.next(), it.next(), it.next()) {
                (None, _, _) => continue,
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(Error::bad_input(Some(no), "expected `u v`")),
            };
            if edges.len() == m {
                return Err(Error::bad_input(Some(no), format!("more than {m} edge lines")));
            }
            let parse = |s: &str| -> Result<usize> {
                let x: usize =
                    s.parse().map_err(|_| Error::bad_input(Some(no), format!("`{s}` is not a vertex id")))?;
                if x == 0 || x > n {
                    return Err(Error::bad_input(Some(no), format!("vertex {x} outside 1..={n}")));
                }
                Ok(x)
            };
            edges.push((parse(a)?, parse(b)?));
        }
        if edges.len() != m {
            return Err(Error::bad_input(
                Some(last_line + 1),
                format!("expected {m} edge lines, found {}", edges.len()),
            ));
        }
        Graph::build(n, &edges, directed)
    }

    pub fn load_text(path: impl AsRef<Path>) -> Result<Graph> {
        Graph::parse_text(std::fs::File::open(path)?)
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let edges = self.edges();
        writeln!(w, "{} {} {}", self.n, edges.len(), if self.directed { "dir" } else { "u" })?;
        for (u, v) in edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn save_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_text(f)
    }

    /// Binary layout: `SDFS`, version byte, then little-endian u64 words
    /// `n`, `m`, `directed`, `offsets[0..=n]`, `targets[0..m]`.
    pub fn encode_binary(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + 8 * (3 + self.n + 1 + self.m()));
        out.extend_from_slice(BINARY_MAGIC);
        out.push(BINARY_VERSION);
        for word in [self.n as u64, self.m() as u64, self.directed as u64] {
            out.extend_from_slice(&word.to_le_bytes());
        }
        for &o in &self.offsets {
            out.extend_from_slice(&(o as u64).to_le_bytes());
        }
        for &t in &self.targets {
            out.extend_from_slice(&(t as u64).to_le_bytes());
        }
        out
    }

    pub fn decode_binary(bytes: &[u8]) -> Result<Graph> {
        let bad = |msg: &str| Error::bad_input(None, msg.to_string());
        if bytes.len() < 5 || &bytes[..4] != BINARY_MAGIC {
            return Err(bad("missing SDFS magic"));
        }
        if bytes[4] != BINARY_VERSION {
            return Err(bad("unsupported binary version"));
        }
        let body = &bytes[5..];
        if !body.len().is_multiple_of(8) || body.len() < 24 {
            return Err(bad("truncated header"));
        }
        let word = |i: usize| -> u64 { u64::from_le_bytes(body[8 * i..8 * i + 8].try_into().unwrap()) };
        let words = body.len() / 8;
        let (n, m, directed) = (word(0), word(1), word(2));
        if n > u32::MAX as u64 {
            return Err(bad("vertex count exceeds u32 range"));
        }
        let directed = match directed {
            0 => false,
            1 => true,
            _ => return Err(bad("directed flag must be 0 or 1")),
        };
        let expected = (n as u128) + 1 + (m as u128) + 3;
        if expected != words as u128 {
            return Err(bad("payload length does not match n and m"));
        }
        let (n, m) = (n as usize, m as usize);
        let mut offsets = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let o = word(3 + i);
            if o > m as u64 || offsets.last().is_some_and(|&prev| (o as usize) < prev) {
                return Err(bad("offsets must be non-decreasing and bounded by m"));
            }
            offsets.push(o as usize);
        }
        if offsets[0] != 0 || offsets[n] != m {
            return Err(bad("offsets must start at 0 and end at m"));
        }
        let mut targets = Vec::with_capacity(m);
        for i in 0..m {
            let t = word(4 + n + i);
            if t == 0 || t > n as u64 {
                return Err(bad("target outside 1..=n"));
            }
            targets.push(t as u32);
        }
        for v in 0..n {
            if !targets[offsets[v]..offsets[v + 1]].windows(2).all(|w| w[0] <= w[1]) {
                return Err(bad("adjacency lists must be sorted ascending"));
            }
        }
        Ok(Graph::from_parts(n, offsets, targets, directed))
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.encode_binary())?;
        Ok(())
    }

    pub fn load_binary(path: impl AsRef<Path>) -> Result<Graph> {
        Graph::decode_binary(&std::fs::read(path)?)
    }

    /// Loads either format, sniffing the binary magic.
    pub fn load(path: impl AsRef<Path>) -> Result<Graph> {
        let bytes = std::fs::read(path)?;
        if bytes.starts_with(BINARY_MAGIC) {
            Graph::decode_binary(&bytes)
        } else {
            Graph::parse_text(&bytes[..])
        }
    }
}
