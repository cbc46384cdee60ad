//! Depth-first search over a read-only graph using O(n) bits of working memory.
//!
//! The traversal never materializes its DFS stack. Instead a hierarchy of
//! windows `S_1 .. S_L` (with `L = log* n`) mirrors the top of the stack at
//! decreasing resolution, and any window that runs dry or overflows is rebuilt
//! from the one above it. Every working structure is allocated from a
//! [`SpaceMeter`], so the peak working-memory footprint is measured to the bit.
//!
//! ```
//! use succinct_dfs::{Engine, EngineConfig, Graph};
//!
//! let g = Graph::build(4, &[(1, 2), (2, 3), (3, 4)], false).unwrap();
//! let mut edges = Vec::new();
//! let stats = Engine::new(&g, EngineConfig::default())
//!     .unwrap()
//!     .run(&mut |u, v| edges.push((u, v)))
//!     .unwrap();
//! assert_eq!(edges, vec![(1, 2), (2, 3), (3, 4)]);
//! assert_eq!(stats.edges, 3);
//! ```

pub mod cli;
pub mod dict;
pub mod engine;
pub mod error;
pub mod gen;
pub mod graph;
pub mod levels;
pub mod meter;
pub mod oracle;
pub mod stats;

pub use dict::{EnumDict, SuccinctDict};
pub use engine::{
    EdgeSink, Engine, EngineConfig, EngineMode, Fault, Hierarchy, LineSink, RootOrder, StepEvent, StepObserver,
};
pub use error::{Error, Result};
pub use graph::Graph;
pub use levels::{HeavyClassTable, LevelParams, Levels};
pub use meter::{Color, ColorArray, PackedArray, SpaceMeter};
pub use stats::TraversalStats;
