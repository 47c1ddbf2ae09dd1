//! Perfect hierarchy embeddings in flat (1 + d)-dimensional Minkowski spacetime.
//!
//! Tokens become events. Only time coordinates are adjusted, until every
//! "is-a" pair `(X, Y)` of a hierarchy's transitive closure has `Y` in the
//! causal past of `X`. The hierarchy is then read back from geometry alone:
//! each token's ancestor is the event in its past light cone with the
//! smallest squared proper time. A verify/repair loop relocates the few
//! tokens whose nearest ancestor is wrong until retrieval reproduces the
//! ground truth exactly.
//!
//! ```
//! use causal_hierarchy::{hierarchy, repair, EmbeddingConfig};
//!
//! let graph = hierarchy::load_edge_list(
//!     "dog\tmammal\ncat\tmammal\nmammal\tanimal\n".as_bytes(),
//!     hierarchy::GraphMode::Tree,
//! )?;
//! let out = repair::perfect_embed(&graph, &EmbeddingConfig::default())?;
//! assert!(out.is_perfect());
//! # Ok::<(), causal_hierarchy::Error>(())
//! ```

pub mod embedding;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod hierarchy;
pub mod metrics;
pub mod repair;
pub mod retrieval;

pub use embedding::{Embedding, EmbeddingConfig, EmbeddingFile};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::Event;
pub use hierarchy::{HierarchyGraph, TokenId};
