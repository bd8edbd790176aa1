//! Embedding antidirected trees into dense digraphs.

pub mod convex;
pub mod digraph;
pub mod embed;
pub mod embedding;
pub mod error;
pub mod freeness;
pub mod gen;
pub mod io;
pub mod oracle;
pub mod subdigraph;
pub mod sweep;
pub mod tree;

pub use digraph::{Arc, Digraph, Sign, VertexId};
pub use embed::{embed_antitree, embed_antitree_with, Branch, CaseTag, EmbedOptions, EmbedOutcome, Trace};
pub use embedding::Embedding;
pub use error::{EmbedError, GraphError, Refusal, TreeError};
pub use tree::AntiTree;
