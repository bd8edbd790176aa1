use serde::Serialize;
use thiserror::Error;

use crate::digraph::{Digraph, VertexId};
use crate::tree::AntiTree;

/// An injective map from tree vertices to host vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    map: Vec<VertexId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("map covers {got} vertices, tree has {want}")]
    WrongSize { got: usize, want: usize },
    #[error("image {0} is not a host vertex")]
    OutOfRange(VertexId),
    #[error("vertices {0} and {1} share an image")]
    NotInjective(VertexId, VertexId),
    #[error("tree arc {0}->{1} is not mapped onto a host arc")]
    MissingArc(VertexId, VertexId),
}

impl Embedding {
    pub fn new(map: Vec<VertexId>) -> Self {
        Embedding { map }
    }

    pub fn map(&self) -> &[VertexId] {
        &self.map
    }

    pub fn image(&self, x: VertexId) -> VertexId {
        self.map[x]
    }

    /// Independent validity check: size, range, injectivity, arcs.
    pub fn validate(&self, t: &AntiTree, d: &Digraph) -> Result<(), EmbeddingError> {
        if self.map.len() != t.order() {
            return Err(EmbeddingError::WrongSize { got: self.map.len(), want: t.order() });
        }
        let mut owner = vec![usize::MAX; d.n()];
        for (x, &h) in self.map.iter().enumerate() {
            if h >= d.n() {
                return Err(EmbeddingError::OutOfRange(h));
            }
            if owner[h] != usize::MAX {
                return Err(EmbeddingError::NotInjective(owner[h], x));
            }
            owner[h] = x;
        }
        for a in t.digraph().arcs() {
            if !d.has_arc(self.map[a.tail], self.map[a.head]) {
                return Err(EmbeddingError::MissingArc(a.tail, a.head));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let t = AntiTree::from_arcs(3, [(0, 1), (2, 1)]).unwrap();
        let d = Digraph::new(3, [(0, 1), (2, 1)]).unwrap();
        assert_eq!(Embedding::new(vec![0, 1, 2]).validate(&t, &d), Ok(()));
        assert_eq!(Embedding::new(vec![2, 1, 0]).validate(&t, &d), Ok(()));
        assert_eq!(Embedding::new(vec![0, 1, 0]).validate(&t, &d), Err(EmbeddingError::NotInjective(0, 2)));
        assert_eq!(Embedding::new(vec![1, 0, 2]).validate(&t, &d), Err(EmbeddingError::MissingArc(0, 1)));
        assert!(Embedding::new(vec![0, 1]).validate(&t, &d).is_err());
        assert!(Embedding::new(vec![0, 1, 7]).validate(&t, &d).is_err());
    }
}
