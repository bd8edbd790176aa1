//! Simple digraphs: arcs, adjacency, degrees and pseudo-semidegrees.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

pub type VertexId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
}

impl Arc {
    pub fn new(tail: VertexId, head: VertexId) -> Self {
        Arc { tail, head }
    }

    pub fn reversed(self) -> Self {
        Arc { tail: self.head, head: self.tail }
    }

    /// The endpoint that plays the role of `sign` (tail for `+`, head for `-`).
    pub fn end(self, sign: Sign) -> VertexId {
        match sign {
            Sign::Plus => self.tail,
            Sign::Minus => self.head,
        }
    }
}

/// Sign of a vertex in an antidirected tree, or a direction selector for neighbourhoods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// An immutable simple digraph on vertices `0..n`.
///
/// Adjacency lists keep insertion order. `has_arc` uses a sorted copy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<Arc>,
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    out_sorted: Vec<Vec<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub out_deg: Vec<usize>,
    pub in_deg: Vec<usize>,
    pub delta_plus_bar: usize,
    pub delta_minus_bar: usize,
    pub delta0_bar: usize,
    pub max_out: usize,
    pub max_in: usize,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Digraph {
            n,
            arcs: Vec::new(),
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            out_sorted: vec![Vec::new(); n],
        }
    }

    /// Builds a digraph, rejecting loops, duplicate arcs and out-of-range ids.
    pub fn new<I>(n: usize, arcs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut g = Digraph::empty(n);
        for (u, v) in arcs {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            g.arcs.push(Arc::new(u, v));
            g.out_adj[u].push(v);
            g.in_adj[v].push(u);
        }
        for (v, adj) in g.out_adj.iter().enumerate() {
            let mut s = adj.clone();
            s.sort_unstable();
            if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateArc(v, w[0]));
            }
            g.out_sorted[v] = s;
        }
        Ok(g)
    }

    pub fn from_arcs(n: usize, arcs: &[Arc]) -> Result<Self, GraphError> {
        Digraph::new(n, arcs.iter().map(|a| (a.tail, a.head)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// a(D)
    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v]
    }

    /// N^sign(v): out-neighbours for `+`, in-neighbours for `-`.
    pub fn neighbors(&self, v: VertexId, sign: Sign) -> &[VertexId] {
        match sign {
            Sign::Plus => &self.out_adj[v],
            Sign::Minus => &self.in_adj[v],
        }
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_adj[v].len()
    }

    pub fn degree(&self, v: VertexId, sign: Sign) -> usize {
        self.neighbors(v, sign).len()
    }

    pub fn has_arc(&self, u: VertexId, v: VertexId) -> bool {
        u < self.n && self.out_sorted[u].binary_search(&v).is_ok()
    }

    /// True when `h` lies in N^sign(v).
    pub fn is_neighbor(&self, v: VertexId, sign: Sign, h: VertexId) -> bool {
        match sign {
            Sign::Plus => self.has_arc(v, h),
            Sign::Minus => self.has_arc(h, v),
        }
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let out_deg: Vec<usize> = (0..self.n).map(|v| self.out_degree(v)).collect();
        let in_deg: Vec<usize> = (0..self.n).map(|v| self.in_degree(v)).collect();
        let pseudo = |d: &[usize]| d.iter().copied().filter(|&x| x > 0).min().unwrap_or(0);
        let delta_plus_bar = pseudo(&out_deg);
        let delta_minus_bar = pseudo(&in_deg);
        DegreeProfile {
            max_out: out_deg.iter().copied().max().unwrap_or(0),
            max_in: in_deg.iter().copied().max().unwrap_or(0),
            delta0_bar: delta_plus_bar.min(delta_minus_bar),
            delta_plus_bar,
            delta_minus_bar,
            out_deg,
            in_deg,
        }
    }

    /// (D+, D-): vertices of positive out-degree and of positive in-degree.
    pub fn plus_minus_sets(&self) -> (Vec<VertexId>, Vec<VertexId>) {
        let plus = (0..self.n).filter(|&v| self.out_degree(v) > 0).collect();
        let minus = (0..self.n).filter(|&v| self.in_degree(v) > 0).collect();
        (plus, minus)
    }

    pub fn reverse(&self) -> Digraph {
        Digraph {
            n: self.n,
            arcs: self.arcs.iter().map(|a| a.reversed()).collect(),
            out_sorted: self
                .in_adj
                .iter()
                .map(|a| {
                    let mut s = a.clone();
                    s.sort_unstable();
                    s
                })
                .collect(),
            out_adj: self.in_adj.clone(),
            in_adj: self.out_adj.clone(),
        }
    }

    /// Same vertex set, arc set restricted to `keep`.
    pub fn induced_subdigraph(&self, keep: &[Arc]) -> Result<Digraph, GraphError> {
        if let Some(a) = keep.iter().find(|a| !self.has_arc(a.tail, a.head)) {
            return Err(GraphError::MissingArc(a.tail, a.head));
        }
        Digraph::from_arcs(self.n, keep)
    }

    /// Drops isolated vertices; returns the compacted digraph and the old id of every new vertex.
    pub fn drop_isolated(&self) -> (Digraph, Vec<VertexId>) {
        let old: Vec<VertexId> =
            (0..self.n).filter(|&v| self.out_degree(v) + self.in_degree(v) > 0).collect();
        let mut new_id = vec![usize::MAX; self.n];
        for (i, &v) in old.iter().enumerate() {
            new_id[v] = i;
        }
        let arcs = self.arcs.iter().map(|a| (new_id[a.tail], new_id[a.head]));
        let g = Digraph::new(old.len(), arcs).expect("relabelling keeps the digraph simple");
        (g, old)
    }

    /// Copy with every adjacency list sorted by vertex id.
    pub fn sorted(&self) -> Digraph {
        let mut g = self.clone();
        g.arcs.sort_unstable();
        for l in g.out_adj.iter_mut().chain(g.in_adj.iter_mut()) {
            l.sort_unstable();
        }
        g
    }

    pub fn with_arc(&self, u: VertexId, v: VertexId) -> Result<Digraph, GraphError> {
        let mut arcs: Vec<(VertexId, VertexId)> = self.arcs.iter().map(|a| (a.tail, a.head)).collect();
        arcs.push((u, v));
        Digraph::new(self.n, arcs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d1() -> Digraph {
        Digraph::new(3, [(0, 1), (2, 1)]).unwrap()
    }

    #[test]
    fn profile_of_d1() {
        let p = d1().degree_profile();
        assert_eq!(p.out_deg, vec![1, 0, 1]);
        assert_eq!(p.in_deg, vec![0, 2, 0]);
        assert_eq!((p.delta_plus_bar, p.delta_minus_bar, p.delta0_bar), (1, 2, 1));
    }

    #[test]
    fn arcless_profile_is_zero() {
        let p = Digraph::empty(3).degree_profile();
        assert_eq!((p.delta_plus_bar, p.delta_minus_bar, p.delta0_bar), (0, 0, 0));
        assert_eq!(Digraph::empty(3).plus_minus_sets(), (vec![], vec![]));
    }

    #[test]
    fn complete_bidirected() {
        let arcs = (0..4).flat_map(|u| (0..4).filter(move |&v| v != u).map(move |v| (u, v)));
        let p = Digraph::new(4, arcs).unwrap().degree_profile();
        assert!(p.out_deg.iter().chain(&p.in_deg).all(|&d| d == 3));
        assert_eq!(p.delta0_bar, 3);
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert_eq!(Digraph::new(2, [(1, 1)]), Err(GraphError::Loop(1)));
        assert_eq!(Digraph::new(2, [(0, 1), (0, 1)]), Err(GraphError::DuplicateArc(0, 1)));
        assert!(Digraph::new(2, [(0, 1), (1, 0)]).is_ok());
        assert!(matches!(Digraph::new(2, [(0, 2)]), Err(GraphError::VertexOutOfRange { .. })));
    }

    #[test]
    fn plus_minus_of_d1() {
        assert_eq!(d1().plus_minus_sets(), (vec![0, 2], vec![1]));
    }

    #[test]
    fn reverse_d1() {
        let r = d1().reverse();
        assert_eq!(r.arcs(), &[Arc::new(1, 0), Arc::new(1, 2)]);
        assert_eq!(r.reverse(), d1());
        let (p, q) = (d1().degree_profile(), r.degree_profile());
        assert_eq!(p.out_deg, q.in_deg);
        assert_eq!(p.delta_plus_bar, q.delta_minus_bar);
    }

    #[test]
    fn induced_subdigraph_cases() {
        let d = d1();
        assert_eq!(d.induced_subdigraph(d.arcs()).unwrap(), d);
        assert_eq!(d.induced_subdigraph(&[]).unwrap().arc_count(), 0);
        let s = d.induced_subdigraph(&[Arc::new(0, 1)]).unwrap();
        let p = s.degree_profile();
        assert_eq!((p.out_deg, p.in_deg), (vec![1, 0, 0], vec![0, 1, 0]));
        assert_eq!(d.induced_subdigraph(&[Arc::new(1, 0)]), Err(GraphError::MissingArc(1, 0)));
    }

    #[test]
    fn drop_isolated_remaps() {
        let d = Digraph::new(5, [(3, 1)]).unwrap();
        let (g, old) = d.drop_isolated();
        assert_eq!(old, vec![1, 3]);
        assert_eq!(g.arcs(), &[Arc::new(1, 0)]);
    }

    #[test]
    fn neighbors_by_sign() {
        let d = d1();
        assert_eq!(d.neighbors(1, Sign::Minus), &[0, 2]);
        assert!(d.is_neighbor(1, Sign::Minus, 2));
        assert!(!d.is_neighbor(1, Sign::Plus, 2));
    }
}
