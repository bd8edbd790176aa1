//! Antidirected trees: validation, signs, degree statistics, spines, rooted views
//! and double brooms.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::digraph::{Arc, Digraph, Sign, VertexId};
use crate::error::TreeError;

/// Default bound for [`enumerate_antitrees`].
pub const ENUMERATION_LIMIT: usize = 8;

/// An oriented tree with no directed path of length two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AntiTree {
    tree: Digraph,
    sign: Vec<Sign>,
    adj: Vec<Vec<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub delta: usize,
    pub delta2: usize,
    pub argmax_u: VertexId,
    pub argmax2_v: VertexId,
    pub leaves: Vec<VertexId>,
    pub non_leaves: Vec<VertexId>,
    /// Leaf neighbours of each vertex.
    pub leaves_at: Vec<Vec<VertexId>>,
    /// Non-leaf neighbours of each vertex.
    pub non_leaves_at: Vec<Vec<VertexId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedAntiTree {
    pub root: VertexId,
    pub parent: Vec<Option<VertexId>>,
    pub depth: Vec<usize>,
    pub children: Vec<Vec<VertexId>>,
    /// Vertices in BFS order from the root.
    pub order: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpineDecomposition {
    pub spine: Vec<VertexId>,
    pub leaves_at: BTreeMap<VertexId, Vec<VertexId>>,
    pub final_vertex: VertexId,
    pub final_arc: Arc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleBroom {
    pub u: VertexId,
    pub v: VertexId,
    pub vertices: Vec<VertexId>,
    pub path_uv: Vec<VertexId>,
}

impl AntiTree {
    /// validate_antitree
    pub fn new(tree: Digraph) -> Result<Self, TreeError> {
        let n = tree.n();
        let k = tree.arc_count();
        if k == 0 {
            return Err(TreeError::Empty);
        }
        if n != k + 1 {
            return Err(TreeError::NotATree(format!("{n} vertices but {k} arcs")));
        }
        let mut adj = vec![Vec::new(); n];
        for a in tree.arcs() {
            adj[a.tail].push(a.head);
            adj[a.head].push(a.tail);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            if l.windows(2).any(|w| w[0] == w[1]) {
                return Err(TreeError::NotATree("two arcs join the same pair".into()));
            }
        }
        let seen = bfs_dist(&adj, 0);
        if let Some(v) = seen.iter().position(|d| d.is_none()) {
            return Err(TreeError::NotATree(format!("vertex {v} is not connected to vertex 0")));
        }
        let mut sign = Vec::with_capacity(n);
        for v in 0..n {
            match (tree.in_neighbors(v).iter().min(), tree.out_neighbors(v).iter().min()) {
                (Some(&a), Some(&c)) => return Err(TreeError::NotAntidirected(a, v, c)),
                (_, Some(_)) => sign.push(Sign::Plus),
                _ => sign.push(Sign::Minus),
            }
        }
        Ok(AntiTree { tree, sign, adj })
    }

    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self, TreeError>
    where
        I: IntoIterator<Item = (VertexId, VertexId)>,
    {
        AntiTree::new(Digraph::new(n, arcs)?)
    }

    /// Orients an undirected tree so that `plus_root` is an out-vertex.
    pub fn orient(adj: &[Vec<VertexId>], plus_root: VertexId) -> Result<Self, TreeError> {
        let dist = bfs_dist(adj, plus_root);
        let mut arcs = Vec::new();
        for (x, l) in adj.iter().enumerate() {
            for &y in l {
                if x < y {
                    let even = dist[x].unwrap_or(0) % 2 == 0;
                    arcs.push(if even { (x, y) } else { (y, x) });
                }
            }
        }
        AntiTree::from_arcs(adj.len(), arcs)
    }

    pub fn digraph(&self) -> &Digraph {
        &self.tree
    }

    /// Number of arcs.
    pub fn k(&self) -> usize {
        self.tree.arc_count()
    }

    pub fn order(&self) -> usize {
        self.tree.n()
    }

    pub fn sign(&self, v: VertexId) -> Sign {
        self.sign[v]
    }

    /// All neighbours (which equal N^sign(v)(v)), sorted by id.
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.adj[v].len() == 1
    }

    pub fn adjacent(&self, x: VertexId, y: VertexId) -> bool {
        self.adj[x].binary_search(&y).is_ok()
    }

    pub fn plus_vertices(&self) -> Vec<VertexId> {
        (0..self.order()).filter(|&v| self.sign[v] == Sign::Plus).collect()
    }

    pub fn minus_vertices(&self) -> Vec<VertexId> {
        (0..self.order()).filter(|&v| self.sign[v] == Sign::Minus).collect()
    }

    pub fn reverse(&self) -> AntiTree {
        AntiTree {
            tree: self.tree.reverse(),
            sign: self.sign.iter().map(|s| s.flip()).collect(),
            adj: self.adj.clone(),
        }
    }

    /// The tree arc between adjacent `x` and `y`, oriented as in the tree.
    pub fn arc_between(&self, x: VertexId, y: VertexId) -> Arc {
        match self.sign[x] {
            Sign::Plus => Arc::new(x, y),
            Sign::Minus => Arc::new(y, x),
        }
    }

    fn check(&self, v: VertexId) -> Result<(), TreeError> {
        if v < self.order() {
            Ok(())
        } else {
            Err(TreeError::VertexNotInTree(v))
        }
    }

    /// Distances from `v` to every vertex.
    pub fn distances(&self, v: VertexId) -> Vec<usize> {
        bfs_dist(&self.adj, v).into_iter().map(|d| d.expect("trees are connected")).collect()
    }

    /// The unique path from `a` to `b`, both ends included.
    pub fn path(&self, a: VertexId, b: VertexId) -> Vec<VertexId> {
        let r = self.rooted_view_unchecked(a);
        let mut p = vec![b];
        let mut x = b;
        while let Some(q) = r.parent[x] {
            p.push(q);
            x = q;
        }
        p.reverse();
        p
    }

    pub fn degree_stats(&self) -> DegreeStats {
        let n = self.order();
        let mut by_deg: Vec<VertexId> = (0..n).collect();
        by_deg.sort_by_key(|&v| (std::cmp::Reverse(self.degree(v)), v));
        let (u, v) = (by_deg[0], by_deg[1]);
        let leaves: Vec<VertexId> = (0..n).filter(|&x| self.is_leaf(x)).collect();
        let non_leaves: Vec<VertexId> = (0..n).filter(|&x| !self.is_leaf(x)).collect();
        let leaves_at = (0..n).map(|x| self.adj[x].iter().copied().filter(|&y| self.is_leaf(y)).collect()).collect();
        let non_leaves_at =
            (0..n).map(|x| self.adj[x].iter().copied().filter(|&y| !self.is_leaf(y)).collect()).collect();
        DegreeStats {
            delta: self.degree(u),
            delta2: self.degree(v),
            argmax_u: u,
            argmax2_v: v,
            leaves,
            non_leaves,
            leaves_at,
            non_leaves_at,
        }
    }

    pub fn rooted_view(&self, root: VertexId) -> Result<RootedAntiTree, TreeError> {
        self.check(root)?;
        Ok(self.rooted_view_unchecked(root))
    }

    pub(crate) fn rooted_view_unchecked(&self, root: VertexId) -> RootedAntiTree {
        let n = self.order();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut q = VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = q.pop_front() {
            order.push(x);
            for &y in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    depth[y] = depth[x] + 1;
                    children[x].push(y);
                    q.push_back(y);
                }
            }
        }
        RootedAntiTree { root, parent, depth, children, order }
    }

    /// Spine = lexicographically least longest path. Fails unless every other vertex
    /// is a leaf hanging off an inner spine vertex.
    pub fn caterpillar_decompose(&self) -> Result<SpineDecomposition, TreeError> {
        let spine = self.least_longest_path();
        let on_spine: BTreeSet<VertexId> = spine.iter().copied().collect();
        let mut dist = vec![usize::MAX; self.order()];
        let mut q = VecDeque::new();
        for &s in &spine {
            dist[s] = 0;
            q.push_back(s);
        }
        while let Some(x) = q.pop_front() {
            for &y in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        if let Some(w) = (0..self.order()).find(|&x| dist[x] >= 2) {
            return Err(TreeError::NotACaterpillar(w));
        }
        let mut leaves_at = BTreeMap::new();
        for &s in &spine[1..spine.len() - 1] {
            let l: Vec<VertexId> = self.adj[s].iter().copied().filter(|y| !on_spine.contains(y)).collect();
            if !l.is_empty() {
                leaves_at.insert(s, l);
            }
        }
        let last = spine[spine.len() - 1];
        let prev = spine[spine.len() - 2];
        Ok(SpineDecomposition { final_vertex: last, final_arc: self.arc_between(last, prev), spine, leaves_at })
    }

    /// Classical check: deleting all leaves leaves a path (or nothing).
    pub fn is_caterpillar_by_stripping(&self) -> bool {
        let inner: Vec<VertexId> = (0..self.order()).filter(|&x| !self.is_leaf(x)).collect();
        let set: BTreeSet<VertexId> = inner.iter().copied().collect();
        inner.iter().all(|&x| self.adj[x].iter().filter(|y| set.contains(y)).count() <= 2)
    }

    fn least_longest_path(&self) -> Vec<VertexId> {
        let n = self.order();
        let ecc: Vec<usize> = (0..n).map(|v| self.distances(v).into_iter().max().unwrap_or(0)).collect();
        let diam = ecc.iter().copied().max().unwrap_or(0);
        let start = (0..n).find(|&v| ecc[v] == diam).expect("nonempty tree");
        // Greedy walk: always step to the least neighbour whose branch reaches depth `diam`.
        let r = self.rooted_view_unchecked(start);
        let mut reach = r.depth.clone();
        for &x in r.order.iter().rev() {
            if let Some(p) = r.parent[x] {
                reach[p] = reach[p].max(reach[x]);
            }
        }
        let mut path = vec![start];
        let mut x = start;
        while r.depth[x] < diam {
            x = *r.children[x].iter().find(|&&c| reach[c] == diam).expect("branch reaching the diameter");
            path.push(x);
        }
        path
    }

    pub fn double_broom(&self, u: VertexId, v: VertexId) -> Result<DoubleBroom, TreeError> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Err(TreeError::SameVertex);
        }
        let path_uv = self.path(u, v);
        let mut set: BTreeSet<VertexId> = path_uv.iter().copied().collect();
        for x in [u, v] {
            set.insert(x);
            set.extend(self.adj[x].iter().copied());
        }
        Ok(DoubleBroom { u, v, vertices: set.into_iter().collect(), path_uv })
    }

    /// The subtree induced by a connected vertex set, relabelled to `0..len`
    /// in the order given. Returns the subtree and the old id of each new vertex.
    pub fn induced_subtree(&self, vertices: &[VertexId]) -> Result<(AntiTree, Vec<VertexId>), TreeError> {
        let mut new_id = vec![usize::MAX; self.order()];
        for (i, &x) in vertices.iter().enumerate() {
            self.check(x)?;
            new_id[x] = i;
        }
        let arcs = self
            .tree
            .arcs()
            .iter()
            .filter(|a| new_id[a.tail] != usize::MAX && new_id[a.head] != usize::MAX)
            .map(|a| (new_id[a.tail], new_id[a.head]));
        let t = AntiTree::from_arcs(vertices.len(), arcs)?;
        Ok((t, vertices.to_vec()))
    }

    /// Sign-annotated canonical form, equal for isomorphic trees only.
    pub fn canonical_form(&self) -> String {
        centers(&self.adj)
            .into_iter()
            .map(|c| encode(&self.adj, Some(&self.sign), c, usize::MAX))
            .min()
            .expect("at least one centre")
    }
}

fn bfs_dist(adj: &[Vec<VertexId>], s: VertexId) -> Vec<Option<usize>> {
    let mut d = vec![None; adj.len()];
    d[s] = Some(0);
    let mut q = VecDeque::from([s]);
    while let Some(x) = q.pop_front() {
        let dx = d[x].unwrap_or(0);
        for &y in &adj[x] {
            if d[y].is_none() {
                d[y] = Some(dx + 1);
                q.push_back(y);
            }
        }
    }
    d
}

/// Centre(s) by iterated leaf stripping.
fn centers(adj: &[Vec<VertexId>]) -> Vec<VertexId> {
    let n = adj.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut deg: Vec<usize> = adj.iter().map(|l| l.len()).collect();
    let mut layer: Vec<VertexId> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut left = n;
    while left > 2 {
        left -= layer.len();
        let mut next = Vec::new();
        for &x in &layer {
            deg[x] = 0;
            for &y in &adj[x] {
                if deg[y] > 0 {
                    deg[y] -= 1;
                    if deg[y] == 1 {
                        next.push(y);
                    }
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

fn encode(adj: &[Vec<VertexId>], sign: Option<&[Sign]>, v: VertexId, parent: VertexId) -> String {
    let mut kids: Vec<String> =
        adj[v].iter().filter(|&&c| c != parent).map(|&c| encode(adj, sign, c, v)).collect();
    kids.sort();
    let tag = sign.map_or('.', |s| s[v].symbol());
    format!("({tag}{})", kids.concat())
}

/// Every isomorphism class of antidirected trees with `k` arcs, once each.
pub fn enumerate_antitrees(k: usize) -> Result<Vec<AntiTree>, TreeError> {
    enumerate_antitrees_bounded(k, ENUMERATION_LIMIT)
}

pub fn enumerate_antitrees_bounded(k: usize, limit: usize) -> Result<Vec<AntiTree>, TreeError> {
    if k == 0 {
        return Err(TreeError::Empty);
    }
    if k > limit {
        return Err(TreeError::TooLarge { k, limit });
    }
    let mut out = BTreeMap::new();
    for adj in unlabeled_trees(k + 1) {
        for root in [0, adj[0][0]] {
            let t = AntiTree::orient(&adj, root)?;
            out.entry(t.canonical_form()).or_insert(t);
        }
    }
    Ok(out.into_values().collect())
}

/// Unlabelled trees on `n ≥ 2` vertices, by leaf addition with canonical dedup.
fn unlabeled_trees(n: usize) -> Vec<Vec<Vec<VertexId>>> {
    let mut layer: BTreeMap<String, Vec<Vec<VertexId>>> = BTreeMap::new();
    layer.insert(String::new(), vec![vec![1], vec![0]]);
    for size in 3..=n {
        let mut next = BTreeMap::new();
        for adj in layer.values() {
            for x in 0..size - 1 {
                let mut a = adj.clone();
                a[x].push(size - 1);
                a.push(vec![x]);
                let key = centers(&a).into_iter().map(|c| encode(&a, None, c, usize::MAX)).min().unwrap_or_default();
                next.entry(key).or_insert(a);
            }
        }
        layer = next;
    }
    layer.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn double_star() -> AntiTree {
        // u = 0, v = 1, a = 2, b = 3, c = 4, d = 5
        AntiTree::from_arcs(6, [(0, 1), (0, 2), (0, 3), (4, 1), (5, 1)]).unwrap()
    }

    #[test]
    fn signs_of_small_path() {
        let t = AntiTree::from_arcs(3, [(0, 1), (2, 1)]).unwrap();
        assert_eq!((t.sign(0), t.sign(1), t.sign(2)), (Sign::Plus, Sign::Minus, Sign::Plus));
    }

    #[test]
    fn rejects_directed_path() {
        assert_eq!(AntiTree::from_arcs(3, [(0, 1), (1, 2)]), Err(TreeError::NotAntidirected(0, 1, 2)));
    }

    #[test]
    fn rejects_non_trees() {
        assert!(matches!(AntiTree::from_arcs(4, [(0, 1), (2, 3)]), Err(TreeError::NotATree(_))));
        assert!(matches!(AntiTree::from_arcs(2, [(0, 1), (1, 0)]), Err(TreeError::NotATree(_))));
        assert_eq!(AntiTree::from_arcs(1, []), Err(TreeError::Empty));
    }

    #[test]
    fn out_star() {
        let t = AntiTree::from_arcs(6, (1..6).map(|l| (0, l))).unwrap();
        assert_eq!(t.plus_vertices(), vec![0]);
        assert_eq!(t.minus_vertices(), vec![1, 2, 3, 4, 5]);
        let s = t.degree_stats();
        assert_eq!((s.delta, s.delta2), (5, 1));
    }

    #[test]
    fn double_star_stats() {
        let s = double_star().degree_stats();
        assert_eq!((s.delta, s.delta2, s.argmax_u, s.argmax2_v), (3, 3, 0, 1));
        assert_eq!(s.leaves, vec![2, 3, 4, 5]);
        assert_eq!(s.leaves_at[0], vec![2, 3]);
    }

    #[test]
    fn path_stats() {
        let t = AntiTree::from_arcs(5, [(0, 1), (2, 1), (2, 3), (4, 3)]).unwrap();
        let s = t.degree_stats();
        assert_eq!((s.delta, s.delta2), (2, 2));
    }

    #[test]
    fn spine_of_path_is_whole_path() {
        let t = AntiTree::from_arcs(5, [(0, 1), (2, 1), (2, 3), (4, 3)]).unwrap();
        let sd = t.caterpillar_decompose().unwrap();
        assert_eq!(sd.spine, vec![0, 1, 2, 3, 4]);
        assert!(sd.leaves_at.is_empty());
        assert_eq!(sd.final_vertex, 4);
        assert_eq!(sd.final_arc, Arc::new(4, 3));
    }

    #[test]
    fn spine_of_double_star() {
        // Longest paths have 4 vertices; the least sequence starts at leaf 2.
        let sd = double_star().caterpillar_decompose().unwrap();
        assert_eq!(sd.spine, vec![2, 0, 1, 4]);
        assert_eq!(sd.leaves_at[&0], vec![3]);
        assert_eq!(sd.leaves_at[&1], vec![5]);
    }

    #[test]
    fn spine_of_star_and_single_arc() {
        let star = AntiTree::from_arcs(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let sd = star.caterpillar_decompose().unwrap();
        assert_eq!(sd.spine, vec![1, 0, 2]);
        assert_eq!(sd.leaves_at[&0], vec![3]);
        let arc = AntiTree::from_arcs(2, [(1, 0)]).unwrap();
        assert_eq!(arc.caterpillar_decompose().unwrap().spine, vec![0, 1]);
    }

    #[test]
    fn spider_is_not_a_caterpillar() {
        let t = AntiTree::from_arcs(7, [(0, 1), (0, 2), (0, 3), (4, 1), (5, 2), (6, 3)]).unwrap();
        assert!(matches!(t.caterpillar_decompose(), Err(TreeError::NotACaterpillar(_))));
        assert!(!t.is_caterpillar_by_stripping());
    }

    #[test]
    fn double_broom_cases() {
        let t = double_star();
        assert_eq!(t.double_broom(0, 1).unwrap().vertices, (0..6).collect::<Vec<_>>());
        // e -> b with b = 3 an in-vertex child of u
        let t2 = AntiTree::from_arcs(7, [(0, 1), (0, 2), (0, 3), (4, 1), (5, 1), (6, 3)]).unwrap();
        assert!(!t2.double_broom(0, 1).unwrap().vertices.contains(&6));
        // u - x - y - v with pendant leaves on u and v
        let t3 = AntiTree::from_arcs(6, [(0, 1), (2, 1), (2, 3), (0, 4), (5, 3)]).unwrap();
        let b = t3.double_broom(0, 3).unwrap();
        assert_eq!(b.vertices.len(), 6);
        assert_eq!(b.path_uv, vec![0, 1, 2, 3]);
        assert_eq!(t3.double_broom(0, 0), Err(TreeError::SameVertex));
        assert_eq!(t3.double_broom(0, 9), Err(TreeError::VertexNotInTree(9)));
    }

    #[test]
    fn rooted_views() {
        let star = AntiTree::from_arcs(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = star.rooted_view(0).unwrap();
        assert!((1..4).all(|l| r.parent[l] == Some(0) && r.depth[l] == 1));
        let p = AntiTree::from_arcs(3, [(0, 1), (2, 1)]).unwrap();
        let r = p.rooted_view(0).unwrap();
        assert_eq!((r.parent[1], r.parent[2]), (Some(0), Some(1)));
        for x in 1..3 {
            let q = r.parent[x].unwrap();
            assert!(p.digraph().is_neighbor(x, p.sign(x), q));
        }
        let path = AntiTree::from_arcs(6, [(0, 1), (2, 1), (2, 3), (4, 3), (4, 5)]).unwrap();
        let r = path.rooted_view(0).unwrap();
        assert_eq!(r.depth.iter().sum::<usize>(), 5 * 6 / 2);
        assert_eq!(path.rooted_view(7), Err(TreeError::VertexNotInTree(7)));
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = (1..=5).map(|k| enumerate_antitrees(k).unwrap().len()).collect();
        // k = 1: the arc; k = 2: the two stars; k = 3: the path and two stars.
        assert_eq!(&counts[..3], &[1, 2, 3]);
        assert!(enumerate_antitrees(9).is_err());
    }

    #[test]
    fn canonical_form_sees_signs() {
        let a = AntiTree::from_arcs(3, [(0, 1), (0, 2)]).unwrap();
        let b = AntiTree::from_arcs(3, [(1, 0), (2, 0)]).unwrap();
        let c = AntiTree::from_arcs(3, [(2, 0), (2, 1)]).unwrap();
        assert_ne!(a.canonical_form(), b.canonical_form());
        assert_eq!(a.canonical_form(), c.canonical_form());
    }
}
