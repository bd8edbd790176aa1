//! Convex drawings, good arcs and the caterpillar embeddings built from them.
//!
//! A caterpillar with spine p_1 … p_L is grown one spine vertex at a time:
//! T_2 is the arc p_1p_2 and T_j adds p_j together with the leaves of p_{j-1}.
//! An arc is good for T_j when some embedding maps the arc p_{j-1}p_j onto it
//! and leaves one side of the chord free of images: with X the image of p_j
//! and Y the image of p_{j-1}, the open clockwise interval (X, Y) when j is odd
//! and (Y, X) when j is even.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::digraph::{Arc, Digraph, Sign, VertexId};
use crate::embedding::Embedding;
use crate::error::{EmbedError, GraphError, Refusal};
use crate::tree::AntiTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VertexOrder {
    Identity,
    Random(u64),
}

/// A digraph drawn with its vertices on a circle, clockwise in `order`.
#[derive(Clone, Debug)]
pub struct ConvexDigraph<'a> {
    d: &'a Digraph,
    order: Vec<VertexId>,
    pos: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideSets {
    pub arc: Arc,
    /// Strictly clockwise after the tail and before the head.
    pub left: Vec<VertexId>,
    pub right: Vec<VertexId>,
}

impl<'a> ConvexDigraph<'a> {
    pub fn new(d: &'a Digraph, order: Vec<VertexId>) -> Result<Self, GraphError> {
        let n = d.n();
        let mut pos = vec![usize::MAX; n];
        if order.len() != n {
            return Err(GraphError::Parse { line: 0, msg: format!("order has {} entries, digraph has {n}", order.len()) });
        }
        for (i, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
            if pos[v] != usize::MAX {
                return Err(GraphError::Parse { line: 0, msg: format!("vertex {v} repeated in order") });
            }
            pos[v] = i;
        }
        Ok(ConvexDigraph { d, order, pos })
    }

    pub fn with_order(d: &'a Digraph, order: VertexOrder) -> Self {
        let mut o: Vec<VertexId> = (0..d.n()).collect();
        if let VertexOrder::Random(seed) = order {
            o.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        ConvexDigraph::new(d, o).expect("a permutation")
    }

    pub fn digraph(&self) -> &Digraph {
        self.d
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn position(&self, v: VertexId) -> usize {
        self.pos[v]
    }

    /// Clockwise steps from `from` to `to`.
    pub fn cw_steps(&self, from: VertexId, to: VertexId) -> usize {
        let n = self.order.len();
        (self.pos[to] + n - self.pos[from]) % n
    }

    /// True when `z` lies in the open clockwise interval from `x` to `y`.
    pub fn strictly_between(&self, x: VertexId, y: VertexId, z: VertexId) -> bool {
        let s = self.cw_steps(x, z);
        s > 0 && s < self.cw_steps(x, y)
    }

    pub fn side_sets(&self, arc: Arc) -> Result<SideSets, GraphError> {
        let n = self.order.len();
        for v in [arc.tail, arc.head] {
            if v >= n {
                return Err(GraphError::VertexOutOfRange { vertex: v, n });
            }
        }
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for &z in &self.order {
            if z == arc.tail || z == arc.head {
                continue;
            }
            if self.strictly_between(arc.tail, arc.head, z) {
                left.push(z);
            } else {
                right.push(z);
            }
        }
        Ok(SideSets { arc, left, right })
    }
}

#[derive(Clone, Debug)]
struct Link {
    pred: Option<usize>,
    slots: Vec<VertexId>,
}

/// Good arcs of every stage T_2 ⊂ … ⊂ T_L, with back-pointers for reconstruction.
#[derive(Clone, Debug)]
pub struct GoodArcTable {
    arcs: Vec<Arc>,
    spine: Vec<VertexId>,
    spine_sign: Vec<Sign>,
    leaves: Vec<Vec<VertexId>>,
    tree_order: usize,
    stages: Vec<Vec<Option<Link>>>,
    density: Vec<i64>,
    degree: Vec<i64>,
}

impl GoodArcTable {
    /// Number of spine vertices L; stages are indexed 2..=L.
    pub fn spine_len(&self) -> usize {
        self.spine.len()
    }

    pub fn good(&self, stage: usize) -> Vec<Arc> {
        self.stages[stage - 2].iter().zip(&self.arcs).filter(|(l, _)| l.is_some()).map(|(_, &a)| a).collect()
    }

    pub fn final_good(&self) -> Vec<Arc> {
        self.good(self.spine.len())
    }

    pub fn count(&self, stage: usize) -> usize {
        self.stages[stage - 2].iter().filter(|l| l.is_some()).count()
    }

    /// a(D) − (k_j − 1)n at stage j.
    pub fn density_bound(&self, stage: usize) -> i64 {
        self.density[stage - 2]
    }

    /// a(D) − (|T_j⁺| − 1)|D⁻| − (|T_j⁻| − 1)|D⁺| at stage j.
    pub fn degree_bound(&self, stage: usize) -> i64 {
        self.degree[stage - 2]
    }

    /// Rebuilds the embedding of T_j that certifies `arc` at `stage`.
    /// Vertices outside T_j are left as `None`.
    pub fn witness_partial(&self, stage: usize, arc: Arc) -> Option<Vec<Option<VertexId>>> {
        let mut e = self.arcs.iter().position(|&a| a == arc)?;
        self.stages[stage - 2][e].as_ref()?;
        let mut map = vec![None; self.tree_order];
        let mut j = stage;
        loop {
            let a = self.arcs[e];
            let last = self.spine[j - 1];
            let x = a.end(self.spine_sign[j - 1]);
            let y = if x == a.tail { a.head } else { a.tail };
            map[last] = Some(x);
            map[self.spine[j - 2]] = Some(y);
            let link = self.stages[j - 2][e].as_ref().expect("links point at good arcs");
            for (&leaf, &h) in self.leaves[j - 2].iter().zip(&link.slots) {
                map[leaf] = Some(h);
            }
            match link.pred {
                Some(p) => {
                    e = p;
                    j -= 1;
                }
                None => break,
            }
        }
        Some(map)
    }

    /// The full embedding certified by a final-stage good arc.
    pub fn witness(&self, arc: Arc) -> Option<Embedding> {
        let m = self.witness_partial(self.spine.len(), arc)?;
        Some(Embedding::new(m.into_iter().map(|x| x.expect("final stage covers the tree")).collect()))
    }
}

/// Runs the good-arc dynamic programme for a caterpillar.
///
/// Both lower bounds are checked at every stage; a violation is reported as an
/// internal assertion because the construction guarantees them.
pub fn good_arcs(c: &ConvexDigraph<'_>, t: &AntiTree) -> Result<GoodArcTable, EmbedError> {
    let sd = t.caterpillar_decompose()?;
    let d = c.digraph();
    let arcs: Vec<Arc> = d.arcs().to_vec();
    let (n, a) = (d.n() as i64, d.arc_count() as i64);
    let (dp, dm) = d.plus_minus_sets();
    let (dp, dm) = (dp.len() as i64, dm.len() as i64);
    let spine = sd.spine.clone();
    let len = spine.len();
    let spine_sign: Vec<Sign> = spine.iter().map(|&x| t.sign(x)).collect();
    // leaves[j - 2] holds the leaves added at stage j, those of p_{j-1}.
    let mut leaves = vec![Vec::new()];
    for j in 3..=len {
        leaves.push(sd.leaves_at.get(&spine[j - 2]).cloned().unwrap_or_default());
    }

    let rot = Rotations::new(c, &arcs);
    let mut stages: Vec<Vec<Option<Link>>> = vec![vec![Some(Link { pred: None, slots: Vec::new() }); arcs.len()]];
    let (mut k_j, mut t_plus, mut t_minus) = (1i64, 1i64, 1i64);
    let mut density = vec![a];
    let mut degree = vec![a];
    for j in 3..=len {
        let v = spine[j - 2];
        let sigma = t.sign(v);
        let m = leaves[j - 2].len() + 1;
        let clockwise = j % 2 == 0;
        let prev = &stages[j - 3];
        let mut next: Vec<Option<Link>> = vec![None; arcs.len()];
        for (e, link) in prev.iter().enumerate() {
            if link.is_none() {
                continue;
            }
            let x = arcs[e].end(sigma);
            let (list, p) = rot.lookup(x, sigma, clockwise, e);
            if p < m {
                continue;
            }
            let (_, e2) = list[p - m];
            if next[e2].is_some() {
                return Err(EmbedError::assertion("phi-injective", format!("stage {j}: arc {:?} hit twice", arcs[e2])));
            }
            let slots = list[p - m + 1..p].iter().map(|&(h, _)| h).collect();
            next[e2] = Some(Link { pred: Some(e), slots });
        }
        k_j += m as i64;
        match sigma {
            Sign::Plus => t_minus += m as i64,
            Sign::Minus => t_plus += m as i64,
        }
        density.push(a - (k_j - 1) * n);
        degree.push(a - (t_plus - 1) * dm - (t_minus - 1) * dp);
        stages.push(next);
    }
    let table = GoodArcTable {
        arcs,
        spine,
        spine_sign,
        leaves,
        tree_order: t.order(),
        stages,
        density,
        degree,
    };
    for j in 2..=len {
        let cnt = table.count(j) as i64;
        if cnt < table.density_bound(j) {
            return Err(EmbedError::assertion(
                "density-bound",
                format!("stage {j}: {cnt} good arcs < {}", table.density_bound(j)),
            ));
        }
        if cnt < table.degree_bound(j) {
            return Err(EmbedError::assertion(
                "degree-bound",
                format!("stage {j}: {cnt} good arcs < {}", table.degree_bound(j)),
            ));
        }
    }
    Ok(table)
}

/// Same programme; the variant bound a(D) − (|T⁺|−1)|D⁻| − (|T⁻|−1)|D⁺| is the one to read.
pub fn good_arcs_mindeg(c: &ConvexDigraph<'_>, t: &AntiTree) -> Result<GoodArcTable, EmbedError> {
    good_arcs(c, t)
}

/// Per-vertex neighbour lists sorted by rotation distance, with each arc's index.
struct Rotations {
    // [vertex][sign as usize][clockwise as usize] -> (neighbour, arc id)
    lists: Vec<[[Vec<(VertexId, usize)>; 2]; 2]>,
    // [arc][sign][clockwise] -> index of the arc in the list of its sign-end
    index: Vec<[[usize; 2]; 2]>,
}

impl Rotations {
    fn new(c: &ConvexDigraph<'_>, arcs: &[Arc]) -> Self {
        let n = c.digraph().n();
        let mut lists: Vec<[[Vec<(VertexId, usize)>; 2]; 2]> = vec![Default::default(); n];
        for (e, a) in arcs.iter().enumerate() {
            for cw in [0, 1] {
                lists[a.tail][0][cw].push((a.head, e));
                lists[a.head][1][cw].push((a.tail, e));
            }
        }
        let mut index = vec![[[0usize; 2]; 2]; arcs.len()];
        for x in 0..n {
            for s in 0..2 {
                for cw in 0..2 {
                    let l = &mut lists[x][s][cw];
                    if cw == 1 {
                        l.sort_by_key(|&(z, _)| c.cw_steps(x, z));
                    } else {
                        l.sort_by_key(|&(z, _)| c.cw_steps(z, x));
                    }
                    for (i, &(_, e)) in l.iter().enumerate() {
                        index[e][s][cw] = i;
                    }
                }
            }
        }
        Rotations { lists, index }
    }

    fn lookup(&self, x: VertexId, sign: Sign, clockwise: bool, e: usize) -> (&[(VertexId, usize)], usize) {
        let s = (sign == Sign::Minus) as usize;
        let cw = clockwise as usize;
        (&self.lists[x][s][cw], self.index[e][s][cw])
    }
}

fn check_density(d: &Digraph, k: usize) -> Result<(), EmbedError> {
    let needed = (k - 1) * d.n();
    if d.arc_count() > needed {
        Ok(())
    } else {
        Err(EmbedError::HypothesisViolated(Refusal::Density { arcs: d.arc_count(), needed }))
    }
}

/// Embeds a caterpillar with k arcs into any digraph with more than (k−1)n arcs.
pub fn embed_caterpillar(d: &Digraph, t: &AntiTree, order: VertexOrder) -> Result<Embedding, EmbedError> {
    check_density(d, t.k())?;
    let c = ConvexDigraph::with_order(d, order);
    let table = good_arcs(&c, t)?;
    first_witness(&table, t, d)
}

/// As [`embed_caterpillar`], retrying with fresh random orders if the first one fails.
pub fn embed_caterpillar_retrying(d: &Digraph, t: &AntiTree, seeds: &[u64]) -> Result<Embedding, EmbedError> {
    let mut last = embed_caterpillar(d, t, VertexOrder::Identity);
    for &s in seeds {
        match last {
            Err(EmbedError::InternalAssertion(_)) => last = embed_caterpillar(d, t, VertexOrder::Random(s)),
            _ => break,
        }
    }
    last
}

fn first_witness(table: &GoodArcTable, t: &AntiTree, d: &Digraph) -> Result<Embedding, EmbedError> {
    let arc = *table
        .final_good()
        .first()
        .ok_or_else(|| EmbedError::assertion("good-arcs-empty", "no good arc although the bound is positive"))?;
    let emb = table.witness(arc).ok_or_else(|| EmbedError::assertion("witness", "good arc without witness"))?;
    emb.validate(t, d).map_err(|e| EmbedError::assertion("witness-valid", e.to_string()))?;
    Ok(emb)
}

/// Embeds a caterpillar when a(D) > (k−1)(|D⁺|+|D⁻|)/2 and the sign counts are balanced
/// (|D⁺| ≤ |D⁻| with |T⁺| ≤ |T⁻|, or both reversed).
pub fn embed_caterpillar_mindeg(d: &Digraph, t: &AntiTree) -> Result<Embedding, EmbedError> {
    let k = t.k();
    let (dp, dm) = d.plus_minus_sets();
    let (dp, dm) = (dp.len(), dm.len());
    let (tp, tm) = (t.plus_vertices().len(), t.minus_vertices().len());
    let twice = (k - 1) * (dp + dm);
    if 2 * d.arc_count() <= twice {
        return Err(EmbedError::HypothesisViolated(Refusal::Density { arcs: d.arc_count(), needed: twice / 2 }));
    }
    let run = |d: &Digraph, t: &AntiTree| -> Result<Embedding, EmbedError> {
        let c = ConvexDigraph::with_order(d, VertexOrder::Identity);
        let table = good_arcs_mindeg(&c, t)?;
        first_witness(&table, t, d)
    };
    if dp <= dm && tp <= tm {
        run(d, t)
    } else if dp >= dm && tp >= tm {
        let emb = run(&d.reverse(), &t.reverse())?;
        emb.validate(t, d).map_err(|e| EmbedError::assertion("witness-valid", e.to_string()))?;
        Ok(emb)
    } else {
        Err(EmbedError::HypothesisViolated(Refusal::SignBalance { d_plus: dp, d_minus: dm, t_plus: tp, t_minus: tm }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Digraph {
        Digraph::new(4, [(0, 2), (0, 1), (2, 3)]).unwrap()
    }

    #[test]
    fn side_sets_read_the_circle() {
        let d = c4();
        let c = ConvexDigraph::with_order(&d, VertexOrder::Identity);
        let s = c.side_sets(Arc::new(0, 2)).unwrap();
        assert_eq!((s.left, s.right), (vec![1], vec![3]));
        let s = c.side_sets(Arc::new(0, 1)).unwrap();
        assert_eq!((s.left, s.right), (vec![], vec![2, 3]));
        for x in 0..4 {
            for y in 0..4 {
                if x != y {
                    let a = c.side_sets(Arc::new(x, y)).unwrap();
                    let b = c.side_sets(Arc::new(y, x)).unwrap();
                    assert_eq!(a.left, b.right);
                }
            }
        }
    }

    #[test]
    fn single_arc_all_good() {
        let d = c4();
        let c = ConvexDigraph::with_order(&d, VertexOrder::Identity);
        let t = AntiTree::from_arcs(2, [(0, 1)]).unwrap();
        let table = good_arcs(&c, &t).unwrap();
        assert_eq!(table.final_good().len(), 3);
        assert_eq!(table.degree_bound(2), 3);
    }

    /// Pins both parities on a 4-vertex instance: the 2-arc in-star has an odd spine
    /// (final side (X, Y) empty), the 3-arc path an even one ((Y, X) empty).
    /// The second host is complete, so a good arc must exist.
    #[test]
    fn parity_convention() {
        // Circle 0,1,2,3; arcs into 1 from both 0 and 2.
        let d = Digraph::new(4, [(0, 1), (2, 1), (3, 1)]).unwrap();
        let c = ConvexDigraph::with_order(&d, VertexOrder::Identity);
        let t = AntiTree::from_arcs(3, [(0, 1), (2, 1)]).unwrap();
        let table = good_arcs(&c, &t).unwrap();
        for arc in table.final_good() {
            let m = table.witness_partial(3, arc).unwrap();
            let (x, y) = (m[2].unwrap(), m[1].unwrap());
            let imgs: Vec<VertexId> = m.iter().flatten().copied().collect();
            assert!(imgs.iter().all(|&z| !c.strictly_between(x, y, z)));
        }
        let d = Digraph::new(4, (0..4).flat_map(|u| (0..4).filter(move |&v| v != u).map(move |v| (u, v)))).unwrap();
        let c = ConvexDigraph::with_order(&d, VertexOrder::Identity);
        let t = AntiTree::from_arcs(4, [(0, 1), (2, 1), (2, 3)]).unwrap();
        let table = good_arcs(&c, &t).unwrap();
        assert!(!table.final_good().is_empty());
        for arc in table.final_good() {
            let m = table.witness_partial(4, arc).unwrap();
            let (x, y) = (m[3].unwrap(), m[2].unwrap());
            let imgs: Vec<VertexId> = m.iter().flatten().copied().collect();
            assert!(imgs.iter().all(|&z| !c.strictly_between(y, x, z)));
        }
    }

    #[test]
    fn complete_host_embeds_every_small_caterpillar() {
        for k in 1..=5 {
            let n = k + 1;
            let d = Digraph::new(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))).unwrap();
            for t in crate::tree::enumerate_antitrees(k).unwrap() {
                if t.caterpillar_decompose().is_ok() {
                    let e = embed_caterpillar(&d, &t, VertexOrder::Identity).unwrap();
                    assert_eq!(e.validate(&t, &d), Ok(()));
                }
            }
        }
    }

    #[test]
    fn single_arc_into_d1() {
        let d = Digraph::new(3, [(0, 1), (2, 1)]).unwrap();
        let t = AntiTree::from_arcs(2, [(0, 1)]).unwrap();
        assert_eq!(embed_caterpillar(&d, &t, VertexOrder::Identity).unwrap().map(), &[0, 1]);
    }

    #[test]
    fn density_refusal() {
        let d = Digraph::new(3, [(0, 1), (2, 1)]).unwrap();
        let t = AntiTree::from_arcs(3, [(0, 1), (2, 1)]).unwrap();
        assert!(matches!(
            embed_caterpillar(&d, &t, VertexOrder::Identity),
            Err(EmbedError::HypothesisViolated(Refusal::Density { .. }))
        ));
    }

    #[test]
    fn mindeg_direct_and_reversed() {
        // |D+| = 2 ≤ |D-| = 3 and the out-star has |T+| = 1 ≤ |T-| = 2.
        let d = Digraph::new(4, [(0, 1), (0, 2), (0, 3), (1, 2)]).unwrap();
        let star = AntiTree::from_arcs(3, [(0, 1), (0, 2)]).unwrap();
        let e = embed_caterpillar_mindeg(&d, &star).unwrap();
        assert_eq!(e.validate(&star, &d), Ok(()));
        let (rd, rs) = (d.reverse(), star.reverse());
        let e = embed_caterpillar_mindeg(&rd, &rs).unwrap();
        assert_eq!(e.validate(&rs, &rd), Ok(()));
        // Unbalanced: |D+| < |D-| but |T+| > |T-|.
        assert!(matches!(
            embed_caterpillar_mindeg(&d, &rs),
            Err(EmbedError::HypothesisViolated(Refusal::SignBalance { .. }))
        ));
    }
}
