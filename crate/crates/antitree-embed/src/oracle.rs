//! Exact backtracking search for tree embeddings, and a brute-force reading of
//! good arcs used to cross-check the dynamic programme.

use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::convex::ConvexDigraph;
use crate::digraph::{Arc, Digraph, Sign, VertexId};
use crate::embedding::Embedding;
use crate::error::EmbedError;
use crate::tree::AntiTree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "witness")]
pub enum OracleVerdict {
    Embeds(Embedding),
    NotContained,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub max_depth: usize,
    #[serde(serialize_with = "millis")]
    pub elapsed: Duration,
    pub verdict: OracleVerdict,
}

fn millis<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1000.0)
}

impl SearchStats {
    pub fn embeds(&self) -> bool {
        matches!(self.verdict, OracleVerdict::Embeds(_))
    }
}

/// Least vertex whose removal leaves components of size at most half the tree.
pub fn centroid(t: &AntiTree) -> VertexId {
    let r = t.rooted_view_unchecked(0);
    let n = t.order();
    let mut size = vec![1usize; n];
    for &x in r.order.iter().rev() {
        if let Some(p) = r.parent[x] {
            size[p] += size[x];
        }
    }
    (0..n)
        .find(|&x| {
            let up = n - size[x];
            up * 2 <= n && r.children[x].iter().all(|&c| size[c] * 2 <= n)
        })
        .expect("every tree has a centroid")
}

struct Search<'a> {
    d: &'a Digraph,
    t: &'a AntiTree,
    order: Vec<VertexId>,
    parent: Vec<Option<VertexId>>,
    children: Vec<usize>,
    map: Vec<VertexId>,
    used: Vec<bool>,
    nodes: u64,
    budget: Option<u64>,
    max_depth: usize,
    exhausted: bool,
}

impl Search<'_> {
    fn candidates(&self, x: VertexId) -> Vec<VertexId> {
        let sx = self.t.sign(x);
        let need = self.t.degree(x);
        let pool: Vec<VertexId> = match self.parent[x] {
            None => (0..self.d.n()).collect(),
            Some(p) => self.d.neighbors(self.map[p], self.t.sign(p)).to_vec(),
        };
        let mut c: Vec<(usize, VertexId)> = pool
            .into_iter()
            .filter(|&h| !self.used[h] && self.d.degree(h, sx) >= need)
            .filter(|&h| {
                // Forward check: enough free neighbours for the children.
                let kids = self.children[x];
                kids == 0 || self.d.neighbors(h, sx).iter().filter(|&&z| !self.used[z]).count() >= kids
            })
            .map(|h| (self.d.degree(h, sx) - need, h))
            .collect();
        c.sort_unstable();
        c.into_iter().map(|(_, h)| h).collect()
    }

    fn run(&mut self, i: usize) -> bool {
        if i == self.order.len() {
            return true;
        }
        self.max_depth = self.max_depth.max(i);
        let x = self.order[i];
        for h in self.candidates(x) {
            if let Some(b) = self.budget {
                if self.nodes >= b {
                    self.exhausted = true;
                    return false;
                }
            }
            self.nodes += 1;
            self.map[x] = h;
            self.used[h] = true;
            if self.run(i + 1) {
                return true;
            }
            self.used[h] = false;
            if self.exhausted {
                return false;
            }
        }
        false
    }
}

/// Decides whether `t` embeds in `d`. With a budget the search may stop early
/// and report [`OracleVerdict::Inconclusive`].
pub fn oracle_embed(d: &Digraph, t: &AntiTree, budget: Option<u64>) -> SearchStats {
    let start = Instant::now();
    let root = centroid(t);
    let r = t.rooted_view_unchecked(root);
    let mut s = Search {
        d,
        t,
        children: r.children.iter().map(|c| c.len()).collect(),
        order: r.order,
        parent: r.parent,
        map: vec![usize::MAX; t.order()],
        used: vec![false; d.n()],
        nodes: 0,
        budget,
        max_depth: 0,
        exhausted: false,
    };
    let verdict = if t.order() > d.n() {
        OracleVerdict::NotContained
    } else if s.run(0) {
        let e = Embedding::new(s.map.clone());
        debug_assert!(e.validate(t, d).is_ok());
        OracleVerdict::Embeds(e)
    } else if s.exhausted {
        OracleVerdict::Inconclusive
    } else {
        OracleVerdict::NotContained
    };
    SearchStats { nodes_expanded: s.nodes, max_depth: s.max_depth, elapsed: start.elapsed(), verdict }
}

/// Every embedding of `t` into `d`, in lexicographic order of the map.
pub fn all_embeddings(d: &Digraph, t: &AntiTree) -> Vec<Embedding> {
    fn go(d: &Digraph, t: &AntiTree, x: usize, map: &mut Vec<VertexId>, used: &mut [bool], out: &mut Vec<Embedding>) {
        if x == t.order() {
            out.push(Embedding::new(map.clone()));
            return;
        }
        for h in 0..d.n() {
            if used[h] {
                continue;
            }
            let ok = t.neighbors(x).iter().filter(|&&y| y < x).all(|&y| {
                let a = t.arc_between(x, y);
                let img = |v: VertexId| if v == x { h } else { map[v] };
                d.has_arc(img(a.tail), img(a.head))
            });
            if ok {
                used[h] = true;
                map.push(h);
                go(d, t, x + 1, map, used, out);
                map.pop();
                used[h] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(d, t, 0, &mut Vec::with_capacity(t.order()), &mut vec![false; d.n()], &mut out);
    out
}

/// Good arcs read off directly from the definition by trying every embedding:
/// the image of the final edge, with the parity side free of images.
pub fn brute_force_good_arcs(c: &ConvexDigraph<'_>, t: &AntiTree) -> Result<Vec<Arc>, EmbedError> {
    let sd = t.caterpillar_decompose()?;
    let len = sd.spine.len();
    let (last, prev) = (sd.spine[len - 1], sd.spine[len - 2]);
    let mut good: Vec<Arc> = Vec::new();
    for e in all_embeddings(c.digraph(), t) {
        let (x, y) = (e.image(last), e.image(prev));
        let (from, to) = if len % 2 == 1 { (x, y) } else { (y, x) };
        if e.map().iter().all(|&z| !c.strictly_between(from, to, z)) {
            let a = match t.sign(last) {
                Sign::Plus => Arc::new(x, y),
                Sign::Minus => Arc::new(y, x),
            };
            good.push(a);
        }
    }
    good.sort_unstable();
    good.dedup();
    Ok(good)
}
