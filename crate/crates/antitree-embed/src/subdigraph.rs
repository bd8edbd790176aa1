//! Degree pruning and the subdigraph selector.
//!
//! All `k/2` thresholds are compared as `2·deg < k`.

use serde::Serialize;

use crate::digraph::{Arc, Digraph, VertexId};
use crate::error::{EmbedError, Refusal};

pub(crate) fn density_ok(d: &Digraph, k: usize) -> Result<(), EmbedError> {
    let needed = (k.saturating_sub(1)) * d.n();
    if d.arc_count() > needed {
        Ok(())
    } else {
        Err(EmbedError::HypothesisViolated(Refusal::Density { arcs: d.arc_count(), needed }))
    }
}

/// Deletes all out-arcs of any vertex with 0 < deg⁺ < k/2 and all in-arcs of any
/// vertex with 0 < deg⁻ < k/2, least vertex first, until nothing changes.
pub fn prune_pseudo(d: &Digraph, k: usize) -> Result<Digraph, EmbedError> {
    density_ok(d, k)?;
    let (g, triggers, deleted) = prune_to_fixpoint(d, k);
    let n = d.n();
    // Each vertex side triggers at most once and removes fewer than k/2 arcs.
    if triggers > 2 * n || deleted > (k - 1) * n || deleted >= d.arc_count() {
        return Err(EmbedError::assertion(
            "pseudo-count",
            format!("{triggers} triggers deleted {deleted} of {} arcs", d.arc_count()),
        ));
    }
    let p = g.degree_profile();
    if 2 * p.delta0_bar < k {
        return Err(EmbedError::assertion("pseudo-degree", format!("delta0_bar = {} < k/2", p.delta0_bar)));
    }
    Ok(g)
}

/// The deletion loop alone, with no density requirement. Also returns the number
/// of triggering vertex sides and of deleted arcs.
pub fn prune_to_fixpoint(d: &Digraph, k: usize) -> (Digraph, usize, usize) {
    let n = d.n();
    let mut out: Vec<Vec<VertexId>> = (0..n).map(|v| d.out_neighbors(v).to_vec()).collect();
    let mut inn: Vec<Vec<VertexId>> = (0..n).map(|v| d.in_neighbors(v).to_vec()).collect();
    let low = |deg: usize| deg > 0 && 2 * deg < k;
    let (mut deleted, mut triggers) = (0usize, 0usize);
    loop {
        let hit = (0..n).find_map(|v| {
            if low(out[v].len()) {
                Some((v, true))
            } else if low(inn[v].len()) {
                Some((v, false))
            } else {
                None
            }
        });
        let Some((v, outgoing)) = hit else { break };
        triggers += 1;
        if outgoing {
            for w in std::mem::take(&mut out[v]) {
                inn[w].retain(|&x| x != v);
                deleted += 1;
            }
        } else {
            for w in std::mem::take(&mut inn[v]) {
                out[w].retain(|&x| x != v);
                deleted += 1;
            }
        }
    }
    let keep: Vec<Arc> = d.arcs().iter().copied().filter(|a| out[a.tail].contains(&a.head)).collect();
    (d.induced_subdigraph(&keep).expect("subset of arcs"), triggers, deleted)
}

/// u⁺ (index u on side A) is joined to v⁻ (index v on side B) for every arc uv.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BipartiteGraph {
    pub side: usize,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl BipartiteGraph {
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let (mut da, mut db) = (vec![0; self.side], vec![0; self.side]);
        for &(a, b) in &self.edges {
            da[a] += 1;
            db[b] += 1;
        }
        (da, db)
    }
}

pub fn split_bipartite(d: &Digraph) -> BipartiteGraph {
    BipartiteGraph { side: d.n(), edges: d.arcs().iter().map(|a| (a.tail, a.head)).collect() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SelectionCase {
    I,
    II,
}

/// Output of [`prune_bipartite`]: the surviving vertices of each side and edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrunedBipartite {
    pub graph: BipartiteGraph,
    pub alive_a: Vec<bool>,
    pub alive_b: Vec<bool>,
    pub case: SelectionCase,
    pub second_loop: bool,
}

struct Pruner {
    adj_a: Vec<Vec<VertexId>>,
    adj_b: Vec<Vec<VertexId>>,
    alive_a: Vec<bool>,
    alive_b: Vec<bool>,
    edges: usize,
    k: usize,
}

impl Pruner {
    fn vertices(&self) -> usize {
        self.alive_a.iter().chain(&self.alive_b).filter(|&&x| x).count()
    }

    fn dense(&self) -> bool {
        2 * self.edges > (self.k - 1) * self.vertices()
    }

    fn kill_a(&mut self, a: VertexId) {
        self.alive_a[a] = false;
        for b in std::mem::take(&mut self.adj_a[a]) {
            self.adj_b[b].retain(|&x| x != a);
            self.edges -= 1;
        }
    }

    fn kill_b(&mut self, b: VertexId) {
        self.alive_b[b] = false;
        for a in std::mem::take(&mut self.adj_b[b]) {
            self.adj_a[a].retain(|&x| x != b);
            self.edges -= 1;
        }
    }

    fn check(&self, what: &str) -> Result<(), EmbedError> {
        if self.dense() {
            Ok(())
        } else {
            Err(EmbedError::assertion(
                "obs-deleting",
                format!("after {what}: e(H) = {} with |H| = {}", self.edges, self.vertices()),
            ))
        }
    }
}

/// Prunes H until the pairwise degree-sum condition and one of the two end cases hold.
pub fn prune_bipartite(h: &BipartiteGraph, k: usize, r: usize) -> Result<PrunedBipartite, EmbedError> {
    let n = h.side;
    if r == 0 || r > k.div_ceil(2) {
        return Err(EmbedError::precondition(format!("r = {r} must lie in 1..=ceil(k/2)")));
    }
    let mut p = Pruner {
        adj_a: vec![Vec::new(); n],
        adj_b: vec![Vec::new(); n],
        alive_a: vec![true; n],
        alive_b: vec![true; n],
        edges: h.edges.len(),
        k,
    };
    for &(a, b) in &h.edges {
        p.adj_a[a].push(b);
        p.adj_b[b].push(a);
    }
    if !p.dense() {
        return Err(EmbedError::HypothesisViolated(Refusal::Density { arcs: h.edges.len(), needed: (k - 1) * n }));
    }
    // First loop.
    loop {
        if let Some(a) = (0..n).find(|&a| p.alive_a[a] && 2 * p.adj_a[a].len() < k) {
            p.kill_a(a);
            p.check("deleting a low A-vertex")?;
            continue;
        }
        let min_b = (0..n).filter(|&b| p.alive_b[b]).map(|b| p.adj_b[b].len()).min();
        let pair = min_b.and_then(|mb| {
            let a = (0..n).find(|&a| p.alive_a[a] && p.adj_a[a].len() + mb < k)?;
            let b = (0..n).find(|&b| p.alive_b[b] && p.adj_a[a].len() + p.adj_b[b].len() < k)?;
            Some((a, b))
        });
        match pair {
            Some((a, b)) => {
                p.kill_a(a);
                p.kill_b(b);
                p.check("deleting a low pair")?;
            }
            None => break,
        }
    }
    let count = |v: &[bool]| v.iter().filter(|&&x| x).count();
    if count(&p.alive_a) > count(&p.alive_b) {
        return Err(EmbedError::assertion("bipartite-iii", "first loop left |A| > |B|"));
    }
    let all_b_high = (0..n).all(|b| !p.alive_b[b] || p.adj_b[b].len() >= r);
    let (case, second_loop) = if all_b_high {
        (SelectionCase::I, false)
    } else {
        loop {
            let a = (0..n).find(|&a| p.alive_a[a] && 2 * p.adj_a[a].len() < k);
            let b = (0..n).find(|&b| p.alive_b[b] && 2 * p.adj_b[b].len() < k);
            match (a, b) {
                (Some(a), _) => p.kill_a(a),
                (None, Some(b)) => p.kill_b(b),
                (None, None) => break,
            }
            p.check("deleting a vertex of degree below k/2")?;
        }
        let case = if count(&p.alive_a) > count(&p.alive_b) { SelectionCase::II } else { SelectionCase::I };
        (case, true)
    };
    let edges = (0..n).flat_map(|a| p.adj_a[a].iter().map(move |&b| (a, b))).collect();
    Ok(PrunedBipartite { graph: BipartiteGraph { side: n, edges }, alive_a: p.alive_a, alive_b: p.alive_b, case, second_loop })
}

/// Counts backing conditions (1) and (2) and the case conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionAudit {
    pub arcs: usize,
    pub plus: usize,
    pub minus: usize,
    pub min_pair_sum: usize,
    pub delta_plus_bar: usize,
    pub delta_minus_bar: usize,
    pub max_out: usize,
    pub max_in: usize,
    pub min_host_out_on_plus: usize,
    pub second_loop: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionResult {
    #[serde(skip)]
    pub sub: Digraph,
    pub case: SelectionCase,
    pub witness: VertexId,
    pub k: usize,
    pub r: usize,
    pub audit: SelectionAudit,
}

/// Selects D′ ⊆ D with conditions (1), (2) and case (3-I) or (3-II).
pub fn select_subdigraph(d: &Digraph, k: usize, r: usize) -> Result<SelectionResult, EmbedError> {
    if k == 0 || k > d.n() {
        return Err(EmbedError::precondition(format!("k = {k} must lie in 1..=n = {}", d.n())));
    }
    density_ok(d, k)?;
    let pruned = prune_bipartite(&split_bipartite(d), k, r)?;
    let keep: Vec<Arc> = pruned.graph.edges.iter().map(|&(a, b)| Arc::new(a, b)).collect();
    let mut keep_sorted = keep.clone();
    keep_sorted.sort_unstable();
    // Keep D's arc order.
    let arcs: Vec<Arc> = d.arcs().iter().copied().filter(|a| keep_sorted.binary_search(a).is_ok()).collect();
    let sub = d.induced_subdigraph(&arcs).expect("edges come from D");
    let p = sub.degree_profile();
    let witness = match pruned.case {
        SelectionCase::I => (0..d.n()).find(|&a| p.out_deg[a] >= k),
        SelectionCase::II => (0..d.n()).find(|&b| p.in_deg[b] >= k),
    };
    let Some(witness) = witness else {
        return Err(EmbedError::assertion("selection-witness", format!("no high-degree vertex in case {:?}", pruned.case)));
    };
    let res = SelectionResult { audit: audit(d, &sub, pruned.second_loop), sub, case: pruned.case, witness, k, r };
    let failures = res.violations(d);
    if !failures.is_empty() {
        return Err(EmbedError::assertion("selection-audit", failures.join("; ")));
    }
    Ok(res)
}

fn audit(d: &Digraph, sub: &Digraph, second_loop: bool) -> SelectionAudit {
    let p = sub.degree_profile();
    let (plus, minus) = sub.plus_minus_sets();
    let min_out = plus.iter().map(|&a| p.out_deg[a]).min().unwrap_or(0);
    let min_in = minus.iter().map(|&b| p.in_deg[b]).min().unwrap_or(0);
    SelectionAudit {
        arcs: sub.arc_count(),
        plus: plus.len(),
        minus: minus.len(),
        min_pair_sum: min_out + min_in,
        delta_plus_bar: p.delta_plus_bar,
        delta_minus_bar: p.delta_minus_bar,
        max_out: p.max_out,
        max_in: p.max_in,
        min_host_out_on_plus: plus.iter().map(|&a| d.out_degree(a)).min().unwrap_or(0),
        second_loop,
    }
}

impl SelectionResult {
    /// Rechecks every condition from scratch on `self.sub`; returns the failed ones.
    pub fn violations(&self, d: &Digraph) -> Vec<String> {
        let (k, r, sub) = (self.k, self.r, &self.sub);
        let mut bad = Vec::new();
        let p = sub.degree_profile();
        let (plus, minus) = sub.plus_minus_sets();
        if sub.arc_count() == 0 {
            bad.push("D' is empty".to_string());
        }
        if 2 * sub.arc_count() <= (k - 1) * (plus.len() + minus.len()) {
            bad.push(format!("(1): 2a(D') = {} <= (k-1)(|D'+|+|D'-|)", 2 * sub.arc_count()));
        }
        for &a in &plus {
            if let Some(&b) = minus.iter().find(|&&b| p.out_deg[a] + p.in_deg[b] < k) {
                bad.push(format!("(2): deg+({a}) + deg-({b}) < k"));
                break;
            }
        }
        if sub.arcs().iter().any(|a| !d.has_arc(a.tail, a.head)) {
            bad.push("D' is not a subdigraph of D".to_string());
        }
        match self.case {
            SelectionCase::I => {
                if 2 * p.delta_plus_bar < k {
                    bad.push("(3-I): delta+bar < k/2".into());
                }
                if p.delta_minus_bar < r {
                    bad.push("(3-I): delta-bar < r".into());
                }
                if p.out_deg[self.witness] < k {
                    bad.push("(3-I): witness out-degree < k".into());
                }
                if plus.len() > minus.len() {
                    bad.push("(3-I): |D'+| > |D'-|".into());
                }
            }
            SelectionCase::II => {
                if 2 * p.delta0_bar < k {
                    bad.push("(3-II): delta0bar < k/2".into());
                }
                if p.in_deg[self.witness] < k {
                    bad.push("(3-II): witness in-degree < k".into());
                }
                if let Some(&a) = plus.iter().find(|&&a| d.out_degree(a) + r <= k) {
                    bad.push(format!("(3-II): deg+_D({a}) <= k - r"));
                }
            }
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Digraph {
        Digraph::new(n, (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn pseudo_keeps_complete() {
        let d = complete(5);
        assert_eq!(prune_pseudo(&d, 4).unwrap(), d);
        // D1 is below the density bound for k = 2, but the loop leaves it alone.
        let d1 = Digraph::new(3, [(0, 1), (2, 1)]).unwrap();
        assert!(prune_pseudo(&d1, 2).is_err());
        assert_eq!(prune_to_fixpoint(&d1, 2), (d1, 0, 0));
    }

    #[test]
    fn pseudo_cascade() {
        // Complete core on 0..6 plus a path 6 -> 7 -> 8 hanging off vertex 0.
        let mut arcs: Vec<(usize, usize)> =
            (0..6).flat_map(|u| (0..6).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        arcs.extend([(0, 6), (6, 7), (7, 8)]);
        let d = Digraph::new(9, arcs).unwrap();
        let k = 4;
        assert!(d.arc_count() > (k - 1) * 9);
        let g = prune_pseudo(&d, k).unwrap();
        let p = g.degree_profile();
        assert!(2 * p.delta0_bar >= k);
        assert_eq!(g.arc_count(), 30);
        assert!(p.out_deg[6..].iter().chain(&p.in_deg[6..]).all(|&x| x == 0));
    }

    #[test]
    fn pseudo_refuses_sparse() {
        assert!(matches!(prune_pseudo(&Digraph::new(3, [(0, 1)]).unwrap(), 2), Err(EmbedError::HypothesisViolated(_))));
    }

    #[test]
    fn split_d1() {
        let d1 = Digraph::new(3, [(0, 1), (2, 1)]).unwrap();
        let h = split_bipartite(&d1);
        assert_eq!(h.edges, vec![(0, 1), (2, 1)]);
        let (da, db) = h.degrees();
        assert_eq!((da, db), (vec![1, 0, 1], vec![0, 2, 0]));
        assert!(split_bipartite(&Digraph::empty(3)).edges.is_empty());
    }

    #[test]
    fn complete_bipartite_is_kept() {
        let m = 5;
        let h = BipartiteGraph { side: m, edges: (0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect() };
        let out = prune_bipartite(&h, 4, 2).unwrap();
        assert_eq!(out.graph.edges.len(), 25);
        assert_eq!(out.case, SelectionCase::I);
        assert!(!out.second_loop);
    }

    #[test]
    fn low_b_vertex_enters_second_loop() {
        // A side 0..6 complete to B side 0..5; B vertex 6 has a single edge.
        let k = 6;
        let mut edges: Vec<(usize, usize)> = (0..7).flat_map(|a| (0..6).map(move |b| (a, b))).collect();
        edges.push((0, 6));
        let h = BipartiteGraph { side: 7, edges };
        let out = prune_bipartite(&h, k, 2).unwrap();
        assert!(out.second_loop);
        assert_eq!(out.case, SelectionCase::II);
        let (da, _) = h.degrees();
        for a in 0..7 {
            if out.alive_a[a] {
                assert!(da[a] > k - 2);
            }
        }
    }

    #[test]
    fn select_on_complete() {
        let k = 4;
        let d = complete(2 * k);
        let s = select_subdigraph(&d, k, k.div_ceil(2)).unwrap();
        assert!(s.violations(&d).is_empty());
        assert_eq!(s.case, SelectionCase::I);
    }

    #[test]
    fn select_rejects_bad_r() {
        let d = complete(8);
        assert!(select_subdigraph(&d, 4, 3).is_err());
        assert!(select_subdigraph(&d, 4, 0).is_err());
    }
}
