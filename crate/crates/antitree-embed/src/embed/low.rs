//! Trees of maximum degree at most ⌊k/4⌋, embedded into the pruned core.

use std::cell::RefCell;
use std::cmp::Reverse;

use crate::digraph::{Digraph, VertexId};
use crate::error::EmbedError;
use crate::tree::AntiTree;

use super::state::{descendants, find_stall, greedy_extend, placed_component, Ctx, Partial, RunState};

pub(crate) fn low_delta(
    host: &Digraph,
    core: &Digraph,
    t: &AntiTree,
    k: usize,
    run: &RefCell<RunState>,
) -> Result<Vec<VertexId>, EmbedError> {
    let cx = Ctx::new(host, core, t, k, run);
    let n = t.order();
    let q = cx.quarter();
    let all = vec![true; n];
    let mut f = Partial::new(n, host.n());
    let h0 = (0..core.n()).find(|&h| core.degree(h, t.sign(0)) > 0);
    cx.check("core-nonempty", h0.is_some(), || "the core has no arcs".into())?;
    f.place(0, h0.unwrap());
    greedy_extend(&cx, &mut f, &all);
    let mut rounds = 0;
    while let Some((w, w2)) = find_stall(&cx, &f, &all) {
        rounds += 1;
        cx.check("rounds", rounds <= n, || format!("{rounds} rounds without completing"))?;
        let sigma = t.sign(w);
        let rv = t.rooted_view_unchecked(w);
        let hw = f.image(w);
        let nbrs = core.neighbors(hw, sigma);
        cx.check("maximal-T'", nbrs.iter().all(|&h| f.used(h)), || format!("f({w}) has a free neighbour"))?;
        // Y: embedded non-neighbours of w sitting on neighbours of f(w).
        let ys: Vec<VertexId> = nbrs.iter().map(|&h| f.owner[h].unwrap()).filter(|&y| !t.adjacent(w, y)).collect();
        cx.check("Y-size", ys.len() >= q, || format!("|Y| = {} < ⌊k/4⌋ = {q}", ys.len()))?;
        let far = ys.iter().map(|&y| rv.depth[y]).max().unwrap_or(0);
        let mut cands: Vec<(VertexId, Option<VertexId>)> = Vec::new();
        let mut sorted = ys.clone();
        sorted.sort_by_key(|&y| (Reverse(rv.depth[y]), y));
        if far >= 3 {
            cands = sorted.iter().filter(|&&y| rv.depth[y] == far).map(|&y| (y, None)).collect();
        } else {
            // Distance two: y needs a spare slot next to its parent.
            for &y in &sorted {
                let py = rv.parent[y].unwrap();
                let slot = core
                    .neighbors(f.image(py), t.sign(py))
                    .iter()
                    .copied()
                    .find(|&h| !f.used(h) && cx.vertex_ok(y, h));
                if let Some(h) = slot {
                    cands.push((y, Some(h)));
                }
            }
        }
        cx.check("choice-b", !cands.is_empty(), || {
            format!("no y at distance {far} with a free slot; {}", cx.k4_detail(&f, &[(hw, sigma), (hw, sigma), (hw, sigma)]))
        })?;
        let (y, y_new) = cx.pick(&cands).unwrap();
        let hy = f.image(y);
        let comp = placed_component(&cx, &f, w, Some(y));
        let mut g = f.restricted(&comp);
        g.place(w2, hy);
        if let Some(h) = y_new {
            g.place(y, h);
        }
        // z_F loop: each pass re-embeds a vertex strictly further from w.
        let mut last_dist = 0;
        loop {
            greedy_extend(&cx, &mut g, &all);
            if g.size > f.size || g.size == n {
                cx.event("low-delta-exchange");
                f = g;
                break;
            }
            let z = (0..n)
                .filter(|&x| g.placed(x) && x != w && t.neighbors(x).iter().any(|&c| f.placed(c) && !g.placed(c)))
                .max_by_key(|&x| (rv.depth[x], Reverse(x)));
            cx.check("zF-exists", z.is_some(), || "T_F covers T' but is not larger".into())?;
            let z = z.unwrap();
            let dz = rv.depth[z];
            cx.check("dist-increase", dz > last_dist, || format!("dist(w, z_F) = {dz} after {last_dist}"))?;
            last_dist = dz;
            let pz = rv.parent[z].unwrap();
            cx.check("pzinotw", pz != w, || format!("z_F = {z} is a child of w"))?;
            let sz = t.sign(z);
            cx.check("eq:neighborhood-z", core.neighbors(g.image(z), sz).iter().all(|&h| g.used(h)), || {
                format!("g(z_F) = {} has a free neighbour", g.image(z))
            })?;
            let kids = rv.children[z].clone();
            cx.check("N_F", kids.len() < q.max(1), || format!("z_F has {} children, Δ ≤ {q}", kids.len()))?;
            for x in descendants(&rv, z) {
                g.unplace(x);
            }
            g.unplace(z);
            let hp = g.image(pz);
            let mut bs: Vec<(VertexId, Vec<VertexId>)> = Vec::new();
            for &b in core.neighbors(hp, t.sign(pz)) {
                if !cx.can_place(&g, z, b) {
                    continue;
                }
                let xs: Vec<VertexId> = core.neighbors(b, sz).iter().copied().filter(|&h| !g.used(h)).collect();
                if xs.len() >= kids.len() {
                    bs.push((b, xs));
                }
            }
            cx.check("allhappy63", !bs.is_empty(), || {
                cx.k4_detail(&g, &[(hw, sigma), (hp, t.sign(pz)), (hp, t.sign(pz))])
            })?;
            let (b, _) = cx.pick(&bs).unwrap();
            g.place(z, b);
            for &c in &kids {
                let h = cx.candidates(&g, z, c).first().copied();
                cx.check("eq:image-z", h.is_some(), || format!("no slot for child {c} of z_F"))?;
                g.place(c, h.unwrap());
            }
            cx.event("low-delta-reembed");
        }
    }
    Ok(f.complete().expect("no stall means every vertex is placed"))
}
