//! Δ > ⌊k/4⌋ ≥ Δ₂ − 2: the top vertex u goes to a high out-degree anchor, the ball
//! of radius two around u first, then one layer of children at a time.

use std::cell::RefCell;
use std::cmp::Reverse;

use crate::digraph::{Digraph, Sign, VertexId};
use crate::error::EmbedError;
use crate::subdigraph::{select_subdigraph, SelectionCase};
use crate::tree::{AntiTree, RootedAntiTree};

use super::state::{find_stall, greedy_extend, placed_component, relocate_for, Ctx, Partial, RunState};

/// r = min(⌈k/2⌉, k−Δ+1)
pub(crate) fn mid_r(k: usize, delta: usize) -> usize {
    k.div_ceil(2).min(k + 1 - delta)
}

/// Leaves adjacent to `u`; only these may use host vertices outside the core.
pub(crate) fn leaves_at(t: &AntiTree, u: VertexId) -> Vec<bool> {
    let mut r = vec![false; t.order()];
    for &x in t.neighbors(u) {
        r[x] = t.is_leaf(x);
    }
    r
}

pub(crate) fn mid_delta(d: &Digraph, t: &AntiTree, k: usize, run: &RefCell<RunState>) -> Result<Vec<VertexId>, EmbedError> {
    let st = t.degree_stats();
    let (u, delta) = (st.argmax_u, st.delta);
    let r = mid_r(k, delta);
    let sel = select_subdigraph(d, k, r)?;
    let core = &sel.sub;
    let relaxed = leaves_at(t, u);
    let note = |m: String| run.borrow_mut().trace.notes.push(m);
    match sel.case {
        SelectionCase::II => {
            let anchor = (0..d.n()).find(|&a| core.out_degree(a) > 0 && d.out_degree(a) >= delta);
            let Some(anchor) = anchor else {
                return Err(EmbedError::assertion("anchor-II", format!("no core out-vertex with host out-degree ≥ Δ = {delta}")));
            };
            note(format!("case II, anchor {anchor}"));
            wide_star(d, core, t, k, u, anchor, &relaxed, run)
        }
        SelectionCase::I if r == k.div_ceil(2) => {
            note(format!("case I, anchor {}", sel.witness));
            wide_star(d, core, t, k, u, sel.witness, &relaxed, run)
        }
        SelectionCase::I => {
            // r = k−Δ+1 < ⌈k/2⌉: strip Δ−r leaves of u, embed the rest with k' = 2r−1.
            let leaves: Vec<VertexId> = t.neighbors(u).iter().copied().filter(|&x| t.is_leaf(x)).collect();
            let strip = delta - r;
            if leaves.len() < strip + 1 {
                return Err(EmbedError::assertion("strip-leaves", format!("u has {} leaves, needs {}", leaves.len(), strip + 1)));
            }
            let gone: Vec<VertexId> = leaves[leaves.len() - strip..].to_vec();
            let kept: Vec<VertexId> = (0..t.order()).filter(|x| !gone.contains(x)).collect();
            let (ts, ids) = t.induced_subtree(&kept)?;
            let k2 = ts.k();
            if k2 != 2 * r - 1 {
                return Err(EmbedError::assertion("strip-count", format!("T* has {k2} arcs, expected {}", 2 * r - 1)));
            }
            let u2 = ids.iter().position(|&x| x == u).unwrap();
            let relaxed2: Vec<bool> = ids.iter().map(|&x| relaxed[x]).collect();
            note(format!("case I, stripped {strip} leaves, k' = {k2}"));
            let inner = wide_star(d, core, &ts, k2, u2, sel.witness, &relaxed2, run)?;
            let mut map = vec![usize::MAX; t.order()];
            let mut used = vec![false; d.n()];
            for (i, &x) in ids.iter().enumerate() {
                map[x] = inner[i];
                used[inner[i]] = true;
            }
            let mut free = core.out_neighbors(sel.witness).iter().copied().filter(|&h| !used[h]);
            for &x in &gone {
                match free.next() {
                    Some(h) => map[x] = h,
                    None => return Err(EmbedError::assertion("reattach", "the witness ran out of out-neighbours")),
                }
            }
            *run.borrow_mut().trace.events.entry("strip-reattach".into()).or_default() += strip;
            Ok(map)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn wide_star(
    d: &Digraph,
    core: &Digraph,
    t: &AntiTree,
    k: usize,
    u: VertexId,
    anchor: VertexId,
    relaxed: &[bool],
    run: &RefCell<RunState>,
) -> Result<Vec<VertexId>, EmbedError> {
    let cx = Ctx::new(d, core, t, k, run).with_relaxed(relaxed.to_vec());
    let rv = t.rooted_view_unchecked(u);
    let mut scope: Vec<bool> = rv.depth.iter().map(|&x| x <= 2).collect();
    let mut p = Partial::new(t.order(), d.n());
    radius_two(&cx, &mut p, &rv, anchor, &scope)?;
    for &w in &rv.order {
        if rv.depth[w] < 2 || rv.children[w].is_empty() {
            continue;
        }
        for &c in &rv.children[w] {
            scope[c] = true;
        }
        layer_step(&cx, &mut p, &rv, w, &scope)?;
    }
    Ok(p.complete().expect("every layer is embedded"))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn radius_two_full(
    d: &Digraph,
    core: &Digraph,
    t: &AntiTree,
    k: usize,
    u: VertexId,
    anchor: VertexId,
    relaxed: &[bool],
    run: &RefCell<RunState>,
) -> Result<Vec<VertexId>, EmbedError> {
    let cx = Ctx::new(d, core, t, k, run).with_relaxed(relaxed.to_vec());
    let rv = t.rooted_view_unchecked(u);
    let mut p = Partial::new(t.order(), d.n());
    radius_two(&cx, &mut p, &rv, anchor, &vec![true; t.order()])?;
    Ok(p.complete().expect("radius two covers the tree"))
}

fn radius_two(cx: &Ctx, p: &mut Partial, rv: &RootedAntiTree, anchor: VertexId, scope: &[bool]) -> Result<(), EmbedError> {
    let t = cx.tree;
    let u = rv.root;
    cx.check("anchor", cx.vertex_ok(u, anchor) && cx.host.out_degree(anchor) >= t.degree(u), || {
        format!("anchor {anchor} has out-degree {} < {}", cx.host.out_degree(anchor), t.degree(u))
    })?;
    p.place(u, anchor);
    let kids = &rv.children[u];
    for &c in kids.iter().filter(|&&c| !cx.relaxed[c]) {
        let h = cx.candidates(p, u, c).first().copied();
        cx.check("pu-children", h.is_some(), || format!("no core out-neighbour of the anchor left for {c}"))?;
        p.place(c, h.unwrap());
    }
    for &c in kids.iter().filter(|&&c| cx.relaxed[c]) {
        // Leaves of u prefer vertices outside the core.
        let mut hs = cx.candidates(p, u, c);
        hs.sort_by_key(|&h| (cx.in_core[h], h));
        cx.check("pu-children", !hs.is_empty(), || format!("no out-neighbour of the anchor left for leaf {c}"))?;
        p.place(c, hs[0]);
    }
    let pinned: Vec<bool> = (0..t.order()).map(|x| x == u).collect();
    loop {
        greedy_extend(cx, p, scope);
        let Some((w, w2)) = find_stall(cx, p, scope) else { return Ok(()) };
        cx.check("pu-depth", rv.depth[w] == 1, || format!("stall at depth {}", rv.depth[w]))?;
        let sigma = t.sign(w);
        let hw = p.image(w);
        let mut cands: Vec<(VertexId, VertexId, VertexId)> = Vec::new();
        let mut first_py = None;
        for &h in cx.core.neighbors(hw, sigma) {
            let Some(y) = p.owner[h] else { continue };
            if rv.depth[y] != 2 || rv.parent[y] == Some(w) {
                continue;
            }
            let py = rv.parent[y].unwrap();
            first_py.get_or_insert(py);
            if let Some(&h2) = cx.candidates(p, py, y).first() {
                cands.push((y, h, h2));
            }
        }
        if let Some((y, h, h2)) = cx.pick(&cands) {
            p.unplace(y);
            p.place(y, h2);
            p.place(w2, h);
            cx.event("pu-exchange");
            continue;
        }
        if relocate_for(cx, p, w, w2, &pinned) {
            continue;
        }
        let py = first_py.unwrap_or(w);
        return cx.fail("pu-k4", cx.k4_detail(p, &[(anchor, Sign::Plus), (hw, sigma), (p.image(py), t.sign(py))]));
    }
}

fn place_children(cx: &Ctx, p: &mut Partial, w: VertexId, kids: &[VertexId]) -> bool {
    let mut done = Vec::new();
    for &c in kids {
        if p.placed(c) {
            continue;
        }
        match cx.candidates(p, w, c).first() {
            Some(&h) => {
                p.place(c, h);
                done.push(c);
            }
            None => {
                for x in done {
                    p.unplace(x);
                }
                return false;
            }
        }
    }
    true
}

fn move_to(p: &mut Partial, x: VertexId, h: VertexId) -> VertexId {
    let old = p.unplace(x).expect("placed");
    p.place(x, h);
    old
}

/// Embeds the children of `w` on top of the layers built so far.
fn layer_step(cx: &Ctx, p: &mut Partial, rv: &RootedAntiTree, w: VertexId, scope: &[bool]) -> Result<(), EmbedError> {
    let t = cx.tree;
    let sigma = t.sign(w);
    let kids = rv.children[w].clone();
    let pw = rv.parent[w].unwrap();
    let mut path = vec![pw];
    while let Some(a) = rv.parent[*path.last().unwrap()] {
        path.push(a);
    }
    let mut in_r = vec![false; t.order()];
    for &x in path.iter().chain([&w]) {
        in_r[x] = true;
    }
    let dist = t.distances(w);
    let mut prior = scope.to_vec();
    for &c in &kids {
        prior[c] = false;
    }
    for _ in 0..4 * cx.k + 4 {
        if place_children(cx, p, w, &kids) {
            return Ok(());
        }
        let hp = p.image(pw);
        let old = move_to_none(p, w);
        let bs: Vec<VertexId> = cx.candidates(p, pw, w).into_iter().filter(|&b| b != old).collect();
        p.place(w, old);
        cx.check("eq:B1", !bs.is_empty(), || format!("every {}-neighbour of f(p_w) = {hp} is used", t.sign(pw).symbol()))?;
        let pool = cx.core;
        let free_at = |p: &Partial, h: VertexId| pool.neighbors(h, sigma).iter().filter(|&&z| !p.used(z)).count();
        // Move w to an image with room for all its children.
        for &b in &bs {
            if free_at(p, b) >= kids.len() {
                let back = move_to(p, w, b);
                if place_children(cx, p, w, &kids) {
                    cx.event("layer-move-w");
                    return Ok(());
                }
                move_to(p, w, back);
            }
        }
        // Improvement move: fewer arcs back into the path, then more free neighbours.
        let on_path = |h: VertexId| cx.host.neighbors(h, sigma).iter().filter(|&&z| p.owner[z].is_some_and(|x| in_r[x] && x != w)).count();
        let key = |h: VertexId| (on_path(h), Reverse(free_at(p, h)));
        let here = key(p.image(w));
        if let Some(&b) = bs.iter().min_by_key(|&&b| (key(b), b)) {
            if key(b) < here {
                move_to(p, w, b);
                cx.event("choicephi");
                continue;
            }
        }
        // Free a neighbour of f(w) by re-embedding the branch holding it.
        let b1 = p.image(w);
        let mut ys: Vec<VertexId> =
            pool.neighbors(b1, sigma).iter().filter_map(|&h| p.owner[h]).filter(|&y| !in_r[y]).collect();
        ys.sort_by_key(|&y| (Reverse(dist[y]), y));
        let first = cx.pick(&ys);
        let order = first.into_iter().chain(ys.iter().copied());
        let mut moved = false;
        for y in order {
            if try_y_move(cx, p, w, y, &prior) {
                cx.event("y-move");
                moved = true;
                break;
            }
        }
        if !moved {
            let rn = ys.len();
            return cx.fail(
                "eq:neighbors-b1-inR",
                format!("{rn} candidates y around f(w) = {b1}, none re-embeds; |R| = {}; {}", path.len() + 1, cx.k4_detail(p, &[(b1, sigma), (hp, t.sign(pw)), (p.image(rv.root), Sign::Plus)])),
            );
        }
    }
    cx.fail("eq:R-order", format!("children of {w} still not embedded after {} rounds", 4 * cx.k + 4))
}

fn move_to_none(p: &mut Partial, x: VertexId) -> VertexId {
    p.unplace(x).expect("placed")
}

/// Re-embeds the part of the tree behind `y` so that `f(y)` becomes free.
fn try_y_move(cx: &Ctx, p: &mut Partial, w: VertexId, y: VertexId, prior: &[bool]) -> bool {
    let t = cx.tree;
    let path = t.path(y, w);
    let a = path[1];
    let comp = placed_component(cx, p, w, Some(y));
    if !comp[a] {
        return false;
    }
    let old = p.image(y);
    let mut q = p.restricted(&comp);
    q.blocked[old] = true;
    let Some(&h) = cx.candidates(&q, a, y).first() else { return false };
    q.place(y, h);
    greedy_extend(cx, &mut q, prior);
    if q.size == p.size {
        q.blocked[old] = false;
        *p = q;
        true
    } else {
        false
    }
}
