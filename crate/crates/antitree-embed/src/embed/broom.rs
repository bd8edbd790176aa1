//! Δ₂ ≥ ⌊k/4⌋+3: choose the core by case, embed the double broom of the two
//! top-degree vertices, then extend to the whole tree.

use std::cell::RefCell;

use serde::Serialize;

use crate::convex::embed_caterpillar_mindeg;
use crate::digraph::{Digraph, Sign, VertexId};
use crate::error::EmbedError;
use crate::subdigraph::{select_subdigraph, SelectionCase, SelectionResult};
use crate::tree::{AntiTree, DoubleBroom};

use super::state::{extend_with_moves, find_stall, greedy_extend, placed_component, Ctx, Partial, RunState};
use super::Branch;

/// The case split for one tree and host, with the selected core.
#[derive(Clone, Debug, Serialize)]
pub struct BroomPlan {
    pub branch: Branch,
    pub sel: SelectionResult,
    pub broom: DoubleBroom,
    pub delta: usize,
    pub delta2: usize,
    /// Case A via |B| ≤ 3k/4 rather than the padded broom.
    pub small: bool,
}

impl BroomPlan {
    pub fn from_parts(t: &AntiTree, sel: SelectionResult, branch: Branch) -> Result<Self, EmbedError> {
        let st = t.degree_stats();
        let broom = t.double_broom(st.argmax_u, st.argmax2_v)?;
        let small = 4 * broom.vertices.len() <= 3 * sel.k;
        Ok(BroomPlan { branch, sel, broom, delta: st.delta, delta2: st.delta2, small })
    }
}

/// Evaluates the case predicates and runs the subdigraph selection with the case's r.
pub fn broom_case(d: &Digraph, t: &AntiTree, k: usize) -> Result<BroomPlan, EmbedError> {
    let st = t.degree_stats();
    let (u, v, delta, delta2) = (st.argmax_u, st.argmax2_v, st.delta, st.delta2);
    let broom = t.double_broom(u, v)?;
    let nb = broom.vertices.len();
    let small = 4 * nb <= 3 * k;
    let padded = t.sign(v) == Sign::Minus && 12 * (delta + delta2) < 7 * k && nb + (delta - delta2) <= k + 1;
    let (branch, sel) = if small || padded {
        (Branch::BroomA, select_subdigraph(d, k, k.div_ceil(2))?)
    } else {
        let r = (5 * k).div_ceil(12).min(k - delta);
        let sel = select_subdigraph(d, k, r)?;
        match sel.case {
            SelectionCase::I => (Branch::BroomBI, sel),
            SelectionCase::II => {
                if sel.audit.min_host_out_on_plus + r <= k {
                    return Err(EmbedError::assertion(
                        "B-II-outdeg",
                        format!("a core out-vertex has host out-degree {} ≤ k − r", sel.audit.min_host_out_on_plus),
                    ));
                }
                (Branch::BroomBII, sel)
            }
        }
    };
    Ok(BroomPlan { branch, sel, broom, delta, delta2, small })
}

pub(crate) fn big_delta2(d: &Digraph, t: &AntiTree, k: usize, plan: &BroomPlan, run: &RefCell<RunState>) -> Result<Vec<VertexId>, EmbedError> {
    let partial = broom_only(d, t, k, plan, run)?;
    extend(d, t, k, plan, &partial, run)
}

fn in_broom(t: &AntiTree, b: &DoubleBroom) -> Vec<bool> {
    let mut s = vec![false; t.order()];
    for &x in &b.vertices {
        s[x] = true;
    }
    s
}

fn all_leaves(t: &AntiTree) -> Vec<bool> {
    (0..t.order()).map(|x| t.is_leaf(x)).collect()
}

fn only(t: &AntiTree, x: VertexId) -> Vec<bool> {
    (0..t.order()).map(|y| y == x).collect()
}

/// Places the sign-neighbours of placed `x`: non-relaxed ones in the core, relaxed
/// ones preferring vertices outside it.
fn place_star(cx: &Ctx, p: &mut Partial, x: VertexId, scope: &[bool], tag: &str) -> Result<(), EmbedError> {
    let t = cx.tree;
    let mut kids: Vec<VertexId> = t.neighbors(x).iter().copied().filter(|&c| scope[c] && !p.placed(c)).collect();
    kids.sort_by_key(|&c| (cx.relaxed[c], c));
    for c in kids {
        let mut hs = cx.candidates(p, x, c);
        if cx.relaxed[c] {
            hs.sort_by_key(|&h| (cx.in_core[h], h));
        }
        cx.check(tag, !hs.is_empty(), || format!("no image left for neighbour {c} of {x}"))?;
        p.place(c, hs[0]);
    }
    Ok(())
}

fn to_options(p: &Partial, scope: &[bool]) -> Vec<Option<VertexId>> {
    p.map.iter().enumerate().map(|(x, h)| if scope[x] { *h } else { None }).collect()
}

/// Relabels the broom, runs the minimum-degree caterpillar embedding and maps back.
fn broom_by_catmindeg(core: &Digraph, t: &AntiTree, b: &DoubleBroom, pad: usize, cx: &Ctx) -> Result<Option<Vec<Option<VertexId>>>, EmbedError> {
    let (bt, ids) = t.induced_subtree(&b.vertices)?;
    let nb = ids.len();
    let bt = if pad > 0 {
        let vi = ids.iter().position(|&x| x == b.v).unwrap();
        let mut arcs: Vec<(VertexId, VertexId)> = bt.digraph().arcs().iter().map(|a| (a.tail, a.head)).collect();
        arcs.extend((0..pad).map(|i| (nb + i, vi)));
        AntiTree::from_arcs(nb + pad, arcs)?
    } else {
        bt
    };
    cx.check("padded-size", pad == 0 || bt.order() <= cx.k + 1, || format!("|B'| = {} > k + 1", bt.order()))?;
    match embed_caterpillar_mindeg(core, &bt) {
        Ok(e) => {
            let mut out = vec![None; t.order()];
            for (i, &x) in ids.iter().enumerate() {
                out[x] = Some(e.image(i));
            }
            Ok(Some(out))
        }
        Err(EmbedError::InternalAssertion(a)) => {
            cx.note(format!("caterpillar embedding of the broom failed ({}); using greedy extension", a.tag));
            cx.event("catmindeg-fallback");
            Ok(None)
        }
        Err(e) => {
            cx.note(format!("caterpillar embedding of the broom refused: {e}; using greedy extension"));
            cx.event("catmindeg-fallback");
            Ok(None)
        }
    }
}

/// u at the least core vertex of out-degree at least Δ, then greedy extension with moves.
fn broom_greedy(cx: &Ctx, plan: &BroomPlan, tag: &str) -> Result<Vec<Option<VertexId>>, EmbedError> {
    let t = cx.tree;
    let u = plan.broom.u;
    let scope = in_broom(t, &plan.broom);
    let a = (0..cx.core.n()).find(|&a| cx.core.out_degree(a) >= plan.delta);
    cx.check("broom-anchor", a.is_some(), || format!("no core vertex with out-degree ≥ Δ = {}", plan.delta))?;
    let mut p = Partial::new(t.order(), cx.host.n());
    p.place(u, a.unwrap());
    place_star(cx, &mut p, u, &scope, tag)?;
    let rv = t.rooted_view_unchecked(u);
    if let Some((z, z2)) = extend_with_moves(cx, &mut p, &rv, &scope, &only(t, u)) {
        return cx.fail(tag, format!("stall at {z} -> {z2}; {}", cx.k4_detail(&p, &[(p.image(u), Sign::Plus), (p.image(z), t.sign(z)), (p.image(z), t.sign(z))])));
    }
    Ok(to_options(&p, &scope))
}

pub(crate) fn broom_only(d: &Digraph, t: &AntiTree, k: usize, plan: &BroomPlan, run: &RefCell<RunState>) -> Result<Vec<Option<VertexId>>, EmbedError> {
    let core = &plan.sel.sub;
    match plan.branch {
        Branch::BroomA => {
            let cx = Ctx::new(core, core, t, k, run);
            if plan.small {
                cx.note("case A, |B| ≤ 3k/4: greedy".into());
                return broom_greedy(&cx, plan, "A-I-greedy");
            }
            let pad = plan.delta - plan.delta2;
            cx.check("padded-count", 12 * pad < k, || format!("Δ − Δ₂ = {pad} ≥ k/12"))?;
            match broom_by_catmindeg(core, t, &plan.broom, pad, &cx)? {
                Some(m) => Ok(m),
                None => broom_greedy(&cx, plan, "A-II-greedy"),
            }
        }
        Branch::BroomBI => {
            let cx = Ctx::new(core, core, t, k, run);
            match broom_by_catmindeg(core, t, &plan.broom, 0, &cx)? {
                Some(m) => Ok(m),
                None => broom_greedy(&cx, plan, "B-I-greedy"),
            }
        }
        Branch::BroomBII => broom_b2(d, t, k, plan, run),
        other => Err(EmbedError::precondition(format!("{other:?} is not a double-broom case"))),
    }
}

fn broom_b2(d: &Digraph, t: &AntiTree, k: usize, plan: &BroomPlan, run: &RefCell<RunState>) -> Result<Vec<Option<VertexId>>, EmbedError> {
    let core = &plan.sel.sub;
    let cx = Ctx::new(d, core, t, k, run).with_relaxed(all_leaves(t));
    let b = &plan.broom;
    let (u, v) = (b.u, b.v);
    let (delta, delta2, r) = (plan.delta, plan.delta2, plan.sel.r);
    let scope = in_broom(t, b);
    let mut p = Partial::new(t.order(), d.n());
    let seven = (7 * k).div_ceil(12);
    if r + delta == k && r < (5 * k).div_ceil(12) {
        cx.note("case B-II with r = k − Δ".into());
        return broom_greedy(&cx, plan, "B-II-greedy");
    }
    cx.check("degaD'712", plan.sel.audit.min_host_out_on_plus >= seven, || {
        format!("a core out-vertex has host out-degree {} < ⌈7k/12⌉", plan.sel.audit.min_host_out_on_plus)
    })?;
    if b.path_uv.len() == 2 {
        // Double star: u on an in-neighbour of the high in-degree witness, v on the witness.
        let w = plan.sel.witness;
        let a = core.in_neighbors(w).iter().copied().filter(|&a| d.out_degree(a) >= delta).min();
        cx.check("double-star", a.is_some(), || format!("no in-neighbour of {w} with out-degree ≥ Δ"))?;
        p.place(u, a.unwrap());
        p.place(v, w);
        place_star(&cx, &mut p, u, &scope, "double-star")?;
        place_star(&cx, &mut p, v, &scope, "double-star")?;
        cx.event("double-star");
        return Ok(to_options(&p, &scope));
    }
    let diff = delta - delta2;
    let leaves_of = |y: VertexId| t.neighbors(y).iter().filter(|&&c| t.is_leaf(c)).count();
    let (x, y, label) = if 12 * diff >= k {
        (u, v, "i")
    } else if t.sign(v) == Sign::Plus {
        if 12 * leaves_of(v) >= k {
            (u, v, "ii")
        } else {
            (v, u, "ii")
        }
    } else {
        (v, u, "iii")
    };
    cx.note(format!("case B-II ({label}): x = {x}, y = {y}"));
    if label == "ii" {
        cx.check("leaves-y", 12 * leaves_of(y) >= k, || format!("|L_y| = {} < k/12", leaves_of(y)))?;
    }
    let hx = if label == "iii" {
        Some(plan.sel.witness)
    } else {
        (0..d.n()).find(|&a| core.out_degree(a) > 0 && d.out_degree(a) >= seven)
    };
    cx.check("eq:eeeee", hx.is_some(), || "no core vertex with host out-degree ≥ ⌈7k/12⌉".into())?;
    p.place(x, hx.unwrap());
    place_star(&cx, &mut p, x, &scope, "T1")?;
    let rv = t.rooted_view_unchecked(x);
    if let Some((z, z2)) = extend_with_moves(&cx, &mut p, &rv, &scope, &only(t, x)) {
        let tag = if z == y { "eq:r_1<" } else { "claim:maximum-i" };
        return cx.fail(tag, format!("stall at {z} -> {z2} with {} of {} broom vertices embedded", p.size, b.vertices.len()));
    }
    Ok(to_options(&p, &scope))
}

fn partial_from(t: &AntiTree, n: usize, partial: &[Option<VertexId>]) -> Result<Partial, EmbedError> {
    if partial.len() != t.order() {
        return Err(EmbedError::precondition("partial map has the wrong length"));
    }
    let mut p = Partial::new(t.order(), n);
    for (x, h) in partial.iter().enumerate() {
        if let Some(h) = *h {
            if h >= n || p.used(h) {
                return Err(EmbedError::precondition(format!("partial map is not injective at {x}")));
            }
            p.place(x, h);
        }
    }
    Ok(p)
}

pub(crate) fn extend(
    d: &Digraph,
    t: &AntiTree,
    k: usize,
    plan: &BroomPlan,
    partial: &[Option<VertexId>],
    run: &RefCell<RunState>,
) -> Result<Vec<VertexId>, EmbedError> {
    let core = &plan.sel.sub;
    let all = vec![true; t.order()];
    let none = vec![false; t.order()];
    let (u, v) = (plan.broom.u, plan.broom.v);
    match plan.branch {
        Branch::BroomA | Branch::BroomBII => {
            let cx = if plan.branch == Branch::BroomA {
                Ctx::new(core, core, t, k, run)
            } else {
                Ctx::new(d, core, t, k, run).with_relaxed(all_leaves(t))
            };
            let mut p = partial_from(t, d.n(), partial)?;
            for x in 0..t.order() {
                if p.placed(x) {
                    let ok = cx.vertex_ok(x, p.image(x))
                        && t.neighbors(x).iter().all(|&y| !p.placed(y) || cx.arc_ok(x, p.image(x), y, p.image(y)));
                    cx.check("broom-contract", ok, || format!("the broom map is not valid at {x}"))?;
                }
            }
            let rv = t.rooted_view_unchecked(u);
            if let Some((w, w2)) = extend_with_moves(&cx, &mut p, &rv, &all, &none) {
                let hw = p.image(w);
                let z = if w == u { v } else { u };
                return cx.fail(
                    "claim:outside-caterpillar",
                    format!("stall at {w} -> {w2}; {}", cx.k4_detail(&p, &[(hw, t.sign(w)), (hw, t.sign(w)), (p.image(z), t.sign(z))])),
                );
            }
            Ok(p.complete().unwrap())
        }
        Branch::BroomBI => {
            let cx = Ctx::new(core, core, t, k, run);
            if plan.sel.r + plan.delta == k && plan.sel.r < (5 * k).div_ceil(12) {
                t_star(&cx, plan)
            } else {
                exchange(&cx, plan, partial)
            }
        }
        other => Err(EmbedError::precondition(format!("{other:?} is not a double-broom case"))),
    }
}

/// Δ ≥ ⌈7k/12⌉: u on the witness, then the tree without u's leaves in the order
/// rest, non-leaf children of u off the path, their descendants, and finally u's leaves.
fn t_star(cx: &Ctx, plan: &BroomPlan) -> Result<Vec<VertexId>, EmbedError> {
    let t = cx.tree;
    let u = plan.broom.u;
    let rv = t.rooted_view_unchecked(u);
    let on_path = |x: VertexId| plan.broom.path_uv.contains(&x);
    let lbar: Vec<VertexId> = rv.children[u].iter().copied().filter(|&c| !t.is_leaf(c) && !on_path(c)).collect();
    let mut in_du = vec![false; t.order()];
    for &c in &lbar {
        for x in super::state::descendants(&rv, c) {
            in_du[x] = true;
        }
    }
    let mut p = Partial::new(t.order(), cx.host.n());
    p.place(u, plan.sel.witness);
    let first: Vec<bool> = (0..t.order())
        .map(|x| !(rv.parent[x] == Some(u) && (t.is_leaf(x) || lbar.contains(&x))) && !in_du[x])
        .collect();
    greedy_extend(cx, &mut p, &first);
    let missing = (0..t.order()).filter(|&x| first[x] && !p.placed(x)).count();
    cx.check("T*-first", missing == 0, || format!("{missing} vertices of T* \\ (L'_u ∪ D_u) left"))?;
    for &c in &lbar {
        let h = cx.candidates(&p, u, c).first().copied();
        cx.check("T*-children", h.is_some(), || "witness ran out of out-neighbours".into())?;
        p.place(c, h.unwrap());
    }
    let mut second = first.clone();
    for x in 0..t.order() {
        second[x] |= in_du[x] || lbar.contains(&x);
    }
    if let Some((z, _)) = extend_with_moves(cx, &mut p, &rv, &second, &only(t, u)) {
        return cx.fail("eq:T^*", format!("stall at {z} while embedding D_u"));
    }
    for &c in &rv.children[u] {
        if !p.placed(c) {
            let h = cx.candidates(&p, u, c).first().copied();
            cx.check("T*-leaves", h.is_some(), || "witness ran out of out-neighbours".into())?;
            p.place(c, h.unwrap());
        }
    }
    Ok(p.complete().expect("all parts placed"))
}

/// Δ ≤ ⌊7k/12⌋: maximal extension; on a stall at w, free a neighbour of f(w) held
/// by an outermost x* and rebuild from the side of w keeping most of the broom.
fn exchange(cx: &Ctx, plan: &BroomPlan, partial: &[Option<VertexId>]) -> Result<Vec<VertexId>, EmbedError> {
    let t = cx.tree;
    let n = t.order();
    let all = vec![true; n];
    let none = vec![false; n];
    let b = &plan.broom;
    let in_b = in_broom(t, b);
    let mut f = partial_from(t, cx.host.n(), partial)?;
    let rv_u = t.rooted_view_unchecked(b.u);
    let mut on_path = vec![false; n];
    for &x in &b.path_uv {
        on_path[x] = true;
    }
    loop {
        extend_with_moves(cx, &mut f, &rv_u, &all, &none);
        let Some((w, w2)) = find_stall(cx, &f, &all) else { break };
        cx.check("w-not-uv", w != b.u && w != b.v, || format!("stall at {w}, one of u, v"))?;
        let sigma = t.sign(w);
        let hw = f.image(w);
        let nbrs = cx.core.neighbors(hw, sigma);
        cx.check("eq:neighbors-w", nbrs.iter().all(|&h| f.used(h)), || format!("f({w}) has a free neighbour"))?;
        let rw = t.rooted_view_unchecked(w);
        let mut in_rw = vec![false; n];
        let mut x = w;
        in_rw[x] = true;
        while !on_path[x] {
            x = rv_u.parent[x].expect("the path is above w");
            in_rw[x] = true;
        }
        for &y in t.neighbors(w) {
            if f.placed(y) {
                in_rw[y] = true;
            }
        }
        let xs: Vec<VertexId> = nbrs.iter().filter_map(|&h| f.owner[h]).filter(|&x| !in_rw[x]).collect();
        cx.check("X-nonempty", !xs.is_empty(), || format!("every neighbour of f({w}) is used by R_w"))?;
        let outer: Vec<VertexId> = xs
            .iter()
            .copied()
            .filter(|&x| !xs.iter().any(|&x2| x2 != x && t.path(w, x2).contains(&x)))
            .collect();
        cx.check("X*-nonempty", !outer.is_empty(), String::new)?;
        let mut ranked: Vec<(usize, VertexId, Vec<bool>)> = outer
            .iter()
            .map(|&xs| {
                let c = placed_component(cx, &f, w, Some(xs));
                let score = (0..n).filter(|&y| c[y] && in_b[y]).count();
                (score, xs, c)
            })
            .collect();
        ranked.sort_by_key(|(score, x, _)| (std::cmp::Reverse(*score), *x));
        let first = cx.pick(&ranked.iter().map(|r| r.1).collect::<Vec<_>>());
        let order: Vec<usize> =
            first.iter().filter_map(|&x| ranked.iter().position(|r| r.1 == x)).chain(0..ranked.len()).collect();
        let mut grown = false;
        for i in order {
            let (_, xstar, ref comp) = ranked[i];
            let mut g = f.restricted(comp);
            let h = f.image(xstar);
            if !cx.can_place(&g, w2, h) {
                continue;
            }
            g.place(w2, h);
            extend_with_moves(cx, &mut g, &rw, &all, &none);
            if g.size > f.size {
                cx.event("x-star-exchange");
                f = g;
                grown = true;
                break;
            }
        }
        if !grown {
            let tag = if ranked.len() > 1 { "last-eq" } else { "second-to-last-eq" };
            return cx.fail(
                tag,
                format!("{} of {n} embedded, no x* exchange grows it; {}", f.size, cx.k4_detail(&f, &[(hw, sigma), (f.image(b.u), Sign::Plus), (f.image(b.v), t.sign(b.v))])),
            );
        }
    }
    Ok(f.complete().expect("no stall left"))
}
