//! Partial embeddings, the validity rules shared by every stage, greedy extension
//! and the local moves used to unstick a stalled extension.

use std::cell::RefCell;

use crate::digraph::{Digraph, Sign, VertexId};
use crate::error::{AssertionFailure, EmbedError};
use crate::freeness::k4_bound_check;
use crate::tree::{AntiTree, RootedAntiTree};

use super::Trace;

/// Mutable bookkeeping for one attempt: the trace and the choice-point counter.
pub(crate) struct RunState {
    pub trace: Trace,
    pub deviate_at: Option<usize>,
    pub choices: usize,
}

impl RunState {
    pub fn new(deviate_at: Option<usize>) -> Self {
        RunState { trace: Trace::default(), deviate_at, choices: 0 }
    }
}

/// Where a tree may go. Non-relaxed tree vertices must land in the core and arcs
/// between two of them must be core arcs; arcs at a relaxed vertex may be any host arc.
pub(crate) struct Ctx<'a> {
    pub host: &'a Digraph,
    pub core: &'a Digraph,
    pub in_core: Vec<bool>,
    pub tree: &'a AntiTree,
    pub relaxed: Vec<bool>,
    pub k: usize,
    pub run: &'a RefCell<RunState>,
}

impl<'a> Ctx<'a> {
    pub fn new(host: &'a Digraph, core: &'a Digraph, tree: &'a AntiTree, k: usize, run: &'a RefCell<RunState>) -> Self {
        let in_core = (0..core.n()).map(|h| core.out_degree(h) + core.in_degree(h) > 0).collect();
        Ctx {
            host,
            core,
            in_core,
            tree,
            relaxed: vec![false; tree.order()],
            k,
            run,
        }
    }

    pub fn with_relaxed(mut self, relaxed: Vec<bool>) -> Self {
        self.relaxed = relaxed;
        self
    }

    pub fn quarter(&self) -> usize {
        self.k / 4
    }

    pub fn check(&self, tag: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<(), EmbedError> {
        let mut run = self.run.borrow_mut();
        if ok {
            *run.trace.checkpoints.entry(tag.to_string()).or_default() += 1;
            Ok(())
        } else {
            Err(EmbedError::InternalAssertion(AssertionFailure { tag: tag.to_string(), detail: detail() }))
        }
    }

    pub fn fail<T>(&self, tag: &str, detail: String) -> Result<T, EmbedError> {
        Err(EmbedError::InternalAssertion(AssertionFailure { tag: tag.to_string(), detail }))
    }

    pub fn event(&self, name: &str) {
        *self.run.borrow_mut().trace.events.entry(name.to_string()).or_default() += 1;
    }

    pub fn note(&self, msg: String) {
        self.run.borrow_mut().trace.notes.push(msg);
    }

    /// Least candidate, except at the one choice point this attempt deviates at.
    pub fn pick<T: Clone>(&self, cands: &[T]) -> Option<T> {
        let mut run = self.run.borrow_mut();
        let i = run.choices;
        run.choices += 1;
        run.trace.choice_points += 1;
        if run.deviate_at == Some(i) && cands.len() > 1 {
            Some(cands[1].clone())
        } else {
            cands.first().cloned()
        }
    }

    pub fn vertex_ok(&self, x: VertexId, h: VertexId) -> bool {
        self.relaxed[x] || self.in_core[h]
    }

    /// Digraph whose arcs may carry the tree edge between `x` and `y`.
    pub fn pool(&self, x: VertexId, y: VertexId) -> &Digraph {
        if self.relaxed[x] || self.relaxed[y] {
            self.host
        } else {
            self.core
        }
    }

    pub fn arc_ok(&self, x: VertexId, hx: VertexId, y: VertexId, hy: VertexId) -> bool {
        let pool = self.pool(x, y);
        match self.tree.sign(x) {
            Sign::Plus => pool.has_arc(hx, hy),
            Sign::Minus => pool.has_arc(hy, hx),
        }
    }

    /// `h` is free and compatible with every placed neighbour of `x`.
    pub fn can_place(&self, p: &Partial, x: VertexId, h: VertexId) -> bool {
        !p.used(h)
            && !p.blocked[h]
            && self.vertex_ok(x, h)
            && self.tree.neighbors(x).iter().all(|&y| match p.map[y] {
                Some(hy) => self.arc_ok(x, h, y, hy),
                None => true,
            })
    }

    /// Valid images for unplaced `y` next to placed `x`, least first.
    pub fn candidates(&self, p: &Partial, x: VertexId, y: VertexId) -> Vec<VertexId> {
        let hx = p.image(x);
        self.pool(x, y).neighbors(hx, self.tree.sign(x)).iter().copied().filter(|&h| self.can_place(p, y, h)).collect()
    }

    /// Sum of the three probe degrees into the image, for assertion messages.
    pub fn k4_detail(&self, p: &Partial, probes: &[(VertexId, Sign)]) -> String {
        let img = p.images();
        match k4_bound_check(self.core, self.k, &img, probes) {
            Some(r) => format!("probes {probes:?} send {} arcs into an image of size {} (5k/4 bound holds: {})", r.sum, img.len(), r.holds),
            None => format!("image size {}", img.len()),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Partial {
    pub map: Vec<Option<VertexId>>,
    pub owner: Vec<Option<VertexId>>,
    pub blocked: Vec<bool>,
    pub size: usize,
}

impl Partial {
    pub fn new(tree_order: usize, host_order: usize) -> Self {
        Partial { map: vec![None; tree_order], owner: vec![None; host_order], blocked: vec![false; host_order], size: 0 }
    }

    pub fn place(&mut self, x: VertexId, h: VertexId) {
        debug_assert!(self.map[x].is_none() && self.owner[h].is_none());
        self.map[x] = Some(h);
        self.owner[h] = Some(x);
        self.size += 1;
    }

    pub fn unplace(&mut self, x: VertexId) -> Option<VertexId> {
        let h = self.map[x].take()?;
        self.owner[h] = None;
        self.size -= 1;
        Some(h)
    }

    pub fn image(&self, x: VertexId) -> VertexId {
        self.map[x].expect("vertex is placed")
    }

    pub fn placed(&self, x: VertexId) -> bool {
        self.map[x].is_some()
    }

    pub fn used(&self, h: VertexId) -> bool {
        self.owner[h].is_some()
    }

    pub fn images(&self) -> Vec<VertexId> {
        self.map.iter().flatten().copied().collect()
    }

    /// Restriction to `keep`.
    pub fn restricted(&self, keep: &[bool]) -> Partial {
        let mut q = Partial::new(self.map.len(), self.owner.len());
        for (x, h) in self.map.iter().enumerate() {
            if let (true, Some(h)) = (keep[x], *h) {
                q.place(x, h);
            }
        }
        q
    }

    pub fn complete(&self) -> Option<Vec<VertexId>> {
        self.map.iter().copied().collect()
    }
}

/// Repeatedly gives each unplaced in-scope neighbour of a placed vertex its least
/// valid image, scanning placed vertices in ascending order. Returns the number added.
pub(crate) fn greedy_extend(cx: &Ctx, p: &mut Partial, scope: &[bool]) -> usize {
    let t = cx.tree;
    let start = p.size;
    loop {
        let mut changed = false;
        for x in 0..t.order() {
            if !p.placed(x) {
                continue;
            }
            for &y in t.neighbors(x) {
                if scope[y] && !p.placed(y) {
                    if let Some(&h) = cx.candidates(p, x, y).first() {
                        p.place(y, h);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return p.size - start;
        }
    }
}

/// Least placed vertex with an unplaced in-scope neighbour, and that neighbour.
pub(crate) fn find_stall(cx: &Ctx, p: &Partial, scope: &[bool]) -> Option<(VertexId, VertexId)> {
    (0..cx.tree.order()).filter(|&x| p.placed(x)).find_map(|x| {
        cx.tree.neighbors(x).iter().copied().find(|&y| scope[y] && !p.placed(y)).map(|y| (x, y))
    })
}

/// Placed vertices reachable from `from` through placed vertices other than `cut`.
pub(crate) fn placed_component(cx: &Ctx, p: &Partial, from: VertexId, cut: Option<VertexId>) -> Vec<bool> {
    let mut seen = vec![false; cx.tree.order()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(x) = stack.pop() {
        for &y in cx.tree.neighbors(x) {
            if !seen[y] && p.placed(y) && Some(y) != cut {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Strict descendants of `z`.
pub(crate) fn descendants(r: &RootedAntiTree, z: VertexId) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut stack = r.children[z].clone();
    while let Some(x) = stack.pop() {
        out.push(x);
        stack.extend(r.children[x].iter().copied());
    }
    out
}

fn placed_degree(cx: &Ctx, p: &Partial, x: VertexId) -> usize {
    cx.tree.neighbors(x).iter().filter(|&&y| p.placed(y)).count()
}

/// Frees a neighbour of `f(z)` for `z2` by moving the current leaf that occupies it
/// to another image next to its attachment. Returns whether it moved anything.
pub(crate) fn relocate_for(cx: &Ctx, p: &mut Partial, z: VertexId, z2: VertexId, pinned: &[bool]) -> bool {
    let t = cx.tree;
    let hz = p.image(z);
    let mut options = Vec::new();
    for &h in cx.pool(z, z2).neighbors(hz, t.sign(z)) {
        let Some(x) = p.owner[h] else { continue };
        if pinned[x] || t.adjacent(x, z) || placed_degree(cx, p, x) != 1 {
            continue;
        }
        let a = *t.neighbors(x).iter().find(|&&y| p.placed(y)).expect("one placed neighbour");
        p.unplace(x);
        let ok_z2 = cx.can_place(p, z2, h);
        let alt = if ok_z2 {
            p.blocked[h] = true;
            let c = cx.candidates(p, a, x);
            p.blocked[h] = false;
            c.first().copied()
        } else {
            None
        };
        p.place(x, h);
        if let Some(h2) = alt {
            options.push((x, h, h2));
        }
    }
    match cx.pick(&options) {
        Some((x, h, h2)) => {
            p.unplace(x);
            p.place(x, h2);
            p.place(z2, h);
            cx.event("relocate-leaf");
            true
        }
        None => false,
    }
}

/// Moves `z` (whose placed children are all current leaves) to another image next to
/// its attachment, with room for every in-scope child of `z`.
pub(crate) fn move_root(cx: &Ctx, p: &mut Partial, r: &RootedAntiTree, z: VertexId, scope: &[bool], pinned: &[bool]) -> bool {
    let Some(a) = r.parent[z] else { return false };
    if pinned[z] || !p.placed(a) {
        return false;
    }
    let kids: Vec<VertexId> = r.children[z].iter().copied().filter(|&c| scope[c]).collect();
    if kids.iter().any(|&c| pinned[c] || (p.placed(c) && placed_degree(cx, p, c) != 1)) {
        return false;
    }
    // Lift z and its placed children, try every alternative image.
    let old_z = p.image(z);
    let old_kids: Vec<(VertexId, VertexId)> = kids.iter().filter_map(|&c| p.map[c].map(|h| (c, h))).collect();
    for &(c, _) in &old_kids {
        p.unplace(c);
    }
    p.unplace(z);
    let bs: Vec<VertexId> = cx.candidates(p, a, z).into_iter().filter(|&b| b != old_z).collect();
    for b in bs {
        p.place(z, b);
        let mut placed = Vec::new();
        for &c in &kids {
            match cx.candidates(p, z, c).first() {
                Some(&h) => {
                    p.place(c, h);
                    placed.push(c);
                }
                None => break,
            }
        }
        if placed.len() == kids.len() {
            cx.event("move-root");
            return true;
        }
        for c in placed {
            p.unplace(c);
        }
        p.unplace(z);
    }
    p.place(z, old_z);
    for (c, h) in old_kids {
        p.place(c, h);
    }
    false
}

/// Swaps a non-relaxed current leaf sitting next to `f(z)` with a relaxed leaf
/// sibling whose image is in the core, then relocates the relaxed one.
pub(crate) fn swap_then_relocate(cx: &Ctx, p: &mut Partial, z: VertexId, z2: VertexId, pinned: &[bool]) -> bool {
    let t = cx.tree;
    let hz = p.image(z);
    for &h in cx.pool(z, z2).neighbors(hz, t.sign(z)) {
        let Some(x) = p.owner[h] else { continue };
        if pinned[x] || cx.relaxed[x] || t.adjacent(x, z) || placed_degree(cx, p, x) != 1 {
            continue;
        }
        let a = *t.neighbors(x).iter().find(|&&y| p.placed(y)).expect("one placed neighbour");
        for &sib in t.neighbors(a) {
            if sib == x || !cx.relaxed[sib] || pinned[sib] || !p.placed(sib) || placed_degree(cx, p, sib) != 1 {
                continue;
            }
            let hs = p.image(sib);
            if !cx.in_core[hs] {
                continue;
            }
            p.unplace(x);
            p.unplace(sib);
            if cx.can_place(p, x, hs) {
                p.place(x, hs);
                if cx.can_place(p, sib, h) {
                    p.place(sib, h);
                    if relocate_for(cx, p, z, z2, pinned) {
                        cx.event("swap-leaves");
                        return true;
                    }
                    p.unplace(sib);
                }
                p.unplace(x);
            }
            p.place(x, h);
            p.place(sib, hs);
        }
    }
    false
}

/// Greedy extension interleaved with the local moves; every accepted move adds at
/// least one vertex. Returns the stall it could not resolve, if any.
pub(crate) fn extend_with_moves(
    cx: &Ctx,
    p: &mut Partial,
    r: &RootedAntiTree,
    scope: &[bool],
    pinned: &[bool],
) -> Option<(VertexId, VertexId)> {
    loop {
        greedy_extend(cx, p, scope);
        let stalls: Vec<(VertexId, VertexId)> = (0..cx.tree.order())
            .filter(|&x| p.placed(x))
            .flat_map(|x| cx.tree.neighbors(x).iter().copied().filter(|&y| scope[y] && !p.placed(y)).map(move |y| (x, y)))
            .collect();
        let Some(&first) = stalls.first() else { return None };
        let before = p.size;
        let moved = stalls.iter().any(|&(z, z2)| {
            relocate_for(cx, p, z, z2, pinned)
                || (r.parent[z2] == Some(z) && move_root(cx, p, r, z, scope, pinned))
                || swap_then_relocate(cx, p, z, z2, pinned)
        });
        if !moved {
            return Some(first);
        }
        debug_assert!(p.size > before);
    }
}
