//! The tree embedder: orientation normalisation, hypothesis checks, dispatch on the
//! two largest degrees, and the per-case constructive procedures.

mod broom;
mod low;
mod state;
mod wide;

use std::cell::RefCell;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::convex::embed_caterpillar_retrying;
use crate::digraph::{Digraph, Sign, VertexId};
use crate::embedding::Embedding;
use crate::error::{AssertionFailure, EmbedError, Refusal};
use crate::freeness::{is_k2s_free, s_for};
use crate::oracle::{oracle_embed, OracleVerdict};
use crate::subdigraph::{density_ok, prune_pseudo, SelectionResult};
use crate::tree::AntiTree;

pub use broom::{broom_case, BroomPlan};

use state::RunState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Caterpillar,
    LowDelta,
    MidDelta,
    BroomA,
    BroomBI,
    BroomBII,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseTag {
    pub branch: Branch,
    pub k: usize,
    pub s: usize,
    pub delta: usize,
    pub delta2: usize,
    /// Degree parameter passed to the subdigraph selection, when one was made.
    pub r: Option<usize>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Trace {
    pub case: Option<CaseTag>,
    /// The tree's top vertex was an in-vertex, so tree and host were reversed.
    pub flipped: bool,
    pub attempts: usize,
    pub choice_points: usize,
    /// Assertion tag -> number of times it was checked and held.
    pub checkpoints: BTreeMap<String, usize>,
    /// Exchange moves and other counted events.
    pub events: BTreeMap<String, usize>,
    pub notes: Vec<String>,
    /// Assertions raised by abandoned attempts.
    pub assertions: Vec<AssertionFailure>,
}

#[derive(Clone, Debug)]
pub struct EmbedOptions {
    /// Re-runs with one deviating choice point after an internal assertion.
    pub backtrack_depth: usize,
    pub oracle_budget: u64,
    /// Ask the oracle for ground truth after an internal assertion.
    pub fallback: bool,
    /// Ask the oracle for ground truth after a refusal too.
    pub force_oracle: bool,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions { backtrack_depth: 3, oracle_budget: 1_000_000, fallback: true, force_oracle: false }
    }
}

#[derive(Clone, Debug)]
pub struct EmbedOutcome {
    pub embedding: Option<Embedding>,
    pub failure: Option<EmbedError>,
    pub oracle: Option<OracleVerdict>,
    pub trace: Trace,
}

impl EmbedOutcome {
    fn success(e: Embedding, trace: Trace) -> Self {
        EmbedOutcome { embedding: Some(e), failure: None, oracle: None, trace }
    }

    fn failed(err: EmbedError, trace: Trace) -> Self {
        EmbedOutcome { embedding: None, failure: Some(err), oracle: None, trace }
    }

    pub fn is_success(&self) -> bool {
        self.embedding.is_some()
    }

    pub fn is_refusal(&self) -> bool {
        matches!(self.failure, Some(EmbedError::HypothesisViolated(_)) | Some(EmbedError::Tree(_)))
    }

    pub fn is_assertion(&self) -> bool {
        matches!(self.failure, Some(EmbedError::InternalAssertion(_)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let failure = self.failure.as_ref().map(|f| match f {
            EmbedError::HypothesisViolated(r) => serde_json::json!({"kind": "refusal", "refusal": r, "message": f.to_string()}),
            EmbedError::InternalAssertion(a) => serde_json::json!({"kind": "assertion", "tag": a.tag, "detail": a.detail}),
            EmbedError::Tree(e) => serde_json::json!({"kind": "tree", "message": e.to_string()}),
        });
        serde_json::json!({
            "success": self.is_success(),
            "embedding": self.embedding,
            "failure": failure,
            "oracle": self.oracle,
            "trace": self.trace,
        })
    }
}

fn refuse(r: Refusal) -> EmbedError {
    EmbedError::HypothesisViolated(r)
}

/// Runs `body` once, then again with one deviating choice point per retry, up to
/// `depth` retries. Assertions from abandoned attempts are kept in the trace.
fn with_net<F>(depth: usize, trace: &mut Trace, body: F) -> Result<Vec<VertexId>, EmbedError>
where
    F: Fn(&RefCell<RunState>) -> Result<Vec<VertexId>, EmbedError>,
{
    let mut last = None;
    for attempt in 0..=depth {
        let run = RefCell::new(RunState::new(attempt.checked_sub(1)));
        let res = body(&run);
        let state = run.into_inner();
        trace.attempts += 1;
        merge(trace, &state.trace);
        match res {
            Ok(map) => return Ok(map),
            Err(EmbedError::InternalAssertion(a)) => {
                trace.assertions.push(a.clone());
                last = Some(EmbedError::InternalAssertion(a));
                // No choice point left to deviate at.
                if state.choices < attempt + 1 {
                    break;
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn merge(into: &mut Trace, from: &Trace) {
    into.choice_points += from.choice_points;
    for (k, v) in &from.checkpoints {
        *into.checkpoints.entry(k.clone()).or_default() += v;
    }
    for (k, v) in &from.events {
        *into.events.entry(k.clone()).or_default() += v;
    }
    into.notes.extend(from.notes.iter().cloned());
}

fn finish(d: &Digraph, t: &AntiTree, res: Result<Vec<VertexId>, EmbedError>, trace: Trace, opts: &EmbedOptions) -> EmbedOutcome {
    let mut out = match res {
        Ok(map) => {
            let e = Embedding::new(map);
            match e.validate(t, d) {
                Ok(()) => return EmbedOutcome::success(e, trace),
                Err(err) => EmbedOutcome::failed(EmbedError::assertion("validation", err.to_string()), trace),
            }
        }
        Err(err) => EmbedOutcome::failed(err, trace),
    };
    if (out.is_assertion() && opts.fallback) || (out.is_refusal() && opts.force_oracle) {
        out.oracle = Some(oracle_embed(d, t, Some(opts.oracle_budget)).verdict);
    }
    out
}

pub(crate) fn check_k(t: &AntiTree, k: usize) -> Result<(), EmbedError> {
    if t.k() != k {
        return Err(EmbedError::precondition(format!("the tree has {} arcs, not k = {k}", t.k())));
    }
    Ok(())
}

/// Embeds `t` (with `k` arcs) into `d`, or refuses with the violated hypothesis.
pub fn embed_antitree(d: &Digraph, t: &AntiTree, k: usize) -> EmbedOutcome {
    embed_antitree_with(d, t, k, &EmbedOptions::default())
}

pub fn embed_antitree_with(d: &Digraph, t: &AntiTree, k: usize, opts: &EmbedOptions) -> EmbedOutcome {
    let mut trace = Trace::default();
    if let Err(e) = check_k(t, k) {
        return EmbedOutcome::failed(e, trace);
    }
    let u = t.degree_stats().argmax_u;
    let flip = t.sign(u) == Sign::Minus;
    trace.flipped = flip;
    let (dn, tn) = if flip { (d.reverse().sorted(), t.reverse()) } else { (d.sorted(), t.clone()) };
    let res = pipeline(&dn, &tn, k, opts, &mut trace);
    finish(d, t, res, trace, opts)
}

fn pipeline(d: &Digraph, t: &AntiTree, k: usize, opts: &EmbedOptions, trace: &mut Trace) -> Result<Vec<VertexId>, EmbedError> {
    let stats = t.degree_stats();
    let s = s_for(k);
    let q = k / 4;
    let tag = |branch, r| CaseTag { branch, k, s, delta: stats.delta, delta2: stats.delta2, r };
    density_ok(d, k)?;
    let free = is_k2s_free(d, s);
    if free.is_err() || k <= 12 {
        if t.caterpillar_decompose().is_ok() {
            trace.case = Some(tag(Branch::Caterpillar, None));
            let seeds: Vec<u64> = (1..=opts.backtrack_depth as u64).collect();
            return embed_caterpillar_retrying(d, t, &seeds).map(|e| e.map().to_vec());
        }
        return Err(match free {
            Err(witness) => refuse(Refusal::NotFree { s, witness }),
            Ok(()) => EmbedError::precondition(format!("no digraph with k = {k} meets both hypotheses, and the tree is not a caterpillar")),
        });
    }
    if stats.delta2 <= q + 2 {
        if stats.delta <= q {
            trace.case = Some(tag(Branch::LowDelta, None));
            let core = prune_pseudo(d, k)?;
            with_net(opts.backtrack_depth, trace, |run| low::low_delta(d, &core, t, k, run))
        } else {
            let r = wide::mid_r(k, stats.delta);
            trace.case = Some(tag(Branch::MidDelta, Some(r)));
            with_net(opts.backtrack_depth, trace, |run| wide::mid_delta(d, t, k, run))
        }
    } else {
        let plan = broom_case(d, t, k)?;
        trace.case = Some(tag(plan.branch, Some(plan.sel.r)));
        with_net(opts.backtrack_depth, trace, |run| broom::big_delta2(d, t, k, &plan, run))
    }
}

/// Embeds a tree with Δ ≤ ⌊k/4⌋ into a pruned core.
pub fn embed_low_delta(d_core: &Digraph, t: &AntiTree, k: usize) -> EmbedOutcome {
    let mut trace = Trace::default();
    let res = (|| {
        check_k(t, k)?;
        let st = t.degree_stats();
        if st.delta > k / 4 {
            return Err(EmbedError::precondition(format!("Δ = {} > ⌊k/4⌋ = {}", st.delta, k / 4)));
        }
        let p = d_core.degree_profile();
        if 2 * p.delta0_bar < k {
            return Err(EmbedError::precondition(format!("core semidegree {} < k/2", p.delta0_bar)));
        }
        trace.case = Some(CaseTag { branch: Branch::LowDelta, k, s: s_for(k), delta: st.delta, delta2: st.delta2, r: None });
        with_net(3, &mut trace, |run| low::low_delta(d_core, d_core, t, k, run))
    })();
    finish(d_core, t, res, trace, &EmbedOptions::default())
}

/// Δ₂ ≤ ⌊k/4⌋+2 < Δ: selection with r = min(⌈k/2⌉, k−Δ+1), then the wide-star embedding.
pub fn embed_mid_delta(d: &Digraph, t: &AntiTree, k: usize) -> EmbedOutcome {
    let mut trace = Trace::default();
    let res = (|| {
        check_k(t, k)?;
        let st = t.degree_stats();
        if t.sign(st.argmax_u) != Sign::Plus {
            return Err(EmbedError::precondition("the top-degree vertex must be an out-vertex"));
        }
        if st.delta <= k / 4 || st.delta2 > k / 4 + 2 {
            return Err(EmbedError::precondition(format!("needs Δ > ⌊k/4⌋ ≥ Δ₂ − 2, got Δ = {}, Δ₂ = {}", st.delta, st.delta2)));
        }
        trace.case = Some(CaseTag { branch: Branch::MidDelta, k, s: s_for(k), delta: st.delta, delta2: st.delta2, r: Some(wide::mid_r(k, st.delta)) });
        with_net(3, &mut trace, |run| wide::mid_delta(d, t, k, run))
    })();
    finish(d, t, res, trace, &EmbedOptions::default())
}

fn wide_pre(d: &Digraph, d_core: &Digraph, t: &AntiTree, k: usize, anchor: VertexId) -> Result<VertexId, EmbedError> {
    check_k(t, k)?;
    let st = t.degree_stats();
    let u = st.argmax_u;
    if t.sign(u) != Sign::Plus || st.delta <= k / 4 || st.delta2 > k / 4 + 2 {
        return Err(EmbedError::precondition("needs an out-vertex u with Δ > ⌊k/4⌋ ≥ Δ₂ − 2"));
    }
    if anchor >= d.n() || d.out_degree(anchor) < st.delta || d_core.n() != d.n() {
        return Err(EmbedError::precondition(format!("anchor {anchor} needs out-degree at least Δ = {}", st.delta)));
    }
    let cp = d_core.degree_profile();
    if 2 * cp.delta0_bar < k || d_core.out_degree(anchor) == 0 {
        return Err(EmbedError::precondition("the core needs semidegree at least k/2 and must contain the anchor"));
    }
    Ok(u)
}

/// The layered embedding rooted at the top-degree out-vertex, which goes to `anchor`.
pub fn embed_wide_star(d: &Digraph, d_core: &Digraph, t: &AntiTree, k: usize, anchor: VertexId) -> EmbedOutcome {
    let mut trace = Trace::default();
    let res = (|| {
        let u = wide_pre(d, d_core, t, k, anchor)?;
        let relaxed = wide::leaves_at(t, u);
        with_net(3, &mut trace, |run| wide::wide_star(d, d_core, t, k, u, anchor, &relaxed, run))
    })();
    finish(d, t, res, trace, &EmbedOptions::default())
}

/// As [`embed_wide_star`] for trees within distance two of the top-degree vertex.
pub fn embed_radius_two(d: &Digraph, d_core: &Digraph, t: &AntiTree, k: usize, anchor: VertexId) -> EmbedOutcome {
    let mut trace = Trace::default();
    let res = (|| {
        let u = wide_pre(d, d_core, t, k, anchor)?;
        if t.distances(u).iter().any(|&x| x > 2) {
            return Err(EmbedError::precondition("some vertex is at distance more than 2 from u"));
        }
        let relaxed = wide::leaves_at(t, u);
        with_net(3, &mut trace, |run| wide::radius_two_full(d, d_core, t, k, u, anchor, &relaxed, run))
    })();
    finish(d, t, res, trace, &EmbedOptions::default())
}

/// Δ₂ ≥ ⌊k/4⌋+3: subdigraph choice, the double broom, then the rest of the tree.
pub fn embed_big_delta2(d: &Digraph, t: &AntiTree, k: usize) -> EmbedOutcome {
    let mut trace = Trace::default();
    let res = (|| {
        check_k(t, k)?;
        let st = t.degree_stats();
        if st.delta2 < k / 4 + 3 || t.sign(st.argmax_u) != Sign::Plus {
            return Err(EmbedError::precondition(format!("needs Δ₂ ≥ ⌊k/4⌋+3 with u an out-vertex, got Δ₂ = {}", st.delta2)));
        }
        let plan = broom_case(d, t, k)?;
        trace.case = Some(CaseTag { branch: plan.branch, k, s: s_for(k), delta: st.delta, delta2: st.delta2, r: Some(plan.sel.r) });
        with_net(3, &mut trace, |run| broom::big_delta2(d, t, k, &plan, run))
    })();
    finish(d, t, res, trace, &EmbedOptions::default())
}

/// Embeds the double broom of the two top-degree vertices per the selected case.
/// The returned map is defined on broom vertices only.
pub fn embed_double_broom(d: &Digraph, sel: &SelectionResult, t: &AntiTree, k: usize, case: &CaseTag) -> Result<Vec<Option<VertexId>>, EmbedError> {
    check_k(t, k)?;
    let plan = BroomPlan::from_parts(t, sel.clone(), case.branch)?;
    let run = RefCell::new(RunState::new(None));
    broom::broom_only(d, t, k, &plan, &run)
}

/// Extends an embedding of the double broom to the whole tree.
pub fn extend_from_broom(d: &Digraph, sel: &SelectionResult, t: &AntiTree, partial: &[Option<VertexId>], case: &CaseTag) -> EmbedOutcome {
    let mut trace = Trace { case: Some(case.clone()), ..Trace::default() };
    let res = (|| {
        check_k(t, case.k)?;
        let plan = BroomPlan::from_parts(t, sel.clone(), case.branch)?;
        with_net(0, &mut trace, |run| broom::extend(d, t, case.k, &plan, partial, run))
    })();
    finish(d, t, res, trace, &EmbedOptions::default())
}

/// Exact search with a node budget, packaged as an outcome.
pub fn oracle_fallback(d: &Digraph, t: &AntiTree, budget: u64) -> EmbedOutcome {
    let stats = oracle_embed(d, t, Some(budget));
    let mut trace = Trace::default();
    trace.notes.push(format!("oracle expanded {} nodes", stats.nodes_expanded));
    let mut out = match &stats.verdict {
        OracleVerdict::Embeds(e) => EmbedOutcome::success(e.clone(), trace),
        OracleVerdict::NotContained => EmbedOutcome::failed(EmbedError::precondition("the tree does not embed in the host"), trace),
        OracleVerdict::Inconclusive => EmbedOutcome::failed(EmbedError::precondition("budget exhausted"), trace),
    };
    out.oracle = Some(stats.verdict);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (k, ⌊k/4⌋+2, ⌊k/4⌋+3, ⌈k/2⌉, ⌈5k/12⌉, s)
    fn thresholds(k: usize) -> (usize, usize, usize, usize, usize, usize) {
        (k / 4, k / 4 + 2, k / 4 + 3, k.div_ceil(2), (5 * k).div_ceil(12), s_for(k))
    }

    #[test]
    fn threshold_table() {
        let table = [
            (1, (0, 2, 3, 1, 1, 1)),
            (4, (1, 3, 4, 2, 2, 1)),
            (12, (3, 5, 6, 6, 5, 1)),
            (13, (3, 5, 6, 7, 6, 2)),
            (24, (6, 8, 9, 12, 10, 2)),
            (25, (6, 8, 9, 13, 11, 3)),
            (59, (14, 16, 17, 30, 25, 5)),
        ];
        for (k, want) in table {
            assert_eq!(thresholds(k), want, "k = {k}");
        }
        for k in 1..60 {
            let (q, lo, hi, half, five, s) = thresholds(k);
            assert_eq!(hi, lo + 1);
            assert!(4 * q <= k && k < 4 * (q + 1));
            assert!(2 * half >= k && 2 * half <= k + 1);
            assert!(12 * five >= 5 * k && 12 * five < 5 * k + 12);
            assert!(12 * s >= k && 12 * (s - 1) < k);
            assert_eq!(wide::mid_r(k, k), 1);
            assert_eq!(wide::mid_r(k, q + 1), half.min(k - q));
        }
    }

    #[test]
    fn single_arc() {
        let d = Digraph::new(2, [(0, 1)]).unwrap();
        let t = AntiTree::from_arcs(2, [(1, 0)]).unwrap();
        let out = embed_antitree(&d, &t, 1);
        assert!(out.is_success());
        assert_eq!(out.trace.case.unwrap().branch, Branch::Caterpillar);
    }

    #[test]
    fn burr_star_is_refused() {
        let k = 5;
        let d = crate::gen::gen_burr(k);
        let star = AntiTree::from_arcs(k + 1, (1..=k).map(|i| (0, i))).unwrap();
        let out = embed_antitree_with(&d, &star, k, &EmbedOptions { force_oracle: true, ..Default::default() });
        assert!(matches!(out.failure, Some(EmbedError::HypothesisViolated(Refusal::Density { .. }))));
        assert_eq!(out.oracle, Some(OracleVerdict::NotContained));
    }

    #[test]
    fn wrong_k_is_a_precondition() {
        let d = Digraph::new(2, [(0, 1)]).unwrap();
        let t = AntiTree::from_arcs(2, [(0, 1)]).unwrap();
        assert!(embed_antitree(&d, &t, 2).is_refusal());
    }
}
