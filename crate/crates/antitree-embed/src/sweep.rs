//! Batch sweeps over generated instances with JSON reports.
//!
//! Each suite fans its instances out over a rayon pool and collects one
//! verdict per instance, in index order. Failure rows carry the full instance
//! as arc lists so they can be replayed with nothing else at hand.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convex::{embed_caterpillar, good_arcs, ConvexDigraph, VertexOrder};
use crate::digraph::{Arc, Digraph, VertexId};
use crate::embed::{embed_antitree_with, EmbedOptions, EmbedOutcome};
use crate::error::{AssertionFailure, EmbedError};
use crate::freeness::is_k2s_free;
use crate::gen::{
    gen_burr, gen_incidence, gen_random_digraph, gen_random_with_arcs, random_antitree, random_caterpillar,
    random_two_hub_tree,
};
use crate::io::ArcList;
use crate::oracle::{brute_force_good_arcs, oracle_embed, OracleVerdict};
use crate::subdigraph::{prune_pseudo, select_subdigraph, SelectionCase};
use crate::tree::{enumerate_antitrees, AntiTree};

pub const SCHEMA: u32 = 1;

/// Rows kept in a report; the failure count is always exact.
pub const MAX_ROWS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Prop3Exhaustive,
    GoodArcs,
    SelectorAudit,
    Theorem2Pg25,
    BurrTightness,
    Differential,
    Reversal,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Prop3Exhaustive,
        Suite::GoodArcs,
        Suite::SelectorAudit,
        Suite::Theorem2Pg25,
        Suite::BurrTightness,
        Suite::Differential,
        Suite::Reversal,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Prop3Exhaustive => "prop3-exhaustive",
            Suite::GoodArcs => "good-arcs",
            Suite::SelectorAudit => "selector-audit",
            Suite::Theorem2Pg25 => "theorem2-pg25",
            Suite::BurrTightness => "burr-tightness",
            Suite::Differential => "differential",
            Suite::Reversal => "reversal",
        }
    }

    pub fn criterion(self) -> u8 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u8 + 1
    }

    pub fn title(self) -> &'static str {
        match self {
            Suite::Prop3Exhaustive => "caterpillars embed under density alone",
            Suite::GoodArcs => "good-arc bounds and DP versus brute force",
            Suite::SelectorAudit => "subdigraph selector and pseudo-degree pruning",
            Suite::Theorem2Pg25 => "full pipeline on the PG(2,25) incidence host",
            Suite::BurrTightness => "out-star misses the Burr host, one extra arc suffices",
            Suite::Differential => "pipeline against the exact oracle",
            Suite::Reversal => "reversal symmetry of the pipeline",
        }
    }

    /// Default sample count (`samples` in the config).
    fn default_samples(self) -> usize {
        match self {
            Suite::Prop3Exhaustive => 100_000,
            Suite::GoodArcs | Suite::SelectorAudit | Suite::Differential => 10_000,
            Suite::Theorem2Pg25 => 200,
            Suite::BurrTightness => 0,
            Suite::Reversal => 1_000,
        }
    }

    fn default_n(self) -> usize {
        match self {
            Suite::Prop3Exhaustive => 5,
            Suite::GoodArcs => 7,
            Suite::SelectorAudit => 16,
            Suite::Theorem2Pg25 => 5,
            Suite::BurrTightness => 0,
            Suite::Differential | Suite::Reversal => 12,
        }
    }

    fn default_k(self) -> usize {
        match self {
            Suite::Prop3Exhaustive | Suite::GoodArcs => 4,
            Suite::SelectorAudit => 15,
            Suite::Theorem2Pg25 => 13,
            Suite::BurrTightness => 6,
            Suite::Differential | Suite::Reversal => 5,
        }
    }

    /// Inclusive (n, k) ceilings accepted by validation.
    fn guards(self) -> (usize, usize) {
        match self {
            Suite::Prop3Exhaustive => (5, 4),
            Suite::GoodArcs => (9, 6),
            Suite::SelectorAudit => (64, 63),
            Suite::Theorem2Pg25 => (5, 13),
            Suite::BurrTightness => (0, 8),
            Suite::Differential | Suite::Reversal => (16, 8),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Suite {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL.into_iter().find(|x| x.id() == s).ok_or_else(|| ConfigError::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown suite `{0}`; known: prop3-exhaustive, good-arcs, selector-audit, theorem2-pg25, burr-tightness, differential, reversal")]
    UnknownSuite(String),
    #[error("{field} = {value} outside {lo}..={hi} for suite {suite}")]
    OutOfRange { suite: Suite, field: &'static str, value: usize, lo: usize, hi: usize },
    #[error("jobs must be positive")]
    ZeroJobs,
    #[error("q = {q} gives k = {k} from the density of PG(2,q); the suite needs k >= 13")]
    WeakPlane { q: usize, k: usize },
    #[error("{0}")]
    Host(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub suite: Suite,
    #[serde(default)]
    pub seed: u64,
    /// Random sample count; the suite default when absent.
    #[serde(default)]
    pub samples: Option<usize>,
    /// Largest host order.
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Largest tree size.
    #[serde(default)]
    pub k_max: Option<usize>,
    /// Field order of the projective plane host.
    #[serde(default)]
    pub q: Option<usize>,
    /// Worker threads; rayon's default when absent.
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(suite: Suite) -> Self {
        SweepConfig { suite, seed: 0, samples: None, n_max: None, k_max: None, q: None, jobs: None, output: None }
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(self.suite.default_samples())
    }

    pub fn n_max(&self) -> usize {
        self.n_max.unwrap_or(self.suite.default_n())
    }

    pub fn k_max(&self) -> usize {
        self.k_max.unwrap_or(self.suite.default_k())
    }

    pub fn q(&self) -> usize {
        self.q.unwrap_or(25)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let suite = self.suite;
        if self.jobs == Some(0) {
            return Err(ConfigError::ZeroJobs);
        }
        let (n_hi, k_hi) = suite.guards();
        let range = |field, value, lo, hi| {
            if (lo..=hi).contains(&value) {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { suite, field, value, lo, hi })
            }
        };
        match suite {
            Suite::BurrTightness => range("k_max", self.k_max(), 2, k_hi)?,
            Suite::Theorem2Pg25 => {
                range("n_max", self.n_max(), 2, n_hi)?;
                let q = self.q();
                let d = gen_incidence(q).map_err(|e| ConfigError::Host(e.to_string()))?;
                let k = pg_k(&d);
                if k < 13 {
                    return Err(ConfigError::WeakPlane { q, k });
                }
            }
            Suite::SelectorAudit => {
                range("n_max", self.n_max(), 4, n_hi)?;
                range("k_max", self.k_max(), 2, k_hi)?;
            }
            _ => {
                range("n_max", self.n_max(), 2, n_hi)?;
                range("k_max", self.k_max(), 1, k_hi)?;
            }
        }
        if suite == Suite::Reversal || suite == Suite::Differential {
            range("samples", self.samples(), 1, 10_000_000)?;
        }
        Ok(())
    }
}

/// Largest k with a(D) > (k−1)n.
fn pg_k(d: &Digraph) -> usize {
    (d.arc_count() - 1) / d.n() + 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureRow {
    pub index: usize,
    pub check: String,
    pub host: ArcList,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<ArcList>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<AssertionFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub suite: Suite,
    pub criterion: u8,
    pub title: String,
    pub config: SweepConfig,
    pub instances: usize,
    pub failures: usize,
    pub passed: bool,
    /// One character per instance in index order: `.` passed, `F` failed.
    pub verdicts: String,
    pub stats: BTreeMap<String, u64>,
    pub rows: Vec<FailureRow>,
    pub elapsed_ms: f64,
}

impl SweepReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }

    /// One line: `[PASS] criterion 3 selector-audit: ...`.
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {} {}: {} ({} instances, {} failures, {:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.suite,
            self.title,
            self.instances,
            self.failures,
            self.elapsed_ms / 1000.0
        )
    }

    pub fn summary(&self) -> String {
        let mut s = self.line();
        for (k, v) in &self.stats {
            s.push_str(&format!("\n  {k}: {v}"));
        }
        let mut by_check: BTreeMap<&str, usize> = BTreeMap::new();
        for r in &self.rows {
            *by_check.entry(&r.check).or_default() += 1;
        }
        for (c, v) in by_check {
            s.push_str(&format!("\n  failed {c}: {v}"));
        }
        if let Some(r) = self.rows.first() {
            s.push_str(&format!("\n  first failure #{}: {} ({})", r.index, r.check, r.detail));
        }
        s
    }
}

/// What one instance produced.
#[derive(Default)]
struct Outcome {
    rows: Vec<FailureRow>,
    tags: Vec<String>,
}

impl Outcome {
    fn tag(&mut self, t: impl Into<String>) {
        self.tags.push(t.into());
    }

    fn fail(&mut self, index: usize, check: &str, host: &Digraph, tree: Option<&AntiTree>, k: Option<usize>, detail: String) {
        self.rows.push(FailureRow {
            index,
            check: check.to_string(),
            host: ArcList::from_digraph(host),
            tree: tree.map(|t| ArcList::from_digraph(t.digraph())),
            k,
            detail,
            assertions: Vec::new(),
        });
    }
}

fn rng_for(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// The labelled digraph on n vertices whose ordered pairs are picked by `mask`.
fn digraph_from_mask(n: usize, mask: u64) -> Digraph {
    let pairs = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v)));
    Digraph::new(n, pairs.enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p)).expect("distinct pairs")
}

fn dense(d: &Digraph, k: usize) -> bool {
    d.arc_count() > k.saturating_sub(1) * d.n()
}

fn strict() -> EmbedOptions {
    EmbedOptions { fallback: false, ..EmbedOptions::default() }
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport, ConfigError> {
    cfg.validate()?;
    let start = Instant::now();
    let outcomes = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .expect("thread pool")
            .install(|| dispatch(cfg)),
        None => dispatch(cfg),
    };
    let mut stats: BTreeMap<String, u64> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut failures = 0;
    let mut verdicts = String::with_capacity(outcomes.len());
    for o in outcomes {
        for t in o.tags {
            *stats.entry(t).or_default() += 1;
        }
        verdicts.push(if o.rows.is_empty() { '.' } else { 'F' });
        failures += usize::from(!o.rows.is_empty());
        for r in o.rows {
            if rows.len() < MAX_ROWS {
                rows.push(r);
            }
        }
    }
    Ok(SweepReport {
        schema: SCHEMA,
        suite: cfg.suite,
        criterion: cfg.suite.criterion(),
        title: cfg.suite.title().to_string(),
        config: cfg.clone(),
        instances: verdicts.len(),
        failures,
        passed: failures == 0,
        verdicts,
        stats,
        rows,
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}

fn dispatch(cfg: &SweepConfig) -> Vec<Outcome> {
    match cfg.suite {
        Suite::Prop3Exhaustive => prop3(cfg),
        Suite::GoodArcs => good_arc_bounds(cfg),
        Suite::SelectorAudit => selector(cfg),
        Suite::Theorem2Pg25 => theorem2(cfg),
        Suite::BurrTightness => burr(cfg),
        Suite::Differential => differential(cfg),
        Suite::Reversal => reversal(cfg),
    }
}

fn prop3(cfg: &SweepConfig) -> Vec<Outcome> {
    let k_max = cfg.k_max();
    let trees: Vec<Vec<AntiTree>> = (1..=k_max)
        .map(|k| {
            let all = enumerate_antitrees(k).expect("k within the enumeration bound");
            all.into_iter().filter(|t| t.caterpillar_decompose().is_ok()).collect()
        })
        .collect();
    // Exhaustive hosts for n ≤ min(n_max, 4), then random samples at n = 5.
    let mut blocks: Vec<(usize, u64)> = Vec::new();
    for n in 2..=cfg.n_max().min(4) {
        blocks.push((n, 1u64 << (n * (n - 1))));
    }
    let sampled = if cfg.n_max() >= 5 { cfg.samples() } else { 0 };
    let exhaustive: usize = blocks.iter().map(|&(_, c)| c as usize).sum();
    (0..exhaustive + sampled)
        .into_par_iter()
        .map(|i| {
            let d = if i < exhaustive {
                let mut j = i as u64;
                let mut host = None;
                for &(n, c) in &blocks {
                    if j < c {
                        host = Some(digraph_from_mask(n, j));
                        break;
                    }
                    j -= c;
                }
                host.unwrap()
            } else {
                let mut rng = rng_for(cfg.seed, i);
                let m = rng.gen_range(1..=20);
                gen_random_with_arcs(5, m, rng.gen()).expect("at most 20 arcs on 5 vertices")
            };
            let mut o = Outcome::default();
            for k in 1..=k_max {
                if !dense(&d, k) {
                    break;
                }
                for t in &trees[k - 1] {
                    o.tag(format!("embeddings k={k}"));
                    match embed_caterpillar(&d, t, VertexOrder::Identity) {
                        Ok(e) => {
                            if let Err(err) = e.validate(t, &d) {
                                o.fail(i, "validate", &d, Some(t), Some(k), err.to_string());
                            }
                        }
                        Err(err) => o.fail(i, "embed", &d, Some(t), Some(k), err.to_string()),
                    }
                }
            }
            o
        })
        .collect()
}

fn good_arc_bounds(cfg: &SweepConfig) -> Vec<Outcome> {
    (0..cfg.samples())
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg.seed, i);
            let n = rng.gen_range(2..=cfg.n_max());
            let k = rng.gen_range(1..=cfg.k_max().min(n - 1));
            let p = rng.gen_range(0.2..0.95);
            let d = gen_random_digraph(n, p, &mut rng);
            let t = random_caterpillar(k, &mut rng);
            let c = ConvexDigraph::with_order(&d, VertexOrder::Random(rng.gen()));
            let mut o = Outcome::default();
            let table = match good_arcs(&c, &t) {
                Ok(table) => table,
                Err(e) => {
                    o.fail(i, "dp", &d, Some(&t), Some(k), e.to_string());
                    return o;
                }
            };
            let len = table.spine_len();
            let got = table.count(len) as i64;
            let a = d.arc_count() as i64;
            let l8 = a - (k as i64 - 1) * n as i64;
            if got < l8 {
                o.fail(i, "density-bound", &d, Some(&t), Some(k), format!("{got} good arcs < a - (k-1)n = {l8}"));
            }
            let (dp, dm) = d.plus_minus_sets();
            let tp = t.plus_vertices().len() as i64;
            let tm = t.minus_vertices().len() as i64;
            let l12 = a - (tp - 1) * dm.len() as i64 - (tm - 1) * dp.len() as i64;
            if got < l12 {
                o.fail(i, "degree-bound", &d, Some(&t), Some(k), format!("{got} good arcs < {l12}"));
            }
            o.tag(if l8 > 0 { "density bound positive" } else { "density bound vacuous" });
            for arc in table.final_good() {
                let ok = table.witness(arc).is_some_and(|e| e.validate(&t, &d).is_ok());
                if !ok {
                    o.fail(i, "witness", &d, Some(&t), Some(k), format!("good arc {arc:?} has no valid witness"));
                    break;
                }
            }
            if n <= 5 && k <= 3 {
                o.tag("dp vs brute force");
                let brute = brute_force_good_arcs(&c, &t).expect("caterpillar");
                let mut dp = table.final_good();
                dp.sort_unstable();
                if dp != brute {
                    let missing: Vec<Arc> = brute.iter().filter(|a| !dp.contains(a)).copied().collect();
                    let extra: Vec<Arc> = dp.iter().filter(|a| !brute.contains(a)).copied().collect();
                    o.fail(
                        i,
                        "dp=brute",
                        &d,
                        Some(&t),
                        Some(k),
                        format!("order {:?}; missed by DP {missing:?}; not good {extra:?}", c.order()),
                    );
                }
            }
            o
        })
        .collect()
}

fn selector(cfg: &SweepConfig) -> Vec<Outcome> {
    let samples = cfg.samples();
    (0..2 * samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg.seed, i);
            let n = rng.gen_range(4..=cfg.n_max());
            let k = rng.gen_range(2..=cfg.k_max().min(n - 1));
            let m = rng.gen_range((k - 1) * n + 1..=n * (n - 1));
            let d = gen_random_with_arcs(n, m, rng.gen()).expect("feasible arc count");
            let mut o = Outcome::default();
            if i < samples {
                let r = rng.gen_range(1..=k.div_ceil(2));
                match select_subdigraph(&d, k, r) {
                    Ok(sel) => {
                        let bad = sel.violations(&d);
                        if !bad.is_empty() {
                            o.fail(i, "select", &d, None, Some(k), format!("r = {r}: {}", bad.join("; ")));
                        }
                        o.tag(match sel.case {
                            SelectionCase::I => "case (3-I)",
                            SelectionCase::II => "case (3-II)",
                        });
                        let other = crate::subdigraph::SelectionResult {
                            case: match sel.case {
                                SelectionCase::I => SelectionCase::II,
                                SelectionCase::II => SelectionCase::I,
                            },
                            witness: other_witness(&sel.sub, sel.case, k),
                            ..sel.clone()
                        };
                        if other.violations(&d).is_empty() {
                            o.tag("both cases hold");
                        }
                    }
                    Err(e) => o.fail(i, "select", &d, None, Some(k), format!("r = {r}: {e}")),
                }
            } else {
                match prune_pseudo(&d, k) {
                    Ok(g) => {
                        let p = g.degree_profile();
                        if g.arc_count() == 0 {
                            o.fail(i, "prune-nonempty", &d, None, Some(k), "no arcs left".into());
                        }
                        // Pseudo-semidegree recomputed from the degree lists.
                        let low = (0..g.n()).any(|v| {
                            [g.out_degree(v), g.in_degree(v)].into_iter().any(|x| x > 0 && 2 * x < k)
                        });
                        if low || 2 * p.delta0_bar < k {
                            o.fail(i, "prune-degree", &d, None, Some(k), format!("delta0_bar = {}", p.delta0_bar));
                        }
                        o.tag("prune_pseudo");
                    }
                    Err(e) => o.fail(i, "prune", &d, None, Some(k), e.to_string()),
                }
            }
            o
        })
        .collect()
}

fn other_witness(sub: &Digraph, case: SelectionCase, k: usize) -> VertexId {
    let p = sub.degree_profile();
    let w = match case {
        SelectionCase::I => (0..sub.n()).find(|&b| p.in_deg[b] >= k),
        SelectionCase::II => (0..sub.n()).find(|&a| p.out_deg[a] >= k),
    };
    w.unwrap_or(0)
}

fn theorem2(cfg: &SweepConfig) -> Vec<Outcome> {
    let d = gen_incidence(cfg.q()).expect("validated");
    let k = pg_k(&d);
    let samples = cfg.samples();
    let n_max = cfg.n_max();
    let quarter = k / 4;
    // Index 0 audits the host, 1..=samples embed trees, then one row per n for emptiness.
    let emptiness: Vec<usize> = (2..=n_max).collect();
    let mut out: Vec<Outcome> = (0..=samples)
        .into_par_iter()
        .map(|i| {
            let mut o = Outcome::default();
            if i == 0 {
                let n = d.n();
                if let Err(w) = is_k2s_free(&d, k.div_ceil(12)) {
                    o.fail(0, "host-free", &d, None, Some(k), format!("{w:?}"));
                }
                if !dense(&d, k) {
                    o.fail(0, "host-density", &d, None, Some(k), format!("{} arcs, n = {n}", d.arc_count()));
                }
                return o;
            }
            let mut rng = rng_for(cfg.seed, i);
            let t = if i % 2 == 1 {
                random_antitree(k, &mut rng)
            } else {
                let d2 = quarter + 3 + rng.gen_range(0..2);
                let d1 = d2 + rng.gen_range(0..3);
                let gap = rng.gen_range(1..=3);
                random_two_hub_tree(k, d1, d2, gap, &mut rng).unwrap_or_else(|| random_antitree(k, &mut rng))
            };
            let st = t.degree_stats();
            o.tag(if st.delta2 <= quarter + 2 { "delta2 <= k/4+2" } else { "delta2 > k/4+2" });
            let out = embed_antitree_with(&d, &t, k, &strict());
            if let Some(c) = &out.trace.case {
                o.tag(format!("branch {:?}", c.branch));
            }
            check_success(&mut o, i, &d, &t, k, &out);
            if !out.trace.assertions.is_empty() {
                o.fail(i, "assertions", &d, Some(&t), Some(k), format!("{} logged", out.trace.assertions.len()));
                o.rows.last_mut().unwrap().assertions = out.trace.assertions.clone();
            }
            o
        })
        .collect();
    let have_low = out.iter().any(|o| o.tags.iter().any(|t| t == "delta2 <= k/4+2"));
    let have_high = out.iter().any(|o| o.tags.iter().any(|t| t == "delta2 > k/4+2"));
    if !(have_low && have_high) {
        out[0].fail(0, "branch-coverage", &d, None, Some(k), format!("low {have_low}, high {have_high}"));
    }
    for n in emptiness {
        out.push(empty_class(n, samples + 1 + n - 2));
    }
    out
}

/// No digraph on n vertices is K(2,1)-free with more than n arcs: the class
/// behind k in 2..=12 is empty. Checked over every labelled digraph.
fn empty_class(n: usize, index: usize) -> Outcome {
    let total = 1u64 << (n * (n - 1));
    let hit = (0..total)
        .into_par_iter()
        .filter(|m| m.count_ones() as usize > n)
        .map(|m| digraph_from_mask(n, m))
        .find_first(|d| is_k2s_free(d, 1).is_ok());
    let mut o = Outcome::default();
    o.tag(format!("emptiness n={n}: {total} digraphs"));
    if let Some(d) = hit {
        o.fail(index, "k<=12 emptiness", &d, None, Some(2), "free and dense".into());
    }
    o
}

fn check_success(o: &mut Outcome, i: usize, d: &Digraph, t: &AntiTree, k: usize, out: &EmbedOutcome) {
    match (&out.embedding, &out.failure) {
        (Some(e), _) => {
            if let Err(err) = e.validate(t, d) {
                o.fail(i, "validate", d, Some(t), Some(k), err.to_string());
            }
        }
        (None, f) => {
            let detail = f.as_ref().map_or("no embedding".to_string(), |e| e.to_string());
            o.fail(i, "embed", d, Some(t), Some(k), detail);
            o.rows.last_mut().unwrap().assertions = out.trace.assertions.clone();
        }
    }
}

fn out_star(k: usize) -> AntiTree {
    AntiTree::from_arcs(k + 1, (1..=k).map(|x| (0, x))).expect("a star")
}

fn burr(cfg: &SweepConfig) -> Vec<Outcome> {
    let mut jobs: Vec<(usize, Option<(VertexId, VertexId)>)> = Vec::new();
    for k in 2..=cfg.k_max() {
        let d = gen_burr(k);
        jobs.push((k, None));
        for u in 0..d.n() {
            for v in 0..d.n() {
                if u != v && !d.has_arc(u, v) {
                    jobs.push((k, Some((u, v))));
                }
            }
        }
    }
    jobs.into_par_iter()
        .enumerate()
        .map(|(i, (k, extra))| {
            let d = gen_burr(k);
            let t = out_star(k);
            let mut o = Outcome::default();
            match extra {
                None => {
                    if d.arc_count() != (k - 1) * d.n() {
                        o.fail(i, "burr-arcs", &d, None, Some(k), format!("{} arcs", d.arc_count()));
                    }
                    let s = oracle_embed(&d, &t, None);
                    if s.verdict != OracleVerdict::NotContained {
                        o.fail(i, "burr-omits-star", &d, Some(&t), Some(k), format!("{:?}", s.verdict));
                    }
                    o.tag("oracle certificates");
                }
                Some((u, v)) => {
                    let d2 = d.with_arc(u, v).expect("a non-arc");
                    let out = embed_antitree_with(&d2, &t, k, &strict());
                    check_success(&mut o, i, &d2, &t, k, &out);
                    o.tag("one-arc additions");
                }
            }
            o
        })
        .collect()
}

fn random_host(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Digraph {
    let top = n * (n - 1);
    let floor = (k - 1) * n + 1;
    let m = if rng.gen_bool(0.5) && floor <= top { rng.gen_range(floor..=top) } else { rng.gen_range(0..=top) };
    gen_random_with_arcs(n, m, rng.gen()).expect("feasible arc count")
}

fn differential(cfg: &SweepConfig) -> Vec<Outcome> {
    (0..cfg.samples())
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg.seed, i);
            let n = rng.gen_range(2..=cfg.n_max());
            let k = rng.gen_range(1..=cfg.k_max().min(n - 1));
            let d = random_host(&mut rng, n, k);
            let t = random_antitree(k, &mut rng);
            let mut o = Outcome::default();
            let truth = oracle_embed(&d, &t, None).verdict;
            if truth == OracleVerdict::Inconclusive {
                o.fail(i, "oracle", &d, Some(&t), Some(k), "unbounded search was inconclusive".into());
                return o;
            }
            let embeds = matches!(truth, OracleVerdict::Embeds(_));
            // Entry points in rotation: strict pipeline, pipeline with fallback, direct caterpillar.
            let (name, got) = match i % 3 {
                0 => ("pipeline", embed_antitree_with(&d, &t, k, &strict()).embedding),
                1 => ("pipeline+fallback", embed_antitree_with(&d, &t, k, &EmbedOptions::default()).embedding),
                _ => ("embed_caterpillar", embed_caterpillar(&d, &t, VertexOrder::Identity).ok()),
            };
            if let Some(e) = &got {
                if let Err(err) = e.validate(&t, &d) {
                    o.fail(i, "validate", &d, Some(&t), Some(k), format!("{name}: {err}"));
                }
                if !embeds {
                    o.fail(i, "soundness", &d, Some(&t), Some(k), format!("{name} succeeded, oracle says no"));
                }
            }
            let pre = dense(&d, k) && t.caterpillar_decompose().is_ok();
            if pre {
                o.tag("preconditions hold");
                if got.is_some() != embeds {
                    o.fail(
                        i,
                        "verdict",
                        &d,
                        Some(&t),
                        Some(k),
                        format!("{name} success {} but oracle {}", got.is_some(), embeds),
                    );
                }
            }
            o.tag(format!("{name} {}", if got.is_some() { "success" } else { "no map" }));
            o
        })
        .collect()
}

fn reversal(cfg: &SweepConfig) -> Vec<Outcome> {
    let pg = gen_incidence(25).expect("supported");
    (0..cfg.samples())
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg.seed, i);
            let (d, t, k) = if i % 10 == 0 {
                let k = pg_k(&pg);
                (pg.clone(), random_antitree(k, &mut rng), k)
            } else {
                let n = rng.gen_range(2..=cfg.n_max());
                let k = rng.gen_range(1..=cfg.k_max().min(n - 1));
                (random_host(&mut rng, n, k), random_antitree(k, &mut rng), k)
            };
            let a = embed_antitree_with(&d, &t, k, &strict());
            let b = embed_antitree_with(&d.reverse(), &t.reverse(), k, &strict());
            let mut o = Outcome::default();
            o.tag(if a.is_success() { "both succeed" } else { "both fail" });
            let map = |x: &EmbedOutcome| x.embedding.as_ref().map(|e| e.map().to_vec());
            if a.is_success() != b.is_success() {
                o.fail(i, "agree", &d, Some(&t), Some(k), format!("forward {}, reversed {}", a.is_success(), b.is_success()));
            } else if map(&a) != map(&b) {
                o.fail(i, "same-map", &d, Some(&t), Some(k), format!("{:?} vs {:?}", map(&a), map(&b)));
            } else if kind(&a.failure) != kind(&b.failure) {
                o.fail(i, "same-failure", &d, Some(&t), Some(k), format!("{:?} vs {:?}", a.failure, b.failure));
            }
            o
        })
        .collect()
}

fn kind(e: &Option<EmbedError>) -> &'static str {
    match e {
        None => "none",
        Some(EmbedError::HypothesisViolated(_)) => "refusal",
        Some(EmbedError::InternalAssertion(_)) => "assertion",
        Some(EmbedError::Tree(_)) => "tree",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.id().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_value(s).unwrap(), s.id());
        }
        assert_eq!(Suite::Reversal.criterion(), 7);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn validation() {
        let mut c = SweepConfig::new(Suite::Prop3Exhaustive);
        assert!(c.validate().is_ok());
        c.n_max = Some(6);
        assert!(matches!(c.validate(), Err(ConfigError::OutOfRange { field: "n_max", .. })));
        let mut c = SweepConfig::new(Suite::Theorem2Pg25);
        c.q = Some(23);
        assert!(matches!(c.validate(), Err(ConfigError::WeakPlane { k: 12, .. })));
        c.q = Some(6);
        assert!(matches!(c.validate(), Err(ConfigError::Host(_))));
        let mut c = SweepConfig::new(Suite::Reversal);
        c.jobs = Some(0);
        assert_eq!(c.validate(), Err(ConfigError::ZeroJobs));
    }

    #[test]
    fn malformed_config_runs_nothing() {
        let mut c = SweepConfig::new(Suite::BurrTightness);
        c.k_max = Some(1);
        assert!(run_sweep(&c).is_err());
    }

    #[test]
    fn small_prop3_sweep() {
        let mut c = SweepConfig::new(Suite::Prop3Exhaustive);
        c.n_max = Some(3);
        c.k_max = Some(2);
        let r = run_sweep(&c).unwrap();
        assert_eq!(r.instances, 4 + 64);
        assert!(r.passed, "{}", r.summary());
        assert_eq!(r.to_json()["schema"], 1);
    }

    #[test]
    fn masks() {
        assert_eq!(digraph_from_mask(2, 3).arc_count(), 2);
        assert_eq!(digraph_from_mask(3, 0b100001).arcs(), &[Arc::new(0, 1), Arc::new(2, 1)]);
    }
}
