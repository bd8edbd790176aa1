use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use antitree_embed::convex::{embed_caterpillar, embed_caterpillar_mindeg, good_arcs, ConvexDigraph, VertexOrder};
use antitree_embed::freeness::is_k2s_free;
use antitree_embed::gen::{gen_burr, gen_incidence, gen_random_dense, random_antitree};
use antitree_embed::io::{format_arc_list, parse_any, ArcList};
use antitree_embed::oracle::{oracle_embed, OracleVerdict};
use antitree_embed::subdigraph::select_subdigraph;
use antitree_embed::sweep::{run_sweep, Suite, SweepConfig};
use antitree_embed::{embed_antitree_with, AntiTree, Arc, Digraph, EmbedOptions, Embedding};

#[derive(Parser)]
#[command(name = "antitree", version, about = "Embed antidirected trees into dense digraphs")]
struct Cli {
    /// Seed for anything random.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full embedding pipeline.
    Embed(EmbedArgs),
    /// Embed a caterpillar through a convex drawing.
    EmbedCat(EmbedCatArgs),
    /// List the good arcs of a caterpillar in a convex drawing.
    GoodArcs(GoodArgs),
    /// Check that the host contains no orientation of K(2,s).
    CheckFree {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Select the subdigraph D' for (k, r).
    Select {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
    },
    /// Generate a host digraph or tree.
    Gen {
        #[command(subcommand)]
        what: GenCmd,
        /// Write here instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Exact backtracking search.
    Oracle {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Run an acceptance sweep.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct EmbedArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    host: PathBuf,
    /// Defaults to the number of tree arcs.
    #[arg(long)]
    k: Option<usize>,
    /// Ask the exact oracle on refusals as well.
    #[arg(long)]
    force_oracle: bool,
    /// Do not consult the oracle after an assertion.
    #[arg(long)]
    no_fallback: bool,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 3)]
    backtrack: usize,
    /// Write the trace JSON here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CatMode {
    Density,
    Mindeg,
}

#[derive(Args)]
struct EmbedCatArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    host: PathBuf,
    #[arg(long, value_enum, default_value = "density")]
    mode: CatMode,
    /// `id` or `random:<seed>`.
    #[arg(long, default_value = "id")]
    order: String,
}

#[derive(Args)]
struct GoodArgs {
    #[arg(long)]
    tree: PathBuf,
    #[arg(long)]
    host: PathBuf,
    #[arg(long, default_value = "id")]
    order: String,
    /// Reconstruct the embedding behind the good arc `u,v`.
    #[arg(long)]
    witness: Option<String>,
}

#[derive(Subcommand)]
enum GenCmd {
    /// Orientation of K(2k-2,2k-2) with (k-1)n arcs and no k-out-star.
    Burr {
        #[arg(long)]
        k: usize,
    },
    /// Point-line incidence digraph of PG(2,q).
    Incidence {
        #[arg(long)]
        q: usize,
    },
    /// Uniform digraph with (k-1)n+1 arcs.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Uniform random antidirected tree with k arcs.
    Tree {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// prop3-exhaustive, good-arcs, selector-audit, theorem2-pg25, burr-tightness, differential, reversal.
    #[arg(long, required_unless_present = "config")]
    suite: Option<String>,
    /// JSON file holding a full sweep config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    /// Report path.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn read_digraph(p: &Path) -> Result<Digraph> {
    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    Ok(parse_any(&text).with_context(|| format!("parsing {}", p.display()))?.0)
}

fn read_tree(p: &Path) -> Result<AntiTree> {
    Ok(AntiTree::new(read_digraph(p)?).with_context(|| format!("{} is not an antidirected tree", p.display()))?)
}

fn parse_order(s: &str) -> Result<VertexOrder> {
    match s.split_once(':') {
        None if s == "id" => Ok(VertexOrder::Identity),
        Some(("random", seed)) => Ok(VertexOrder::Random(seed.parse().context("order seed")?)),
        _ => bail!("order must be `id` or `random:<seed>`"),
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn pairs(e: &Embedding) -> Vec<[usize; 2]> {
    e.map().iter().enumerate().map(|(x, &h)| [x, h]).collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(64)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Embed(a) => {
            let (t, d) = (read_tree(&a.tree)?, read_digraph(&a.host)?);
            let opts = EmbedOptions {
                backtrack_depth: a.backtrack,
                oracle_budget: a.budget,
                fallback: !a.no_fallback,
                force_oracle: a.force_oracle,
            };
            let out = embed_antitree_with(&d, &t, a.k.unwrap_or(t.k()), &opts);
            if let Some(p) = &a.trace {
                fs::write(p, serde_json::to_string_pretty(&out.trace)?)?;
            }
            if json {
                print_json(&out.to_json());
            } else {
                if let Some(e) = &out.embedding {
                    for (x, h) in e.map().iter().enumerate() {
                        println!("{x} -> {h}");
                    }
                }
                if let Some(f) = &out.failure {
                    println!("failed: {f}");
                }
                if let Some(v) = &out.oracle {
                    println!("oracle: {}", verdict_name(v));
                }
            }
            Ok(if out.is_success() {
                0
            } else if out.is_assertion() {
                4
            } else if out.oracle == Some(OracleVerdict::Inconclusive) {
                3
            } else {
                2
            })
        }
        Cmd::EmbedCat(a) => {
            let (t, d) = (read_tree(&a.tree)?, read_digraph(&a.host)?);
            let res = match a.mode {
                CatMode::Density => embed_caterpillar(&d, &t, parse_order(&a.order)?),
                CatMode::Mindeg => embed_caterpillar_mindeg(&d, &t),
            };
            match res {
                Ok(e) => {
                    if json {
                        print_json(&serde_json::json!({ "embedding": pairs(&e) }));
                    } else {
                        for (x, h) in e.map().iter().enumerate() {
                            println!("{x} -> {h}");
                        }
                    }
                    Ok(0)
                }
                Err(e) => {
                    println!("failed: {e}");
                    Ok(if matches!(e, antitree_embed::EmbedError::InternalAssertion(_)) { 4 } else { 2 })
                }
            }
        }
        Cmd::GoodArcs(a) => good_arcs_cmd(a, json),
        Cmd::CheckFree { host, s } => {
            let d = read_digraph(&host)?;
            match is_k2s_free(&d, s) {
                Ok(()) => {
                    if json {
                        print_json(&serde_json::json!({ "free": true }));
                    } else {
                        println!("free");
                    }
                    Ok(0)
                }
                Err(w) => {
                    print_json(&serde_json::json!({ "free": false, "witness": w }));
                    Ok(1)
                }
            }
        }
        Cmd::Select { host, k, r } => {
            let d = read_digraph(&host)?;
            match select_subdigraph(&d, k, r) {
                Ok(sel) => {
                    let mut v = serde_json::to_value(&sel)?;
                    v["subdigraph"] = serde_json::to_value(ArcList::from_digraph(&sel.sub))?;
                    if json {
                        print_json(&v);
                    } else {
                        println!("case {:?}, witness {}", sel.case, sel.witness);
                        println!("{}", serde_json::to_string_pretty(&sel.audit)?);
                    }
                    Ok(0)
                }
                Err(e) => {
                    println!("failed: {e}");
                    Ok(if matches!(e, antitree_embed::EmbedError::InternalAssertion(_)) { 4 } else { 2 })
                }
            }
        }
        Cmd::Gen { what, out } => {
            let d = match what {
                GenCmd::Burr { k } => {
                    if k < 2 {
                        bail!("k must be at least 2");
                    }
                    gen_burr(k)
                }
                GenCmd::Incidence { q } => gen_incidence(q)?,
                GenCmd::Random { n, k } => gen_random_dense(n, k, cli.seed)?,
                GenCmd::Tree { k } => {
                    if k == 0 {
                        bail!("k must be positive");
                    }
                    random_antitree(k, &mut ChaCha8Rng::seed_from_u64(cli.seed)).digraph().clone()
                }
            };
            let text = if json {
                serde_json::to_string_pretty(&ArcList::from_digraph(&d))? + "\n"
            } else {
                format_arc_list(&d, None)
            };
            match out {
                Some(p) => fs::write(p, text)?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Cmd::Oracle { tree, host, budget } => {
            let (t, d) = (read_tree(&tree)?, read_digraph(&host)?);
            let s = oracle_embed(&d, &t, budget);
            if json {
                print_json(&serde_json::to_value(&s)?);
            } else {
                println!("{} ({} nodes)", verdict_name(&s.verdict), s.nodes_expanded);
                if let OracleVerdict::Embeds(e) = &s.verdict {
                    for (x, h) in e.map().iter().enumerate() {
                        println!("{x} -> {h}");
                    }
                }
            }
            Ok(match s.verdict {
                OracleVerdict::Embeds(_) => 0,
                OracleVerdict::NotContained => 1,
                OracleVerdict::Inconclusive => 3,
            })
        }
        Cmd::Sweep(a) => {
            let mut cfg = match &a.config {
                Some(p) => serde_json::from_str::<SweepConfig>(&fs::read_to_string(p)?)
                    .with_context(|| format!("reading config {}", p.display()))?,
                None => SweepConfig::new(Suite::Prop3Exhaustive),
            };
            if let Some(s) = &a.suite {
                cfg.suite = s.parse()?;
            }
            cfg.seed = if a.config.is_some() && cli.seed == 0 { cfg.seed } else { cli.seed };
            cfg.samples = a.samples.or(cfg.samples);
            cfg.n_max = a.n_max.or(cfg.n_max);
            cfg.k_max = a.k_max.or(cfg.k_max);
            cfg.q = a.q.or(cfg.q);
            cfg.jobs = cli.jobs.or(cfg.jobs);
            cfg.output = a.output.or(cfg.output);
            let report = run_sweep(&cfg)?;
            let body = serde_json::to_string_pretty(&report.to_json())?;
            if let Some(p) = &cfg.output {
                fs::write(p, &body)?;
            }
            if json {
                println!("{body}");
            } else {
                println!("{}", report.summary());
            }
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn good_arcs_cmd(a: GoodArgs, json: bool) -> Result<u8> {
    let (t, d) = (read_tree(&a.tree)?, read_digraph(&a.host)?);
    let c = ConvexDigraph::with_order(&d, parse_order(&a.order)?);
    let table = match good_arcs(&c, &t) {
        Ok(table) => table,
        Err(e) => {
            println!("failed: {e}");
            return Ok(if matches!(e, antitree_embed::EmbedError::InternalAssertion(_)) { 4 } else { 2 });
        }
    };
    let good: Vec<[usize; 2]> = table.final_good().iter().map(|a| [a.tail, a.head]).collect();
    let witness = match &a.witness {
        None => None,
        Some(s) => {
            let (u, v) = s.split_once(',').context("witness must be `u,v`")?;
            let arc = Arc::new(u.trim().parse()?, v.trim().parse()?);
            Some(table.witness(arc).with_context(|| format!("{u}->{v} is not a good arc"))?)
        }
    };
    if json {
        print_json(&serde_json::json!({
            "order": c.order(),
            "good": good,
            "witness": witness.as_ref().map(pairs),
        }));
    } else {
        println!("{} good arcs", good.len());
        for [u, v] in &good {
            println!("{u} {v}");
        }
        if let Some(e) = &witness {
            println!("witness: {:?}", pairs(e));
        }
    }
    Ok(0)
}

fn verdict_name(v: &OracleVerdict) -> &'static str {
    match v {
        OracleVerdict::Embeds(_) => "embeds",
        OracleVerdict::NotContained => "not contained",
        OracleVerdict::Inconclusive => "inconclusive",
    }
}
