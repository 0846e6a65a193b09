//! Generators and index-free reference implementations shared by the
//! integration tests. Everything here is deliberately naive.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::{Command, Output};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use termpicker::rdf::{BlankNode, Iri, Literal, PayLevelDomain, PldGraph, Quad, RdfObject, Subject, RDF_TYPE};
use termpicker::slp::{Position, Slp};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

// ---------------------------------------------------------------- SLPs

pub fn type_pool() -> Vec<Iri> {
    let mut v: Vec<Iri> = (0..4).map(|i| iri(&format!("http://v0.org/ns#T{i}"))).collect();
    v.extend((0..3).map(|i| iri(&format!("http://v1.org/terms/T{i}"))));
    v.push(iri("urn:plainType"));
    v
}

pub fn property_pool() -> Vec<Iri> {
    let mut v: Vec<Iri> = (0..4).map(|i| iri(&format!("http://v0.org/ns#p{i}"))).collect();
    v.extend((0..3).map(|i| iri(&format!("http://v2.org/ns/p{i}"))));
    v.push(iri("http://v1.org/terms/p0"));
    v
}

fn subset(rng: &mut ChaCha8Rng, pool: &[Iri], max: usize) -> Vec<Iri> {
    let n = rng.random_range(0..=max.min(pool.len()));
    pool.choose_multiple(rng, n).cloned().collect()
}

pub fn random_slp(rng: &mut ChaCha8Rng) -> Slp {
    let (types, props) = (type_pool(), property_pool());
    Slp::new(subset(rng, &types, 3), subset(rng, &props, 3), subset(rng, &types, 3)).unwrap()
}

pub fn random_position(rng: &mut ChaCha8Rng) -> Position {
    Position::ALL[rng.random_range(0..3)]
}

/// A random term suitable for `pos`.
pub fn random_term(rng: &mut ChaCha8Rng, pos: Position) -> Iri {
    let pool = if pos.takes_types() { type_pool() } else { property_pool() };
    pool.choose(rng).unwrap().clone()
}

pub fn is_subset(a: &Slp, b: &Slp) -> bool {
    Position::ALL
        .iter()
        .all(|&p| a.terms(p).iter().all(|t| b.terms(p).contains(t)))
}

// ---------------------------------------------------------------- graphs

fn node_pool(rng: &mut ChaCha8Rng, base: &str) -> Vec<Subject> {
    let n = rng.random_range(2..=10);
    (0..n)
        .map(|i| {
            if i % 3 == 2 {
                Subject::Blank(BlankNode::new(format!("b{i}")).unwrap())
            } else {
                Subject::Iri(iri(&format!("{base}r{i}")))
            }
        })
        .collect()
}

fn as_object(s: &Subject) -> RdfObject {
    match s {
        Subject::Iri(i) => RdfObject::Iri(i.clone()),
        Subject::Blank(b) => RdfObject::Blank(b.clone()),
    }
}

/// A random graph with at most `max_quads` quads over shared resource,
/// type and property pools, so that pairs get several links and resources
/// several types. Includes `rdf:type` statements with non-IRI objects.
pub fn random_graph(rng: &mut ChaCha8Rng, pld: &str, max_quads: usize) -> PldGraph {
    let base = format!("http://data.{pld}/");
    let context = iri(&format!("{base}g"));
    let nodes = node_pool(rng, &base);
    let (types, props) = (type_pool(), property_pool());
    let n = rng.random_range(0..=max_quads);
    let mut quads = Vec::with_capacity(n);
    for _ in 0..n {
        let s = nodes.choose(rng).unwrap().clone();
        let roll = rng.random_range(0..100);
        let (p, o) = if roll < 40 {
            (Iri::rdf_type(), RdfObject::Iri(types.choose(rng).unwrap().clone()))
        } else if roll < 43 {
            (Iri::rdf_type(), RdfObject::Literal(Literal::simple("NotAType")))
        } else if roll < 45 {
            (Iri::rdf_type(), as_object(nodes.choose(rng).unwrap()))
        } else if roll < 80 {
            (props.choose(rng).unwrap().clone(), as_object(nodes.choose(rng).unwrap()))
        } else {
            let lit = Literal::simple(format!("v{}", rng.random_range(0..3)));
            (props.choose(rng).unwrap().clone(), RdfObject::Literal(lit))
        };
        quads.push(Quad::new(s, p, o, context.clone()));
    }
    PldGraph::new(PayLevelDomain::from_domain(pld).unwrap(), quads)
}

/// Between one and `max_plds` random graphs of at most `max_quads` quads.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_plds: usize, max_quads: usize) -> Vec<PldGraph> {
    let n = rng.random_range(1..=max_plds);
    (0..n)
        .map(|i| random_graph(rng, &format!("p{i}.org"), max_quads))
        .collect()
}

fn subject_of(o: &RdfObject) -> Option<Subject> {
    match o {
        RdfObject::Iri(i) => Some(Subject::Iri(i.clone())),
        RdfObject::Blank(b) => Some(Subject::Blank(b.clone())),
        RdfObject::Literal(_) => None,
    }
}

fn types_of(graph: &PldGraph, node: &Subject) -> Vec<Iri> {
    graph
        .quads
        .iter()
        .filter(|q| &q.subject == node && q.predicate.as_str() == RDF_TYPE)
        .filter_map(|q| match &q.object {
            RdfObject::Iri(t) => Some(t.clone()),
            _ => None,
        })
        .collect()
}

/// Every subject/object pair is tried; a pair linked by at least one
/// non-`rdf:type` property contributes its maximal SLP.
pub fn brute_force_slps(graph: &PldGraph) -> BTreeSet<Slp> {
    let subjects: BTreeSet<&Subject> = graph.quads.iter().map(|q| &q.subject).collect();
    let objects: BTreeSet<&RdfObject> = graph.quads.iter().map(|q| &q.object).collect();
    let mut out = BTreeSet::new();
    for s in &subjects {
        for o in &objects {
            let ps: Vec<Iri> = graph
                .quads
                .iter()
                .filter(|q| &q.subject == *s && &q.object == *o && q.predicate.as_str() != RDF_TYPE)
                .map(|q| q.predicate.clone())
                .collect();
            if ps.is_empty() {
                continue;
            }
            let ots = subject_of(o).map(|n| types_of(graph, &n)).unwrap_or_default();
            out.insert(Slp::new(types_of(graph, s), ps, ots).unwrap());
        }
    }
    out
}

// ---------------------------------------------------------------- features

/// Namespace up to the first `#`, else the last `/`, else the whole IRI.
pub fn naive_vocabulary(t: &Iri) -> String {
    let s = t.as_str();
    if let Some(i) = s.find('#') {
        return s[..=i].to_owned();
    }
    match s.rfind('/') {
        Some(i) => s[..=i].to_owned(),
        None => s.to_owned(),
    }
}

/// Terms a graph uses: `rdf:type` objects and non-`rdf:type` predicates,
/// each with its occurrence count.
fn used_terms(graph: &PldGraph) -> BTreeMap<Iri, u64> {
    let mut out = BTreeMap::new();
    for q in &graph.quads {
        if q.predicate.as_str() == RDF_TYPE {
            if let RdfObject::Iri(t) = &q.object {
                *out.entry(t.clone()).or_default() += 1;
            }
        } else {
            *out.entry(q.predicate.clone()).or_default() += 1;
        }
    }
    out
}

/// Index-free feature computation over a list of background graphs.
pub struct NaiveFeatures {
    graphs: Vec<PldGraph>,
    slps_per_graph: Vec<BTreeSet<Slp>>,
}

impl NaiveFeatures {
    pub fn new(graphs: &[PldGraph]) -> Self {
        NaiveFeatures {
            graphs: graphs.to_vec(),
            slps_per_graph: graphs.iter().map(brute_force_slps).collect(),
        }
    }

    pub fn all_slps(&self) -> BTreeSet<Slp> {
        self.slps_per_graph.iter().flatten().cloned().collect()
    }

    /// Types for STS/OTS, properties for PS, sorted.
    pub fn candidates(&self, pos: Position) -> Vec<Iri> {
        let mut out = BTreeSet::new();
        for g in &self.graphs {
            for q in &g.quads {
                if pos.takes_types() {
                    if q.predicate.as_str() == RDF_TYPE {
                        if let RdfObject::Iri(t) = &q.object {
                            out.insert(t.clone());
                        }
                    }
                } else if q.predicate.as_str() != RDF_TYPE {
                    out.insert(q.predicate.clone());
                }
            }
        }
        out.into_iter().collect()
    }

    /// `[f1, f2, f3, f4, f5]`, with f5 counting distinct SLPs when
    /// `weighted` is false and SLP/PLD pairs when true.
    pub fn features(&self, q: &Slp, x: &Iri, pos: Position, weighted: bool) -> [u64; 5] {
        let vocab = naive_vocabulary(x);
        let mut f1 = 0;
        let mut f2 = 0;
        let mut f3 = 0;
        for g in &self.graphs {
            let used = used_terms(g);
            if let Some(n) = used.get(x) {
                f1 += 1;
                f3 += n;
            }
            if used.keys().any(|t| naive_vocabulary(t) == vocab) {
                f2 += 1;
            }
        }
        let f4 = Position::ALL
            .iter()
            .flat_map(|&p| q.terms(p))
            .any(|t| naive_vocabulary(t) == vocab) as u64;
        let extended = q.extend(pos, x.clone()).unwrap();
        let f5 = self
            .all_slps()
            .iter()
            .filter(|s| is_subset(&extended, s))
            .map(|s| {
                if weighted {
                    self.slps_per_graph.iter().filter(|g| g.contains(s)).count() as u64
                } else {
                    1
                }
            })
            .sum();
        [f1, f2, f3, f4, f5]
    }
}

// ---------------------------------------------------------------- metrics

/// AP as the mean, over relevant items, of precision at that item's rank
/// (zero for items that were never ranked).
pub fn naive_ap<T: PartialEq>(ranked: &[T], relevant: &[T]) -> f64 {
    let mut total = 0.0;
    for r in relevant {
        if let Some(pos) = ranked.iter().position(|x| x == r) {
            let k = pos + 1;
            let hits = ranked[..k].iter().filter(|x| relevant.contains(x)).count();
            total += hits as f64 / k as f64;
        }
    }
    total / relevant.len() as f64
}

pub fn naive_rr<T: PartialEq>(ranked: &[T], relevant: &[T], cutoff: usize) -> f64 {
    ranked
        .iter()
        .take(cutoff)
        .position(|x| relevant.contains(x))
        .map_or(0.0, |i| 1.0 / (i + 1) as f64)
}

// ---------------------------------------------------------------- CLI

pub fn termpicker(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_termpicker"))
        .args(args)
        .env_remove("TERMPICKER_INDEX")
        .env_remove("TERMPICKER_MODEL_STS")
        .env_remove("TERMPICKER_MODEL_PS")
        .env_remove("TERMPICKER_MODEL_OTS")
        .env_remove("TERMPICKER_BIND")
        .output()
        .expect("termpicker binary runs")
}

/// Runs the binary and panics with its stderr unless it exits with 0.
pub fn termpicker_ok(args: &[&str]) -> String {
    let out = termpicker(args);
    assert!(
        out.status.success(),
        "termpicker {} failed ({:?}):\n{}",
        args.join(" "),
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are UTF-8")
}

/// The artifacts of one CLI pipeline run.
pub struct Pipeline {
    pub corpus: std::path::PathBuf,
    pub slps: std::path::PathBuf,
    pub index: std::path::PathBuf,
    pub model_pooled: std::path::PathBuf,
    pub models: [std::path::PathBuf; 3],
    pub report: std::path::PathBuf,
}

/// synth → ingest → slps → build-index → train, all under `dir`. The index
/// leaves out the PLDs listed in `eval_plds`; SLPs and models come from
/// them. When `evaluate_folds` is set the evaluation report is written too.
pub fn run_pipeline(dir: &Path, seed: u64, synth_plds: usize, eval_plds: usize, evaluate_folds: Option<usize>) -> Pipeline {
    let p = |name: &str| dir.join(name);
    let seed_s = seed.to_string();
    termpicker_ok(&["synth", "--out", path_str(&p("raw")), "--seed", &seed_s, "--plds", &synth_plds.to_string()]);
    let pattern = format!("{}/*.nq", path_str(&p("raw")));
    termpicker_ok(&["ingest", "--input", &pattern, "--out", path_str(&p("corpus")), "--strict"]);
    let list: String = (0..eval_plds).map(|i| format!("site{i:03}.org\n")).collect();
    std::fs::write(p("eval_plds.txt"), list).unwrap();
    termpicker_ok(&[
        "slps",
        "--corpus",
        path_str(&p("corpus")),
        "--plds",
        path_str(&p("eval_plds.txt")),
        "--out",
        path_str(&p("slps.tsv")),
    ]);
    termpicker_ok(&[
        "build-index",
        "--corpus",
        path_str(&p("corpus")),
        "--exclude-plds",
        path_str(&p("eval_plds.txt")),
        "--out",
        path_str(&p("index")),
    ]);
    let train = |algo: &str, position: &str, out: &str| {
        termpicker_ok(&[
            "train",
            "--slps",
            path_str(&p("slps.tsv")),
            "--index",
            path_str(&p("index")),
            "--algo",
            algo,
            "--features",
            "slp",
            "--seed",
            &seed_s,
            "--position",
            position,
            "--out",
            path_str(&p(out)),
        ]);
    };
    train("ca", "pooled", "model_ca.json");
    for pos in ["sts", "ps", "ots"] {
        train("rf", pos, &format!("model_rf_{pos}.json"));
    }
    if let Some(folds) = evaluate_folds {
        termpicker_ok(&[
            "evaluate",
            "--corpus",
            path_str(&p("corpus")),
            "--folds",
            &folds.to_string(),
            "--algos",
            "rf,ca",
            "--features",
            "pop,same,slp",
            "--seed",
            &seed_s,
            "--out",
            path_str(&p("report.tsv")),
        ]);
    }
    Pipeline {
        corpus: p("corpus"),
        slps: p("slps.tsv"),
        index: p("index"),
        model_pooled: p("model_ca.json"),
        models: ["sts", "ps", "ots"].map(|pos| p(&format!("model_rf_{pos}.json"))),
        report: p("report.tsv"),
    }
}
