//! The `termpicker` command line. Exit status is 0 on success, 1 for usage
//! errors and 2 when input data cannot be read or processed.

use std::collections::BTreeSet;
use std::error::Error;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;

use crate::eval::{
    format_pld_stats, generate_synthetic_corpus, pld_stats, run_loo_evaluation, select_plds, EvalConfig,
    FoldPlan, SynthConfig,
};
use crate::features::{load_index, save_index, BackgroundCorpus, CooccurrenceMode};
use crate::ranker::{
    generate_training_data, load_model, rank, save_model, train, Algorithm, FeatureMask, Hyperparams,
    ModelSet, Recommendation,
};
use crate::rdf::{ingest_files, write_corpus_dir, Corpus, Iri, PayLevelDomain};
use crate::seed::derive_seed;
use crate::service::{self, AppState, DEFAULT_BIND};
use crate::slp::{compute_slps, read_slp_store, write_slp_store, Position, QuerySlp, Slp, SlpSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

type BoxError = Box<dyn Error + Send + Sync>;

/// A problem with how the command was invoked rather than with its inputs.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl Error for UsageError {}

fn usage(msg: impl Into<String>) -> BoxError {
    Box::new(UsageError(msg.into()))
}

#[derive(Parser, Debug)]
#[command(name = "termpicker", version, about = "Vocabulary term recommendation from schema-level patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse N-Quads files and write a per-PLD corpus directory.
    Ingest(IngestArgs),
    /// Compute the SLPs of a corpus directory into an SLP store.
    Slps(SlpsArgs),
    /// Build the feature index from a corpus directory.
    BuildIndex(BuildIndexArgs),
    /// Train a ranking model from an SLP store against an index.
    Train(TrainArgs),
    /// Rank candidate terms for a query SLP.
    Recommend(RecommendArgs),
    /// Leave-one-out evaluation over the PLDs of a corpus.
    Evaluate(EvaluateArgs),
    /// Generate a synthetic corpus directory.
    Synth(SynthArgs),
    /// Serve recommendations over HTTP.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Input file or glob pattern; repeatable. `.gz` files are decompressed.
    #[arg(long = "input", required = true)]
    inputs: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// Fail on the first malformed line instead of skipping it.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct SlpsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Only use the PLDs listed in this file (one per line).
    #[arg(long)]
    plds: Option<PathBuf>,
    /// Skip the PLDs listed in this file.
    #[arg(long)]
    exclude_plds: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BuildIndexArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// PLDs to leave out of the index (one per line).
    #[arg(long)]
    exclude_plds: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelScope {
    Sts,
    Ps,
    Ots,
    Pooled,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    slps: PathBuf,
    #[arg(long)]
    index: PathBuf,
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    /// `pop`, `same`, `slp`, or a list such as `f1+f5`.
    #[arg(long, value_parser = parse_mask)]
    features: FeatureMask,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Train on the queries of one position only.
    #[arg(long, value_enum, default_value_t = ModelScope::Pooled)]
    position: ModelScope,
    #[arg(long)]
    trees: Option<usize>,
    /// Most terms removed from one SLP when generating queries.
    #[arg(long, default_value_t = 2)]
    max_extract: usize,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model used for every position without a specific one.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long, env = service::ENV_MODEL_STS)]
    model_sts: Option<PathBuf>,
    #[arg(long, env = service::ENV_MODEL_PS)]
    model_ps: Option<PathBuf>,
    #[arg(long, env = service::ENV_MODEL_OTS)]
    model_ots: Option<PathBuf>,
}

impl ModelArgs {
    fn paths(&self) -> Result<[PathBuf; 3], BoxError> {
        let pick = |specific: &Option<PathBuf>, pos: Position| {
            specific
                .clone()
                .or_else(|| self.model.clone())
                .ok_or_else(|| usage(format!("no model given for position {pos} (use --model or --model-{pos})")))
        };
        Ok([
            pick(&self.model_sts, Position::Sts)?,
            pick(&self.model_ps, Position::Ps)?,
            pick(&self.model_ots, Position::Ots)?,
        ])
    }

    fn load(&self) -> Result<ModelSet, BoxError> {
        let [sts, ps, ots] = self.paths()?;
        let load = |p: &Path| load_model(p).map_err(|e| format!("{}: {e}", p.display()));
        if sts == ps && ps == ots {
            Ok(ModelSet::pooled(load(&sts)?))
        } else {
            Ok(ModelSet::per_position(load(&sts)?, load(&ps)?, load(&ots)?))
        }
    }
}

#[derive(Args, Debug)]
struct RecommendArgs {
    #[arg(long, env = service::ENV_INDEX)]
    index: PathBuf,
    #[command(flatten)]
    models: ModelArgs,
    #[arg(long)]
    sts: Vec<String>,
    #[arg(long)]
    ps: Vec<String>,
    #[arg(long)]
    ots: Vec<String>,
    /// Position(s) to recommend for; all three when omitted, each list
    /// preceded by a `# <position>` line.
    #[arg(long, value_parser = parse_position)]
    position: Vec<Position>,
    #[arg(long, default_value_t = service::DEFAULT_LIMIT)]
    top: usize,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Number of PLDs selected for leave-one-out.
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Evaluate exactly these PLDs (one per line) instead of selecting by reuse.
    #[arg(long)]
    plds: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "rf,ca", value_parser = parse_algorithm)]
    algos: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "pop,same,slp", value_parser = parse_mask)]
    features: Vec<FeatureMask>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report TSV; written to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trees: Option<usize>,
    /// One model for all positions instead of one per position.
    #[arg(long)]
    pooled: bool,
    /// Count f5 once per PLD an SLP came from.
    #[arg(long)]
    weighted_cooccurrence: bool,
    #[arg(long, default_value_t = 2)]
    max_extract: usize,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    plds: Option<usize>,
    #[arg(long)]
    vocabularies: Option<usize>,
    #[arg(long)]
    templates: Option<usize>,
    #[arg(long)]
    templates_per_pld: Option<usize>,
    #[arg(long)]
    noise: Option<f64>,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, env = service::ENV_INDEX)]
    index: PathBuf,
    #[command(flatten)]
    models: ModelArgs,
    #[arg(long, env = service::ENV_BIND, default_value = DEFAULT_BIND)]
    bind: SocketAddr,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse()
}

fn parse_mask(s: &str) -> Result<FeatureMask, String> {
    s.parse()
}

fn parse_position(s: &str) -> Result<Position, String> {
    s.parse().map_err(|e: crate::slp::SlpError| e.to_string())
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn dispatch(command: Command) -> Result<(), BoxError> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Slps(a) => slps(a),
        Command::BuildIndex(a) => build_index(a),
        Command::Train(a) => train_model(a),
        Command::Recommend(a) => recommend(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Synth(a) => synth(a),
        Command::Serve(a) => serve(a),
    }
}

fn expand_inputs(patterns: &[String]) -> Result<Vec<PathBuf>, BoxError> {
    let mut files = BTreeSet::new();
    for pattern in patterns {
        let before = files.len();
        for entry in glob::glob(pattern).map_err(|e| usage(format!("bad pattern `{pattern}`: {e}")))? {
            let path = entry?;
            if path.is_file() {
                files.insert(path);
            }
        }
        if files.len() == before {
            return Err(format!("no input files match `{pattern}`").into());
        }
    }
    Ok(files.into_iter().collect())
}

/// One PLD per line; blank lines and `#` comments are ignored.
fn read_pld_list(path: &Path) -> Result<BTreeSet<PayLevelDomain>, BoxError> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            PayLevelDomain::from_domain(l).map_err(|e| format!("{}: {e}", path.display()).into())
        })
        .collect()
}

fn load_corpus(dir: &Path, only: Option<&BTreeSet<PayLevelDomain>>, skip: Option<&BTreeSet<PayLevelDomain>>) -> Result<Corpus, BoxError> {
    let corpus = Corpus::load_dir_filtered(dir, |p| {
        only.is_none_or(|s| s.contains(p)) && skip.is_none_or(|s| !s.contains(p))
    })
    .map_err(|e| format!("{}: {e}", dir.display()))?;
    info!("loaded {} PLDs, {} quads from {}", corpus.len(), corpus.quad_count(), dir.display());
    Ok(corpus)
}

fn create(path: &Path) -> Result<BufWriter<File>, BoxError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| format!("{}: {e}", path.display()))?))
}

fn ingest(a: IngestArgs) -> Result<(), BoxError> {
    let files = expand_inputs(&a.inputs)?;
    let outcome = ingest_files(&files, a.strict)?;
    let entries = write_corpus_dir(&a.out, outcome.partition.graphs.values())?;
    eprintln!(
        "{} files: {} quads in {} PLDs, {} unassigned quads, {} skipped lines",
        files.len(),
        outcome.partition.quad_count(),
        entries.len(),
        outcome.partition.unassigned.len(),
        outcome.skipped_lines
    );
    Ok(())
}

fn slps(a: SlpsArgs) -> Result<(), BoxError> {
    let only = a.plds.as_deref().map(read_pld_list).transpose()?;
    let skip = a.exclude_plds.as_deref().map(read_pld_list).transpose()?;
    let corpus = load_corpus(&a.corpus, only.as_ref(), skip.as_ref())?;
    let set = corpus
        .graphs
        .par_iter()
        .map(|(_, g)| compute_slps(g))
        .reduce(SlpSet::new, SlpSet::merge);
    let mut out = create(&a.out)?;
    write_slp_store(&mut out, &set)?;
    out.flush()?;
    eprintln!("{} SLPs from {} PLDs", set.len(), corpus.len());
    Ok(())
}

fn build_index(a: BuildIndexArgs) -> Result<(), BoxError> {
    let skip = a.exclude_plds.as_deref().map(read_pld_list).transpose()?;
    let corpus = load_corpus(&a.corpus, None, skip.as_ref())?;
    let index = BackgroundCorpus::build(corpus.graphs.par_iter().map(|(_, g)| g));
    save_index(&index, &a.out)?;
    eprintln!(
        "index over {} PLDs: {} SLPs, {} types, {} properties",
        corpus.len(),
        index.slp_count(),
        index.candidates(Position::Sts).len(),
        index.candidates(Position::Ps).len()
    );
    Ok(())
}

fn train_model(a: TrainArgs) -> Result<(), BoxError> {
    let slps = read_slp_store(BufReader::new(
        File::open(&a.slps).map_err(|e| format!("{}: {e}", a.slps.display()))?,
    ))
    .map_err(|e| format!("{}: {e}", a.slps.display()))?;
    let index = load_index(&a.index).map_err(|e| format!("{}: {e}", a.index.display()))?;
    let mut hp = Hyperparams::default();
    if let Some(t) = a.trees {
        hp.forest.trees = t;
    }
    hp.validate().map_err(|e| usage(e.to_string()))?;

    let data = generate_training_data(&slps, &index, a.max_extract, derive_seed(a.seed, 0));
    let position = match a.position {
        ModelScope::Sts => Some(Position::Sts),
        ModelScope::Ps => Some(Position::Ps),
        ModelScope::Ots => Some(Position::Ots),
        ModelScope::Pooled => None,
    };
    let data = match position {
        Some(p) => data.for_position(p),
        None => data,
    };
    let model = train(a.algo, &data, &hp, a.features, derive_seed(a.seed, 1))?.with_position(position);
    save_model(&model, &a.out)?;
    eprintln!(
        "{} model ({}) trained on {} queries ({} usable)",
        a.algo,
        a.features,
        data.len(),
        data.trainable().count()
    );
    Ok(())
}

fn parse_terms(values: &[String]) -> Result<Vec<Iri>, BoxError> {
    values
        .iter()
        .map(|v| Iri::new(v).map_err(|e| usage(e.to_string())))
        .collect()
}

/// One line per recommendation: `rank score term f1 f2 f3 f4 f5`,
/// tab-separated. Scores print in shortest round-trip form.
pub fn format_recommendations(recs: &[Recommendation]) -> String {
    let mut out = String::new();
    for (i, r) in recs.iter().enumerate() {
        let f = r.features;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            i + 1,
            r.score,
            r.term,
            f.f1,
            f.f2,
            f.f3,
            f.f4,
            f.f5
        ));
    }
    out
}

fn recommend(a: RecommendArgs) -> Result<(), BoxError> {
    if a.top == 0 {
        return Err(usage("--top must be at least 1"));
    }
    let slp = Slp::new(parse_terms(&a.sts)?, parse_terms(&a.ps)?, parse_terms(&a.ots)?)
        .map_err(|e| usage(e.to_string()))?;
    let query = QuerySlp::new(slp).map_err(|e| usage(e.to_string()))?;
    let models = a.models.load()?;
    let index = load_index(&a.index).map_err(|e| format!("{}: {e}", a.index.display()))?;
    let positions = if a.position.is_empty() { Position::ALL.to_vec() } else { a.position.clone() };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for &pos in &positions {
        if positions.len() > 1 {
            writeln!(out, "# {pos}")?;
        }
        let recs = rank(models.get(pos), &index, &query, pos, a.top);
        out.write_all(format_recommendations(&recs).as_bytes())?;
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<(), BoxError> {
    let corpus = load_corpus(&a.corpus, None, None)?;
    let stats = pld_stats(&corpus);
    let selected = match &a.plds {
        Some(path) => read_pld_list(path)?.into_iter().collect(),
        None => select_plds(&stats, a.folds)?,
    };
    let plan = FoldPlan::new(selected, &corpus.plds())?;
    let chosen: Vec<_> = plan
        .selected()
        .iter()
        .filter_map(|p| stats.iter().find(|s| &s.pld == p))
        .collect();
    info!("selected PLDs:\n{}", format_pld_stats(chosen));

    let mut hyperparams = Hyperparams::default();
    if let Some(t) = a.trees {
        hyperparams.forest.trees = t;
    }
    hyperparams.validate().map_err(|e| usage(e.to_string()))?;
    let config = EvalConfig {
        algorithms: a.algos,
        masks: a.features,
        seed: a.seed,
        hyperparams,
        max_extract: a.max_extract,
        pooled: a.pooled,
        cooccurrence: if a.weighted_cooccurrence {
            CooccurrenceMode::ProvenanceWeighted
        } else {
            CooccurrenceMode::Distinct
        },
    };
    let report = run_loo_evaluation(&corpus, &plan, &config)?;
    match &a.out {
        Some(path) => {
            let mut out = create(path)?;
            report.write_tsv(&mut out)?;
            out.flush()?;
            print!("{}", report.to_table());
        }
        None => {
            report.write_tsv(io::stdout().lock())?;
            eprint!("{}", report.to_table());
        }
    }
    Ok(())
}

fn synth(a: SynthArgs) -> Result<(), BoxError> {
    let mut config = SynthConfig::default();
    config.plds = a.plds.unwrap_or(config.plds);
    config.vocabularies = a.vocabularies.unwrap_or(config.vocabularies);
    config.templates = a.templates.unwrap_or(config.templates);
    config.templates_per_pld = a.templates_per_pld.unwrap_or(config.templates_per_pld);
    if let Some(noise) = a.noise {
        if !(0.0..=1.0).contains(&noise) {
            return Err(usage("--noise must be within [0, 1]"));
        }
        config.noise_rate = noise;
    }
    let corpus = generate_synthetic_corpus(&config, a.seed);
    corpus.write_dir(&a.out)?;
    eprintln!("{} PLDs, {} quads written to {}", corpus.len(), corpus.quad_count(), a.out.display());
    Ok(())
}

fn serve(a: ServeArgs) -> Result<(), BoxError> {
    let [sts, ps, ots] = a.models.paths()?;
    let state = AppState::load(&a.index, &sts, &ps, &ots)?;
    eprintln!("serving {} SLPs on http://{}", state.index.slp_count(), a.bind);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(service::serve(Arc::new(state), a.bind))?;
    Ok(())
}
