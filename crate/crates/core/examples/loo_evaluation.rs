//! Leave-one-out evaluation on a generated corpus: pick the ten PLDs with the
//! most reuse, then train and test Random Forests and Coordinate Ascent with
//! each feature mask.
//!
//! ```text
//! cargo run --release --example loo_evaluation -- [seed]
//! ```

use std::time::Instant;

use termpicker::eval::{
    format_pld_stats, generate_synthetic_corpus, pld_stats, run_loo_evaluation, select_plds,
    EvalConfig, FoldPlan, SynthConfig,
};

fn main() {
    env_logger::init();
    let seed: u64 = std::env::args().nth(1).map_or(7, |s| s.parse().expect("seed must be an integer"));

    let corpus = generate_synthetic_corpus(&SynthConfig::default(), seed);
    println!("{} PLDs, {} quads", corpus.len(), corpus.quad_count());

    let stats = pld_stats(&corpus);
    let selected = select_plds(&stats, 10).expect("corpus has enough PLDs");
    let chosen: Vec<_> = stats.iter().filter(|s| selected.contains(&s.pld)).collect();
    print!("{}", format_pld_stats(chosen));

    let plan = FoldPlan::new(selected, &corpus.plds()).expect("valid plan");
    let config = EvalConfig {
        seed,
        ..EvalConfig::default()
    };
    let started = Instant::now();
    let report = run_loo_evaluation(&corpus, &plan, &config).expect("evaluation runs");
    println!("\n{}", report.to_table());
    println!("finished in {:.1?}", started.elapsed());
}
