//! Index a background corpus and inspect the five features of every
//! property candidate for one query.
//!
//! ```text
//! cargo run --example feature_index
//! ```

use termpicker::eval::{generate_synthetic_corpus, SynthConfig};
use termpicker::features::{load_index, save_index, BackgroundCorpus, CooccurrenceMode};
use termpicker::rdf::Iri;
use termpicker::slp::{Position, QuerySlp, Slp};

fn main() {
    let corpus = generate_synthetic_corpus(&SynthConfig { plds: 30, ..SynthConfig::default() }, 5);
    let index = BackgroundCorpus::build(corpus.graphs.values().collect::<Vec<_>>());
    println!(
        "{} SLPs, {} types, {} properties",
        index.slp_count(),
        index.candidates(Position::Sts).len(),
        index.candidates(Position::Ps).len()
    );

    // Start from a stored pattern and hide its properties.
    let (stored, plds) = index.slps().iter().max_by_key(|(_, p)| p.len()).unwrap();
    println!("most shared SLP ({} PLDs): {stored}", plds.len());
    let query = QuerySlp::new(Slp::new(stored.sts().iter().cloned(), [], stored.ots().iter().cloned()).unwrap()).unwrap();

    let mut rows = index.features_for_candidates(&query, Position::Ps);
    rows.sort_by_key(|(term, f)| (std::cmp::Reverse(f.f5), term.clone()));
    println!("\n{:<34} {:>4} {:>4} {:>4} {:>3} {:>4}", "property", "f1", "f2", "f3", "f4", "f5");
    for (term, f) in rows.iter().take(8) {
        println!("{:<34} {:>4} {:>4} {:>4} {:>3} {:>4}", term.as_str(), f.f1, f.f2, f.f3, f.f4, f.f5);
    }

    // f5 can also count each matching SLP once per publisher.
    let weighted = index.clone().with_cooccurrence_mode(CooccurrenceMode::ProvenanceWeighted);
    let top: &Iri = &rows[0].0;
    println!(
        "\nf5 of {top}: {} distinct, {} weighted",
        index.f5_slp_cooccurrence(&query, top, Position::Ps).unwrap(),
        weighted.f5_slp_cooccurrence(&query, top, Position::Ps).unwrap()
    );

    let dir = tempfile_dir();
    save_index(&index, &dir).unwrap();
    let reloaded = load_index(&dir).unwrap();
    assert_eq!(reloaded.features_for_candidates(&query, Position::Ps), index.features_for_candidates(&query, Position::Ps));
    println!("index saved to and reloaded from {}", dir.display());
}

fn tempfile_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("termpicker-index-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
