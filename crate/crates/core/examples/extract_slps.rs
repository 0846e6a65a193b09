//! From N-Quads to per-publisher SLPs.
//!
//! Statements are grouped by the pay-level domain of their graph label, and
//! every linked subject/object pair in a group yields one SLP. Pass file
//! paths (plain or `.gz`) to use your own data instead of the built-in
//! sample.

use std::path::PathBuf;

use termpicker::rdf::{ingest_files, parse_str, partition_by_pld, pay_level_domain, vocabulary_namespace, Iri, Partition};
use termpicker::slp::{compute_slps, write_slp_store, SlpSet};

const SAMPLE: &str = r#"
<http://ex1.org/sports_001> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://xmlns.com/foaf/0.1/Person> <http://ex1.org/graph> .
<http://ex1.org/sports_001> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://dbpedia.org/ontology/ChessPlayer> <http://ex1.org/graph> .
<http://ex1.org/sports_001> <http://xmlns.com/foaf/0.1/knows> <http://ex1.org/sports_002> <http://ex1.org/graph> .
<http://ex1.org/sports_002> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://xmlns.com/foaf/0.1/Person> <http://ex1.org/graph> .
<http://ex1.org/sports_002> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://dbpedia.org/ontology/Coach> <http://ex1.org/graph> .
<http://data.library.co.uk/b/1> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://swrc.ontoware.org/ontology#Publication> <http://data.library.co.uk/dump> .
<http://data.library.co.uk/b/1> <http://purl.org/dc/elements/1.1/title> "Linked Data" <http://data.library.co.uk/dump> .
<http://data.library.co.uk/b/1> <http://purl.org/dc/elements/1.1/creator> _:a <http://data.library.co.uk/dump> .
_:a <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://xmlns.com/foaf/0.1/Person> <http://data.library.co.uk/dump> .
"#;

fn main() {
    let files: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    let partition: Partition = if files.is_empty() {
        partition_by_pld(parse_str(SAMPLE).expect("sample is valid N-Quads"))
    } else {
        let outcome = ingest_files(&files, false).expect("inputs are readable");
        println!("skipped {} malformed lines", outcome.skipped_lines);
        outcome.partition
    };

    for probe in ["http://data.library.co.uk/b/1", "http://swrc.ontoware.org/ontology#Publication"] {
        let iri = Iri::new(probe).unwrap();
        println!(
            "{probe}\n  PLD {}, namespace {}",
            pay_level_domain(&iri).unwrap(),
            vocabulary_namespace(&iri).unwrap()
        );
    }

    let mut all = SlpSet::new();
    for (pld, graph) in &partition.graphs {
        let slps = compute_slps(graph);
        println!("\n{pld}: {} quads, {} SLPs", graph.quads.len(), slps.len());
        for slp in slps.slps() {
            println!("  {slp}");
        }
        all = all.merge(slps);
    }
    println!("\n{} quads without a PLD", partition.unassigned.len());

    println!("\nSLP store:");
    write_slp_store(std::io::stdout().lock(), &all).unwrap();
}
