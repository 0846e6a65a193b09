//! RDF ingestion: N-Quads parsing, pay-level domains, vocabulary namespaces
//! and per-PLD partitioning.

mod corpus;
pub mod nquads;
mod partition;
mod pld;
mod term;

use thiserror::Error;

pub use corpus::{
    ingest_files, open_input, read_manifest, write_corpus_dir, Corpus, IngestOutcome,
    ManifestEntry, MANIFEST_FILE,
};
pub use nquads::{format_quad, parse_nquads, parse_str, write_nquads, ParseOptions, ParseOutcome, QuadReader};
pub use partition::{partition_by_pld, Partition, PldGraph};
pub use pld::{pay_level_domain, vocabulary_key, vocabulary_namespace, PayLevelDomain, Vocabulary};
pub use term::{BlankNode, Interner, Iri, Literal, Quad, RdfObject, Subject, RDF_TYPE};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message} (at `{token}`)")]
    Parse {
        line: usize,
        token: String,
        message: String,
    },
    #[error("invalid IRI `{iri}`: {reason}")]
    InvalidIri { iri: String, reason: String },
    #[error("invalid blank node label `{0}`")]
    InvalidBlankNode(String),
    #[error("no pay-level domain for `{0}`")]
    NoPayLevelDomain(String),
    #[error("no namespace separator in `{0}`")]
    NoNamespace(String),
    #[error("corpus: {0}")]
    Corpus(String),
}
