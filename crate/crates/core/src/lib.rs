//! Vocabulary term recommendation from schema-level patterns (SLPs).

pub mod cli;
pub mod eval;
pub mod features;
pub mod rdf;
pub mod ranker;
pub mod seed;
pub mod service;
pub mod slp;
