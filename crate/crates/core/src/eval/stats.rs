use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::EvalError;
use crate::rdf::{pay_level_domain, Corpus, Iri, PayLevelDomain, PldGraph};
use crate::slp::compute_slps;

/// Term-reuse statistics of one dataset.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PldStats {
    pub pld: PayLevelDomain,
    /// C1: distinct properties (except `rdf:type`) and RDF types used.
    pub distinct_terms: usize,
    /// Terms whose namespace host belongs to a different PLD.
    pub reused_terms: usize,
    pub slp_count: usize,
}

impl PldStats {
    /// C2: share of reused terms, 0 for a dataset without terms.
    pub fn reuse_ratio(&self) -> f64 {
        if self.distinct_terms == 0 {
            0.0
        } else {
            self.reused_terms as f64 / self.distinct_terms as f64
        }
    }

    pub fn of_graph(graph: &PldGraph) -> PldStats {
        let mut terms: BTreeSet<&Iri> = BTreeSet::new();
        for q in &graph.quads {
            match q.type_object() {
                Some(t) => terms.insert(t),
                None if !q.predicate.is_rdf_type() => terms.insert(&q.predicate),
                None => false,
            };
        }
        // A namespace without a resolvable PLD cannot be self-hosted.
        let reused = terms
            .iter()
            .filter(|t| pay_level_domain(t).map_or(true, |p| p != graph.pld))
            .count();
        PldStats {
            pld: graph.pld.clone(),
            distinct_terms: terms.len(),
            reused_terms: reused,
            slp_count: compute_slps(graph).len(),
        }
    }
}

/// Statistics for every PLD of the corpus, in PLD order.
pub fn pld_stats(corpus: &Corpus) -> Vec<PldStats> {
    let graphs: Vec<&PldGraph> = corpus.graphs.values().collect();
    graphs.into_par_iter().map(PldStats::of_graph).collect()
}

/// The `n` PLDs with the highest C2, then highest C1, then name.
pub fn select_plds(stats: &[PldStats], n: usize) -> Result<Vec<PayLevelDomain>, EvalError> {
    if stats.len() < n {
        return Err(EvalError::TooFewPlds {
            needed: n,
            available: stats.len(),
        });
    }
    let mut order: Vec<&PldStats> = stats.iter().collect();
    order.sort_by(|a, b| {
        b.reuse_ratio()
            .total_cmp(&a.reuse_ratio())
            .then(b.distinct_terms.cmp(&a.distinct_terms))
            .then_with(|| a.pld.cmp(&b.pld))
    });
    Ok(order.into_iter().take(n).map(|s| s.pld.clone()).collect())
}

/// Renders `pld  C1  C2  #SLPs` rows.
pub fn format_pld_stats<'a>(stats: impl IntoIterator<Item = &'a PldStats>) -> String {
    let stats: Vec<&PldStats> = stats.into_iter().collect();
    let width = stats.iter().map(|s| s.pld.as_str().len()).max().unwrap_or(3).max(3);
    let mut out = format!("{:<width$}  {:>6}  {:>5}  {:>6}\n", "PLD", "C1", "C2", "#SLPs");
    for s in stats {
        let _ = writeln!(
            out,
            "{:<width$}  {:>6}  {:>5.2}  {:>6}",
            s.pld.as_str(),
            s.distinct_terms,
            s.reuse_ratio(),
            s.slp_count
        );
    }
    out
}
