use std::collections::BTreeSet;
use std::io::{self, Write};

use rand::seq::index;
use rand::Rng;

use crate::features::{BackgroundCorpus, FeatureVector};
use crate::rdf::Iri;
use crate::seed;
use crate::slp::{Position, QuerySlp, Slp, SlpSet};

/// One scored candidate of an extraction query.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub term: Iri,
    pub features: FeatureVector,
    pub relevant: bool,
}

/// A query-SLP produced by removing terms from a source SLP, together with
/// every candidate at one position.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionQuery {
    pub id: u32,
    pub position: Position,
    pub source: Slp,
    pub query: QuerySlp,
    /// All terms removed at `position`, including ones the corpus never saw.
    pub relevant: BTreeSet<Iri>,
    /// Candidates in IRI order.
    pub candidates: Vec<Candidate>,
}

impl ExtractionQuery {
    /// Builds the query for `position`, featurizing every corpus candidate.
    pub fn new(
        id: u32,
        source: Slp,
        query: QuerySlp,
        position: Position,
        relevant: BTreeSet<Iri>,
        corpus: &BackgroundCorpus,
    ) -> Self {
        let candidates = corpus
            .features_for_candidates(&query, position)
            .into_iter()
            .map(|(term, features)| Candidate {
                relevant: relevant.contains(&term),
                term,
                features,
            })
            .collect();
        ExtractionQuery {
            id,
            position,
            source,
            query,
            relevant,
            candidates,
        }
    }

    /// Number of relevant terms that appear among the candidates.
    pub fn reachable(&self) -> usize {
        self.candidates.iter().filter(|c| c.relevant).count()
    }

    /// A query is usable for training when some relevant term is reachable.
    pub fn is_trainable(&self) -> bool {
        self.reachable() > 0
    }
}

/// Flat view of one labelled candidate.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingInstance<'a> {
    pub query_id: u32,
    pub position: Position,
    pub candidate: &'a Iri,
    pub features: FeatureVector,
    pub relevance: u8,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingData {
    pub queries: Vec<ExtractionQuery>,
}

impl TrainingData {
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn trainable(&self) -> impl Iterator<Item = &ExtractionQuery> {
        self.queries.iter().filter(|q| q.is_trainable())
    }

    /// Labelled instances of trainable queries only.
    pub fn instances(&self) -> impl Iterator<Item = TrainingInstance<'_>> {
        self.trainable().flat_map(|q| {
            q.candidates.iter().map(move |c| TrainingInstance {
                query_id: q.id,
                position: q.position,
                candidate: &c.term,
                features: c.features,
                relevance: c.relevant as u8,
            })
        })
    }

    pub fn for_position(&self, position: Position) -> TrainingData {
        TrainingData {
            queries: self
                .queries
                .iter()
                .filter(|q| q.position == position)
                .cloned()
                .collect(),
        }
    }

    /// Writes trainable instances as `relevance qid:<id> 1:f1 .. 5:f5 # pos term`
    /// lines, the usual learning-to-rank text layout.
    pub fn write_letor<W: Write>(&self, mut out: W) -> io::Result<()> {
        for inst in self.instances() {
            write!(out, "{} qid:{}", inst.relevance, inst.query_id)?;
            for (i, v) in inst.features.to_array().iter().enumerate() {
                write!(out, " {}:{}", i + 1, v)?;
            }
            writeln!(out, " # {} {}", inst.position, inst.candidate)?;
        }
        Ok(())
    }
}

/// Removes 1..=`max_extract` random terms from every source SLP with at
/// least two terms and emits one extraction query per affected position.
///
/// Query ids are assigned in iteration order, so the same `(slps, corpus,
/// seed)` always yields the same data.
pub fn generate_training_data(
    slps: &SlpSet,
    corpus: &BackgroundCorpus,
    max_extract: usize,
    seed: u64,
) -> TrainingData {
    let mut rng = seed::rng(seed);
    let mut queries = Vec::new();
    let mut next_id = 0u32;
    let max_extract = max_extract.max(1);
    for slp in slps.slps() {
        let n = slp.len();
        if n < 2 {
            continue;
        }
        let k = rng.random_range(1..=max_extract).min(n - 1);
        let entries: Vec<(Position, &Iri)> = slp.entries().collect();
        let mut picked: Vec<usize> = index::sample(&mut rng, n, k).into_vec();
        picked.sort_unstable();

        let mut query = slp.clone();
        let mut removed: [BTreeSet<Iri>; 3] = Default::default();
        for &i in &picked {
            let (pos, term) = entries[i];
            query = query.remove(pos, term);
            removed[pos.index()].insert(term.clone());
        }
        let query = QuerySlp::new(query).expect("at least one term is kept");
        for pos in Position::ALL {
            let relevant = std::mem::take(&mut removed[pos.index()]);
            if relevant.is_empty() {
                continue;
            }
            queries.push(ExtractionQuery::new(
                next_id,
                slp.clone(),
                query.clone(),
                pos,
                relevant,
                corpus,
            ));
            next_id += 1;
        }
    }
    TrainingData { queries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::PayLevelDomain;
    use crate::slp::realize_graph;
    use crate::slp::tests::{iri, slp};

    fn pld(s: &str) -> PayLevelDomain {
        PayLevelDomain::from_domain(s).unwrap()
    }

    fn corpus_with(slps: &[Slp]) -> BackgroundCorpus {
        BackgroundCorpus::build(&vec![realize_graph(&pld("bg.org"), slps).unwrap()])
    }

    #[test]
    fn extracted_property_becomes_relevant() {
        let source = slp(&["swrc:Publication"], &["swrc:author"], &["swrc:Person"]);
        let corpus = corpus_with(std::slice::from_ref(&source));
        let set: SlpSet = [(source.clone(), pld("train.org"))].into_iter().collect();
        // Scan seeds until the draw removes only the property.
        let data = (0..200)
            .map(|s| generate_training_data(&set, &corpus, 2, s))
            .find(|d| d.len() == 1 && d.queries[0].position == Position::Ps)
            .expect("some seed extracts only the property");
        let q = &data.queries[0];
        assert_eq!(q.query.slp(), &slp(&["swrc:Publication"], &[], &["swrc:Person"]));
        assert_eq!(q.relevant, [iri("swrc:author")].into());
        assert_eq!(q.reachable(), 1);
    }

    #[test]
    fn single_term_slps_are_skipped() {
        let set: SlpSet = [(slp(&[], &["p"], &[]), pld("t.org"))].into_iter().collect();
        let corpus = corpus_with(&[slp(&["A"], &["p"], &[])]);
        assert!(generate_training_data(&set, &corpus, 2, 1).is_empty());
    }

    #[test]
    fn queries_are_never_empty_and_deterministic() {
        let slps = [
            slp(&["A"], &["p"], &[]),
            slp(&["A", "B"], &["p", "q"], &["C"]),
            slp(&["B"], &["q"], &["A"]),
        ];
        let corpus = corpus_with(&slps);
        let set: SlpSet = slps.iter().map(|s| (s.clone(), pld("t.org"))).collect();
        let a = generate_training_data(&set, &corpus, 2, 42);
        let b = generate_training_data(&set, &corpus, 2, 42);
        assert_eq!(a, b);
        let (mut x, mut y) = (Vec::new(), Vec::new());
        a.write_letor(&mut x).unwrap();
        b.write_letor(&mut y).unwrap();
        assert_eq!(x, y);
        for q in &a.queries {
            assert!(!q.query.is_empty());
            assert!(q.query.slp().is_strict_subset_of(&q.source));
            for t in &q.relevant {
                assert!(q.source.terms(q.position).contains(t));
                assert!(!q.query.terms(q.position).contains(t));
            }
        }
    }

    #[test]
    fn unreachable_terms_are_kept_but_not_trained_on() {
        let source = slp(&["A"], &["unseen"], &[]);
        let corpus = corpus_with(&[slp(&["A"], &["p"], &[])]);
        let set: SlpSet = [(source, pld("t.org"))].into_iter().collect();
        let data = (0..200)
            .map(|s| generate_training_data(&set, &corpus, 1, s))
            .find(|d| d.queries[0].position == Position::Ps)
            .unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(data.queries[0].reachable(), 0);
        assert_eq!(data.instances().count(), 0);
    }
}
