use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;

use super::{FeatureError, FeatureVector};
use crate::rdf::{vocabulary_key, Iri, PayLevelDomain, PldGraph};
use crate::slp::{compute_slps, Position, QuerySlp, Slp, SlpError, SlpSet};

/// How f5 counts matching SLPs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CooccurrenceMode {
    /// Each distinct stored SLP counts once.
    #[default]
    Distinct,
    /// Each stored SLP counts once per PLD it was computed from.
    ProvenanceWeighted,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TermStats {
    pub is_type: bool,
    pub is_property: bool,
    /// f1
    pub datasets: u64,
    /// f3
    pub occurrences: u64,
}

type TermId = u32;
type SlpId = u32;

/// The read-only world features are computed against.
#[derive(Clone, Debug, Default)]
pub struct BackgroundCorpus {
    ids: HashMap<Iri, TermId>,
    iris: Vec<Iri>,
    stats: Vec<TermStats>,
    vocab_datasets: HashMap<String, u64>,
    types: Vec<Iri>,
    properties: Vec<Iri>,
    slps: SlpSet,
    slp_weights: Vec<u64>,
    /// Sorted SLP ids containing each term, per position.
    postings: [HashMap<TermId, Vec<SlpId>>; 3],
    mode: CooccurrenceMode,
}

#[derive(Default)]
struct GraphSummary {
    terms: HashMap<Iri, TermStats>,
    vocabs: HashSet<String>,
    slps: SlpSet,
}

fn summarize(graph: &PldGraph) -> GraphSummary {
    let mut summary = GraphSummary::default();
    for quad in &graph.quads {
        if let Some(t) = quad.type_object() {
            let e = summary.terms.entry(t.clone()).or_default();
            e.is_type = true;
            e.occurrences += 1;
        }
        if !quad.predicate.is_rdf_type() {
            let e = summary.terms.entry(quad.predicate.clone()).or_default();
            e.is_property = true;
            e.occurrences += 1;
        }
    }
    summary.vocabs = summary.terms.keys().map(vocabulary_key).collect();
    summary.slps = compute_slps(graph);
    summary
}

impl BackgroundCorpus {
    /// Indexes the given background graphs. Callers exclude train/test PLDs.
    pub fn build<'g>(graphs: impl IntoParallelIterator<Item = &'g PldGraph>) -> Self {
        let summaries: Vec<GraphSummary> = graphs.into_par_iter().map(summarize).collect();
        let mut terms: HashMap<Iri, TermStats> = HashMap::new();
        let mut vocab_datasets: HashMap<String, u64> = HashMap::new();
        let mut slps = SlpSet::new();
        for summary in summaries {
            for (iri, s) in summary.terms {
                let e = terms.entry(iri).or_default();
                e.is_type |= s.is_type;
                e.is_property |= s.is_property;
                e.datasets += 1;
                e.occurrences += s.occurrences;
            }
            for v in summary.vocabs {
                *vocab_datasets.entry(v).or_default() += 1;
            }
            slps = slps.merge(summary.slps);
        }
        Self::from_parts(terms, vocab_datasets, slps)
    }

    pub(crate) fn from_parts(
        terms: HashMap<Iri, TermStats>,
        vocab_datasets: HashMap<String, u64>,
        slps: SlpSet,
    ) -> Self {
        let mut entries: Vec<(Iri, TermStats)> = terms.into_iter().collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut corpus = BackgroundCorpus {
            vocab_datasets,
            ..Default::default()
        };
        for (iri, stats) in entries {
            let id = corpus.iris.len() as TermId;
            corpus.ids.insert(iri.clone(), id);
            if stats.is_type {
                corpus.types.push(iri.clone());
            }
            if stats.is_property {
                corpus.properties.push(iri.clone());
            }
            corpus.iris.push(iri);
            corpus.stats.push(stats);
        }
        for (slp_id, (slp, plds)) in slps.iter().enumerate() {
            corpus.slp_weights.push(plds.len() as u64);
            for (pos, term) in slp.entries() {
                // Terms of stored SLPs are always indexed by construction;
                // a hand-built store may violate that and is caught on load.
                if let Some(&tid) = corpus.ids.get(term) {
                    corpus.postings[pos.index()]
                        .entry(tid)
                        .or_default()
                        .push(slp_id as SlpId);
                }
            }
        }
        corpus.slps = slps;
        corpus
    }

    pub fn with_cooccurrence_mode(mut self, mode: CooccurrenceMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn cooccurrence_mode(&self) -> CooccurrenceMode {
        self.mode
    }

    pub fn slps(&self) -> &SlpSet {
        &self.slps
    }

    pub fn slp_count(&self) -> usize {
        self.slps.len()
    }

    pub fn term_stats(&self, x: &Iri) -> Option<TermStats> {
        self.ids.get(x).map(|&id| self.stats[id as usize])
    }

    pub(crate) fn terms(&self) -> impl Iterator<Item = (&Iri, &TermStats)> {
        self.iris.iter().zip(&self.stats)
    }

    pub(crate) fn vocab_counts(&self) -> &HashMap<String, u64> {
        &self.vocab_datasets
    }

    /// RDF types (for STS/OTS) or properties (for PS), sorted by IRI.
    pub fn candidates(&self, pos: Position) -> &[Iri] {
        if pos.takes_types() {
            &self.types
        } else {
            &self.properties
        }
    }

    pub fn f1_term_datasets(&self, x: &Iri) -> u64 {
        self.term_stats(x).map_or(0, |s| s.datasets)
    }

    pub fn f2_vocab_datasets(&self, x: &Iri) -> u64 {
        self.vocab_datasets.get(&vocabulary_key(x)).copied().unwrap_or(0)
    }

    pub fn f3_term_occurrences(&self, x: &Iri) -> u64 {
        self.term_stats(x).map_or(0, |s| s.occurrences)
    }

    pub fn f4_same_vocab(q: &QuerySlp, x: &Iri) -> u64 {
        let key = vocabulary_key(x);
        q.entries().any(|(_, t)| vocabulary_key(t) == key) as u64
    }

    fn check_kind(&self, x: &Iri, pos: Position) -> Result<(), SlpError> {
        if let Some(s) = self.term_stats(x) {
            let ok = if pos.takes_types() { s.is_type } else { s.is_property };
            if !ok {
                return Err(SlpError::KindMismatch {
                    term: x.to_string(),
                    position: pos,
                });
            }
        }
        Ok(())
    }

    fn count(&self, ids: impl Iterator<Item = SlpId>) -> u64 {
        match self.mode {
            CooccurrenceMode::Distinct => ids.count() as u64,
            CooccurrenceMode::ProvenanceWeighted => {
                ids.map(|id| self.slp_weights[id as usize]).sum()
            }
        }
    }

    /// Sorted ids of stored SLPs that contain `slp`, or `None` when some term
    /// is absent from the index at its position.
    fn containing(&self, slp: &Slp) -> Option<Vec<SlpId>> {
        let mut lists: Vec<&Vec<SlpId>> = Vec::with_capacity(slp.len());
        for (pos, term) in slp.entries() {
            let id = self.ids.get(term)?;
            lists.push(self.postings[pos.index()].get(id)?);
        }
        lists.sort_by_key(|l| l.len());
        let (first, rest) = lists.split_first()?;
        let mut acc: Vec<SlpId> = (*first).clone();
        for list in rest {
            acc.retain(|id| list.binary_search(id).is_ok());
            if acc.is_empty() {
                break;
            }
        }
        Some(acc)
    }

    pub fn f5_slp_cooccurrence(&self, q: &QuerySlp, x: &Iri, pos: Position) -> Result<u64, SlpError> {
        self.check_kind(x, pos)?;
        let extended = q.extend(pos, x.clone())?;
        Ok(self
            .containing(&extended)
            .map_or(0, |ids| self.count(ids.into_iter())))
    }

    pub fn compute_features(&self, q: &QuerySlp, x: &Iri, pos: Position) -> Result<FeatureVector, FeatureError> {
        Ok(FeatureVector {
            f1: self.f1_term_datasets(x),
            f2: self.f2_vocab_datasets(x),
            f3: self.f3_term_occurrences(x),
            f4: Self::f4_same_vocab(q, x),
            f5: self.f5_slp_cooccurrence(q, x, pos)?,
        })
    }

    /// Features for every candidate at `pos`, in candidate (IRI) order.
    /// Equivalent to calling [`Self::compute_features`] per candidate but
    /// intersects the query's posting lists only once.
    pub fn features_for_candidates(&self, q: &QuerySlp, pos: Position) -> Vec<(Iri, FeatureVector)> {
        let query_vocabs: HashSet<String> = q.entries().map(|(_, t)| vocabulary_key(t)).collect();
        let matching = self.containing(q).unwrap_or_default();
        let mut in_query = vec![false; self.slps.len()];
        for &id in &matching {
            in_query[id as usize] = true;
        }
        let own = q.terms(pos);
        let postings = &self.postings[pos.index()];
        self.candidates(pos)
            .iter()
            .map(|x| {
                let id = self.ids[x];
                let stats = self.stats[id as usize];
                let f5 = if matching.is_empty() {
                    0
                } else if own.contains(x) {
                    self.count(matching.iter().copied())
                } else {
                    postings.get(&id).map_or(0, |list| {
                        self.count(list.iter().copied().filter(|&s| in_query[s as usize]))
                    })
                };
                let fv = FeatureVector {
                    f1: stats.datasets,
                    f2: self.f2_vocab_datasets(x),
                    f3: stats.occurrences,
                    f4: query_vocabs.contains(&vocabulary_key(x)) as u64,
                    f5,
                };
                (x.clone(), fv)
            })
            .collect()
    }

    /// PLDs recorded in the SLP provenance.
    pub fn provenance_plds(&self) -> BTreeSet<PayLevelDomain> {
        self.slps.iter().flat_map(|(_, p)| p.iter().cloned()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::parse_str;
    use crate::slp::tests::{iri, slp};

    const TYPE: &str = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>";

    fn graph(pld: &str, body: &str) -> PldGraph {
        PldGraph::new(PayLevelDomain::from_domain(pld).unwrap(), parse_str(body).unwrap())
    }

    fn chess_player_sample() -> PldGraph {
        let g = "<http://ex1.org/g>";
        graph(
            "ex1.org",
            &format!(
                "<http://ex1.org/a> {TYPE} <http://xmlns.com/foaf/0.1/Person> {g} .\n\
                 <http://ex1.org/a> {TYPE} <http://dbpedia.org/ontology/ChessPlayer> {g} .\n\
                 <http://ex1.org/a> <http://xmlns.com/foaf/0.1/knows> <http://ex1.org/b> {g} .\n\
                 <http://ex1.org/b> {TYPE} <http://xmlns.com/foaf/0.1/Person> {g} .\n\
                 <http://ex1.org/b> {TYPE} <http://dbpedia.org/ontology/Coach> {g} .\n"
            ),
        )
    }

    fn q(s: Slp) -> QuerySlp {
        QuerySlp::new(s).unwrap()
    }

    #[test]
    fn empty_corpus_is_all_zero() {
        let c = BackgroundCorpus::build(&Vec::<PldGraph>::new());
        let x = iri("foaf:knows");
        let fv = c.compute_features(&q(slp(&["A"], &[], &[])), &x, Position::Ps).unwrap();
        assert_eq!(fv, FeatureVector::default());
        assert!(c.candidates(Position::Sts).is_empty());
    }

    #[test]
    fn chess_player_index() {
        let graphs = vec![chess_player_sample()];
        let c = BackgroundCorpus::build(&graphs);
        let types: Vec<_> = c.candidates(Position::Ots).to_vec();
        let mut expected = vec![iri("foaf:Person"), iri("dbo:ChessPlayer"), iri("dbo:Coach")];
        expected.sort();
        assert_eq!(types, expected);
        assert_eq!(c.candidates(Position::Ps), &[iri("foaf:knows")]);
        assert_eq!(c.slp_count(), 1);
        assert_eq!(c.f3_term_occurrences(&iri("foaf:Person")), 2);
        assert_eq!(c.f1_term_datasets(&iri("foaf:Person")), 1);
    }

    #[test]
    fn identical_slp_in_two_plds() {
        let g = |pld: &str| {
            graph(
                pld,
                &format!(
                    "<http://{pld}/s> {TYPE} <http://ex.org/A> <http://{pld}/g> .\n<http://{pld}/s> <http://ex.org/p> \"x\" <http://{pld}/g> .\n"
                ),
            )
        };
        let graphs = vec![g("a.org"), g("b.org")];
        let c = BackgroundCorpus::build(&graphs);
        assert_eq!(c.slp_count(), 1);
        let (_, prov) = c.slps().iter().next().unwrap();
        assert_eq!(prov.len(), 2);
        let query = q(slp(&["A"], &[], &[]));
        assert_eq!(c.f5_slp_cooccurrence(&query, &iri("p"), Position::Ps).unwrap(), 1);
        let weighted = c.clone().with_cooccurrence_mode(CooccurrenceMode::ProvenanceWeighted);
        assert_eq!(weighted.f5_slp_cooccurrence(&query, &iri("p"), Position::Ps).unwrap(), 2);
    }

    #[test]
    fn f4_same_vocabulary() {
        let query = q(slp(&["swrc:Publication"], &[], &["swrc:Person"]));
        assert_eq!(BackgroundCorpus::f4_same_vocab(&query, &iri("swrc:author")), 1);
        assert_eq!(BackgroundCorpus::f4_same_vocab(&query, &iri("dc:creator")), 0);
        assert_eq!(BackgroundCorpus::f4_same_vocab(&query, &iri("swrc:Person")), 1);
    }

    #[test]
    fn f5_co_used_property() {
        let g = "<http://bg.org/g>";
        let bg = graph(
            "bg.org",
            &format!(
                "<http://bg.org/pub> {TYPE} <http://swrc.ontoware.org/ontology#Publication> {g} .\n\
                 <http://bg.org/pub> <http://purl.org/dc/terms/creator> <http://bg.org/p> {g} .\n\
                 <http://bg.org/p> {TYPE} <http://swrc.ontoware.org/ontology#Person> {g} .\n\
                 <http://bg.org/p> {TYPE} <http://xmlns.com/foaf/0.1/Person> {g} .\n"
            ),
        );
        let c = BackgroundCorpus::build(&vec![bg]);
        let query = q(slp(&["swrc:Publication"], &[], &["swrc:Person"]));
        assert_eq!(c.f5_slp_cooccurrence(&query, &iri("dc:creator"), Position::Ps).unwrap(), 1);
        assert_eq!(c.f5_slp_cooccurrence(&query, &iri("foaf:Person"), Position::Ots).unwrap(), 1);
        assert_eq!(c.f5_slp_cooccurrence(&query, &iri("foaf:Person"), Position::Sts).unwrap(), 0);
        assert_eq!(c.f5_slp_cooccurrence(&query, &iri("dc:title"), Position::Ps).unwrap(), 0);
        // Kind mismatch: dc:creator is only ever a property in this corpus.
        assert!(matches!(
            c.f5_slp_cooccurrence(&query, &iri("dc:creator"), Position::Sts),
            Err(SlpError::KindMismatch { .. })
        ));
        let batch = c.features_for_candidates(&query, Position::Ps);
        assert_eq!(batch.len(), 1);
        assert_eq!(batch[0].1, c.compute_features(&query, &iri("dc:creator"), Position::Ps).unwrap());
    }

    #[test]
    fn batch_matches_single_on_every_position() {
        let graphs = vec![chess_player_sample()];
        let c = BackgroundCorpus::build(&graphs);
        let query = q(slp(&["foaf:Person"], &["foaf:knows"], &[]));
        for pos in Position::ALL {
            for (x, fv) in c.features_for_candidates(&query, pos) {
                assert_eq!(fv, c.compute_features(&query, &x, pos).unwrap(), "{x} at {pos}");
            }
        }
    }
}
