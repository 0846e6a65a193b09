use std::collections::{BTreeMap, HashMap};

use super::pld::{pay_level_domain, PayLevelDomain};
use super::term::{Iri, Quad};

/// All quads published under one pay-level domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PldGraph {
    pub pld: PayLevelDomain,
    pub quads: Vec<Quad>,
}

impl PldGraph {
    pub fn new(pld: PayLevelDomain, quads: Vec<Quad>) -> Self {
        PldGraph { pld, quads }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Partition {
    pub graphs: BTreeMap<PayLevelDomain, PldGraph>,
    /// Quads whose context IRI has no pay-level domain. Never used downstream.
    pub unassigned: Vec<Quad>,
}

impl Partition {
    pub fn quad_count(&self) -> usize {
        self.graphs.values().map(|g| g.quads.len()).sum::<usize>() + self.unassigned.len()
    }

    pub fn into_graphs(self) -> Vec<PldGraph> {
        self.graphs.into_values().collect()
    }
}

/// Groups quads by the pay-level domain of their context, preserving the
/// input order within each group.
pub fn partition_by_pld(quads: impl IntoIterator<Item = Quad>) -> Partition {
    let mut partition = Partition::default();
    let mut cache: HashMap<Iri, Option<PayLevelDomain>> = HashMap::new();
    for quad in quads {
        let pld = cache
            .entry(quad.context.clone())
            .or_insert_with(|| pay_level_domain(&quad.context).ok())
            .clone();
        match pld {
            Some(pld) => partition
                .graphs
                .entry(pld.clone())
                .or_insert_with(|| PldGraph::new(pld, Vec::new()))
                .quads
                .push(quad),
            None => partition.unassigned.push(quad),
        }
    }
    partition
}
