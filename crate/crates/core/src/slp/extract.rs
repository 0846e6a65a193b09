use std::collections::{BTreeSet, HashMap};

use super::{Slp, SlpSet};
use crate::rdf::{BlankNode, Iri, Literal, PldGraph, RdfObject, Subject};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Node<'a> {
    Iri(&'a Iri),
    Blank(&'a BlankNode),
    Literal(&'a Literal),
}

impl<'a> From<&'a Subject> for Node<'a> {
    fn from(s: &'a Subject) -> Self {
        match s {
            Subject::Iri(i) => Node::Iri(i),
            Subject::Blank(b) => Node::Blank(b),
        }
    }
}

impl<'a> From<&'a RdfObject> for Node<'a> {
    fn from(o: &'a RdfObject) -> Self {
        match o {
            RdfObject::Iri(i) => Node::Iri(i),
            RdfObject::Blank(b) => Node::Blank(b),
            RdfObject::Literal(l) => Node::Literal(l),
        }
    }
}

/// Computes the maximal SLP of every subject/object pair joined by at least
/// one non-`rdf:type` statement. `rdf:type` statements only contribute
/// types; literal and untyped objects yield an empty `ots`.
pub fn compute_slps(graph: &PldGraph) -> SlpSet {
    let mut ids: HashMap<Node<'_>, u32> = HashMap::new();
    fn id_of<'a>(ids: &mut HashMap<Node<'a>, u32>, node: Node<'a>) -> u32 {
        let next = ids.len() as u32;
        *ids.entry(node).or_insert(next)
    }
    let mut types: HashMap<u32, BTreeSet<&Iri>> = HashMap::new();
    let mut links: HashMap<(u32, u32), BTreeSet<&Iri>> = HashMap::new();
    for quad in &graph.quads {
        let s = id_of(&mut ids, Node::from(&quad.subject));
        if let Some(t) = quad.type_object() {
            types.entry(s).or_default().insert(t);
        } else if !quad.predicate.is_rdf_type() {
            let o = id_of(&mut ids, Node::from(&quad.object));
            links.entry((s, o)).or_default().insert(&quad.predicate);
        }
    }
    let empty = BTreeSet::new();
    let mut out = SlpSet::new();
    for ((s, o), ps) in links {
        let sts = types.get(&s).unwrap_or(&empty);
        let ots = types.get(&o).unwrap_or(&empty);
        let slp = Slp {
            sts: sts.iter().map(|&i| i.clone()).collect(),
            ps: ps.into_iter().cloned().collect(),
            ots: ots.iter().map(|&i| i.clone()).collect(),
        };
        out.insert(slp, graph.pld.clone());
    }
    out
}
