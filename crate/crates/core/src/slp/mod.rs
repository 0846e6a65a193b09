//! Schema-level patterns: the `(sts, ps, ots)` fingerprint of how typed
//! subjects connect to typed objects.

mod extract;
mod realize;
mod set;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rdf::Iri;

pub use extract::compute_slps;
pub use realize::{realize_graph, realize_slp};
pub use set::{read_slp_store, write_slp_store, SlpSet, SlpStoreError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SlpError {
    #[error("rdf:type cannot be used as a connecting property")]
    RdfTypeInPs,
    #[error("`{term}` is not usable at position {position}")]
    KindMismatch { term: String, position: Position },
    #[error("query SLP must not be empty")]
    EmptyQuery,
    #[error("malformed SLP line: {0}")]
    Malformed(String),
    #[error("unknown position `{0}` (expected sts, ps or ots)")]
    UnknownPosition(String),
}

/// Which set of an SLP a term goes into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Position {
    Sts,
    Ps,
    Ots,
}

impl Position {
    pub const ALL: [Position; 3] = [Position::Sts, Position::Ps, Position::Ots];

    pub fn as_str(self) -> &'static str {
        match self {
            Position::Sts => "sts",
            Position::Ps => "ps",
            Position::Ots => "ots",
        }
    }

    /// STS and OTS hold RDF types; PS holds properties.
    pub fn takes_types(self) -> bool {
        !matches!(self, Position::Ps)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Position {
    type Err = SlpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sts" => Ok(Position::Sts),
            "ps" => Ok(Position::Ps),
            "ots" => Ok(Position::Ots),
            _ => Err(SlpError::UnknownPosition(s.to_owned())),
        }
    }
}

/// A schema-level pattern. Sets are ordered by IRI string, which is also the
/// canonical serialization order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slp {
    sts: BTreeSet<Iri>,
    ps: BTreeSet<Iri>,
    ots: BTreeSet<Iri>,
}

impl Slp {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(
        sts: impl IntoIterator<Item = Iri>,
        ps: impl IntoIterator<Item = Iri>,
        ots: impl IntoIterator<Item = Iri>,
    ) -> Result<Self, SlpError> {
        let ps: BTreeSet<Iri> = ps.into_iter().collect();
        if ps.iter().any(Iri::is_rdf_type) {
            return Err(SlpError::RdfTypeInPs);
        }
        Ok(Slp {
            sts: sts.into_iter().collect(),
            ps,
            ots: ots.into_iter().collect(),
        })
    }

    pub fn sts(&self) -> &BTreeSet<Iri> {
        &self.sts
    }

    pub fn ps(&self) -> &BTreeSet<Iri> {
        &self.ps
    }

    pub fn ots(&self) -> &BTreeSet<Iri> {
        &self.ots
    }

    pub fn terms(&self, pos: Position) -> &BTreeSet<Iri> {
        match pos {
            Position::Sts => &self.sts,
            Position::Ps => &self.ps,
            Position::Ots => &self.ots,
        }
    }

    fn terms_mut(&mut self, pos: Position) -> &mut BTreeSet<Iri> {
        match pos {
            Position::Sts => &mut self.sts,
            Position::Ps => &mut self.ps,
            Position::Ots => &mut self.ots,
        }
    }

    /// Every `(position, term)` pair, in position then IRI order.
    pub fn entries(&self) -> impl Iterator<Item = (Position, &Iri)> {
        Position::ALL
            .into_iter()
            .flat_map(move |pos| self.terms(pos).iter().map(move |t| (pos, t)))
    }

    pub fn is_empty(&self) -> bool {
        self.sts.is_empty() && self.ps.is_empty() && self.ots.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sts.len() + self.ps.len() + self.ots.len()
    }

    /// Component-wise union.
    pub fn union(&self, other: &Slp) -> Slp {
        Slp {
            sts: self.sts.union(&other.sts).cloned().collect(),
            ps: self.ps.union(&other.ps).cloned().collect(),
            ots: self.ots.union(&other.ots).cloned().collect(),
        }
    }

    /// Adds `term` at `pos`. Only `rdf:type` in PS is rejected here; whether a
    /// term is a type or a property is a property of the corpus, checked by
    /// the feature index.
    pub fn extend(&self, pos: Position, term: Iri) -> Result<Slp, SlpError> {
        if pos == Position::Ps && term.is_rdf_type() {
            return Err(SlpError::RdfTypeInPs);
        }
        let mut out = self.clone();
        out.terms_mut(pos).insert(term);
        Ok(out)
    }

    /// Removes `term` from `pos`; a no-op if absent.
    pub fn remove(&self, pos: Position, term: &Iri) -> Slp {
        let mut out = self.clone();
        out.terms_mut(pos).remove(term);
        out
    }

    pub fn is_subset_of(&self, other: &Slp) -> bool {
        self.sts.is_subset(&other.sts) && self.ps.is_subset(&other.ps) && self.ots.is_subset(&other.ots)
    }

    pub fn is_strict_subset_of(&self, other: &Slp) -> bool {
        self.is_subset_of(other) && self != other
    }

    /// `A B<TAB>p<TAB>`: sorted IRIs joined by a space, groups joined by a tab.
    pub fn canonical(&self) -> String {
        let group = |set: &BTreeSet<Iri>| {
            set.iter().map(Iri::as_str).collect::<Vec<_>>().join(" ")
        };
        format!("{}\t{}\t{}", group(&self.sts), group(&self.ps), group(&self.ots))
    }

    pub fn parse_canonical(line: &str) -> Result<Slp, SlpError> {
        let groups: Vec<&str> = line.split('\t').collect();
        let [sts, ps, ots] = groups[..] else {
            return Err(SlpError::Malformed(format!("expected 3 groups in `{line}`")));
        };
        let parse_group = |group: &str| -> Result<BTreeSet<Iri>, SlpError> {
            if group.is_empty() {
                return Ok(BTreeSet::new());
            }
            let mut set = BTreeSet::new();
            for token in group.split(' ') {
                let iri = Iri::new(token).map_err(|e| SlpError::Malformed(e.to_string()))?;
                if !set.insert(iri) {
                    return Err(SlpError::Malformed(format!("duplicate term `{token}`")));
                }
            }
            Ok(set)
        };
        let slp = Slp::new(parse_group(sts)?, parse_group(ps)?, parse_group(ots)?)?;
        if slp.canonical() != line {
            return Err(SlpError::Malformed(format!("not in canonical order: `{line}`")));
        }
        Ok(slp)
    }
}

impl fmt::Display for Slp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let group = |set: &BTreeSet<Iri>| {
            set.iter().map(Iri::as_str).collect::<Vec<_>>().join(", ")
        };
        write!(f, "({{{}}}, {{{}}}, {{{}}})", group(&self.sts), group(&self.ps), group(&self.ots))
    }
}

/// The user's partial SLP; never `(∅, ∅, ∅)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuerySlp(Slp);

impl QuerySlp {
    pub fn new(slp: Slp) -> Result<Self, SlpError> {
        if slp.is_empty() {
            return Err(SlpError::EmptyQuery);
        }
        Ok(QuerySlp(slp))
    }

    pub fn slp(&self) -> &Slp {
        &self.0
    }

    pub fn into_slp(self) -> Slp {
        self.0
    }
}

impl std::ops::Deref for QuerySlp {
    type Target = Slp;

    fn deref(&self) -> &Slp {
        &self.0
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn iri(s: &str) -> Iri {
        let full = match s.split_once(':') {
            Some(("foaf", rest)) => format!("http://xmlns.com/foaf/0.1/{rest}"),
            Some(("dc", rest)) => format!("http://purl.org/dc/terms/{rest}"),
            Some(("dbo", rest)) => format!("http://dbpedia.org/ontology/{rest}"),
            Some(("swrc", rest)) => format!("http://swrc.ontoware.org/ontology#{rest}"),
            _ => format!("http://ex.org/{s}"),
        };
        Iri::new(full).unwrap()
    }

    pub(crate) fn slp(sts: &[&str], ps: &[&str], ots: &[&str]) -> Slp {
        Slp::new(
            sts.iter().map(|s| iri(s)),
            ps.iter().map(|s| iri(s)),
            ots.iter().map(|s| iri(s)),
        )
        .unwrap()
    }

    #[test]
    fn union_by_definition() {
        let a = slp(&["A"], &["p"], &[]);
        let b = slp(&["B"], &[], &["C"]);
        assert_eq!(a.union(&b), slp(&["A", "B"], &["p"], &["C"]));
        assert_eq!(a.union(&a), a);
        assert_eq!(a.union(&b), b.union(&a));
    }

    #[test]
    fn extend_worked_example() {
        let base = slp(&["foaf:Person"], &[], &[]);
        let out = base.extend(Position::Ots, iri("foaf:Image")).unwrap();
        assert_eq!(out, slp(&["foaf:Person"], &[], &["foaf:Image"]));
        assert_eq!(out.extend(Position::Ots, iri("foaf:Image")).unwrap(), out);
        assert_eq!(
            Slp::empty().extend(Position::Ps, iri("dc:creator")).unwrap(),
            slp(&[], &["dc:creator"], &[])
        );
    }

    #[test]
    fn extend_rejects_rdf_type_property() {
        assert_eq!(
            Slp::empty().extend(Position::Ps, Iri::rdf_type()),
            Err(SlpError::RdfTypeInPs)
        );
    }

    #[test]
    fn remove_worked_example() {
        let s = slp(&["foaf:Person"], &["dc:date"], &[]);
        assert_eq!(s.remove(Position::Ps, &iri("dc:date")), slp(&["foaf:Person"], &[], &[]));
        assert_eq!(s.remove(Position::Sts, &iri("dc:date")), s);
    }

    #[test]
    fn subset_cases() {
        let a = slp(&["A"], &["p"], &[]);
        assert!(a.is_subset_of(&a));
        assert!(!a.is_strict_subset_of(&a));
        assert!(Slp::empty().is_subset_of(&a));
        assert!(!a.is_subset_of(&slp(&["A"], &[], &["B"])));
        assert!(a.is_strict_subset_of(&slp(&["A"], &["p"], &["B"])));
    }

    #[test]
    fn canonical_format() {
        let s = slp(&["B", "A"], &["p"], &[]);
        assert_eq!(s.canonical(), "http://ex.org/A http://ex.org/B\thttp://ex.org/p\t");
        assert_eq!(Slp::empty().canonical(), "\t\t");
        assert_eq!(Slp::parse_canonical("\t\t").unwrap(), Slp::empty());
    }

    #[test]
    fn canonical_parse_rejects_malformed() {
        for bad in [
            "",
            "\t",
            "\t\t\t",
            "http://ex.org/B http://ex.org/A\t\t",
            "http://ex.org/A  http://ex.org/B\t\t",
            "not-an-iri\t\t",
            "\thttp://www.w3.org/1999/02/22-rdf-syntax-ns#type\t",
        ] {
            assert!(Slp::parse_canonical(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn empty_query_rejected() {
        assert_eq!(QuerySlp::new(Slp::empty()), Err(SlpError::EmptyQuery));
        assert!(QuerySlp::new(slp(&[], &["p"], &[])).is_ok());
    }

    pub(crate) fn arb_slp() -> impl Strategy<Value = Slp> {
        let set = || prop::collection::btree_set(0u8..8, 0..4);
        (set(), set(), set()).prop_map(|(s, p, o)| {
            let mk = |v: std::collections::BTreeSet<u8>| {
                v.into_iter().map(|i| iri(&format!("t{i}"))).collect::<Vec<_>>()
            };
            Slp::new(mk(s), mk(p), mk(o)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(s in arb_slp()) {
            prop_assert_eq!(Slp::parse_canonical(&s.canonical()).unwrap(), s);
        }

        #[test]
        fn remove_inverts_fresh_extend(s in arb_slp(), pos in prop::sample::select(Position::ALL.to_vec())) {
            let fresh = iri("fresh-term");
            prop_assert_eq!(s.extend(pos, fresh.clone()).unwrap().remove(pos, &fresh), s);
        }
    }
}
