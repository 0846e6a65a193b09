use std::borrow::Borrow;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IngestError;

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

/// An absolute IRI. Cheap to clone; equal IRIs produced by the same
/// [`Interner`] share one allocation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl Iri {
    pub fn new(value: impl AsRef<str>) -> Result<Self, IngestError> {
        let value = value.as_ref();
        validate_iri(value)?;
        Ok(Iri(Arc::from(value)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_rdf_type(&self) -> bool {
        &*self.0 == RDF_TYPE
    }

    pub fn rdf_type() -> Self {
        Iri(Arc::from(RDF_TYPE))
    }
}

fn validate_iri(value: &str) -> Result<(), IngestError> {
    let invalid = |reason: &str| IngestError::InvalidIri {
        iri: value.to_owned(),
        reason: reason.to_owned(),
    };
    if value.is_empty() {
        return Err(invalid("empty"));
    }
    let Some(colon) = value.find(':') else {
        return Err(invalid("missing scheme"));
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    let scheme_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !scheme_ok {
        return Err(invalid("malformed scheme"));
    }
    if colon + 1 == value.len() {
        return Err(invalid("nothing after scheme"));
    }
    if let Some(c) = value
        .chars()
        .find(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Err(invalid(&format!("forbidden character {c:?}")));
    }
    Ok(())
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl Borrow<str> for Iri {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl std::str::FromStr for Iri {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Iri::new(s)
    }
}

impl Serialize for Iri {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Iri {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Iri::new(s).map_err(serde::de::Error::custom)
    }
}

/// Blank node label, including the `_:` prefix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BlankNode(Arc<str>);

impl BlankNode {
    pub fn new(label: impl AsRef<str>) -> Result<Self, IngestError> {
        let label = label.as_ref();
        let body = label.strip_prefix("_:").unwrap_or(label);
        let ok = !body.is_empty()
            && !body.ends_with('.')
            && body
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if !ok {
            return Err(IngestError::InvalidBlankNode(label.to_owned()));
        }
        Ok(BlankNode(Arc::from(format!("_:{body}"))))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for BlankNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Literal {
    pub lexical: String,
    pub datatype: Option<Iri>,
    pub language: Option<String>,
}

impl Literal {
    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: None,
            language: None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum RdfObject {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl RdfObject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            RdfObject::Iri(iri) => Some(iri),
            _ => None,
        }
    }
}

impl From<Subject> for RdfObject {
    fn from(s: Subject) -> Self {
        match s {
            Subject::Iri(i) => RdfObject::Iri(i),
            Subject::Blank(b) => RdfObject::Blank(b),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Quad {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: RdfObject,
    pub context: Iri,
}

impl Quad {
    pub fn new(subject: Subject, predicate: Iri, object: RdfObject, context: Iri) -> Self {
        Quad {
            subject,
            predicate,
            object,
            context,
        }
    }

    /// The object IRI of an `rdf:type` statement, if this is one.
    pub fn type_object(&self) -> Option<&Iri> {
        if self.predicate.is_rdf_type() {
            self.object.as_iri()
        } else {
            None
        }
    }
}

/// Deduplicates IRI allocations across a parse.
#[derive(Default, Debug)]
pub struct Interner {
    iris: HashSet<Iri>,
}

impl Interner {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn iri(&mut self, value: &str) -> Result<Iri, IngestError> {
        if let Some(existing) = self.iris.get(value) {
            return Ok(existing.clone());
        }
        let iri = Iri::new(value)?;
        self.iris.insert(iri.clone());
        Ok(iri)
    }

    pub fn len(&self) -> usize {
        self.iris.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iris.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_http_and_urn() {
        assert!(Iri::new("http://ex1.org/s").is_ok());
        assert!(Iri::new("urn:isbn:0451450523").is_ok());
    }

    #[test]
    fn rejects_malformed() {
        for bad in ["", "no-scheme", "http://a b", "1http://x", "http:", "http://x/<y>"] {
            assert!(Iri::new(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn interner_shares_allocation() {
        let mut interner = Interner::new();
        let a = interner.iri("http://ex1.org/a").unwrap();
        let b = interner.iri("http://ex1.org/a").unwrap();
        assert!(Arc::ptr_eq(&a.0, &b.0));
        assert_eq!(interner.len(), 1);
    }

    #[test]
    fn blank_node_prefix() {
        assert_eq!(BlankNode::new("b1").unwrap().as_str(), "_:b1");
        assert_eq!(BlankNode::new("_:b1").unwrap().as_str(), "_:b1");
        assert!(BlankNode::new("_:").is_err());
    }
}
