use std::fmt;
use std::sync::OnceLock;

use publicsuffix::{List, Psl};
use serde::{Deserialize, Serialize};
use url::{Host, Url};

use super::term::Iri;
use super::IngestError;

/// Pinned public-suffix snapshot. Updating it changes PLD assignment, so it
/// is versioned with the code instead of fetched at runtime.
const PUBLIC_SUFFIX_LIST: &str = include_str!("../../data/public_suffix_list.dat");

fn suffix_list() -> &'static List {
    static LIST: OnceLock<List> = OnceLock::new();
    LIST.get_or_init(|| {
        PUBLIC_SUFFIX_LIST
            .parse()
            .expect("bundled public suffix list is well-formed")
    })
}

/// Registrable domain (one label below a public suffix), lowercase.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PayLevelDomain(String);

impl PayLevelDomain {
    /// Wraps an already-registrable domain name. Use [`pay_level_domain`]
    /// to derive one from an IRI.
    pub fn from_domain(domain: &str) -> Result<Self, IngestError> {
        registrable_domain(&domain.to_ascii_lowercase())
            .filter(|d| d == &domain.to_ascii_lowercase())
            .map(PayLevelDomain)
            .ok_or_else(|| IngestError::NoPayLevelDomain(domain.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PayLevelDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for PayLevelDomain {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PayLevelDomain::from_domain(s)
    }
}

fn registrable_domain(host: &str) -> Option<String> {
    let host = host.trim_end_matches('.');
    let domain = suffix_list().domain(host.as_bytes())?;
    if !domain.suffix().is_known() {
        return None;
    }
    std::str::from_utf8(domain.as_bytes()).ok().map(str::to_owned)
}

/// Pay-level domain of the IRI's host against the bundled suffix list.
pub fn pay_level_domain(iri: &Iri) -> Result<PayLevelDomain, IngestError> {
    let no_pld = || IngestError::NoPayLevelDomain(iri.to_string());
    let url = Url::parse(iri.as_str()).map_err(|_| no_pld())?;
    let host = match url.host() {
        Some(Host::Domain(host)) => host.to_ascii_lowercase(),
        _ => return Err(no_pld()),
    };
    registrable_domain(&host).map(PayLevelDomain).ok_or_else(no_pld)
}

/// A vocabulary, identified by its hash or slash namespace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vocabulary {
    namespace: String,
}

impl Vocabulary {
    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn contains(&self, term: &Iri) -> bool {
        term.as_str().starts_with(&self.namespace)
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.namespace)
    }
}

/// Prefix up to the first `#` if there is one, otherwise up to the last `/`.
pub fn vocabulary_namespace(term: &Iri) -> Result<Vocabulary, IngestError> {
    let s = term.as_str();
    let end = match s.find('#') {
        Some(i) => i,
        None => s.rfind('/').ok_or_else(|| IngestError::NoNamespace(s.to_owned()))?,
    };
    Ok(Vocabulary {
        namespace: s[..=end].to_owned(),
    })
}

/// Namespace key used for vocabulary-level counting. Terms without a
/// separator form a vocabulary of their own.
pub fn vocabulary_key(term: &Iri) -> String {
    match vocabulary_namespace(term) {
        Ok(v) => v.namespace,
        Err(_) => term.as_str().to_owned(),
    }
}
