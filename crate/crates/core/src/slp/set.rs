use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use super::{Slp, SlpError};
use crate::rdf::PayLevelDomain;

/// Deduplicated SLPs, each with the set of PLDs it was computed from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SlpSet {
    entries: BTreeMap<Slp, BTreeSet<PayLevelDomain>>,
}

impl SlpSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, slp: Slp, pld: PayLevelDomain) {
        self.entries.entry(slp).or_default().insert(pld);
    }

    pub fn insert_with(&mut self, slp: Slp, plds: impl IntoIterator<Item = PayLevelDomain>) {
        self.entries.entry(slp).or_default().extend(plds);
    }

    /// Set union with provenance merged per SLP.
    pub fn merge(mut self, other: SlpSet) -> SlpSet {
        if self.entries.len() < other.entries.len() {
            return other.merge(self);
        }
        for (slp, plds) in other.entries {
            self.entries.entry(slp).or_default().extend(plds);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, slp: &Slp) -> bool {
        self.entries.contains_key(slp)
    }

    pub fn provenance(&self, slp: &Slp) -> Option<&BTreeSet<PayLevelDomain>> {
        self.entries.get(slp)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Slp, &BTreeSet<PayLevelDomain>)> {
        self.entries.iter()
    }

    pub fn slps(&self) -> impl Iterator<Item = &Slp> {
        self.entries.keys()
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Slp, &BTreeSet<PayLevelDomain>) -> bool) {
        self.entries.retain(|s, p| keep(s, p));
    }

    /// Keeps only SLPs computed from at least one of `plds`, restricting
    /// their provenance accordingly.
    pub fn restricted_to(&self, plds: &BTreeSet<PayLevelDomain>) -> SlpSet {
        let mut out = SlpSet::new();
        for (slp, prov) in &self.entries {
            let kept: BTreeSet<_> = prov.intersection(plds).cloned().collect();
            if !kept.is_empty() {
                out.entries.insert(slp.clone(), kept);
            }
        }
        out
    }
}

impl FromIterator<(Slp, PayLevelDomain)> for SlpSet {
    fn from_iter<T: IntoIterator<Item = (Slp, PayLevelDomain)>>(iter: T) -> Self {
        let mut set = SlpSet::new();
        for (slp, pld) in iter {
            set.insert(slp, pld);
        }
        set
    }
}

/// Writes `canonical<TAB>pld1 pld2 ...` lines, sorted by line.
pub fn write_slp_store<W: Write>(mut writer: W, set: &SlpSet) -> std::io::Result<()> {
    let mut lines: Vec<String> = set
        .iter()
        .map(|(slp, plds)| {
            let plds: Vec<&str> = plds.iter().map(PayLevelDomain::as_str).collect();
            format!("{}\t{}", slp.canonical(), plds.join(" "))
        })
        .collect();
    lines.sort_unstable();
    for line in lines {
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum SlpStoreError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {source}")]
    Line { line: usize, source: SlpError },
}

pub fn read_slp_store<R: BufRead>(reader: R) -> Result<SlpSet, SlpStoreError> {
    let mut set = SlpSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let err = |source| SlpStoreError::Line { line: i + 1, source };
        let Some((slp_part, plds_part)) = line.rsplit_once('\t') else {
            return Err(err(SlpError::Malformed("missing provenance field".into())));
        };
        let slp = Slp::parse_canonical(slp_part).map_err(err)?;
        let mut plds = BTreeSet::new();
        if !plds_part.is_empty() {
            for token in plds_part.split(' ') {
                let pld = PayLevelDomain::from_domain(token)
                    .map_err(|e| err(SlpError::Malformed(e.to_string())))?;
                plds.insert(pld);
            }
        }
        if set.contains(&slp) {
            return Err(err(SlpError::Malformed("duplicate SLP".into())));
        }
        set.insert_with(slp, plds);
    }
    Ok(set)
}
