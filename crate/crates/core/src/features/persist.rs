//! Index directory: `terms.tsv`, `vocabs.tsv` and `slps.tsv`.

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use super::index::{BackgroundCorpus, TermStats};
use super::FeatureError;
use crate::rdf::Iri;
use crate::slp::{read_slp_store, write_slp_store, Position};

pub const TERMS_FILE: &str = "terms.tsv";
pub const VOCABS_FILE: &str = "vocabs.tsv";
pub const SLPS_FILE: &str = "slps.tsv";

const TERMS_HEADER: &str = "term\tkind\tf1\tf3";
const VOCABS_HEADER: &str = "namespace\tf2";

fn kind_flag(s: &TermStats) -> &'static str {
    match (s.is_type, s.is_property) {
        (true, true) => "TP",
        (true, false) => "T",
        (false, true) => "P",
        (false, false) => "-",
    }
}

pub fn save_index(corpus: &BackgroundCorpus, dir: &Path) -> Result<(), FeatureError> {
    fs::create_dir_all(dir)?;

    let mut out = BufWriter::new(File::create(dir.join(TERMS_FILE))?);
    writeln!(out, "{TERMS_HEADER}")?;
    for (iri, s) in corpus.terms() {
        writeln!(out, "{iri}\t{}\t{}\t{}", kind_flag(s), s.datasets, s.occurrences)?;
    }
    out.flush()?;

    let mut vocabs: Vec<(&String, &u64)> = corpus.vocab_counts().iter().collect();
    vocabs.sort();
    let mut out = BufWriter::new(File::create(dir.join(VOCABS_FILE))?);
    writeln!(out, "{VOCABS_HEADER}")?;
    for (ns, n) in vocabs {
        writeln!(out, "{ns}\t{n}")?;
    }
    out.flush()?;

    let mut out = BufWriter::new(File::create(dir.join(SLPS_FILE))?);
    write_slp_store(&mut out, corpus.slps())?;
    out.flush()?;
    Ok(())
}

fn tsv_rows<'a>(
    text: &'a str,
    file: &'static str,
    header: &str,
    columns: usize,
) -> Result<Vec<(usize, Vec<&'a str>)>, FeatureError> {
    let bad = |line: usize, message: String| FeatureError::Index {
        file: file.to_owned(),
        message: format!("line {line}: {message}"),
    };
    let mut lines = text.lines().enumerate();
    if lines.next().map(|(_, h)| h) != Some(header) {
        return Err(bad(1, format!("expected header `{header}`")));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != columns {
            return Err(bad(i + 1, format!("expected {columns} columns, found {}", fields.len())));
        }
        rows.push((i + 1, fields));
    }
    Ok(rows)
}

/// Loads and validates an index directory written by [`save_index`].
pub fn load_index(dir: &Path) -> Result<BackgroundCorpus, FeatureError> {
    let index_err = |file: &str, message: String| FeatureError::Index {
        file: file.to_owned(),
        message,
    };

    let text = fs::read_to_string(dir.join(TERMS_FILE))?;
    let mut terms = HashMap::new();
    for (line, f) in tsv_rows(&text, TERMS_FILE, TERMS_HEADER, 4)? {
        let at = |m: String| index_err(TERMS_FILE, format!("line {line}: {m}"));
        let iri = Iri::new(f[0]).map_err(|e| at(e.to_string()))?;
        let (is_type, is_property) = match f[1] {
            "T" => (true, false),
            "P" => (false, true),
            "TP" => (true, true),
            other => return Err(at(format!("unknown kind `{other}`"))),
        };
        let datasets: u64 = f[2].parse().map_err(|_| at("f1 is not an integer".into()))?;
        let occurrences: u64 = f[3].parse().map_err(|_| at("f3 is not an integer".into()))?;
        if occurrences < datasets {
            return Err(at("f3 must be at least f1".into()));
        }
        let stats = TermStats {
            is_type,
            is_property,
            datasets,
            occurrences,
        };
        if terms.insert(iri, stats).is_some() {
            return Err(at("duplicate term".into()));
        }
    }

    let text = fs::read_to_string(dir.join(VOCABS_FILE))?;
    let mut vocabs = HashMap::new();
    for (line, f) in tsv_rows(&text, VOCABS_FILE, VOCABS_HEADER, 2)? {
        let n: u64 = f[1]
            .parse()
            .map_err(|_| index_err(VOCABS_FILE, format!("line {line}: f2 is not an integer")))?;
        vocabs.insert(f[0].to_owned(), n);
    }

    let reader = BufReader::new(File::open(dir.join(SLPS_FILE))?);
    let slps = read_slp_store(reader).map_err(|e| index_err(SLPS_FILE, e.to_string()))?;
    for (slp, _) in slps.iter() {
        for (pos, term) in slp.entries() {
            let ok = terms.get(term).is_some_and(|s: &TermStats| {
                if pos == Position::Ps {
                    s.is_property
                } else {
                    s.is_type
                }
            });
            if !ok {
                return Err(index_err(
                    SLPS_FILE,
                    format!("SLP term {term} at {pos} is missing from {TERMS_FILE}"),
                ));
            }
        }
    }
    Ok(BackgroundCorpus::from_parts(terms, vocabs, slps))
}
