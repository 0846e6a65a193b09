//! On-disk corpus layout: one N-Quads file per pay-level domain plus a
//! `manifest.tsv` listing `pld<TAB>quad_count<TAB>file`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use rayon::prelude::*;

use super::nquads::{parse_nquads, write_nquads, ParseOptions};
use super::partition::{partition_by_pld, Partition, PldGraph};
use super::pld::PayLevelDomain;
use super::term::{Interner, Quad};
use super::IngestError;

pub const MANIFEST_FILE: &str = "manifest.tsv";
const MANIFEST_HEADER: &str = "pld\tquad_count\tfile";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub pld: PayLevelDomain,
    pub quad_count: usize,
    pub file: String,
}

/// Opens a file for reading, transparently decompressing gzip input.
pub fn open_input(path: &Path) -> Result<Box<dyn BufRead + Send>, IngestError> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    drop(file);
    let file = File::open(path)?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

#[derive(Debug, Default)]
pub struct IngestOutcome {
    pub partition: Partition,
    pub skipped_lines: usize,
}

/// Parses every input file (concurrently) and partitions the union by PLD.
/// Blank nodes are scoped by the file's position in `inputs`.
pub fn ingest_files(inputs: &[PathBuf], strict: bool) -> Result<IngestOutcome, IngestError> {
    let parsed: Vec<Result<(Vec<Quad>, usize), IngestError>> = inputs
        .par_iter()
        .enumerate()
        .map(|(ordinal, path)| {
            let reader = open_input(path)?;
            let options = ParseOptions {
                strict,
                blank_scope: Some(format!("f{ordinal}")),
            };
            let mut interner = Interner::new();
            let outcome = parse_nquads(reader, &options, &mut interner).map_err(|e| match e {
                IngestError::Parse { line, token, message } => IngestError::Parse {
                    line,
                    token,
                    message: format!("{}: {message}", path.display()),
                },
                other => other,
            })?;
            Ok((outcome.quads, outcome.skipped))
        })
        .collect();
    let mut all = Vec::new();
    let mut skipped_lines = 0;
    for result in parsed {
        let (quads, skipped) = result?;
        all.extend(quads);
        skipped_lines += skipped;
    }
    Ok(IngestOutcome {
        partition: partition_by_pld(all),
        skipped_lines,
    })
}

fn file_name_for(pld: &PayLevelDomain) -> String {
    format!("{}.nq", pld.as_str())
}

/// Writes one N-Quads file per graph plus the manifest. Unassigned quads are
/// not written.
pub fn write_corpus_dir<'g>(
    dir: &Path,
    graphs: impl IntoIterator<Item = &'g PldGraph>,
) -> Result<Vec<ManifestEntry>, IngestError> {
    fs::create_dir_all(dir)?;
    let mut entries = Vec::new();
    for graph in graphs {
        let file = file_name_for(&graph.pld);
        let mut out = BufWriter::new(File::create(dir.join(&file))?);
        let quad_count = write_nquads(&mut out, &graph.quads)?;
        out.flush()?;
        entries.push(ManifestEntry {
            pld: graph.pld.clone(),
            quad_count,
            file,
        });
    }
    entries.sort_by(|a, b| a.pld.cmp(&b.pld));
    let mut manifest = BufWriter::new(File::create(dir.join(MANIFEST_FILE))?);
    writeln!(manifest, "{MANIFEST_HEADER}")?;
    for e in &entries {
        writeln!(manifest, "{}\t{}\t{}", e.pld, e.quad_count, e.file)?;
    }
    manifest.flush()?;
    Ok(entries)
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
    let path = dir.join(MANIFEST_FILE);
    let bad = |line: usize, why: &str| {
        IngestError::Corpus(format!("{}:{line}: {why}", path.display()))
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| IngestError::Corpus(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == MANIFEST_HEADER => {}
        _ => return Err(bad(1, "missing or unexpected header")),
    }
    let mut entries = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [pld, count, file] = fields[..] else {
            return Err(bad(i + 1, "expected 3 tab-separated fields"));
        };
        let pld = PayLevelDomain::from_domain(pld).map_err(|e| bad(i + 1, &e.to_string()))?;
        let quad_count = count.parse().map_err(|_| bad(i + 1, "quad_count is not an integer"))?;
        if file.contains('/') || file.contains('\\') {
            return Err(bad(i + 1, "file must be a plain file name"));
        }
        entries.push(ManifestEntry {
            pld,
            quad_count,
            file: file.to_owned(),
        });
    }
    Ok(entries)
}

/// An ingested corpus held in memory, keyed by PLD.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub graphs: BTreeMap<PayLevelDomain, PldGraph>,
}

impl Corpus {
    pub fn from_graphs(graphs: impl IntoIterator<Item = PldGraph>) -> Self {
        let mut map = BTreeMap::new();
        for g in graphs {
            map.insert(g.pld.clone(), g);
        }
        Corpus { graphs: map }
    }

    /// Loads every PLD listed in the manifest. Quad counts are checked
    /// against the manifest.
    pub fn load_dir(dir: &Path) -> Result<Self, IngestError> {
        Self::load_dir_filtered(dir, |_| true)
    }

    pub fn load_dir_filtered(
        dir: &Path,
        keep: impl Fn(&PayLevelDomain) -> bool + Sync,
    ) -> Result<Self, IngestError> {
        let entries = read_manifest(dir)?;
        let graphs: Vec<Result<PldGraph, IngestError>> = entries
            .par_iter()
            .filter(|e| keep(&e.pld))
            .map(|entry| {
                let reader = open_input(&dir.join(&entry.file))?;
                let mut interner = Interner::new();
                let outcome = parse_nquads(reader, &ParseOptions::strict(), &mut interner)?;
                if outcome.quads.len() != entry.quad_count {
                    return Err(IngestError::Corpus(format!(
                        "{}: manifest lists {} quads, file has {}",
                        entry.file,
                        entry.quad_count,
                        outcome.quads.len()
                    )));
                }
                Ok(PldGraph::new(entry.pld.clone(), outcome.quads))
            })
            .collect();
        let graphs = graphs.into_iter().collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_graphs(graphs))
    }

    pub fn write_dir(&self, dir: &Path) -> Result<Vec<ManifestEntry>, IngestError> {
        write_corpus_dir(dir, self.graphs.values())
    }

    pub fn plds(&self) -> BTreeSet<PayLevelDomain> {
        self.graphs.keys().cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn quad_count(&self) -> usize {
        self.graphs.values().map(|g| g.quads.len()).sum()
    }
}
