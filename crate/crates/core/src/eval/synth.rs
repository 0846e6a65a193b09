use std::collections::BTreeSet;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::rdf::{Corpus, Iri, PayLevelDomain, PldGraph};
use crate::seed;
use crate::slp::{realize_slp, Position, Slp};

/// Shape of a generated corpus. Every PLD realizes a few SLP templates drawn
/// from a shared pool, so a term's co-occurrence with the rest of its
/// template is visible across datasets while its popularity is not tied to
/// any particular template.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub plds: usize,
    pub vocabularies: usize,
    pub types_per_vocabulary: usize,
    pub properties_per_vocabulary: usize,
    pub templates: usize,
    pub templates_per_pld: usize,
    pub instances_per_template: usize,
    /// Probability that an instance gets one extra subject type. Half of the
    /// extra types are minted under the PLD's own domain.
    pub noise_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            plds: 50,
            vocabularies: 8,
            types_per_vocabulary: 6,
            properties_per_vocabulary: 8,
            templates: 40,
            templates_per_pld: 10,
            instances_per_template: 3,
            noise_rate: 0.1,
        }
    }
}

/// `http://vocab{j}.net/ns#` for even `j`, `http://vocab{j}.net/terms/` for odd.
pub fn vocabulary_iri(j: usize) -> String {
    if j.is_multiple_of(2) {
        format!("http://vocab{j}.net/ns#")
    } else {
        format!("http://vocab{j}.net/terms/")
    }
}

pub fn synthetic_pld(i: usize) -> PayLevelDomain {
    PayLevelDomain::from_domain(&format!("site{i:03}.org")).expect("synthetic domains are registrable")
}

struct Terms {
    types: Vec<Iri>,
    properties: Vec<Iri>,
}

impl Terms {
    fn new(c: &SynthConfig) -> Terms {
        let mut types = Vec::new();
        let mut properties = Vec::new();
        for j in 0..c.vocabularies {
            let ns = vocabulary_iri(j);
            types.extend((0..c.types_per_vocabulary).map(|t| iri(format!("{ns}Type{t}"))));
            properties.extend((0..c.properties_per_vocabulary).map(|p| iri(format!("{ns}prop{p}"))));
        }
        Terms { types, properties }
    }

    fn pick<'a>(pool: &'a [Iri], rng: &mut ChaCha8Rng, n: usize) -> Vec<&'a Iri> {
        index::sample(rng, pool.len(), n.min(pool.len()))
            .into_iter()
            .map(|i| &pool[i])
            .collect()
    }

    fn template(&self, rng: &mut ChaCha8Rng) -> Slp {
        let n_sts = 1 + rng.random_bool(0.3) as usize;
        let sts = Self::pick(&self.types, rng, n_sts);
        let n_ps = 1 + rng.random_bool(0.4) as usize;
        let ps = Self::pick(&self.properties, rng, n_ps);
        let ots = if rng.random_bool(0.75) {
            Self::pick(&self.types, rng, 1)
        } else {
            Vec::new()
        };
        Slp::new(sts.into_iter().cloned(), ps.into_iter().cloned(), ots.into_iter().cloned())
            .expect("generated properties are never rdf:type")
    }
}

fn iri(s: String) -> Iri {
    Iri::new(s).expect("generated IRIs are valid")
}

/// The template pool for `config` under `seed`.
pub fn synthetic_templates(config: &SynthConfig, seed: u64) -> Vec<Slp> {
    let terms = Terms::new(config);
    if terms.types.is_empty() || terms.properties.is_empty() {
        return Vec::new();
    }
    let mut rng = seed::stream_rng(seed, 0);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < config.templates && attempts < config.templates * 50 {
        attempts += 1;
        let t = terms.template(&mut rng);
        if seen.insert(t.clone()) {
            out.push(t);
        }
    }
    out
}

/// Generates the corpus. Output depends only on `(config, seed)`.
pub fn generate_synthetic_corpus(config: &SynthConfig, seed: u64) -> Corpus {
    let terms = Terms::new(config);
    let templates = synthetic_templates(config, seed);
    let k = templates.len();
    let mut rng = seed::stream_rng(seed, 1);

    let mut assigned: Vec<BTreeSet<usize>> = (0..config.plds)
        .map(|_| index::sample(&mut rng, k, config.templates_per_pld.min(k)).into_iter().collect())
        .collect();
    if config.plds > 0 && config.templates_per_pld > 0 {
        for t in 0..k {
            if !assigned.iter().any(|a| a.contains(&t)) {
                assigned[t % config.plds].insert(t);
            }
        }
    }

    let mut graphs = Vec::with_capacity(config.plds);
    for (i, chosen) in assigned.iter().enumerate() {
        let pld = synthetic_pld(i);
        let base = format!("http://data.{pld}/");
        let context = iri(format!("{base}graph"));
        let mut quads = Vec::new();
        let mut instance = 0;
        for &t in chosen {
            for _ in 0..config.instances_per_template {
                let mut slp = templates[t].clone();
                if rng.random_bool(config.noise_rate.clamp(0.0, 1.0)) {
                    let extra = if rng.random_bool(0.5) {
                        terms.types[rng.random_range(0..terms.types.len())].clone()
                    } else {
                        iri(format!("{base}ns#Local{}", rng.random_range(0..3)))
                    };
                    slp = slp.extend(Position::Sts, extra).expect("types go to sts");
                }
                quads.extend(
                    realize_slp(&slp, &format!("{base}r/"), instance, &context)
                        .expect("templates always have properties"),
                );
                instance += 1;
            }
        }
        graphs.push(PldGraph::new(pld, quads));
    }
    Corpus::from_graphs(graphs)
}
