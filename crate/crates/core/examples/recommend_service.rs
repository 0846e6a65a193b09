//! Serve recommendations for a generated corpus over HTTP.
//!
//! ```text
//! cargo run --release --example recommend_service -- 127.0.0.1:8080
//! curl -s localhost:8080/healthz
//! curl -s 'localhost:8080/terms?prefix=Type&kind=type&limit=5'
//! curl -s -XPOST localhost:8080/recommend -H 'content-type: application/json' \
//!      -d '{"sts":["http://vocab0.net/ns#Type1"],"positions":["ps"],"limit":3}'
//! ```
//!
//! The index is built from the first 40 PLDs and one Coordinate Ascent model
//! per position is trained on the remaining ones.

use std::net::SocketAddr;
use std::sync::Arc;

use termpicker::eval::{generate_synthetic_corpus, SynthConfig};
use termpicker::features::BackgroundCorpus;
use termpicker::ranker::{generate_training_data, train, Algorithm, FeatureMask, Hyperparams, ModelSet};
use termpicker::rdf::PldGraph;
use termpicker::service::{serve, AppState, DEFAULT_BIND};
use termpicker::slp::{compute_slps, Position, SlpSet};

#[tokio::main]
async fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let bind: SocketAddr = std::env::args()
        .nth(1)
        .unwrap_or_else(|| DEFAULT_BIND.to_owned())
        .parse()
        .expect("bind address like 127.0.0.1:8080");

    let corpus = generate_synthetic_corpus(&SynthConfig::default(), 21);
    let graphs: Vec<&PldGraph> = corpus.graphs.values().collect();
    let (background, training) = graphs.split_at(40);
    let index = BackgroundCorpus::build(background.to_vec());
    let slps = training.iter().fold(SlpSet::new(), |acc, g| acc.merge(compute_slps(g)));
    let data = generate_training_data(&slps, &index, 2, 0);

    let hp = Hyperparams::default();
    let [sts, ps, ots] = Position::ALL.map(|pos| {
        train(Algorithm::CoordinateAscent, &data.for_position(pos), &hp, FeatureMask::SLP, pos.index() as u64)
            .expect("every position has training queries")
            .with_position(Some(pos))
    });
    let state = AppState::new(index, ModelSet::per_position(sts, ps, ots));
    serve(Arc::new(state), bind).await.expect("server runs");
}
