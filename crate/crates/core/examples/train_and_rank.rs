//! Train both ranking algorithms on held-out extraction queries, save one
//! model as JSON and use it to rank candidates.

use termpicker::eval::{evaluate_queries, generate_synthetic_corpus, Scope, SynthConfig};
use termpicker::features::BackgroundCorpus;
use termpicker::ranker::{
    generate_training_data, load_model, rank, save_model, train, train_coordinate_ascent_traced, Algorithm,
    FeatureMask, Hyperparams,
};
use termpicker::rdf::PldGraph;
use termpicker::slp::{compute_slps, QuerySlp, SlpSet};

fn main() {
    let corpus = generate_synthetic_corpus(&SynthConfig::default(), 11);
    let graphs: Vec<&PldGraph> = corpus.graphs.values().collect();
    let (train_graphs, rest) = graphs.split_at(8);
    let (test_graphs, background) = rest.split_at(4);

    let index = BackgroundCorpus::build(background.to_vec());
    let slps_of = |gs: &[&PldGraph]| gs.iter().fold(SlpSet::new(), |acc, g| acc.merge(compute_slps(g)));
    let training = generate_training_data(&slps_of(train_graphs), &index, 2, 1);
    let test = generate_training_data(&slps_of(test_graphs), &index, 2, 2);
    println!("{} training queries, {} test queries", training.len(), test.len());

    let mut hp = Hyperparams::default();
    hp.forest.trees = 100;
    for algorithm in [Algorithm::RandomForests, Algorithm::CoordinateAscent] {
        for mask in [FeatureMask::POP, FeatureMask::SLP] {
            let model = train(algorithm, &training, &hp, mask, 7).unwrap();
            let cell = evaluate_queries(&test, |_, _, f| model.score(f)).cell(Scope::Overall).unwrap();
            println!("{algorithm} {mask:<4} MAP {:.3}  MRR@5 {:.3}", cell.map, cell.mrr5);
        }
    }

    let (model, trace) = train_coordinate_ascent_traced(&training, &hp, FeatureMask::SLP, 7).unwrap();
    println!("\ncoordinate ascent: best training MAP {:.3} after restart {}", trace.best_map(), trace.best);
    let path = std::env::temp_dir().join("termpicker-ca.json");
    save_model(&model, &path).unwrap();
    println!("{}", std::fs::read_to_string(&path).unwrap().trim_end());

    let model = load_model(&path).unwrap();
    let query = &test.queries[0];
    println!("\nquery {} (hidden at {}: {:?})", query.query.slp(), query.position, query.relevant);
    let q: &QuerySlp = &query.query;
    for (i, r) in rank(&model, &index, q, query.position, 5).iter().enumerate() {
        let mark = if query.relevant.contains(&r.term) { "*" } else { " " };
        println!("{mark}{:>2}. {:>8.3} {}", i + 1, r.score, r.term);
    }
}
