//! Building, combining and taking apart schema-level patterns.

use termpicker::rdf::Iri;
use termpicker::slp::{Position, QuerySlp, Slp};

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn main() {
    let person = iri("http://xmlns.com/foaf/0.1/Person");
    let chess = iri("http://dbpedia.org/ontology/ChessPlayer");
    let coach = iri("http://dbpedia.org/ontology/Coach");
    let knows = iri("http://xmlns.com/foaf/0.1/knows");

    let a = Slp::new([person.clone()], [knows.clone()], []).unwrap();
    let b = Slp::new([chess], [], [person, coach.clone()]).unwrap();
    let full = a.union(&b);
    println!("a       = {a}");
    println!("b       = {b}");
    println!("a ⊕ b   = {full}");
    println!("a ≤ a⊕b : {}", a.is_subset_of(&full));

    // One term at a time, as a modeler would.
    let grown = a.extend(Position::Ots, coach.clone()).unwrap();
    println!("a ⊕ots Coach = {grown}");
    let shrunk = full.remove(Position::Ps, &knows);
    println!("(a ⊕ b) ⊖ps knows = {shrunk}");

    // rdf:type never connects resources.
    println!("rdf:type in ps: {}", a.extend(Position::Ps, Iri::rdf_type()).unwrap_err());

    let line = full.canonical();
    println!("canonical: {line}");
    assert_eq!(Slp::parse_canonical(&line).unwrap(), full);

    match QuerySlp::new(Slp::empty()) {
        Ok(_) => unreachable!(),
        Err(e) => println!("empty query: {e}"),
    }
}
