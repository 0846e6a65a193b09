use super::{Slp, SlpError};
use crate::rdf::{Iri, Literal, PayLevelDomain, PldGraph, Quad, RdfObject, Subject};

/// Emits quads for one instance of `slp`: a subject typed with `sts`, linked
/// by every property in `ps` to one object typed with `ots`. When `ots` is
/// empty the object is a single literal, so the pair still carries exactly
/// this SLP.
///
/// `base` is prefixed to the minted resource IRIs (`{base}s{n}`, `{base}o{n}`).
pub fn realize_slp(slp: &Slp, base: &str, instance: usize, context: &Iri) -> Result<Vec<Quad>, SlpError> {
    if slp.ps().is_empty() {
        return Err(SlpError::Malformed(format!(
            "SLP without properties cannot be realized: {slp}"
        )));
    }
    let mint = |s: String| Iri::new(s).map_err(|e| SlpError::Malformed(e.to_string()));
    let subject = mint(format!("{base}s{instance}"))?;
    let object = if slp.ots().is_empty() {
        RdfObject::Literal(Literal::simple(format!("v{instance}")))
    } else {
        RdfObject::Iri(mint(format!("{base}o{instance}"))?)
    };

    let mut quads = Vec::with_capacity(slp.len());
    let typed = |node: &Iri, t: &Iri| {
        Quad::new(
            Subject::Iri(node.clone()),
            Iri::rdf_type(),
            RdfObject::Iri(t.clone()),
            context.clone(),
        )
    };
    for t in slp.sts() {
        quads.push(typed(&subject, t));
    }
    for p in slp.ps() {
        quads.push(Quad::new(
            Subject::Iri(subject.clone()),
            p.clone(),
            object.clone(),
            context.clone(),
        ));
    }
    if let RdfObject::Iri(o) = &object {
        for t in slp.ots() {
            quads.push(typed(o, t));
        }
    }
    Ok(quads)
}

/// A graph for `pld` holding one realized instance per SLP, under
/// `http://data.{pld}/`.
pub fn realize_graph<'s>(
    pld: &PayLevelDomain,
    slps: impl IntoIterator<Item = &'s Slp>,
) -> Result<PldGraph, SlpError> {
    let base = format!("http://data.{pld}/r/");
    let context = Iri::new(format!("http://data.{pld}/graph"))
        .map_err(|e| SlpError::Malformed(e.to_string()))?;
    let mut quads = Vec::new();
    for (i, slp) in slps.into_iter().enumerate() {
        quads.extend(realize_slp(slp, &base, i, &context)?);
    }
    Ok(PldGraph::new(pld.clone(), quads))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::compute_slps;
    use crate::slp::tests::{arb_slp, slp};
    use proptest::prelude::*;

    #[test]
    fn literal_object_when_no_object_types() {
        let pld = PayLevelDomain::from_domain("x.org").unwrap();
        let s = slp(&["A"], &["p", "q"], &[]);
        let g = realize_graph(&pld, [&s]).unwrap();
        let set = compute_slps(&g);
        assert_eq!(set.slps().collect::<Vec<_>>(), [&s]);
    }

    #[test]
    fn rejects_property_free_slp() {
        let ctx = Iri::new("http://x.org/g").unwrap();
        assert!(realize_slp(&slp(&["A"], &[], &[]), "http://x.org/", 0, &ctx).is_err());
    }

    proptest! {
        #[test]
        fn realized_slp_is_recovered(s in arb_slp()) {
            prop_assume!(!s.ps().is_empty());
            let pld = PayLevelDomain::from_domain("y.org").unwrap();
            let g = realize_graph(&pld, [&s]).unwrap();
            let set = compute_slps(&g);
            prop_assert_eq!(set.slps().collect::<Vec<_>>(), vec![&s]);
        }
    }
}
