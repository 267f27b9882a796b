use super::{Constraint, ConstraintKind, ConstraintSet, ValidationReport, Violation};
use crate::kg::{Graph, Iri, Overlay, Triple, TripleSource};
use crate::scalar::Scalar;

pub fn validate_graph<S: Scalar>(graph: &Graph<S>, constraints: &ConstraintSet<S>) -> ValidationReport<S> {
    ValidationReport {
        violations: validate_source(graph, constraints, None),
    }
}

/// Violations that adding `claim` to `graph` would exhibit at the claim's
/// subject. Every violation's focus is the subject of the triple it cites,
/// so this covers both "focus is the claim subject" and "triple is the claim".
pub fn validate_claim<S: Scalar>(
    claim: &Triple<S>,
    graph: &Graph<S>,
    constraints: &ConstraintSet<S>,
) -> Vec<Violation<S>> {
    let view = Overlay::new(graph, claim);
    validate_source(&view, constraints, Some(&claim.subject))
}

/// Evaluates every constraint over `source`, optionally only at one focus node.
pub fn validate_source<S: Scalar, G: TripleSource<S>>(
    source: &G,
    constraints: &ConstraintSet<S>,
    focus: Option<&Iri>,
) -> Vec<Violation<S>> {
    let mut out = Vec::new();
    for c in constraints.iter() {
        check(source, c, focus, &mut out);
    }
    out
}

// Negated comparisons make incomparable values (NaN) count as violations.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check<S: Scalar, G: TripleSource<S>>(
    source: &G,
    constraint: &Constraint<S>,
    focus: Option<&Iri>,
    out: &mut Vec<Violation<S>>,
) {
    let mut report = |node: &Iri, triple: Option<&Triple<S>>, message: String| {
        out.push(Violation {
            constraint_id: constraint.id.clone(),
            focus: node.clone(),
            triple: triple.cloned(),
            message,
        });
    };

    match &constraint.kind {
        ConstraintKind::ClassOfObject { predicate, class } => {
            for t in source.match_pattern(focus, Some(predicate), None) {
                let typed = t.object.as_iri().is_some_and(|o| source.has_type(o, class));
                if !typed {
                    report(&t.subject, Some(t), format!("{} of {} is not typed {}", predicate, t.object, class));
                }
            }
        }
        ConstraintKind::MinExclusive { class, property, bound } => {
            for node in targets(source, class, focus) {
                for (t, v) in numeric_values(source, &node, property) {
                    if !(&v > bound) {
                        report(&node, Some(t), format!("{property} = {} is not > {}", v.to_decimal_string(), bound.to_decimal_string()));
                    }
                }
            }
        }
        ConstraintKind::MinInclusive { class, property, bound } => {
            for node in targets(source, class, focus) {
                for (t, v) in numeric_values(source, &node, property) {
                    if !(&v >= bound) {
                        report(&node, Some(t), format!("{property} = {} is not >= {}", v.to_decimal_string(), bound.to_decimal_string()));
                    }
                }
            }
        }
        ConstraintKind::MaxInclusive { class, property, bound } => {
            for node in targets(source, class, focus) {
                for (t, v) in numeric_values(source, &node, property) {
                    if !(&v <= bound) {
                        report(&node, Some(t), format!("{property} = {} is not <= {}", v.to_decimal_string(), bound.to_decimal_string()));
                    }
                }
            }
        }
        ConstraintKind::LessThanProperty { class, lesser, greater } => {
            for node in targets(source, class, focus) {
                let highs = numeric_values(source, &node, greater);
                for (t, low) in numeric_values(source, &node, lesser) {
                    for (_, high) in &highs {
                        if !(low < *high) {
                            report(
                                &node,
                                Some(t),
                                format!(
                                    "{lesser} = {} is not < {greater} = {}",
                                    low.to_decimal_string(),
                                    high.to_decimal_string()
                                ),
                            );
                        }
                    }
                }
            }
        }
        ConstraintKind::ConditionalRequirement {
            predicate,
            object_class,
            required_predicate,
            required_object,
        } => {
            let required = crate::kg::Term::Iri(required_object.clone());
            for t in source.match_pattern(focus, Some(predicate), None) {
                let Some(o) = t.object.as_iri() else { continue };
                if !source.has_type(o, object_class) {
                    continue;
                }
                let present = !source
                    .match_pattern(Some(&t.subject), Some(required_predicate), Some(&required))
                    .is_empty();
                if !present {
                    report(
                        &t.subject,
                        Some(t),
                        format!("{predicate} {o} (a {object_class}) requires {required_predicate} {required_object}"),
                    );
                }
            }
        }
        ConstraintKind::IntervalOverlap { predicate, start, end } => {
            for t in source.match_pattern(focus, Some(predicate), None) {
                let Some(other) = t.object.as_iri() else { continue };
                let (Some((a0, a1)), Some((b0, b1))) =
                    (interval(source, &t.subject, start, end), interval(source, other, start, end))
                else {
                    continue;
                };
                if !(a0 <= b1 && b0 <= a1) {
                    report(
                        &t.subject,
                        Some(t),
                        format!(
                            "[{}, {}] does not overlap [{}, {}] of {}",
                            a0.to_decimal_string(),
                            a1.to_decimal_string(),
                            b0.to_decimal_string(),
                            b1.to_decimal_string(),
                            other
                        ),
                    );
                }
            }
        }
    }
}

fn targets<S, G: TripleSource<S>>(source: &G, class: &Iri, focus: Option<&Iri>) -> Vec<Iri> {
    match focus {
        Some(node) if source.has_type(node, class) => vec![node.clone()],
        Some(_) => Vec::new(),
        None => source.instances_of(class),
    }
}

fn numeric_values<'a, S: Scalar, G: TripleSource<S>>(source: &'a G, node: &Iri, property: &Iri) -> Vec<(&'a Triple<S>, S)> {
    source
        .match_pattern(Some(node), Some(property), None)
        .into_iter()
        .filter_map(|t| t.object.numeric().map(|v| (t, v.clone())))
        .collect()
}

/// First numeric start and end value of `node`.
fn interval<S: Scalar, G: TripleSource<S>>(source: &G, node: &Iri, start: &Iri, end: &Iri) -> Option<(S, S)> {
    let first = |p: &Iri| numeric_values(source, node, p).into_iter().next().map(|(_, v)| v);
    Some((first(start)?, first(end)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_manifest;
    use crate::kg::{parse_ntriples, Literal};
    use crate::scalar::Exact;

    const TYPE: &str = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>";

    const MANIFEST: &str = "\
C1 class_of_object predicate=<hasTributary> class=<River>
C2 min_exclusive class=<River> property=<sourceElevation> bound=0
C3 min_exclusive class=<River> property=<length> bound=0
C4 min_exclusive class=<River> property=<discharge> bound=0
C5 min_inclusive class=<River> property=<mouthElevation> bound=-100
C6 less_than_property class=<River> lesser=<mouthElevation> greater=<sourceElevation>
C7 conditional_requirement predicate=<traverses> object_class=<State> required_predicate=<inCountry> required_object=<United_States>
";

    fn graph(body: &str) -> Graph<Exact> {
        parse_ntriples(&body.replace("TYPE", TYPE)).unwrap()
    }

    fn ids(vs: &[Violation<Exact>]) -> Vec<&str> {
        vs.iter().map(|v| v.constraint_id.as_str()).collect()
    }

    #[test]
    fn colorado_source_elevation_conforms() {
        let g = graph("<River_Colorado> TYPE <River> .\n<River_Colorado> <sourceElevation> \"2743.0\" .\n");
        let set = parse_manifest(MANIFEST).unwrap();
        assert!(validate_graph(&g, &set).conforms());
    }

    #[test]
    fn uphill_river_violates_ordering() {
        let g = graph(
            "<River_X> TYPE <River> .\n<River_X> <sourceElevation> \"100\" .\n<River_X> <mouthElevation> \"200\" .\n",
        );
        let report = validate_graph(&g, &parse_manifest(MANIFEST).unwrap());
        assert_eq!(ids(&report.violations), ["C6"]);
        assert_eq!(report.violations[0].focus.as_str(), "River_X");
    }

    #[test]
    fn disjoint_lifespans_violate_overlap() {
        let g = graph(
            "<Kant> <influenced> <Hegel> .\n<Kant> <born> \"1724\" .\n<Kant> <died> \"1804\" .\n\
             <Hegel> <born> \"1770\" .\n<Hegel> <died> \"1831\" .\n\
             <Plato> <influenced> <Hegel> .\n<Plato> <born> \"-428\" .\n<Plato> <died> \"-348\" .\n\
             <Thinker_A> <influenced> <Kant> .\n<Thinker_A> <born> \"1690\" .\n<Thinker_A> <died> \"1724\" .\n",
        );
        let set = parse_manifest::<Exact>("T1 interval_overlap predicate=<influenced> start=<born> end=<died>").unwrap();
        let report = validate_graph(&g, &set);
        // Plato/Hegel are disjoint; Thinker_A died the year Kant was born (closed interval)
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].focus.as_str(), "Plato");
    }

    #[test]
    fn claim_with_non_river_tributary() {
        let g = graph("<River_X> TYPE <River> .\n<Lake_Y> TYPE <Lake> .\n");
        let set = parse_manifest(MANIFEST).unwrap();
        let claim = Triple::new(Iri::new("River_X").unwrap(), Iri::new("hasTributary").unwrap(), Iri::new("Lake_Y").unwrap());
        let vs = validate_claim(&claim, &g, &set);
        assert_eq!(ids(&vs), ["C1"]);
        assert_eq!(vs[0].triple.as_ref(), Some(&claim));
    }

    #[test]
    fn claim_negative_source_elevation() {
        let g = graph("<River_X> TYPE <River> .\n");
        let set = parse_manifest(MANIFEST).unwrap();
        let claim = Triple::new(
            Iri::new("River_X").unwrap(),
            Iri::new("sourceElevation").unwrap(),
            Literal::infer("-5"),
        );
        assert_eq!(ids(&validate_claim(&claim, &g, &set)), ["C2"]);
    }

    #[test]
    fn entailed_consistent_claim_is_clean() {
        let g = graph("<River_X> TYPE <River> .\n<River_X> <length> \"1000\" .\n");
        let set = parse_manifest(MANIFEST).unwrap();
        let claim = g.triples()[0].clone();
        assert!(validate_claim(&claim, &g, &set).is_empty());
    }

    #[test]
    fn missing_country_violates_conditional() {
        let g = graph(
            "<River_A> <traverses> <State_Utah> .\n<State_Utah> TYPE <State> .\n\
             <River_B> <traverses> <State_Utah> .\n<River_B> <inCountry> <United_States> .\n\
             <River_C> <traverses> <Region_X> .\n",
        );
        let report = validate_graph(&g, &parse_manifest(MANIFEST).unwrap());
        assert_eq!(ids(&report.violations), ["C7"]);
        assert_eq!(report.violations[0].focus.as_str(), "River_A");
    }

    #[test]
    fn empty_constraint_set_conforms() {
        let g = graph("<River_X> TYPE <River> .\n<River_X> <length> \"-1\" .\n");
        let report = validate_graph(&g, &ConstraintSet::default());
        assert!(report.conforms());
        assert_eq!(report.to_string(), "conforms=true violations=0\n");
    }
}
