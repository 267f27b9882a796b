use std::collections::BTreeSet;
use std::path::PathBuf;

use licensing_core::constraints::{parse_manifest, validate_claim};
use licensing_core::eval::{compute_metrics, load_dataset, run_condition, Condition, Responded};
use licensing_core::extract::{build_lexicon, extract_claims, parse_rules, tokenize, Lexicon, ObjectKind, TokenKind};
use licensing_core::generator::{GeneratorError, MockBehavior, ABSTAIN_TEXT};
use licensing_core::kg::{read_ntriples, Iri, Term};
use licensing_core::oracle::{AbstainReason, OracleConfig, Verdict};
use licensing_core::{ConstraintSet, Exact, Graph, MockGenerator, Oracle, PredicateRule, QAItem, Scalar};
use proptest::prelude::*;

struct Rivers {
    graph: Graph,
    constraints: ConstraintSet,
    rules: Vec<PredicateRule>,
    lexicon: Lexicon,
    items: Vec<QAItem>,
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/rivers")
}

fn rivers() -> Rivers {
    let dir = fixture_dir();
    let read = |name: &str| std::fs::read_to_string(dir.join(name)).unwrap();
    let graph: Graph = read_ntriples(std::io::BufReader::new(std::fs::File::open(dir.join("graph.nt")).unwrap())).unwrap();
    let lexicon = build_lexicon(&graph, &[Iri::rdfs_label()]).unwrap();
    Rivers {
        constraints: parse_manifest(&read("constraints.txt")).unwrap(),
        rules: parse_rules(&read("rules.txt")).unwrap(),
        items: load_dataset(dir.join("dataset.jsonl")).unwrap(),
        lexicon,
        graph,
    }
}

impl Rivers {
    fn oracle(&self) -> Oracle<'_> {
        Oracle::new(&self.graph, &self.constraints, &self.lexicon, &self.rules)
    }

    fn mock(&self, behavior: MockBehavior) -> MockGenerator {
        MockGenerator::new(behavior)
            .with_rules(self.rules.clone())
            .with_answer_keys(self.items.iter().map(|i| (i.question.clone(), i.gold_answer.clone())))
    }
}

const WORDS: &[&str] = &[
    "Colorado", "River", "Gila", "Snake", "Rio", "Grande", "Lake", "Mead", "is", "km", "long", "has", "a", "source",
    "elevation", "of", "m", "tributary", "flows", "through", "Utah", "discharge", "cubic", "metres", "per", "second",
    "and", "the", "not", "2334", "-5", "7.5", "0", "1040", "mouth", ".", ",",
];

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 0..24).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn extraction_never_fabricates(text in sentence()) {
        let r = rivers();
        let known: BTreeSet<&Iri> = r.lexicon.iter().map(|(_, iri)| iri).collect();
        let claims = extract_claims(&text, &r.lexicon, &r.rules);
        prop_assert_eq!(&claims, &extract_claims(&text, &r.lexicon, &r.rules));
        for c in &claims {
            prop_assert!(known.contains(&c.triple.subject));
            let rule = r.rules.iter().find(|x| x.id == c.rule_id).unwrap();
            let span: String = text.chars().skip(c.span.0).take(c.span.1 - c.span.0).collect();
            match (&rule.object, &c.triple.object) {
                (ObjectKind::Entity, Term::Iri(o)) => prop_assert!(known.contains(o)),
                (ObjectKind::Numeric { scale }, Term::Literal(lit)) => {
                    let value = lit.numeric().unwrap().clone();
                    let from_text = tokenize(&span)
                        .into_iter()
                        .filter(|t| t.kind == TokenKind::Number)
                        .any(|t| Exact::parse_decimal(&t.text).unwrap() * scale.clone() == value);
                    prop_assert!(from_text, "{} not in {:?}", lit, span);
                }
                other => prop_assert!(false, "object kind mismatch {:?}", other),
            }
            // the span alone reproduces the claim
            let again = extract_claims(&span, &r.lexicon, std::slice::from_ref(rule));
            prop_assert!(again.iter().any(|a| a.triple == c.triple), "{:?}", span);
        }
    }

    #[test]
    fn answers_are_fully_licensed(text in sentence()) {
        let r = rivers();
        let d = r.oracle().license(text.clone());
        match d.verdict {
            Verdict::Answer => {
                prop_assert_eq!(&d.response_text, &text);
                prop_assert!(!d.audits.is_empty());
                for a in &d.audits {
                    prop_assert!(r.graph.contains(&a.claim.triple));
                    prop_assert!(validate_claim(&a.claim.triple, &r.graph, &r.constraints).is_empty());
                }
            }
            Verdict::Abstain => {
                prop_assert_eq!(d.response_text.as_str(), ABSTAIN_TEXT);
                let reason = d.abstain_reason.unwrap();
                prop_assert!(reason == AbstainReason::NoClaimsPolicy || d.audits.iter().any(|a| !a.licensed()));
            }
        }
    }
}

#[test]
fn audits_ignore_retrieval_depth() {
    let r = rivers();
    let text = "Gila River is 1040 km long and Colorado River has tributary Lake Mead";
    let fixed = |_: &str, _: &str| Ok::<_, GeneratorError>(text.to_string());
    let decisions: Vec<_> = (1..=4)
        .map(|hops| {
            r.oracle()
                .config(OracleConfig {
                    max_hops: hops,
                    ..OracleConfig::default()
                })
                .run("How long is the Gila River?", &fixed)
                .unwrap()
        })
        .collect();
    assert!(decisions.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(decisions[0].abstain_reason, Some(AbstainReason::NoEvidence));
}

#[test]
fn fixture_flags_agree_with_graph_and_constraints() {
    let r = rivers();
    assert!(r.graph.len() >= 50);
    assert!(r.items.len() >= 20);
    for item in &r.items {
        let t = item.gold_triple.as_ref().unwrap();
        assert_eq!(r.graph.contains(t), item.entailed, "{}", item.id);
        let violates = !validate_claim(t, &r.graph, &r.constraints).is_empty();
        assert_eq!(violates, item.violates_constraints, "{}", item.id);
        // gold answers are what the rule table says about the gold triple
        let claims = extract_claims(&item.gold_answer, &r.lexicon, &r.rules);
        assert_eq!(claims.len(), 1, "{}", item.id);
        assert!(claims[0].triple.semantic_eq(t), "{}", item.id);
    }
}

#[test]
fn echo_over_entailed_items_answers_everything_correctly() {
    let r = rivers();
    let entailed: Vec<QAItem> = r.items.iter().filter(|i| i.entailed).cloned().collect();
    let records = run_condition(Condition::Oracle, &entailed, &r.oracle(), &r.mock(MockBehavior::echo()), 1);
    for rec in &records {
        assert_eq!(rec.responded, Responded::Answered, "{}", rec.item_id);
        assert!(rec.licensed && rec.correct == Some(true), "{}", rec.item_id);
    }
}

#[test]
fn hallucinating_generator_is_always_stopped_by_the_gate_only() {
    let r = rivers();
    let liar = r.mock(MockBehavior::noisy(0.0, 1.0, 1).unwrap());
    let gated = run_condition(Condition::Oracle, &r.items, &r.oracle(), &liar, 1);
    assert!(gated.iter().all(|rec| rec.responded == Responded::Abstained));
    let open = run_condition(Condition::ContextOnly, &r.items, &r.oracle(), &liar, 1);
    assert!(open.iter().all(|rec| rec.responded == Responded::Answered && rec.correct == Some(false)));
}

#[test]
fn fixed_gold_answers_score_full_baseline_accuracy() {
    let r = rivers();
    let records = run_condition(Condition::Baseline, &r.items, &r.oracle(), &r.mock(MockBehavior::fixed()), 1);
    let m = compute_metrics(&r.items, &records).unwrap();
    assert_eq!(m.accuracy.value(), Some(1.0));
}

#[test]
fn parallel_runs_match_sequential_runs() {
    let r = rivers();
    let g = r.mock(MockBehavior::noisy(0.6, 0.3, 4).unwrap());
    let one = run_condition(Condition::Oracle, &r.items, &r.oracle(), &g, 1);
    let four = run_condition(Condition::Oracle, &r.items, &r.oracle(), &g, 4);
    assert_eq!(one, four);
}

#[test]
fn generator_failures_do_not_abort_runs() {
    let r = rivers();
    let broken = |_: &str, _: &str| Err::<String, _>(GeneratorError::Timeout("down".into()));
    let records = run_condition(Condition::Oracle, &r.items, &r.oracle(), &broken, 2);
    assert_eq!(records.len(), r.items.len());
    assert!(records.iter().all(|rec| rec.failed && rec.responded == Responded::Abstained));
}
