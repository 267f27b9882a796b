//! The licensing gate: retrieve context, generate, extract claims, audit each
//! claim, then answer or abstain.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::constraints::{validate_claim, ConstraintSet, Violation};
use crate::extract::{link_question_entities, Claim, ClaimExtractor, Lexicon, PredicateRule, RuleExtractor};
use crate::generator::{Generator, GeneratorError, ABSTAIN_TEXT};
use crate::kg::{retrieve_subgraph, Graph, Iri, Triple};
use crate::scalar::Scalar;

pub const DEFAULT_MAX_HOPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Answer,
    Abstain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AbstainReason {
    NoEvidence,
    ConstraintViolation,
    NoClaimsPolicy,
}

impl AbstainReason {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::NoEvidence => "NO_EVIDENCE",
            Self::ConstraintViolation => "CONSTRAINT_VIOLATION",
            Self::NoClaimsPolicy => "NO_CLAIMS_POLICY",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_hops: usize,
    /// Abstain when the generated text yields no claims.
    pub abstain_on_no_claims: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_hops: DEFAULT_MAX_HOPS,
            abstain_on_no_claims: true,
        }
    }
}

/// The audit of one claim.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRecord<S> {
    pub claim: Claim<S>,
    /// The graph triple that entails the claim, if any.
    pub supporting_triple: Option<Triple<S>>,
    pub violations: Vec<Violation<S>>,
}

impl<S> AuditRecord<S> {
    pub fn entailed(&self) -> bool {
        self.supporting_triple.is_some()
    }

    pub fn licensed(&self) -> bool {
        self.entailed() && self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LicensingDecision<S> {
    pub verdict: Verdict,
    /// The generated text on `Answer`, [`ABSTAIN_TEXT`] on `Abstain`.
    pub response_text: String,
    pub generated_text: String,
    pub audits: Vec<AuditRecord<S>>,
    pub abstain_reason: Option<AbstainReason>,
}

impl<S> LicensingDecision<S> {
    pub fn answered(&self) -> bool {
        self.verdict == Verdict::Answer
    }

    /// Whether any audited claim carries a constraint violation.
    pub fn has_violation(&self) -> bool {
        self.audits.iter().any(|a| !a.violations.is_empty())
    }

    /// `Some(true)` when there is at least one claim and all are entailed.
    pub fn claims_entailed(&self) -> Option<bool> {
        if self.audits.is_empty() {
            None
        } else {
            Some(self.audits.iter().all(AuditRecord::entailed))
        }
    }
}

pub fn audit_claim<S: Scalar>(graph: &Graph<S>, constraints: &ConstraintSet<S>, claim: Claim<S>) -> AuditRecord<S> {
    AuditRecord {
        supporting_triple: graph.find_entailing(&claim.triple).cloned(),
        violations: validate_claim(&claim.triple, graph, constraints),
        claim,
    }
}

/// Missing evidence outranks constraint violations; an empty audit list is
/// governed by `abstain_on_no_claims`.
pub fn decide<S>(audits: &[AuditRecord<S>], abstain_on_no_claims: bool) -> Option<AbstainReason> {
    if audits.is_empty() {
        return abstain_on_no_claims.then_some(AbstainReason::NoClaimsPolicy);
    }
    if audits.iter().any(|a| !a.entailed()) {
        Some(AbstainReason::NoEvidence)
    } else if audits.iter().any(|a| !a.violations.is_empty()) {
        Some(AbstainReason::ConstraintViolation)
    } else {
        None
    }
}

pub struct Oracle<'a, S> {
    graph: &'a Graph<S>,
    constraints: &'a ConstraintSet<S>,
    lexicon: &'a Lexicon,
    extractor: Box<dyn ClaimExtractor<S> + 'a>,
    config: OracleConfig,
}

impl<'a, S: Scalar> Oracle<'a, S> {
    /// A gate using the rule-based extractor over `lexicon` and `rules`.
    pub fn new(
        graph: &'a Graph<S>,
        constraints: &'a ConstraintSet<S>,
        lexicon: &'a Lexicon,
        rules: &'a [PredicateRule<S>],
    ) -> Self {
        Self::with_extractor(graph, constraints, lexicon, Box::new(RuleExtractor { lexicon, rules }))
    }

    pub fn with_extractor(
        graph: &'a Graph<S>,
        constraints: &'a ConstraintSet<S>,
        lexicon: &'a Lexicon,
        extractor: Box<dyn ClaimExtractor<S> + 'a>,
    ) -> Self {
        Self {
            graph,
            constraints,
            lexicon,
            extractor,
            config: OracleConfig::default(),
        }
    }

    pub fn config(mut self, config: OracleConfig) -> Self {
        self.config = config;
        self
    }

    pub fn graph(&self) -> &Graph<S> {
        self.graph
    }

    pub fn seeds(&self, question: &str) -> BTreeSet<Iri> {
        link_question_entities(question, self.lexicon)
    }

    pub fn context_graph(&self, question: &str) -> Graph<S> {
        retrieve_subgraph(self.graph, &self.seeds(question), self.config.max_hops)
    }

    /// Retrieved subgraph serialized as N-Triples.
    pub fn context(&self, question: &str) -> String {
        self.context_graph(question).to_ntriples()
    }

    pub fn extract(&self, text: &str) -> Vec<Claim<S>> {
        self.extractor.extract(text)
    }

    /// Audits claims against the full graph, not the retrieved context.
    pub fn audit(&self, claim: Claim<S>) -> AuditRecord<S> {
        audit_claim(self.graph, self.constraints, claim)
    }

    /// Gates an already generated text.
    pub fn license(&self, generated_text: String) -> LicensingDecision<S> {
        let audits: Vec<_> = self.extract(&generated_text).into_iter().map(|c| self.audit(c)).collect();
        let abstain_reason = decide(&audits, self.config.abstain_on_no_claims);
        let (verdict, response_text) = match abstain_reason {
            None => (Verdict::Answer, generated_text.clone()),
            Some(_) => (Verdict::Abstain, ABSTAIN_TEXT.to_string()),
        };
        LicensingDecision {
            verdict,
            response_text,
            generated_text,
            audits,
            abstain_reason,
        }
    }

    pub fn run(&self, question: &str, generator: &dyn Generator) -> Result<LicensingDecision<S>, GeneratorError> {
        let generated = generator.generate(question, &self.context(question))?;
        Ok(self.license(generated))
    }
}

/// Per-claim entry of a provenance record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimProvenance {
    pub triple: String,
    pub rule_id: String,
    pub span: (usize, usize),
    pub entailed: bool,
    pub supporting_triple: Option<String>,
    pub violations: Vec<String>,
}

/// One JSON line per gated question.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceRecord {
    pub question: String,
    pub verdict: Verdict,
    pub abstain_reason: Option<AbstainReason>,
    pub response_text: String,
    pub generated_text: String,
    pub claims: Vec<ClaimProvenance>,
}

impl ProvenanceRecord {
    pub fn new<S: Scalar>(question: &str, decision: &LicensingDecision<S>) -> Self {
        Self {
            question: question.to_string(),
            verdict: decision.verdict,
            abstain_reason: decision.abstain_reason,
            response_text: decision.response_text.clone(),
            generated_text: decision.generated_text.clone(),
            claims: decision
                .audits
                .iter()
                .map(|a| ClaimProvenance {
                    triple: a.claim.triple.to_string(),
                    rule_id: a.claim.rule_id.clone(),
                    span: a.claim.span,
                    entailed: a.entailed(),
                    supporting_triple: a.supporting_triple.as_ref().map(ToString::to_string),
                    violations: a.violations.iter().map(|v| v.constraint_id.clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("provenance records always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::parse_manifest;
    use crate::extract::{build_lexicon, parse_rules};
    use crate::generator::{MockBehavior, MockGenerator};
    use crate::kg::parse_ntriples;
    use crate::scalar::Exact;

    const GRAPH: &str = r#"
<River_Colorado> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <River> .
<River_Colorado> <http://www.w3.org/2000/01/rdf-schema#label> "Colorado River" .
<River_Colorado> <length> "2334000.0"^^<http://www.w3.org/2001/XMLSchema#decimal> .
<River_Colorado> <sourceElevation> "2743.0" .
<River_Colorado> <mouthElevation> "0.0" .
<River_Gila> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <River> .
<River_Gila> <http://www.w3.org/2000/01/rdf-schema#label> "Gila River" .
<Lake_Mead> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <Lake> .
<Lake_Mead> <http://www.w3.org/2000/01/rdf-schema#label> "Lake Mead" .
"#;

    const MANIFEST: &str = "\
C1 class_of_object predicate=<hasTributary> class=<River>
C2 min_exclusive class=<River> property=<sourceElevation> bound=0
C6 less_than_property class=<River> lesser=<mouthElevation> greater=<sourceElevation>
";

    const RULES: &str = "\
len \"SUBJ is OBJ km long\" predicate=<length> kind=numeric scale=1000
src \"SUBJ has a source elevation of OBJ m\" predicate=<sourceElevation> kind=numeric
trib \"SUBJ has tributary OBJ\" predicate=<hasTributary> kind=entity
";

    struct Fixture {
        graph: Graph<Exact>,
        constraints: ConstraintSet<Exact>,
        lexicon: Lexicon,
        rules: Vec<PredicateRule<Exact>>,
    }

    fn fixture() -> Fixture {
        let graph = parse_ntriples(GRAPH).unwrap();
        let lexicon = build_lexicon(&graph, &[Iri::rdfs_label()]).unwrap();
        Fixture {
            constraints: parse_manifest(MANIFEST).unwrap(),
            rules: parse_rules(RULES).unwrap(),
            lexicon,
            graph,
        }
    }

    fn gate(f: &Fixture) -> Oracle<'_, Exact> {
        Oracle::new(&f.graph, &f.constraints, &f.lexicon, &f.rules)
    }

    #[test]
    fn entailed_claim_is_answered() {
        let f = fixture();
        let d = gate(&f).license("Colorado River is 2334 km long".into());
        assert_eq!(d.verdict, Verdict::Answer);
        assert_eq!(d.response_text, "Colorado River is 2334 km long");
        assert_eq!(d.abstain_reason, None);
        assert!(d.audits[0].licensed());
        assert_eq!(
            d.audits[0].supporting_triple.as_ref().unwrap().to_string(),
            "<River_Colorado> <length> \"2334000.0\" ."
        );
    }

    #[test]
    fn unsupported_claim_abstains_with_no_evidence() {
        let f = fixture();
        let d = gate(&f).license("Colorado River is 4668 km long".into());
        assert_eq!(d.verdict, Verdict::Abstain);
        assert_eq!(d.response_text, ABSTAIN_TEXT);
        assert_eq!(d.abstain_reason, Some(AbstainReason::NoEvidence));
        assert_eq!(d.generated_text, "Colorado River is 4668 km long");
    }

    #[test]
    fn no_evidence_outranks_violation() {
        let f = fixture();
        // not in the graph and breaks C1
        let d = gate(&f).license("Colorado River has tributary Lake Mead".into());
        assert!(!d.audits[0].entailed());
        assert_eq!(d.audits[0].violations[0].constraint_id, "C1");
        assert_eq!(d.abstain_reason, Some(AbstainReason::NoEvidence));
    }

    #[test]
    fn entailed_but_violating_claim() {
        let f = fixture();
        let graph = f.graph.with_triples(parse_ntriples::<Exact>("<River_Colorado> <hasTributary> <Lake_Mead> .").unwrap().iter().cloned());
        let d = Oracle::new(&graph, &f.constraints, &f.lexicon, &f.rules).license("Colorado River has tributary Lake Mead".into());
        assert!(d.audits[0].entailed());
        assert_eq!(d.abstain_reason, Some(AbstainReason::ConstraintViolation));
    }

    #[test]
    fn one_bad_claim_blocks_the_response() {
        let f = fixture();
        let d = gate(&f).license("Colorado River is 2334 km long and Colorado River has a source elevation of 9 m".into());
        assert_eq!(d.audits.len(), 2);
        assert_eq!(d.verdict, Verdict::Abstain);
        assert_eq!(d.claims_entailed(), Some(false));
    }

    #[test]
    fn empty_claims_policy() {
        let f = fixture();
        let strict = gate(&f).license("Rivers are wet.".into());
        assert_eq!(strict.abstain_reason, Some(AbstainReason::NoClaimsPolicy));
        assert_eq!(strict.claims_entailed(), None);
        let lenient = gate(&f)
            .config(OracleConfig {
                abstain_on_no_claims: false,
                ..OracleConfig::default()
            })
            .license("Rivers are wet.".into());
        assert_eq!(lenient.verdict, Verdict::Answer);
    }

    #[test]
    fn run_feeds_retrieved_context_to_generator() {
        let f = fixture();
        let g = gate(&f);
        let ctx = g.context("How long is the Colorado River?");
        assert!(ctx.contains("<River_Colorado> <length>"));
        assert!(!ctx.contains("Lake_Mead"));
        let echo = MockGenerator::new(MockBehavior::echo()).with_rules(f.rules.clone());
        let d = g.run("How long is the Colorado River?", &echo).unwrap();
        assert_eq!(d.response_text, "Colorado River is 2334 km long");
    }

    #[test]
    fn generator_errors_propagate() {
        let f = fixture();
        let failing = |_: &str, _: &str| Err(GeneratorError::Timeout("slow".into()));
        assert!(gate(&f).run("How long is the Colorado River?", &failing).is_err());
    }

    #[test]
    fn provenance_json() {
        let f = fixture();
        let d = gate(&f).license("Colorado River is 2334 km long".into());
        let line = ProvenanceRecord::new("How long?", &d).to_json_line();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["verdict"], "ANSWER");
        assert_eq!(v["abstain_reason"], serde_json::Value::Null);
        assert_eq!(v["claims"][0]["rule_id"], "len");
        assert_eq!(v["claims"][0]["span"], serde_json::json!([0, 30]));
        assert_eq!(v["claims"][0]["entailed"], true);
        let back: ProvenanceRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, ProvenanceRecord::new("How long?", &d));
    }
}
