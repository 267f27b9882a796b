//! Knowledge-graph licensing gate.
//!
//! Claims extracted from generated text are checked for entailment against
//! an RDF graph and for conformance with a declarative constraint set; a
//! response is emitted only when every claim is licensed, otherwise the gate
//! abstains with `"I don't know"`.
//!
//! Everything numeric is generic over [`Scalar`]. The aliases below fix the
//! scalar to [`Exact`] rationals, which is what the command-line tool uses.

pub mod constraints;
pub mod eval;
pub mod extract;
pub mod generator;
pub mod kg;
pub mod oracle;
pub mod scalar;

pub use scalar::{Exact, Scalar};

pub type Graph = kg::Graph<Exact>;
pub type Triple = kg::Triple<Exact>;
pub type Term = kg::Term<Exact>;
pub type Literal = kg::Literal<Exact>;
pub type ConstraintSet = constraints::ConstraintSet<Exact>;
pub type Violation = constraints::Violation<Exact>;
pub type PredicateRule = extract::PredicateRule<Exact>;
pub type Claim = extract::Claim<Exact>;
pub type MockGenerator = generator::MockGenerator<Exact>;
pub type LicensingDecision = oracle::LicensingDecision<Exact>;
pub type Oracle<'a> = oracle::Oracle<'a, Exact>;
pub type QAItem = eval::QAItem<Exact>;

pub type GraphF64 = kg::Graph<f64>;
pub type GraphF32 = kg::Graph<f32>;
pub type OracleF64<'a> = oracle::Oracle<'a, f64>;
