use thiserror::Error;

/// Errors raised by scenario, model, procedure and hom-scenario operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate measurement id `{0}`")]
    DuplicateMeasurementId(String),
    #[error("measurement id must be non-empty")]
    EmptyMeasurementId,
    #[error("measurement `{0}` has an empty outcome set")]
    EmptyOutcomeSet(String),
    #[error("measurement `{measurement}` declares outcome `{outcome}` twice")]
    DuplicateOutcome { measurement: String, outcome: String },
    #[error("context mentions unknown measurement `{0}`")]
    UnknownMeasurementInContext(String),
    #[error("measurement `{0}` lies in no maximal context")]
    UncoveredMeasurement(String),
    #[error("unknown measurement `{0}`")]
    UnknownMeasurement(String),
    #[error("unknown outcome `{outcome}` for measurement `{measurement}`")]
    UnknownOutcome { measurement: String, outcome: String },
    #[error("{{{0}}} is not a measurement context")]
    NotAContext(String),
    #[error("restriction target is not a subset of the assignment domain")]
    NotSubdomain,
    #[error("assignment is not global (domain {0:?})")]
    NotGlobal(Vec<String>),
    #[error("invalid arity {0}; a dice scenario needs at least one outcome")]
    InvalidArity(usize),

    #[error("distribution on {{{0}}} does not sum to 1")]
    NotNormalized(String),
    #[error("negative weight on context {{{0}}}")]
    NegativeWeight(String),
    #[error("no distribution given for maximal context {{{0}}}")]
    MissingFacet(String),
    #[error("distribution given for {{{0}}}, which is not a maximal context")]
    UnexpectedContext(String),
    #[error("marginals of {{{first}}} and {{{second}}} disagree on {{{overlap}}}")]
    IncompatibleMarginals {
        first: String,
        second: String,
        overlap: String,
    },
    #[error("support on {{{0}}} is empty")]
    EmptySupport(String),
    #[error("scenarios do not match")]
    ScenarioMismatch,

    #[error("procedure is not simplicial: facet {{{facet}}} is sent to {{{image}}}")]
    NotSimplicial { facet: String, image: String },
    #[error("outcome table for `{0}` is incomplete")]
    IncompleteTable(String),
    #[error("outcome table for `{0}` leaves the outcome set")]
    CodomainViolation(String),
    #[error("mixture must be non-empty")]
    EmptyMixture,
    #[error("mixture weights must be strictly positive")]
    NonPositiveWeight,

    #[error("measurement `{0}` is not dichotomic with outcomes 0/1")]
    NotDichotomic(String),
    #[error("structure predicate is unsatisfiable")]
    UnsatisfiablePredicate,

    #[error("realizability query is incomplete: {0}")]
    IncompleteQuery(String),

    #[error("malformed linear system: {0}")]
    MalformedSystem(String),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
