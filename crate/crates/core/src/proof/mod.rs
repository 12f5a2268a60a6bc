//! The Hilbert system: classical tautologies, S5 (K, T, 5) for `[]` and
//! each `[j]`, `[]A -> [j]A`, independence of agents, modus ponens and
//! necessitation.

mod builder;
mod derive;
mod script;
pub mod taut;

use thiserror::Error;

pub use builder::ProofBuilder;
pub use derive::{
    derive_counterexample, derive_s_counterexample, derive_technical2, derive_technical3,
    settled_to_stit_settled, technical2_goal, technical3_goal,
};
pub use script::{
    check_proof, match_axiom, Instantiation, Justification, MatchError, Modality, ProofLine,
    ProofScript, ProofViolation, SchemeId, ScriptSyntaxError,
};

use crate::syntax::Agent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("agents must be pairwise different, but {0} repeats")]
    DuplicateAgent(Agent),
    #[error("variables must be pairwise different, but {0} repeats")]
    DuplicateVariable(String),
    #[error("premise script rejected: {0}")]
    Premise(ProofViolation),
    #[error("premise proves {found}, expected {expected}")]
    PremiseMismatch { expected: String, found: String },
    #[error("{0}")]
    Builder(String),
}
