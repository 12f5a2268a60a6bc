//! The concrete witness models for the failure of restricted interpolation,
//! certificates that re-check every supporting fact, and bounded searches
//! for interpolants and separating formulas.

mod certificate;
mod interpolate;
mod models;

use thiserror::Error;

pub use certificate::{
    certify_negative, certify_negative_with, certify_strong_negative,
    certify_strong_negative_with, Certificate, Fact, FactVerdict, NegativeSetup, StrongSetup,
    NEGATIVE_CLAIM, STRONG_NEGATIVE_CLAIM,
};
pub use interpolate::{
    interpolant_search, is_separable_bounded, InterpolationMode, SearchBounds, SearchOutcome,
    Witness,
};
pub use models::{
    antecedent, build_b, build_m, build_s, build_s_prime, consequent, q_in_s, q_in_s_prime,
    reduct, strong_antecedent, strong_consequent, FourTuple, M_H0, M_H1, M_ROOT, ROOT_S,
    ROOT_S_PRIME,
};

use crate::frames::SearchError;
use crate::syntax::Agent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaperlabError {
    #[error("variable {0} does not occur in the model's valuation")]
    UnknownVariable(String),
    #[error("the two sides share agents {0:?}")]
    SharedAgents(Vec<Agent>),
    #[error("{formula} is not valid up to the frame bound: countermodel at {history}: {frame}")]
    NotValid {
        formula: String,
        history: String,
        frame: String,
    },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("re-verification failed: {0}")]
    Reverification(String),
}
