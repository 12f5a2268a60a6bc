//! Finite stit models: loading, history computation, constraint validation
//! and the satisfaction relation.

mod eval;
mod model;
mod validate;

pub use eval::{extension, refuting_pair, satisfies, satisfies_named, valid_in_model};
pub use model::{History, HistoryId, ModelError, ModelSpec, MomentId, StitModel};
pub use validate::{undivided, validate, Violation};
