//! Formula syntax: AST, concrete grammar, printing and vocabulary utilities.

mod enumerate;
mod formula;
mod parser;
mod printer;

pub use enumerate::{core_formulas_of_size, CoreSignature};
pub use formula::{agent, project_boxed, project_stit, Agent, Formula, Vocabulary};
pub use parser::{parse, ParseError};
