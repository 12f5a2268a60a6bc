//! Multi-agent Chellas stit logic.
//!
//! * [`syntax`]: formulas, parser, printer, vocabulary
//! * [`proof`]: Hilbert proof scripts and scripted derivations
//! * [`semantics`]: finite stit models, constraint validation, model checking
//! * [`frames`]: single-moment choice frames and bounded satisfiability search
//! * [`bisim`]: bisimulations between pointed models
//! * [`paperlab`]: the concrete witness models, certificates and bounded
//!   interpolant search
//! * [`random`]: seeded generators for formulas and models

pub mod bisim;
pub mod frames;
pub mod paperlab;
pub mod proof;
pub mod random;
pub mod semantics;
pub mod syntax;

pub use syntax::{agent, parse, Agent, Formula, Vocabulary};
