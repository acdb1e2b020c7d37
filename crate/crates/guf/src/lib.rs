//! Uniform guarded fragments of first-order logic.
//!
//! This crate implements the syntactic fragments around the guarded
//! fragment obtained by uniformity and one-dimensionality restrictions,
//! together with the semantic toolbox used to study them at desk scale:
//!
//! - [`syntax`]: formulas, parsing and printing, fragment classification,
//!   and the standard translation of polyadic modal logic;
//! - [`structures`]: finite relational structures, 1-types and k-tables,
//!   live sets, a model checker, structure enumeration and a bounded
//!   satisfiability oracle;
//! - [`bisim`]: uniform guarded bisimulations, bisimilarity checking,
//!   bounded logical equivalence and distinguishing formulas;
//! - [`amalgam`]: the amalgam of two bisimilar structures over overlapping
//!   vocabularies, with runtime checkers for its projection properties;
//! - [`normform`]: the normal form for uniform guarded sentences and the
//!   branching transformation into it;
//! - [`sat`]: witness-based satisfiability with certificates, witness
//!   search, model construction and witness shrinking;
//! - [`cli`]: the command-line front end.

pub mod amalgam;
pub mod bisim;
pub mod cli;
pub mod gen;
pub mod normform;
pub mod sat;
pub mod structures;
pub mod syntax;
