//! Syntax of guarded first-order formulas: abstract syntax, parser,
//! printer, fragment classification and the modal standard translation.

mod ast;
mod classify;
mod modal;
mod parser;
mod print;

pub use ast::{var, Atom, Formula, Guarded, RelationSymbol, Var, Vocabulary, VocabularyError};
pub use classify::{classify, is_one_dimensional, is_relative_atom, is_uniform, FragmentReport, Violation};
pub use modal::{modal_translation, ModalFormula};
pub use parser::{parse, parse_lenient, ParseError, Pos};
pub use print::print;
