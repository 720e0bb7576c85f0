//! Logic-program language: syntax tree, parser, printer and unification.
//!
//! ```text
//! clause  := atom (":-" literal ("," literal)*)? "."
//! literal := ["not "] atom
//! atom    := name ["(" term ("," term)* ")"]
//! term    := name | 'quoted' | integer | Variable | _
//! ```
//! `%` starts a line comment.

mod error;
mod lexer;
pub mod parser;
mod print;
mod term;
mod unify;

pub use error::{Location, ParseError};
pub use parser::{parse_atom, parse_clauses, parse_fact, parse_program, parse_query};
pub use print::{format_conjunction, format_program, is_plain_name};
pub use term::{apply_substitution, sym, Atom, Literal, PredKey, Program, Rule, Substitution, Symbol, Term};
pub use unify::{unify, unify_terms};
