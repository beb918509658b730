//! Java source parsing into a normalized entity tree.
//!
//! The tree is deliberately shallow: classes, methods, fields and the
//! statement structure of method bodies, plus the declaration parts
//! (annotations, modifiers, return type, parameters) that the change
//! distiller compares. Expressions, generics and lambdas are kept as
//! opaque token text inside their enclosing statement.

mod entity;
mod lexer;
mod parser;

pub use entity::{EntityKind, EntityNode, StatementKind};
pub use lexer::Token;
pub use parser::{parse_compilation_unit, ParseError};
