//! Abstract syntax, concrete parser, name resolution and canonical printing.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod resolve;
pub mod span;

pub use ast::*;
pub use parser::{parse_command, parse_expr};
pub use pretty::{pretty_command, pretty_expr, pretty_program};
pub use resolve::parse_program;
pub use span::{LineCol, SourceFile, Span};
