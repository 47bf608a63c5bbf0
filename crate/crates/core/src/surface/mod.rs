//! The `.tel` surface language: lexing, parsing and elaboration.

pub mod ast;
pub mod elab;
pub mod lexer;
pub mod parser;

pub use ast::{Binder, Decl, DeclKind, Expr, ExprKind, ParseError, Span};
pub use elab::{elaborate, Diagnostic, Elaborated, Resolver, Verdict};
pub use lexer::{tokenize, Tok, Token};
pub use parser::{parse_expr, parse_file};
