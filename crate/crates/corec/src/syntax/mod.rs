//! Surface syntax: lexer, parser, pretty-printer, and name resolution.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod resolve;

pub use ast::{Command, Decl, FunDecl, SExpr, SExprKind, SourceFile};
pub use parser::{parse_expr_str, parse_file};
pub use pretty::{pretty_decl, pretty_expr, pretty_file};
