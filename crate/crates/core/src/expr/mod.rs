//! Smooth maps `R^n → R^m` as expression graphs, and their text syntax.

mod graph;
mod parse;

pub use graph::{Binary, Domain, ExprGraph, GraphBuilder, GraphError, Node, Unary};
pub use parse::{parse_expr, parse_exprs, parse_inequality, ParseError};
