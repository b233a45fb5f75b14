//! A small term-rewriting engine with pattern-typed monads and `do`
//! notation.

mod builtins;
pub mod desugar;
pub mod error;
pub mod expr;
pub mod laws;
pub mod matcher;
pub mod monad;
pub mod parser;
pub mod print;
pub mod program;
pub mod rewriter;
pub mod stdlib;

pub use desugar::{desugar, desugar_expr, expand, DesugarError, DoBlock, Statement};
pub use error::EvalError;
pub use expr::{fresh_symbol, substitute, Bindings, Capture, Expr, Symbol};
pub use laws::{check_laws, generator_for, Law, LawGen, LawReport};
pub use matcher::{match_all, match_expr, matches, MatchError, MatchResult};
pub use monad::{MonadDef, MonadTypeError, Site};
pub use parser::{parse, parse_program, ParseError, Position};
pub use print::{print, print_pretty};
pub use program::Evaluated;
pub use rewriter::{format_trace, Engine, EvalConfig, Evaluator, Rhs, RuleId, Session, TraceStep};
