//! Desugaring of `do[m][statements...]` into checked binds.
//!
//! The block is reduced from the right, two statements at a time: the last
//! pair `y, r` becomes `chk[m][bnd[m][rhs(y), Function[v, r]]]`, where `v` is
//! the arrow variable of `y` or a fresh symbol when `y` is a plain
//! statement. When one statement is left it is wrapped in `chk[m]` once
//! more. The transformation is purely syntactic.

use std::fmt;

use crate::expr::{fresh_symbol, names, Expr, Symbol};
use crate::monad::{bnd_expr, chk_expr};
use crate::parser::Position;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub struct DesugarError {
    pub reason: String,
    pub position: Option<Position>,
}

impl fmt::Display for DesugarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some(pos) => write!(f, "{pos}: malformed do block: {}", self.reason),
            None => write!(f, "malformed do block: {}", self.reason),
        }
    }
}

fn malformed(reason: impl Into<String>) -> DesugarError {
    DesugarError {
        reason: reason.into(),
        position: None,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    /// `var <- rhs`
    Arrow(Symbol, Expr),
    Plain(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoBlock {
    pub monad: Symbol,
    pub statements: Vec<Statement>,
}

impl DoBlock {
    /// Reads `do[m][...]`. Returns `Ok(None)` for anything that is not a do
    /// block (including `do[m_][...]` patterns), and an error for a do block
    /// that breaks the statement rules.
    pub fn from_expr(e: &Expr) -> Result<Option<DoBlock>, DesugarError> {
        let Some(c) = e.as_compound() else {
            return Ok(None);
        };
        let Some([Expr::Symbol(m)]) = c.head.args_of("do") else {
            return Ok(None);
        };
        if c.args.is_empty() {
            return Err(malformed(format!("do[{m}] has no statements")));
        }
        let mut statements = Vec::with_capacity(c.args.len());
        for s in &c.args {
            statements.push(match s.args_of(names::LEFT_ARROW) {
                Some([Expr::Symbol(v), rhs]) => Statement::Arrow(v.clone(), rhs.clone()),
                Some(_) => {
                    return Err(malformed(format!(
                        "the left side of `{s}` must be a plain symbol"
                    )))
                }
                None => Statement::Plain(s.clone()),
            });
        }
        if let Some(Statement::Arrow(..)) = statements.last() {
            return Err(malformed(format!(
                "the last statement of do[{m}] must not be a `<-` binding"
            )));
        }
        Ok(Some(DoBlock {
            monad: m.clone(),
            statements,
        }))
    }
}

/// Nested `chk`/`bnd` form of a well-formed block.
pub fn desugar(block: &DoBlock) -> Expr {
    let m = &block.monad;
    let (last, init) = block
        .statements
        .split_last()
        .expect("a do block has at least one statement");
    let Statement::Plain(last) = last else {
        panic!("the last statement of a do block must be plain");
    };
    let mut acc = last.clone();
    for s in init.iter().rev() {
        let (var, rhs) = match s {
            Statement::Arrow(v, rhs) => (Expr::Symbol(v.clone()), rhs.clone()),
            Statement::Plain(e) => (fresh_symbol("do"), e.clone()),
        };
        acc = chk_expr(m, bnd_expr(m, rhs, Expr::function(var, acc)));
    }
    chk_expr(m, acc)
}

/// Desugars `e` if it is a do block; errors if it is a malformed one.
pub fn desugar_expr(e: &Expr) -> Result<Expr, DesugarError> {
    match DoBlock::from_expr(e)? {
        Some(block) => Ok(desugar(&block)),
        None => Err(malformed(format!("`{e}` is not a do[m][...] block"))),
    }
}

/// Replaces every do block in `e`, innermost first.
pub fn expand(e: &Expr) -> Result<Expr, DesugarError> {
    let Expr::Compound(c) = e else {
        return Ok(e.clone());
    };
    let head = expand(&c.head)?;
    let args = c.args.iter().map(expand).collect::<Result<Vec<_>, _>>()?;
    let rebuilt = Expr::compound(head, args);
    match DoBlock::from_expr(&rebuilt)? {
        Some(block) => Ok(desugar(&block)),
        None => Ok(rebuilt),
    }
}

/// [`expand`] over a whole program.
pub fn expand_in_place(program: &[Expr]) -> Result<Vec<Expr>, DesugarError> {
    program.iter().map(expand).collect()
}

/// [`expand_in_place`] for statements carrying source positions; errors
/// report the position of the statement containing the bad block.
pub fn expand_spanned(program: &[(Expr, Position)]) -> Result<Vec<(Expr, Position)>, DesugarError> {
    program
        .iter()
        .map(|(e, pos)| {
            expand(e).map(|x| (x, *pos)).map_err(|mut err| {
                err.position = Some(*pos);
                err
            })
        })
        .collect()
}
