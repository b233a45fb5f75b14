//! Running program text: definitions are added to the engine, everything
//! else is evaluated in order.

use crate::desugar::expand_spanned;
use crate::error::EvalError;
use crate::expr::{names, Expr};
use crate::parser::{parse_program_spanned, Position};
use crate::rewriter::{Engine, EvalConfig, Evaluator, Rhs, Session, TraceStep};

/// One evaluated (non-definition) statement.
#[derive(Clone, Debug)]
pub struct Evaluated {
    pub position: Position,
    pub input: Expr,
    pub value: Expr,
    pub trace: Vec<TraceStep>,
}

/// Evaluates the arguments of every application level of a definition's
/// left side, so `f[x : pattern[m]]` is stored with `pattern[m]` resolved.
fn resolve_lhs(ev: &mut dyn Evaluator, lhs: &Expr) -> Result<Expr, EvalError> {
    let Expr::Compound(c) = lhs else {
        return Ok(lhs.clone());
    };
    let head = resolve_lhs(ev, &c.head)?;
    let args = c
        .args
        .iter()
        .map(|a| ev.eval(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Expr::compound(head, args))
}

impl Engine {
    /// Adds `lhs := rhs` (or `lhs = rhs`, which is treated the same way).
    pub fn define_statement(&mut self, stmt: &Expr, cfg: &EvalConfig) -> Result<(), EvalError> {
        let Some([lhs, rhs]) = stmt
            .args_of(names::SET_DELAYED)
            .or_else(|| stmt.args_of(names::SET))
        else {
            return Err(EvalError::Native(format!("`{stmt}` is not a definition")));
        };
        let lhs = resolve_lhs(&mut Session::new(self, cfg), lhs)?;
        self.define(lhs, Rhs::Template(rhs.clone()))?;
        Ok(())
    }

    /// Loads program text, stopping at the first error.
    pub fn run(&mut self, src: &str, cfg: &EvalConfig) -> Result<Vec<Evaluated>, EvalError> {
        let mut out = Vec::new();
        self.run_each(src, cfg, |e| out.push(e))?;
        Ok(out)
    }

    /// [`Engine::run`], handing each result to `on_result` as soon as it is
    /// available.
    pub fn run_each(
        &mut self,
        src: &str,
        cfg: &EvalConfig,
        mut on_result: impl FnMut(Evaluated),
    ) -> Result<(), EvalError> {
        let program = expand_spanned(&parse_program_spanned(src)?)?;
        for (stmt, position) in program {
            if stmt.has_head(names::SET_DELAYED) || stmt.has_head(names::SET) {
                self.define_statement(&stmt, cfg)?;
                continue;
            }
            let (value, trace) = self.evaluate_traced(&stmt, cfg);
            on_result(Evaluated {
                position,
                input: stmt,
                value: value?,
                trace,
            });
        }
        Ok(())
    }

    /// [`Engine::run`] with the default configuration.
    pub fn load(&mut self, src: &str) -> Result<Vec<Expr>, EvalError> {
        Ok(self
            .run(src, &EvalConfig::default())?
            .into_iter()
            .map(|e| e.value)
            .collect())
    }
}
