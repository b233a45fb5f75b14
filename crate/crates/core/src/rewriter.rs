//! Guarded rewriting to normal form.
//!
//! Definitions are keyed by the root symbol of their left-hand side and
//! tried in registration order; the first whose pattern matches fires. An
//! application no definition matches is a normal form and stays symbolic,
//! which is what lets recursive definitions over not-yet-known values wait
//! until their arguments become concrete.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::error::EvalError;
use crate::expr::{
    fresh_symbol, function_params, names, substitute, Bindings, Capture, Expr, Symbol,
};
use crate::matcher::{match_expr_cached, matches_cached, MatchCache};
use crate::monad::Registry;
use crate::print::print;

/// Host implementation of a right-hand side. Returning `Ok(None)` declines,
/// and the next matching definition is tried.
pub type NativeFn =
    Arc<dyn Fn(&Bindings, &mut dyn Evaluator) -> Result<Option<Expr>, EvalError> + Send + Sync>;

#[derive(Clone)]
pub enum Rhs {
    Template(Expr),
    Native(NativeFn),
}

impl Rhs {
    pub fn native<F>(f: F) -> Rhs
    where
        F: Fn(&Bindings, &mut dyn Evaluator) -> Result<Option<Expr>, EvalError>
            + Send
            + Sync
            + 'static,
    {
        Rhs::Native(Arc::new(f))
    }
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Template(e) => write!(f, "Template({e})"),
            Rhs::Native(_) => f.write_str("Native"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DefId(pub usize);

#[derive(Clone, Debug)]
pub struct Definition {
    pub id: DefId,
    pub head: Symbol,
    pub lhs: Expr,
    pub rhs: Rhs,
}

/// Which rule performed a rewrite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleId {
    Def {
        head: Symbol,
        id: DefId,
    },
    /// Application of a `Function` value.
    Beta,
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleId::Def { head, id } => write!(f, "{head}/{}", id.0),
            RuleId::Beta => f.write_str("Function"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceStep {
    pub rule: RuleId,
    pub before: Expr,
    pub after: Expr,
}

/// Formats steps as `#<index> <rule-id>: <before> ==> <after>`, one per line.
pub fn format_trace(steps: &[TraceStep]) -> String {
    format_trace_from(steps, 1)
}

fn format_trace_from(steps: &[TraceStep], first: usize) -> String {
    let mut out = String::new();
    for (i, s) in steps.iter().enumerate() {
        out.push_str(&format!(
            "#{} {}: {} ==> {}\n",
            first + i,
            s.rule,
            print(&s.before),
            print(&s.after)
        ));
    }
    out
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    /// Maximum number of rewrites per evaluation.
    pub budget: u64,
    pub trace: bool,
    /// Compounds whose head (or curried head chain) bottoms out in one of
    /// these symbols keep their arguments unevaluated.
    pub hold_heads: BTreeSet<Symbol>,
    /// Maximum nesting of evaluation; turns runaway recursion into an error
    /// instead of a stack overflow.
    pub max_depth: usize,
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;
pub const DEFAULT_MAX_DEPTH: usize = 2_000;

impl Default for EvalConfig {
    fn default() -> Self {
        let hold_heads = [
            "do",
            names::FUNCTION,
            "With",
            names::SET,
            names::SET_DELAYED,
        ]
        .into_iter()
        .map(Symbol::new)
        .collect();
        EvalConfig {
            budget: DEFAULT_BUDGET,
            trace: false,
            hold_heads,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

impl EvalConfig {
    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget.max(1);
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }
}

/// Something that can evaluate expressions against an [`Engine`]. Native
/// definitions receive one so they can call back into evaluation.
pub trait Evaluator {
    fn engine(&self) -> &Engine;

    fn eval(&mut self, e: &Expr) -> Result<Expr, EvalError>;

    fn apply(&mut self, f: &Expr, args: Vec<Expr>) -> Result<Expr, EvalError> {
        self.eval(&f.apply(args))
    }

    /// Pattern test, possibly memoised.
    fn matches(&mut self, p: &Expr, e: &Expr) -> bool {
        crate::matcher::matches(p, e)
    }
}

/// Definition store plus monad registry.
///
/// Built up with `&mut self` while a program loads; evaluation only needs
/// `&self`, so a loaded engine can be shared across threads.
#[derive(Default)]
pub struct Engine {
    defs: FxHashMap<Symbol, Vec<Definition>>,
    next_id: usize,
    pub(crate) monads: Registry,
    /// Structurally equal pattern parts share one node.
    interned: FxHashMap<Expr, Expr>,
}

fn is_pattern_construct(s: &Symbol) -> bool {
    matches!(
        s.name(),
        names::PATTERN
            | names::BLANK
            | names::BLANK_SEQUENCE
            | names::BLANK_NULL_SEQUENCE
            | names::REPEATED_NULL
            | names::EXCEPT
    )
}

/// Symbol a definition with this left-hand side is filed under.
pub fn lhs_head(lhs: &Expr) -> Result<Symbol, EvalError> {
    let malformed = |reason| EvalError::MalformedLhs {
        lhs: print(lhs),
        reason,
    };
    let mut cur = lhs;
    loop {
        match cur {
            Expr::Symbol(s) => return Ok(s.clone()),
            Expr::Compound(c) => {
                if let Expr::Symbol(s) = &c.head {
                    if is_pattern_construct(s) {
                        return Err(malformed("a pattern cannot be the head of a definition"));
                    }
                }
                cur = &c.head;
            }
            _ => return Err(malformed("no head symbol")),
        }
    }
}

/// Renames every `Function` parameter to a fresh symbol so that
/// substituting rule captures into the body can never capture a name.
pub(crate) fn rename_binders(e: &Expr) -> Expr {
    let Expr::Compound(c) = e else {
        return e.clone();
    };
    if c.head.is_symbol(names::FUNCTION) && c.args.len() == 2 {
        if let Some(params) = function_params(&c.args[0]) {
            let mut b = Bindings::new();
            let renamed: Vec<Expr> = params
                .iter()
                .map(|p| {
                    let fresh = fresh_symbol(p.name());
                    b.bind(p.clone(), Capture::One(fresh.clone()));
                    fresh
                })
                .collect();
            let param_expr = if c.args[0].is_list() {
                Expr::list(renamed)
            } else {
                renamed.into_iter().next().expect("one parameter")
            };
            let body = substitute(&rename_binders(&c.args[1]), &b);
            return Expr::function(param_expr, body);
        }
    }
    Expr::compound(
        rename_binders(&c.head),
        c.args.iter().map(rename_binders).collect(),
    )
}

impl Engine {
    /// An engine with no definitions at all.
    pub fn bare() -> Engine {
        Engine::default()
    }

    /// An engine with the built-in functions (`With`, `Part`, `Join`,
    /// list surgery, integer arithmetic, `MatchQ`) and the monad protocol
    /// (`chk`, `bnd`, `do`).
    pub fn new() -> Engine {
        let mut engine = Engine::bare();
        crate::builtins::install(&mut engine);
        crate::monad::install(&mut engine);
        engine
    }

    pub(crate) fn intern(&mut self, e: &Expr) -> Expr {
        let Expr::Compound(c) = e else {
            return e.clone();
        };
        let rebuilt = Expr::compound(
            self.intern(&c.head),
            c.args.iter().map(|a| self.intern(a)).collect(),
        );
        self.interned
            .entry(rebuilt.clone())
            .or_insert(rebuilt)
            .clone()
    }

    /// Adds a definition after all existing ones for the same head.
    pub fn define(&mut self, lhs: Expr, rhs: Rhs) -> Result<DefId, EvalError> {
        let head = lhs_head(&lhs)?;
        let lhs = self.intern(&lhs);
        let rhs = match rhs {
            Rhs::Template(t) => Rhs::Template(rename_binders(&t)),
            native => native,
        };
        let id = DefId(self.next_id);
        self.next_id += 1;
        self.defs
            .entry(head.clone())
            .or_default()
            .push(Definition { id, head, lhs, rhs });
        Ok(id)
    }

    /// Parses `lhs` and adds a native definition for it.
    pub fn define_native<F>(&mut self, lhs: &str, f: F) -> Result<DefId, EvalError>
    where
        F: Fn(&Bindings, &mut dyn Evaluator) -> Result<Option<Expr>, EvalError>
            + Send
            + Sync
            + 'static,
    {
        let lhs = crate::parser::parse(lhs)?;
        self.define(lhs, Rhs::native(f))
    }

    pub fn definitions(&self, head: &Symbol) -> &[Definition] {
        self.defs.get(head).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn definition_count(&self) -> usize {
        self.defs.values().map(Vec::len).sum()
    }

    /// Evaluates to normal form with the default configuration.
    pub fn eval(&self, e: &Expr) -> Result<Expr, EvalError> {
        self.evaluate(e, &EvalConfig::default())
    }

    pub fn evaluate(&self, e: &Expr, cfg: &EvalConfig) -> Result<Expr, EvalError> {
        self.evaluate_traced(e, cfg).0
    }

    /// Evaluates and also returns the recorded rewrite steps (empty unless
    /// `cfg.trace` is set).
    pub fn evaluate_traced(
        &self,
        e: &Expr,
        cfg: &EvalConfig,
    ) -> (Result<Expr, EvalError>, Vec<TraceStep>) {
        let mut session = Session::new(self, cfg);
        let result = session.eval(e);
        let steps = session.trace.take().unwrap_or_default();
        let result = match result {
            Err(err) if cfg.trace && !steps.is_empty() => {
                let shown = steps.len().min(20);
                let first = steps.len() - shown + 1;
                Err(EvalError::Traced {
                    source: Box::new(err),
                    shown,
                    total: steps.len(),
                    trace: format_trace_from(&steps[steps.len() - shown..], first),
                })
            }
            other => other,
        };
        (result, steps)
    }

    /// The exact rewrite sequence evaluation performs.
    pub fn trace(&self, e: &Expr, cfg: &EvalConfig) -> Result<Vec<TraceStep>, EvalError> {
        let cfg = cfg.clone().with_trace(true);
        let mut session = Session::new(self, &cfg);
        session.eval(e)?;
        Ok(session.trace.take().unwrap_or_default())
    }

    /// Rewrite count of evaluating `e`.
    pub fn count_steps(&self, e: &Expr, cfg: &EvalConfig) -> Result<u64, EvalError> {
        let mut session = Session::new(self, cfg);
        session.eval(e)?;
        Ok(session.steps)
    }
}

/// Mutable state of one evaluation: step count, nesting depth, trace.
pub struct Session<'a> {
    engine: &'a Engine,
    cfg: &'a EvalConfig,
    steps: u64,
    depth: usize,
    trace: Option<Vec<TraceStep>>,
    id: u64,
    cache: MatchCache,
}

static SESSIONS: AtomicU64 = AtomicU64::new(1);

enum Outcome {
    Normal(Expr),
    Rewritten(Expr),
}

/// Result of a `Function` application, if `e` is one that can fire.
pub(crate) fn beta(e: &Expr) -> Option<Expr> {
    let c = e.as_compound()?;
    let f = c.head.args_of(names::FUNCTION)?;
    let [params, body] = f else { return None };
    let params = function_params(params)?;
    if params.len() != c.args.len() {
        return None;
    }
    let mut b = Bindings::new();
    for (p, a) in params.into_iter().zip(&c.args) {
        b.bind(p, Capture::One(a.clone()));
    }
    Some(substitute(body, &b))
}

impl<'a> Session<'a> {
    pub fn new(engine: &'a Engine, cfg: &'a EvalConfig) -> Self {
        Session {
            engine,
            cfg,
            steps: 0,
            depth: 0,
            trace: cfg.trace.then(Vec::new),
            id: SESSIONS.fetch_add(1, Ordering::Relaxed),
            cache: MatchCache::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn record(&mut self, rule: RuleId, before: &Expr, after: &Expr) -> Result<(), EvalError> {
        self.steps += 1;
        if self.steps > self.cfg.budget {
            return Err(EvalError::BudgetExhausted {
                budget: self.cfg.budget,
            });
        }
        if let Some(t) = &mut self.trace {
            t.push(TraceStep {
                rule,
                before: before.clone(),
                after: after.clone(),
            });
        }
        Ok(())
    }

    fn holds(&self, head: &Expr) -> bool {
        match head {
            Expr::Symbol(s) => self.cfg.hold_heads.contains(s),
            Expr::Compound(c) if c.head.is_symbol(names::FUNCTION) => false,
            Expr::Compound(_) => head
                .root_symbol()
                .is_some_and(|s| self.cfg.hold_heads.contains(s)),
            _ => false,
        }
    }

    fn eval_args(&mut self, head: &Expr, args: &[Expr]) -> Result<Vec<Expr>, EvalError> {
        if self.holds(head) {
            return Ok(args.to_vec());
        }
        // the name of a named pattern is never evaluated
        let skip = usize::from(head.is_symbol(names::PATTERN));
        let mut out = Vec::with_capacity(args.len());
        for (i, a) in args.iter().enumerate() {
            out.push(if i < skip { a.clone() } else { self.eval(a)? });
        }
        Ok(out)
    }

    fn step(&mut self, e: &Expr) -> Result<Outcome, EvalError> {
        let current = match e {
            Expr::Integer(_) | Expr::String(_) => return Ok(Outcome::Normal(e.clone())),
            Expr::Symbol(_) => e.clone(),
            Expr::Compound(c) => {
                let head = self.eval(&c.head)?;
                let args = self.eval_args(&head, &c.args)?;
                let current = if head == c.head && args == c.args {
                    e.clone()
                } else {
                    Expr::compound(head, args)
                };
                if let Some(reduced) = beta(&current) {
                    self.record(RuleId::Beta, &current, &reduced)?;
                    return Ok(Outcome::Rewritten(reduced));
                }
                current
            }
        };
        let engine = self.engine;
        let Some(root) = current.root_symbol() else {
            return Ok(Outcome::Normal(current));
        };
        for def in engine.definitions(root) {
            let Some(bindings) = match_expr_cached(&def.lhs, &current, &self.cache) else {
                continue;
            };
            let out = match &def.rhs {
                Rhs::Template(t) => Some(substitute(t, &bindings)),
                Rhs::Native(f) => f(&bindings, self)?,
            };
            if let Some(out) = out {
                let rule = RuleId::Def {
                    head: def.head.clone(),
                    id: def.id,
                };
                self.record(rule, &current, &out)?;
                return Ok(Outcome::Rewritten(out));
            }
        }
        Ok(Outcome::Normal(current))
    }
}

impl Evaluator for Session<'_> {
    fn engine(&self) -> &Engine {
        self.engine
    }

    fn matches(&mut self, p: &Expr, e: &Expr) -> bool {
        matches_cached(p, e, &self.cache)
    }

    fn eval(&mut self, e: &Expr) -> Result<Expr, EvalError> {
        // the definitions cannot change during a session, so a node once
        // found in normal form stays there
        if let Expr::Compound(c) = e {
            if c.normal_in.load(Ordering::Relaxed) == self.id {
                return Ok(e.clone());
            }
        }
        self.depth += 1;
        if self.depth > self.cfg.max_depth {
            self.depth -= 1;
            return Err(EvalError::DepthExceeded {
                limit: self.cfg.max_depth,
            });
        }
        let result = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
            let mut current = e.clone();
            loop {
                match self.step(&current) {
                    Ok(Outcome::Normal(v)) => break Ok(v),
                    Ok(Outcome::Rewritten(next)) => current = next,
                    Err(err) => break Err(err),
                }
            }
        });
        self.depth -= 1;
        if let Ok(Expr::Compound(c)) = &result {
            c.normal_in.store(self.id, Ordering::Relaxed);
        }
        result
    }
}
