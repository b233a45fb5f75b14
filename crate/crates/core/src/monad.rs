//! Pattern-typed monads.
//!
//! A monad `m` is three pieces: a type pattern (`pattern[m]`), `return[m]`
//! and `bind[m]`. The engine adds the checked operations around them:
//! `chk[m][v]` verifies that `v` matches the type pattern, and
//! `bnd[m][ma, f]` dispatches to `bind[m]` only when `ma` is an `m` value
//! and `f` is callable, checking the result on the way out.
//!
//! Monads can be registered from host code ([`MonadDef::native`]) or from
//! ordinary definitions of `pattern[m]`, `return[m]` and `bind[m]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;
use crate::expr::{Expr, Symbol};
use crate::print::print;
use crate::rewriter::{Engine, EvalConfig, Evaluator, Rhs, Session};

/// Where a type check failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Site {
    Return,
    BindInput,
    BindOutput,
    DoFinal,
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Site::Return => "return",
            Site::BindInput => "bind-input",
            Site::BindOutput => "bind-output",
            Site::DoFinal => "do-final",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("monad type error ({site}) in `{monad}`: `{value}` does not match `{expected}`")]
pub struct MonadTypeError {
    pub monad: String,
    pub value: String,
    pub expected: String,
    pub site: Site,
}

pub type ReturnImpl =
    Arc<dyn Fn(&mut dyn Evaluator, &Expr) -> Result<Expr, EvalError> + Send + Sync>;

/// `bind(ma, f)`; `Ok(None)` leaves `bind[m][ma, f]` unevaluated.
pub type BindImpl =
    Arc<dyn Fn(&mut dyn Evaluator, &Expr, &Expr) -> Result<Option<Expr>, EvalError> + Send + Sync>;

/// A monad to register with an [`Engine`].
#[derive(Clone)]
pub struct MonadDef {
    pub name: Symbol,
    /// A value is an `m` value if it matches any of these.
    pub type_patterns: Vec<Expr>,
    unit: Option<ReturnImpl>,
    bind: Option<BindImpl>,
}

impl MonadDef {
    /// A monad whose `return` and `bind` are host functions.
    pub fn native<R, B>(name: &str, type_patterns: Vec<Expr>, unit: R, bind: B) -> MonadDef
    where
        R: Fn(&mut dyn Evaluator, &Expr) -> Result<Expr, EvalError> + Send + Sync + 'static,
        B: Fn(&mut dyn Evaluator, &Expr, &Expr) -> Result<Option<Expr>, EvalError>
            + Send
            + Sync
            + 'static,
    {
        MonadDef {
            name: Symbol::new(name),
            type_patterns,
            unit: Some(Arc::new(unit)),
            bind: Some(Arc::new(bind)),
        }
    }

    /// A monad whose `return[m]` and `bind[m]` are ordinary definitions.
    pub fn from_rules(name: &str, type_patterns: Vec<Expr>) -> MonadDef {
        MonadDef {
            name: Symbol::new(name),
            type_patterns,
            unit: None,
            bind: None,
        }
    }
}

#[derive(Default)]
pub struct Registry {
    monads: BTreeMap<Symbol, Vec<Expr>>,
}

impl Registry {
    pub fn type_patterns(&self, m: &Symbol) -> Option<&[Expr]> {
        self.monads.get(m).map(Vec::as_slice)
    }

    pub fn names(&self) -> impl Iterator<Item = &Symbol> {
        self.monads.keys()
    }
}

fn pattern_of(m: &Symbol) -> Expr {
    Expr::call("pattern", vec![Expr::Symbol(m.clone())])
}

fn tagged(op: &str, m: &Symbol, args: Vec<Expr>) -> Expr {
    Expr::call(op, vec![Expr::Symbol(m.clone())]).apply(args)
}

/// `return[m][x]`.
pub fn return_expr(m: &Symbol, x: Expr) -> Expr {
    tagged("return", m, vec![x])
}

/// `bind[m][ma, f]`.
pub fn bind_expr(m: &Symbol, ma: Expr, f: Expr) -> Expr {
    tagged("bind", m, vec![ma, f])
}

/// `bnd[m][ma, f]`.
pub fn bnd_expr(m: &Symbol, ma: Expr, f: Expr) -> Expr {
    tagged("bnd", m, vec![ma, f])
}

/// `chk[m][v]`.
pub fn chk_expr(m: &Symbol, v: Expr) -> Expr {
    tagged("chk", m, vec![v])
}

impl Engine {
    pub fn register_monad(&mut self, def: MonadDef) -> Result<(), EvalError> {
        if self.monads.monads.contains_key(&def.name) {
            return Err(EvalError::DuplicateMonad(def.name.to_string()));
        }
        let m = def.name.clone();
        // rule-defined monads supply their own pattern[m]
        if let (true, [single]) = (def.unit.is_some(), def.type_patterns.as_slice()) {
            self.define(pattern_of(&m), Rhs::Template(single.clone()))?;
        }
        if let Some(unit) = def.unit.clone() {
            let lhs = return_expr(&m, crate::parser::parse("x_")?);
            self.define(
                lhs,
                Rhs::native(move |b, ev| {
                    let x = b.expr("x").expect("x is bound");
                    unit(ev, x).map(Some)
                }),
            )?;
        }
        if let Some(bind) = def.bind.clone() {
            let lhs = bind_expr(
                &m,
                crate::parser::parse("ma_")?,
                crate::parser::parse("f_")?,
            );
            self.define(
                lhs,
                Rhs::native(move |b, ev| {
                    let ma = b.expr("ma").expect("ma is bound");
                    let f = b.expr("f").expect("f is bound");
                    bind(ev, ma, f)
                }),
            )?;
        }
        let patterns = def.type_patterns.iter().map(|p| self.intern(p)).collect();
        self.monads.monads.insert(m, patterns);
        Ok(())
    }

    pub fn monads(&self) -> &Registry {
        &self.monads
    }

    /// `chk` with the default configuration.
    pub fn chk(&self, m: &str, v: &Expr) -> Result<Expr, EvalError> {
        let cfg = EvalConfig::default();
        chk(
            &mut Session::new(self, &cfg),
            &Symbol::new(m),
            v,
            Site::DoFinal,
        )
    }

    /// `bind_checked` with the default configuration.
    pub fn bind_checked(&self, m: &str, ma: &Expr, f: &Expr) -> Result<Expr, EvalError> {
        let cfg = EvalConfig::default();
        bind_checked(&mut Session::new(self, &cfg), &Symbol::new(m), ma, f)
    }
}

/// The type patterns of `m`: registered ones, or else whatever `pattern[m]`
/// evaluates to.
pub fn type_patterns(ev: &mut dyn Evaluator, m: &Symbol) -> Result<Vec<Expr>, EvalError> {
    if let Some(ps) = ev.engine().monads.type_patterns(m) {
        return Ok(ps.to_vec());
    }
    let query = pattern_of(m);
    let p = ev.eval(&query)?;
    if p == query {
        return Err(EvalError::UnknownMonad(m.to_string()));
    }
    Ok(vec![p])
}

fn describe(patterns: &[Expr]) -> String {
    patterns.iter().map(print).collect::<Vec<_>>().join(" | ")
}

fn type_error(m: &Symbol, v: &Expr, patterns: &[Expr], site: Site) -> EvalError {
    EvalError::MonadType(MonadTypeError {
        monad: m.to_string(),
        value: print(v),
        expected: describe(patterns),
        site,
    })
}

/// Returns `v` unchanged if it is an `m` value.
pub fn chk(ev: &mut dyn Evaluator, m: &Symbol, v: &Expr, site: Site) -> Result<Expr, EvalError> {
    let patterns = type_patterns(ev, m)?;
    if patterns.iter().any(|p| ev.matches(p, v)) {
        Ok(v.clone())
    } else {
        Err(type_error(m, v, &patterns, site))
    }
}

/// `bind[m][ma, f]` guarded by the type of `ma`, with its result checked.
pub fn bind_checked(
    ev: &mut dyn Evaluator,
    m: &Symbol,
    ma: &Expr,
    f: &Expr,
) -> Result<Expr, EvalError> {
    let patterns = type_patterns(ev, m)?;
    if !patterns.iter().any(|p| ev.matches(p, ma)) {
        return Err(type_error(m, ma, &patterns, Site::BindInput));
    }
    if matches!(f, Expr::Integer(_) | Expr::String(_)) {
        return Err(EvalError::MonadType(MonadTypeError {
            monad: m.to_string(),
            value: print(f),
            expected: "a function".into(),
            site: Site::BindInput,
        }));
    }
    let result = ev.eval(&bind_expr(m, ma.clone(), f.clone()))?;
    chk(ev, m, &result, Site::BindOutput)
}

/// `return[m][x]`, checked against the type pattern.
pub fn unit_checked(ev: &mut dyn Evaluator, m: &Symbol, x: &Expr) -> Result<Expr, EvalError> {
    let v = ev.eval(&return_expr(m, x.clone()))?;
    chk(ev, m, &v, Site::Return)
}

pub(crate) fn install(engine: &mut Engine) {
    engine
        .define_native("chk[m_Symbol][v_]", |b, ev| {
            let (Some(Expr::Symbol(m)), Some(v)) = (b.expr("m"), b.expr("v")) else {
                return Ok(None);
            };
            chk(ev, m, v, Site::DoFinal).map(Some)
        })
        .expect("well formed");
    engine
        .define_native("bnd[m_Symbol][ma_, f_]", |b, ev| {
            let (Some(Expr::Symbol(m)), Some(ma), Some(f)) =
                (b.expr("m"), b.expr("ma"), b.expr("f"))
            else {
                return Ok(None);
            };
            bind_checked(ev, m, ma, f).map(Some)
        })
        .expect("well formed");
    engine
        .define_native("do[m_Symbol][statements___]", |b, _| {
            let m = b.expr("m").expect("m is bound").clone();
            let statements = b.get("statements").expect("bound").to_expr();
            let block = Expr::call("do", vec![m]).apply(statements.args().to_vec());
            crate::desugar::desugar_expr(&block)
                .map(Some)
                .map_err(EvalError::from)
        })
        .expect("well formed");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn p(s: &str) -> Expr {
        parse(s).unwrap()
    }

    /// A writer-style monad over `w[value, log]` defined with host code.
    fn writer() -> MonadDef {
        MonadDef::native(
            "w",
            vec![p("w[_, _List]")],
            |_, x| Ok(Expr::call("w", vec![x.clone(), Expr::list(vec![])])),
            |ev, ma, f| {
                let val = ev.apply(f, vec![ma.args()[0].clone()])?;
                if !val.has_head("w") || val.args().len() != 2 {
                    return Ok(None);
                }
                let mut log = ma.args()[1].args().to_vec();
                log.extend(val.args()[1].args().iter().cloned());
                Ok(Some(Expr::call(
                    "w",
                    vec![val.args()[0].clone(), Expr::list(log)],
                )))
            },
        )
    }

    #[test]
    fn duplicate_registration() {
        let mut e = Engine::new();
        e.register_monad(writer()).unwrap();
        assert_eq!(
            e.register_monad(writer()),
            Err(EvalError::DuplicateMonad("w".into()))
        );
    }

    #[test]
    fn chk_accepts_and_rejects() {
        let mut e = Engine::new();
        e.register_monad(writer()).unwrap();
        let v = p("w[1, {}]");
        assert_eq!(e.chk("w", &v).unwrap(), v);
        assert_eq!(e.chk("w", &e.chk("w", &v).unwrap()).unwrap(), v);
        let err = e.chk("w", &p("{1,2}")).unwrap_err();
        let EvalError::MonadType(t) = err else {
            panic!()
        };
        assert_eq!(t.value, "{1,2}");
        assert_eq!(t.expected, "w[_,_List]");
    }

    #[test]
    fn bind_checked_concatenates_and_guards() {
        let mut e = Engine::new();
        e.register_monad(writer()).unwrap();
        let f = p("Function[x, w[Plus[x, 1], {added}]]");
        let out = e.bind_checked("w", &p("w[1, {start}]"), &f).unwrap();
        assert_eq!(out, p("w[2, {start, added}]"));
        let err = e.bind_checked("w", &Expr::int(42), &f).unwrap_err();
        assert!(matches!(
            err,
            EvalError::MonadType(MonadTypeError {
                site: Site::BindInput,
                ..
            })
        ));
        let bad = p("Function[x, 42]");
        let err = e.bind_checked("w", &p("w[1, {}]"), &bad).unwrap_err();
        assert!(matches!(
            err,
            EvalError::MonadType(MonadTypeError {
                site: Site::BindOutput,
                ..
            })
        ));
    }

    #[test]
    fn rules_defined_monads_resolve_through_pattern() {
        let mut e = Engine::new();
        e.define(p("pattern[box]"), Rhs::Template(p("box[_]")))
            .unwrap();
        e.define(p("return[box][x_]"), Rhs::Template(p("box[x]")))
            .unwrap();
        e.define(p("bind[box][box[x_], f_]"), Rhs::Template(p("f[x]")))
            .unwrap();
        let r = e
            .eval(&p("bnd[box][box[1], Function[v, return[box][Plus[v, 1]]]]"))
            .unwrap();
        assert_eq!(r, p("box[2]"));
        let err = e.eval(&p("chk[nobody][1]")).unwrap_err();
        assert_eq!(err, EvalError::UnknownMonad("nobody".into()));
    }

    #[test]
    fn union_type_patterns() {
        let mut e = Engine::new();
        e.register_monad(MonadDef::native(
            "opt",
            vec![p("none"), p("some[_]")],
            |_, x| Ok(Expr::call("some", vec![x.clone()])),
            |ev, ma, f| match ma.args_of("some") {
                Some([x]) => ev.apply(f, vec![x.clone()]).map(Some),
                _ => Ok(Some(ma.clone())),
            },
        ))
        .unwrap();
        assert!(e.chk("opt", &p("none")).is_ok());
        assert!(e.chk("opt", &p("some[3]")).is_ok());
        assert!(e.chk("opt", &p("some[]")).is_err());
        // no single pattern, so pattern[opt] is left alone
        assert_eq!(e.eval(&p("pattern[opt]")).unwrap(), p("pattern[opt]"));
    }
}
