//! Structural pattern matching.
//!
//! A pattern denotes the set of expressions it matches. Supported forms are
//! `Blank[h?]` (`_`, `_h`), `BlankNullSequence[h?]` (`___`), named patterns
//! `Pattern[x, p]`, `RepeatedNull[p]` (`p...`) and `Except[p]`; anything
//! else matches itself structurally.
//!
//! Sequence patterns try the shortest split first, so the first solution
//! is deterministic. Matching is written in continuation-passing style: each
//! step hands its extended bindings to a continuation that returns `true`
//! to stop the search.

use std::cell::RefCell;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use crate::expr::{names, Bindings, Capture, Expr, Symbol};

/// `Some(bindings)` on success.
pub type MatchResult = Option<Bindings>;

/// Largest compound arity `match_all` accepts by default.
pub const DEFAULT_ARITY_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatchError {
    #[error("expression arity {arity} exceeds the enumeration bound {bound}")]
    BoundExceeded { arity: usize, bound: usize },
}

enum Kind<'a> {
    Blank(Option<&'a Expr>),
    NullSeq(Option<&'a Expr>),
    Named(&'a Symbol, &'a Expr),
    Repeated(&'a Expr),
    Except(&'a Expr),
    Literal,
}

fn classify(p: &Expr) -> Kind<'_> {
    let Some(c) = p.as_compound() else {
        return Kind::Literal;
    };
    let Some(h) = c.head.as_symbol() else {
        return Kind::Literal;
    };
    match (h.name(), c.args.as_slice()) {
        (names::BLANK, []) => Kind::Blank(None),
        (names::BLANK, [head]) => Kind::Blank(Some(head)),
        (names::BLANK_NULL_SEQUENCE, []) => Kind::NullSeq(None),
        (names::BLANK_NULL_SEQUENCE, [head]) => Kind::NullSeq(Some(head)),
        (names::PATTERN, [Expr::Symbol(name), sub]) => Kind::Named(name, sub),
        (names::REPEATED_NULL, [sub]) => Kind::Repeated(sub),
        (names::EXCEPT, [sub]) => Kind::Except(sub),
        _ => Kind::Literal,
    }
}

/// How each element of a sequence segment is constrained.
enum Element<'a> {
    Head(Option<&'a Expr>),
    Each(&'a Expr),
}

/// Names and element constraint of a sequence-class pattern.
fn sequence_kind(p: &Expr) -> Option<(Vec<&Symbol>, Element<'_>)> {
    match classify(p) {
        Kind::NullSeq(h) => Some((Vec::new(), Element::Head(h))),
        Kind::Repeated(sub) => Some((Vec::new(), Element::Each(sub))),
        Kind::Named(name, sub) => {
            let (mut names, elem) = sequence_kind(sub)?;
            names.push(name);
            Some((names, elem))
        }
        _ => None,
    }
}

type Cont<'k> = &'k mut dyn FnMut(&Bindings) -> bool;

static TOKENS: AtomicU64 = AtomicU64::new(1);

/// Remembers which compounds matched which name-free patterns, so a large
/// value that is type-checked over and over is only walked once.
///
/// A cache is only sound while the definitions it was used with do not
/// change; the evaluator keeps one per session. Patterns are identified by
/// address and kept alive by the cache.
#[derive(Default)]
pub struct MatchCache {
    tokens: RefCell<FxHashMap<usize, (Expr, Option<u64>)>>,
}

impl MatchCache {
    pub fn new() -> MatchCache {
        MatchCache::default()
    }

    fn token(&self, p: &Expr) -> Option<u64> {
        let Expr::Compound(c) = p else { return None };
        let key = Arc::as_ptr(c) as usize;
        if let Some((_, t)) = self.tokens.borrow().get(&key) {
            return *t;
        }
        let structural = matches!(classify(p), Kind::Literal);
        let t = (structural && !binds_names(p)).then(|| TOKENS.fetch_add(1, Ordering::Relaxed));
        self.tokens.borrow_mut().insert(key, (p.clone(), t));
        t
    }
}

type Cache<'c> = Option<&'c MatchCache>;

fn one(p: &Expr, e: &Expr, b: &Bindings, cx: Cache<'_>, k: Cont<'_>) -> bool {
    if let (Some(cache), Expr::Compound(ec)) = (cx, e) {
        if let Some(token) = cache.token(p) {
            if ec.matched.load(Ordering::Relaxed) == token {
                return k(b);
            }
            if !uncached(p, e, b, cx, &mut |_| true) {
                return false;
            }
            ec.matched.store(token, Ordering::Relaxed);
            return k(b);
        }
    }
    uncached(p, e, b, cx, k)
}

fn uncached(p: &Expr, e: &Expr, b: &Bindings, cx: Cache<'_>, k: Cont<'_>) -> bool {
    if sequence_kind(p).is_some() {
        return seq(std::slice::from_ref(p), std::slice::from_ref(e), b, cx, k);
    }
    match classify(p) {
        Kind::Blank(h) => match h {
            Some(h) if e.head() != *h => false,
            _ => k(b),
        },
        Kind::Named(name, sub) => one(sub, e, b, cx, &mut |b2| {
            let mut b3 = b2.clone();
            b3.bind(name.clone(), Capture::One(e.clone())) && k(&b3)
        }),
        Kind::Except(sub) => {
            if one(sub, e, b, cx, &mut |_| true) {
                false
            } else {
                k(b)
            }
        }
        Kind::Literal => match (p, e) {
            (Expr::Compound(pc), Expr::Compound(ec)) => one(&pc.head, &ec.head, b, cx, &mut |b2| {
                seq(&pc.args, &ec.args, b2, cx, k)
            }),
            _ => p == e && k(b),
        },
        Kind::NullSeq(_) | Kind::Repeated(_) => unreachable!("handled as a sequence"),
    }
}

/// True if matching `p` can add bindings.
fn binds_names(p: &Expr) -> bool {
    match p {
        Expr::Compound(c) => {
            c.head.is_symbol(names::PATTERN)
                || binds_names(&c.head)
                || c.args.iter().any(binds_names)
        }
        _ => false,
    }
}

fn each(elem: &Element<'_>, items: &[Expr], b: &Bindings, cx: Cache<'_>, k: Cont<'_>) -> bool {
    match elem {
        Element::Head(None) => k(b),
        Element::Head(Some(h)) => items.iter().all(|e| e.head() == **h) && k(b),
        // without names every element matches independently of the others
        Element::Each(sub) if !binds_names(sub) => {
            items.iter().all(|e| one(sub, e, b, cx, &mut |_| true)) && k(b)
        }
        Element::Each(sub) => match items.split_first() {
            None => k(b),
            Some((first, rest)) => stacker::maybe_grow(32 * 1024, 1024 * 1024, || {
                one(sub, first, b, cx, &mut |b2| each(elem, rest, b2, cx, k))
            }),
        },
    }
}

fn seq(ps: &[Expr], es: &[Expr], b: &Bindings, cx: Cache<'_>, k: Cont<'_>) -> bool {
    let Some((p, rest_ps)) = ps.split_first() else {
        return es.is_empty() && k(b);
    };
    match sequence_kind(p) {
        Some((names, elem)) => {
            let required = rest_ps
                .iter()
                .filter(|q| sequence_kind(q).is_none())
                .count();
            if required > es.len() {
                return false;
            }
            let longest = es.len() - required;
            // with no other sequence pattern left the split is forced
            let shortest = if rest_ps.iter().any(|q| sequence_kind(q).is_some()) {
                0
            } else {
                longest
            };
            for n in shortest..=longest {
                let (taken, rest_es) = es.split_at(n);
                let stop = each(&elem, taken, b, cx, &mut |b2| {
                    let mut b3 = b2.clone();
                    for name in &names {
                        if !b3.bind((*name).clone(), Capture::Seq(taken.to_vec())) {
                            return false;
                        }
                    }
                    seq(rest_ps, rest_es, &b3, cx, k)
                });
                if stop {
                    return true;
                }
            }
            false
        }
        None => match es.split_first() {
            None => false,
            Some((e, rest_es)) => one(p, e, b, cx, &mut |b2| seq(rest_ps, rest_es, b2, cx, k)),
        },
    }
}

/// First solution of matching `e` against `p`.
pub fn match_expr(p: &Expr, e: &Expr) -> MatchResult {
    first(p, e, None)
}

/// [`match_expr`] consulting and filling `cache`.
pub fn match_expr_cached(p: &Expr, e: &Expr, cache: &MatchCache) -> MatchResult {
    first(p, e, Some(cache))
}

fn first(p: &Expr, e: &Expr, cx: Cache<'_>) -> MatchResult {
    let mut found = None;
    one(p, e, &Bindings::new(), cx, &mut |b| {
        found = Some(b.clone());
        true
    });
    found
}

/// True when `e` belongs to the type denoted by `p`.
pub fn matches(p: &Expr, e: &Expr) -> bool {
    one(p, e, &Bindings::new(), None, &mut |_| true)
}

/// [`matches`] consulting and filling `cache`.
pub fn matches_cached(p: &Expr, e: &Expr, cache: &MatchCache) -> bool {
    one(p, e, &Bindings::new(), Some(cache), &mut |_| true)
}

/// Every solution, in the order `match_expr` would find them.
pub fn match_all(p: &Expr, e: &Expr) -> Result<Vec<Bindings>, MatchError> {
    match_all_bounded(p, e, DEFAULT_ARITY_BOUND)
}

pub fn match_all_bounded(p: &Expr, e: &Expr, bound: usize) -> Result<Vec<Bindings>, MatchError> {
    let arity = e.max_arity();
    if arity > bound {
        return Err(MatchError::BoundExceeded { arity, bound });
    }
    let mut all = Vec::new();
    one(p, e, &Bindings::new(), None, &mut |b| {
        all.push(b.clone());
        false
    });
    Ok(all)
}
