#![allow(dead_code)]

//! Helpers shared by the integration tests: a brute-force matcher, random
//! expression and pattern generators, alpha-equivalence.

use std::collections::HashMap;

use monadwl_core::matcher::{match_expr_cached, matches_cached, MatchCache};
use monadwl_core::{match_all, match_expr, matches, Bindings, Capture, Expr};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A solution as sorted `(name, capture)` text pairs.
pub type Solution = Vec<(String, String)>;

type Env = Vec<(String, Capture)>;

fn capture_text(c: &Capture) -> String {
    match c {
        Capture::One(e) => format!("one {e}"),
        Capture::Seq(items) => {
            let items: Vec<String> = items.iter().map(|e| e.to_string()).collect();
            format!("seq [{}]", items.join(", "))
        }
    }
}

fn normalise(env: &Env) -> Solution {
    let mut out: Vec<(String, String)> = env
        .iter()
        .map(|(n, c)| (n.clone(), capture_text(c)))
        .collect();
    out.sort();
    out
}

pub fn solution_of(b: &Bindings) -> Solution {
    let mut out: Vec<(String, String)> = b
        .iter()
        .map(|(n, c)| (n.name().to_string(), capture_text(c)))
        .collect();
    out.sort();
    out
}

/// Keeps the first occurrence of each solution.
pub fn dedup(sols: Vec<Solution>) -> Vec<Solution> {
    let mut out: Vec<Solution> = Vec::new();
    for s in sols {
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

fn extend(env: &Env, name: &str, value: Capture) -> Option<Env> {
    match env.iter().find(|(n, _)| n == name) {
        Some((_, old)) if *old == value => Some(env.clone()),
        Some(_) => None,
        None => {
            let mut env = env.clone();
            env.push((name.to_string(), value));
            Some(env)
        }
    }
}

fn head_is(e: &Expr, name: &str) -> bool {
    e.as_compound().is_some_and(|c| c.head.is_symbol(name))
}

/// `(names, element test)` for patterns that stand for a run of arguments.
enum Elem<'a> {
    Any,
    Head(&'a Expr),
    Each(&'a Expr),
}

fn as_sequence(p: &Expr) -> Option<(Vec<String>, Elem<'_>)> {
    let c = p.as_compound()?;
    if head_is(p, "BlankNullSequence") {
        return match c.args.as_slice() {
            [] => Some((vec![], Elem::Any)),
            [h] => Some((vec![], Elem::Head(h))),
            _ => None,
        };
    }
    if head_is(p, "RepeatedNull") && c.args.len() == 1 {
        return Some((vec![], Elem::Each(&c.args[0])));
    }
    if head_is(p, "Pattern") && c.args.len() == 2 {
        if let Expr::Symbol(s) = &c.args[0] {
            let (mut names, elem) = as_sequence(&c.args[1])?;
            names.push(s.name().to_string());
            return Some((names, elem));
        }
    }
    None
}

/// Every way `p` matches `e` under `env`, in depth-first shortest-first
/// order. Duplicates are kept.
pub fn oracle(p: &Expr, e: &Expr, env: &Env) -> Vec<Env> {
    if as_sequence(p).is_some() {
        return oracle_seq(std::slice::from_ref(p), std::slice::from_ref(e), env);
    }
    let Some(pc) = p.as_compound() else {
        return if p == e { vec![env.clone()] } else { vec![] };
    };
    if head_is(p, "Blank") && pc.args.len() <= 1 {
        return match pc.args.first() {
            Some(h) if e.head() != *h => vec![],
            _ => vec![env.clone()],
        };
    }
    if head_is(p, "Pattern") && pc.args.len() == 2 {
        if let Expr::Symbol(s) = &pc.args[0] {
            return oracle(&pc.args[1], e, env)
                .into_iter()
                .filter_map(|env| extend(&env, s.name(), Capture::One(e.clone())))
                .collect();
        }
    }
    if head_is(p, "Except") && pc.args.len() == 1 {
        return if oracle(&pc.args[0], e, env).is_empty() {
            vec![env.clone()]
        } else {
            vec![]
        };
    }
    let Some(ec) = e.as_compound() else {
        return vec![];
    };
    oracle(&pc.head, &ec.head, env)
        .into_iter()
        .flat_map(|env| oracle_seq(&pc.args, &ec.args, &env))
        .collect()
}

fn oracle_seq(ps: &[Expr], es: &[Expr], env: &Env) -> Vec<Env> {
    let Some((p, rest)) = ps.split_first() else {
        return if es.is_empty() {
            vec![env.clone()]
        } else {
            vec![]
        };
    };
    let Some((names, elem)) = as_sequence(p) else {
        let Some((e, es_rest)) = es.split_first() else {
            return vec![];
        };
        return oracle(p, e, env)
            .into_iter()
            .flat_map(|env| oracle_seq(rest, es_rest, &env))
            .collect();
    };
    let mut out = Vec::new();
    for n in 0..=es.len() {
        let (taken, left) = es.split_at(n);
        let mut envs = vec![env.clone()];
        for item in taken {
            envs = envs
                .into_iter()
                .flat_map(|env| match &elem {
                    Elem::Any => vec![env],
                    Elem::Head(h) if item.head() == **h => vec![env],
                    Elem::Head(_) => vec![],
                    Elem::Each(sub) => oracle(sub, item, &env),
                })
                .collect();
        }
        for env in envs {
            let mut env = Some(env);
            for name in &names {
                env = env.and_then(|e| extend(&e, name, Capture::Seq(taken.to_vec())));
            }
            if let Some(env) = env {
                out.extend(oracle_seq(rest, left, &env));
            }
        }
    }
    out
}

pub fn oracle_all(p: &Expr, e: &Expr) -> Vec<Solution> {
    oracle(p, e, &Vec::new()).iter().map(normalise).collect()
}

fn blank(kind: &str, head: Option<&str>) -> Expr {
    Expr::call(kind, head.map(Expr::sym).into_iter().collect())
}

fn named(name: &str, p: Expr) -> Expr {
    Expr::call("Pattern", vec![Expr::sym(name), p])
}

fn pattern_leaf(rng: &mut ChaCha8Rng) -> Expr {
    match rng.gen_range(0..9) {
        0 => Expr::sym("a"),
        1 => Expr::int(1),
        2 => blank("Blank", None),
        3 => blank("Blank", Some("Integer")),
        4 => blank("Blank", Some("List")),
        5 => named("x", blank("Blank", None)),
        6 => named("y", blank("Blank", None)),
        7 => blank("BlankNullSequence", None),
        _ => named("x", blank("BlankNullSequence", None)),
    }
}

/// Patterns of depth at most `depth` over the leaves `a`, `1`, `_`,
/// `_Integer`, `_List`, `x_`, `y_`, `___`, `x___`.
pub fn random_pattern(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth <= 1 || rng.gen_bool(0.35) {
        return pattern_leaf(rng);
    }
    let sub = |rng: &mut ChaCha8Rng| random_pattern(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => Expr::call("Except", vec![sub(rng)]),
        1 => Expr::call("RepeatedNull", vec![sub(rng)]),
        2 => named(["x", "y"].choose(rng).unwrap(), sub(rng)),
        3 => {
            let n = rng.gen_range(0..4);
            Expr::list((0..n).map(|_| sub(rng)).collect())
        }
        _ => {
            let n = rng.gen_range(0..3);
            Expr::call("f", (0..n).map(|_| sub(rng)).collect())
        }
    }
}

fn subject_item(rng: &mut ChaCha8Rng) -> Expr {
    match rng.gen_range(0..6) {
        0 => Expr::sym("a"),
        1 => Expr::int(1),
        2 => Expr::int(2),
        3 => Expr::list(vec![]),
        4 => Expr::list(vec![Expr::sym("a")]),
        _ => Expr::call("f", vec![Expr::int(1)]),
    }
}

/// A list of up to four small items, or occasionally one bare item.
pub fn random_subject(rng: &mut ChaCha8Rng) -> Expr {
    if rng.gen_bool(0.15) {
        return subject_item(rng);
    }
    let n = rng.gen_range(0..=4);
    Expr::list((0..n).map(|_| subject_item(rng)).collect())
}

const SYMBOLS: &[&str] = &[
    "a",
    "b",
    "x",
    "f",
    "g",
    "hT",
    "List",
    "Rule",
    "LeftArrow",
    "Set",
    "SetDelayed",
    "Pattern",
    "Blank",
    "BlankNullSequence",
    "RepeatedNull",
    "Except",
    "Function",
    "Sequence",
    "Integer",
    "do",
    "chk",
    "bnd",
    "Z9",
];

fn random_symbol(rng: &mut ChaCha8Rng) -> Expr {
    if rng.gen_bool(0.8) {
        return Expr::sym(SYMBOLS.choose(rng).unwrap());
    }
    let len = rng.gen_range(1..6);
    let mut name = String::new();
    name.push(rng.gen_range(b'a'..=b'z') as char);
    for _ in 1..len {
        let c = *b"abcXYZ019".choose(rng).unwrap();
        name.push(c as char);
    }
    Expr::sym(&name)
}

fn random_string(rng: &mut ChaCha8Rng) -> Expr {
    const CHARS: &[char] = &[
        'a', ' ', '"', '\\', '\n', '\t', '\r', '(', '*', ')', '[', ',', 'é', '→', '$', '_',
    ];
    let len = rng.gen_range(0..6);
    let s: String = (0..len).map(|_| *CHARS.choose(rng).unwrap()).collect();
    Expr::string(&s)
}

fn random_atom(rng: &mut ChaCha8Rng) -> Expr {
    match rng.gen_range(0..10) {
        0..=5 => random_symbol(rng),
        6 => Expr::int(rng.gen_range(-1000..1000)),
        7 => Expr::int(*[i64::MIN, i64::MAX, 0, -1].choose(rng).unwrap()),
        _ => random_string(rng),
    }
}

/// Any expression the parser can produce, depth at most `depth`.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth <= 1 || rng.gen_bool(0.3) {
        return random_atom(rng);
    }
    let head = if rng.gen_bool(0.85) {
        random_symbol(rng)
    } else {
        random_expr(rng, depth - 1)
    };
    let n = rng.gen_range(0..4);
    let args = (0..n).map(|_| random_expr(rng, depth - 1)).collect();
    Expr::compound(head, args)
}

/// Structural equality up to renaming of `Function` parameters.
pub fn alpha_eq(a: &Expr, b: &Expr) -> bool {
    alpha(a, b, &mut HashMap::new(), &mut HashMap::new())
}

fn alpha(
    a: &Expr,
    b: &Expr,
    left: &mut HashMap<String, String>,
    right: &mut HashMap<String, String>,
) -> bool {
    match (a, b) {
        (Expr::Symbol(x), Expr::Symbol(y)) => match (left.get(x.name()), right.get(y.name())) {
            (Some(bx), Some(by)) => bx == y.name() && by == x.name(),
            (None, None) => x == y,
            _ => false,
        },
        (Expr::Compound(ca), Expr::Compound(cb)) => {
            if ca.args.len() != cb.args.len() || !alpha(&ca.head, &cb.head, left, right) {
                return false;
            }
            if ca.head.is_symbol("Function") && ca.args.len() == 2 {
                if let (Expr::Symbol(pa), Expr::Symbol(pb)) = (&ca.args[0], &cb.args[0]) {
                    let saved = (left.get(pa.name()).cloned(), right.get(pb.name()).cloned());
                    left.insert(pa.name().to_string(), pb.name().to_string());
                    right.insert(pb.name().to_string(), pa.name().to_string());
                    let ok = alpha(&ca.args[1], &cb.args[1], left, right);
                    restore(left, pa.name(), saved.0);
                    restore(right, pb.name(), saved.1);
                    return ok;
                }
            }
            ca.args
                .iter()
                .zip(&cb.args)
                .all(|(x, y)| alpha(x, y, left, right))
        }
        _ => a == b,
    }
}

fn restore(map: &mut HashMap<String, String>, key: &str, old: Option<String>) {
    match old {
        Some(v) => map.insert(key.to_string(), v),
        None => map.remove(key),
    };
}

/// Number of `name[m][...]` nodes in `e`.
pub fn count_curried(e: &Expr, name: &str) -> usize {
    e.count(&|x| x.as_compound().is_some_and(|c| c.head.has_head(name)))
}

fn pattern_leaves() -> Vec<Expr> {
    vec![
        Expr::sym("a"),
        Expr::int(1),
        blank("Blank", None),
        blank("Blank", Some("Integer")),
        blank("Blank", Some("List")),
        named("x", blank("Blank", None)),
        named("y", blank("Blank", None)),
        blank("BlankNullSequence", None),
        named("x", blank("BlankNullSequence", None)),
    ]
}

/// Every pattern of depth at most `depth` built from the leaves of
/// [`random_pattern`] with `Except`, `...`, `x:`, lists of up to two
/// elements and `f[]` / `f[p]`.
pub fn all_patterns(depth: usize) -> Vec<Expr> {
    let leaves = pattern_leaves();
    if depth <= 1 {
        return leaves;
    }
    let smaller = all_patterns(depth - 1);
    let mut out = leaves;
    for p in &smaller {
        out.push(Expr::call("Except", vec![p.clone()]));
        out.push(Expr::call("RepeatedNull", vec![p.clone()]));
        out.push(named("x", p.clone()));
        out.push(Expr::list(vec![p.clone()]));
        out.push(Expr::call("f", vec![p.clone()]));
        for q in &smaller {
            out.push(Expr::list(vec![p.clone(), q.clone()]));
        }
    }
    out.push(Expr::list(vec![]));
    out.push(Expr::call("f", vec![]));
    out
}

/// Every list of length at most `max_len` over `items`.
pub fn all_subjects(items: &[Expr], max_len: usize) -> Vec<Expr> {
    let mut out = vec![Expr::list(vec![])];
    let mut layer: Vec<Vec<Expr>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                items.iter().map(move |i| {
                    let mut next = prefix.clone();
                    next.push(i.clone());
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned().map(Expr::list));
    }
    out
}

/// Compares the matcher with the brute-force enumeration on one pair;
/// `Ok(1)` when they agree that it matches.
pub fn agree(pat: &Expr, subject: &Expr, cache: &MatchCache) -> Result<usize, String> {
    let expected = dedup(oracle_all(pat, subject));
    let all = match_all(pat, subject).map_err(|e| e.to_string())?;
    let got = dedup(all.iter().map(solution_of).collect());
    if got != expected {
        return Err(format!(
            "match_all {pat} / {subject}: got {got:?}, expected {expected:?}"
        ));
    }
    let first = match_expr(pat, subject).map(|b| solution_of(&b));
    if first.as_ref() != expected.first() {
        return Err(format!(
            "match_expr {pat} / {subject}: got {first:?}, expected {:?}",
            expected.first()
        ));
    }
    let cached = match_expr_cached(pat, subject, cache).map(|b| solution_of(&b));
    if cached != first {
        return Err(format!("cached match {pat} / {subject}: got {cached:?}"));
    }
    if matches(pat, subject) != !expected.is_empty()
        || matches_cached(pat, subject, cache) != !expected.is_empty()
    {
        return Err(format!("matches {pat} / {subject} disagrees"));
    }
    Ok(usize::from(!expected.is_empty()))
}
