//! The handful of host functions the example programs need: `With`,
//! `Part`, `ReplacePart`, `Take`, `Drop`, `Range`, `Join`, integer
//! arithmetic, `MatchQ` and `Length`.

use crate::error::EvalError;
use crate::expr::{names, substitute, Bindings, Capture, Expr};
use crate::matcher::matches;
use crate::rewriter::{Engine, Evaluator};

fn int(b: &Bindings, name: &str) -> Option<i64> {
    b.expr(name).and_then(Expr::as_integer)
}

fn ints(b: &Bindings, name: &str) -> Vec<i64> {
    match b.get(name) {
        Some(Capture::Seq(items)) => items.iter().filter_map(Expr::as_integer).collect(),
        Some(Capture::One(e)) => e.as_integer().into_iter().collect(),
        None => Vec::new(),
    }
}

/// Zero-based position of a one-based (or negative, from the end) index.
fn index(i: i64, len: usize) -> Option<usize> {
    let len = len as i64;
    let idx = if i > 0 { i - 1 } else { len + i };
    (i != 0 && (0..len).contains(&idx)).then_some(idx as usize)
}

fn boolean(v: bool) -> Expr {
    Expr::sym(if v { names::TRUE } else { names::FALSE })
}

/// `With[{v = e, ...}, body]`: evaluates each `e` once, then substitutes.
fn with(b: &Bindings, ev: &mut dyn Evaluator) -> Result<Option<Expr>, EvalError> {
    let (Some(vars), Some(body)) = (b.expr("vars"), b.expr("body")) else {
        return Ok(None);
    };
    let mut scope = Bindings::new();
    for decl in vars.args() {
        let Some([Expr::Symbol(name), value]) = decl.args_of(names::SET) else {
            return Ok(None);
        };
        let value = ev.eval(value)?;
        scope.bind(name.clone(), Capture::One(value));
    }
    Ok(Some(substitute(body, &scope)))
}

pub(crate) fn install(engine: &mut Engine) {
    let define =
        |engine: &mut Engine,
         lhs: &str,
         f: fn(&Bindings, &mut dyn Evaluator) -> Result<Option<Expr>, EvalError>| {
            engine
                .define_native(lhs, f)
                .expect("built-in definitions are well formed");
        };

    define(engine, "With[vars_List, body_]", with);

    // Part[e, 0] is the head; positive indices count from 1, negative from the end.
    define(engine, "Part[e_, i_Integer]", |b, _| {
        let (Some(e), Some(i)) = (b.expr("e"), int(b, "i")) else {
            return Ok(None);
        };
        if i == 0 {
            return Ok(Some(e.head()));
        }
        match index(i, e.args().len()) {
            Some(idx) if !e.is_atom() => Ok(Some(e.args()[idx].clone())),
            _ => Err(EvalError::Native(format!(
                "Part: index {i} out of range for {e}"
            ))),
        }
    });

    // ReplacePart[e, i -> v] replaces the i-th argument of e.
    define(engine, "ReplacePart[e_, i_Integer -> v_]", |b, _| {
        let (Some(e), Some(i), Some(v)) = (b.expr("e"), int(b, "i"), b.expr("v")) else {
            return Ok(None);
        };
        let Some(c) = e.as_compound() else {
            return Err(EvalError::Native(format!("ReplacePart: {e} has no parts")));
        };
        let Some(idx) = index(i, c.args.len()) else {
            return Err(EvalError::Native(format!(
                "ReplacePart: index {i} out of range for {e}"
            )));
        };
        let mut args = c.args.clone();
        args[idx] = v.clone();
        Ok(Some(Expr::compound(c.head.clone(), args)))
    });

    // Take and Drop clamp to the list length.
    define(engine, "Take[l_List, n_Integer]", |b, _| {
        let (Some(l), Some(n)) = (b.expr("l"), int(b, "n")) else {
            return Ok(None);
        };
        let n = n.clamp(0, l.args().len() as i64) as usize;
        Ok(Some(Expr::list(l.args()[..n].to_vec())))
    });

    define(engine, "Drop[l_List, n_Integer]", |b, _| {
        let (Some(l), Some(n)) = (b.expr("l"), int(b, "n")) else {
            return Ok(None);
        };
        let n = n.clamp(0, l.args().len() as i64) as usize;
        Ok(Some(Expr::list(l.args()[n..].to_vec())))
    });

    define(engine, "Range[n_Integer]", |b, _| {
        Ok(int(b, "n").map(|n| Expr::list((1..=n).map(Expr::int).collect())))
    });

    define(engine, "Join[lists___List]", |b, _| {
        let Some(Capture::Seq(lists)) = b.get("lists") else {
            return Ok(None);
        };
        let joined = lists
            .iter()
            .flat_map(|l| l.args().iter().cloned())
            .collect();
        Ok(Some(Expr::list(joined)))
    });

    define(engine, "Plus[xs___Integer]", |b, _| {
        Ok(ints(b, "xs")
            .into_iter()
            .try_fold(0i64, i64::checked_add)
            .map(Expr::int))
    });

    define(engine, "Times[xs___Integer]", |b, _| {
        Ok(ints(b, "xs")
            .into_iter()
            .try_fold(1i64, i64::checked_mul)
            .map(Expr::int))
    });

    define(engine, "Subtract[a_Integer, b_Integer]", |b, _| {
        Ok(int(b, "a")
            .zip(int(b, "b"))
            .and_then(|(a, c)| a.checked_sub(c))
            .map(Expr::int))
    });

    define(engine, "MatchQ[e_, p_]", |b, _| {
        let (Some(e), Some(p)) = (b.expr("e"), b.expr("p")) else {
            return Ok(None);
        };
        Ok(Some(boolean(matches(p, e))))
    });

    define(engine, "Length[e_]", |b, _| {
        Ok(b.expr("e")
            .filter(|e| !e.is_atom())
            .map(|e| Expr::int(e.args().len() as i64)))
    });
}

#[cfg(test)]
mod tests {
    use crate::parser::parse;
    use crate::rewriter::Engine;

    fn eval(src: &str) -> String {
        let engine = Engine::new();
        engine.eval(&parse(src).unwrap()).unwrap().to_string()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval("Subtract[3, 1]"), "2");
        assert_eq!(eval("Plus[1, 2, 3]"), "6");
        assert_eq!(eval("Plus[]"), "0");
        assert_eq!(eval("Times[2, 5]"), "10");
        assert_eq!(eval("Plus[a, 1]"), "Plus[a,1]");
        assert_eq!(
            eval("Plus[9223372036854775807, 1]"),
            "Plus[9223372036854775807,1]"
        );
    }

    #[test]
    fn part_and_join() {
        assert_eq!(eval("Part[hT[a, b], 1]"), "a");
        assert_eq!(eval("Part[hT[a, b], 2]"), "b");
        assert_eq!(eval("Part[hT[a, b], 0]"), "hT");
        assert_eq!(eval("Part[{1,2,3}, -1]"), "3");
        assert_eq!(eval("Join[{1}, {}, {2, 3}]"), "{1,2,3}");
        assert_eq!(eval("Join[{1}, x]"), "Join[{1},x]");
        let engine = Engine::new();
        assert!(engine.eval(&parse("Part[{1}, 5]").unwrap()).is_err());
    }

    #[test]
    fn list_surgery() {
        assert_eq!(eval("ReplacePart[{a, b, c}, 2 -> x]"), "{a,x,c}");
        assert_eq!(eval("ReplacePart[f[a, b], -1 -> x]"), "f[a,x]");
        assert_eq!(eval("Take[{1, 2, 3}, 1]"), "{1}");
        assert_eq!(eval("Take[{}, 1]"), "{}");
        assert_eq!(eval("Drop[{1, 2, 3}, 1]"), "{2,3}");
        assert_eq!(eval("Drop[{}, 1]"), "{}");
        assert_eq!(eval("Range[3]"), "{1,2,3}");
        assert_eq!(eval("Range[0]"), "{}");
        let engine = Engine::new();
        assert!(engine
            .eval(&parse("ReplacePart[{a}, 3 -> x]").unwrap())
            .is_err());
    }

    #[test]
    fn with_evaluates_once_and_substitutes() {
        assert_eq!(eval("With[{v = Plus[1, 2]}, f[v, v]]"), "f[3,3]");
        assert_eq!(eval("With[{a = 1, b = 2}, {b, a}]"), "{2,1}");
    }

    #[test]
    fn match_q() {
        assert_eq!(eval("MatchQ[{1, 2}, {_Integer...}]"), "True");
        assert_eq!(eval("MatchQ[x <- y, Except[_LeftArrow]]"), "False");
        assert_eq!(eval("Length[{a, b}]"), "2");
    }
}
