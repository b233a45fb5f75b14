//! Canonical text form of expressions.
//!
//! Operators are printed infix only where the grammar can read them back
//! without parentheses; otherwise the full `Head[args]` form is used, so
//! `parse(print(e)) == e` for every expression without generated symbols.

use crate::expr::{names, Expr};

/// Binding strength of a printed form, loosest first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Level {
    Assign,
    Arrow,
    Rule,
    Named,
    Postfix,
    Apply,
}

enum Form<'a> {
    Text(String),
    Group {
        open: String,
        close: &'static str,
        args: &'a [Expr],
    },
    Infix {
        lhs: (&'a Expr, Level),
        op: &'static str,
        rhs: (&'a Expr, Level),
    },
    Named {
        name: &'a str,
        pattern: &'a Expr,
    },
    Repeated(&'a Expr),
}

/// Canonical single-line form: no spaces, lists as `{a,b}`, rules as `a->b`.
pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    canon(e, Level::Assign, &mut out);
    out
}

/// Multi-line form in the style of `hT[\n   {...},\n   ...\n]`: a bracketed
/// group that does not fit in `width` columns puts each argument on its own
/// line, indented by three spaces. Parses back to the same expression.
pub fn print_pretty(e: &Expr, width: usize) -> String {
    let mut out = String::new();
    pretty(e, Level::Assign, 0, width, &mut out);
    out
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric())
}

fn quote(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
}

/// `_`, `_h`, `___`, `___h` when `e` is a blank the lexer can read back.
fn blank_text(e: &Expr) -> Option<String> {
    let (marker, args) = match e.args_of(names::BLANK) {
        Some(args) => ("_", args),
        None => ("___", e.args_of(names::BLANK_NULL_SEQUENCE)?),
    };
    match args {
        [] => Some(marker.to_string()),
        [Expr::Symbol(h)] if is_identifier(h.name()) => Some(format!("{marker}{}", h.name())),
        _ => None,
    }
}

fn natural(e: &Expr) -> (Form<'_>, Level) {
    let c = match e {
        Expr::Symbol(s) => return (Form::Text(s.name().to_string()), Level::Apply),
        Expr::Integer(i) => return (Form::Text(i.to_string()), Level::Apply),
        Expr::String(s) => {
            let mut out = String::new();
            quote(s, &mut out);
            return (Form::Text(out), Level::Apply);
        }
        Expr::Compound(c) => c,
    };
    let args = c.args.as_slice();
    if let Expr::Symbol(h) = &c.head {
        match (h.name(), args) {
            (names::LIST, _) => {
                return (
                    Form::Group {
                        open: "{".into(),
                        close: "}",
                        args,
                    },
                    Level::Apply,
                )
            }
            (names::SET_DELAYED | names::SET, [l, r]) => {
                let op = if h.name() == names::SET { "=" } else { ":=" };
                return (
                    Form::Infix {
                        lhs: (l, Level::Arrow),
                        op,
                        rhs: (r, Level::Arrow),
                    },
                    Level::Assign,
                );
            }
            (names::LEFT_ARROW, [l, r]) => {
                return (
                    Form::Infix {
                        lhs: (l, Level::Rule),
                        op: "<-",
                        rhs: (r, Level::Rule),
                    },
                    Level::Arrow,
                )
            }
            (names::RULE, [l, r]) => {
                return (
                    Form::Infix {
                        lhs: (l, Level::Named),
                        op: "->",
                        rhs: (r, Level::Rule),
                    },
                    Level::Rule,
                )
            }
            (names::PATTERN, [Expr::Symbol(name), p]) => {
                if let Some(blank) = blank_text(p) {
                    return (Form::Text(format!("{}{blank}", name.name())), Level::Apply);
                }
                return (
                    Form::Named {
                        name: name.name(),
                        pattern: p,
                    },
                    Level::Named,
                );
            }
            (names::REPEATED_NULL, [p]) => return (Form::Repeated(p), Level::Postfix),
            _ => {
                if let Some(blank) = blank_text(e) {
                    return (Form::Text(blank), Level::Apply);
                }
            }
        }
    }
    (full_form(e), Level::Apply)
}

fn full_form(e: &Expr) -> Form<'_> {
    let c = e.as_compound().expect("full form of a compound");
    let mut open = String::new();
    canon(&c.head, Level::Apply, &mut open);
    open.push('[');
    Form::Group {
        open,
        close: "]",
        args: &c.args,
    }
}

fn form_at(e: &Expr, min: Level) -> Form<'_> {
    let (form, level) = natural(e);
    if level < min {
        full_form(e)
    } else {
        form
    }
}

fn canon(e: &Expr, min: Level, out: &mut String) {
    match form_at(e, min) {
        Form::Text(t) => out.push_str(&t),
        Form::Group { open, close, args } => {
            out.push_str(&open);
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                canon(a, Level::Assign, out);
            }
            out.push_str(close);
        }
        Form::Infix { lhs, op, rhs } => {
            canon(lhs.0, lhs.1, out);
            out.push_str(op);
            canon(rhs.0, rhs.1, out);
        }
        Form::Named { name, pattern } => {
            out.push_str(name);
            out.push(':');
            canon(pattern, Level::Postfix, out);
        }
        Form::Repeated(p) => {
            canon(p, Level::Postfix, out);
            out.push_str("...");
        }
    }
}

fn pretty(e: &Expr, min: Level, indent: usize, width: usize, out: &mut String) {
    let mut flat = String::new();
    canon(e, min, &mut flat);
    if indent + flat.len() <= width {
        out.push_str(&flat);
        return;
    }
    match form_at(e, min) {
        Form::Group { open, close, args } if !args.is_empty() => {
            out.push_str(&open);
            let inner = indent + 3;
            for (i, a) in args.iter().enumerate() {
                out.push_str(if i == 0 { "\n" } else { ",\n" });
                out.push_str(&" ".repeat(inner));
                pretty(a, Level::Assign, inner, width, out);
            }
            out.push('\n');
            out.push_str(&" ".repeat(indent));
            out.push_str(close);
        }
        Form::Infix { lhs, op, rhs } => {
            pretty(lhs.0, lhs.1, indent, width, out);
            out.push_str(op);
            pretty(rhs.0, rhs.1, indent, width, out);
        }
        Form::Named { name, pattern } => {
            out.push_str(name);
            out.push(':');
            pretty(pattern, Level::Postfix, indent, width, out);
        }
        Form::Repeated(p) => {
            pretty(p, Level::Postfix, indent, width, out);
            out.push_str("...");
        }
        _ => out.push_str(&flat),
    }
}
