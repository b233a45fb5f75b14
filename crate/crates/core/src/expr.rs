//! The expression tree shared by values, patterns and programs.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Names of the symbols the engine gives built-in meaning to.
pub mod names {
    pub const LIST: &str = "List";
    pub const RULE: &str = "Rule";
    pub const LEFT_ARROW: &str = "LeftArrow";
    pub const FUNCTION: &str = "Function";
    pub const SEQUENCE: &str = "Sequence";
    pub const SET: &str = "Set";
    pub const SET_DELAYED: &str = "SetDelayed";

    pub const BLANK: &str = "Blank";
    pub const BLANK_SEQUENCE: &str = "BlankSequence";
    pub const BLANK_NULL_SEQUENCE: &str = "BlankNullSequence";
    pub const PATTERN: &str = "Pattern";
    pub const REPEATED_NULL: &str = "RepeatedNull";
    pub const EXCEPT: &str = "Except";

    pub const INTEGER: &str = "Integer";
    pub const STRING: &str = "String";
    pub const SYMBOL: &str = "Symbol";

    pub const TRUE: &str = "True";
    pub const FALSE: &str = "False";
}

/// An interned-by-value symbol name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// True for names produced by [`fresh_symbol`].
    pub fn is_generated(&self) -> bool {
        self.0.starts_with('$')
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::new(name)
    }
}

/// A compound expression `head[args...]`.
pub struct Compound {
    pub head: Expr,
    pub args: Vec<Expr>,
    /// Id of the last evaluation session that found this node in normal form.
    pub(crate) normal_in: AtomicU64,
    /// Last name-free pattern this node was found to match (see the matcher).
    pub(crate) matched: AtomicU64,
    /// One bit per symbol occurring in the node (hashed, so bits are
    /// shared); a clear bit means the symbol does not occur.
    pub(crate) symbols: u64,
}

fn symbol_bit(s: &Symbol) -> u64 {
    let h = s.name().bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    });
    1 << (h % 64)
}

fn symbol_bits(e: &Expr) -> u64 {
    match e {
        Expr::Symbol(s) => symbol_bit(s),
        Expr::Compound(c) => c.symbols,
        _ => 0,
    }
}

impl Clone for Compound {
    fn clone(&self) -> Self {
        Compound {
            head: self.head.clone(),
            args: self.args.clone(),
            normal_in: AtomicU64::new(0),
            matched: AtomicU64::new(0),
            symbols: self.symbols,
        }
    }
}

impl PartialEq for Compound {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.args == other.args
    }
}

impl Eq for Compound {}

impl Hash for Compound {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.head.hash(state);
        self.args.hash(state);
    }
}

/// An immutable symbolic expression.
///
/// Cloning is cheap: compound nodes and text are reference counted, so
/// subtrees are shared freely between values, patterns and rule bodies.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Symbol(Symbol),
    Integer(i64),
    String(Arc<str>),
    Compound(Arc<Compound>),
}

impl Expr {
    pub fn sym(name: &str) -> Expr {
        Expr::Symbol(Symbol::new(name))
    }

    pub fn int(value: i64) -> Expr {
        Expr::Integer(value)
    }

    pub fn string(value: &str) -> Expr {
        Expr::String(Arc::from(value))
    }

    pub fn compound(head: Expr, args: Vec<Expr>) -> Expr {
        let symbols = args
            .iter()
            .fold(symbol_bits(&head), |m, a| m | symbol_bits(a));
        Expr::Compound(Arc::new(Compound {
            head,
            args,
            normal_in: AtomicU64::new(0),
            matched: AtomicU64::new(0),
            symbols,
        }))
    }

    /// `name[args...]` with a symbol head.
    pub fn call(name: &str, args: Vec<Expr>) -> Expr {
        Expr::compound(Expr::sym(name), args)
    }

    pub fn list(items: Vec<Expr>) -> Expr {
        Expr::call(names::LIST, items)
    }

    pub fn rule(lhs: Expr, rhs: Expr) -> Expr {
        Expr::call(names::RULE, vec![lhs, rhs])
    }

    pub fn left_arrow(lhs: Expr, rhs: Expr) -> Expr {
        Expr::call(names::LEFT_ARROW, vec![lhs, rhs])
    }

    pub fn function(param: Expr, body: Expr) -> Expr {
        Expr::call(names::FUNCTION, vec![param, body])
    }

    /// `self[args...]`.
    pub fn apply(&self, args: Vec<Expr>) -> Expr {
        Expr::compound(self.clone(), args)
    }

    pub fn as_symbol(&self) -> Option<&Symbol> {
        match self {
            Expr::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<i64> {
        match self {
            Expr::Integer(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_compound(&self) -> Option<&Compound> {
        match self {
            Expr::Compound(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_symbol(&self, name: &str) -> bool {
        matches!(self, Expr::Symbol(s) if s.name() == name)
    }

    pub fn is_atom(&self) -> bool {
        !matches!(self, Expr::Compound(_))
    }

    /// The head of the expression; atoms have synthetic heads.
    pub fn head(&self) -> Expr {
        match self {
            Expr::Symbol(_) => Expr::sym(names::SYMBOL),
            Expr::Integer(_) => Expr::sym(names::INTEGER),
            Expr::String(_) => Expr::sym(names::STRING),
            Expr::Compound(c) => c.head.clone(),
        }
    }

    /// Arguments of a compound, empty for atoms.
    pub fn args(&self) -> &[Expr] {
        match self {
            Expr::Compound(c) => &c.args,
            _ => &[],
        }
    }

    /// True when this is a compound whose head is the symbol `name`.
    pub fn has_head(&self, name: &str) -> bool {
        match self {
            Expr::Compound(c) => c.head.is_symbol(name),
            _ => false,
        }
    }

    /// Arguments of `name[...]`, if this is one.
    pub fn args_of(&self, name: &str) -> Option<&[Expr]> {
        match self {
            Expr::Compound(c) if c.head.is_symbol(name) => Some(&c.args),
            _ => None,
        }
    }

    /// The symbol at the bottom of a (possibly curried) head chain:
    /// `f` for `f`, `f[x]` and `f[x][y]`.
    pub fn root_symbol(&self) -> Option<&Symbol> {
        let mut cur = self;
        loop {
            match cur {
                Expr::Symbol(s) => return Some(s),
                Expr::Compound(c) => cur = &c.head,
                _ => return None,
            }
        }
    }

    pub fn is_list(&self) -> bool {
        self.has_head(names::LIST)
    }

    /// Deepest nesting of compounds; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Compound(c) => {
                let inner = c.args.iter().map(Expr::depth).max().unwrap_or(0);
                1 + inner.max(c.head.depth())
            }
            _ => 1,
        }
    }

    /// Largest argument count of any compound in the tree.
    pub fn max_arity(&self) -> usize {
        match self {
            Expr::Compound(c) => c
                .args
                .iter()
                .map(Expr::max_arity)
                .chain([c.args.len(), c.head.max_arity()])
                .max()
                .unwrap_or(0),
            _ => 0,
        }
    }

    /// Number of subexpressions (including self) satisfying `pred`.
    pub fn count(&self, pred: &dyn Fn(&Expr) -> bool) -> usize {
        let own = usize::from(pred(self));
        match self {
            Expr::Compound(c) => {
                own + c.head.count(pred) + c.args.iter().map(|a| a.count(pred)).sum::<usize>()
            }
            _ => own,
        }
    }

    /// True if the symbol occurs anywhere in the tree.
    pub fn mentions(&self, name: &Symbol) -> bool {
        match self {
            Expr::Symbol(s) => s == name,
            Expr::Compound(c) if c.symbols & symbol_bit(name) == 0 => false,
            Expr::Compound(c) => c.head.mentions(name) || c.args.iter().any(|a| a.mentions(name)),
            _ => false,
        }
    }
}

impl From<i64> for Expr {
    fn from(value: i64) -> Self {
        Expr::Integer(value)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::Symbol(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::print(self))
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::print::print(self))
    }
}

/// A value captured by a pattern variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Capture {
    One(Expr),
    /// Spliced into the enclosing argument list on substitution.
    Seq(Vec<Expr>),
}

impl Capture {
    /// The capture as a single expression; sequences become `Sequence[...]`.
    pub fn to_expr(&self) -> Expr {
        match self {
            Capture::One(e) => e.clone(),
            Capture::Seq(items) => Expr::call(names::SEQUENCE, items.clone()),
        }
    }
}

/// Pattern-variable captures produced by a match.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings {
    entries: Vec<(Symbol, Capture)>,
}

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, name: &str) -> Option<&Capture> {
        self.entries
            .iter()
            .find(|(s, _)| s.name() == name)
            .map(|(_, c)| c)
    }

    /// The single expression bound to `name`, if it is not a sequence.
    pub fn expr(&self, name: &str) -> Option<&Expr> {
        match self.get(name) {
            Some(Capture::One(e)) => Some(e),
            _ => None,
        }
    }

    /// Adds a capture, or checks it against an existing one. Returns false
    /// on conflict, leaving the bindings unchanged.
    pub fn bind(&mut self, name: Symbol, value: Capture) -> bool {
        match self.entries.iter().find(|(s, _)| *s == name) {
            Some((_, existing)) => *existing == value,
            None => {
                self.entries.push((name, value));
                true
            }
        }
    }

    pub fn with(mut self, name: &str, value: Capture) -> Self {
        self.bind(Symbol::new(name), value);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Capture)> {
        self.entries.iter().map(|(s, c)| (s, c))
    }

    pub fn names(&self) -> impl Iterator<Item = &Symbol> {
        self.entries.iter().map(|(s, _)| s)
    }

    fn without(&self, shadowed: &[Symbol]) -> Bindings {
        Bindings {
            entries: self
                .entries
                .iter()
                .filter(|(s, _)| !shadowed.contains(s))
                .cloned()
                .collect(),
        }
    }

    fn lookup(&self, name: &Symbol) -> Option<&Capture> {
        self.entries.iter().find(|(s, _)| s == name).map(|(_, c)| c)
    }
}

/// Parameters bound by `Function[params, body]`: a symbol or a list of them.
pub(crate) fn function_params(params: &Expr) -> Option<Vec<Symbol>> {
    match params {
        Expr::Symbol(s) => Some(vec![s.clone()]),
        e if e.is_list() => e.args().iter().map(|a| a.as_symbol().cloned()).collect(),
        _ => None,
    }
}

/// Replaces every free occurrence of a bound name.
///
/// Sequence captures are spliced into the argument list of the enclosing
/// compound; anywhere else they appear as `Sequence[...]`. Parameters of
/// `Function` shadow bindings of the same name inside its body.
pub fn substitute(e: &Expr, b: &Bindings) -> Expr {
    if b.is_empty() {
        return e.clone();
    }
    let mask = b.names().fold(0, |m, s| m | symbol_bit(s));
    substitute_masked(e, b, mask)
}

fn substitute_masked(e: &Expr, b: &Bindings, mask: u64) -> Expr {
    match e {
        Expr::Symbol(s) => match b.lookup(s) {
            Some(c) => c.to_expr(),
            None => e.clone(),
        },
        Expr::Compound(c) if c.symbols & mask == 0 => e.clone(),
        Expr::Compound(c) => {
            if c.head.is_symbol(names::FUNCTION) && c.args.len() == 2 {
                if let Some(params) = function_params(&c.args[0]) {
                    let inner = b.without(&params);
                    return Expr::compound(
                        c.head.clone(),
                        vec![
                            c.args[0].clone(),
                            substitute_masked(&c.args[1], &inner, mask),
                        ],
                    );
                }
            }
            let head = substitute_masked(&c.head, b, mask);
            let mut args = Vec::with_capacity(c.args.len());
            for arg in &c.args {
                match arg {
                    Expr::Symbol(s) => match b.lookup(s) {
                        Some(Capture::Seq(items)) => args.extend(items.iter().cloned()),
                        Some(Capture::One(v)) => args.push(v.clone()),
                        None => args.push(arg.clone()),
                    },
                    _ => args.push(substitute_masked(arg, b, mask)),
                }
            }
            if head == c.head && args == c.args {
                return e.clone();
            }
            Expr::compound(head, args)
        }
        _ => e.clone(),
    }
}

static FRESH_COUNTER: AtomicU64 = AtomicU64::new(0);

/// A symbol that cannot collide with any user-written or previously
/// generated name: `$` (which the parser rejects), the alphabetic
/// characters of `hint`, then a process-wide counter.
pub fn fresh_symbol(hint: &str) -> Expr {
    let n = FRESH_COUNTER.fetch_add(1, Ordering::Relaxed) + 1;
    let stem: String = hint.chars().filter(|c| c.is_ascii_alphabetic()).collect();
    Expr::Symbol(Symbol(Arc::from(format!("${stem}{n}"))))
}
