//! Randomised checking of the three monad laws.
//!
//! Every case evaluates both sides of a law with `bnd[m]` and compares the
//! normal forms structurally. An evaluation error on either side counts as
//! a failure.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::EvalError;
use crate::expr::{Expr, Symbol};
use crate::monad::{bnd_expr, return_expr};
use crate::print::print;
use crate::rewriter::{Engine, EvalConfig};
use crate::stdlib::{make_tower, MoveRecord, TowerState};

/// Source of random law inputs for one monad.
pub trait LawGen {
    /// A plain value `x` for `return[m][x]`.
    fn value(&mut self, rng: &mut ChaCha8Rng) -> Expr;
    /// An `m` value.
    fn monadic(&mut self, rng: &mut ChaCha8Rng) -> Expr;
    /// A Kleisli arrow: something that, applied to a value, gives an `m` value.
    fn arrow(&mut self, rng: &mut ChaCha8Rng) -> Expr;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    LeftIdentity,
    RightIdentity,
    Associativity,
}

impl Law {
    pub const ALL: [Law; 3] = [Law::LeftIdentity, Law::RightIdentity, Law::Associativity];
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::LeftIdentity => "left-identity",
            Law::RightIdentity => "right-identity",
            Law::Associativity => "associativity",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Counterexample {
    pub left: Expr,
    pub right: Expr,
    pub left_value: Result<Expr, EvalError>,
    pub right_value: Result<Expr, EvalError>,
}

fn show(r: &Result<Expr, EvalError>) -> String {
    match r {
        Ok(v) => print(v),
        Err(e) => format!("error: {}", e.root()),
    }
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} => {}  vs  {} => {}",
            print(&self.left),
            show(&self.left_value),
            print(&self.right),
            show(&self.right_value)
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawResult {
    pub law: Law,
    pub cases: usize,
    pub failures: usize,
    pub first: Option<Counterexample>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawReport {
    pub monad: Symbol,
    pub seed: u64,
    pub results: Vec<LawResult>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.failures == 0)
    }

    pub fn result(&self, law: Law) -> &LawResult {
        self.results
            .iter()
            .find(|r| r.law == law)
            .expect("every law is checked")
    }
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "monad {} (seed {})", self.monad, self.seed)?;
        writeln!(
            f,
            "{:<16} {:>7} {:>9}  first-counterexample",
            "law", "cases", "failures"
        )?;
        for r in &self.results {
            let first = r
                .first
                .as_ref()
                .map_or_else(|| "-".to_string(), |c| c.to_string());
            writeln!(
                f,
                "{:<16} {:>7} {:>9}  {}",
                r.law.to_string(),
                r.cases,
                r.failures,
                first
            )?;
        }
        Ok(())
    }
}

/// Checks every law on `cases` generated inputs.
pub fn check_laws(
    engine: &Engine,
    m: &str,
    generator: &mut dyn LawGen,
    cases: usize,
    seed: u64,
    cfg: &EvalConfig,
) -> LawReport {
    let monad = Symbol::new(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results: Vec<LawResult> = Law::ALL
        .iter()
        .map(|&law| LawResult {
            law,
            cases: 0,
            failures: 0,
            first: None,
        })
        .collect();
    for _ in 0..cases {
        let x = generator.value(&mut rng);
        let ma = generator.monadic(&mut rng);
        let f = generator.arrow(&mut rng);
        let g = generator.arrow(&mut rng);
        for result in &mut results {
            let (left, right) = sides(&monad, result.law, &x, &ma, &f, &g);
            let left_value = engine.evaluate(&left, cfg);
            let right_value = engine.evaluate(&right, cfg);
            result.cases += 1;
            let ok = matches!((&left_value, &right_value), (Ok(a), Ok(b)) if a == b);
            if !ok {
                result.failures += 1;
                result.first.get_or_insert(Counterexample {
                    left,
                    right,
                    left_value,
                    right_value,
                });
            }
        }
    }
    LawReport {
        monad,
        seed,
        results,
    }
}

fn sides(m: &Symbol, law: Law, x: &Expr, ma: &Expr, f: &Expr, g: &Expr) -> (Expr, Expr) {
    match law {
        Law::LeftIdentity => (
            bnd_expr(m, return_expr(m, x.clone()), f.clone()),
            f.apply(vec![x.clone()]),
        ),
        Law::RightIdentity => (bnd_expr(m, ma.clone(), return_of(m)), ma.clone()),
        Law::Associativity => {
            let v = Expr::sym("v");
            let inner = bnd_expr(m, f.apply(vec![v.clone()]), g.clone());
            (
                bnd_expr(m, bnd_expr(m, ma.clone(), f.clone()), g.clone()),
                bnd_expr(m, ma.clone(), Expr::function(v, inner)),
            )
        }
    }
}

fn return_of(m: &Symbol) -> Expr {
    Expr::call("return", vec![Expr::Symbol(m.clone())])
}

fn lambda(body: impl FnOnce(Expr) -> Expr) -> Expr {
    let x = Expr::sym("x");
    Expr::function(x.clone(), body(x))
}

fn small_int(rng: &mut ChaCha8Rng) -> Expr {
    Expr::int(rng.gen_range(-9..=9))
}

pub struct MaybeGen;

impl LawGen for MaybeGen {
    fn value(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        small_int(rng)
    }

    fn monadic(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        if rng.gen_bool(0.25) {
            Expr::sym("nothing")
        } else {
            Expr::call("just", vec![small_int(rng)])
        }
    }

    fn arrow(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        let k = small_int(rng);
        match rng.gen_range(0..5) {
            0 => return_of(&Symbol::new("maybe")),
            1 => lambda(|_| Expr::sym("nothing")),
            2 => lambda(|x| Expr::call("just", vec![Expr::call("Plus", vec![x, k])])),
            3 => lambda(|x| Expr::call("just", vec![Expr::call("Times", vec![x, k])])),
            _ => lambda(|x| Expr::call("just", vec![Expr::list(vec![x.clone(), x])])),
        }
    }
}

pub struct ListGen;

impl LawGen for ListGen {
    fn value(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        small_int(rng)
    }

    fn monadic(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        let len = rng.gen_range(0..=4);
        Expr::list((0..len).map(|_| small_int(rng)).collect())
    }

    fn arrow(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        let k = small_int(rng);
        match rng.gen_range(0..5) {
            0 => return_of(&Symbol::new("list")),
            1 => lambda(|_| Expr::list(vec![])),
            2 => lambda(|x| Expr::list(vec![x.clone(), Expr::call("Plus", vec![x, k])])),
            3 => lambda(|x| Expr::list(vec![Expr::call("Times", vec![x, k])])),
            _ => lambda(|x| Expr::list(vec![x.clone(), x.clone(), x])),
        }
    }
}

/// Random legal tower states and `moveDiscs`-based arrows.
pub struct HanoiGen;

impl HanoiGen {
    fn legal_moves(state: &TowerState) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for from in 1..=3 {
            for to in 1..=3 {
                if from != to && state.apply_move(from, to).is_ok() {
                    out.push((from, to));
                }
            }
        }
        out
    }

    /// A random walk of legal moves from `start`.
    fn walk(
        rng: &mut ChaCha8Rng,
        start: TowerState,
        steps: usize,
    ) -> (TowerState, Vec<MoveRecord>) {
        let mut state = start;
        let mut log = Vec::new();
        for _ in 0..steps {
            let Some(&(from, to)) = Self::legal_moves(&state).choose(rng) else {
                break;
            };
            state = state
                .apply_move(from, to)
                .expect("chosen among legal moves");
            log.push(MoveRecord {
                from,
                to,
                state: state.clone(),
            });
        }
        (state, log)
    }

    fn state(rng: &mut ChaCha8Rng) -> TowerState {
        let discs = rng.gen_range(0..=4);
        let steps = rng.gen_range(0..=8);
        Self::walk(rng, make_tower(discs), steps).0
    }
}

impl LawGen for HanoiGen {
    fn value(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        Self::state(rng).to_expr()
    }

    fn monadic(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        let start = Self::state(rng);
        let steps = rng.gen_range(0..=4);
        let (state, moves) = Self::walk(rng, start, steps);
        crate::stdlib::HT { state, moves }.to_expr()
    }

    fn arrow(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        if rng.gen_bool(0.2) {
            return return_of(&Symbol::new("hT"));
        }
        let from = rng.gen_range(1..=3);
        let to = *[1, 2, 3]
            .iter()
            .filter(|&&p| p != from)
            .collect::<Vec<_>>()
            .choose(rng)
            .expect("two other poles");
        let n = rng.gen_range(1..=2);
        Expr::call(
            "moveDiscs",
            vec![Expr::int(from), Expr::int(*to), Expr::int(n)],
        )
    }
}

/// Inputs for a monad the harness knows nothing about: values are small
/// integers and arrows are built from `return[m]`.
pub struct GenericGen {
    monad: Symbol,
}

impl GenericGen {
    pub fn new(m: &str) -> GenericGen {
        GenericGen {
            monad: Symbol::new(m),
        }
    }
}

impl LawGen for GenericGen {
    fn value(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        small_int(rng)
    }

    fn monadic(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        return_expr(&self.monad, small_int(rng))
    }

    fn arrow(&mut self, rng: &mut ChaCha8Rng) -> Expr {
        let m = self.monad.clone();
        let k = small_int(rng);
        match rng.gen_range(0..3) {
            0 => return_of(&m),
            1 => lambda(|x| return_expr(&m, Expr::call("Plus", vec![x, k]))),
            _ => lambda(|x| return_expr(&m, Expr::list(vec![x.clone(), x]))),
        }
    }
}

/// The generator used for `m`: a dedicated one for the standard monads,
/// [`GenericGen`] otherwise.
pub fn generator_for(m: &str) -> Box<dyn LawGen> {
    match m {
        "maybe" => Box::new(MaybeGen),
        "list" => Box::new(ListGen),
        "hT" => Box::new(HanoiGen),
        _ => Box::new(GenericGen::new(m)),
    }
}
