//! The standard monads (`maybe`, `list`) and the Tower of Hanoi writer
//! monad `hT` with its solver.

use std::fmt;

use crate::error::EvalError;
use crate::expr::{Expr, Symbol};
use crate::monad::MonadDef;
use crate::parser::parse;
use crate::rewriter::{Engine, EvalConfig};

/// The Hanoi program, in the engine's own syntax.
pub const HANOI_PRELUDE: &str = r#"(* tower configurations and move records *)
towers := {_List, _List, _List}
move := {_ -> _, {_List, _List, _List}}

pattern[hT] := hT[towers, {move ...}]
return[hT][x_] := hT[x, {}]
bind[hT][ma_, aTomb_] :=
   With[
      {val = aTomb[grab[ma]]},
      hT[grab[val], join[rest[ma], rest[val]]]
   ]

grab[ma : pattern[hT]] := Part[ma, 1]
rest[ma : pattern[hT]] := Part[ma, 2]
join[a : {move ...}, b : {move ...}] := Join[a, b]

makeTower[n_Integer] := {Range[n], {}, {}}

moveDiscs[from_, to_, 1][tower : towers] :=
   With[
      {newtower = ReplacePart[
         ReplacePart[
            tower,
            to -> Join[Take[Part[tower, from], 1], Part[tower, to]]
         ],
         from -> Drop[Part[tower, from], 1]
      ]},
      hT[newtower, {{from -> to, newtower}}]
   ]

moveDiscs[from_, to_, n_][tower : towers] :=
   do[hT][
      toOther <- moveDiscs[from, other[from, to], Subtract[n, 1]][tower],
      toGoal <- moveDiscs[from, to, 1][toOther],
      finalMove <- moveDiscs[other[from, to], to, Subtract[n, 1]][toGoal],
      return[hT][finalMove]
   ]
"#;

fn maybe() -> MonadDef {
    MonadDef::native(
        "maybe",
        vec![Expr::sym("nothing"), parse("just[_]").expect("pattern")],
        |_, x| Ok(Expr::call("just", vec![x.clone()])),
        |ev, ma, f| match ma.args_of("just") {
            Some([x]) => ev.apply(f, vec![x.clone()]).map(Some),
            _ if ma.is_symbol("nothing") => Ok(Some(ma.clone())),
            _ => Ok(None),
        },
    )
}

fn list() -> MonadDef {
    MonadDef::native(
        "list",
        vec![parse("_List").expect("pattern")],
        |_, x| Ok(Expr::list(vec![x.clone()])),
        |ev, ma, f| {
            let mut out = Vec::new();
            for x in ma.args() {
                let ys = ev.apply(f, vec![x.clone()])?;
                if !ys.is_list() {
                    return Ok(None);
                }
                out.extend(ys.args().iter().cloned());
            }
            Ok(Some(Expr::list(out)))
        },
    )
}

/// Adds `maybe`, `list`, `hT` and the Hanoi definitions to `engine`.
pub fn install(engine: &mut Engine) -> Result<(), EvalError> {
    engine.register_monad(maybe())?;
    engine.register_monad(list())?;
    engine.define_native("other[i_Integer, j_Integer]", |b, _| {
        let i = b.expr("i").and_then(Expr::as_integer).expect("bound");
        let j = b.expr("j").and_then(Expr::as_integer).expect("bound");
        other(i, j).map(|k| Some(Expr::int(k)))
    })?;
    engine.load(HANOI_PRELUDE)?;
    let pattern = engine.eval(&parse("pattern[hT]")?)?;
    engine.register_monad(MonadDef::from_rules("hT", vec![pattern]))?;
    Ok(())
}

/// A fresh engine with the standard library loaded.
pub fn engine() -> Engine {
    let mut engine = Engine::new();
    install(&mut engine).expect("the standard library loads");
    engine
}

/// The pole that is neither `i` nor `j`.
pub fn other(i: i64, j: i64) -> Result<i64, EvalError> {
    if i == j || !(1..=3).contains(&i) || !(1..=3).contains(&j) {
        return Err(EvalError::NoSuchPole { i, j });
    }
    Ok(6 - i - j)
}

/// Three poles, each listing disc sizes from the top down.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerState {
    pub poles: [Vec<i64>; 3],
}

impl TowerState {
    pub fn to_expr(&self) -> Expr {
        Expr::list(
            self.poles
                .iter()
                .map(|p| Expr::list(p.iter().copied().map(Expr::int).collect()))
                .collect(),
        )
    }

    pub fn from_expr(e: &Expr) -> Option<TowerState> {
        let [a, b, c] = e.is_list().then(|| e.args())? else {
            return None;
        };
        let pole = |p: &Expr| -> Option<Vec<i64>> {
            p.is_list().then_some(())?;
            p.args().iter().map(Expr::as_integer).collect()
        };
        Some(TowerState {
            poles: [pole(a)?, pole(b)?, pole(c)?],
        })
    }

    /// No disc sits on a smaller one.
    pub fn is_ordered(&self) -> bool {
        self.poles.iter().all(|p| p.windows(2).all(|w| w[0] < w[1]))
    }

    pub fn discs(&self) -> Vec<i64> {
        let mut all: Vec<i64> = self.poles.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    /// Moves the top disc of pole `from` onto pole `to`, if that is legal.
    pub fn apply_move(&self, from: i64, to: i64) -> Result<TowerState, ReplayError> {
        let (Some(f), Some(t)) = (pole_index(from), pole_index(to)) else {
            return Err(ReplayError::BadPole { from, to });
        };
        if f == t {
            return Err(ReplayError::BadPole { from, to });
        }
        let Some(&disc) = self.poles[f].first() else {
            return Err(ReplayError::EmptySource { from });
        };
        if let Some(&below) = self.poles[t].first() {
            if below < disc {
                return Err(ReplayError::LargerOnSmaller { disc, below });
            }
        }
        let mut next = self.clone();
        next.poles[f].remove(0);
        next.poles[t].insert(0, disc);
        Ok(next)
    }
}

fn pole_index(p: i64) -> Option<usize> {
    (1..=3).contains(&p).then(|| (p - 1) as usize)
}

impl fmt::Display for TowerState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

/// `{from -> to, state}`: one transfer and the configuration after it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRecord {
    pub from: i64,
    pub to: i64,
    pub state: TowerState,
}

impl MoveRecord {
    pub fn to_expr(&self) -> Expr {
        Expr::list(vec![
            Expr::rule(Expr::int(self.from), Expr::int(self.to)),
            self.state.to_expr(),
        ])
    }

    pub fn from_expr(e: &Expr) -> Option<MoveRecord> {
        let [transfer, state] = e.is_list().then(|| e.args())? else {
            return None;
        };
        let [from, to] = transfer.args_of(crate::expr::names::RULE)? else {
            return None;
        };
        Some(MoveRecord {
            from: from.as_integer()?,
            to: to.as_integer()?,
            state: TowerState::from_expr(state)?,
        })
    }
}

/// An `hT[state, {records...}]` value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HT {
    pub state: TowerState,
    pub moves: Vec<MoveRecord>,
}

impl HT {
    pub fn to_expr(&self) -> Expr {
        Expr::call(
            "hT",
            vec![
                self.state.to_expr(),
                Expr::list(self.moves.iter().map(MoveRecord::to_expr).collect()),
            ],
        )
    }

    pub fn from_expr(e: &Expr) -> Option<HT> {
        let [state, moves] = e.args_of("hT")? else {
            return None;
        };
        moves.is_list().then_some(())?;
        Some(HT {
            state: TowerState::from_expr(state)?,
            moves: moves
                .args()
                .iter()
                .map(MoveRecord::from_expr)
                .collect::<Option<_>>()?,
        })
    }
}

/// `{{1, ..., n}, {}, {}}`.
pub fn make_tower(n: usize) -> TowerState {
    TowerState {
        poles: [(1..=n as i64).collect(), Vec::new(), Vec::new()],
    }
}

/// `moveDiscs[from, to, n][tower]`.
pub fn move_discs_expr(from: i64, to: i64, n: i64, tower: Expr) -> Expr {
    Expr::call(
        "moveDiscs",
        vec![Expr::int(from), Expr::int(to), Expr::int(n)],
    )
    .apply(vec![tower])
}

/// `moveDiscs[1, 3, n][makeTower[n]]`.
pub fn hanoi_expr(n: i64) -> Expr {
    move_discs_expr(1, 3, n, Expr::call("makeTower", vec![Expr::int(n)]))
}

/// Evaluates `moveDiscs[from, to, n][tower]` with a stdlib engine.
pub fn move_discs_n(
    engine: &Engine,
    from: i64,
    to: i64,
    n: i64,
    tower: &TowerState,
    cfg: &EvalConfig,
) -> Result<HT, EvalError> {
    let out = engine.evaluate(&move_discs_expr(from, to, n, tower.to_expr()), cfg)?;
    HT::from_expr(&out)
        .ok_or_else(|| EvalError::Native(format!("moveDiscs did not produce an hT value: {out}")))
}

/// Solves the `n`-disc puzzle from pole 1 to pole 3.
pub fn solve(engine: &Engine, n: i64, cfg: &EvalConfig) -> Result<Expr, EvalError> {
    engine.evaluate(&hanoi_expr(n), cfg)
}

/// Step budget that comfortably covers solving `n` discs.
pub fn hanoi_budget(n: u32) -> u64 {
    crate::rewriter::DEFAULT_BUDGET.max(64u64 << n.min(40))
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("move {from}->{to} names a missing or repeated pole")]
    BadPole { from: i64, to: i64 },
    #[error("pole {from} is empty")]
    EmptySource { from: i64 },
    #[error("disc {disc} placed on smaller disc {below}")]
    LargerOnSmaller { disc: i64, below: i64 },
    #[error("recorded snapshot {recorded} differs from replayed {replayed}")]
    Snapshot {
        recorded: Box<TowerState>,
        replayed: Box<TowerState>,
    },
    #[error("final state {claimed} differs from replayed {replayed}")]
    Final {
        claimed: Box<TowerState>,
        replayed: Box<TowerState>,
    },
}

/// Replays `ht`'s records from `initial`, checking every move is legal and
/// every snapshot and the final state agree with the replay.
pub fn replay(initial: &TowerState, ht: &HT) -> Result<(), (usize, ReplayError)> {
    let mut state = initial.clone();
    for (i, m) in ht.moves.iter().enumerate() {
        state = state.apply_move(m.from, m.to).map_err(|e| (i, e))?;
        if state != m.state {
            return Err((
                i,
                ReplayError::Snapshot {
                    recorded: Box::new(m.state.clone()),
                    replayed: Box::new(state),
                },
            ));
        }
    }
    if state != ht.state {
        return Err((
            ht.moves.len(),
            ReplayError::Final {
                claimed: Box::new(ht.state.clone()),
                replayed: Box::new(state),
            },
        ));
    }
    Ok(())
}

/// Names of the monads [`install`] registers.
pub fn monad_names() -> [Symbol; 3] {
    [Symbol::new("maybe"), Symbol::new("list"), Symbol::new("hT")]
}
