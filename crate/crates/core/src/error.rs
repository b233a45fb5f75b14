use crate::desugar::DesugarError;
use crate::monad::MonadTypeError;
use crate::parser::ParseError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("rewrite budget of {budget} steps exhausted (likely non-termination)")]
    BudgetExhausted { budget: u64 },
    #[error("evaluation nested deeper than {limit} levels")]
    DepthExceeded { limit: usize },
    #[error("malformed definition left-hand side `{lhs}`: {reason}")]
    MalformedLhs { lhs: String, reason: &'static str },
    #[error(transparent)]
    MonadType(#[from] MonadTypeError),
    #[error("monad `{0}` is not registered and has no pattern definition")]
    UnknownMonad(String),
    #[error("monad `{0}` is already registered")]
    DuplicateMonad(String),
    #[error("no pole differs from {i} and {j} (poles are 1, 2, 3 and must differ)")]
    NoSuchPole { i: i64, j: i64 },
    #[error(transparent)]
    MalformedDo(#[from] DesugarError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Native(String),
    #[error("{source}\nrewrite trace (last {shown} of {total} steps):\n{trace}")]
    Traced {
        source: Box<EvalError>,
        shown: usize,
        total: usize,
        trace: String,
    },
}

impl EvalError {
    /// The error with any trace context removed.
    pub fn root(&self) -> &EvalError {
        match self {
            EvalError::Traced { source, .. } => source.root(),
            e => e,
        }
    }
}
