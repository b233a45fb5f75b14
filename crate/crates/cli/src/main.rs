use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use monadwl_core::laws::{check_laws, generator_for};
use monadwl_core::monad::type_patterns;
use monadwl_core::rewriter::DEFAULT_BUDGET;
use monadwl_core::stdlib::{self, hanoi_budget, TowerState, HT};
use monadwl_core::{
    desugar_expr, format_trace, parse, print, print_pretty, DoBlock, Engine, EvalConfig, EvalError, Expr, Session,
    Symbol, TraceStep,
};

/// Term rewriting with pattern-typed monads.
#[derive(Parser)]
#[command(name = "monadwl", version)]
struct Cli {
    /// Print every rewrite step to stderr.
    #[arg(long, global = true)]
    trace: bool,
    /// Maximum number of rewrite steps per evaluation.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
    /// Multi-line output for large results.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a program file, printing the value of each expression statement.
    Run { file: PathBuf },
    /// Evaluate one expression with the standard library loaded.
    Eval {
        expr: String,
        /// Program to load first.
        #[arg(long)]
        load: Option<PathBuf>,
    },
    /// Print the expansion of a do block.
    Desugar { expr: String },
    /// Solve the Tower of Hanoi for n discs (1 to 20).
    Hanoi {
        n: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the monad laws on random inputs.
    Laws {
        monad: String,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Program defining the monad.
        #[arg(long)]
        load: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Failure {
        let code = match e.root() {
            EvalError::Parse(_) => 2,
            EvalError::MonadType(_) => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

struct Ctx {
    cli_budget: Option<u64>,
    trace: bool,
    pretty: bool,
}

impl Ctx {
    fn config(&self, default_budget: u64) -> EvalConfig {
        EvalConfig::default()
            .with_budget(self.cli_budget.unwrap_or(default_budget))
            .with_trace(self.trace)
    }

    fn show(&self, e: &Expr) -> String {
        if self.pretty {
            print_pretty(e, 80)
        } else {
            print(e)
        }
    }

    fn emit_trace(&self, steps: &[TraceStep]) {
        if self.trace && !steps.is_empty() {
            eprint!("{}", format_trace(steps));
        }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn std_engine() -> Result<Engine, Failure> {
    let mut engine = Engine::new();
    stdlib::install(&mut engine)?;
    Ok(engine)
}

fn load_into(engine: &mut Engine, path: &Option<PathBuf>, cfg: &EvalConfig) -> Result<(), Failure> {
    if let Some(path) = path {
        let src = read(path)?;
        engine.run(&src, cfg)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonMove {
    from: i64,
    to: i64,
    state: [Vec<i64>; 3],
}

#[derive(Serialize)]
struct JsonSolution {
    #[serde(rename = "final")]
    final_state: [Vec<i64>; 3],
    moves: Vec<JsonMove>,
}

fn poles(t: &TowerState) -> [Vec<i64>; 3] {
    t.poles.clone()
}

fn execute(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    let ctx = Ctx {
        cli_budget: cli.budget,
        trace: cli.trace,
        pretty: cli.pretty,
    };
    let io = |e: std::io::Error| Failure::usage(format!("write failed: {e}"));
    match cli.command {
        Command::Run { file } => {
            let src = read(&file)?;
            let mut engine = std_engine()?;
            let cfg = ctx.config(DEFAULT_BUDGET);
            let mut written = Ok(());
            engine.run_each(&src, &cfg, |r| {
                ctx.emit_trace(&r.trace);
                if written.is_ok() {
                    written = writeln!(out, "{}", ctx.show(&r.value));
                }
            })?;
            written.map_err(io)?;
        }
        Command::Eval { expr, load } => {
            let mut engine = std_engine()?;
            let cfg = ctx.config(DEFAULT_BUDGET);
            load_into(&mut engine, &load, &cfg)?;
            let e = monadwl_core::desugar::expand(&parse(&expr).map_err(EvalError::from)?)
                .map_err(EvalError::from)?;
            let (value, steps) = engine.evaluate_traced(&e, &cfg);
            ctx.emit_trace(&steps);
            writeln!(out, "{}", ctx.show(&value?)).map_err(io)?;
        }
        Command::Desugar { expr } => {
            let e = parse(&expr).map_err(EvalError::from)?;
            if DoBlock::from_expr(&e).map_err(EvalError::from)?.is_none() {
                return Err(Failure::usage(format!("`{}` is not a do[m][...] block", print(&e))));
            }
            let expanded = desugar_expr(&e).map_err(EvalError::from)?;
            writeln!(out, "{}", ctx.show(&expanded)).map_err(io)?;
        }
        Command::Hanoi { n, format } => {
            if !(1..=20).contains(&n) {
                return Err(Failure::usage(format!("n must be between 1 and 20, got {n}")));
            }
            let engine = std_engine()?;
            let cfg = ctx.config(hanoi_budget(n as u32));
            let (value, steps) = engine.evaluate_traced(&stdlib::hanoi_expr(n), &cfg);
            ctx.emit_trace(&steps);
            let value = value?;
            match format {
                Format::Text => writeln!(out, "{}", ctx.show(&value)).map_err(io)?,
                Format::Json => {
                    let ht = HT::from_expr(&value)
                        .ok_or_else(|| Failure::usage(format!("not an hT value: {}", print(&value))))?;
                    let solution = JsonSolution {
                        final_state: poles(&ht.state),
                        moves: ht
                            .moves
                            .iter()
                            .map(|m| JsonMove {
                                from: m.from,
                                to: m.to,
                                state: poles(&m.state),
                            })
                            .collect(),
                    };
                    let text = if ctx.pretty {
                        serde_json::to_string_pretty(&solution)
                    } else {
                        serde_json::to_string(&solution)
                    }
                    .map_err(|e| Failure::usage(e.to_string()))?;
                    writeln!(out, "{text}").map_err(io)?;
                }
            }
        }
        Command::Laws {
            monad,
            cases,
            seed,
            load,
        } => {
            let mut engine = std_engine()?;
            let cfg = ctx.config(DEFAULT_BUDGET);
            load_into(&mut engine, &load, &cfg)?;
            let m = Symbol::new(&monad);
            if type_patterns(&mut Session::new(&engine, &cfg), &m).is_err() {
                return Err(Failure::usage(format!("unknown monad `{monad}`")));
            }
            let cfg = cfg.with_trace(false);
            let report = check_laws(&engine, &monad, generator_for(&monad).as_mut(), cases, seed, &cfg);
            write!(out, "{report}").map_err(io)?;
            if !report.passed() {
                return Err(Failure::usage(format!("monad `{monad}` violates the monad laws")));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = execute(cli, &mut out);
    let flushed = out.flush();
    match (result, flushed) {
        (Ok(()), Ok(())) => ExitCode::SUCCESS,
        (Ok(()), Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        (Err(f), _) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
