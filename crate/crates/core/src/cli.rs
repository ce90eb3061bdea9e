//! Command-line front end.

use std::fs;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::dialogue::{legal_moves, trace_word, traces as traces_from, Dialogue, Mode};
use crate::error::{Error, Result};
use crate::format;
use crate::gen;
use crate::semantics::{check_bijection, normalize_syntactically, strategy_to_term, term_to_strategy, DEFAULT_BUDGET};
use crate::semantics::normalize::normalize_via_games_with_budget;
use crate::strategy::{enumerate_strategies, Strategy};
use crate::term::{typecheck, Term};
use crate::transition::{State, TransitionSystem};
use crate::types::TypeExpr;
use crate::universe::ImportUniverse;

#[derive(Parser, Debug)]
#[command(name = "hypergame", version, about = "Hypergame semantics for System F")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Bound on dialogue length or graph depth.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Bound on term size.
    #[arg(long = "term-size", global = true)]
    pub term_size: Option<usize>,
    /// Extra import candidates, `;`-separated.
    #[arg(long, global = true)]
    pub universe: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, global = true, value_enum)]
    pub engine: Option<EngineArg>,
    /// Emit Graphviz.
    #[arg(long, global = true)]
    pub dot: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for generating a random input term.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Interaction step budget.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the prenex form of a type.
    Prenex { ty: String },
    /// Print the reachable transition graph of a type.
    Graph { ty: String },
    /// List the traces of a type's transition system.
    Traces { ty: String },
    /// Enumerate the copycat strategies on a type.
    Strategies { ty: String },
    /// Compile a closed term to its strategy.
    Compile { term: String },
    /// Read a strategy file back as a term of the given type.
    Readback { ty: String, file: PathBuf },
    /// Normalize a closed term; `--seed` generates one instead.
    Normalize { term: Option<String> },
    /// Compare normal terms with strategies.
    Check { ty: String },
    /// Play as Opponent against a term's strategy.
    Play { term: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Lambda,
    F,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Games,
    Syntax,
    Both,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Prenex { .. } => "prenex",
            Command::Graph { .. } => "graph",
            Command::Traces { .. } => "traces",
            Command::Strategies { .. } => "strategies",
            Command::Compile { .. } => "compile",
            Command::Readback { .. } => "readback",
            Command::Normalize { .. } => "normalize",
            Command::Check { .. } => "check",
            Command::Play { .. } => "play",
        }
    }

    fn allowed(&self) -> &'static [&'static str] {
        match self {
            Command::Prenex { .. } => &[],
            Command::Graph { .. } => &["depth", "universe", "dot", "out"],
            Command::Traces { .. } => &["depth", "universe", "out"],
            Command::Strategies { .. } => &["depth", "universe", "mode", "out"],
            Command::Compile { .. } => &["out"],
            Command::Readback { .. } => &[],
            Command::Normalize { .. } => &["engine", "out", "seed", "budget", "term-size"],
            Command::Check { .. } => &["depth", "term-size", "universe", "mode"],
            Command::Play { .. } => &["out"],
        }
    }
}

impl Cli {
    fn given(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let flags: [(&'static str, bool); 9] = [
            ("depth", self.depth.is_some()),
            ("term-size", self.term_size.is_some()),
            ("universe", self.universe.is_some()),
            ("mode", self.mode.is_some()),
            ("engine", self.engine.is_some()),
            ("dot", self.dot),
            ("out", self.out.is_some()),
            ("seed", self.seed.is_some()),
            ("budget", self.budget.is_some()),
        ];
        for (name, set) in flags {
            if set {
                out.push(name);
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let allowed = self.command.allowed();
        for flag in self.given() {
            if !allowed.contains(&flag) {
                return Err(Error::Precondition(format!("`--{flag}` does not apply to `{}`", self.command.name())));
            }
        }
        if let Command::Normalize { term } = &self.command {
            if term.is_some() == self.seed.is_some() {
                return Err(Error::Precondition("give either a term or `--seed`".into()));
            }
        }
        if self.budget == Some(0) {
            return Err(Error::Precondition("`--budget` must be positive".into()));
        }
        Ok(())
    }

    fn universe(&self) -> Result<ImportUniverse> {
        let extra = match &self.universe {
            Some(text) => ImportUniverse::parse_list(text)?,
            None => Vec::new(),
        };
        Ok(ImportUniverse::new(extra))
    }

    fn mode(&self, ty: &TypeExpr) -> Result<Mode> {
        match self.mode {
            Some(ModeArg::Lambda) if ty.has_quantifier() => {
                Err(Error::Precondition(format!("`{ty}` has quantifiers; use `--mode f`")))
            }
            Some(ModeArg::Lambda) => Ok(Mode::PBacktracking),
            _ => Ok(Mode::BlackBox),
        }
    }
}

/// The outcome of a command: text for stdout and an exit code.
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }
}

fn parse_type(text: &str) -> Result<TypeExpr> {
    TypeExpr::parse(text)
}

fn closed_term(text: &str) -> Result<(Term, TypeExpr)> {
    let t = Term::parse(text)?;
    let ty = typecheck(&[], &t)?;
    Ok((t, ty))
}

fn emit(cli: &Cli, text: String) -> Result<String> {
    match &cli.out {
        Some(path) => {
            fs::write(path, &text).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

fn graph(cli: &Cli, ty: &str) -> Result<String> {
    let ty = parse_type(ty)?;
    let universe = cli.universe()?;
    let ts = TransitionSystem::build(ty.clone());
    let candidates = universe.candidates(&ty.free_vars().into_iter().collect::<Vec<_>>());
    let frag = ts.reachable(cli.depth.unwrap_or(3), &candidates, universe.max_imports);
    let text = if cli.dot {
        frag.to_dot()
    } else {
        let mut s = format!("states: {}, edges: {}\n", frag.states.len(), frag.edges.len());
        for (i, st) in frag.states.iter().enumerate() {
            s.push_str(&format!("s{i}: {st}\n"));
        }
        for (a, l, b) in &frag.edges {
            s.push_str(&format!("s{a} --{l}--> s{b}\n"));
        }
        s
    };
    emit(cli, text)
}

fn traces(cli: &Cli, ty: &str) -> Result<String> {
    let ty = parse_type(ty)?;
    let universe = cli.universe()?;
    let ts = TransitionSystem::build(ty.clone());
    let candidates = universe.candidates(&ty.free_vars().into_iter().collect::<Vec<_>>());
    let mut words: Vec<String> = traces_from(&ts, &State::Initial, cli.depth.unwrap_or(4), &candidates, universe.max_imports)
        .iter()
        .map(|t| trace_word(t))
        .collect();
    words.sort_by(|a, b| (a != "ε", a.chars().count(), a).cmp(&(b != "ε", b.chars().count(), b)));
    emit(cli, words.join("\n") + "\n")
}

fn strategies(cli: &Cli, ty: &str) -> Result<String> {
    let ty = parse_type(ty)?;
    let mode = cli.mode(&ty)?;
    let ts = TransitionSystem::build(ty);
    let universe = cli.universe()?;
    let found = enumerate_strategies(&ts, mode, cli.depth.unwrap_or(6), &universe, true);
    let mut text = format!("strategies: {}\n", found.len());
    for (i, s) in found.iter().enumerate() {
        text.push_str(&format!("=== strategy {}\n{}", i + 1, s.to_text()));
    }
    emit(cli, text)
}

fn compile(cli: &Cli, term: &str) -> Result<String> {
    let (t, ty) = closed_term(term)?;
    let s = term_to_strategy(&normalize_syntactically(&t)?, &ty)?;
    emit(cli, s.to_text())
}

fn readback(ty: &str, file: &PathBuf) -> Result<String> {
    let ty = parse_type(ty)?;
    let text = fs::read_to_string(file).map_err(|e| Error::Precondition(format!("{}: {e}", file.display())))?;
    let s = Strategy::parse(&text)?;
    s.validate(&TransitionSystem::build(ty.clone()), Mode::BlackBox)?;
    Ok(format!("{}\n", strategy_to_term(&s, &ty)?))
}

fn normalize(cli: &Cli, term: Option<&str>) -> Result<String> {
    let (t, _) = match (term, cli.seed) {
        (Some(text), _) => closed_term(text)?,
        (None, Some(seed)) => gen::random_closed_term(&mut gen::rng(seed), cli.term_size.unwrap_or(25), 2, true),
        (None, None) => unreachable!("validated"),
    };
    let budget = cli.budget.unwrap_or(DEFAULT_BUDGET);
    let engine = cli.engine.unwrap_or(EngineArg::Both);
    let mut text = String::new();
    if term.is_none() {
        text.push_str(&format!("term: {t}\n"));
    }
    let games = match engine {
        EngineArg::Syntax => None,
        _ => Some(normalize_via_games_with_budget(&t, budget)?),
    };
    let syntax = match engine {
        EngineArg::Games => None,
        _ => Some(normalize_syntactically(&t)?),
    };
    match (&games, &syntax) {
        (Some(g), Some(s)) => {
            text.push_str(&format!("games:  {g}\nsyntax: {s}\n"));
            if !g.alpha_eq(s) {
                return Err(Error::Strategy { property: "agreement of the two engines".into(), witness: text });
            }
            text.push_str("AGREE\n");
        }
        (Some(u), None) | (None, Some(u)) => text.push_str(&format!("{u}\n")),
        (None, None) => unreachable!(),
    }
    emit(cli, text)
}

fn check(cli: &Cli, ty: &str) -> Result<String> {
    let ty = parse_type(ty)?;
    let mode = cli.mode(&ty)?;
    let report = check_bijection(
        &ty,
        cli.term_size.unwrap_or(12),
        cli.depth.unwrap_or(10),
        mode,
        &cli.universe()?,
    );
    Ok(format!("{report}\n"))
}

fn play(cli: &Cli, term: &str, input: &mut dyn BufRead, out: &mut dyn Write) -> Result<String> {
    let (t, ty) = closed_term(term)?;
    let s = term_to_strategy(&normalize_syntactically(&t)?, &ty)?;
    let ts = TransitionSystem::build(ty.clone());
    let universe = ImportUniverse::default();
    let mut d = Dialogue::default();
    let io = |e: std::io::Error| Error::Precondition(e.to_string());
    writeln!(out, "playing O against {t} : {ty}").map_err(io)?;
    loop {
        let moves = legal_moves(&ts, &d, Mode::BlackBox, &universe);
        if moves.is_empty() {
            writeln!(out, "no legal O-move; the play is over").map_err(io)?;
            break;
        }
        for (i, m) in moves.iter().enumerate() {
            writeln!(out, "  [{}] {}", i + 1, format::write_move(d.len() + 1, m, None)).map_err(io)?;
        }
        write!(out, "O> ").map_err(io)?;
        out.flush().map_err(io)?;
        let mut line = String::new();
        if input.read_line(&mut line).map_err(io)? == 0 {
            writeln!(out).map_err(io)?;
            break;
        }
        let choice = match line.trim().parse::<usize>() {
            Ok(n) if (1..=moves.len()).contains(&n) => n,
            _ => {
                writeln!(out, "choose a number between 1 and {}", moves.len()).map_err(io)?;
                continue;
            }
        };
        d = d.extended(moves[choice - 1].clone());
        let r = s
            .response(&d)
            .cloned()
            .ok_or_else(|| Error::Strategy { property: "live".into(), witness: d.to_string() })?;
        writeln!(out, "P: {}", format::write_move(d.len() + 1, &r, None)).map_err(io)?;
        d = d.extended(r);
    }
    let transcript = d.to_string();
    match &cli.out {
        Some(path) => {
            fs::write(path, &transcript).map_err(|e| Error::Precondition(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(transcript),
    }
}

/// Run a parsed command, reading `play` input from `input`.
pub fn execute(cli: &Cli, input: &mut dyn BufRead, out: &mut dyn Write) -> Outcome {
    let result = cli.validate().and_then(|()| match &cli.command {
        Command::Prenex { ty } => parse_type(ty).map(|t| format!("{}\n", t.prenex())),
        Command::Graph { ty } => graph(cli, ty),
        Command::Traces { ty } => traces(cli, ty),
        Command::Strategies { ty } => strategies(cli, ty),
        Command::Compile { term } => compile(cli, term),
        Command::Readback { ty, file } => readback(ty, file),
        Command::Normalize { term } => normalize(cli, term.as_deref()),
        Command::Check { ty } => check(cli, ty),
        Command::Play { term } => play(cli, term, input, out),
    });
    match result {
        Ok(text) => Outcome::ok(text),
        Err(Error::BudgetExceeded { budget, transcript }) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: step budget of {budget} exceeded; partial transcript:\n{transcript}"),
        },
        Err(e @ Error::Strategy { .. }) if matches!(cli.command, Command::Normalize { .. }) => {
            Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
        Err(e) => Outcome { code: 1, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

/// Parse `args` and run; returns the exit code.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 1;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let outcome = execute(&cli, input, out);
    let _ = out.write_all(outcome.stdout.as_bytes());
    let _ = err.write_all(outcome.stderr.as_bytes());
    outcome.code
}
