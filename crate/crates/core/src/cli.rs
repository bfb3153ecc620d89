//! The `trace-ord` command line.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::formula::{parse_formula, TraceSyntax};
use crate::ordinal::{parse_ordinal, parse_product, Ordinal};
use crate::primes::factor;
use crate::solver::{solve_with, Outcome, SolveOptions, Stats};
use crate::successor::{parse_sentence, solve_sentence_with, OrdinalOutcome};
use crate::trace::{diff_witness, AlphabetSpec, DiffWitness, NamedAlphabet, Symbol, Trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "trace-ord", version, about = "Trace monoid and successor ordinal solver")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    #[value(alias = "structured")]
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ordinal arithmetic and factorization.
    #[command(subcommand)]
    Ord(OrdCommand),
    /// Trace operations over a declared alphabet.
    #[command(subcommand)]
    Trace(TraceCommand),
    /// Decide an existential sentence up to a length bound.
    Solve(SolveArgs),
}

#[derive(Debug, Subcommand)]
pub enum OrdCommand {
    Mul { a: String, b: String },
    Add { a: String, b: String },
    Cmp { a: String, b: String },
    Factor { a: String },
}

#[derive(Debug, Args)]
pub struct AlphabetArg {
    /// Letters by class, then independent class pairs: `a b | c ; 2-2`.
    #[arg(long)]
    pub alphabet: String,
}

#[derive(Debug, Subcommand)]
pub enum TraceCommand {
    /// Canonical form.
    Nf {
        word: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// Equality of two traces.
    Eq {
        u: String,
        v: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
    /// How two traces differ.
    Witness {
        u: String,
        v: String,
        #[command(flatten)]
        alphabet: AlphabetArg,
    },
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// A file holding the sentence, or the sentence itself.
    pub input: String,
    /// Longest value tried for each variable.
    #[arg(long, default_value_t = 4)]
    pub bound: usize,
    /// Bound on the ordinals, overriding `LAMBDA` in the sentence.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Solve a trace formula over this alphabet instead of an ordinal sentence.
    #[arg(long)]
    pub alphabet: Option<String>,
    /// Search instances in parallel.
    #[arg(long)]
    pub parallel: bool,
}

/// Reads an alphabet such as `a b | c d ; 1-2, 2-2`.
pub fn parse_alphabet(text: &str) -> Result<NamedAlphabet, String> {
    let (classes, pairs) = match text.split_once(';') {
        Some((c, p)) => (c, p),
        None => (text, ""),
    };
    let classes: Vec<Vec<&str>> = classes
        .split('|')
        .map(|c| c.split_whitespace().collect())
        .collect();
    let mut independent = Vec::new();
    for pair in pairs.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parsed = pair
            .split_once('-')
            .and_then(|(i, j)| Some((i.trim().parse().ok()?, j.trim().parse().ok()?)));
        match parsed {
            Some(p) => independent.push(p),
            None => return Err(format!("bad independence pair `{pair}`, expected `i-j`")),
        }
    }
    let spec = AlphabetSpec::new(classes.len(), independent).map_err(|e| e.to_string())?;
    let mut alphabet = NamedAlphabet::new(spec);
    for (i, names) in classes.iter().enumerate() {
        for name in names {
            if !name.chars().all(crate::syntax::is_ident_char) || name.starts_with(|c: char| c.is_ascii_digit()) {
                return Err(format!("bad letter name `{name}`"));
            }
            if alphabet.letter(name).is_some() {
                return Err(format!("letter `{name}` declared twice"));
            }
            alphabet.declare(name, i + 1).map_err(|e| e.to_string())?;
        }
    }
    Ok(alphabet)
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

#[derive(Serialize)]
struct SolveReport {
    result: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<BTreeMap<String, String>>,
    bound: usize,
    instances: usize,
    assignments: u64,
}

/// Runs the command line, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INPUT
        }
    }
}

fn emit(out: &mut dyn Write, format: Format, human: &str, json: serde_json::Value) -> Result<(), Failure> {
    match format {
        Format::Human => writeln!(out, "{human}")?,
        Format::Json => writeln!(out, "{}", serde_json::to_string(&json)?)?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Ord(cmd) => ord(cmd, cli.format, out),
        Command::Trace(cmd) => trace(cmd, cli.format, out),
        Command::Solve(args) => solve(args, cli.format, out),
    }
}

fn ordinal_arg(text: &str) -> Result<Ordinal, Failure> {
    parse_product(text).map_err(|e| Failure(format!("in `{text}`: {e}")))
}

fn ord(cmd: &OrdCommand, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = match cmd {
        OrdCommand::Mul { a, b } => (&ordinal_arg(a)? * &ordinal_arg(b)?).to_string(),
        OrdCommand::Add { a, b } => (&ordinal_arg(a)? + &ordinal_arg(b)?).to_string(),
        OrdCommand::Cmp { a, b } => match ordinal_arg(a)?.cmp(&ordinal_arg(b)?) {
            std::cmp::Ordering::Less => "less",
            std::cmp::Ordering::Equal => "equal",
            std::cmp::Ordering::Greater => "greater",
        }
        .to_owned(),
        OrdCommand::Factor { a } => factor(&ordinal_arg(a)?)?.to_string(),
    };
    emit(out, format, &text, serde_json::json!({ "result": text }))?;
    Ok(EXIT_OK)
}

fn trace_arg(alphabet: &NamedAlphabet, text: &str) -> Result<Trace<Symbol>, Failure> {
    alphabet
        .trace(text)
        .ok_or_else(|| Failure(format!("`{text}` is not a word over the alphabet")))
}

fn trace(cmd: &TraceCommand, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        TraceCommand::Nf { word, alphabet } => {
            let al = parse_alphabet(&alphabet.alphabet)?;
            let t = trace_arg(&al, word)?.to_string();
            emit(out, format, &t, serde_json::json!({ "result": t }))?;
        }
        TraceCommand::Eq { u, v, alphabet } => {
            let al = parse_alphabet(&alphabet.alphabet)?;
            let same = trace_arg(&al, u)?.equal(&trace_arg(&al, v)?)?;
            emit(out, format, &same.to_string(), serde_json::json!({ "result": same }))?;
        }
        TraceCommand::Witness { u, v, alphabet } => {
            let al = parse_alphabet(&alphabet.alphabet)?;
            let (tu, tv) = (trace_arg(&al, u)?, trace_arg(&al, v)?);
            let (human, json) = describe(&diff_witness(&tu, &tv)?);
            emit(out, format, &human, json)?;
        }
    }
    Ok(EXIT_OK)
}

fn describe(w: &DiffWitness<Symbol>) -> (String, serde_json::Value) {
    use serde_json::json;
    let order = |swapped: bool| if swapped { "v u" } else { "u v" };
    match w {
        DiffWitness::Equal => ("equal".into(), json!({ "result": "equal" })),
        DiffWitness::StrictPrefix { swapped } => (
            format!("prefix ({}): the first is a strict prefix of the second", order(*swapped)),
            json!({ "result": "prefix", "swapped": swapped }),
        ),
        DiffWitness::Separated { w, a, b, w1, w2, w3, swapped } => (
            format!(
                "separated ({}): w = {w}, a = {a}, b = {b}, w1 = {w1}, w2 = {w2}, w3 = {w3}",
                order(*swapped)
            ),
            json!({
                "result": "separated", "swapped": swapped, "w": w.to_string(),
                "a": a.to_string(), "b": b.to_string(), "w1": w1.to_string(),
                "w2": w2.to_string(), "w3": w3.to_string(),
            }),
        ),
        DiffWitness::Missing { w, a, w1, w2, swapped } => (
            format!("missing ({}): w = {w}, a = {a}, w1 = {w1}, w2 = {w2}", order(*swapped)),
            json!({
                "result": "missing", "swapped": swapped, "w": w.to_string(),
                "a": a.to_string(), "w1": w1.to_string(), "w2": w2.to_string(),
            }),
        ),
    }
}

fn read_input(input: &str) -> Result<(String, Option<String>), Failure> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{input}: {e}")))?;
        Ok((text, Some(input.to_owned())))
    } else {
        Ok((input.to_owned(), None))
    }
}

fn located(source: &Option<String>, e: impl std::fmt::Display) -> Failure {
    match source {
        Some(path) => Failure(format!("{path}:{e}")),
        None => Failure(e.to_string()),
    }
}

fn solve(args: &SolveArgs, format: Format, out: &mut dyn Write) -> Result<i32, Failure> {
    let (text, source) = read_input(&args.input)?;
    let options = SolveOptions {
        bound: args.bound,
        parallel: args.parallel,
    };
    let (witness, stats): (Option<BTreeMap<String, String>>, Stats) = match &args.alphabet {
        Some(spec) => {
            if args.lambda.is_some() {
                return Err(Failure("--lambda applies to ordinal sentences, not with --alphabet".into()));
            }
            let al = parse_alphabet(spec)?;
            let f = parse_formula(&text, &TraceSyntax::new(&al)).map_err(|e| located(&source, e))?;
            let r = solve_with(&f, &al, options);
            let w = match r.outcome {
                Outcome::Sat(w) => Some(w.into_iter().map(|(v, t)| (v, t.to_string())).collect()),
                Outcome::UnsatUpTo(_) => None,
            };
            (w, r.stats)
        }
        None => {
            let mut sentence = parse_sentence(&text).map_err(|e| located(&source, e))?;
            if let Some(lambda) = &args.lambda {
                sentence.bound =
                    parse_ordinal(lambda).map_err(|e| Failure(format!("in --lambda `{lambda}`: {e}")))?;
            }
            let r = solve_sentence_with(&sentence, options)?;
            let w = match r.outcome {
                OrdinalOutcome::Sat(w) => Some(w.into_iter().map(|(v, a)| (v, a.to_string())).collect()),
                OrdinalOutcome::UnsatUpTo(_) => None,
            };
            (w, r.stats)
        }
    };
    let sat = witness.is_some();
    match format {
        Format::Human => match &witness {
            Some(w) => {
                writeln!(out, "SAT")?;
                for (v, value) in w {
                    writeln!(out, "{v} = {value}")?;
                }
            }
            None => writeln!(out, "UNSAT-UP-TO({})", args.bound)?,
        },
        Format::Json => {
            let report = SolveReport {
                result: if sat { "sat" } else { "unsat_up_to" },
                witness,
                bound: args.bound,
                instances: stats.instances,
                assignments: stats.assignments,
            };
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
        }
    }
    Ok(if sat { EXIT_OK } else { EXIT_UNSAT })
}
