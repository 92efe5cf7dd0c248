//! The `treequiv` command line.
//!
//! Exit codes: 0 equivalent (or verified), 1 not equivalent (or rejected),
//! 2 unknown, 3 bad input, 4 internal error. Every flag can also be set
//! through an environment variable `TREEQUIV_<FLAG>`, e.g.
//! `TREEQUIV_MAX_DEPTH=3`.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dtta::Dtta;
use crate::error::{Error, Result};
use crate::format::{read_certificate, write_certificate, write_verdict};
use crate::group::Alpha;
use crate::pipeline::{check, verify_certificate, BinarizePolicy, Engine, Interpretation, Options, Verdict};
use crate::transducer::{Mode, Transducer};
use crate::tree::Tree;

#[derive(Parser, Debug)]
#[command(name = "treequiv", version, about = "Equivalence of tree-to-string transducers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide equivalence and print a verdict record.
    Check(CheckArgs),
    /// Decide equivalence and print the certificate of an equivalent pair.
    Certify(CheckArgs),
    /// Replay a certificate against the transducers it was issued for.
    Verify(VerifyArgs),
    /// Print the output of a transducer on a tree, or `undefined`.
    Eval(EvalArgs),
    /// Print syntactic properties of a transducer.
    Classify(SingleArgs),
    /// Print the numeric transducer encoding outputs as base-(s+1) numbers.
    Unarize(SingleArgs),
    /// Print the transducer over binary-encoded input trees and its checker automaton.
    Binarize(SingleArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Auto,
    Affine,
    Invariant,
}

#[derive(Args, Debug)]
struct Common {
    /// string | unary | abelian | f1 | f2 | matrix:<file>
    #[arg(long, env = "TREEQUIV_MODE")]
    mode: Option<String>,
    /// Automaton restricting the inputs to compare on.
    #[arg(long, env = "TREEQUIV_RELATIVE_TO")]
    relative_to: Option<PathBuf>,
    /// Write the record to this file as well as standard output.
    #[arg(long, env = "TREEQUIV_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    first: PathBuf,
    second: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "auto", env = "TREEQUIV_ENGINE")]
    engine: EngineArg,
    /// Largest invariant degree tried; 0 allows only the affine engine.
    #[arg(long, default_value_t = 4, env = "TREEQUIV_MAX_DEPTH")]
    max_depth: u32,
    #[arg(long, default_value_t = 0, env = "TREEQUIV_SEED")]
    seed: u64,
    /// Modular screening rounds before the exact affine run.
    #[arg(long, default_value_t = 0, env = "TREEQUIV_PRIME_TRIALS")]
    prime_trials: usize,
    /// Seconds before the invariant search gives up.
    #[arg(long, env = "TREEQUIV_TIME_LIMIT")]
    time_limit: Option<u64>,
    /// Encode string transducers over binary trees: auto (rank > 2), always, never.
    #[arg(long, default_value = "auto", env = "TREEQUIV_BINARIZE")]
    binarize: String,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    certificate: PathBuf,
    first: PathBuf,
    second: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct EvalArgs {
    transducer: PathBuf,
    /// A tree file, or a tree literal such as `(f (e) (e))`.
    tree: String,
}

#[derive(Args, Debug)]
struct SingleArgs {
    transducer: PathBuf,
    #[arg(long, env = "TREEQUIV_OUT")]
    out: Option<PathBuf>,
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = if code == 0 {
                write!(stdout, "{}", e.render())
            } else {
                write!(stderr, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Internal(_) => 4,
                _ => 3,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_transducer(path: &Path) -> Result<Transducer> {
    Transducer::parse(&read(path)?).map_err(|e| in_file(path, e))
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    }
}

fn emit(stdout: &mut dyn Write, out: Option<&Path>, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::Internal(e.to_string()))?;
    if let Some(p) = out {
        fs::write(p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn interpretation(mode: Option<&str>, m1: &Transducer, m2: &Transducer) -> Result<Interpretation> {
    let string = m1.mode() == Mode::String;
    let interp = match mode {
        None => Interpretation::Exact,
        Some("string") => {
            if !string {
                return Err(Error::Input("--mode string needs string-mode transducers".into()));
            }
            Interpretation::Exact
        }
        Some("unary") => {
            if !(m1.classify().unary_output && m2.classify().unary_output) {
                return Err(Error::Input("--mode unary needs numeric or one-letter transducers".into()));
            }
            Interpretation::Exact
        }
        Some("abelian") => Interpretation::Abelian,
        Some("f1") => Interpretation::F1,
        Some("f2") => Interpretation::F2,
        Some(m) => match m.strip_prefix("matrix:") {
            Some(file) => Interpretation::Matrix(Alpha::parse(&read(Path::new(file))?)?),
            None => return Err(Error::Input(format!("unknown mode `{m}`"))),
        },
    };
    Ok(interp)
}

fn load_pair(first: &Path, second: &Path, common: &Common) -> Result<(Transducer, Transducer, Option<Dtta>, Interpretation)> {
    let m1 = load_transducer(first)?;
    let m2 = load_transducer(second)?;
    let relative = match &common.relative_to {
        Some(p) => {
            let alph = m1.input().merge(m2.input())?;
            Some(Dtta::parse(&read(p)?, Some(&alph)).map_err(|e| in_file(p, e))?)
        }
        None => None,
    };
    let interp = interpretation(common.mode.as_deref(), &m1, &m2)?;
    Ok((m1, m2, relative, interp))
}

fn options(a: &CheckArgs) -> Result<Options> {
    let binarize = match a.binarize.as_str() {
        "auto" => BinarizePolicy::Auto,
        "always" => BinarizePolicy::Always,
        "never" => BinarizePolicy::Never,
        other => return Err(Error::Input(format!("unknown binarize policy `{other}`"))),
    };
    Ok(Options {
        engine: match a.engine {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Affine => Engine::Affine,
            EngineArg::Invariant => Engine::Invariant,
        },
        max_degree: a.max_depth,
        seed: a.seed,
        prime_trials: a.prime_trials,
        binarize,
        time_limit: a.time_limit.map(Duration::from_secs),
        ..Options::default()
    })
}

fn exit_code(v: &Verdict) -> i32 {
    match v {
        Verdict::Equivalent(_) => 0,
        Verdict::NotEquivalent(_) => 1,
        Verdict::Unknown(_) => 2,
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Check(a) => {
            let (m1, m2, rel, interp) = load_pair(&a.first, &a.second, &a.common)?;
            let v = check(&interp, &m1, &m2, rel.as_ref(), &options(&a)?)?;
            emit(stdout, a.common.out.as_deref(), &write_verdict(&v, interp.name()))?;
            Ok(exit_code(&v))
        }
        Command::Certify(a) => {
            let (m1, m2, rel, interp) = load_pair(&a.first, &a.second, &a.common)?;
            let v = check(&interp, &m1, &m2, rel.as_ref(), &options(&a)?)?;
            let text = match &v {
                Verdict::Equivalent(c) => write_certificate(c),
                other => write_verdict(other, interp.name()),
            };
            emit(stdout, a.common.out.as_deref(), &text)?;
            Ok(exit_code(&v))
        }
        Command::Verify(a) => {
            let (m1, m2, rel, interp) = load_pair(&a.first, &a.second, &a.common)?;
            let cert = read_certificate(&read(&a.certificate)?)?;
            let (text, code) = match verify_certificate(&cert, &interp, &m1, &m2, rel.as_ref())? {
                Ok(()) => ("certificate: valid\n".to_string(), 0),
                Err(why) => (format!("certificate: invalid\nreason: {why}\n"), 1),
            };
            emit(stdout, a.common.out.as_deref(), &text)?;
            Ok(code)
        }
        Command::Eval(a) => {
            let m = load_transducer(&a.transducer)?;
            let text = if a.tree.trim_start().starts_with('(') {
                a.tree.clone()
            } else {
                read(Path::new(&a.tree))?
            };
            let t = Tree::parse(&text, m.input())?;
            let out = crate::pipeline::render_exact(&m, &t)?;
            emit(stdout, None, &format!("{}\n", out.as_deref().unwrap_or("undefined")))?;
            Ok(0)
        }
        Command::Classify(a) => {
            let m = load_transducer(&a.transducer)?;
            let text = format!(
                "{}\nmode: {}\nstates: {}\nparameters: {}\nsize: {}\nh: {}\n",
                m.classify(),
                m.mode().as_str(),
                m.num_states(),
                m.params(),
                m.size(),
                m.h()
            );
            emit(stdout, a.out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Unarize(a) => {
            let m = load_transducer(&a.transducer)?;
            let u = m.totalize().unarize()?;
            emit(stdout, a.out.as_deref(), &format!("{u}\n"))?;
            Ok(0)
        }
        Command::Binarize(a) => {
            let m = load_transducer(&a.transducer)?;
            let b = m.binarize()?;
            emit(stdout, a.out.as_deref(), &format!("{}\n{}\n", b.transducer, b.checker))?;
            Ok(0)
        }
    }
}
