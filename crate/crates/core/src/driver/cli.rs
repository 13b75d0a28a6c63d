use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::report::{emit, property_usage_table, Format};
use crate::corpus::{Item, Library};
use crate::depgraph::{build_graph, indirect_closure};
use crate::elicitor::{direct_needs, direct_needs_all, minimize_attachments, ElicitError, NeedSet};
use crate::frontend::parse_library;
use crate::verifier::{Verdict, Verifier, VerifierConfig, VerifyError, DEFAULT_BUDGET};
use crate::verifier::oracle::DEFAULT_ORACLE_BOUND;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "propneed", version, about = "Find which constructor properties each item of a library needs")]
struct Cli {
    /// Cap on ground instances and clauses per check.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Atom cap for the brute-force cross-check.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_BOUND)]
    oracle_bound: usize,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Corpus {
    /// Library file.
    #[arg(long)]
    corpus: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify items under their full environments.
    Check {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        item: Option<String>,
        /// Also decide each item by enumeration and compare verdicts.
        #[arg(long)]
        cross_check: bool,
    },
    /// Print the direct needs of items.
    Elicit {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long)]
        item: Option<String>,
        /// Also print a locally minimal environment per item.
        #[arg(long)]
        minimize: bool,
    },
    /// Print the indirect needs of every item.
    Closure {
        #[command(flatten)]
        corpus: Corpus,
    },
    /// Print per-property usage counts.
    Report {
        #[command(flatten)]
        corpus: Corpus,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

/// A failure already printed to stderr, carrying its exit code.
struct Exit(i32);

fn verify_code(e: &VerifyError) -> i32 {
    match e {
        VerifyError::BudgetExceeded { .. } | VerifyError::OracleBoundExceeded { .. } => EXIT_BUDGET,
        VerifyError::MalformedItem { .. } => EXIT_INPUT,
    }
}

fn elicit_code(e: &ElicitError) -> i32 {
    match e {
        ElicitError::BaselineFailed { .. } => EXIT_FAILED,
        ElicitError::Verify(v) => verify_code(v),
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Library, Exit> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
        Exit(EXIT_INPUT)
    })?;
    parse_library(&text).map_err(|e| {
        let _ = writeln!(err, "error: {}: {e}", path.display());
        Exit(EXIT_INPUT)
    })
}

fn select<'a>(lib: &'a Library, id: Option<&str>, err: &mut dyn Write) -> Result<Vec<&'a Item>, Exit> {
    match id {
        None => Ok(lib.items.iter().collect()),
        Some(id) => match lib.item(id) {
            Some(item) => Ok(vec![item]),
            None => {
                let _ = writeln!(err, "error: no item `{id}` in corpus");
                Err(Exit(EXIT_INPUT))
            }
        },
    }
}

/// Parses `args` (program name first) and runs one command. Results go to
/// `out`, diagnostics to `err`; the return value is the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_INPUT;
        }
    };
    let verifier = Verifier::new(VerifierConfig { budget: cli.budget, oracle_bound: cli.oracle_bound });
    let (result, stdout, stderr) = pool.install(|| {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let result = run(&cli.command, &verifier, &mut o, &mut e);
        (result, o, e)
    });
    let _ = out.write_all(&stdout);
    let _ = err.write_all(&stderr);
    match result {
        Ok(()) => EXIT_OK,
        Err(Exit(code)) => code,
    }
}

fn run(command: &Command, verifier: &Verifier, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Exit> {
    match command {
        Command::Check { corpus, item, cross_check } => {
            let lib = load(&corpus.corpus, err)?;
            check(verifier, &lib, select(&lib, item.as_deref(), err)?, *cross_check, out, err)
        }
        Command::Elicit { corpus, item, minimize } => {
            let lib = load(&corpus.corpus, err)?;
            elicit(verifier, &lib, select(&lib, item.as_deref(), err)?, *minimize, out, err)
        }
        Command::Closure { corpus } => {
            let lib = load(&corpus.corpus, err)?;
            for needs in closure(verifier, &lib, err)? {
                let _ = writeln!(out, "{needs}");
            }
            Ok(())
        }
        Command::Report { corpus, format } => {
            let lib = load(&corpus.corpus, err)?;
            let direct = all_direct(verifier, &lib, err)?;
            let indirect = indirect(&lib, &direct, err)?;
            let id = corpus.corpus.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let report = property_usage_table(&lib, &direct, &indirect, &id);
            let _ = out.write_all(&emit(&report, *format));
            Ok(())
        }
    }
}

fn check(
    verifier: &Verifier,
    lib: &Library,
    items: Vec<&Item>,
    cross_check: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Exit> {
    use rayon::prelude::*;
    let results: Vec<_> = items
        .par_iter()
        .map(|item| {
            let verdict = verifier.check(item, lib, None);
            let oracle = cross_check.then(|| verifier.brute_force(item, lib, None));
            (item, verdict, oracle)
        })
        .collect();
    let mut code = EXIT_OK;
    for (item, verdict, oracle) in results {
        match &verdict {
            Ok(Verdict::Verified) => {
                let _ = writeln!(out, "{} verified", item.id);
            }
            Ok(Verdict::Failed(w)) => {
                let _ = writeln!(out, "{} failed: {w}", item.id);
                code = code.max(EXIT_FAILED);
            }
            Err(e) => {
                let _ = writeln!(err, "error: {}: {e}", item.id);
                code = code.max(verify_code(e));
            }
        }
        match (oracle, verdict) {
            (Some(Ok(o)), Ok(v)) if o.is_verified() != v.is_verified() => {
                let _ = writeln!(err, "error: {}: enumeration disagrees with the checker", item.id);
                code = code.max(EXIT_FAILED);
            }
            (Some(Err(VerifyError::OracleBoundExceeded { atoms, bound })), _) => {
                let _ = writeln!(err, "note: {}: cross-check skipped ({atoms} atoms, bound {bound})", item.id);
            }
            (Some(Err(e)), _) => {
                let _ = writeln!(err, "error: {}: {e}", item.id);
                code = code.max(verify_code(&e));
            }
            _ => {}
        }
    }
    if code == EXIT_OK { Ok(()) } else { Err(Exit(code)) }
}

fn elicit(
    verifier: &Verifier,
    lib: &Library,
    items: Vec<&Item>,
    minimize: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Exit> {
    use rayon::prelude::*;
    let results: Vec<_> = items
        .par_iter()
        .map(|item| {
            let needs = direct_needs(verifier, item, lib)?;
            let minimal = if minimize { Some(minimize_attachments(verifier, item, lib)?) } else { None };
            Ok::<_, ElicitError>((needs, minimal))
        })
        .collect();
    let mut code = EXIT_OK;
    for (item, result) in items.iter().zip(results) {
        match result {
            Ok((needs, minimal)) => {
                let _ = writeln!(out, "{needs}");
                if let Some(env) = minimal {
                    let _ = write!(out, "{} minimal", item.id);
                    for att in &env {
                        let _ = write!(out, " {att}");
                    }
                    let _ = writeln!(out);
                }
            }
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                code = code.max(elicit_code(&e));
            }
        }
    }
    if code == EXIT_OK { Ok(()) } else { Err(Exit(code)) }
}

fn all_direct(verifier: &Verifier, lib: &Library, err: &mut dyn Write) -> Result<BTreeMap<String, NeedSet>, Exit> {
    direct_needs_all(verifier, lib).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        Exit(elicit_code(&e))
    })
}

fn indirect(
    lib: &Library,
    direct: &BTreeMap<String, NeedSet>,
    err: &mut dyn Write,
) -> Result<BTreeMap<String, NeedSet>, Exit> {
    indirect_closure(&build_graph(lib), direct).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        Exit(EXIT_INPUT)
    })
}

/// Indirect needs of every item, in library order.
fn closure(verifier: &Verifier, lib: &Library, err: &mut dyn Write) -> Result<Vec<NeedSet>, Exit> {
    let direct = all_direct(verifier, lib, err)?;
    let mut closed = indirect(lib, &direct, err)?;
    Ok(lib.items.iter().filter_map(|i| closed.remove(&i.id)).collect())
}
