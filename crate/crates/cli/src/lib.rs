//! The `apclp` command line.
//!
//! [`run`] takes the argument vector and two output streams and returns the
//! process exit code, so the whole front end is testable in-process.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | semantic failure: diagnostics, golden mismatch, no models, query not entailed |
//! | 2 | usage or I/O error |
//! | 3 | external solver or environment error |

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use apclp::asp::{self, AspError, ExternalRunConfig};
use apclp::ast::{validate, Program, Severity};
use apclp::grounder::{ground, GroundProgram};
use apclp::oracle::{self, OracleMode};
use apclp::parser::{parse_query, parse_with_file};
use apclp::semantics::{Interpretation, Projection};
use apclp::solver::{self, Mode, SolveOptions, SolveResult};
use apclp::{corpus, parser};
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SEMANTIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EXTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "apclp", version, about = "Paraconsistent annotated logic programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute preferred (or all) stable models.
    Solve(SolveArgs),
    /// Translate a program into reified ASP with preference statements.
    Translate(TranslateArgs),
    /// Print the ground program.
    Ground { file: PathBuf },
    /// Parse and validate, printing diagnostics.
    Check { file: PathBuf },
    /// Enumerate models by brute force (small programs only).
    Oracle(OracleArgs),
    /// Bundled puzzles.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    file: PathBuf,
    /// Every stable model instead of the preferred ones.
    #[arg(long)]
    all_stable: bool,
    /// Solve with the external ASP solver (`APCLP_ASP_SOLVER`, default `asprin`).
    #[arg(long)]
    external: bool,
    /// Stop after N models.
    #[arg(long, value_name = "N")]
    max: Option<usize>,
    /// Also print atoms whose value is bottom.
    #[arg(long)]
    show_bottom: bool,
    /// Show only t/top atoms of these predicates (plus every top atom).
    #[arg(long, value_name = "P1,P2")]
    project: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Decide entailment of a ground formula instead of listing models.
    #[arg(long, value_name = "FORMULA")]
    query: Option<String>,
    /// Give up after this many seconds.
    #[arg(long, value_name = "SECS")]
    timeout: Option<u64>,
}

#[derive(Args, Debug)]
struct TranslateArgs {
    file: PathBuf,
    /// Output file; standard output when absent.
    #[arg(short, long, value_name = "OUT")]
    output: Option<PathBuf>,
    /// Keep preference statements in the program text (default).
    #[arg(long, conflicts_with = "prefs_file")]
    prefs_inline: bool,
    /// Write preference statements to a separate file.
    #[arg(long, value_name = "PATH")]
    prefs_file: Option<PathBuf>,
    /// Translate the ground program instead of the rules as written.
    #[arg(long)]
    ground: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = OracleSel::Stable)]
    mode: OracleSel,
    #[arg(long)]
    show_bottom: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum CorpusCommand {
    /// List bundled entries.
    List,
    /// Solve an entry and compare it with its expected models.
    Run {
        /// `puzzle` or `puzzle:variation`.
        name: String,
        #[arg(long)]
        external: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OracleSel {
    All,
    Stable,
    Preferred,
    EConsistent,
}

/// A failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `args` (program name first).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Translate(a) => cmd_translate(&a, out),
        Command::Ground { file } => cmd_ground(&file, out),
        Command::Check { file } => cmd_check(&file, out),
        Command::Oracle(a) => cmd_oracle(&a, out),
        Command::Corpus { command } => match command {
            CorpusCommand::List => cmd_corpus_list(out),
            CorpusCommand::Run {
                name,
                external,
                format,
            } => cmd_corpus_run(&name, external, format, out),
        },
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "apclp: {}", f.message);
            f.code
        }
    }
}

fn io_fail(e: std::io::Error) -> Failure {
    Failure::new(EXIT_USAGE, e.to_string())
}

fn read_source(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Program, Failure> {
    let text = read_source(path)?;
    parse_with_file(&text, Some(path)).map_err(|errs| {
        let msg: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
        Failure::new(EXIT_SEMANTIC, msg.join("\n"))
    })
}

fn ground_program(p: &Program) -> Result<GroundProgram, Failure> {
    ground(p).map_err(|e| Failure::new(EXIT_SEMANTIC, e.to_string()))
}

fn asp_fail(e: AspError) -> Failure {
    let code = match e {
        AspError::SolverNotFound(_)
        | AspError::SolverFailed { .. }
        | AspError::Timeout(_)
        | AspError::Io(_) => EXIT_EXTERNAL,
        _ => EXIT_SEMANTIC,
    };
    Failure::new(code, e.to_string())
}

fn external_config(timeout: Option<u64>) -> ExternalRunConfig {
    let mut cfg = ExternalRunConfig::from_env().unwrap_or_else(|| ExternalRunConfig::new("asprin"));
    if let Some(s) = timeout {
        cfg.timeout = Duration::from_secs(s);
    }
    cfg
}

/// Renders models as text or JSON. `visible` lists every atom for
/// `--show-bottom`.
fn print_models(
    out: &mut dyn Write,
    models: &[Interpretation],
    projection: Option<&Projection>,
    visible: Option<&[apclp::ast::PredicateTerm]>,
    format: Format,
) -> std::io::Result<()> {
    let shown: Vec<Interpretation> = models
        .iter()
        .map(|m| match projection {
            Some(p) => m.project(p),
            None => m.without_aux(),
        })
        .collect();
    match format {
        Format::Json => {
            let arr: Vec<serde_json::Value> = shown
                .iter()
                .map(|m| {
                    let mut atoms = serde_json::Map::new();
                    if let (Some(all), None) = (visible, projection) {
                        for p in all.iter().filter(|p| !p.symbol.starts_with('_')) {
                            atoms.insert(p.to_string(), m.get(p).name().into());
                        }
                    } else {
                        for (k, v) in m.to_json_map() {
                            atoms.insert(k, v.into());
                        }
                    }
                    serde_json::json!({ "atoms": atoms })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&arr).expect("json"))
        }
        Format::Text => {
            for (i, m) in shown.iter().enumerate() {
                writeln!(out, "Model {}:", i + 1)?;
                let body = match (visible, projection) {
                    (Some(all), None) => m.render_with_bottom(all),
                    _ => m.to_string(),
                };
                for line in body.lines() {
                    writeln!(out, "  {line}")?;
                }
            }
            let n = shown.len();
            writeln!(out, "{n} model{}", if n == 1 { "" } else { "s" })
        }
    }
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Outcome {
    let program = load(&a.file)?;
    let g = ground_program(&program)?;
    let projection = a
        .project
        .as_deref()
        .map(Projection::parse)
        .transpose()
        .map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let timeout = a.timeout.map(Duration::from_secs);

    if let Some(q) = &a.query {
        if a.external {
            return Err(Failure::new(EXIT_USAGE, "--query is not supported with --external"));
        }
        let f = parse_query(q).map_err(|e| Failure::new(EXIT_USAGE, format!("bad query: {e}")))?;
        let mode = if a.all_stable { Mode::AllStable } else { Mode::PreferredStable };
        let e = solver::entails(&g, &f, mode).map_err(|e| Failure::new(EXIT_USAGE, e))?;
        if e.holds {
            writeln!(out, "entailed{}", if e.vacuous { " (vacuously: no models)" } else { "" })
                .map_err(io_fail)?;
            return Ok(EXIT_OK);
        }
        writeln!(out, "not entailed").map_err(io_fail)?;
        if let Some(c) = &e.counterexample {
            writeln!(out, "counterexample:").map_err(io_fail)?;
            for line in c.without_aux().to_string().lines() {
                writeln!(out, "  {line}").map_err(io_fail)?;
            }
        }
        return Ok(EXIT_SEMANTIC);
    }

    let result: SolveResult = if a.external {
        let doc = asp::translate_ground(&g);
        let mut cfg = external_config(a.timeout);
        cfg.enumeration_cap = a.max.unwrap_or(0);
        let mut r = asp::solve_external(&doc, &cfg, !a.all_stable).map_err(asp_fail)?;
        if let Some(n) = a.max {
            r.truncated = r.models.len() > n;
            r.models.truncate(n);
        }
        r
    } else {
        let opts = SolveOptions {
            limit: a.max,
            timeout,
        };
        if a.all_stable {
            solver::stable_models_with(&g, opts)
        } else {
            solver::preferred_stable_models_with(&g, opts)
        }
    };
    let visible = a.show_bottom.then(|| g.atoms());
    print_models(out, &result.models, projection.as_ref(), visible, a.format).map_err(io_fail)?;
    if result.truncated && a.format == Format::Text {
        writeln!(out, "(more models exist)").map_err(io_fail)?;
    }
    Ok(if result.models.is_empty() { EXIT_SEMANTIC } else { EXIT_OK })
}

fn cmd_translate(a: &TranslateArgs, out: &mut dyn Write) -> Outcome {
    let program = load(&a.file)?;
    let doc = if a.ground {
        asp::translate_ground(&ground_program(&program)?)
    } else {
        asp::translate(&program)
    };
    let main_text = match &a.prefs_file {
        Some(path) => {
            std::fs::write(path, &doc.preference_text).map_err(io_fail)?;
            doc.program_text.clone()
        }
        None => doc.combined(),
    };
    match &a.output {
        Some(path) => std::fs::write(path, main_text).map_err(io_fail)?,
        None => out.write_all(main_text.as_bytes()).map_err(io_fail)?,
    }
    Ok(EXIT_OK)
}

fn cmd_ground(file: &Path, out: &mut dyn Write) -> Outcome {
    let g = ground_program(&load(file)?)?;
    write!(out, "{g}").map_err(io_fail)?;
    Ok(EXIT_OK)
}

fn cmd_check(file: &Path, out: &mut dyn Write) -> Outcome {
    let text = read_source(file)?;
    let program = match parse_with_file(&text, Some(file)) {
        Ok(p) => p,
        Err(errs) => {
            for e in errs {
                writeln!(out, "error: {e}").map_err(io_fail)?;
            }
            return Ok(EXIT_SEMANTIC);
        }
    };
    let diags = validate(&program);
    for d in &diags {
        writeln!(out, "{d}").map_err(io_fail)?;
    }
    if diags.iter().any(|d| d.severity == Severity::Error) {
        return Ok(EXIT_SEMANTIC);
    }
    writeln!(
        out,
        "ok: {} rules, {} cardinality statements",
        program.rules.len(),
        program.cardinalities.len()
    )
    .map_err(io_fail)?;
    Ok(EXIT_OK)
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Outcome {
    let g = ground_program(&load(&a.file)?)?;
    let mode = match a.mode {
        OracleSel::All | OracleSel::EConsistent => OracleMode::All,
        OracleSel::Stable => OracleMode::Stable,
        OracleSel::Preferred => OracleMode::Preferred,
    };
    let mut models = oracle::enumerate(&g, mode).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    if a.mode == OracleSel::EConsistent {
        models = oracle::most_e_consistent(&models);
    }
    let visible = a.show_bottom.then(|| g.atoms());
    print_models(out, &models, None, visible, a.format).map_err(io_fail)?;
    Ok(EXIT_OK)
}

fn cmd_corpus_list(out: &mut dyn Write) -> Outcome {
    for e in corpus::entries() {
        let x = e.expected();
        writeln!(
            out,
            "{:<16} {} model{}  [{}]",
            e.name(),
            x.count,
            if x.count == 1 { " " } else { "s" },
            x.projection.join(", ")
        )
        .map_err(io_fail)?;
    }
    Ok(EXIT_OK)
}

fn cmd_corpus_run(name: &str, external: bool, format: Format, out: &mut dyn Write) -> Outcome {
    let entry = corpus::find(name).ok_or_else(|| {
        let names: Vec<String> = corpus::entries().iter().map(|e| e.name()).collect();
        Failure::new(EXIT_USAGE, format!("unknown corpus entry `{name}`; known: {}", names.join(", ")))
    })?;
    let program = parser::parse(&entry.source()).map_err(|errs| {
        Failure::new(EXIT_SEMANTIC, errs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n"))
    })?;
    let g = ground_program(&program)?;
    let models = if external {
        asp::solve_external(&asp::translate_ground(&g), &external_config(None), true)
            .map_err(asp_fail)?
            .models
    } else {
        solver::preferred_stable_models(&g).models
    };
    let proj = entry.projection();
    print_models(out, &models, Some(&proj), None, format).map_err(io_fail)?;
    match entry.check(&models) {
        Ok(()) => {
            if format == Format::Text {
                writeln!(out, "{}: matches expected models", entry.name()).map_err(io_fail)?;
            }
            Ok(EXIT_OK)
        }
        Err(msg) => Err(Failure::new(EXIT_SEMANTIC, msg)),
    }
}
