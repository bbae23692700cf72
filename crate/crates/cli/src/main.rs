//! Command-line front end for the `intile` library.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use intile::analysis::{analyze_with, AnalysisError, AnalyzeOptions};
use intile::automaton::{enumerate_window_tilings, Budget, EngineError};
use intile::compiler::{
    choose_parameters, compile_with, verify_dynamics_with, verify_structural_with, CompileOptions, CompilerOutput, DynamicsBudget,
    Mode, StructuralOptions,
};
use intile::exec::Exec;
use intile::format::parse_prototile_set;
use intile::matrix::{Cell, IntMatrix};
use intile::prototile::PrototileSet;
use intile::sofic::{least_period_counts, render_word, PeriodicOptions, SoficError};
use intile::suites::worked_examples;

const EXIT_INPUT: u8 = 1;
const EXIT_EMPTY: u8 = 2;
const EXIT_SKIPPED: u8 = 3;
const EXIT_FAILED: u8 = 4;

#[derive(Parser)]
#[command(name = "intile", version, about = "Tilings of the integers as symbolic dynamical systems")]
struct Cli {
    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the tiling automaton of a prototile file and report its invariants.
    Analyze(AnalyzeArgs),
    /// Compile a nonnegative integer matrix into barbells and racks.
    Compile(CompileArgs),
    /// Check a compiled file.
    Verify(VerifyArgs),
    /// Count periodic points of a tiling system.
    Periodic(PeriodicArgs),
    /// List the words of a tiling system up to a length.
    Language(LanguageArgs),
    /// Print the tilings of a finite window as aligned rows.
    Render(RenderArgs),
    /// Reproduce the worked examples and the small-family checks.
    Examples,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Prototile set (JSON).
    file: PathBuf,
    /// Write the subscripted automaton as JSON.
    #[arg(long, value_name = "PATH")]
    export_automaton: Option<PathBuf>,
    /// Write the deterministic presentation as JSON.
    #[arg(long, value_name = "PATH")]
    export_presentation: Option<PathBuf>,
    /// Write the subscripted automaton in Graphviz format.
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct CompileArgs {
    /// Square matrix (JSON array of rows of decimal strings or integers).
    matrix: PathBuf,
    #[arg(long, default_value_t = Mode::Relaxed)]
    mode: Mode,
    /// Output file; defaults to standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Store rack counts only, never the rack list.
    #[arg(long)]
    counts_only: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Compiled file.
    file: PathBuf,
    /// Also build the tiling system and check its dynamics.
    #[arg(long)]
    dynamic: bool,
}

#[derive(Args)]
struct PeriodicArgs {
    file: PathBuf,
    /// Largest period to count.
    #[arg(long, default_value_t = 8)]
    max_period: usize,
}

#[derive(Args)]
struct LanguageArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 6)]
    length: usize,
}

#[derive(Args)]
struct RenderArgs {
    file: PathBuf,
    /// Window width in cells.
    #[arg(long, default_value_t = 6)]
    width: usize,
    /// Print at most this many tilings.
    #[arg(long, default_value_t = 20)]
    limit: usize,
}

/// A failure carrying its exit code.
struct Exit(u8, anyhow::Error);

fn input<E: Into<anyhow::Error>>(e: E) -> Exit {
    Exit(EXIT_INPUT, e.into())
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(input)
}

fn write(path: &Path, text: &str) -> Result<(), Exit> {
    fs::write(path, text)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(input)
}

fn load_prototiles(path: &Path) -> Result<PrototileSet, Exit> {
    parse_prototile_set(&read(path)?)
        .with_context(|| format!("{}", path.display()))
        .map_err(input)
}

fn load_matrix(path: &Path) -> Result<IntMatrix, Exit> {
    let text = read(path)?;
    let rows: Vec<Vec<Cell>> = serde_json::from_str(&text)
        .with_context(|| format!("{}", path.display()))
        .map_err(input)?;
    IntMatrix::from_cells(&rows)
        .with_context(|| format!("{}", path.display()))
        .map_err(input)
}

fn env_budget(name: &str) -> Result<Option<u64>> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| anyhow!("{name} must be a nonnegative integer, got {v:?}")),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{name}: {e}"),
    }
}

/// Resource limits after the `INTILE_MAX_*` overrides.
struct Limits {
    states: Option<u64>,
    alphabet: Option<u64>,
    span: Option<u64>,
}

impl Limits {
    fn from_env() -> Result<Self, Exit> {
        Ok(Limits {
            states: env_budget("INTILE_MAX_STATES").map_err(input)?,
            alphabet: env_budget("INTILE_MAX_ALPHABET").map_err(input)?,
            span: env_budget("INTILE_MAX_SPAN").map_err(input)?,
        })
    }

    fn engine(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(s) = self.states {
            b.max_states = s as usize;
        }
        if let Some(a) = self.alphabet {
            b.max_alphabet = a;
        }
        if let Some(s) = self.span {
            b.max_span = s;
        }
        b
    }

    fn dynamics(&self, exec: Exec) -> DynamicsBudget {
        let mut b = DynamicsBudget { exec, ..Default::default() };
        if let Some(s) = self.states {
            b.max_states = s as usize;
        }
        if let Some(a) = self.alphabet {
            b.max_alphabet = a;
        }
        if let Some(s) = self.span {
            b.max_span = s;
        }
        b
    }
}

fn analysis_failure(e: AnalysisError) -> Exit {
    match e {
        AnalysisError::Engine(EngineError::UnknownColor(_)) => input(e),
        AnalysisError::Engine(_) | AnalysisError::Sofic(SoficError::StateBudget { .. } | SoficError::MapBudget { .. }) => {
            Exit(EXIT_SKIPPED, anyhow!("skipped (scale): {e}"))
        }
        AnalysisError::Sofic(_) => input(e),
    }
}

fn analysis_options(exec: Exec) -> Result<AnalyzeOptions, Exit> {
    let limits = Limits::from_env()?;
    let mut opts = AnalyzeOptions::with_exec(exec);
    opts.build.budget = limits.engine();
    if let Some(s) = limits.states {
        opts.determinize.max_states = s as usize;
    }
    Ok(opts)
}

fn run_analyze(args: &AnalyzeArgs, exec: Exec) -> Result<u8, Exit> {
    let ps = load_prototiles(&args.file)?;
    let a = analyze_with(&ps, &analysis_options(exec)?).map_err(analysis_failure)?;
    print!("{a}");
    if let Some(path) = &args.export_automaton {
        write(path, &a.automaton.to_doc().to_json())?;
    }
    if let Some(path) = &args.export_presentation {
        write(path, &a.presentation.to_doc().to_json())?;
    }
    if let Some(path) = &args.dot {
        write(path, &a.automaton.to_doc().to_dot())?;
    }
    if a.tiles_integers() {
        Ok(0)
    } else {
        println!("empty system: the prototiles do not tile Z");
        Ok(EXIT_EMPTY)
    }
}

fn run_compile(args: &CompileArgs) -> Result<u8, Exit> {
    let a = load_matrix(&args.matrix)?;
    let params = choose_parameters(&a, args.mode).map_err(input)?;
    let opts = CompileOptions {
        counts_only: args.counts_only,
        ..Default::default()
    };
    let out = compile_with(&a, &params, &opts).map_err(input)?;
    let summary = format!(
        "mode {}, n = {}, m = {}: {} barbells, {} racks{}",
        params.mode,
        params.n,
        params.m,
        out.barbell_count(),
        out.total_racks(),
        if out.racks.is_none() { " (counts only)" } else { "" }
    );
    match &args.out {
        Some(path) => {
            write(path, &out.to_json())?;
            println!("{summary}");
        }
        None => {
            print!("{}", out.to_json());
            eprintln!("{summary}");
        }
    }
    if out.is_empty_system() {
        eprintln!("warning: empty system, A^m has no arcs so no rack exists");
    }
    Ok(0)
}

fn run_verify(args: &VerifyArgs, exec: Exec) -> Result<u8, Exit> {
    let out = CompilerOutput::from_json(&read(&args.file)?)
        .with_context(|| format!("{}", args.file.display()))
        .map_err(input)?;
    let structural = verify_structural_with(&out, &StructuralOptions { exec, ..Default::default() });
    println!("structural:");
    print!("{structural}");
    let mut code = if structural.passed() { 0 } else { EXIT_FAILED };
    if args.dynamic {
        let d = verify_dynamics_with(&out, &Limits::from_env()?.dynamics(exec));
        println!("dynamic:");
        match &d.skipped {
            Some(reason) => {
                println!("SKIPPED {reason}");
                if code == 0 {
                    code = EXIT_SKIPPED;
                }
            }
            None => {
                println!("subscripted automaton: {} states", d.automaton_states);
                println!("deterministic presentation: {} states", d.deterministic_states);
                print!("{}", d.report);
                if !d.report.passed() {
                    code = EXIT_FAILED;
                }
            }
        }
    }
    Ok(code)
}

fn run_periodic(args: &PeriodicArgs, exec: Exec) -> Result<u8, Exit> {
    if args.max_period == 0 {
        return Err(input(anyhow!("--max-period must be positive")));
    }
    let ps = load_prototiles(&args.file)?;
    let a = analyze_with(&ps, &analysis_options(exec)?).map_err(analysis_failure)?;
    if a.presentation.is_empty() {
        println!("empty system: no periodic points");
        return Ok(EXIT_EMPTY);
    }
    let opts = PeriodicOptions { exec, ..Default::default() };
    let least = least_period_counts(&a.presentation, args.max_period, &opts)
        .map_err(|e| analysis_failure(AnalysisError::Sofic(e)))?;
    println!("{:>4}  {:>20}  {:>20}", "p", "Fix(σ^p)", "least period p");
    for p in 1..=args.max_period {
        let fix: BigUint = (1..=p).filter(|d| p % d == 0).map(|d| &least[d - 1]).sum();
        println!("{p:>4}  {fix:>20}  {:>20}", least[p - 1]);
    }
    Ok(0)
}

fn run_language(args: &LanguageArgs, exec: Exec) -> Result<u8, Exit> {
    let ps = load_prototiles(&args.file)?;
    let a = analyze_with(&ps, &analysis_options(exec)?).map_err(analysis_failure)?;
    if a.presentation.is_empty() {
        println!("empty system: the language is empty");
        return Ok(EXIT_EMPTY);
    }
    let words = a.presentation.language_up_to(args.length);
    let colors = a.presentation.colors();
    for len in 0..=args.length {
        let mut rendered: Vec<String> = words.iter().filter(|w| w.len() == len).map(|w| render_word(colors, w)).collect();
        rendered.sort();
        println!("length {len}: {} words", rendered.len());
        for w in rendered {
            println!("  {}", if w.is_empty() { "ε" } else { &w });
        }
    }
    Ok(0)
}

fn run_render(args: &RenderArgs) -> Result<u8, Exit> {
    if args.width == 0 {
        return Err(input(anyhow!("--width must be positive")));
    }
    let ps = load_prototiles(&args.file)?;
    let tilings = enumerate_window_tilings(&ps, args.width);
    println!("{} tilings of cells 0..{}", tilings.len(), args.width);
    let name_width = ps.colors().iter().map(|c| c.chars().count()).max().unwrap_or(1);
    for (idx, t) in tilings.iter().take(args.limit).enumerate() {
        let lo = t.placements.iter().map(|p| p.position).min().unwrap_or(0).min(0);
        let hi = t
            .placements
            .iter()
            .map(|p| p.position + ps.tiles()[p.tile].span() as i64)
            .max()
            .unwrap_or(0)
            .max(args.width as i64);
        let mut out = String::new();
        let _ = writeln!(out, "tiling {}:", idx + 1);
        let ruler: Vec<&str> = (lo..hi).map(|c| if (0..args.width as i64).contains(&c) { "=" } else { "." }).collect();
        let _ = writeln!(out, "  {:>name_width$}  {}", "", ruler.join(" "));
        for p in &t.placements {
            let tile = &ps.tiles()[p.tile];
            let indent = "  ".repeat((p.position - lo) as usize);
            let _ = writeln!(out, "  {:>name_width$}  {indent}{}", tile.color(), tile.render_broken_word());
        }
        print!("{out}");
    }
    if tilings.len() > args.limit {
        println!("({} more not shown)", tilings.len() - args.limit);
    }
    Ok(if tilings.is_empty() { EXIT_EMPTY } else { 0 })
}

fn run_examples(exec: Exec) -> Result<u8, Exit> {
    let report = worked_examples(exec).map_err(|e| Exit(EXIT_FAILED, e.into()))?;
    print!("{report}");
    Ok(if report.passed() { 0 } else { EXIT_FAILED })
}

/// The error chain joined by `: `, dropping causes already quoted by
/// their parent.
fn describe(e: &anyhow::Error) -> String {
    let mut parts: Vec<String> = Vec::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if parts.last().is_some_and(|p| p.ends_with(&text)) {
            continue;
        }
        parts.push(text);
    }
    parts.join(": ")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let result = match &cli.command {
        Command::Analyze(a) => run_analyze(a, exec),
        Command::Compile(a) => run_compile(a),
        Command::Verify(a) => run_verify(a, exec),
        Command::Periodic(a) => run_periodic(a, exec),
        Command::Language(a) => run_language(a, exec),
        Command::Render(a) => run_render(a),
        Command::Examples => run_examples(exec),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(code)
        }
    }
}
