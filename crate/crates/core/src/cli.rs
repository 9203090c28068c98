//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{
    check_levels, infinity_error, infinity_error_2d, refinement_study, scientific, truncation_errors,
};
use crate::averaging::{AveragingMode, AveragingPolicy};
use crate::error::SolveError;
use crate::exec::Execution;
use crate::expr::Params;
use crate::fd1d::solve1d;
use crate::fd2d::solve_problem_2d;
use crate::greens::{reproduction_check, GreensFunction};
use crate::options::{Method, SolveOptions};
use crate::problem::{catalog, catalog_definition, InterfaceProblem, ManufacturedCase, ProblemDefinition, ProblemError};

#[derive(Parser, Debug)]
#[command(name = "iham", version, about = "Harmonic-average finite differences for interface problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a 1D problem on one grid.
    Solve1d(SolveArgs),
    /// Solve a 2D problem on one grid.
    Solve2d(SolveArgs),
    /// Grid-refinement study with convergence orders.
    Refine(SolveArgs),
    /// Local truncation errors of a 1D case.
    Truncation(SolveArgs),
    /// Check that the scheme reproduces a scaled Green's function.
    GreensCheck(GreensArgs),
    /// Print the built-in cases and their parameters.
    ListCases(OutputArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct ProblemArgs {
    /// Built-in case: ex1, ex2, ex3, ex2d.
    #[arg(long, conflicts_with = "config")]
    pub case: Option<String>,
    /// Parameter override, `name=value` (decimals only).
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// TOML problem description with an optional `[solver]` section.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Significant digits in printed numbers.
    #[arg(long, default_value_t = 17, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub digits: u8,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum)]
    pub averaging: Option<AveragingArg>,
    /// Scale the irregular rows to make the matrix symmetric.
    #[arg(long)]
    pub symmetrize: bool,
    /// Grid size: `64`, a list `32,64,128` or a doubling range `32:4096`.
    #[arg(long = "N", value_name = "LEVELS")]
    pub levels: Option<String>,
    /// 2D cells in x.
    #[arg(long)]
    pub m: Option<usize>,
    /// 2D cells in y.
    #[arg(long)]
    pub n: Option<usize>,
    /// CG relative residual target.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Run everything on the calling thread.
    #[arg(long)]
    pub sequential: bool,
    /// Write nodal values (`x,u` or `x,y,u`) instead of the error summary.
    #[arg(long)]
    pub emit_solution: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GreensArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long = "beta-minus")]
    pub beta_minus: f64,
    #[arg(long = "beta-plus")]
    pub beta_plus: f64,
    #[arg(long = "W", default_value_t = 1.0)]
    pub w: f64,
    #[arg(long = "N", default_value_t = 64)]
    pub n: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, Default, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Table,
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Classical,
    Improved,
}

#[derive(ValueEnum, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AveragingArg {
    Midpoint,
    Integral,
}

#[derive(Deserialize, Debug, Default, Clone)]
#[serde(untagged)]
enum LevelsValue {
    #[default]
    None,
    One(usize),
    Many(Vec<usize>),
    Spec(String),
}

/// The `[solver]` section of a config file; command-line flags win.
#[derive(Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    method: Option<MethodArg>,
    averaging: Option<AveragingArg>,
    #[serde(default)]
    symmetrize: bool,
    tol: Option<f64>,
    #[serde(rename = "N", default)]
    levels: LevelsValue,
    m: Option<usize>,
    n: Option<usize>,
}

/// Failure of a command, tagged with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = if e.is_numerical() {
            2
        } else if e.is_validation() || matches!(e, SolveError::Problem(ProblemError::NonPositiveBeta { .. })) {
            3
        } else {
            1
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ProblemError> for Failure {
    fn from(e: ProblemError) -> Self {
        SolveError::from(e).into()
    }
}

/// Parses `64`, `32,64,128` or `32:4096` (doubling).
pub fn parse_levels(spec: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("bad grid levels `{spec}`");
    let levels = if let Some((lo, hi)) = spec.split_once(':') {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        let mut v = vec![lo];
        while *v.last().unwrap() < hi {
            v.push(v.last().unwrap() * 2);
        }
        if *v.last().unwrap() != hi {
            return Err(format!("{hi} is not {lo} times a power of two"));
        }
        v
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?
    };
    if levels.is_empty() {
        return Err(bad());
    }
    Ok(levels)
}

fn parse_param(kv: &str) -> Result<(String, f64), Failure> {
    let (k, v) = kv
        .split_once('=')
        .ok_or_else(|| Failure::usage(format!("parameter `{kv}` is not name=value")))?;
    let value: f64 = v
        .trim()
        .parse()
        .map_err(|_| Failure::usage(format!("parameter `{kv}`: `{}` is not a decimal number", v.trim())))?;
    Ok((k.trim().to_string(), value))
}

struct Loaded {
    definition: ProblemDefinition,
    name: String,
    solver: SolverSection,
}

fn load_problem(args: &ProblemArgs) -> Result<Loaded, Failure> {
    let overrides = args
        .params
        .iter()
        .map(|kv| parse_param(kv))
        .collect::<Result<Params, _>>()?;
    match (&args.case, &args.config) {
        (Some(name), None) => {
            let entry = catalog()
                .iter()
                .find(|e| e.name == name)
                .ok_or_else(|| Failure::from(ProblemError::UnknownCase(name.clone())))?;
            let mut params = entry.default_params();
            params.extend(overrides);
            Ok(Loaded {
                definition: catalog_definition(name, &params)?,
                name: name.clone(),
                solver: SolverSection::default(),
            })
        }
        (None, Some(path)) => {
            let (mut definition, solver) = read_config(path)?;
            for (k, v) in overrides {
                if k == "alpha" {
                    definition.alpha = v;
                } else {
                    definition.params.insert(k, v);
                }
            }
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "config".into());
            Ok(Loaded {
                definition,
                name,
                solver,
            })
        }
        _ => Err(Failure::usage("give exactly one of --case or --config")),
    }
}

fn read_config(path: &Path) -> Result<(ProblemDefinition, SolverSection), Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let solver = match table.remove("solver") {
        Some(v) => v
            .try_into()
            .map_err(|e| Failure::usage(format!("{}: [solver]: {e}", path.display())))?,
        None => SolverSection::default(),
    };
    let definition = toml::Value::Table(table)
        .try_into()
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    Ok((definition, solver))
}

struct Settings {
    method: Method,
    options: SolveOptions,
    levels: Option<Vec<usize>>,
    m: Option<usize>,
    n: Option<usize>,
}

fn settings(args: &SolveArgs, solver: &SolverSection) -> Result<Settings, Failure> {
    let method = match args.method.or(solver.method) {
        Some(MethodArg::Classical) => Method::Classical,
        _ => Method::Improved,
    };
    let mode = match args.averaging.or(solver.averaging) {
        Some(AveragingArg::Integral) => AveragingMode::IntegralHarmonic,
        _ => AveragingMode::Midpoint,
    };
    let mut options = SolveOptions {
        symmetrize: args.symmetrize || solver.symmetrize,
        averaging: AveragingPolicy::default().with_mode(mode),
        ..SolveOptions::default()
    };
    if let Some(tol) = args.tol.or(solver.tol) {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Failure::usage(format!("tolerance {tol} outside (0, 1)")));
        }
        options.cg_tol = tol;
    }
    if args.sequential {
        options.execution = Execution::Sequential;
    }
    let levels = match &args.levels {
        Some(s) => Some(parse_levels(s).map_err(Failure::usage)?),
        None => match &solver.levels {
            LevelsValue::None => None,
            LevelsValue::One(n) => Some(vec![*n]),
            LevelsValue::Many(v) => Some(v.clone()),
            LevelsValue::Spec(s) => Some(parse_levels(s).map_err(Failure::usage)?),
        },
    };
    Ok(Settings {
        method,
        options,
        levels,
        m: args.m.or(solver.m),
        n: args.n.or(solver.n),
    })
}

fn single_level(s: &Settings, default: usize) -> Result<usize, Failure> {
    match s.levels.as_deref() {
        None => Ok(default),
        Some([n]) => Ok(*n),
        Some(_) => Err(Failure::usage("this command takes a single --N")),
    }
}

/// Renders rows as CSV or as a right-aligned text table.
fn render(format: Format, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            let _ = writeln!(out, "{}", header.join(","));
            for r in rows {
                let _ = writeln!(out, "{}", r.join(","));
            }
        }
        Format::Table => {
            let width: Vec<usize> = (0..header.len())
                .map(|c| rows.iter().map(|r| r[c].len()).chain([header[c].len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: Vec<&str>| {
                cells
                    .iter()
                    .zip(&width)
                    .map(|(s, w)| format!("{s:>w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
            };
            let _ = writeln!(out, "{}", line(header.to_vec()));
            for r in rows {
                let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
            }
        }
    }
    out
}

fn num(v: f64, digits: u8) -> String {
    scientific(v, digits as usize)
}

fn cmd_solve1d(args: &SolveArgs) -> Result<String, Failure> {
    let loaded = load_problem(&args.problem)?;
    let s = settings(args, &loaded.solver)?;
    let defined = loaded.definition.instantiate()?;
    let InterfaceProblem::OneD(problem) = &defined.problem else {
        return Err(SolveError::WrongDimension { expected: 1 }.into());
    };
    let n = single_level(&s, 64)?;
    let sol = solve1d(problem, n, s.method, &s.options)?;
    let d = args.output.digits;
    if args.emit_solution {
        let rows: Vec<Vec<String>> = sol.points().map(|(x, u)| vec![num(x, d), num(u, d)]).collect();
        return Ok(render(args.output.format, &["x", "u"], &rows));
    }
    let error = match &defined.exact {
        Some(exact) => num(infinity_error(&sol, exact).map_err(SolveError::from)?, d),
        None => String::new(),
    };
    Ok(render(args.output.format, &["N", "error"], &[vec![n.to_string(), error]]))
}

fn cmd_solve2d(args: &SolveArgs) -> Result<String, Failure> {
    let loaded = load_problem(&args.problem)?;
    let s = settings(args, &loaded.solver)?;
    let defined = loaded.definition.instantiate()?;
    let InterfaceProblem::TwoD(problem) = &defined.problem else {
        return Err(SolveError::WrongDimension { expected: 2 }.into());
    };
    let side = single_level(&s, 64)?;
    let (m, n) = (s.m.unwrap_or(side), s.n.unwrap_or(side));
    let sol = solve_problem_2d(problem, m, n, &s.options)?;
    let d = args.output.digits;
    if args.emit_solution {
        let rows: Vec<Vec<String>> = sol
            .points()
            .map(|(x, y, u)| vec![num(x, d), num(y, d), num(u, d)])
            .collect();
        return Ok(render(args.output.format, &["x", "y", "u"], &rows));
    }
    let error = match &defined.exact {
        Some(exact) => num(infinity_error_2d(&sol, exact).map_err(SolveError::from)?, d),
        None => String::new(),
    };
    Ok(render(
        args.output.format,
        &["m", "n", "error", "iterations", "residual"],
        &[vec![
            m.to_string(),
            n.to_string(),
            error,
            sol.report.iterations.to_string(),
            num(sol.report.residual, d),
        ]],
    ))
}

fn manufactured(loaded: Loaded) -> Result<ManufacturedCase, Failure> {
    let name = loaded.name.clone();
    let defined = loaded.definition.instantiate()?;
    if defined.exact.is_none() {
        return Err(Failure::usage(format!("{name}: no exact solution given")));
    }
    Ok(defined.into_case(name)?)
}

fn cmd_refine(args: &SolveArgs) -> Result<String, Failure> {
    let loaded = load_problem(&args.problem)?;
    let s = settings(args, &loaded.solver)?;
    let case = manufactured(loaded)?;
    let levels = s.levels.clone().unwrap_or_else(|| vec![32, 64, 128, 256]);
    check_levels(&levels)?;
    let table = refinement_study(&case, &levels, s.method, &s.options)?;
    let d = args.output.digits as usize;
    Ok(match args.output.format {
        Format::Csv => table.to_csv(d),
        Format::Table => table.to_text(d),
    })
}

fn cmd_truncation(args: &SolveArgs) -> Result<String, Failure> {
    let loaded = load_problem(&args.problem)?;
    let s = settings(args, &loaded.solver)?;
    let case = manufactured(loaded)?;
    let n = single_level(&s, 32)?;
    let report = truncation_errors(&case, n, s.method, &s.options)?;
    let d = args.output.digits;
    let rows: Vec<Vec<String>> = (1..n)
        .map(|i| {
            let irregular = i == report.j || i == report.j + 1;
            vec![
                i.to_string(),
                num(report.grid.node(i), d),
                num(report.at(i), d),
                u8::from(irregular).to_string(),
            ]
        })
        .collect();
    let mut out = render(args.output.format, &["i", "x", "T", "irregular"], &rows);
    if args.output.format == Format::Table {
        let _ = writeln!(out);
        let _ = writeln!(out, "j = {}", report.j);
        let _ = writeln!(out, "T_j = {}", num(report.t_j, d));
        let _ = writeln!(out, "T_j+1 = {}", num(report.t_j1, d));
        let _ = writeln!(out, "h_l = {}, h_r = {}", num(report.h_l, d), num(report.h_r, d));
        let _ = writeln!(out, "|T_j+1 + (h_l/h_r) T_j| = {}", num(report.cancellation_residual(), d));
        let _ = writeln!(out, "max regular |T_i| = {}", num(report.max_regular(), d));
    }
    Ok(out)
}

fn cmd_greens(args: &GreensArgs) -> Result<String, Failure> {
    let gf = GreensFunction::new(args.alpha, args.beta_minus, args.beta_plus)
        .map_err(|e| Failure { code: 3, message: e.to_string() })?;
    let error = reproduction_check(args.alpha, args.beta_minus, args.beta_plus, args.w, args.n)?;
    let allowed = 1e-10 * (args.w.abs() * gf.max_abs()).max(1.0);
    let d = args.output.digits;
    let out = render(
        args.output.format,
        &["alpha", "beta_minus", "beta_plus", "W", "N", "max_error", "allowed"],
        &[vec![
            num(args.alpha, d),
            num(args.beta_minus, d),
            num(args.beta_plus, d),
            num(args.w, d),
            args.n.to_string(),
            num(error, d),
            num(allowed, d),
        ]],
    );
    if error > allowed {
        return Err(Failure {
            code: 2,
            message: format!("{out}max error {error:e} exceeds {allowed:e}"),
        });
    }
    Ok(out)
}

fn cmd_list(args: &OutputArgs) -> String {
    let rows: Vec<Vec<String>> = catalog()
        .iter()
        .map(|e| vec![e.name.to_string(), e.signature(), e.summary.to_string()])
        .collect();
    match args.format {
        Format::Csv => {
            // signatures contain commas
            let quoted: Vec<Vec<String>> = rows
                .into_iter()
                .map(|r| r.into_iter().map(|c| format!("\"{}\"", c.replace('"', "\"\""))).collect())
                .collect();
            render(Format::Csv, &["name", "params", "summary"], &quoted)
        }
        Format::Table => render(Format::Table, &["name", "params", "summary"], &rows),
    }
}

fn output_of(command: &Command) -> &OutputArgs {
    match command {
        Command::Solve1d(a) | Command::Solve2d(a) | Command::Refine(a) | Command::Truncation(a) => &a.output,
        Command::GreensCheck(a) => &a.output,
        Command::ListCases(a) => a,
    }
}

fn execute(command: &Command) -> Result<String, Failure> {
    match command {
        Command::Solve1d(a) => cmd_solve1d(a),
        Command::Solve2d(a) => cmd_solve2d(a),
        Command::Refine(a) => cmd_refine(a),
        Command::Truncation(a) => cmd_truncation(a),
        Command::GreensCheck(a) => cmd_greens(a),
        Command::ListCases(a) => Ok(cmd_list(a)),
    }
}

#[cfg(feature = "parallel")]
fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match std::env::var("IHAM_THREADS") {
        Ok(v) => {
            let threads: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| Failure::usage(format!("IHAM_THREADS={v} is not a positive integer")))?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Failure::usage(e.to_string()))?;
            Ok(pool.install(f))
        }
        Err(_) => Ok(f()),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    Ok(f())
}

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 success, 1 usage, 2 numerical failure, 3 invalid problem.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = with_thread_cap(|| execute(&cli.command)).and_then(|r| r);
    match result {
        Ok(text) => {
            let written = match &output_of(&cli.command).out {
                Some(path) => std::fs::write(path, &text)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => 0,
                Err(msg) => {
                    let _ = writeln!(stderr, "error: {msg}");
                    1
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
