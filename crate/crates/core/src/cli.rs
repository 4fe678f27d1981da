//! The `bondsym` command line: a sectioned `key = value` config merged with
//! flags, and six subcommands.
//!
//! ```text
//! [params]
//! alpha = 0
//! beta = 0.05
//! gamma = 1
//! rho = 0.3
//! source = beta*u
//!
//! [grid]
//! nx = 101
//! x_min = 0.5
//! x_max = 2
//! ```
//!
//! Every key can also be given as `--set section.key=value`; flags override
//! the file.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::expr::{parse, Expr, ExprError, Point};
use crate::fdsolver::{self, FarField, Grid, NearField, SolverConfig, SolverError, SourceUpdate, Surface};
use crate::model::{classify, Equation, ModelError, Params, PdeProblem, DEFAULT_CLASSIFY_TOL};
use crate::sampling::DEFAULT_SEED;
use crate::solutions::{self, BarrierSpec, CaseId, ClosedFormCase, SolutionError};
use crate::transforms::{self, TransformError};
use crate::verify::{
    self, solution_to_solution_check, Chart, FlowOptions, Generator, Report, SuiteOptions,
    VerifyError, SUITES,
};

pub const SEED_VAR: &str = "BONDSYM_SEED";

#[derive(Debug, Parser)]
#[command(name = "bondsym", version, about = "Bond-pricing PDE reductions, closed forms and FD pricing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Run check suites and write one JSON record per check
    Verify,
    /// Evaluate a catalogued solution on a grid as CSV
    Oracle,
    /// Finite-difference solve as CSV
    Price,
    /// Print the reduction chain and image source for given parameters
    Transform,
    /// Flow a catalogued solution along a generator and check the image
    Flow,
    /// List the catalogue with constraints
    Cases,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Sectioned key=value config file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "ID")]
    pub case: Option<String>,
    #[arg(long, global = true, value_name = "REAL")]
    pub tol: Option<String>,
    #[arg(long, global = true, value_name = "NX,NT")]
    pub grid: Option<String>,
    #[arg(long, global = true, value_name = "LO,HI")]
    pub xrange: Option<String>,
    #[arg(long, global = true, value_name = "LO,HI")]
    pub trange: Option<String>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<String>,
    /// Comma-separated suite names, or `all`
    #[arg(long, global = true, value_name = "NAME")]
    pub suite: Option<String>,
    /// Any config key, as `section.key=value`; repeatable
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } => 2,
            _ => 1,
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

const KEYS: &[&str] = &[
    "run.case",
    "run.seed",
    "params.alpha",
    "params.beta",
    "params.gamma",
    "params.delta",
    "params.lambda",
    "params.rho",
    "params.source",
    "terminal.T",
    "terminal.payoff",
    "barrier.a",
    "barrier.b",
    "barrier.K",
    "barrier.rebate",
    "grid.nx",
    "grid.nt",
    "grid.x_min",
    "grid.x_max",
    "grid.t_min",
    "grid.t_max",
    "solver.theta",
    "solver.far",
    "solver.far_value",
    "solver.near",
    "solver.near_value",
    "solver.update",
    "solver.corrections",
    "solver.tolerance",
    "verify.suite",
    "verify.tol",
    "flow.generator",
    "flow.frame",
    "flow.eps",
    "flow.reconstruction",
    "flow.tol",
    "output.path",
];

/// Merged configuration: flat `section.key` names to raw values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub command: Option<Command>,
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Parses the sectioned format; `#` and `;` start comment lines.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        let mut section = String::from("run");
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let err = |message: String| CliError::Config { line: k + 1, message };
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header `{line}`")))?;
                section = name.trim().to_string();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            cfg.set(&format!("{section}.{}", key.trim()), value.trim())
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !KEYS.contains(&key) {
            return Err(usage(format!("unknown config key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| usage(format!("{key}: `{v}` is not a number"))))
            .transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| usage(format!("{key}: `{v}` is not a count"))))
            .transpose()
            .map(|v| v.unwrap_or(default))
    }

    fn range(&self, lo: &str, hi: &str, default: (f64, f64)) -> Result<(f64, f64), CliError> {
        Ok((self.f64_or(lo, default.0)?, self.f64_or(hi, default.1)?))
    }

    fn apply_pair(&mut self, flag: &str, text: &str, keys: [&str; 2]) -> Result<(), CliError> {
        let (a, b) = text
            .split_once(',')
            .ok_or_else(|| usage(format!("--{flag} expects two comma-separated values")))?;
        self.set(keys[0], a.trim())?;
        self.set(keys[1], b.trim())
    }

    /// Config file first, then named flags, then `--set` entries.
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let f = &cli.flags;
        let mut cfg = match &f.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                RunConfig::parse(&text)?
            }
            None => RunConfig::default(),
        };
        cfg.command = Some(cli.command);
        let singles = [
            ("run.case", &f.case),
            ("run.seed", &f.seed),
            ("verify.tol", &f.tol),
            ("verify.suite", &f.suite),
        ];
        for (key, v) in singles {
            if let Some(v) = v {
                cfg.set(key, v)?;
            }
        }
        if let Some(g) = &f.grid {
            cfg.apply_pair("grid", g, ["grid.nx", "grid.nt"])?;
        }
        if let Some(x) = &f.xrange {
            cfg.apply_pair("xrange", x, ["grid.x_min", "grid.x_max"])?;
        }
        if let Some(t) = &f.trange {
            cfg.apply_pair("trange", t, ["grid.t_min", "grid.t_max"])?;
        }
        if let Some(p) = &f.out {
            cfg.set("output.path", &p.display().to_string())?;
        }
        for entry in &f.set {
            let (k, v) = entry
                .split_once('=')
                .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{entry}`")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// `run.seed`, then `BONDSYM_SEED`, then the library default.
    pub fn seed(&self) -> Result<u64, CliError> {
        let from_env = std::env::var(SEED_VAR).ok();
        match self.get("run.seed").or(from_env.as_deref()) {
            Some(v) => v.trim().parse().map_err(|_| usage(format!("seed `{v}` is not an integer"))),
            None => Ok(DEFAULT_SEED),
        }
    }

    fn case(&self) -> Result<Option<ClosedFormCase>, CliError> {
        self.get("run.case")
            .map(|id| {
                id.parse::<CaseId>()
                    .map(solutions::get_case)
                    .map_err(|e| usage(e.to_string()))
            })
            .transpose()
    }

    fn require_case(&self) -> Result<ClosedFormCase, CliError> {
        self.case()?.ok_or_else(|| usage("this subcommand needs --case"))
    }

    fn params(&self) -> Result<Params, CliError> {
        let mut p = Params::default();
        for name in Params::NAMES {
            if let Some(v) = self.f64(&format!("params.{name}"))? {
                p.set(name, v);
            }
        }
        Ok(p)
    }

    /// Expression in `x`, `t`, `u` and the parameter names, bound to `p`.
    fn expr(&self, key: &str, default: &str, p: &Params) -> Result<Expr, CliError> {
        let text = self.get(key).unwrap_or(default);
        parse(text, &Params::NAMES)
            .map(|e| e.bind(&p.bindings()))
            .map_err(|e| usage(format!("{key}: {e}")))
    }

    fn problem(&self) -> Result<PdeProblem, CliError> {
        let p = self.params()?;
        let source = self.expr("params.source", "0", &p)?;
        Ok(PdeProblem::new(p, source)?)
    }

    fn solver(&self, exact: Option<&Expr>) -> Result<SolverConfig, CliError> {
        let mut cfg = SolverConfig {
            theta: self.f64_or("solver.theta", 0.5)?,
            corrections: self.usize_or("solver.corrections", 1)?,
            tolerance: self.f64_or("solver.tolerance", 1e-12)?,
            ..SolverConfig::default()
        };
        cfg.source = match self.get("solver.update").unwrap_or("newton") {
            "newton" => SourceUpdate::Newton,
            "fixed-point" => SourceUpdate::FixedPoint,
            other => return Err(usage(format!("solver.update: unknown rule `{other}`"))),
        };
        let p = self.params()?;
        let pinned = |value_key: &str| -> Result<Expr, CliError> {
            match (self.get(value_key), exact) {
                (Some(_), _) => self.expr(value_key, "0", &p),
                (None, Some(e)) => Ok(e.clone()),
                (None, None) => Err(usage(format!("{value_key} is needed without --case"))),
            }
        };
        cfg.far_field = match self.get("solver.far").unwrap_or("linear") {
            "linear" => FarField::Linear,
            "dirichlet" => FarField::Dirichlet(pinned("solver.far_value")?),
            other => return Err(usage(format!("solver.far: unknown rule `{other}`"))),
        };
        cfg.near_field = match self.get("solver.near").unwrap_or("equation") {
            "equation" => NearField::InteriorEquation,
            "dirichlet" => NearField::Dirichlet(pinned("solver.near_value")?),
            other => return Err(usage(format!("solver.near: unknown rule `{other}`"))),
        };
        Ok(cfg)
    }
}

/// Report sink: `output.path` when set, stdout otherwise.
fn open_out(cfg: &RunConfig) -> Result<(Box<dyn Write>, bool), CliError> {
    match cfg.get("output.path") {
        Some(path) => {
            let f = fs::File::create(path).map_err(|source| CliError::Io {
                path: path.to_string(),
                source,
            })?;
            Ok((Box::new(io::BufWriter::new(f)), true))
        }
        None => Ok((Box::new(io::stdout().lock()), false)),
    }
}

fn io_err(source: io::Error) -> CliError {
    CliError::Io {
        path: "output".into(),
        source,
    }
}

fn write_reports(cfg: &RunConfig, reports: &[Report]) -> Result<bool, CliError> {
    let (mut out, to_file) = open_out(cfg)?;
    for r in reports {
        writeln!(out, "{}", r.to_json_line()).map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    let blocking = reports.iter().filter(|r| r.is_blocking()).count();
    let candidates = reports
        .iter()
        .filter(|r| r.status.as_deref() == Some(verify::ERRATUM_CANDIDATE))
        .count();
    let mut summary = String::new();
    for r in reports {
        summary.push_str(&format!("{r}\n"));
    }
    summary.push_str(&format!(
        "{} checks, {} passed, {} failed, {} erratum candidates\n",
        reports.len(),
        reports.iter().filter(|r| r.pass).count(),
        blocking,
        candidates
    ));
    if to_file {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(blocking == 0)
}

fn write_surface(cfg: &RunConfig, s: &Surface) -> Result<(), CliError> {
    let (mut out, _) = open_out(cfg)?;
    s.write_csv(&mut out).map_err(io_err)?;
    out.flush().map_err(io_err)
}

fn cases(cfg: &RunConfig) -> Result<bool, CliError> {
    let (mut out, _) = open_out(cfg)?;
    for c in solutions::catalog() {
        let kind = if c.id.is_barrier() { "barrier" } else { "terminal" };
        let constraints: Vec<String> = c.constraints.iter().map(|k| k.to_string()).collect();
        writeln!(out, "{:<13} {:<10} {:<8} {}", c.id.name(), c.id.tag().to_string(), kind, constraints.join("; "))
            .map_err(io_err)?;
    }
    out.flush().map_err(io_err)?;
    Ok(true)
}

fn run_verify(cfg: &RunConfig) -> Result<bool, CliError> {
    let names: Vec<&str> = match cfg.get("verify.suite") {
        None | Some("all") => SUITES.to_vec(),
        Some(list) => list.split(',').map(str::trim).collect(),
    };
    for n in &names {
        if !SUITES.contains(n) {
            return Err(usage(format!("unknown suite `{n}`; known: {}", SUITES.join(", "))));
        }
    }
    let opts = SuiteOptions {
        seed: cfg.seed()?,
        case: cfg.case()?.map(|c| c.id),
        tol: cfg.f64("verify.tol")?,
    };
    let reports: Vec<Report> = names
        .iter()
        .flat_map(|n| verify::run_suite(n, &opts).expect("validated name"))
        .collect();
    write_reports(cfg, &reports)
}

fn oracle(cfg: &RunConfig) -> Result<bool, CliError> {
    let c = cfg.require_case()?;
    let grid = Grid::uniform(
        cfg.range("grid.x_min", "grid.x_max", c.region.x)?,
        cfg.usize_or("grid.nx", 21)?,
        cfg.range("grid.t_min", "grid.t_max", c.region.t)?,
        cfg.usize_or("grid.nt", 11)?,
    )?;
    write_surface(cfg, &Surface::from_expr(grid, &c.solution)?)?;
    Ok(true)
}

/// Problem, payoff, terminal time, barrier and known solution for `price`.
struct PriceSetup {
    prob: PdeProblem,
    payoff: Expr,
    t_end: f64,
    barrier: Option<BarrierSpec>,
    exact: Option<Expr>,
    x_range: (f64, f64),
}

fn price_setup(cfg: &RunConfig) -> Result<PriceSetup, CliError> {
    if let Some(c) = cfg.case()? {
        let t_end = c.terminal_time();
        let barrier = c.barrier().cloned();
        // leave room below the lowest barrier position
        let x_lo = match &barrier {
            Some(b) => 0.9 * b.h_at(0.0)?.min(b.h_at(t_end)?),
            None => c.region.x.0,
        };
        return Ok(PriceSetup {
            prob: c.problem(),
            payoff: c.solution.subst("t", &Expr::constant(t_end)),
            t_end,
            barrier,
            exact: Some(c.solution.clone()),
            x_range: (x_lo, c.region.x.1),
        });
    }
    let prob = cfg.problem()?;
    let p = prob.params;
    let t_end = cfg.f64_or("terminal.T", 1.0)?;
    let barrier = match cfg.f64("barrier.a")? {
        Some(a) => Some(BarrierSpec::exponential(
            a,
            cfg.f64_or("barrier.b", 0.5)?,
            cfg.f64_or("barrier.K", 1.0)?,
            t_end,
            cfg.expr("barrier.rebate", "0", &p)?,
        )),
        None => None,
    };
    Ok(PriceSetup {
        payoff: cfg.expr("terminal.payoff", "1", &p)?,
        prob,
        t_end,
        barrier,
        exact: None,
        x_range: (0.5, 2.0),
    })
}

fn price(cfg: &RunConfig) -> Result<bool, CliError> {
    let s = price_setup(cfg)?;
    let grid = Grid::for_gamma(
        s.prob.params.gamma,
        cfg.range("grid.x_min", "grid.x_max", s.x_range)?,
        cfg.usize_or("grid.nx", 101)?,
        cfg.range("grid.t_min", "grid.t_max", (0.0, s.t_end))?,
        cfg.usize_or("grid.nt", 101)?,
    )?;
    let solver = cfg.solver(s.exact.as_ref())?;
    let surface = match &s.barrier {
        Some(b) => fdsolver::solve_barrier(&s.prob, &grid, b, &s.payoff, &solver)?.physical,
        None => fdsolver::solve_terminal(&s.prob, &grid, &s.payoff, &solver)?,
    };
    write_surface(cfg, &surface)?;
    Ok(true)
}

fn transform(cfg: &RunConfig) -> Result<bool, CliError> {
    let prob = match cfg.case()? {
        Some(c) => c.problem(),
        None => cfg.problem()?,
    };
    let chain = transforms::reduction_chain(&prob.params)?;
    let heat = chain.transport(&Equation::Bond(prob.clone()))?;
    let (mut out, _) = open_out(cfg)?;
    let text = format!(
        "params: {}\ncase: {}\nsource: {}\n{}image source: {}\n",
        prob.params,
        classify(&prob.params, DEFAULT_CLASSIFY_TOL),
        prob.source,
        chain,
        heat.source()
    );
    out.write_all(text.as_bytes()).map_err(io_err)?;
    out.flush().map_err(io_err)?;
    Ok(true)
}

fn flow(cfg: &RunConfig) -> Result<bool, CliError> {
    let c = cfg.require_case()?;
    let heat_frame = match cfg.get("flow.frame").unwrap_or("original") {
        "original" => false,
        "heat" => true,
        other => return Err(usage(format!("flow.frame: unknown frame `{other}`"))),
    };
    let chart = if heat_frame { Chart::Reduced } else { Chart::Original };
    let spec = cfg.get("flow.generator").unwrap_or("0");
    let g = match spec.parse::<usize>() {
        Ok(k) => {
            let mut g = c.generators.generators.get(k).cloned().ok_or_else(|| {
                usage(format!("{} has {} generators", c.id, c.generators.generators.len()))
            })?;
            g.frame = chart;
            g
        }
        Err(_) => {
            let parts: Vec<&str> = spec.split(';').collect();
            let [a, b, e] = parts[..] else {
                return Err(usage("flow.generator: an index or `xi1; xi2; eta`"));
            };
            let env = c.env();
            let names: Vec<&str> = env.keys().map(String::as_str).collect();
            let comp = |s: &str| {
                parse(s, &names)
                    .map(|e| e.bind(&env))
                    .map_err(|err| usage(format!("flow.generator: {err}")))
            };
            Generator::new(comp(a)?, comp(b)?, comp(e)?, chart)
        }
    };
    let opts = match cfg.get("flow.reconstruction").unwrap_or("quadratic") {
        "quadratic" => FlowOptions::default(),
        "pullback" => FlowOptions::pullback(),
        other => return Err(usage(format!("flow.reconstruction: unknown method `{other}`"))),
    };
    let eps = cfg
        .get("flow.eps")
        .unwrap_or("0.1")
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| usage(format!("flow.eps: `{v}` is not a number"))))
        .collect::<Result<Vec<f64>, _>>()?;
    let (u, eq, region) = if heat_frame {
        let chain = transforms::reduction_chain(&c.params)?;
        let eq = chain.transport(&Equation::Bond(c.problem()))?;
        let phi = chain.push_solution(&c.solution);
        (phi, eq, heat_box(&c, &chain)?)
    } else {
        (c.solution.clone(), Equation::Bond(c.problem()), (c.region.x, c.region.t))
    };
    let grid = Grid::uniform(
        cfg.range("grid.x_min", "grid.x_max", region.0)?,
        cfg.usize_or("grid.nx", 41)?,
        cfg.range("grid.t_min", "grid.t_max", region.1)?,
        cfg.usize_or("grid.nt", 41)?,
    )?;
    let tol = cfg.f64_or("flow.tol", 1e-4)?;
    let r = solution_to_solution_check(&g, &|_| Ok(eq.clone()), &u, &eps, &grid, &opts, tol)?;
    write_reports(cfg, &[r.with_case(c.id.name())])
}

type Box2 = ((f64, f64), (f64, f64));

/// Bounding box of the image of the case's region, shrunk by a tenth.
fn heat_box(c: &ClosedFormCase, chain: &transforms::Transform) -> Result<Box2, CliError> {
    let (mut xs, mut ts) = (Vec::new(), Vec::new());
    for (x, t) in c.region.sample(64, DEFAULT_SEED) {
        let u = c.solution.eval(&Point::new(x, t, 0.0))?;
        let (xb, tb, _) = chain.push_point(x, t, u)?;
        xs.push(xb);
        ts.push(tb);
    }
    let shrink = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.1 * (hi - lo);
        (lo + pad, hi - pad)
    };
    Ok((shrink(&xs), shrink(&ts)))
}

/// Runs one subcommand; `Ok(false)` means a check failed.
pub fn execute(cfg: &RunConfig) -> Result<bool, CliError> {
    match cfg.command.ok_or_else(|| usage("no subcommand"))? {
        Command::Verify => run_verify(cfg),
        Command::Oracle => oracle(cfg),
        Command::Price => price(cfg),
        Command::Transform => transform(cfg),
        Command::Flow => flow(cfg),
        Command::Cases => cases(cfg),
    }
}

/// Parses `argv` (program name first) and runs it: 0 on success, 1 on a
/// failed check or numerical error, 2 on usage errors.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match RunConfig::from_cli(&cli).and_then(|cfg| execute(&cfg)) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("bondsym: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> RunConfig {
        let cli = Cli::try_parse_from(std::iter::once("bondsym").chain(args.iter().copied())).unwrap();
        RunConfig::from_cli(&cli).unwrap()
    }

    #[test]
    fn sections_and_comments() {
        let cfg = RunConfig::parse("# c\ncase = T-GammaHalf\n[grid]\nnx = 5\n; c\n[params]\nsource = u*log(u)\n")
            .unwrap();
        assert_eq!(cfg.get("run.case"), Some("T-GammaHalf"));
        assert_eq!(cfg.get("grid.nx"), Some("5"));
        assert_eq!(cfg.get("params.source"), Some("u*log(u)"));
    }

    #[test]
    fn config_errors_carry_lines() {
        let e = RunConfig::parse("[grid]\nnx 5\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 2, .. }));
        let e = RunConfig::parse("[grid]\nny = 5\n").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn flags_fill_keys() {
        let cfg = cli(&["price", "--grid", "11,21", "--xrange", "0.5,2", "--set", "solver.theta=1"]);
        assert_eq!(cfg.command, Some(Command::Price));
        assert_eq!(cfg.usize_or("grid.nt", 0).unwrap(), 21);
        assert_eq!(cfg.range("grid.x_min", "grid.x_max", (0.0, 0.0)).unwrap(), (0.5, 2.0));
        assert_eq!(cfg.solver(None).unwrap().theta, 1.0);
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let cfg = cli(&["price", "--set", "solver.far=dirichlet"]);
        assert_eq!(cfg.solver(None).unwrap_err().exit_code(), 2);
        let cfg = cli(&["oracle"]);
        assert_eq!(execute(&cfg).unwrap_err().exit_code(), 2);
        let cfg = cli(&["verify", "--suite", "nope"]);
        assert_eq!(execute(&cfg).unwrap_err().exit_code(), 2);
        assert_eq!(run(["bondsym", "frobnicate"]), 2);
    }

    #[test]
    fn expressions_see_parameters() {
        let cfg = cli(&["price", "--set", "params.beta=0.05", "--set", "params.source=beta*u"]);
        let prob = cfg.problem().unwrap();
        assert_eq!(prob.source.eval(&Point::new(1.0, 0.0, 2.0)).unwrap(), 0.1);
    }
}
