//! Command-line front end.

mod verify;

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    bound_report, planar_report, soundness_violations, BoundOptions, FormulaId, NonCentralOptions,
};
use crate::counting::{count_bound_states_1d, count_channel, count_total_2d, Count, Window};
use crate::energy::{eigenvalue, exp_small_scaling, ground_bracket_2d};
use crate::error::Error;
use crate::oracle::{default_lattice, fd_count_2d_lattice};
use crate::potential::{make_catalog, make_planar, CatalogId, Planar, Potential, Space};
use crate::regge::{count_via_trajectories, default_m_grid, intercepts, moment_inequality_check, trace};
use crate::transform;

pub use verify::{reference_catalog, run_suite, Suite, SuiteReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod exit {
    pub const OK: u8 = 0;
    pub const SUITE_FAILURE: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const MARGINAL_STRICT: u8 = 3;
    pub const SOUNDNESS: u8 = 4;
}

#[derive(Debug, Parser)]
#[command(name = "boundcount", version, about = "Bound-state counts, bounds and energy brackets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Exit with status 3 when a count is MARGINAL.
    #[arg(long, global = true)]
    pub strict: bool,
    #[arg(long, default_value_t = 7, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact number of bound states.
    Count {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Angular index; without it 2D radial inputs report the total.
        #[arg(long)]
        m: Option<f64>,
        #[command(flatten)]
        window: WindowArgs,
        /// Lattice points per side for planar inputs.
        #[arg(long, default_value_t = 128)]
        lattice_points: usize,
    },
    /// Every closed-form bound, checked against the exact count.
    Bounds {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Channel index for BARGMANN_CHANNEL.
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// Only this formula id.
        #[arg(long)]
        formula: Option<String>,
        /// Laptev's b.
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Coupling for SEMICLASSICAL.
        #[arg(long, default_value_t = 1.0)]
        coupling: f64,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Eigenvalues and the 2D ground-state bracket.
    Energy {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long)]
        m: Option<f64>,
        /// Node index of the state.
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Also bracket the ground state of coupling·V (2D radial only).
        #[arg(long)]
        bracket: Option<f64>,
        /// Fit ln κ² against −c/g over these couplings.
        #[arg(long, value_delimiter = ',')]
        scaling: Vec<f64>,
    },
    /// Regge trajectories and the count built on them.
    Regge {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Only this trajectory.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Cross-module invariant suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Option<Suite>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = GridLevel::Coarse)]
        grid: GridLevel,
    },
    /// Apply a change of variables and print the resulting potential file.
    Transform {
        #[command(flatten)]
        potential: PotentialArgs,
        #[arg(long, value_enum)]
        kind: TransformArg,
        /// R for log maps, r_min for iterated_log.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Dimension N for nd_reduction.
        #[arg(long, default_value_t = 3)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        m: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridLevel {
    Coarse,
    Fine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformArg {
    LogMap,
    InverseLogMap,
    IteratedLog,
    NdReduction,
    ChannelReduction,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PotentialArgs {
    /// Catalog family name.
    #[arg(long, conflicts_with = "file")]
    pub catalog: Option<String>,
    /// Potential file (JSON).
    #[arg(long)]
    pub file: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<u32>,
    /// Width of regularized delta functions.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub depth: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Other catalog parameters as key=value.
    #[arg(long = "param", value_parser = parse_kv)]
    pub params: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Copy, Args, Serialize)]
pub struct WindowArgs {
    #[arg(long, default_value_t = crate::counting::DEFAULT_X_MIN)]
    pub x_min: f64,
    #[arg(long, default_value_t = crate::counting::DEFAULT_X_MAX)]
    pub x_max: f64,
}

impl WindowArgs {
    fn window(&self) -> Window {
        Window {
            x_min: self.x_min,
            x_max: self.x_max,
        }
    }
}

fn parse_kv(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v: f64 = v.trim().parse().map_err(|_| format!("'{v}' is not a number"))?;
    Ok((k.trim().to_string(), v))
}

/// A failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::Format(_) | Error::Parameter(_) | Error::InvalidPotential(_) => exit::PARSE,
            _ => exit::SUITE_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

enum Loaded {
    Radial(Potential),
    Planar(Planar),
}

impl PotentialArgs {
    fn catalog_id(&self) -> CatalogRequest {
        let mut params: BTreeMap<String, f64> = self.params.iter().cloned().collect();
        let named = [
            ("depth", self.depth),
            ("radius", self.radius),
            ("g", self.g),
            ("lambda", self.lambda),
            ("mu", self.mu),
            ("alpha", self.alpha),
            ("epsilon", self.epsilon),
            ("dim", self.dim.map(f64::from)),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                params.insert(k.to_string(), v);
            }
        }
        CatalogRequest {
            name: self.catalog.clone().unwrap_or_default(),
            params,
        }
    }

    fn load(&self) -> CliResult<Loaded> {
        if let Some(path) = &self.file {
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: exit::PARSE,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            let mut v = Potential::from_json(&text)?;
            if let Some(d) = self.dim {
                match v.space {
                    Space::Line if d != 1 => {
                        return Err(Error::Parameter(format!("a line potential has dim 1, not {d}")).into())
                    }
                    Space::Line => {}
                    Space::Radial => v.dimension = d,
                }
            }
            if let Some(eps) = self.epsilon {
                v.epsilon = Some(eps);
            }
            return Ok(Loaded::Radial(v));
        }
        let Some(_) = &self.catalog else {
            return Err(Error::Parameter("give --catalog or --file".into()).into());
        };
        let c = self.catalog_id();
        let id = CatalogId::from_params(&c.name, &c.params)?;
        match make_catalog(&id) {
            Ok(v) => Ok(Loaded::Radial(v)),
            Err(Error::Unsupported(_)) => Ok(Loaded::Planar(make_planar(&id)?)),
            Err(e) => Err(e.into()),
        }
    }

    fn load_radial(&self) -> CliResult<Potential> {
        match self.load()? {
            Loaded::Radial(v) => Ok(v),
            Loaded::Planar(_) => Err(Error::Unsupported("this command needs a line or radial potential".into()).into()),
        }
    }
}

struct CatalogRequest {
    name: String,
    params: BTreeMap<String, f64>,
}

fn with_meta(command: &str, result: Value, descriptor: &str, extra: Value) -> Value {
    let mut out = match result {
        Value::Object(map) => map,
        other => {
            let mut m = serde_json::Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    out.insert("command".into(), json!(command));
    out.insert("descriptor".into(), json!(descriptor));
    out.insert("version".into(), json!(VERSION));
    if let Value::Object(e) = extra {
        for (k, v) in e {
            out.entry(k).or_insert(v);
        }
    }
    Value::Object(out)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

/// Output text and exit status of one invocation.
pub struct Outcome {
    pub text: String,
    pub code: u8,
}

pub fn execute(cli: &Cli) -> Outcome {
    match dispatch(cli) {
        Ok(o) => o,
        Err(f) => Outcome {
            text: to_pretty(&json!({ "error": f.message, "exit_code": f.code, "version": VERSION })),
            code: f.code,
        },
    }
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn config_echo(cli: &Cli, potential: Option<&PotentialArgs>, window: Option<&WindowArgs>) -> Value {
    json!({
        "config": {
            "format": cli.format,
            "strict": cli.strict,
            "seed": cli.seed,
            "potential": potential.map(to_value),
            "window": window.map(to_value),
        }
    })
}

fn dispatch(cli: &Cli) -> CliResult<Outcome> {
    match &cli.command {
        Command::Count {
            potential,
            m,
            window,
            lattice_points,
        } => cmd_count(cli, potential, *m, window, *lattice_points),
        Command::Bounds {
            potential,
            m,
            formula,
            b,
            coupling,
            window,
        } => cmd_bounds(cli, potential, *m, formula.as_deref(), *b, *coupling, window),
        Command::Energy {
            potential,
            m,
            index,
            bracket,
            scaling,
        } => cmd_energy(cli, potential, *m, *index, *bracket, scaling),
        Command::Regge { potential, index } => cmd_regge(cli, potential, *index),
        Command::Verify { suite, trials, grid } => cmd_verify(cli, *suite, *trials, *grid),
        Command::Transform {
            potential,
            kind,
            scale,
            n,
            m,
        } => cmd_transform(potential, *kind, *scale, *n, *m),
    }
}

fn cmd_count(cli: &Cli, pa: &PotentialArgs, m: Option<f64>, wa: &WindowArgs, lattice: usize) -> CliResult<Outcome> {
    let w = wa.window();
    let echo = config_echo(cli, Some(pa), Some(wa));
    match pa.load()? {
        Loaded::Planar(p) => {
            let fd = fd_count_2d_lattice(&p, &default_lattice(&p, lattice))?;
            let value = json!({
                "count": fd.value()?,
                "classifier": "LATTICE",
                "lattice": { "points": lattice, "refined_count": fd.refined },
                "epsilon": pa.epsilon,
            });
            Ok(emit_json(with_meta("count", value, &format!("{p:?}"), echo), exit::OK))
        }
        Loaded::Radial(v) => {
            let res = match (v.space, m) {
                (Space::Line, _) => count_bound_states_1d(&v, w)?,
                (Space::Radial, Some(m)) => count_channel(&v, m, w)?,
                (Space::Radial, None) if v.dimension == 2 => count_total_2d(&v, w)?,
                (Space::Radial, None) => count_channel(&v, 0.0, w)?,
            };
            let code = if cli.strict && matches!(res.count, Count::Marginal { .. }) {
                exit::MARGINAL_STRICT
            } else {
                exit::OK
            };
            if cli.format == Format::Csv {
                let mut text = String::from("m,count,multiplicity\n");
                if res.channels.is_empty() {
                    text.push_str(&format!("{},{},1\n", m.map_or(String::new(), |x| x.to_string()), count_text(&res.count)));
                } else {
                    for c in &res.channels {
                        text.push_str(&format!("{},{},{}\n", c.m, c.count, c.multiplicity));
                    }
                }
                return Ok(Outcome { text, code });
            }
            Ok(emit_json(with_meta("count", to_value(&res), &v.descriptor(), echo), code))
        }
    }
}

fn count_text(c: &Count) -> String {
    match c {
        Count::Finite(n) => n.to_string(),
        Count::Infinite => "infinite".into(),
        Count::Marginal { lower, .. } => format!("marginal>={lower}"),
    }
}

fn emit_json(v: Value, code: u8) -> Outcome {
    Outcome { text: to_pretty(&v), code }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    cli: &Cli,
    pa: &PotentialArgs,
    m: f64,
    formula: Option<&str>,
    b: f64,
    coupling: f64,
    wa: &WindowArgs,
) -> CliResult<Outcome> {
    let opts = BoundOptions { m, g: coupling, b };
    let only = formula.map(str::parse::<FormulaId>).transpose()?;
    let echo = config_echo(cli, Some(pa), Some(wa));
    let (mut report, violations) = match pa.load()? {
        Loaded::Radial(v) => {
            let report = bound_report(&v, &opts);
            let violations = soundness_violations(&v, &report, wa.window())?;
            (report, violations)
        }
        Loaded::Planar(p) => (planar_report(&p, &opts, &NonCentralOptions::default()), Vec::new()),
    };
    if let Some(id) = only {
        report.entries.retain(|k, _| *k == id);
    }
    let code = if violations.is_empty() { exit::OK } else { exit::SOUNDNESS };
    if cli.format == Format::Csv {
        return Ok(Outcome {
            text: report.to_csv(),
            code,
        });
    }
    let mut value = to_value(&report);
    if let Value::Object(map) = &mut value {
        map.insert("violations".into(), to_value(&violations));
    }
    let descriptor = report.descriptor.clone();
    Ok(emit_json(with_meta("bounds", value, &descriptor, echo), code))
}

fn cmd_energy(
    cli: &Cli,
    pa: &PotentialArgs,
    m: Option<f64>,
    index: usize,
    bracket: Option<f64>,
    scaling: &[f64],
) -> CliResult<Outcome> {
    let v = pa.load_radial()?;
    let m = if v.space == Space::Line { None } else { Some(m.unwrap_or(0.0)) };
    let e = eigenvalue(&v, m, index)?;
    let mut value = json!({
        "eigenvalue": e,
        "kappa2": e.kappa2(),
        "m": m,
    });
    if let Some(g) = bracket {
        value["bracket"] = to_value(&ground_bracket_2d(&v, g)?);
    }
    if !scaling.is_empty() {
        value["scaling"] = to_value(&exp_small_scaling(&v, scaling)?);
    }
    if cli.format == Format::Csv {
        return Ok(Outcome {
            text: format!("index,m,energy,ln_kappa\n{},{},{},{}\n", index, m.unwrap_or(0.0), e.energy, e.ln_kappa),
            code: exit::OK,
        });
    }
    let echo = config_echo(cli, Some(pa), None);
    Ok(emit_json(with_meta("energy", value, &v.descriptor(), echo), exit::OK))
}

fn cmd_regge(cli: &Cli, pa: &PotentialArgs, index: Option<usize>) -> CliResult<Outcome> {
    let v = pa.load_radial()?;
    let ms = intercepts(&v)?;
    let grid = if ms.is_empty() { Vec::new() } else { default_m_grid(&v)? };
    let which: Vec<usize> = match index {
        Some(i) => vec![i],
        None => (0..ms.len()).collect(),
    };
    let trajectories = which
        .into_iter()
        .map(|i| trace(&v, i, &grid))
        .collect::<crate::error::Result<Vec<_>>>()?;
    if cli.format == Format::Csv {
        let mut text = String::from("i,m,E\n");
        for t in &trajectories {
            text.push_str(t.to_csv().split_once('\n').map_or("", |x| x.1));
        }
        return Ok(Outcome { text, code: exit::OK });
    }
    let value = json!({
        "trajectories": trajectories,
        "count": count_via_trajectories(&v)?,
        "moments": moment_inequality_check(&v)?,
    });
    let echo = config_echo(cli, Some(pa), None);
    Ok(emit_json(with_meta("regge", value, &v.descriptor(), echo), exit::OK))
}

fn cmd_verify(cli: &Cli, suite: Option<Suite>, trials: usize, grid: GridLevel) -> CliResult<Outcome> {
    let suites: Vec<Suite> = match suite {
        Some(s) => vec![s],
        None => Suite::ALL.to_vec(),
    };
    let reports: Vec<SuiteReport> = suites.iter().map(|s| run_suite(*s, trials, cli.seed, grid)).collect();
    let ok = reports.iter().all(|r| r.passed);
    let code = if ok { exit::OK } else { exit::SUITE_FAILURE };
    if cli.format == Format::Csv {
        let mut text = String::from("suite,passed,checks,failures\n");
        for r in &reports {
            text.push_str(&format!("{},{},{},{}\n", r.suite, r.passed, r.checks, r.failures.len()));
        }
        return Ok(Outcome { text, code });
    }
    let value = json!({
        "passed": ok,
        "suites": reports,
        "trials": trials,
        "grid": grid,
    });
    Ok(emit_json(with_meta("verify", value, "suites", config_echo(cli, None, None)), code))
}

fn cmd_transform(pa: &PotentialArgs, kind: TransformArg, scale: f64, n: u32, m: f64) -> CliResult<Outcome> {
    let v = pa.load_radial()?;
    let out = match kind {
        TransformArg::LogMap => transform::log_map(&v, scale)?,
        TransformArg::InverseLogMap => transform::inverse_log_map(&v, scale)?,
        TransformArg::IteratedLog => transform::iterated_log(&v, scale)?,
        TransformArg::NdReduction => transform::nd_reduction(&v, n)?,
        TransformArg::ChannelReduction => transform::channel_reduction(&v, v.dimension, m)?,
    };
    let mut text = out.to_json();
    text.push('\n');
    Ok(Outcome { text, code: exit::OK })
}

/// Parse arguments, run, write the report, and return the exit status.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::PARSE } else { exit::OK };
        }
    };
    let outcome = execute(&cli);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| e.to_string()),
        None => std::io::stdout().write_all(outcome.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("cannot write report: {e}");
        return exit::SUITE_FAILURE;
    }
    outcome.code
}
