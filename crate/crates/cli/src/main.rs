//! `perron-eig`: principal eigenvalue, cyclic order, refinement and eigenspace
//! reports for dense matrices read from Matrix Market or CSV files.

mod json;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use perron_core::eigenspace::compute_basis_with;
use perron_core::{
    combined_method_with, detect_cyclic_order_with, io, oracle_report, run_iteration, CombinedConfig,
    CyclicOrderConfig, DenseMatrix, Error,
};
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA: &str = "perron-eig/1";

#[derive(Parser, Debug)]
#[command(name = "perron-eig", version, about = "Principal eigen-analysis of Perron-like matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rayleigh estimate s_n from the normalized Taylor iteration.
    Estimate(Common),
    /// Detect the cyclic order of the principal eigenvalue by the beta dichotomy.
    CyclicOrder(Common),
    /// Refine s_N by gradient flow (combined method).
    Refine(Common),
    /// Basis of the principal generalized eigenspace.
    Eigenspace(EigenspaceArgs),
    /// Brute-force reference spectrum and eigenspace.
    Oracle(Common),
    /// CSV series for plotting: (t, tau) of the refinement or (k, rayleigh) of the iteration.
    Trace(TraceArgs),
}

#[derive(clap::Args, Debug, Clone, Serialize)]
struct Common {
    /// Matrix file: Matrix Market array or CSV.
    #[arg(long)]
    matrix: PathBuf,
    /// Starting matrix V (default: identity).
    #[arg(long)]
    init: Option<PathBuf>,
    /// Small depth n.
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Large depth N.
    #[arg(long = "N", default_value_t = 100)]
    capital_n: usize,
    /// Gradient-flow speed parameter.
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    /// Taylor parameter of the iteration itself.
    #[arg(long, default_value_t = 1.0)]
    iter_gamma: f64,
    /// Dichotomy threshold.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Comma-separated small depths probed by the dichotomy test.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 5, 6, 7, 8, 9, 10])]
    grid: Vec<usize>,
    /// Comma-separated extra large depths N + offset used for the stability vote.
    #[arg(long, value_delimiter = ',', default_values_t = [0usize, 5, 10])]
    offsets: Vec<usize>,
    /// RK4 step.
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    /// Integration horizon.
    #[arg(long, default_value_t = 100.0)]
    t_end: f64,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
struct EigenspaceArgs {
    #[command(flatten)]
    common: Common,
    /// Use this shift instead of running the combined method.
    #[arg(long)]
    s_bar: Option<f64>,
    /// Cyclic order to use with --s-bar.
    #[arg(long, requires = "s_bar")]
    nu: Option<usize>,
    /// Where to write the basis as Matrix Market (default: --out with .mtx extension).
    #[arg(long)]
    basis_out: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
struct TraceArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Series::Tau)]
    series: Series,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Series {
    Tau,
    Rayleigh,
}

enum Failure {
    Domain(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnsupportedFormat(_) => Failure::Io(e.to_string()),
            other => Failure::Domain(other),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<DenseMatrix, Failure> {
    io::read_matrix(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
        .map_err(|e| match e {
            Error::Parse { line, msg } => Failure::Io(format!("{}:{line}: {msg}", path.display())),
            other => Failure::from(other),
        })
}

fn init_matrix(c: &Common, a: &DenseMatrix) -> Result<DenseMatrix, Failure> {
    match &c.init {
        Some(p) => load(p),
        None => Ok(DenseMatrix::identity(a.rows())),
    }
}

fn cyclic_config(c: &Common) -> CyclicOrderConfig {
    CyclicOrderConfig {
        capital_n: c.capital_n,
        depth_offsets: c.offsets.clone(),
        n_grid: c.grid.clone(),
        epsilon: c.eps,
        gamma: c.iter_gamma,
    }
}

fn combined_config(c: &Common) -> CombinedConfig {
    CombinedConfig {
        capital_n: c.capital_n,
        n: c.n,
        gamma: c.gamma,
        t_end: c.t_end,
        dt: c.dt,
        cyclic: cyclic_config(c),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report(command: &str, inputs: &impl Serialize, result: Value, started: Instant) -> String {
    json::to_string(&json!({
        "schema": SCHEMA,
        "command": command,
        "inputs": inputs,
        "result": result,
        "wall_clock_seconds": started.elapsed().as_secs_f64(),
    }))
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

fn warn_if_unstable(ratio: f64) {
    if ratio > 2.0 {
        eprintln!("warning: flow step looks unstable ((gamma n)^(2(nu-1)) dt |phi''| = {ratio:.3}); try a smaller --gamma");
    }
}

fn run(command: Command) -> Result<(), Failure> {
    let started = Instant::now();
    match command {
        Command::Estimate(c) => {
            let a = load(&c.matrix)?;
            let v = init_matrix(&c, &a)?;
            let est = run_iteration(&a, &v, c.n, c.iter_gamma)?;
            emit(c.out.as_deref(), &report("estimate", &c, to_value(&est), started))
        }
        Command::CyclicOrder(c) => {
            let a = load(&c.matrix)?;
            let r = detect_cyclic_order_with(&a, &cyclic_config(&c))?;
            if r.detected_nu.is_none() {
                eprintln!("note: cyclic order undetermined; raise --N or widen --grid");
            }
            emit(c.out.as_deref(), &report("cyclic-order", &c, to_value(&r), started))
        }
        Command::Refine(c) => {
            let a = load(&c.matrix)?;
            let r = combined_method_with(&a, &combined_config(&c))?;
            warn_if_unstable(r.stability_ratio);
            emit(c.out.as_deref(), &report("refine", &c, to_value(&r), started))
        }
        Command::Eigenspace(e) => {
            let c = &e.common;
            let a = load(&c.matrix)?;
            let v = init_matrix(c, &a)?;
            let (s_bar, nu, refinement) = match (e.s_bar, e.nu) {
                (Some(s), Some(nu)) => (s, nu, Value::Null),
                (Some(s), None) => {
                    let r = detect_cyclic_order_with(&a, &cyclic_config(c))?;
                    (s, r.detected_nu.ok_or(Error::CyclicOrderUnresolved)?, Value::Null)
                }
                _ => {
                    let r = combined_method_with(&a, &combined_config(c))?;
                    warn_if_unstable(r.stability_ratio);
                    (r.s_refined, r.nu, to_value(&r))
                }
            };
            let basis = compute_basis_with(&a, s_bar, nu, nu - 1, c.n, &v, 1.0)?;
            let basis_path = e
                .basis_out
                .clone()
                .or_else(|| c.out.as_ref().map(|p| p.with_extension("mtx")));
            if let Some(p) = &basis_path {
                emit(Some(p), &io::to_matrix_market(&basis.basis()))?;
            }
            let result = json!({
                "refinement": refinement,
                "basis": to_value(&basis),
                "basis_file": basis_path,
            });
            emit(c.out.as_deref(), &report("eigenspace", &e, result, started))
        }
        Command::Oracle(c) => {
            let a = load(&c.matrix)?;
            let r = oracle_report(&a)?;
            emit(c.out.as_deref(), &report("oracle", &c, to_value(&r), started))
        }
        Command::Trace(t) => {
            let c = &t.common;
            let a = load(&c.matrix)?;
            let (header, rows): (&str, Vec<(f64, f64)>) = match t.series {
                Series::Tau => {
                    let r = combined_method_with(&a, &combined_config(c))?;
                    warn_if_unstable(r.stability_ratio);
                    ("t,tau", r.trajectory)
                }
                Series::Rayleigh => {
                    let v = init_matrix(c, &a)?;
                    let est = run_iteration(&a, &v, c.n, c.iter_gamma)?;
                    ("k,rayleigh", est.rayleigh_trace.iter().map(|&(k, r)| (k as f64, r)).collect())
                }
            };
            let text = match c.format {
                Format::Csv => {
                    let mut s = format!("{header}\n");
                    for (x, y) in &rows {
                        if t.series == Series::Rayleigh {
                            s.push_str(&format!("{},{y:.16e}\n", *x as usize));
                        } else {
                            s.push_str(&format!("{x:.16e},{y:.16e}\n"));
                        }
                    }
                    s
                }
                Format::Json => report("trace", &t, json!({ "columns": header.split(',').collect::<Vec<_>>(), "rows": rows }), started),
            };
            emit(c.out.as_deref(), &text)
        }
    }
}
