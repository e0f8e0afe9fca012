//! Command-line front end.

pub mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bethe::{self, BetheSolution, GapRow, Regularity, SolveOptions};
use crate::eigen::{EigenMode, EigenfunctionEval};
use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::root_system::{CartanKind, Multiplicity, RootSystem};
use crate::suite::{run_suite, SuiteOptions, SuiteReport};
use crate::weyl::WeylGroup;

pub use config::{grid_points, parse_grid, JobConfig};

/// Exit status for a valid but Pauli-excluded spectral point.
pub const EXIT_EXCLUDED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rootgas", version, about = "Bethe ansatz solver for delta-interaction gases on root systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Bethe ansatz equations and print the certified spectral point.
    Solve(Common),
    /// Evaluate the eigenfunction on a grid and write CSV.
    Eval(Common),
    /// Run the verification suite and print a JSON report.
    Verify(Common),
    /// Solve over a list of multiplicities and weights and write CSV.
    Sweep(Common),
    /// Print the root system data as JSON.
    Info(Common),
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON job configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Solver gradient tolerance (relative to max(1, ‖2πμ‖)).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Seed for all sampled checks.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Evaluation grid, `lo:hi:n` per axis separated by commas.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

struct Output {
    text: String,
    code: u8,
}

pub fn run(cli: &Cli) -> Result<u8> {
    let common = match &cli.command {
        Command::Solve(c) | Command::Eval(c) | Command::Verify(c) | Command::Sweep(c) | Command::Info(c) => c,
    };
    let mut cfg = match &common.config {
        Some(p) => JobConfig::load(p)?,
        None => JobConfig::default(),
    };
    apply_flags(&mut cfg, common);
    let out = match &cli.command {
        Command::Solve(_) => cmd_solve(&cfg)?,
        Command::Eval(_) => cmd_eval(&cfg)?,
        Command::Verify(_) => cmd_verify(&cfg)?,
        Command::Sweep(_) => cmd_sweep(&cfg)?,
        Command::Info(_) => cmd_info(&cfg)?,
    };
    match &common.out {
        _ if out.text.is_empty() => {}
        Some(p) => std::fs::write(p, &out.text)?,
        None => std::io::stdout().write_all(out.text.as_bytes())?,
    }
    Ok(out.code)
}

fn apply_flags(cfg: &mut JobConfig, c: &Common) {
    let tol = cfg.tolerance.get_or_insert_with(Default::default);
    if c.tol.is_some() {
        tol.solver = c.tol;
    }
    if c.max_iter.is_some() {
        tol.max_iter = c.max_iter;
    }
    if c.seed.is_some() {
        cfg.seed = c.seed;
    }
    if c.grid.is_some() {
        cfg.grid = c.grid.clone();
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn complex(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

#[derive(Debug, Serialize)]
struct MuHat {
    coordinates: Vec<f64>,
    pairings: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct PauliOut {
    min_eig_k: f64,
    excluded: bool,
    regularity: Regularity,
    margin: f64,
    hessian_deviation: f64,
    k_matrix: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Debug, Serialize)]
struct SolveOut {
    system: String,
    multiplicity: Multiplicity,
    weight: Vec<i64>,
    mu: Vec<f64>,
    mu_hat: MuHat,
    energy: f64,
    grad_norm: f64,
    iterations: usize,
    min_hessian_eigenvalue: f64,
    bae_residual: f64,
    regular: bool,
    gap_bounds_hold: bool,
    gap_bounds: Vec<GapRow>,
    pauli: PauliOut,
}

impl SolveOut {
    fn new(k: Multiplicity, s: BetheSolution) -> Self {
        Self {
            system: s.system,
            multiplicity: k,
            weight: s.weight,
            mu: s.mu,
            mu_hat: MuHat {
                coordinates: s.mu_hat,
                pairings: s.mu_hat_pairings,
            },
            energy: s.energy,
            grad_norm: s.grad_norm,
            iterations: s.iterations,
            min_hessian_eigenvalue: s.min_hessian_eigenvalue,
            bae_residual: s.bae_residual,
            regular: s.regular,
            gap_bounds_hold: s.gap.holds,
            gap_bounds: s.gap.rows,
            pauli: PauliOut {
                min_eig_k: s.pauli.min_eigenvalue,
                excluded: s.pauli.excluded,
                regularity: s.pauli.regularity,
                margin: s.pauli.margin,
                hessian_deviation: s.pauli.hessian_deviation,
                k_matrix: s.pauli.k_matrix,
                reason: s.pauli.reason,
            },
        }
    }
}

struct Job {
    rs: RootSystem,
    wg: WeylGroup,
    k: Multiplicity,
    weight: Vec<i64>,
    opts: SolveOptions,
}

fn job(cfg: &JobConfig) -> Result<Job> {
    let rs = cfg.root_system()?;
    let wg = WeylGroup::new(&rs)?;
    let k = cfg.multiplicity(&rs, false)?;
    let weight = cfg.weight(&rs)?;
    Ok(Job {
        opts: cfg.solve_options(),
        rs,
        wg,
        k,
        weight,
    })
}

fn cmd_solve(cfg: &JobConfig) -> Result<Output> {
    let j = job(cfg)?;
    let sol = bethe::solve(&j.rs, &j.wg, &j.k, &j.weight, &j.opts)?;
    let code = if sol.pauli.excluded { EXIT_EXCLUDED } else { 0 };
    if let Some(r) = &sol.pauli.reason {
        eprintln!("{r}");
    }
    Ok(Output {
        text: json(&SolveOut::new(j.k, sol))?,
        code,
    })
}

fn cmd_eval(cfg: &JobConfig) -> Result<Output> {
    let rs = cfg.root_system()?;
    let wg = WeylGroup::new(&rs)?;
    let weight = cfg.weight(&rs)?;
    let mode = cfg.mode.unwrap_or(EigenMode::BetheK);
    let eig = match mode {
        EigenMode::BetheK => {
            let k = cfg.multiplicity(&rs, false)?;
            let sol = bethe::solve(&rs, &wg, &k, &weight, &cfg.solve_options())?;
            if sol.pauli.excluded {
                eprintln!("{}", sol.pauli.reason.clone().unwrap_or_default());
                return Ok(Output {
                    text: String::new(),
                    code: EXIT_EXCLUDED,
                });
            }
            EigenfunctionEval::from_solution(&rs, &wg, &k, &sol)?
        }
        EigenMode::Impenetrable => EigenfunctionEval::impenetrable(&rs, &wg, &weight)?,
        EigenMode::Free => EigenfunctionEval::free(&rs, &wg, &weight)?,
    };
    let spec = cfg
        .grid
        .as_deref()
        .ok_or_else(|| Error::Config("eval needs a grid (`grid` or --grid)".into()))?;
    let axes = parse_grid(spec)?;
    if axes.len() != rs.rank {
        return Err(Error::Config(format!("grid has {} axes, rank is {}", axes.len(), rs.rank)));
    }
    let points = grid_points(&axes);
    let values: Vec<Complex64> = points.par_iter().map(|v| eig.eval(&rs, v)).collect::<Result<_>>()?;

    let mut s = String::new();
    writeln!(s, "# system: {}", rs.name()).unwrap();
    writeln!(s, "# mode: {}", serde_json::to_value(mode)?.as_str().unwrap_or_default()).unwrap();
    writeln!(s, "# k: long={} short={}", num(eig.k.long), num(eig.k.short)).unwrap();
    writeln!(s, "# weight: {:?}", weight).unwrap();
    let lam: Vec<String> = eig.lambda.iter().map(|z| complex(*z)).collect();
    writeln!(s, "# lambda: {}", lam.join(" ")).unwrap();
    writeln!(s, "# energy: {}", num(eig.energy())).unwrap();
    let mut header: Vec<String> = (1..=rs.rank).map(|i| format!("x{i}")).collect();
    header.push("re_phi".into());
    header.push("im_phi".into());
    writeln!(s, "{}", header.join(",")).unwrap();
    for (v, z) in points.iter().zip(&values) {
        let mut row: Vec<String> = v.iter().map(|x| num(*x)).collect();
        row.push(num(z.re));
        row.push(num(z.im));
        writeln!(s, "{}", row.join(",")).unwrap();
    }
    Ok(Output { text: s, code: 0 })
}

#[derive(Debug, Serialize)]
struct VerifyOut {
    all_pass: bool,
    suites: Vec<SuiteReport>,
}

fn suite_options(cfg: &JobConfig) -> SuiteOptions {
    let mut o = cfg.verify.clone().unwrap_or_default();
    if let Some(seed) = cfg.seed {
        o.seed = seed;
    }
    o.solve = cfg.solve_options();
    o
}

/// Default suite when the config names no system.
fn default_jobs() -> Vec<(CartanKind, usize, Multiplicity, Vec<i64>)> {
    vec![
        (CartanKind::A, 2, Multiplicity::constant(1.0), vec![1, 1]),
        (CartanKind::B, 2, Multiplicity::new(1.0, 0.7), vec![1, 1]),
    ]
}

fn cmd_verify(cfg: &JobConfig) -> Result<Output> {
    let opts = suite_options(cfg);
    let jobs = match &cfg.system {
        None => default_jobs(),
        Some(_) => {
            let rs = cfg.root_system()?;
            let k = cfg.multiplicity(&rs, true)?;
            let w = cfg.weight(&rs)?;
            vec![(rs.kind, rs.rank, k, w)]
        }
    };
    let mut suites = Vec::new();
    for (kind, rank, k, w) in jobs {
        let rs = Arc::new(RootSystem::new(kind, rank)?);
        let wg = WeylGroup::new(&rs)?;
        suites.push(run_suite(&rs, &wg, &k, &w, &opts)?);
    }
    let all_pass = suites.iter().all(|s| s.all_pass);
    Ok(Output {
        text: json(&VerifyOut { all_pass, suites })?,
        code: if all_pass { 0 } else { 1 },
    })
}

struct SweepRow {
    k: Multiplicity,
    weight: Vec<i64>,
    result: Result<BetheSolution>,
}

fn cmd_sweep(cfg: &JobConfig) -> Result<Output> {
    let rs = cfg.root_system()?;
    let wg = WeylGroup::new(&rs)?;
    let sweep = cfg.sweep.clone().unwrap_or_default();
    let ks: Vec<Multiplicity> = match &sweep.k {
        Some(list) => list.iter().map(|k| k.resolve()).collect(),
        None => vec![cfg.multiplicity(&rs, false)?],
    };
    for k in &ks {
        k.require_positive(&rs)?;
    }
    let weights: Vec<Vec<i64>> = match (&sweep.weights, &sweep.weight_box) {
        (Some(_), Some(_)) => return Err(Error::Config("sweep takes `weights` or `box`, not both".into())),
        (Some(w), None) => w.clone(),
        (None, Some(b)) => b.points()?,
        (None, None) => vec![cfg.weight(&rs)?],
    };
    for w in &weights {
        if w.len() != rs.rank {
            return Err(Error::WeightDimension {
                expected: rs.rank,
                got: w.len(),
            });
        }
    }
    let opts = cfg.solve_options();
    let jobs: Vec<(Multiplicity, Vec<i64>)> = ks
        .iter()
        .flat_map(|k| weights.iter().map(move |w| (*k, w.clone())))
        .collect();
    let rows: Vec<SweepRow> = jobs
        .into_par_iter()
        .map(|(k, weight)| SweepRow {
            result: bethe::solve(&rs, &wg, &k, &weight, &opts),
            k,
            weight,
        })
        .collect();

    let mut injective = true;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            if let (Ok(x), Ok(y)) = (&a.result, &b.result) {
                if a.k == b.k && a.weight != b.weight && dist(&x.mu_hat, &y.mu_hat) < 1e-9 {
                    injective = false;
                }
            }
        }
    }
    let n = rs.rank;
    let mut s = String::new();
    writeln!(s, "# system: {}", rs.name()).unwrap();
    writeln!(s, "# rows: {}", rows.len()).unwrap();
    writeln!(s, "# injective: {injective}").unwrap();
    let mut header = vec!["k_long".to_string(), "k_short".to_string()];
    header.extend((1..=n).map(|i| format!("m{i}")));
    header.extend((1..=n).map(|i| format!("pairing{i}")));
    for h in ["energy", "grad_norm", "bae_residual", "regular", "lower_slack", "upper_slack", "status"] {
        header.push(h.into());
    }
    writeln!(s, "{}", header.join(",")).unwrap();
    for row in &rows {
        let mut cells = vec![num(row.k.long), num(row.k.short)];
        cells.extend(row.weight.iter().map(|c| c.to_string()));
        match &row.result {
            Ok(sol) => {
                let lower = sol.gap.rows.iter().map(|r| r.lower_slack).fold(f64::INFINITY, f64::min);
                let upper = sol.gap.rows.iter().map(|r| r.upper_slack).fold(f64::INFINITY, f64::min);
                cells.extend(sol.mu_hat_pairings.iter().map(|x| num(*x)));
                cells.push(num(sol.energy));
                cells.push(num(sol.grad_norm));
                cells.push(num(sol.bae_residual));
                cells.push(sol.regular.to_string());
                cells.push(num(lower));
                cells.push(num(upper));
                cells.push(if sol.pauli.excluded { "excluded" } else { "ok" }.into());
            }
            Err(e) => {
                cells.extend((0..n + 6).map(|_| String::new()));
                cells.push(format!("\"error: {e}\""));
            }
        }
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    Ok(Output { text: s, code: 0 })
}

#[derive(Debug, Serialize)]
struct InfoOut {
    system: String,
    rank: usize,
    weyl_order: u128,
    num_roots: usize,
    num_positive: usize,
    cartan_matrix: Vec<Vec<i64>>,
    positive_roots: Vec<Vec<i64>>,
    roots: Vec<Vec<f64>>,
    coroots: Vec<Vec<f64>>,
    highest_root: Vec<i64>,
    fundamental_weights: Vec<Vec<f64>>,
    rho: Vec<f64>,
    /// `2 Σ_{α∈Σ_0} 1/k_α` when a multiplicity is given.
    #[serde(skip_serializing_if = "Option::is_none")]
    coxeter_k: Option<f64>,
}

fn cmd_info(cfg: &JobConfig) -> Result<Output> {
    let rs = cfg.root_system()?;
    let hk = match &cfg.multiplicity {
        Some(_) => Some(rs.coxeter_k(&cfg.multiplicity(&rs, false)?)),
        None => None,
    };
    let info = InfoOut {
        system: rs.name(),
        rank: rs.rank,
        weyl_order: crate::root_system::weyl_order(rs.kind, rs.rank),
        num_roots: rs.num_roots(),
        num_positive: rs.num_positive,
        cartan_matrix: rs.cartan.clone(),
        positive_roots: rs.positive_roots().map(|a| rs.coefficients[a].clone()).collect(),
        roots: rs.roots.clone(),
        coroots: rs.coroots.clone(),
        highest_root: rs.coefficients[rs.highest_root].clone(),
        fundamental_weights: rs.fundamental_weights.clone(),
        rho: rs.rho.clone(),
        coxeter_k: hk,
    };
    Ok(Output {
        text: json(&info)?,
        code: 0,
    })
}
