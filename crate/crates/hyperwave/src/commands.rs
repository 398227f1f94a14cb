//! Subcommand implementations.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use hyperwave_core::boundstate::{hamiltonian_residual, BoundStateWavefunction, ResidualGrid, WavefunctionOptions};
use hyperwave_core::oracle::{cpgamma_verify, transmission_reflection, Grid1D, VerifyOptions};
use hyperwave_core::potential::sample_grid;
use hyperwave_core::spectra::{
    count_bound_states, critical_strengths, energy_spectrum, parameter_spectrum, track_branches, CriticalOptions,
    EnergyOptions, Side, SpectrumOptions,
};
use hyperwave_core::waveop::build_t_gamma;
use hyperwave_core::{Branch, PotentialParams};

use crate::config::{Cli, Command, RunConfig, Strength};
use crate::format::{Cell, Table};

#[derive(Debug)]
pub enum CliError {
    /// Bad input; exit status 2.
    Usage(String),
    /// Numerical failure; exit status 1.
    Numeric(String),
    Io(PathBuf, std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(..) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<hyperwave_core::Error> for CliError {
    fn from(e: hyperwave_core::Error) -> Self {
        if e.is_usage() {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Table(Table),
    Json(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub output: Output,
    /// Metadata written next to the main output.
    pub sidecar: Option<Value>,
    /// `false` when a check ran but did not meet its tolerance.
    pub passed: bool,
}

impl Report {
    fn table(t: Table) -> Self {
        Report {
            output: Output::Table(t),
            sidecar: None,
            passed: true,
        }
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        match &self.output {
            Output::Table(t) => t.render(cfg.format),
            Output::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

fn linspace(range: &[f64], count: usize) -> Result<Vec<f64>> {
    let (a, b) = (range[0], range[1]);
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(usage(format!("--range needs MIN < MAX, got {a} {b}")));
    }
    if count < 2 {
        return Err(usage(format!("--count must be at least 2, got {count}")));
    }
    let last = (count - 1) as f64;
    Ok((0..count).map(|i| (a * (last - i as f64) + b * i as f64) / last).collect())
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.to_owned(), e))
}

/// Runs one subcommand and returns its output without writing anything
/// (except the `--dump-matrix` file).
pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Report> {
    if cfg.truncation < 2 {
        return Err(usage("--N must be at least 2"));
    }
    match command {
        Command::Potential { p, range, count } => {
            let params = PotentialParams::new(p.strength, p.gamma, cfg.lambda_scale)?;
            let mut t = Table::new(&["x", "U"]);
            for (x, u) in sample_grid(&params, range[0], range[1], *count)? {
                t.push(vec![x.into(), u.into()]);
            }
            Ok(Report::table(t))
        }
        Command::Pspec {
            epsilon,
            gamma,
            n,
            branch,
            dump_matrix,
        } => {
            let opts = SpectrumOptions {
                truncation: cfg.truncation,
                per_side: *n,
                branch: (*branch).into(),
                ..SpectrumOptions::default()
            };
            let spec = parameter_spectrum(*epsilon, *gamma, &opts)?;
            if let Some(path) = dump_matrix {
                let m = build_t_gamma(*gamma, (-epsilon).sqrt(), opts.branch, cfg.truncation)?;
                let text = serde_json::to_string(&json!({ "diag": m.diag(), "off": m.off() })).expect("serializable");
                write_file(path, &text)?;
            }
            let mut t = Table::new(&["epsilon", "gamma", "k", "C"]);
            let mut dropped = 0;
            for side in [Side::Positive, Side::Negative] {
                let mut values: Vec<_> = spec.side(side).collect();
                values.sort_by_key(|v| v.k);
                for v in values {
                    if v.converged {
                        t.push(vec![(*epsilon).into(), (*gamma).into(), v.k.into(), v.c.into()]);
                    } else {
                        dropped += 1;
                    }
                }
            }
            if dropped > 0 {
                eprintln!("note: {dropped} value(s) moved by more than the tolerance between N and 2N and were omitted");
            }
            Ok(Report::table(t))
        }
        Command::Critical { gamma, n, branch } => {
            let opts = CriticalOptions {
                n_max: *n,
                truncation: cfg.truncation,
                delta: cfg.delta,
                tol: cfg.tol.unwrap_or(CriticalOptions::default().tol),
                branch: (*branch).into(),
            };
            let set = critical_strengths(*gamma, &opts)?;
            let mut t = Table::new(&["gamma", "side", "n", "C_hat"]);
            for side in [Side::Positive, Side::Negative] {
                for (i, c) in set.side(side).iter().enumerate() {
                    t.push(vec![(*gamma).into(), side.name().into(), i.into(), (*c).into()]);
                }
            }
            Ok(Report::table(t))
        }
        Command::Espec {
            gamma,
            strength,
            map,
            range,
            count,
            n,
            branch,
        } => {
            let branch: Branch = (*branch).into();
            let mut t = Table::new(&["C", "gamma", "n", "epsilon", "mu"]);
            if *map {
                let range = range.as_ref().ok_or_else(|| usage("--map needs --range MIN MAX (energies)"))?;
                let grid = linspace(range, *count)?;
                let opts = SpectrumOptions {
                    truncation: cfg.truncation,
                    per_side: *n,
                    branch,
                    ..SpectrumOptions::default()
                };
                let spectra = grid
                    .par_iter()
                    .map(|&e| parameter_spectrum(e, *gamma, &opts))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                for curve in track_branches(&spectra)? {
                    for &(e, c) in &curve.points {
                        t.push(vec![c.into(), (*gamma).into(), curve.k.into(), e.into(), (-e).sqrt().into()]);
                    }
                }
            } else {
                let c = strength.ok_or_else(|| usage("espec needs --strength (or --map)"))?;
                let opts = EnergyOptions {
                    truncation: cfg.truncation,
                    branch,
                    ..EnergyOptions::default()
                };
                let es = energy_spectrum(c, *gamma, &opts)?;
                for (i, (e, mu)) in es.energies.iter().zip(&es.mu_values).enumerate() {
                    t.push(vec![c.into(), (*gamma).into(), i.into(), (*e).into(), (*mu).into()]);
                }
            }
            Ok(Report::table(t))
        }
        Command::Count { p } => {
            let opts = CriticalOptions {
                truncation: cfg.truncation,
                delta: cfg.delta,
                branch: Branch::Plus,
                ..CriticalOptions::default()
            };
            let k = count_bound_states(p.strength, p.gamma, &opts)?;
            let mut t = Table::new(&["C", "gamma", "count"]);
            t.push(vec![p.strength.into(), p.gamma.into(), k.into()]);
            Ok(Report::table(t))
        }
        Command::Wavefunction { p, state, range, count } => wavefunction(p, *state, range, *count, cfg),
        Command::Scatter { p, range, count } => {
            let params = PotentialParams::dimensionless(p.strength, p.gamma);
            let energies = linspace(range, *count)?;
            let grid = Grid1D::for_potential(&params);
            let chunk = energies.len().div_ceil(rayon::current_num_threads()).max(1);
            let points = energies
                .par_chunks(chunk)
                .map(|c| transmission_reflection(&params, c, &grid))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            let mut t = Table::new(&["epsilon", "R2", "T2"]);
            for s in points.into_iter().flatten() {
                t.push(vec![s.epsilon.into(), s.r2.into(), s.t2.into()]);
            }
            Ok(Report::table(t))
        }
        Command::Verify { p } => {
            let params = PotentialParams::dimensionless(p.strength, p.gamma);
            let opts = VerifyOptions {
                truncation: cfg.truncation,
                oracle_tol: cfg.tol.unwrap_or(VerifyOptions::default().oracle_tol),
                ..VerifyOptions::default()
            };
            let r = cpgamma_verify(&params, &opts)?;
            let finite = |x: f64| if x.is_finite() { json!(x) } else { Value::Null };
            let v = json!({
                "C": r.strength,
                "gamma": r.gamma,
                "energies": r.energies,
                "oracle_energies": r.oracle_energies,
                "max_energy_diff": finite(r.max_energy_diff),
                "max_wavefunction_diff": finite(r.max_wavefunction_diff),
                "max_oracle_diff": finite(r.max_oracle_diff),
                "counts_match": r.counts_match,
                "within_tolerance": r.within_tolerance,
            });
            Ok(Report {
                output: Output::Json(v),
                sidecar: None,
                passed: r.within_tolerance,
            })
        }
    }
}

fn wavefunction(p: &Strength, state: usize, range: &[f64], count: usize, cfg: &RunConfig) -> Result<Report> {
    let params = PotentialParams::new(p.strength, p.gamma, cfg.lambda_scale)?;
    let xs = linspace(range, count)?;
    if p.strength == 0.0 {
        return Err(usage("C = 0 has no bound states"));
    }
    let opts = EnergyOptions {
        truncation: cfg.truncation,
        ..EnergyOptions::default()
    };
    let es = energy_spectrum(p.strength, p.gamma, &opts)?;
    let epsilon = *es.energies.get(state).ok_or_else(|| {
        usage(format!(
            "state {state} does not exist: (C={}, gamma={}) has {} bound state(s)",
            p.strength,
            p.gamma,
            es.len()
        ))
    })?;
    let ws = BoundStateWavefunction::normalized(params, epsilon, &WavefunctionOptions::default())?;
    let psi = xs
        .par_iter()
        .map(|&x| ws.evaluate(x))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let residual = hamiltonian_residual(&ws, &ResidualGrid::for_state(&ws))?;
    let mut t = Table::new(&["x", "psi"]);
    for (x, v) in xs.iter().zip(&psi) {
        t.push(vec![Cell::Num(*x), Cell::Num(*v)]);
    }
    Ok(Report {
        output: Output::Table(t),
        sidecar: Some(json!({
            "state": state,
            "epsilon": epsilon,
            "mu": ws.mu,
            "omega": ws.omega,
            "N_star": ws.n_star(),
            "terms": ws.terms(),
            "residual": residual,
        })),
        passed: true,
    })
}

/// Where the sidecar of `out` goes: `psi.csv` → `psi.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("meta.json")
}

/// Executes the command and writes its output; returns the report.
pub fn run(cli: &Cli) -> Result<Report> {
    let report = execute(&cli.command, &cli.run)?;
    let text = report.render(&cli.run);
    let meta = report
        .sidecar
        .as_ref()
        .map(|v| serde_json::to_string_pretty(v).expect("serializable") + "\n");
    match &cli.run.out {
        Some(path) => {
            write_file(path, &text)?;
            if let Some(m) = &meta {
                write_file(&sidecar_path(path), m)?;
            }
        }
        None => {
            print!("{text}");
            if let Some(m) = &meta {
                eprint!("{m}");
            }
        }
    }
    if !report.passed {
        return Err(CliError::Numeric("verification tolerances not met (see report)".into()));
    }
    Ok(report)
}
