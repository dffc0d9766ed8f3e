//! Command-line front end: `run`, `converge` and `validate`.
//!
//! Exit codes: 0 success, 1 numerical failure or violated invariant,
//! 2 usage or configuration error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::diagnostics::{
    bubble_metrics, convergence_slope, discrete_modified_energy, l2_error, l2_error_faces,
    l2_error_mean_free, original_energy, GravityWork,
};
use crate::error::{Error, Result};
use crate::io::{write_snapshot, write_timeseries, Overrides, ResolvedRun, RunConfig, TimeSeriesRecord};
use crate::params::{Order, SchemeConfig};
use crate::scenarios::march;
use crate::scheme::Stepper;
use crate::state::SimState;
use crate::validation;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Time steps of the default convergence sweep.
pub const DEFAULT_SWEEP: [f64; 5] = [5e-3, 2.5e-3, 1.25e-3, 6.25e-4, 3.125e-4];

#[derive(Debug, Parser)]
#[command(name = "chns", version, about = "Two-phase Cahn-Hilliard-Navier-Stokes solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its time series and final snapshot.
    Run(RunArgs),
    /// Sweep the time step against a fine-step reference and report slopes.
    Converge(ConvergeArgs),
    /// Check discrete invariants on a tiny grid.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML configuration file; flags override its values.
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: Option<u8>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// `NX` or `NXxNY`.
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<[usize; 2]>,
    #[arg(long)]
    pub tend: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Steps between time-series records.
    #[arg(long)]
    pub cadence: Option<usize>,
    #[arg(long)]
    pub tol_ch: Option<f64>,
    #[arg(long)]
    pub tol_mom: Option<f64>,
    #[arg(long)]
    pub tol_poisson: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated time steps.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP.to_vec())]
    pub dts: Vec<f64>,
    /// The reference uses the second-order scheme at `min(dts) / ref_factor`.
    #[arg(long, default_value_t = 20.0)]
    pub ref_factor: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Cells per side of the test grids.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
}

fn parse_grid(s: &str) -> std::result::Result<[usize; 2], String> {
    let parts: Vec<&str> = s.split(['x', 'X']).collect();
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("bad grid size '{t}': {e}"));
    match parts.as_slice() {
        [a] => {
            let v = n(a)?;
            Ok([v, v])
        }
        [a, b] => Ok([n(a)?, n(b)?]),
        _ => Err(format!("grid must be NX or NXxNY, got '{s}'")),
    }
}

impl RunArgs {
    fn overrides(&self) -> Result<Overrides> {
        let order = self
            .order
            .map(Order::try_from)
            .transpose()
            .map_err(Error::Config)?;
        Ok(Overrides {
            dt: self.dt,
            order,
            alpha: self.alpha,
            grid: self.grid,
            t_end: self.tend,
            out: self.out.clone(),
            cadence: self.cadence,
            tol_ch: self.tol_ch,
            tol_momentum: self.tol_mom,
            tol_poisson: self.tol_poisson,
            ..Overrides::default()
        })
    }

    /// Config file (if any) with the flags applied on top.
    pub fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => RunConfig::for_scenario(self.scenario.as_deref().unwrap_or("accuracy_test")),
        };
        if let Some(s) = &self.scenario {
            cfg.scenario = s.clone();
        }
        cfg.overrides = cfg.overrides.merged(&self.overrides()?);
        Ok(cfg)
    }
}

/// Exit code for an error: configuration and usage problems are 2,
/// everything that happens while integrating is 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::UnknownScenario { .. }
        | Error::InvalidParams(_)
        | Error::InvalidGrid(_)
        | Error::Io { .. } => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Run(a) => a.config().and_then(|c| c.resolve()).and_then(|r| cmd_run(&r).map(|_| EXIT_OK)),
        Command::Converge(a) => cmd_converge(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Final state and the records written by [`cmd_run`].
pub struct RunOutcome {
    pub state: SimState,
    pub records: Vec<TimeSeriesRecord>,
}

/// Integrates one resolved configuration, recording every `cadence` steps
/// and at the final step.
pub fn integrate(run: &ResolvedRun) -> Result<RunOutcome> {
    let sc = &run.scenario;
    let state = sc.initial_state()?;
    let stepper = Stepper::new(&state.grid, sc.params.clone(), run.scheme.clone())?;
    let n_steps = sc.n_steps();
    let mut work = GravityWork::new(&state, &sc.params)?;
    let mut records = Vec::new();
    let start = Instant::now();
    let final_state = march(&stepper, state, n_steps, |s, stats| {
        if stats.is_some() {
            work.record(s, &sc.params, run.scheme.dt)?;
        }
        if s.step_index % sc.cadence == 0 || s.step_index == n_steps {
            let e = discrete_modified_energy(s, &sc.params, &run.scheme)?;
            let b = bubble_metrics(s)?;
            records.push(TimeSeriesRecord {
                step: s.step_index,
                time: s.time,
                original_energy: original_energy(s, &sc.params, work.work)?,
                modified_energy: e.modified,
                volume: b.volume,
                sav: s.sav.current.as_array(),
                y_c: b.y_c,
                v_c: b.v_c,
                iters_ch: stats.map_or(0, |t| t.ch.iterations),
                iters_momentum: stats.map_or(0, |t| t.momentum.iterations),
                iters_poisson: stats.map_or(0, |t| t.poisson.iterations),
                wall_time: start.elapsed().as_secs_f64(),
            });
        }
        Ok(())
    })?;
    Ok(RunOutcome {
        state: final_state,
        records,
    })
}

pub fn cmd_run(run: &ResolvedRun) -> Result<RunOutcome> {
    create_dir(&run.out)?;
    let outcome = integrate(run)?;
    write_timeseries(&run.out.join("timeseries.csv"), &outcome.records)?;
    write_snapshot(&run.out.join("final.snap"), &outcome.state)?;
    let last = outcome.records.last().expect("at least the initial record");
    println!(
        "{}: {} steps to t = {:.6}, original energy {:.10e}, SAVs {:?}, output in {}",
        run.scenario.name,
        outcome.state.step_index,
        outcome.state.time,
        last.original_energy,
        last.sav,
        run.out.display()
    );
    Ok(outcome)
}

/// Errors of one sweep point against the reference: `phi`, `(u + v) / 2`,
/// mean-free `p` and `|X - 1|` for the five auxiliary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepErrors {
    pub dt: f64,
    pub values: [f64; 8],
}

pub const SWEEP_COLUMNS: [&str; 8] = ["phi", "vel", "p", "r", "Q", "R", "T", "K"];

fn final_state(run: &ResolvedRun, dt: f64, order: Order) -> Result<SimState> {
    let sc = &run.scenario;
    let scheme = SchemeConfig::with_tolerances(order, dt, &sc.params, run.scheme.tol)?;
    let state = sc.initial_state()?;
    let stepper = Stepper::new(&state.grid, sc.params.clone(), scheme)?;
    let n = (sc.t_end / dt).round() as usize;
    if ((n as f64) * dt - sc.t_end).abs() > 1e-9 * sc.t_end {
        return Err(Error::Config(format!("dt {dt} does not divide t_end {}", sc.t_end)));
    }
    march(&stepper, state, n, |_, _| Ok(()))
}

/// Runs the sweep and returns the errors at each time step.
pub fn convergence_sweep(run: &ResolvedRun, dts: &[f64], ref_factor: f64) -> Result<Vec<SweepErrors>> {
    let dt_min = dts.iter().copied().fold(f64::INFINITY, f64::min);
    if !(dt_min > 0.0) || !(ref_factor >= 1.0) {
        return Err(Error::Config("time steps must be positive and ref_factor >= 1".into()));
    }
    let reference = final_state(run, dt_min / ref_factor, Order::Second)?;
    let g = &reference.grid;
    dts.iter()
        .map(|&dt| {
            let s = final_state(run, dt, run.scheme.order)?;
            let (eu, ev) = l2_error_faces(g, &s.vel, &reference.vel)?;
            let x = s.sav.current.as_array();
            Ok(SweepErrors {
                dt,
                values: [
                    l2_error(g, &s.phi, &reference.phi)?,
                    0.5 * (eu + ev),
                    l2_error_mean_free(g, &s.p, &reference.p)?,
                    (x[0] - 1.0).abs(),
                    (x[1] - 1.0).abs(),
                    (x[2] - 1.0).abs(),
                    (x[3] - 1.0).abs(),
                    (x[4] - 1.0).abs(),
                ],
            })
        })
        .collect()
}

/// Least-squares slope of each error column; `None` where an error is zero.
pub fn sweep_slopes(errors: &[SweepErrors]) -> Vec<Option<f64>> {
    let dts: Vec<f64> = errors.iter().map(|e| e.dt).collect();
    (0..SWEEP_COLUMNS.len())
        .map(|k| {
            let col: Vec<f64> = errors.iter().map(|e| e.values[k]).collect();
            convergence_slope(&col, &dts).ok()
        })
        .collect()
}

fn cmd_converge(args: &ConvergeArgs) -> Result<i32> {
    let run = args.run.config()?.resolve()?;
    let errors = convergence_sweep(&run, &args.dts, args.ref_factor)?;
    let slopes = sweep_slopes(&errors);
    let mut text = format!("dt,{}\n", SWEEP_COLUMNS.join(","));
    for e in &errors {
        let vals: Vec<String> = e.values.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&format!("{:.16e},{}\n", e.dt, vals.join(",")));
    }
    let slope_cells: Vec<String> = slopes
        .iter()
        .map(|s| s.map(|v| format!("{v:.16e}")).unwrap_or_default())
        .collect();
    text.push_str(&format!("slope,{}\n", slope_cells.join(",")));
    create_dir(&run.out)?;
    let path = run.out.join("convergence.csv");
    fs::write(&path, &text).map_err(|e| Error::Io {
        path: path.clone(),
        source: e,
    })?;
    print!("{text}");
    Ok(EXIT_OK)
}

fn cmd_validate(args: &ValidateArgs) -> Result<i32> {
    let t0 = Instant::now();
    let checks = validation::run_all(args.grid)?;
    let mut failed = 0;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!(
        "{} of {} checks passed in {:.2} s",
        checks.len() - failed,
        checks.len(),
        t0.elapsed().as_secs_f64()
    );
    Ok(if failed == 0 { EXIT_OK } else { EXIT_NUMERICAL })
}
