//! Runs a validated [`ExperimentConfig`] and writes its artifacts.
//!
//! Each command writes `<command>.csv` and `<command>.json` into the output
//! directory. CSV floats use 17 significant digits; JSON summaries keep the
//! field order of their structs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Problem, Protocol, QubitPolicy, SweepAxis, TimeSetting};
use crate::error::{Error, Result};
use crate::grover::{
    avoided_crossing, default_two_measurement_time, two_measurement_at, SymmetricSubspace,
};
use crate::hamiltonians::{build_problem_hamiltonian_with_cap, build_transverse_beginning_with_cap, HermitianOperator};
use crate::pointer::PointerConfig;
use crate::spectral::{path_profile, SpectralProfile};
use crate::zeno::{pointer_qubits_required, run_path, RunRecord, RunSummary, Schedule};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "ZENOSIM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Files written by one experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifacts {
    pub csv: PathBuf,
    pub json: PathBuf,
}

/// Exit status for a finished experiment.
pub fn exit_code<T>(result: &Result<T>) -> i32 {
    match result {
        Ok(_) => EXIT_OK,
        Err(e) if e.is_config() => EXIT_CONFIG,
        Err(_) => EXIT_NUMERICAL,
    }
}

/// Summary row of the `grover` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroverSummary {
    pub n: usize,
    pub w: Option<usize>,
    pub protocol: String,
    pub s_star: f64,
    pub gap: f64,
    pub s_star_asymptotic: f64,
    pub gap_asymptotic: f64,
    /// Interaction time of the crossing measurement (two-measurement only).
    pub t: Option<f64>,
    /// Number of measurements (schedule only).
    #[serde(rename = "M")]
    pub measurements: Option<usize>,
    pub prob: f64,
    /// `½ sin²(g t / 4)` for two-measurement, `exp(−Γ²/(M g²))` for schedule.
    pub predicted_prob: f64,
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    #[serde(flatten)]
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub axis: String,
    pub rows: Vec<SweepRow>,
}

/// Anything the CLI can write.
#[derive(Debug, Clone)]
pub enum Output {
    Spectrum(SpectralProfile),
    Zeno(RunRecord),
    Grover(GroverSummary),
    Sweep(SweepSummary),
}

impl Output {
    fn stem(&self) -> &'static str {
        match self {
            Output::Spectrum(_) => "spectrum",
            Output::Zeno(_) => "zeno",
            Output::Grover(_) => "grover",
            Output::Sweep(_) => "sweep",
        }
    }

    pub fn csv(&self) -> String {
        match self {
            Output::Spectrum(p) => spectrum_csv(p),
            Output::Zeno(r) => zeno_csv(r),
            Output::Grover(g) => grover_csv(g),
            Output::Sweep(s) => sweep_csv(s),
        }
    }

    pub fn json(&self) -> Result<String> {
        let text = match self {
            Output::Spectrum(p) => serde_json::to_string_pretty(&p.summary()),
            Output::Zeno(r) => serde_json::to_string_pretty(&r.summary()),
            Output::Grover(g) => serde_json::to_string_pretty(g),
            Output::Sweep(s) => serde_json::to_string_pretty(s),
        }
        .map_err(|e| Error::numerical(format!("json encoding: {e}")))?;
        Ok(text + "\n")
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn spectrum_csv(p: &SpectralProfile) -> String {
    let mut out = String::from("s,E0,E1,gap,gamma\n");
    for k in 0..p.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_float(p.grid[k]),
            fmt_float(p.ground_energies[k]),
            fmt_float(p.first_excited_energies[k]),
            fmt_float(p.gaps[k]),
            fmt_float(p.gammas[k]),
        );
    }
    out
}

fn zeno_csv(r: &RunRecord) -> String {
    let mut out = String::from("j,s,mu,coherence,kappa01\n");
    for step in &r.steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            step.j,
            fmt_float(step.s),
            fmt_float(step.mu),
            fmt_float(step.coherence),
            fmt_float(step.kappa01),
        );
    }
    out
}

fn grover_csv(g: &GroverSummary) -> String {
    format!(
        "n,s_star,gap,prob,predicted_prob\n{},{},{},{},{}\n",
        g.n,
        fmt_float(g.s_star),
        fmt_float(g.gap),
        fmt_float(g.prob),
        fmt_float(g.predicted_prob),
    )
}

fn sweep_csv(s: &SweepSummary) -> String {
    let mut out = format!("{},success,k_tilde,bound_exact,bound_exp,g_min,gamma_max\n", s.axis);
    for row in &s.rows {
        let value = if s.axis == "t" {
            fmt_float(row.value)
        } else {
            format!("{}", row.value as u64)
        };
        let m = &row.summary;
        let _ = writeln!(
            out,
            "{value},{},{},{},{},{},{}",
            fmt_float(m.success),
            fmt_float(m.k_tilde),
            opt_float(m.bound_exact),
            fmt_float(m.bound_exp),
            fmt_float(m.g_min),
            fmt_float(m.gamma_max),
        );
    }
    out
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn emit_results(output: &Output, dir: &Path) -> Result<Artifacts> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    let csv = dir.join(format!("{}.csv", output.stem()));
    let json = dir.join(format!("{}.json", output.stem()));
    fs::write(&csv, output.csv()).map_err(io(&csv))?;
    fs::write(&json, output.json()?).map_err(io(&json))?;
    Ok(Artifacts { csv, json })
}

/// Worker count from [`THREADS_ENV`], if set.
pub fn configured_threads() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Computes the experiment's results without writing anything.
pub fn compute(cfg: &ExperimentConfig) -> Result<Output> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::numerical(format!("worker pool: {e}")))?;
    pool.install(|| dispatch(cfg))
}

/// Runs the experiment and writes its artifacts to `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let output = compute(cfg)?;
    emit_results(&output, &cfg.out)
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Output> {
    use crate::config::Command;
    match cfg.command {
        Command::Spectrum => {
            let (hb, hp) = full_space_path(&cfg.problem, cfg.max_qubits)?;
            Ok(Output::Spectrum(path_profile(&hb, &hp, cfg.grid_points, cfg.refine)?))
        }
        Command::Zeno => {
            let (hb, hp) = full_space_path(&cfg.problem, cfg.max_qubits)?;
            let profile = path_profile(&hb, &hp, cfg.grid_points, cfg.refine)?;
            Ok(Output::Zeno(zeno_run(cfg, &hb, &hp, &profile)?))
        }
        Command::Grover => Ok(Output::Grover(grover(cfg)?)),
        Command::Sweep => Ok(Output::Sweep(sweep(cfg)?)),
    }
}

fn full_space_path(problem: &Problem, max_qubits: usize) -> Result<(HermitianOperator, HermitianOperator)> {
    let cost = problem.cost();
    Ok((
        build_transverse_beginning_with_cap(cost.n(), max_qubits)?,
        build_problem_hamiltonian_with_cap(&cost, max_qubits)?,
    ))
}

fn zeno_run(
    cfg: &ExperimentConfig,
    hb: &HermitianOperator,
    hp: &HermitianOperator,
    profile: &SpectralProfile,
) -> Result<RunRecord> {
    let schedule = Schedule::uniform(cfg.measurements, cfg.mode, cfg.t.policy())?;
    let r = match cfg.r {
        QubitPolicy::Fixed(r) => r,
        QubitPolicy::Auto => pointer_qubits_required(profile.spectral_range, profile.g_min)?,
    };
    let pointer = PointerConfig::new(r, cfg.t.fixed().unwrap_or(0.0))?;
    run_path(hb, hp, &schedule, &pointer, cfg.seed, profile)
}

fn grover(cfg: &ExperimentConfig) -> Result<GroverSummary> {
    let Problem::Grover { n, w } = cfg.problem else {
        return Err(Error::InvalidInput("grover command needs a grover instance".into()));
    };
    match cfg.protocol {
        Protocol::TwoMeasurement => {
            let crossing = avoided_crossing(n)?;
            let t = match cfg.t {
                TimeSetting::Fixed(t) => t,
                _ => default_two_measurement_time(&crossing),
            };
            let out = two_measurement_at(n, t, &crossing)?;
            Ok(GroverSummary {
                n,
                w,
                protocol: "two-measurement".into(),
                s_star: crossing.s_star,
                gap: crossing.gap,
                s_star_asymptotic: crossing.s_star_asymptotic,
                gap_asymptotic: crossing.gap_asymptotic,
                t: Some(t),
                measurements: None,
                prob: out.probability,
                predicted_prob: out.predicted,
            })
        }
        Protocol::Schedule => {
            // Without a specific winner the symmetric subspace is exact.
            let (hb, hp) = match w {
                None => {
                    let sub = SymmetricSubspace::new(n)?;
                    (sub.beginning(), sub.problem())
                }
                Some(_) => full_space_path(&cfg.problem, cfg.max_qubits)?,
            };
            let profile = path_profile(&hb, &hp, cfg.grid_points, cfg.refine)?;
            let record = zeno_run(cfg, &hb, &hp, &profile)?;
            Ok(GroverSummary {
                n,
                w,
                protocol: "schedule".into(),
                s_star: profile.s_min,
                gap: profile.g_min,
                s_star_asymptotic: 1.0 - 2.0 / n as f64,
                gap_asymptotic: 2f64.powf(1.0 - n as f64 / 2.0),
                t: None,
                measurements: Some(cfg.measurements),
                prob: record.success_probability,
                predicted_prob: record.bound_exp,
            })
        }
    }
}

fn sweep(cfg: &ExperimentConfig) -> Result<SweepSummary> {
    let plan = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("sweep command needs a sweep".into()))?;

    // Axes other than n share one path and one profile.
    let shared = if plan.axis == SweepAxis::N || plan.values.is_empty() {
        None
    } else {
        let (hb, hp) = full_space_path(&cfg.problem, cfg.max_qubits)?;
        let profile = path_profile(&hb, &hp, cfg.grid_points, cfg.refine)?;
        Some((hb, hp, profile))
    };

    let rows = plan
        .values
        .par_iter()
        .map(|&value| {
            let mut point = cfg.clone();
            match plan.axis {
                SweepAxis::M => point.measurements = value as usize,
                SweepAxis::T => point.t = TimeSetting::Fixed(value),
                SweepAxis::R => point.r = QubitPolicy::Fixed(value as u32),
                SweepAxis::N => {
                    point.problem = cfg
                        .problem
                        .with_qubits(value as usize)
                        .ok_or_else(|| Error::InvalidInput("an n sweep needs a grover instance".into()))?;
                }
            }
            let record = match &shared {
                Some((hb, hp, profile)) => zeno_run(&point, hb, hp, profile)?,
                None => {
                    let (hb, hp) = full_space_path(&point.problem, point.max_qubits)?;
                    let profile = path_profile(&hb, &hp, point.grid_points, point.refine)?;
                    zeno_run(&point, &hb, &hp, &profile)?
                }
            };
            Ok(SweepRow {
                value,
                summary: record.summary(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepSummary {
        axis: plan.axis.name().into(),
        rows,
    })
}
