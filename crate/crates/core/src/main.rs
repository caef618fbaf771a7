use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use zenosim::config::parse_config_value;
use zenosim::experiment::{exit_code, run_experiment, EXIT_CONFIG, EXIT_OK};
use zenosim::Error;

/// Measurement-driven ground-state search simulator.
#[derive(Debug, Parser)]
#[command(name = "zenosim", version)]
struct Cli {
    /// Directory for CSV/JSON artifacts (overrides "out" in a config file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Full-space qubit cap.
    #[arg(long, global = true)]
    max_qubits: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gap and fluctuation profile along the interpolation path.
    Spectrum {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Number of grid points in s.
        #[arg(long)]
        grid: Option<u64>,
        /// Golden-section refinement of the gap minimum.
        #[arg(long)]
        refine: Option<bool>,
    },
    /// Repeated-measurement run along the path.
    Zeno {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Search-specific analysis: the two-measurement protocol or a schedule.
    Grover {
        #[arg(long)]
        n: u64,
        /// Winner; omit to analyse the symmetric subspace.
        #[arg(long)]
        w: Option<u64>,
        /// schedule | two-measurement
        #[arg(long)]
        protocol: Option<String>,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Parameter sweep described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Any experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ProblemArgs {
    /// Cost-function JSON: {"n", "values"} or {"grover": {"n", "w"}}.
    #[arg(long)]
    problem: PathBuf,
}

#[derive(Debug, Args)]
struct ScheduleArgs {
    /// Number of measurements.
    #[arg(long = "M")]
    measurements: Option<u64>,
    /// projective | pointer
    #[arg(long)]
    mode: Option<String>,
    /// Pointer qubits: an integer or "auto".
    #[arg(long)]
    r: Option<String>,
    /// Interaction time: a number, "auto", "adaptive" or "random".
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Numbers stay numbers so the config validator sees the intended type.
fn scalar(text: &str) -> Value {
    if let Ok(i) = text.parse::<u64>() {
        return json!(i);
    }
    match text.parse::<f64>() {
        Ok(x) if x.is_finite() => json!(x),
        _ => json!(text),
    }
}

fn put<T: Into<Value>>(doc: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        doc.insert(key.to_string(), v.into());
    }
}

fn put_schedule(doc: &mut Map<String, Value>, s: ScheduleArgs) {
    put(doc, "M", s.measurements);
    put(doc, "mode", s.mode);
    put(doc, "r", s.r.as_deref().map(scalar));
    put(doc, "t", s.t.as_deref().map(scalar));
    put(doc, "seed", s.seed);
}

fn read_config(path: &PathBuf) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidInput(format!("cannot read config {}: {e}", path.display()))
    })?;
    serde_json::from_str(&text).map_err(|e| {
        Error::Config(vec![zenosim::ConfigViolation {
            path: "$".into(),
            message: format!("{}: malformed JSON: {e}", path.display()),
        }])
    })
}

fn document(cli: Cli) -> Result<Value, Error> {
    let mut doc = Map::new();
    match cli.command {
        Command::Spectrum { problem, grid, refine } => {
            doc.insert("command".into(), json!("spectrum"));
            doc.insert("problem".into(), json!(problem.problem));
            put(&mut doc, "grid_points", grid);
            put(&mut doc, "refine", refine);
        }
        Command::Zeno { problem, schedule } => {
            doc.insert("command".into(), json!("zeno"));
            doc.insert("problem".into(), json!(problem.problem));
            put_schedule(&mut doc, schedule);
        }
        Command::Grover { n, w, protocol, schedule } => {
            doc.insert("command".into(), json!("grover"));
            let mut inst = Map::new();
            inst.insert("n".into(), json!(n));
            put(&mut inst, "w", w);
            doc.insert("grover".into(), Value::Object(inst));
            put(&mut doc, "protocol", protocol);
            put_schedule(&mut doc, schedule);
        }
        Command::Sweep { config } => {
            let value = read_config(&config)?;
            if value.get("command").and_then(Value::as_str) != Some("sweep") {
                return Err(Error::Config(vec![zenosim::ConfigViolation {
                    path: "command".into(),
                    message: "the sweep subcommand needs \"command\": \"sweep\"".into(),
                }]));
            }
            doc = value.as_object().cloned().unwrap_or_default();
        }
        Command::Run { config } => {
            let value = read_config(&config)?;
            let Value::Object(map) = value else {
                return Err(Error::Config(vec![zenosim::ConfigViolation {
                    path: "$".into(),
                    message: "configuration must be a JSON object".into(),
                }]));
            };
            doc = map;
        }
    }
    put(&mut doc, "out", cli.out.map(|p| json!(p)));
    put(&mut doc, "max_qubits", cli.max_qubits);
    Ok(Value::Object(doc))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK } as u8);
        }
    };
    let result = document(cli)
        .and_then(|doc| parse_config_value(&doc))
        .and_then(|cfg| run_experiment(&cfg));
    let code = exit_code(&result);
    match result {
        Ok(artifacts) => {
            println!("{}", artifacts.csv.display());
            println!("{}", artifacts.json.display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}
