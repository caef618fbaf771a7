//! JSON experiment configuration.
//!
//! The document is walked as a `serde_json::Value` so that every violation
//! is reported with its path, not only the first one serde would hit.
//!
//! ```json
//! {"command": "zeno", "grover": {"n": 6}, "M": 200, "mode": "pointer",
//!  "r": "auto", "t": "auto", "seed": 7, "out": "runs/zeno"}
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{ConfigViolation, Error, Result};
use crate::grover::{GroverInstance, MAX_SUBSPACE_QUBITS};
use crate::hamiltonians::{CostFunction, DEFAULT_MAX_QUBITS};
use crate::pointer::MAX_POINTER_QUBITS;
use crate::spectral::DEFAULT_GRID_POINTS;
use crate::zeno::{MeasurementMode, TimePolicy};

/// Upper limit for `max_qubits`; beyond this a dense run cannot fit in memory.
pub const HARD_MAX_QUBITS: usize = 16;
pub const MAX_MEASUREMENTS: usize = 1_000_000;
pub const MAX_GRID_POINTS: usize = 100_001;
/// Smallest `n` for which the two-measurement protocol is defined.
pub const MIN_PROTOCOL_QUBITS: usize = 6;

const DEFAULT_MEASUREMENTS: usize = 100;

const KNOWN_KEYS: &[&str] = &[
    "command",
    "problem",
    "grover",
    "n",
    "values",
    "grid_points",
    "refine",
    "M",
    "mode",
    "r",
    "t",
    "seed",
    "protocol",
    "sweep",
    "out",
    "max_qubits",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Spectrum,
    Zeno,
    Grover,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Zeno => "zeno",
            Command::Grover => "grover",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the cost function comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Table(CostFunction),
    /// Search instance; `w = None` means "any winner", which lets the
    /// Grover command use the symmetric subspace.
    Grover { n: usize, w: Option<usize> },
}

impl Problem {
    pub fn n(&self) -> usize {
        match self {
            Problem::Table(cost) => cost.n(),
            Problem::Grover { n, .. } => *n,
        }
    }

    pub fn cost(&self) -> CostFunction {
        match self {
            Problem::Table(cost) => cost.clone(),
            Problem::Grover { n, w } => crate::grover::grover_cost(&GroverInstance {
                n: *n,
                w: w.unwrap_or(0),
            }),
        }
    }

    /// Same problem with `n` qubits (Grover instances only).
    pub fn with_qubits(&self, n: usize) -> Option<Problem> {
        match self {
            Problem::Grover { w, .. } => Some(Problem::Grover { n, w: *w }),
            Problem::Table(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitPolicy {
    /// Smallest `r` satisfying the pointer range condition.
    Auto,
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSetting {
    Fixed(f64),
    Auto,
    Adaptive,
    Random,
}

impl TimeSetting {
    pub fn policy(self) -> TimePolicy {
        match self {
            TimeSetting::Fixed(_) => TimePolicy::Fixed,
            TimeSetting::Auto => TimePolicy::Auto,
            TimeSetting::Adaptive => TimePolicy::Adaptive,
            TimeSetting::Random => TimePolicy::Random,
        }
    }

    pub fn fixed(self) -> Option<f64> {
        match self {
            TimeSetting::Fixed(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    /// Uniform Zeno schedule of `M` measurements.
    Schedule,
    /// Pointer measurement at the avoided crossing, then readout.
    TwoMeasurement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    M,
    T,
    R,
    N,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::M => "M",
            SweepAxis::T => "t",
            SweepAxis::R => "r",
            SweepAxis::N => "n",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub problem: Problem,
    pub grid_points: usize,
    pub refine: bool,
    pub measurements: usize,
    pub mode: MeasurementMode,
    pub r: QubitPolicy,
    pub t: TimeSetting,
    pub seed: u64,
    pub protocol: Protocol,
    pub sweep: Option<Sweep>,
    pub out: PathBuf,
    pub max_qubits: usize,
}

/// Parses and validates a configuration document, collecting every violation.
pub fn parse_config(document: &str) -> Result<ExperimentConfig> {
    let value: Value = serde_json::from_str(document).map_err(|e| {
        Error::Config(vec![ConfigViolation {
            path: "$".into(),
            message: format!("malformed JSON: {e}"),
        }])
    })?;
    parse_config_value(&value)
}

pub fn parse_config_value(value: &Value) -> Result<ExperimentConfig> {
    let mut p = Parser::default();
    let cfg = p.config(value);
    match cfg {
        Some(cfg) if p.violations.is_empty() => Ok(cfg),
        _ => {
            if p.violations.is_empty() {
                p.push("$", "invalid configuration");
            }
            Err(Error::Config(p.violations))
        }
    }
}

#[derive(Default)]
struct Parser {
    violations: Vec<ConfigViolation>,
}

impl Parser {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(ConfigViolation {
            path: path.into(),
            message: message.into(),
        });
    }

    fn config(&mut self, value: &Value) -> Option<ExperimentConfig> {
        let Some(obj) = value.as_object() else {
            self.push("$", "configuration must be a JSON object");
            return None;
        };
        for key in obj.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) {
                self.push(key.clone(), "unknown field");
            }
        }

        let command = match obj.get("command") {
            None => {
                self.push("command", "required (spectrum, zeno, grover or sweep)");
                None
            }
            Some(v) => match v.as_str() {
                Some("spectrum") => Some(Command::Spectrum),
                Some("zeno") => Some(Command::Zeno),
                Some("grover") => Some(Command::Grover),
                Some("sweep") => Some(Command::Sweep),
                _ => {
                    self.push("command", format!("expected spectrum, zeno, grover or sweep, got {v}"));
                    None
                }
            },
        };

        let max_qubits = self
            .uint(obj, "max_qubits", 1, HARD_MAX_QUBITS)
            .map(|v| v.unwrap_or(DEFAULT_MAX_QUBITS))
            .unwrap_or(DEFAULT_MAX_QUBITS);
        let grid_points = self.uint(obj, "grid_points", 2, MAX_GRID_POINTS).map(|v| v.unwrap_or(DEFAULT_GRID_POINTS));
        let refine = self.boolean(obj, "refine").map(|v| v.unwrap_or(true));
        let measurements = self.uint(obj, "M", 1, MAX_MEASUREMENTS).map(|v| v.unwrap_or(DEFAULT_MEASUREMENTS));
        let seed = self.uint(obj, "seed", 0, usize::MAX).map(|v| v.unwrap_or(0) as u64);
        let mode = self.mode(obj);
        let r = self.qubit_policy(obj);
        let t = self.time_setting(obj);
        let protocol = self.protocol(obj, command);
        let out = self.out(obj);

        // Subspace-only runs accept much larger n than full-space ones.
        let subspace = command == Some(Command::Grover)
            && (protocol == Some(Protocol::TwoMeasurement)
                || obj.get("grover").and_then(|g| g.get("w")).is_none());
        let cap = if subspace { MAX_SUBSPACE_QUBITS } else { max_qubits };
        let problem = self.problem(obj, cap);

        if command == Some(Command::Grover) {
            if let Some(Problem::Table(_)) = problem {
                self.push("problem", "the grover command needs a grover instance");
            }
            if protocol == Some(Protocol::TwoMeasurement) {
                if let Some(p) = &problem {
                    if p.n() < MIN_PROTOCOL_QUBITS {
                        self.push(
                            "grover.n",
                            format!("two-measurement protocol needs n >= {MIN_PROTOCOL_QUBITS}, got {}", p.n()),
                        );
                    }
                }
                if matches!(t, Some(TimeSetting::Adaptive | TimeSetting::Random)) {
                    self.push("t", "two-measurement protocol takes a number or \"auto\"");
                }
            }
        }

        let sweep = match obj.get("sweep") {
            None => {
                if command == Some(Command::Sweep) {
                    self.push("sweep", "required for the sweep command");
                }
                None
            }
            Some(v) => {
                if let Some(other) = command.filter(|c| *c != Command::Sweep) {
                    self.push("sweep", format!("only valid with the sweep command, not {other}"));
                }
                self.sweep(v, problem.as_ref(), mode, max_qubits)
            }
        };

        Some(ExperimentConfig {
            command: command?,
            problem: problem?,
            grid_points: grid_points?,
            refine: refine?,
            measurements: measurements?,
            mode: mode?,
            r: r?,
            t: t?,
            seed: seed?,
            protocol: protocol?,
            sweep,
            out: out?,
            max_qubits,
        })
    }

    /// `Some(None)` when absent, `None` on violation.
    fn uint(&mut self, obj: &Map<String, Value>, key: &str, lo: usize, hi: usize) -> Option<Option<usize>> {
        match obj.get(key) {
            None => Some(None),
            Some(v) => self.uint_value(key, v, lo, hi).map(Some),
        }
    }

    fn uint_value(&mut self, path: &str, v: &Value, lo: usize, hi: usize) -> Option<usize> {
        match v.as_u64() {
            Some(x) if (x as u128) >= lo as u128 && (x as u128) <= hi as u128 => Some(x as usize),
            Some(x) => {
                self.push(path, format!("{x} is outside [{lo}, {hi}]"));
                None
            }
            None => {
                self.push(path, format!("expected a non-negative integer, got {v}"));
                None
            }
        }
    }

    fn boolean(&mut self, obj: &Map<String, Value>, key: &str) -> Option<Option<bool>> {
        match obj.get(key) {
            None => Some(None),
            Some(Value::Bool(b)) => Some(Some(*b)),
            Some(v) => {
                self.push(key, format!("expected true or false, got {v}"));
                None
            }
        }
    }

    fn mode(&mut self, obj: &Map<String, Value>) -> Option<MeasurementMode> {
        match obj.get("mode") {
            None => Some(MeasurementMode::Projective),
            Some(v) => match v.as_str() {
                Some("projective") => Some(MeasurementMode::Projective),
                Some("pointer") => Some(MeasurementMode::Pointer),
                _ => {
                    self.push("mode", format!("expected projective or pointer, got {v}"));
                    None
                }
            },
        }
    }

    fn qubit_policy(&mut self, obj: &Map<String, Value>) -> Option<QubitPolicy> {
        match obj.get("r") {
            None => Some(QubitPolicy::Auto),
            Some(Value::String(s)) if s == "auto" => Some(QubitPolicy::Auto),
            Some(v @ Value::Number(_)) => self
                .uint_value("r", v, 1, MAX_POINTER_QUBITS as usize)
                .map(|r| QubitPolicy::Fixed(r as u32)),
            Some(v) => {
                self.push("r", format!("expected an integer or \"auto\", got {v}"));
                None
            }
        }
    }

    fn time_setting(&mut self, obj: &Map<String, Value>) -> Option<TimeSetting> {
        match obj.get("t") {
            None => Some(TimeSetting::Auto),
            Some(Value::String(s)) => match s.as_str() {
                "auto" => Some(TimeSetting::Auto),
                "adaptive" => Some(TimeSetting::Adaptive),
                "random" => Some(TimeSetting::Random),
                _ => {
                    self.push("t", format!("expected a number, auto, adaptive or random, got {s:?}"));
                    None
                }
            },
            Some(v) => self.time_value("t", v).map(TimeSetting::Fixed),
        }
    }

    fn time_value(&mut self, path: &str, v: &Value) -> Option<f64> {
        match v.as_f64() {
            Some(t) if t.is_finite() && t >= 0.0 => Some(t),
            _ => {
                self.push(path, format!("expected a finite non-negative number, got {v}"));
                None
            }
        }
    }

    fn protocol(&mut self, obj: &Map<String, Value>, command: Option<Command>) -> Option<Protocol> {
        match obj.get("protocol") {
            None => Some(if command == Some(Command::Grover) {
                Protocol::TwoMeasurement
            } else {
                Protocol::Schedule
            }),
            Some(v) => {
                if command.is_some() && command != Some(Command::Grover) {
                    self.push("protocol", "only valid with the grover command");
                }
                match v.as_str() {
                    Some("schedule") => Some(Protocol::Schedule),
                    Some("two-measurement") => Some(Protocol::TwoMeasurement),
                    _ => {
                        self.push("protocol", format!("expected schedule or two-measurement, got {v}"));
                        None
                    }
                }
            }
        }
    }

    fn out(&mut self, obj: &Map<String, Value>) -> Option<PathBuf> {
        match obj.get("out") {
            None => Some(PathBuf::from(".")),
            Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
            Some(v) => {
                self.push("out", format!("expected a non-empty directory path, got {v}"));
                None
            }
        }
    }

    fn problem(&mut self, obj: &Map<String, Value>, cap: usize) -> Option<Problem> {
        let mut sources = Vec::new();
        if obj.contains_key("problem") {
            sources.push("problem");
        }
        if obj.contains_key("grover") {
            sources.push("grover");
        }
        if obj.contains_key("n") || obj.contains_key("values") {
            sources.push("n/values");
        }
        match sources.as_slice() {
            [] => {
                self.push("problem", "required: give \"problem\", \"grover\" or \"n\" with \"values\"");
                None
            }
            [_] => {
                if let Some(v) = obj.get("problem") {
                    self.problem_field(v, cap)
                } else if let Some(v) = obj.get("grover") {
                    self.grover_instance("grover", v, cap)
                } else {
                    self.table("", obj, cap)
                }
            }
            many => {
                self.push("problem", format!("exactly one problem source allowed, got {}", many.join(", ")));
                None
            }
        }
    }

    fn problem_field(&mut self, v: &Value, cap: usize) -> Option<Problem> {
        match v {
            Value::String(path) => {
                let text = match std::fs::read_to_string(path) {
                    Ok(text) => text,
                    Err(e) => {
                        self.push("problem", format!("cannot read {path}: {e}"));
                        return None;
                    }
                };
                match serde_json::from_str::<Value>(&text) {
                    Ok(doc) => self.problem_object("problem", &doc, cap),
                    Err(e) => {
                        self.push("problem", format!("{path}: malformed JSON: {e}"));
                        None
                    }
                }
            }
            Value::Object(_) => self.problem_object("problem", v, cap),
            _ => {
                self.push("problem", "expected a cost object or a file path");
                None
            }
        }
    }

    fn problem_object(&mut self, path: &str, v: &Value, cap: usize) -> Option<Problem> {
        let Some(obj) = v.as_object() else {
            self.push(path, "expected an object");
            return None;
        };
        if let Some(g) = obj.get("grover") {
            for key in obj.keys().filter(|k| *k != "grover") {
                self.push(format!("{path}.{key}"), "unexpected next to grover");
            }
            return self.grover_instance(&format!("{path}.grover"), g, cap);
        }
        for key in obj.keys().filter(|k| *k != "n" && *k != "values") {
            self.push(format!("{path}.{key}"), "unknown field");
        }
        self.table(&format!("{path}."), obj, cap)
    }

    fn qubits(&mut self, path: &str, v: Option<&Value>, cap: usize) -> Option<usize> {
        let Some(v) = v else {
            self.push(path, "required");
            return None;
        };
        match v.as_u64() {
            Some(0) => {
                self.push(path, "need at least one qubit");
                None
            }
            Some(n) if n as u128 > cap as u128 => {
                self.push(path, format!("{n} exceeds the qubit cap of {cap}"));
                None
            }
            Some(n) => Some(n as usize),
            None => {
                self.push(path, format!("expected a positive integer, got {v}"));
                None
            }
        }
    }

    fn grover_instance(&mut self, path: &str, v: &Value, cap: usize) -> Option<Problem> {
        let Some(obj) = v.as_object() else {
            self.push(path, "expected {\"n\": .., \"w\": ..}");
            return None;
        };
        for key in obj.keys().filter(|k| *k != "n" && *k != "w") {
            self.push(format!("{path}.{key}"), "unknown field");
        }
        let n = self.qubits(&format!("{path}.n"), obj.get("n"), cap);
        let w = match obj.get("w") {
            None => Some(None),
            Some(wv) => match (wv.as_u64(), n) {
                (Some(w), Some(n)) if n < 64 && w >= 1u64 << n => {
                    self.push(format!("{path}.w"), format!("winner {w} must be below 2^n = {}", 1u64 << n));
                    None
                }
                (Some(w), _) => Some(Some(w as usize)),
                (None, _) => {
                    self.push(format!("{path}.w"), format!("expected a non-negative integer, got {wv}"));
                    None
                }
            },
        };
        Some(Problem::Grover { n: n?, w: w? })
    }

    fn table(&mut self, prefix: &str, obj: &Map<String, Value>, cap: usize) -> Option<Problem> {
        let n = self.qubits(&format!("{prefix}n"), obj.get("n"), cap);
        let values_path = format!("{prefix}values");
        let values = match obj.get("values") {
            None => {
                self.push(values_path.clone(), "required: 2^n cost values");
                None
            }
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                let mut ok = true;
                for (i, item) in items.iter().enumerate() {
                    match item.as_f64() {
                        Some(x) if x.is_finite() && x >= 0.0 => out.push(x),
                        _ => {
                            self.push(format!("{values_path}[{i}]"), format!("expected a non-negative number, got {item}"));
                            ok = false;
                        }
                    }
                }
                ok.then_some(out)
            }
            Some(v) => {
                self.push(values_path.clone(), format!("expected an array, got {v}"));
                None
            }
        };
        let (n, values) = (n?, values?);
        if values.len() != 1usize << n {
            self.push(values_path, format!("expected 2^{n} = {} entries, got {}", 1usize << n, values.len()));
            return None;
        }
        match CostFunction::new(n, values) {
            Ok(cost) => Some(Problem::Table(cost)),
            Err(e) => {
                self.push(values_path, e.to_string());
                None
            }
        }
    }

    fn sweep(
        &mut self,
        v: &Value,
        problem: Option<&Problem>,
        mode: Option<MeasurementMode>,
        max_qubits: usize,
    ) -> Option<Sweep> {
        let Some(obj) = v.as_object() else {
            self.push("sweep", "expected {\"axis\": .., \"values\": [..]}");
            return None;
        };
        for key in obj.keys().filter(|k| *k != "axis" && *k != "values") {
            self.push(format!("sweep.{key}"), "unknown field");
        }
        let axis = match obj.get("axis").and_then(Value::as_str) {
            Some("M") => Some(SweepAxis::M),
            Some("t") => Some(SweepAxis::T),
            Some("r") => Some(SweepAxis::R),
            Some("n") => Some(SweepAxis::N),
            _ => {
                self.push("sweep.axis", "expected one of M, t, r, n");
                None
            }
        };
        if matches!(axis, Some(SweepAxis::T | SweepAxis::R)) && mode == Some(MeasurementMode::Projective) {
            self.push("sweep.axis", "t and r sweeps need mode = pointer");
        }
        if axis == Some(SweepAxis::N) && matches!(problem, Some(Problem::Table(_))) {
            self.push("sweep.axis", "an n sweep needs a grover instance as the problem");
        }

        let items = match obj.get("values") {
            Some(Value::Array(items)) => items,
            Some(other) => {
                self.push("sweep.values", format!("expected an array, got {other}"));
                return None;
            }
            None => {
                self.push("sweep.values", "required");
                return None;
            }
        };
        let axis = axis?;
        let mut values = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, item) in items.iter().enumerate() {
            let path = format!("sweep.values[{i}]");
            let parsed = match axis {
                SweepAxis::M => self.uint_value(&path, item, 1, MAX_MEASUREMENTS).map(|x| x as f64),
                SweepAxis::R => self.uint_value(&path, item, 1, MAX_POINTER_QUBITS as usize).map(|x| x as f64),
                SweepAxis::N => self.qubits(&path, Some(item), max_qubits).map(|n| n as f64),
                SweepAxis::T => self.time_value(&path, item),
            };
            if let (SweepAxis::N, Some(n), Some(Problem::Grover { w: Some(w), .. })) = (axis, parsed, problem) {
                if (*w as f64) >= 2f64.powf(n) {
                    self.push(path.clone(), format!("winner {w} does not fit in {n} qubits"));
                }
            }
            match parsed {
                Some(x) => values.push(x),
                None => ok = false,
            }
        }
        ok.then_some(Sweep { axis, values })
    }
}

/// Flat `path -> message` view of a configuration error, for tests and
/// diagnostics.
pub fn violation_map(err: &Error) -> BTreeMap<String, String> {
    match err {
        Error::Config(v) => v.iter().map(|x| (x.path.clone(), x.message.clone())).collect(),
        _ => BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn violations(doc: &str) -> BTreeMap<String, String> {
        violation_map(&parse_config(doc).unwrap_err())
    }

    #[test]
    fn grover_two_measurement_is_valid() {
        let cfg = parse_config(r#"{"command":"grover","grover":{"n":8},"protocol":"two-measurement"}"#).unwrap();
        assert_eq!(cfg.command, Command::Grover);
        assert_eq!(cfg.protocol, Protocol::TwoMeasurement);
        assert_eq!(cfg.problem, Problem::Grover { n: 8, w: None });
        assert_eq!(cfg.t, TimeSetting::Auto);
    }

    #[test]
    fn missing_problem_is_named() {
        let v = violations(r#"{"command":"zeno"}"#);
        assert!(v.contains_key("problem"), "{v:?}");
    }

    #[test]
    fn qubit_cap_is_enforced() {
        let v = violations(r#"{"command":"zeno","n":30,"M":100}"#);
        assert!(v["n"].contains("cap"), "{v:?}");
        let v = violations(r#"{"command":"zeno","grover":{"n":15}}"#);
        assert!(v["grover.n"].contains("cap"));
        // raising the cap is allowed up to the hard limit
        assert!(parse_config(r#"{"command":"spectrum","grover":{"n":15},"max_qubits":15}"#).is_ok());
        assert!(violations(r#"{"command":"spectrum","grover":{"n":4},"max_qubits":40}"#).contains_key("max_qubits"));
        // the subspace protocol is not bound by the full-space cap
        assert!(parse_config(r#"{"command":"grover","grover":{"n":40}}"#).is_ok());
        assert!(violations(r#"{"command":"grover","grover":{"n":40,"w":3},"protocol":"schedule"}"#)
            .contains_key("grover.n"));
    }

    #[test]
    fn all_violations_are_reported() {
        let v = violations(
            r#"{"command":"sweep","grover":{"n":6,"w":99},"M":0,"mode":"weak","r":21,"t":"soon",
                "sweep":{"axis":"q","values":[1]},"colour":"red"}"#,
        );
        for key in ["grover.w", "M", "mode", "r", "t", "sweep.axis", "colour"] {
            assert!(v.contains_key(key), "missing {key} in {v:?}");
        }
    }

    #[test]
    fn malformed_json() {
        let v = violations("{\"command\": ");
        assert!(v["$"].contains("malformed"));
    }

    #[test]
    fn problem_sources_are_exclusive() {
        let v = violations(r#"{"command":"spectrum","grover":{"n":3},"n":1,"values":[0,1]}"#);
        assert!(v["problem"].contains("exactly one"));
    }

    #[test]
    fn inline_table_and_file_problem() {
        let cfg = parse_config(r#"{"command":"spectrum","n":2,"values":[3,0,1,2],"grid_points":11}"#).unwrap();
        assert_eq!(cfg.problem.cost().values(), &[3.0, 0.0, 1.0, 2.0]);
        assert_eq!(cfg.grid_points, 11);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cost.json");
        std::fs::write(&path, r#"{"n":1,"values":[1,0]}"#).unwrap();
        let doc = serde_json::json!({"command": "zeno", "problem": path.to_str().unwrap(), "M": 5});
        let cfg = parse_config(&doc.to_string()).unwrap();
        assert_eq!(cfg.problem.n(), 1);
        assert_eq!(cfg.measurements, 5);

        let v = violations(r#"{"command":"zeno","problem":"/nonexistent/cost.json"}"#);
        assert!(v["problem"].contains("cannot read"));
        let v = violations(r#"{"command":"zeno","problem":{"n":2,"values":[1,0,-1]}}"#);
        assert!(v.contains_key("problem.values[2]"));
    }

    #[test]
    fn table_length_checked() {
        let v = violations(r#"{"command":"spectrum","n":2,"values":[1,0]}"#);
        assert!(v["values"].contains("2^2"));
    }

    #[test]
    fn sweep_validation() {
        let cfg = parse_config(
            r#"{"command":"sweep","grover":{"n":4},"mode":"pointer","sweep":{"axis":"t","values":[1.5,3]}}"#,
        )
        .unwrap();
        assert_eq!(cfg.sweep, Some(Sweep { axis: SweepAxis::T, values: vec![1.5, 3.0] }));

        let v = violations(r#"{"command":"sweep","grover":{"n":4},"sweep":{"axis":"r","values":[2]}}"#);
        assert!(v["sweep.axis"].contains("pointer"));
        let v = violations(r#"{"command":"sweep","n":1,"values":[1,0],"sweep":{"axis":"n","values":[2]}}"#);
        assert!(v["sweep.axis"].contains("grover"));
        let v = violations(r#"{"command":"sweep","grover":{"n":4,"w":9},"sweep":{"axis":"n","values":[3,5,20]}}"#);
        assert!(v.contains_key("sweep.values[0]"));
        assert!(v.contains_key("sweep.values[2]"));
        assert!(!v.contains_key("sweep.values[1]"));
        let v = violations(r#"{"command":"sweep","grover":{"n":4}}"#);
        assert!(v.contains_key("sweep"));
        let v = violations(r#"{"command":"zeno","grover":{"n":4},"sweep":{"axis":"M","values":[]}}"#);
        assert!(v.contains_key("sweep"));
        // empty value lists are allowed
        let cfg = parse_config(r#"{"command":"sweep","grover":{"n":4},"sweep":{"axis":"M","values":[]}}"#).unwrap();
        assert!(cfg.sweep.unwrap().values.is_empty());
    }

    #[test]
    fn defaults() {
        let cfg = parse_config(r#"{"command":"zeno","grover":{"n":3,"w":5}}"#).unwrap();
        assert_eq!(cfg.measurements, 100);
        assert_eq!(cfg.mode, MeasurementMode::Projective);
        assert_eq!(cfg.r, QubitPolicy::Auto);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.grid_points, DEFAULT_GRID_POINTS);
        assert!(cfg.refine);
        assert_eq!(cfg.max_qubits, DEFAULT_MAX_QUBITS);
        assert_eq!(cfg.problem.cost().minimizers(), vec![5]);
    }

    #[test]
    fn two_measurement_limits() {
        let v = violations(r#"{"command":"grover","grover":{"n":4}}"#);
        assert!(v["grover.n"].contains(">= 6"));
        let v = violations(r#"{"command":"grover","grover":{"n":8},"t":"random"}"#);
        assert!(v.contains_key("t"));
        let v = violations(r#"{"command":"grover","n":2,"values":[0,1,1,1]}"#);
        assert!(v.contains_key("problem"));
        let v = violations(r#"{"command":"spectrum","grover":{"n":4},"protocol":"schedule"}"#);
        assert!(v.contains_key("protocol"));
    }
}
