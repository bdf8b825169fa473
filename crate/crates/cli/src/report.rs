use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::time::Instant;

use groupeq::structure::StructureError;
use groupeq::{GroupError, ReductionError, SolverError, TermError};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_PRECONDITION: u8 = 3;
pub const EXIT_CAP: u8 = 4;
pub const EXIT_INTERNAL: u8 = 5;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    pub fn new(kind: &'static str, exit_code: u8, message: impl Into<String>) -> Self {
        CliError { kind, message: message.into(), exit_code }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new("invalid-input", EXIT_INVALID, message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new("io", EXIT_INVALID, format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::CapExceeded { .. } => CliError::new("group-cap", EXIT_CAP, e.to_string()),
            _ => CliError::new("group", EXIT_INVALID, e.to_string()),
        }
    }
}

impl From<TermError> for CliError {
    fn from(e: TermError) -> Self {
        CliError::new("term", EXIT_INVALID, e.to_string())
    }
}

impl From<StructureError> for CliError {
    fn from(e: StructureError) -> Self {
        let code = match e {
            StructureError::IsNilpotent | StructureError::NotSolvable | StructureError::TooLarge { .. } => EXIT_PRECONDITION,
            StructureError::InternalCheckFailed(_) => EXIT_INTERNAL,
            StructureError::NotASubgroup(_) | StructureError::NotNormal => EXIT_INTERNAL,
        };
        CliError::new("structure", code, e.to_string())
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::SearchSpaceTooLarge { .. } => CliError::new("search-space-too-large", EXIT_CAP, e.to_string()),
            SolverError::Group(g) => g.into(),
            SolverError::Term(t) => t.into(),
            SolverError::Syntax { .. } => CliError::new("parse", EXIT_INVALID, e.to_string()),
            SolverError::InvalidInstance(_) | SolverError::Io(_) => CliError::invalid(e.to_string()),
        }
    }
}

impl From<ReductionError> for CliError {
    fn from(e: ReductionError) -> Self {
        match e {
            ReductionError::Solver(s) => s.into(),
            ReductionError::Structure(s) => s.into(),
            ReductionError::Syntax { .. } => CliError::new("parse", EXIT_INVALID, e.to_string()),
            ReductionError::InvalidInstance(_) => CliError::invalid(e.to_string()),
            ReductionError::PreconditionFailed(_)
            | ReductionError::IndexTooSmall { .. }
            | ReductionError::IndexNotTwo { .. }
            | ReductionError::NotApplicable(_) => CliError::new("precondition", EXIT_PRECONDITION, e.to_string()),
            ReductionError::WitnessInvalid(_) => CliError::new("internal-check", EXIT_INTERNAL, e.to_string()),
        }
    }
}

/// Accumulates the JSON report of one command. Everything except
/// `timings` is a function of the inputs alone.
pub struct Report {
    command: Value,
    inputs: Vec<Value>,
    outputs: Vec<Value>,
    result: Map<String, Value>,
    timings: BTreeMap<String, f64>,
    started: Instant,
    pub summary: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Report {
    pub fn new(command: Value) -> Self {
        Report {
            command,
            inputs: Vec::new(),
            outputs: Vec::new(),
            result: Map::new(),
            timings: BTreeMap::new(),
            started: Instant::now(),
            summary: Vec::new(),
        }
    }

    pub fn input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.push(json!({ "name": name, "sha256": sha256_hex(bytes), "bytes": bytes.len() }));
    }

    pub fn output(&mut self, path: &Path, bytes: &[u8]) {
        self.outputs.push(json!({ "path": path.display().to_string(), "sha256": sha256_hex(bytes) }));
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.result.insert(key.to_string(), value);
    }

    /// Runs `f` and records its wall time under `phase`.
    pub fn timed<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.timings.entry(phase.to_string()).or_default() += t.elapsed().as_secs_f64() * 1e3;
        out
    }

    pub fn finish(mut self, error: Option<&CliError>) -> Value {
        self.timings.insert("total_ms".into(), self.started.elapsed().as_secs_f64() * 1e3);
        let mut root = Map::new();
        root.insert("command".into(), self.command);
        root.insert("inputs".into(), Value::Array(self.inputs));
        if !self.outputs.is_empty() {
            root.insert("outputs".into(), Value::Array(self.outputs));
        }
        root.insert("result".into(), Value::Object(self.result));
        if let Some(e) = error {
            root.insert("error".into(), json!({ "kind": e.kind, "message": e.message, "exit_code": e.exit_code }));
        }
        root.insert("timings".into(), json!(self.timings));
        Value::Object(root)
    }
}
