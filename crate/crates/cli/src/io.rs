use std::fmt;
use std::fs;
use std::path::Path;

use gleason_core::random::RNG_NAME;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable files; exit code 3.
    Usage(String),
    /// Inputs that parse but fail validation; exit code 1.
    Invalid(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 3,
            CliError::Invalid(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Invalid(m) => f.write_str(m),
        }
    }
}

impl From<gleason_core::Error> for CliError {
    fn from(e: gleason_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Invalid(format!("json: {e}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
    Inconclusive,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Ok
        } else {
            Status::Failed
        }
    }
}

pub type Check = Box<dyn Fn(&Value) -> Result<(), CliError>>;

/// What a subcommand produced.
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub text: String,
    /// Validates the `result` read back from a written artifact.
    pub check: Option<Check>,
}

impl Outcome {
    pub fn new(status: Status, result: impl Serialize, text: String) -> Result<Self, CliError> {
        Ok(Self {
            status,
            result: serde_json::to_value(result)?,
            text,
            check: None,
        })
    }

    pub fn with_check(mut self, check: impl Fn(&Value) -> Result<(), CliError> + 'static) -> Self {
        self.check = Some(Box::new(check));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub command: String,
    pub version: String,
    pub rng: String,
    pub seed: u64,
}

impl Meta {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            rng: RNG_NAME.to_string(),
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub meta: Meta,
    pub result: Value,
}

pub fn render(envelope: &Envelope) -> Result<String, CliError> {
    Ok(gleason_core::json::to_string(envelope)?)
}

/// Writes the artifact, reads it back and runs `check` on what was read.
pub fn write_artifact(path: &Path, envelope: &Envelope, check: Option<&Check>) -> Result<(), CliError> {
    let body = render(envelope)?;
    fs::write(path, &body).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    let back = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read back {}: {e}", path.display())))?;
    let parsed: Envelope = serde_json::from_str(&back)?;
    if parsed != *envelope {
        return Err(CliError::Invalid(format!("{} did not round-trip", path.display())));
    }
    if let Some(check) = check {
        check(&parsed.result)?;
    }
    Ok(())
}

/// Reads a JSON input, unwrapping an `{"meta", "result"}` envelope if present.
pub fn read_input<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)?;
    Ok(serde_json::from_value(unwrap_envelope(value))?)
}

pub fn unwrap_envelope(value: Value) -> Value {
    match value {
        Value::Object(mut map) if map.contains_key("meta") && map.contains_key("result") => {
            map.remove("result").unwrap()
        }
        other => other,
    }
}

/// Pulls `key` out of a result object and deserializes it.
pub fn field<T: DeserializeOwned>(value: &Value, key: &str) -> Result<T, CliError> {
    let v = value
        .get(key)
        .ok_or_else(|| CliError::Invalid(format!("artifact lacks {key:?}")))?;
    Ok(serde_json::from_value(v.clone())?)
}
