//! Unified no-throw result type for VFS operations.
//!
//! Every operation returns an [`OpResult`] instead of erroring, so agents can
//! observe failures as data and keep going.

use serde::{Deserialize, Serialize};

/// Machine-readable error codes carried by failed operations.
pub mod codes {
    pub const MALFORMED_PATH: &str = "malformed_path";
    pub const NOT_FOUND: &str = "not_found";
    pub const IS_DIRECTORY: &str = "is_directory";
    pub const NOT_A_DIRECTORY: &str = "not_a_directory";
    pub const NOT_EMPTY: &str = "not_empty";
    pub const ALREADY_EXISTS: &str = "already_exists";
    pub const BAD_PATTERN: &str = "bad_pattern";
    pub const DUPLICATE_VERSION: &str = "duplicate_version";
    pub const INVALID_TARGET: &str = "invalid_target";
    pub const UNKNOWN_OPERATION: &str = "unknown_operation";
    pub const BAD_ARGS: &str = "bad_args";
}

/// Directory listing entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirEntry {
    pub name: String,
    pub kind: super::NodeKind,
    pub size: usize,
}

/// One grep hit: file path, 1-based line number, and the matching line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrepMatch {
    pub path: String,
    pub line_number: usize,
    pub line: String,
}

/// Operation-specific payload of a successful [`OpResult`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum OpData {
    Text(String),
    Entries(Vec<DirEntry>),
    Matches(Vec<GrepMatch>),
    Lines(Vec<String>),
    Paths(Vec<String>),
    Path(String),
    Label(String),
}

/// Unified result structure: `success` with optional `data`, or a failure
/// with a machine-readable `error` code. `message` is always human-readable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpResult {
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<OpData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub message: String,
}

impl OpResult {
    pub fn ok(message: impl Into<String>) -> Self {
        OpResult { success: true, data: None, error: None, message: message.into() }
    }

    pub fn ok_with(data: OpData, message: impl Into<String>) -> Self {
        OpResult { success: true, data: Some(data), error: None, message: message.into() }
    }

    pub fn err(code: &str, message: impl Into<String>) -> Self {
        OpResult { success: false, data: None, error: Some(code.to_string()), message: message.into() }
    }

    /// Error code, if this is a failure.
    pub fn code(&self) -> Option<&str> {
        self.error.as_deref()
    }

    pub fn text(&self) -> Option<&str> {
        match &self.data {
            Some(OpData::Text(t)) => Some(t),
            _ => None,
        }
    }

    pub fn entries(&self) -> Option<&[DirEntry]> {
        match &self.data {
            Some(OpData::Entries(e)) => Some(e),
            _ => None,
        }
    }

    pub fn matches(&self) -> Option<&[GrepMatch]> {
        match &self.data {
            Some(OpData::Matches(m)) => Some(m),
            _ => None,
        }
    }

    pub fn lines(&self) -> Option<&[String]> {
        match &self.data {
            Some(OpData::Lines(l)) => Some(l),
            _ => None,
        }
    }

    pub fn paths(&self) -> Option<&[String]> {
        match &self.data {
            Some(OpData::Paths(p)) => Some(p),
            _ => None,
        }
    }
}
