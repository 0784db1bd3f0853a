//! Single abstraction for all model calls.
//!
//! Every phase (creator, executor, judge, analyzer, diagnostician, optimizer)
//! goes through [`Gateway::complete`], which handles structured-output
//! validation with repair retries, per-call trace logging, and an optional
//! concurrency cap. Two providers ship: an HTTP chat-completions backend and
//! a deterministic scripted provider for offline runs.

pub mod http;
pub mod json_extract;
pub mod schemas;
pub mod scripted;

use std::sync::{Condvar, Mutex};

use serde::{Deserialize, Serialize};

pub use http::{HttpConfig, HttpProvider};
pub use json_extract::extract_json;
pub use scripted::{fingerprint, RequestMatcher, Script, ScriptRule, ScriptedProvider};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::System, content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::User, content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage { role: Role::Assistant, content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub messages: Vec<ChatMessage>,
    /// Name of a registered output schema; when set, the completion must
    /// contain a JSON object that validates against it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub response_schema: Option<String>,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Free-form trace labels (phase, case id, round).
    #[serde(default)]
    pub tags: Vec<String>,
}

impl ChatRequest {
    pub fn new(messages: Vec<ChatMessage>) -> Self {
        ChatRequest {
            messages,
            response_schema: None,
            temperature: 0.0,
            max_tokens: 2048,
            tags: Vec::new(),
        }
    }

    pub fn with_schema(mut self, schema: &str) -> Self {
        self.response_schema = Some(schema.to_string());
        self
    }

    pub fn with_tags(mut self, tags: Vec<String>) -> Self {
        self.tags = tags;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    fn validate(&self) -> Result<(), GatewayError> {
        if self.messages.is_empty() {
            return Err(GatewayError::BadRequest("message list is empty".into()));
        }
        if self.messages[0].role == Role::Assistant {
            return Err(GatewayError::BadRequest(
                "first message must be system or user".into(),
            ));
        }
        if self.temperature < 0.0 {
            return Err(GatewayError::BadRequest("temperature must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub total_tokens: u64,
}

impl TokenUsage {
    pub fn add(&mut self, other: TokenUsage) {
        self.prompt_tokens += other.prompt_tokens;
        self.completion_tokens += other.completion_tokens;
        self.total_tokens += other.total_tokens;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub text: String,
    /// Present iff the request named a response schema.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parsed: Option<serde_json::Value>,
    pub usage: TokenUsage,
    pub provider: String,
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("schema violation after retries: {0}")]
    SchemaViolation(String),
    #[error("unmatched scripted request: {0}")]
    UnmatchedScript(String),
    #[error("no JSON object found in completion")]
    NoJsonFound,
    #[error("JSON parse failure: {0}")]
    JsonParse(String),
}

impl GatewayError {
    pub fn code(&self) -> &'static str {
        match self {
            GatewayError::BadRequest(_) => "bad_request",
            GatewayError::Transport(_) => "transport",
            GatewayError::SchemaViolation(_) => "schema_violation",
            GatewayError::UnmatchedScript(_) => "unmatched_script",
            GatewayError::NoJsonFound => "no_json_found",
            GatewayError::JsonParse(_) => "parse_error",
        }
    }
}

/// A model backend the gateway can call.
pub trait Provider: Send + Sync {
    fn id(&self) -> &str;
    fn complete_text(&self, req: &ChatRequest) -> Result<(String, TokenUsage), GatewayError>;
}

/// One logged call; the full log reconstructs phase ordering for a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CallLogEntry {
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub attempts: u32,
    pub ok: bool,
}

/// Counting semaphore bounding in-flight provider calls.
struct ConcurrencyGate {
    limit: usize,
    state: Mutex<usize>,
    cv: Condvar,
}

impl ConcurrencyGate {
    fn new(limit: usize) -> Self {
        ConcurrencyGate { limit: limit.max(1), state: Mutex::new(0), cv: Condvar::new() }
    }

    fn acquire(&self) -> GatePermit<'_> {
        let mut in_flight = self.state.lock().expect("gate lock");
        while *in_flight >= self.limit {
            in_flight = self.cv.wait(in_flight).expect("gate wait");
        }
        *in_flight += 1;
        GatePermit { gate: self }
    }
}

struct GatePermit<'a> {
    gate: &'a ConcurrencyGate,
}

impl Drop for GatePermit<'_> {
    fn drop(&mut self) {
        let mut in_flight = self.gate.state.lock().expect("gate lock");
        *in_flight -= 1;
        self.gate.cv.notify_one();
    }
}

pub struct Gateway {
    provider: Box<dyn Provider>,
    /// Schema-repair retry budget beyond the first attempt.
    max_repair_retries: u32,
    gate: Option<ConcurrencyGate>,
    log: Mutex<Vec<CallLogEntry>>,
}

impl Gateway {
    pub fn new(provider: Box<dyn Provider>) -> Self {
        Gateway { provider, max_repair_retries: 2, gate: None, log: Mutex::new(Vec::new()) }
    }

    pub fn scripted(script: Script) -> Self {
        Gateway::new(Box::new(ScriptedProvider::new(script)))
    }

    pub fn with_concurrency(mut self, limit: usize) -> Self {
        self.gate = Some(ConcurrencyGate::new(limit));
        self
    }

    pub fn with_repair_retries(mut self, retries: u32) -> Self {
        self.max_repair_retries = retries;
        self
    }

    pub fn provider_id(&self) -> &str {
        self.provider.id()
    }

    /// Completes a request. When a response schema is set, the result either
    /// carries a schema-valid `parsed` record or the call errors after the
    /// repair retries are exhausted.
    pub fn complete(&self, req: &ChatRequest) -> Result<ChatResponse, GatewayError> {
        req.validate()?;
        let _permit = self.gate.as_ref().map(|g| g.acquire());

        let mut working = req.clone();
        let mut usage = TokenUsage::default();
        let mut attempts = 0u32;
        let attempt_budget =
            if req.response_schema.is_some() { 1 + self.max_repair_retries } else { 1 };
        let mut last_error: Option<GatewayError> = None;

        while attempts < attempt_budget {
            attempts += 1;
            let (text, step_usage) = match self.provider.complete_text(&working) {
                Ok(ok) => ok,
                Err(e) => {
                    self.push_log(req, attempts, false);
                    return Err(e);
                }
            };
            usage.add(step_usage);
            let Some(schema) = &req.response_schema else {
                self.push_log(req, attempts, true);
                return Ok(ChatResponse {
                    text,
                    parsed: None,
                    usage,
                    provider: self.provider.id().to_string(),
                });
            };
            let verdict = extract_json(&text)
                .map_err(|e| e.to_string())
                .and_then(|v| schemas::validate(schema, &v).map(|()| v));
            match verdict {
                Ok(parsed) => {
                    self.push_log(req, attempts, true);
                    return Ok(ChatResponse {
                        text,
                        parsed: Some(parsed),
                        usage,
                        provider: self.provider.id().to_string(),
                    });
                }
                Err(problem) => {
                    working.messages.push(ChatMessage::assistant(text));
                    working.messages.push(ChatMessage::user(format!(
                        "The previous reply failed validation against the {schema} schema: \
                         {problem}. Respond again with only a corrected JSON object."
                    )));
                    last_error = Some(GatewayError::SchemaViolation(problem));
                }
            }
        }
        self.push_log(req, attempts, false);
        Err(last_error.unwrap_or_else(|| GatewayError::SchemaViolation("no attempts".into())))
    }

    fn push_log(&self, req: &ChatRequest, attempts: u32, ok: bool) {
        self.log.lock().expect("gateway log lock").push(CallLogEntry {
            tags: req.tags.clone(),
            schema: req.response_schema.clone(),
            attempts,
            ok,
        });
    }

    pub fn call_log(&self) -> Vec<CallLogEntry> {
        self.log.lock().expect("gateway log lock").clone()
    }
}
