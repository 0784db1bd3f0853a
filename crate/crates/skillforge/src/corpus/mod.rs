//! Ticket corpus ingestion, task derivation, and chronological splits.
//!
//! Corpora are line-delimited JSON, one ticket per line. A task is one
//! agent-authored turn with the preceding dialogue as history; boilerplate
//! turns (pure greetings and closings) derive no task. Tickets split
//! chronologically into three development quarters plus a held-out
//! evaluation quarter.

pub mod anonymize;
pub mod synthetic;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use anonymize::{check_anonymization, AnonFinding, AnonKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TurnRole {
    Customer,
    Agent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: TurnRole,
    pub text: String,
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationLogEntry {
    pub tool: String,
    pub timestamp: u64,
}

/// An anonymized support dialogue.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ticket {
    pub id: String,
    pub scenario: String,
    pub created_at: u64,
    /// Global resolution summary across the whole ticket.
    pub summary: String,
    pub turns: Vec<Turn>,
    #[serde(default)]
    pub operation_log: Vec<OperationLogEntry>,
    /// Documentation links the human agent consulted.
    #[serde(default)]
    pub cited_refs: Vec<String>,
}

impl Ticket {
    pub fn validate(&self) -> Result<(), String> {
        if self.id.trim().is_empty() {
            return Err("ticket id is empty".into());
        }
        if self.summary.trim().is_empty() {
            return Err(format!("ticket {}: summary is empty", self.id));
        }
        let mut last = 0u64;
        for (i, turn) in self.turns.iter().enumerate() {
            if turn.timestamp < last {
                return Err(format!("ticket {}: turn {i} out of time order", self.id));
            }
            last = turn.timestamp;
        }
        Ok(())
    }
}

/// One single-turn dialogue task: reply in place of the expert turn at
/// `turn_index` given the strictly-earlier history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub ticket_id: String,
    pub turn_index: usize,
    pub history: Vec<Turn>,
    pub reference_response: Turn,
}

impl Task {
    pub fn task_id(&self) -> String {
        format!("{}#{}", self.ticket_id, self.turn_index)
    }
}

/// Greeting/closing fragments that do not advance ticket resolution.
pub const BOILERPLATE_PHRASES: &[&str] = &[
    "hello",
    "hi",
    "hi there",
    "thank you",
    "thanks",
    "thank you for your inquiry",
    "thanks for contacting us",
    "do you have any other questions",
    "is there anything else i can help with",
    "anything else i can help with",
    "you're welcome",
    "you are welcome",
    "have a nice day",
    "have a great day",
    "glad to help",
    "happy to help",
    "ok",
    "okay",
    "got it",
    "noted",
    "您好",
    "你好",
    "感谢您的咨询",
    "请问还有其他问题吗",
    "祝您生活愉快",
    "不客气",
    "好的",
];

/// True when every sentence fragment of `text` is a known greeting or
/// closing phrase. Empty text counts as boilerplate.
pub fn is_boilerplate(text: &str) -> bool {
    let mut any = false;
    for fragment in text.split(['.', '!', '?', '。', '！', '？', '\n', ';', '；', ',', '，']) {
        let cleaned = fragment.trim().trim_matches(['"', '\'', ' ', '~']).to_lowercase();
        if cleaned.is_empty() {
            continue;
        }
        any = true;
        if !BOILERPLATE_PHRASES.contains(&cleaned.as_str()) {
            return false;
        }
    }
    let _ = any;
    true
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Unreadable(String),
    #[error("{invalid} of {total} corpus lines are invalid (threshold {threshold})")]
    ErrorRatioExceeded { invalid: usize, total: usize, threshold: f64 },
    #[error("need at least 4 tickets to split, got {0}")]
    TooFewTickets(usize),
}

impl CorpusError {
    pub fn code(&self) -> &'static str {
        match self {
            CorpusError::Unreadable(_) => "unreadable",
            CorpusError::ErrorRatioExceeded { .. } => "error_ratio_exceeded",
            CorpusError::TooFewTickets(_) => "too_few_tickets",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusLoad {
    pub tickets: Vec<Ticket>,
    /// One warning per rejected line: (1-based line number, reason).
    pub warnings: Vec<(usize, String)>,
}

/// Loads a JSONL corpus. Invalid lines are collected as warnings; the load
/// fails only when their share exceeds `error_ratio` (default 0.2).
pub fn load_corpus(path: &Path, error_ratio: Option<f64>) -> Result<CorpusLoad, CorpusError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CorpusError::Unreadable(format!("{path:?}: {e}")))?;
    parse_corpus(&text, error_ratio)
}

/// Parses corpus text (one JSON ticket per line).
pub fn parse_corpus(text: &str, error_ratio: Option<f64>) -> Result<CorpusLoad, CorpusError> {
    let threshold = error_ratio.unwrap_or(0.2);
    let mut tickets = Vec::new();
    let mut warnings = Vec::new();
    let mut total = 0usize;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        match serde_json::from_str::<Ticket>(line) {
            Ok(ticket) => match ticket.validate() {
                Ok(()) => tickets.push(ticket),
                Err(reason) => warnings.push((i + 1, reason)),
            },
            Err(e) => warnings.push((i + 1, e.to_string())),
        }
    }
    if total > 0 {
        let ratio = warnings.len() as f64 / total as f64;
        if ratio > threshold {
            return Err(CorpusError::ErrorRatioExceeded {
                invalid: warnings.len(),
                total,
                threshold,
            });
        }
    }
    Ok(CorpusLoad { tickets, warnings })
}

/// Serializes tickets back to JSONL.
pub fn render_corpus(tickets: &[Ticket]) -> String {
    let mut out = String::new();
    for t in tickets {
        out.push_str(&serde_json::to_string(t).expect("ticket serializes"));
        out.push('\n');
    }
    out
}

/// Derives one task per substantive agent turn, preserving ticket order.
pub fn derive_tasks(ticket: &Ticket) -> Vec<Task> {
    let mut tasks = Vec::new();
    for (i, turn) in ticket.turns.iter().enumerate() {
        if turn.role == TurnRole::Agent && !is_boilerplate(&turn.text) {
            tasks.push(Task {
                ticket_id: ticket.id.clone(),
                turn_index: i,
                history: ticket.turns[..i].to_vec(),
                reference_response: turn.clone(),
            });
        }
    }
    tasks
}

/// Chronological 4-way split: three development quarters feeding evolution
/// rounds plus the held-out evaluation quarter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub dev_splits: [Vec<String>; 3],
    pub eval_split: Vec<String>,
}

impl SplitPlan {
    pub fn all_ids(&self) -> Vec<&str> {
        self.dev_splits
            .iter()
            .flatten()
            .chain(self.eval_split.iter())
            .map(|s| s.as_str())
            .collect()
    }
}

/// Sorts tickets by `created_at` (ties by id) and cuts four balanced
/// quarters: sizes differ by at most one, with the remainder going to the
/// earliest splits. The last quarter is the evaluation set.
pub fn split(tickets: &[Ticket]) -> Result<SplitPlan, CorpusError> {
    if tickets.len() < 4 {
        return Err(CorpusError::TooFewTickets(tickets.len()));
    }
    let mut ordered: Vec<&Ticket> = tickets.iter().collect();
    ordered.sort_by(|a, b| a.created_at.cmp(&b.created_at).then_with(|| a.id.cmp(&b.id)));

    let n = ordered.len();
    let base = n / 4;
    let remainder = n % 4;
    let mut sizes = [base; 4];
    for item in sizes.iter_mut().take(remainder) {
        *item += 1;
    }
    let mut chunks: Vec<Vec<String>> = Vec::with_capacity(4);
    let mut cursor = 0usize;
    for size in sizes {
        chunks.push(ordered[cursor..cursor + size].iter().map(|t| t.id.clone()).collect());
        cursor += size;
    }
    let eval_split = chunks.pop().expect("four chunks");
    let dev3 = chunks.pop().expect("three chunks");
    let dev2 = chunks.pop().expect("two chunks");
    let dev1 = chunks.pop().expect("one chunk");
    Ok(SplitPlan { dev_splits: [dev1, dev2, dev3], eval_split })
}
