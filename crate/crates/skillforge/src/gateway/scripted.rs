//! Deterministic scripted provider for offline runs and tests.
//!
//! A script is an ordered rule list; the first rule whose matcher accepts
//! the request produces the canned response. Rules may be consumable
//! (`max_uses`) to drive multi-turn transcripts. In strict mode an unmatched
//! request is an error, never a silent default.

use std::path::Path;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ChatRequest, GatewayError, Provider, Role, TokenUsage};

/// Stable fingerprint of a message body: first 16 hex chars of its SHA-256.
pub fn fingerprint(text: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let digest = hasher.finalize();
    let mut out = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Conjunctive request matcher. Empty fields match anything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequestMatcher {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag_prefix: Option<String>,
    /// Every listed substring must appear in the last user message.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub last_user_contains: Vec<String>,
    /// Every listed substring must appear in some message of the request.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub any_message_contains: Vec<String>,
    /// Fingerprint of the last user message, per [`fingerprint`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingerprint: Option<String>,
}

impl RequestMatcher {
    pub fn matches(&self, req: &ChatRequest) -> bool {
        if let Some(tag) = &self.tag {
            if !req.tags.iter().any(|t| t == tag) {
                return false;
            }
        }
        if let Some(prefix) = &self.tag_prefix {
            if !req.tags.iter().any(|t| t.starts_with(prefix.as_str())) {
                return false;
            }
        }
        let last_user = req
            .messages
            .iter()
            .rev()
            .find(|m| m.role == Role::User)
            .map(|m| m.content.as_str())
            .unwrap_or("");
        for needle in &self.last_user_contains {
            if !last_user.contains(needle.as_str()) {
                return false;
            }
        }
        for needle in &self.any_message_contains {
            if !req.messages.iter().any(|m| m.content.contains(needle.as_str())) {
                return false;
            }
        }
        if let Some(fp) = &self.fingerprint {
            if fingerprint(last_user) != *fp {
                return false;
            }
        }
        true
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScriptRule {
    #[serde(rename = "match")]
    pub matcher: RequestMatcher,
    pub response: String,
    /// Consume the rule after this many hits; unlimited when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_uses: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Script {
    pub rules: Vec<ScriptRule>,
    #[serde(default = "default_strict")]
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_response: Option<String>,
}

fn default_strict() -> bool {
    true
}

impl Script {
    pub fn new(rules: Vec<ScriptRule>) -> Self {
        Script { rules, strict: true, default_response: None }
    }

    pub fn from_file(path: &Path) -> Result<Script, GatewayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GatewayError::Transport(format!("read script {path:?}: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| GatewayError::Transport(format!("parse script {path:?}: {e}")))
    }

    pub fn to_file(&self, path: &Path) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("script serializes");
        text.push('\n');
        std::fs::write(path, text)
    }
}

pub struct ScriptedProvider {
    script: Script,
    uses: Mutex<Vec<u32>>,
}

impl ScriptedProvider {
    pub fn new(script: Script) -> Self {
        let uses = Mutex::new(vec![0; script.rules.len()]);
        ScriptedProvider { script, uses }
    }

    pub fn from_file(path: &Path) -> Result<Self, GatewayError> {
        Ok(Self::new(Script::from_file(path)?))
    }
}

impl Provider for ScriptedProvider {
    fn id(&self) -> &str {
        "scripted"
    }

    fn complete_text(&self, req: &ChatRequest) -> Result<(String, TokenUsage), GatewayError> {
        let mut uses = self.uses.lock().expect("script uses lock");
        for (i, rule) in self.script.rules.iter().enumerate() {
            if let Some(max) = rule.max_uses {
                if uses[i] >= max {
                    continue;
                }
            }
            if rule.matcher.matches(req) {
                uses[i] += 1;
                return Ok((rule.response.clone(), estimate_usage(req, &rule.response)));
            }
        }
        if !self.script.strict {
            if let Some(default) = &self.script.default_response {
                return Ok((default.clone(), estimate_usage(req, default)));
            }
        }
        Err(GatewayError::UnmatchedScript(format!(
            "no rule matches request tagged {:?}",
            req.tags
        )))
    }
}

fn estimate_usage(req: &ChatRequest, response: &str) -> TokenUsage {
    let prompt: usize = req.messages.iter().map(|m| m.content.len() / 4).sum();
    let completion = response.len() / 4;
    TokenUsage {
        prompt_tokens: prompt as u64,
        completion_tokens: completion as u64,
        total_tokens: (prompt + completion) as u64,
    }
}
