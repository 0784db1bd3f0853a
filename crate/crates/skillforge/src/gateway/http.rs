//! Chat-completions HTTP provider (OpenAI-compatible wire format).

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ChatRequest, GatewayError, Provider, TokenUsage};

pub const ENV_URL: &str = "SKILLFORGE_LLM_URL";
pub const ENV_MODEL: &str = "SKILLFORGE_LLM_MODEL";
pub const ENV_KEY: &str = "SKILLFORGE_LLM_KEY";

#[derive(Debug, Clone)]
pub struct HttpConfig {
    pub url: String,
    pub model: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
}

impl HttpConfig {
    /// Reads endpoint, model, and key from the environment.
    pub fn from_env() -> Result<HttpConfig, GatewayError> {
        let url = std::env::var(ENV_URL)
            .map_err(|_| GatewayError::Transport(format!("{ENV_URL} is not set")))?;
        let model = std::env::var(ENV_MODEL)
            .map_err(|_| GatewayError::Transport(format!("{ENV_MODEL} is not set")))?;
        Ok(HttpConfig {
            url,
            model,
            api_key: std::env::var(ENV_KEY).ok(),
            timeout: Duration::from_secs(120),
        })
    }

    fn endpoint(&self) -> String {
        if self.url.ends_with("/chat/completions") {
            self.url.clone()
        } else {
            format!("{}/chat/completions", self.url.trim_end_matches('/'))
        }
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
    stream: bool,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireChoiceMessage,
}

#[derive(Deserialize)]
struct WireChoiceMessage {
    #[serde(default)]
    content: Option<String>,
}

#[derive(Deserialize, Default)]
struct WireUsage {
    #[serde(default)]
    prompt_tokens: u64,
    #[serde(default)]
    completion_tokens: u64,
    #[serde(default)]
    total_tokens: u64,
}

pub struct HttpProvider {
    config: HttpConfig,
    client: reqwest::blocking::Client,
}

impl HttpProvider {
    pub fn new(config: HttpConfig) -> Result<HttpProvider, GatewayError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| GatewayError::Transport(e.to_string()))?;
        Ok(HttpProvider { config, client })
    }

    pub fn from_env() -> Result<HttpProvider, GatewayError> {
        HttpProvider::new(HttpConfig::from_env()?)
    }

    pub(crate) fn wire_body(&self, req: &ChatRequest) -> serde_json::Value {
        let messages = req
            .messages
            .iter()
            .map(|m| WireMessage { role: m.role.as_str(), content: &m.content })
            .collect();
        serde_json::to_value(WireRequest {
            model: &self.config.model,
            messages,
            temperature: req.temperature,
            max_tokens: req.max_tokens,
            stream: false,
        })
        .expect("wire request serializes")
    }
}

impl Provider for HttpProvider {
    fn id(&self) -> &str {
        "http"
    }

    fn complete_text(&self, req: &ChatRequest) -> Result<(String, TokenUsage), GatewayError> {
        let mut builder = self.client.post(self.config.endpoint()).json(&self.wire_body(req));
        if let Some(key) = &self.config.api_key {
            builder = builder.bearer_auth(key);
        }
        let response = builder.send().map_err(|e| GatewayError::Transport(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            let body = response.text().unwrap_or_default();
            return Err(GatewayError::Transport(format!("http {status}: {body}")));
        }
        let wire: WireResponse =
            response.json().map_err(|e| GatewayError::Transport(e.to_string()))?;
        let text = wire
            .choices
            .first()
            .and_then(|c| c.message.content.clone())
            .ok_or_else(|| GatewayError::Transport("no completion choices".into()))?;
        let usage = wire.usage.unwrap_or_default();
        Ok((
            text,
            TokenUsage {
                prompt_tokens: usage.prompt_tokens,
                completion_tokens: usage.completion_tokens,
                total_tokens: usage.total_tokens,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::ChatMessage;

    #[test]
    fn wire_body_shape() {
        let provider = HttpProvider::new(HttpConfig {
            url: "http://localhost:9/v1".into(),
            model: "test-model".into(),
            api_key: None,
            timeout: Duration::from_secs(1),
        })
        .unwrap();
        let req = ChatRequest::new(vec![
            ChatMessage::system("be brief"),
            ChatMessage::user("hello"),
        ]);
        let body = provider.wire_body(&req);
        assert_eq!(body["model"], "test-model");
        assert_eq!(body["messages"][0]["role"], "system");
        assert_eq!(body["messages"][1]["content"], "hello");
        assert_eq!(body["stream"], false);
    }

    #[test]
    fn endpoint_join() {
        let cfg = HttpConfig {
            url: "http://host/v1/".into(),
            model: "m".into(),
            api_key: None,
            timeout: Duration::from_secs(1),
        };
        assert_eq!(cfg.endpoint(), "http://host/v1/chat/completions");
        let cfg = HttpConfig { url: "http://host/v1/chat/completions".into(), ..cfg };
        assert_eq!(cfg.endpoint(), "http://host/v1/chat/completions");
    }
}
