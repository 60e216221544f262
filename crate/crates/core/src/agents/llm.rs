//! ReAct-style agent over an OpenAI-compatible chat-completions endpoint.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use super::{parse_decision, Agent, AgentDecision, AgentError, StepContext};
use crate::actions::{EpisodeConfig, Verb};
use crate::goals::TrajectoryStep;

/// Environment variable holding the bearer token unless configured otherwise.
pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";
/// History budget, in estimated tokens (characters / 4).
pub const DEFAULT_HISTORY_TOKENS: usize = 8000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: &str, content: impl Into<String>) -> Self {
        Self { role: role.into(), content: content.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChatError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("HTTP {code}: {body}")]
    Status { code: u16, body: String },
    #[error("unexpected response: {0}")]
    BadResponse(String),
}

pub trait ChatClient: Send + Sync {
    /// Returns the assistant message content.
    fn complete(&self, req: &ChatRequest) -> Result<String, ChatError>;
}

/// Blocking HTTP client with a per-call timeout and bounded retries.
///
/// Transport errors, 429 and 5xx are retried with exponential backoff.
/// The API key is read from the environment when the client is built.
pub struct HttpChatClient {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
    retries: u32,
    backoff: Duration,
}

impl HttpChatClient {
    pub fn new(endpoint: &str, api_key_env: &str, timeout: Duration, retries: u32) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            agent,
            endpoint: endpoint.to_string(),
            api_key: std::env::var(api_key_env).ok().filter(|k| !k.is_empty()),
            retries,
            backoff: Duration::from_millis(250),
        }
    }

    pub fn from_config(c: &LlmConfig) -> Self {
        Self::new(&c.endpoint, &c.api_key_env, Duration::from_secs(c.timeout_secs), c.http_retries)
    }

    pub fn with_backoff(mut self, d: Duration) -> Self {
        self.backoff = d;
        self
    }

    fn attempt(&self, body: &str) -> Result<String, (ChatError, bool)> {
        let mut req = self.agent.post(&self.endpoint).header("Content-Type", "application/json");
        if let Some(k) = &self.api_key {
            req = req.header("Authorization", format!("Bearer {k}"));
        }
        let mut resp = req
            .send(body)
            .map_err(|e| (ChatError::Transport(e.to_string()), true))?;
        let code = resp.status().as_u16();
        let text = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| (ChatError::Transport(e.to_string()), true))?;
        if !(200..300).contains(&code) {
            let retry = code == 429 || code >= 500;
            return Err((ChatError::Status { code, body: text }, retry));
        }
        let v: Value = serde_json::from_str(&text).map_err(|e| (ChatError::BadResponse(e.to_string()), false))?;
        v.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| (ChatError::BadResponse("no choices[0].message.content".into()), false))
    }
}

impl ChatClient for HttpChatClient {
    fn complete(&self, req: &ChatRequest) -> Result<String, ChatError> {
        let body = json!({
            "model": req.model,
            "messages": req.messages,
            "temperature": req.temperature,
        })
        .to_string();
        let mut wait = self.backoff;
        let mut tries = 0;
        loop {
            match self.attempt(&body) {
                Ok(s) => return Ok(s),
                Err((e, retry)) if retry && tries < self.retries => {
                    log::warn!("chat request failed ({e}); retrying in {wait:?}");
                    std::thread::sleep(wait);
                    wait = (wait * 2).min(Duration::from_secs(10));
                    tries += 1;
                }
                Err((e, _)) => return Err(e),
            }
        }
    }
}

/// Prompt structure variants; the text lives in `templates/`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptTemplate {
    #[default]
    React,
    Preact,
    Stateact,
}

impl PromptTemplate {
    pub fn text(self) -> &'static str {
        match self {
            PromptTemplate::React => include_str!("../../templates/react.txt"),
            PromptTemplate::Preact => include_str!("../../templates/preact.txt"),
            PromptTemplate::Stateact => include_str!("../../templates/stateact.txt"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    /// Full chat-completions URL.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    /// Re-prompts after an unusable reply before the step is burned.
    pub max_retries: u32,
    pub template: PromptTemplate,
    /// Overrides `template` with a file in the same format.
    pub template_file: Option<PathBuf>,
    pub api_key_env: String,
    pub timeout_secs: u64,
    pub http_retries: u32,
    pub history_tokens: usize,
}

impl Default for LlmConfig {
    fn default() -> Self {
        Self {
            endpoint: "http://127.0.0.1:8000/v1/chat/completions".into(),
            model: "gpt-4o-mini".into(),
            temperature: 0.0,
            max_retries: 2,
            template: PromptTemplate::React,
            template_file: None,
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            timeout_secs: 60,
            http_retries: 3,
            history_tokens: DEFAULT_HISTORY_TOKENS,
        }
    }
}

fn estimate_tokens(s: &str) -> usize {
    s.chars().count().div_ceil(4)
}

fn split_template(t: &str) -> (&str, &str) {
    let body = t.split_once("[system]").map_or(t, |(_, b)| b);
    match body.split_once("[user]") {
        Some((sys, user)) => (sys.trim(), user.trim()),
        None => ("", body.trim()),
    }
}

fn verb_list(fo: bool) -> String {
    Verb::ALL
        .iter()
        .filter(|v| fo || **v != Verb::FindObject)
        .map(|v| {
            if v.takes_secondary() {
                format!("- {v}(object, receptacle)")
            } else {
                format!("- {v}(object)")
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn history_line(s: &TrajectoryStep) -> String {
    format!("Step {}: {} -> {}", s.step, s.action, s.feedback)
}

/// Fills a template. History is dropped oldest-first to fit `history_tokens`.
pub fn build_messages(
    template: &str,
    instruction: &str,
    observation: &str,
    history: &[TrajectoryStep],
    full_observability: bool,
    history_tokens: usize,
) -> Vec<ChatMessage> {
    let (sys, user) = split_template(template);
    let fill = |t: &str, hist: &str| {
        t.replace("{verbs}", &verb_list(full_observability))
            .replace("{instruction}", instruction)
            .replace("{observation}", observation.trim_end())
            .replace("{history}", hist)
    };
    let fixed = estimate_tokens(&fill(sys, "")) + estimate_tokens(&fill(user, ""));
    let mut room = history_tokens.saturating_sub(fixed);
    let mut kept: Vec<String> = Vec::new();
    for s in history.iter().rev() {
        let line = history_line(s);
        let cost = estimate_tokens(&line) + 1;
        if cost > room {
            break;
        }
        room -= cost;
        kept.push(line);
    }
    kept.reverse();
    let dropped = history.len() - kept.len();
    let hist = match (history.is_empty(), dropped) {
        (true, _) => "(no actions yet)".to_string(),
        (false, 0) => kept.join("\n"),
        (false, n) => format!("({n} earlier steps omitted)\n{}", kept.join("\n")),
    };
    let mut out = Vec::new();
    if !sys.is_empty() {
        out.push(ChatMessage::new("system", fill(sys, &hist)));
    }
    out.push(ChatMessage::new("user", fill(user, &hist)));
    out
}

pub struct LlmAgent {
    client: Arc<dyn ChatClient>,
    config: LlmConfig,
    template: String,
    full_observability: bool,
}

impl LlmAgent {
    /// Fails if `config.template_file` is set but unreadable.
    pub fn new(client: Arc<dyn ChatClient>, config: LlmConfig, cfg: &EpisodeConfig) -> Result<Self, AgentError> {
        let template = match &config.template_file {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| AgentError::Setup(format!("template {}: {e}", p.display())))?,
            None => config.template.text().to_string(),
        };
        Ok(Self { client, config, template, full_observability: cfg.full_observability })
    }
}

impl Agent for LlmAgent {
    fn next_decision(&mut self, ctx: &StepContext<'_>) -> Result<AgentDecision, AgentError> {
        let mut messages = build_messages(
            &self.template,
            ctx.instruction,
            ctx.observation,
            ctx.history,
            self.full_observability,
            self.config.history_tokens,
        );
        let mut last = (String::new(), String::new());
        for _ in 0..=self.config.max_retries {
            let req = ChatRequest {
                model: self.config.model.clone(),
                messages: messages.clone(),
                temperature: self.config.temperature,
            };
            let raw = self.client.complete(&req).map_err(|e| AgentError::Endpoint(e.to_string()))?;
            match parse_decision(&raw) {
                Ok(d) => return Ok(d),
                Err(e) => {
                    log::debug!("unusable reply: {e}");
                    messages.push(ChatMessage::new("assistant", raw.clone()));
                    messages.push(ChatMessage::new(
                        "user",
                        format!(
                            "Your reply could not be used: {e}. Answer with a single JSON object with the keys \"think\" and \"act\"."
                        ),
                    ));
                    last = (e.to_string(), raw);
                }
            }
        }
        Err(AgentError::MalformedModelOutput { message: last.0, raw: last.1 })
    }
}
