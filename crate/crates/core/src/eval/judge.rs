//! Binary semantic judgments from an external chat-completion judge.
//!
//! The judge sees the question, the ground truth and the prediction and must
//! reply with exactly `0` or `1`. Anything else is recorded as an abstention.
//!
//! # HTTP wire format
//!
//! Request (`POST $SCORESYNTH_JUDGE_URL`, bearer `$SCORESYNTH_JUDGE_API_KEY`):
//!
//! ```text
//! {"model":"<model>","temperature":0,"messages":[{"role":"system","content":"…"},{"role":"user","content":"<prompt>"}]}
//! ```
//!
//! Response: `{"choices":[{"message":{"content":"1"}}]}`. Status 429 and 5xx
//! are retried with exponential backoff; other failures are fatal.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qa::QaPair;

pub const ENV_URL: &str = "SCORESYNTH_JUDGE_URL";
pub const ENV_API_KEY: &str = "SCORESYNTH_JUDGE_API_KEY";
pub const ENV_MODEL: &str = "SCORESYNTH_JUDGE_MODEL";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JudgeError {
    #[error("transient judge failure: {0}")]
    Transient(String),
    #[error("judge request failed: {0}")]
    Fatal(String),
    #[error("judge unreachable after {attempts} attempts: {last}")]
    Unreachable { attempts: u32, last: String },
    #[error("judge configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Correct,
    Incorrect,
    Abstain,
}

impl Verdict {
    pub fn score(self) -> Option<u8> {
        match self {
            Verdict::Correct => Some(1),
            Verdict::Incorrect => Some(0),
            Verdict::Abstain => None,
        }
    }
}

/// Minimal chat-completion interface: one prompt in, one reply out.
pub trait JudgeClient: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<String, JudgeError>;
}

pub const SYSTEM_PROMPT: &str = "You grade answers to questions about printed music sheets. \
Reply with a single character: 1 if the prediction is semantically correct given the ground \
truth, 0 otherwise.";

const QUESTION_TAG: &str = "Question: ";
const TRUTH_TAG: &str = "Ground truth: ";
const PREDICTION_TAG: &str = "Prediction: ";

pub fn judge_prompt(question: &str, ground_truth: &str, prediction: &str) -> String {
    format!(
        "{SYSTEM_PROMPT}\n\n{QUESTION_TAG}{question}\n{TRUTH_TAG}{ground_truth}\n{PREDICTION_TAG}{prediction}"
    )
}

/// Strict verdict parsing: the trimmed reply must be `0` or `1`.
pub fn parse_verdict(reply: &str) -> Verdict {
    match reply.trim() {
        "1" => Verdict::Correct,
        "0" => Verdict::Incorrect,
        _ => Verdict::Abstain,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    pub fn delay(&self, attempt: u32) -> Duration {
        self.base_delay
            .saturating_mul(1u32 << attempt.min(16))
            .min(self.max_delay)
    }
}

fn complete_with_retry(
    client: &dyn JudgeClient,
    prompt: &str,
    policy: &RetryPolicy,
) -> Result<String, JudgeError> {
    let attempts = policy.max_attempts.max(1);
    let mut last = String::new();
    for attempt in 0..attempts {
        match client.complete(prompt) {
            Ok(reply) => return Ok(reply),
            Err(JudgeError::Transient(msg)) => {
                log::warn!("judge attempt {} failed: {msg}", attempt + 1);
                last = msg;
                if attempt + 1 < attempts {
                    std::thread::sleep(policy.delay(attempt));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Err(JudgeError::Unreachable { attempts, last })
}

/// One judgment with retries. An unparseable reply is an abstention, not an error.
pub fn judge_binary(
    client: &dyn JudgeClient,
    qa: &QaPair,
    prediction: &str,
    policy: &RetryPolicy,
) -> Result<Verdict, JudgeError> {
    let prompt = judge_prompt(&qa.question, &qa.answer, prediction);
    complete_with_retry(client, &prompt, policy).map(|r| parse_verdict(&r))
}

/// Parallel judging with a cap on in-flight requests and a minimum interval
/// between request starts.
pub struct JudgePool {
    client: Arc<dyn JudgeClient>,
    pub policy: RetryPolicy,
    pub max_in_flight: usize,
    pub min_interval: Duration,
    next_slot: Mutex<Option<Instant>>,
}

impl JudgePool {
    pub fn new(client: Arc<dyn JudgeClient>) -> Self {
        JudgePool {
            client,
            policy: RetryPolicy::default(),
            max_in_flight: 4,
            min_interval: Duration::ZERO,
            next_slot: Mutex::new(None),
        }
    }

    pub fn with_policy(mut self, policy: RetryPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_max_in_flight(mut self, n: usize) -> Self {
        self.max_in_flight = n.max(1);
        self
    }

    pub fn with_min_interval(mut self, d: Duration) -> Self {
        self.min_interval = d;
        self
    }

    fn wait_for_slot(&self) {
        let wait = {
            let mut slot = self.next_slot.lock().unwrap();
            let now = Instant::now();
            let start = slot.map_or(now, |s| s.max(now));
            *slot = Some(start + self.min_interval);
            start - now
        };
        if !wait.is_zero() {
            std::thread::sleep(wait);
        }
    }

    /// Judges every `(pair, prediction)`; results keep input order. Stops at
    /// the first non-retryable error.
    pub fn judge_all(&self, items: &[(&QaPair, &str)]) -> Result<Vec<Verdict>, JudgeError> {
        let next = AtomicUsize::new(0);
        let failed = AtomicBool::new(false);
        let results: Mutex<Vec<Option<Verdict>>> = Mutex::new(vec![None; items.len()]);
        let error: Mutex<Option<JudgeError>> = Mutex::new(None);
        let workers = self.max_in_flight.min(items.len()).max(1);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    if failed.load(Ordering::SeqCst) {
                        break;
                    }
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    let Some(&(qa, pred)) = items.get(i) else { break };
                    self.wait_for_slot();
                    match judge_binary(self.client.as_ref(), qa, pred, &self.policy) {
                        Ok(v) => results.lock().unwrap()[i] = Some(v),
                        Err(e) => {
                            failed.store(true, Ordering::SeqCst);
                            error.lock().unwrap().get_or_insert(e);
                            break;
                        }
                    }
                });
            }
        });
        if let Some(e) = error.into_inner().unwrap() {
            return Err(e);
        }
        Ok(results
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|v| v.expect("every item judged"))
            .collect())
    }
}

fn normalize(s: &str) -> String {
    s.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Offline judge: `1` iff the prediction equals the ground truth up to case
/// and whitespace.
#[derive(Debug, Clone, Copy, Default)]
pub struct StubJudge;

impl JudgeClient for StubJudge {
    fn complete(&self, prompt: &str) -> Result<String, JudgeError> {
        let truth = prompt
            .lines()
            .find_map(|l| l.strip_prefix(TRUTH_TAG))
            .ok_or_else(|| JudgeError::Fatal("prompt lacks a ground truth".into()))?;
        let pred = prompt
            .split_once(&format!("\n{PREDICTION_TAG}"))
            .map(|(_, p)| p)
            .ok_or_else(|| JudgeError::Fatal("prompt lacks a prediction".into()))?;
        Ok(if normalize(truth) == normalize(pred) { "1" } else { "0" }.to_string())
    }
}

/// Always replies with the same text.
#[derive(Debug, Clone)]
pub struct FixedJudge(pub String);

impl JudgeClient for FixedJudge {
    fn complete(&self, _prompt: &str) -> Result<String, JudgeError> {
        Ok(self.0.clone())
    }
}

#[derive(Serialize)]
struct ChatMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    temperature: f32,
    messages: Vec<ChatMessage<'a>>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReply,
}

#[derive(Deserialize)]
struct ChatReply {
    content: Option<String>,
}

pub struct HttpJudge {
    url: String,
    api_key: Option<String>,
    model: String,
    client: reqwest::blocking::Client,
}

impl HttpJudge {
    pub fn new(url: impl Into<String>, api_key: Option<String>, model: impl Into<String>) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .expect("default HTTP client builds");
        HttpJudge {
            url: url.into(),
            api_key,
            model: model.into(),
            client,
        }
    }

    /// Reads endpoint, key and model from the environment.
    pub fn from_env() -> Result<Self, JudgeError> {
        let url = std::env::var(ENV_URL)
            .map_err(|_| JudgeError::Config(format!("{ENV_URL} is not set")))?;
        let key = std::env::var(ENV_API_KEY).ok();
        let model = std::env::var(ENV_MODEL).unwrap_or_else(|_| "gpt-4o".to_string());
        Ok(HttpJudge::new(url, key, model))
    }
}

impl JudgeClient for HttpJudge {
    fn complete(&self, prompt: &str) -> Result<String, JudgeError> {
        let body = ChatRequest {
            model: &self.model,
            temperature: 0.0,
            messages: vec![
                ChatMessage {
                    role: "system",
                    content: SYSTEM_PROMPT,
                },
                ChatMessage {
                    role: "user",
                    content: prompt,
                },
            ],
        };
        let mut req = self.client.post(&self.url).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| JudgeError::Transient(e.to_string()))?;
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(JudgeError::Transient(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(JudgeError::Fatal(format!("HTTP {status}")));
        }
        // A reply without usable content becomes an abstention downstream.
        let parsed: Option<ChatResponse> = resp.json().ok();
        Ok(parsed
            .and_then(|r| r.choices.into_iter().next())
            .and_then(|c| c.message.content)
            .unwrap_or_default())
    }
}
