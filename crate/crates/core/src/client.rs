//! Text-completion clients behind one blocking trait: an HTTP client for
//! OpenAI-style endpoints, deterministic mock clients for dry runs, and a
//! transcript layer that records completions and replays them byte-for-byte.
//!
//! API keys are read from the environment at construction and held only in
//! memory; nothing here writes a credential to disk.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::encoding::SchemeKind;
use crate::graph::Answer;
use crate::task::{majority_baseline, render_answer, TaskError, TaskInstance, TaskKind};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("endpoint url is empty")]
    EmptyUrl,
    #[error("api key variable {0} is not set")]
    MissingApiKey(String),
    #[error("endpoint returned {status}: {body}")]
    Endpoint { status: u16, body: String },
    #[error("malformed endpoint response: {0}")]
    BadResponse(String),
    #[error("request failed after {attempts} attempts: {last}")]
    RetriesExhausted { attempts: u32, last: String },
    #[error("model {model} has no transcript entry for prompt {hash}")]
    MissingPrompt { model: String, hash: String },
    #[error("unknown instance {0}")]
    UnknownInstance(String),
    #[error("mock client needs case metadata")]
    MissingMeta,
    #[error("{0}")]
    Task(#[from] TaskError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

/// Which evaluation case a request belongs to; mock clients answer from it.
#[derive(Clone, Copy, Debug)]
pub struct CaseMeta<'a> {
    pub instance_id: &'a str,
    pub scheme: SchemeKind,
}

#[derive(Clone, Copy, Debug)]
pub struct CompletionRequest<'a> {
    pub prompt: &'a str,
    pub meta: Option<CaseMeta<'a>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Completion {
    pub text: String,
    /// Requests issued to obtain this completion (1 unless retried).
    pub attempts: u32,
}

/// A blocking text-completion backend.
pub trait TextCompletion: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, ClientError>;
    fn model_name(&self) -> &str;
}

impl TextCompletion for Box<dyn TextCompletion> {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, ClientError> {
        (**self).complete(request)
    }

    fn model_name(&self) -> &str {
        (**self).model_name()
    }
}

/// Hex SHA-256 of a prompt; the transcript key.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// One completed request as stored in `transcript.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletionRecord {
    pub prompt_hash: String,
    pub model: String,
    pub attempts: u32,
    pub latency_ms: u64,
    pub response: String,
}

struct TranscriptState {
    records: HashMap<(String, String), CompletionRecord>,
    writer: BufWriter<File>,
}

/// Append-only completion log keyed by (model, prompt hash).
pub struct Transcript {
    state: Mutex<TranscriptState>,
}

impl Transcript {
    /// Opens a transcript for writing; with `resume`, existing records are
    /// preloaded and served as cache hits instead of being re-requested.
    pub fn open(path: &Path, resume: bool) -> Result<Transcript, ClientError> {
        let mut records = HashMap::new();
        if resume && path.exists() {
            for record in read_transcript(path)? {
                records.insert((record.model.clone(), record.prompt_hash.clone()), record);
            }
        }
        let file = if resume {
            OpenOptions::new().create(true).append(true).open(path)?
        } else {
            File::create(path)?
        };
        Ok(Transcript {
            state: Mutex::new(TranscriptState { records, writer: BufWriter::new(file) }),
        })
    }

    pub fn get(&self, model: &str, hash: &str) -> Option<CompletionRecord> {
        let state = self.state.lock().unwrap();
        state.records.get(&(model.to_string(), hash.to_string())).cloned()
    }

    /// Stores a record, or returns the already-stored one for the same key,
    /// so each (model, prompt) pair is written at most once.
    pub fn put(&self, record: CompletionRecord) -> Result<CompletionRecord, ClientError> {
        let mut state = self.state.lock().unwrap();
        let key = (record.model.clone(), record.prompt_hash.clone());
        if let Some(existing) = state.records.get(&key) {
            return Ok(existing.clone());
        }
        let line = serde_json::to_string(&record)?;
        state.writer.write_all(line.as_bytes())?;
        state.writer.write_all(b"\n")?;
        state.writer.flush()?;
        state.records.insert(key, record.clone());
        Ok(record)
    }

    pub fn len(&self) -> usize {
        self.state.lock().unwrap().records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reads every record in a transcript file.
pub fn read_transcript(path: &Path) -> Result<Vec<CompletionRecord>, ClientError> {
    let mut records = Vec::new();
    for line in BufReader::new(File::open(path)?).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str(&line)?);
    }
    Ok(records)
}

/// Wraps a live client, serving repeats from the transcript and logging the
/// rest, so an interrupted run resumes without re-requesting anything.
pub struct RecordingClient<C> {
    inner: C,
    transcript: std::sync::Arc<Transcript>,
}

impl<C: TextCompletion> RecordingClient<C> {
    pub fn new(inner: C, transcript: std::sync::Arc<Transcript>) -> Self {
        RecordingClient { inner, transcript }
    }
}

impl<C: TextCompletion> TextCompletion for RecordingClient<C> {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, ClientError> {
        let hash = prompt_hash(request.prompt);
        if let Some(record) = self.transcript.get(self.inner.model_name(), &hash) {
            return Ok(Completion { text: record.response, attempts: record.attempts });
        }
        let start = Instant::now();
        let completion = self.inner.complete(request)?;
        let record = self.transcript.put(CompletionRecord {
            prompt_hash: hash,
            model: self.inner.model_name().to_string(),
            attempts: completion.attempts,
            latency_ms: start.elapsed().as_millis() as u64,
            response: completion.text,
        })?;
        Ok(Completion { text: record.response, attempts: record.attempts })
    }

    fn model_name(&self) -> &str {
        self.inner.model_name()
    }
}

/// Serves completions verbatim from a recorded transcript; a prompt the
/// transcript has never seen is an error, never a fresh request.
pub struct ReplayClient {
    model: String,
    responses: HashMap<String, String>,
}

impl ReplayClient {
    pub fn from_transcript(path: &Path, model: &str) -> Result<ReplayClient, ClientError> {
        let mut responses = HashMap::new();
        for record in read_transcript(path)? {
            if record.model == model {
                responses.insert(record.prompt_hash, record.response);
            }
        }
        Ok(ReplayClient { model: model.to_string(), responses })
    }
}

impl TextCompletion for ReplayClient {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, ClientError> {
        let hash = prompt_hash(request.prompt);
        match self.responses.get(&hash) {
            Some(text) => Ok(Completion { text: text.clone(), attempts: 1 }),
            None => Err(ClientError::MissingPrompt { model: self.model.clone(), hash }),
        }
    }

    fn model_name(&self) -> &str {
        &self.model
    }
}

/// Mock that answers every case with its golden answer; end-to-end runs
/// through it must score 100%.
pub struct OracleClient {
    instances: HashMap<String, TaskInstance>,
}

impl OracleClient {
    pub fn new(instances: impl IntoIterator<Item = TaskInstance>) -> OracleClient {
        OracleClient {
            instances: instances.into_iter().map(|i| (i.id.clone(), i)).collect(),
        }
    }
}

impl TextCompletion for OracleClient {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, ClientError> {
        let meta = request.meta.ok_or(ClientError::MissingMeta)?;
        let instance = self
            .instances
            .get(meta.instance_id)
            .ok_or_else(|| ClientError::UnknownInstance(meta.instance_id.to_string()))?;
        let text = render_answer(&instance.golden, meta.scheme)?;
        Ok(Completion { text, attempts: 1 })
    }

    fn model_name(&self) -> &str {
        "mock-oracle"
    }
}

/// Mock that answers every case with its task's most common golden answer,
/// reproducing the majority baseline.
pub struct MajorityClient {
    answers: HashMap<TaskKind, Answer>,
}

impl MajorityClient {
    pub fn from_instances(instances: &[TaskInstance]) -> MajorityClient {
        let mut by_kind: HashMap<TaskKind, Vec<Answer>> = HashMap::new();
        for instance in instances {
            by_kind.entry(instance.kind).or_default().push(instance.golden.clone());
        }
        let answers = by_kind
            .into_iter()
            .filter_map(|(kind, goldens)| {
                majority_baseline(&goldens).map(|(answer, _)| (kind, answer))
            })
            .collect();
        MajorityClient { answers }
    }
}

impl TextCompletion for MajorityClient {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, ClientError> {
        let meta = request.meta.ok_or(ClientError::MissingMeta)?;
        let kind = crate::task::instance_kind(meta.instance_id)
            .ok_or_else(|| ClientError::UnknownInstance(meta.instance_id.to_string()))?;
        let answer = self
            .answers
            .get(&kind)
            .ok_or_else(|| ClientError::UnknownInstance(meta.instance_id.to_string()))?;
        let text = render_answer(answer, meta.scheme)?;
        Ok(Completion { text, attempts: 1 })
    }

    fn model_name(&self) -> &str {
        "mock-majority"
    }
}

/// Connection settings for an OpenAI-style completion endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub url: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub timeout_secs: u64,
    /// Concurrent request cap.
    pub max_in_flight: usize,
    /// Extra attempts after the first, on 429/5xx/transport errors only.
    pub retries: u32,
    pub backoff_ms: u64,
    /// Environment variable holding the bearer token; never written to disk.
    pub api_key_env: Option<String>,
    /// Send a chat-style body (`messages`) instead of a `prompt` body.
    pub chat: bool,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            url: String::new(),
            model: "default".to_string(),
            temperature: 0.0,
            max_tokens: 512,
            timeout_secs: 60,
            max_in_flight: 4,
            retries: 3,
            backoff_ms: 500,
            api_key_env: None,
            chat: false,
        }
    }
}

struct Semaphore {
    permits: Mutex<usize>,
    available: Condvar,
}

struct Permit<'a>(&'a Semaphore);

impl Semaphore {
    fn new(permits: usize) -> Semaphore {
        Semaphore { permits: Mutex::new(permits.max(1)), available: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut permits = self.permits.lock().unwrap();
        while *permits == 0 {
            permits = self.available.wait(permits).unwrap();
        }
        *permits -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.permits.lock().unwrap() += 1;
        self.0.available.notify_one();
    }
}

enum Attempt {
    Retry(String),
    Fatal(ClientError),
}

/// Blocking client for an OpenAI-style HTTP endpoint with bounded
/// concurrency and exponential backoff.
pub struct HttpClient {
    config: EndpointConfig,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
    gate: Semaphore,
}

impl HttpClient {
    pub fn new(config: EndpointConfig) -> Result<HttpClient, ClientError> {
        if config.url.is_empty() {
            return Err(ClientError::EmptyUrl);
        }
        let api_key = match &config.api_key_env {
            Some(var) => Some(
                std::env::var(var).map_err(|_| ClientError::MissingApiKey(var.clone()))?,
            ),
            None => None,
        };
        let http = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| ClientError::BadResponse(e.to_string()))?;
        let gate = Semaphore::new(config.max_in_flight);
        Ok(HttpClient { config, api_key, http, gate })
    }

    fn request_body(&self, prompt: &str) -> serde_json::Value {
        if self.config.chat {
            serde_json::json!({
                "model": self.config.model,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": self.config.temperature,
                "max_tokens": self.config.max_tokens,
            })
        } else {
            serde_json::json!({
                "model": self.config.model,
                "prompt": prompt,
                "temperature": self.config.temperature,
                "max_tokens": self.config.max_tokens,
            })
        }
    }

    fn extract_text(&self, value: &serde_json::Value) -> Option<String> {
        let text = if self.config.chat {
            value.get("choices")?.get(0)?.get("message")?.get("content")?
        } else {
            value
                .get("text")
                .or_else(|| value.get("choices").and_then(|c| c.get(0)).and_then(|c| c.get("text")))?
        };
        text.as_str().map(str::to_string)
    }

    fn try_once(&self, body: &serde_json::Value) -> Result<String, Attempt> {
        let mut request = self.http.post(&self.config.url).json(body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let response = request.send().map_err(|e| Attempt::Retry(e.to_string()))?;
        let status = response.status();
        let text = response.text().map_err(|e| Attempt::Retry(e.to_string()))?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Attempt::Retry(format!("{}: {}", status.as_u16(), text.trim())));
        }
        if !status.is_success() {
            return Err(Attempt::Fatal(ClientError::Endpoint {
                status: status.as_u16(),
                body: text.trim().to_string(),
            }));
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Attempt::Fatal(ClientError::BadResponse(e.to_string())))?;
        self.extract_text(&value)
            .ok_or_else(|| Attempt::Fatal(ClientError::BadResponse(format!("no text in {text}"))))
    }
}

impl TextCompletion for HttpClient {
    fn complete(&self, request: &CompletionRequest) -> Result<Completion, ClientError> {
        let _permit = self.gate.acquire();
        let body = self.request_body(request.prompt);
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut last = String::new();
        let attempts = self.config.retries + 1;
        for attempt in 1..=attempts {
            match self.try_once(&body) {
                Ok(text) => return Ok(Completion { text, attempts: attempt }),
                Err(Attempt::Fatal(err)) => return Err(err),
                Err(Attempt::Retry(msg)) => {
                    last = msg;
                    if attempt < attempts {
                        std::thread::sleep(delay);
                        delay *= 2;
                    }
                }
            }
        }
        Err(ClientError::RetriesExhausted { attempts, last })
    }

    fn model_name(&self) -> &str {
        &self.config.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::example_graph;
    use crate::task::{sample_instance, QuestionStyle};
    use std::io::Read;
    use std::net::TcpListener;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    struct CountingClient {
        calls: AtomicUsize,
    }

    impl TextCompletion for CountingClient {
        fn complete(&self, _request: &CompletionRequest) -> Result<Completion, ClientError> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            Ok(Completion { text: format!("call {n}"), attempts: 1 })
        }

        fn model_name(&self) -> &str {
            "counting"
        }
    }

    fn instances() -> Vec<TaskInstance> {
        let g = example_graph();
        TaskKind::ALL
            .into_iter()
            .map(|kind| sample_instance(kind, "g-0", &g, QuestionStyle::Graph, 7).unwrap())
            .collect()
    }

    #[test]
    fn prompt_hash_is_stable_hex_sha256() {
        assert_eq!(
            prompt_hash("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn recording_client_serves_repeats_from_transcript() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("transcript.jsonl");
        let transcript = Arc::new(Transcript::open(&path, false).unwrap());
        let client = RecordingClient::new(
            CountingClient { calls: AtomicUsize::new(0) },
            Arc::clone(&transcript),
        );
        let request = CompletionRequest { prompt: "p1", meta: None };
        let first = client.complete(&request).unwrap();
        let second = client.complete(&request).unwrap();
        assert_eq!(first.text, "call 0");
        assert_eq!(second.text, "call 0");
        client.complete(&CompletionRequest { prompt: "p2", meta: None }).unwrap();
        assert_eq!(transcript.len(), 2);
        assert_eq!(read_transcript(&path).unwrap().len(), 2);
    }

    #[test]
    fn resume_preloads_and_replay_is_verbatim() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("transcript.jsonl");
        {
            let transcript = Arc::new(Transcript::open(&path, false).unwrap());
            let client = RecordingClient::new(
                CountingClient { calls: AtomicUsize::new(0) },
                transcript,
            );
            client.complete(&CompletionRequest { prompt: "p1", meta: None }).unwrap();
        }
        let transcript = Arc::new(Transcript::open(&path, true).unwrap());
        let client = RecordingClient::new(
            CountingClient { calls: AtomicUsize::new(100) },
            transcript,
        );
        let hit = client.complete(&CompletionRequest { prompt: "p1", meta: None }).unwrap();
        assert_eq!(hit.text, "call 0");
        let miss = client.complete(&CompletionRequest { prompt: "p3", meta: None }).unwrap();
        assert_eq!(miss.text, "call 100");

        let replay = ReplayClient::from_transcript(&path, "counting").unwrap();
        assert_eq!(
            replay.complete(&CompletionRequest { prompt: "p1", meta: None }).unwrap().text,
            "call 0"
        );
        let err = replay.complete(&CompletionRequest { prompt: "p9", meta: None }).unwrap_err();
        assert!(matches!(err, ClientError::MissingPrompt { .. }));
        assert!(
            ReplayClient::from_transcript(&path, "other")
                .unwrap()
                .complete(&CompletionRequest { prompt: "p1", meta: None })
                .is_err(),
            "replay must filter by model"
        );
    }

    #[test]
    fn oracle_client_renders_goldens_per_scheme() {
        let instances = instances();
        let client = OracleClient::new(instances.clone());
        for instance in &instances {
            let meta = CaseMeta { instance_id: &instance.id, scheme: SchemeKind::Friendship };
            let request = CompletionRequest { prompt: "", meta: Some(meta) };
            let completion = client.complete(&request).unwrap();
            assert_eq!(
                completion.text,
                render_answer(&instance.golden, SchemeKind::Friendship).unwrap()
            );
        }
        let missing = CompletionRequest {
            prompt: "",
            meta: Some(CaseMeta { instance_id: "cycle_check-nope", scheme: SchemeKind::Adjacency }),
        };
        assert!(matches!(client.complete(&missing), Err(ClientError::UnknownInstance(_))));
    }

    #[test]
    fn majority_client_answers_by_task_kind() {
        let goldens = [true, true, false]
            .into_iter()
            .enumerate()
            .map(|(i, b)| TaskInstance {
                id: format!("cycle_check-g{i}"),
                graph_id: format!("g{i}"),
                kind: TaskKind::CycleCheck,
                params: crate::task::TaskParams::None,
                style: QuestionStyle::Graph,
                golden: Answer::Bool(b),
            })
            .collect::<Vec<_>>();
        let client = MajorityClient::from_instances(&goldens);
        let request = CompletionRequest {
            prompt: "",
            meta: Some(CaseMeta { instance_id: "cycle_check-g2", scheme: SchemeKind::Adjacency }),
        };
        assert_eq!(client.complete(&request).unwrap().text, "Yes.");
    }

    fn find_subslice(haystack: &[u8], needle: &[u8]) -> Option<usize> {
        haystack.windows(needle.len()).position(|w| w == needle)
    }

    /// One-shot HTTP server: answers each scripted response on its own
    /// connection, returning the raw requests it saw.
    fn serve(responses: Vec<(u16, String)>) -> (String, std::thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let handle = std::thread::spawn(move || {
            let mut seen = Vec::new();
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut data = Vec::new();
                let mut buf = [0u8; 4096];
                loop {
                    let k = stream.read(&mut buf).unwrap();
                    data.extend_from_slice(&buf[..k]);
                    if let Some(pos) = find_subslice(&data, b"\r\n\r\n") {
                        let headers = String::from_utf8_lossy(&data[..pos]).to_lowercase();
                        let length: usize = headers
                            .lines()
                            .find_map(|l| l.strip_prefix("content-length:"))
                            .map(|v| v.trim().parse().unwrap())
                            .unwrap_or(0);
                        if data.len() >= pos + 4 + length {
                            break;
                        }
                    }
                }
                seen.push(String::from_utf8_lossy(&data).to_string());
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\n\
                     content-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
            seen
        });
        (format!("http://{addr}/v1/completions"), handle)
    }

    fn test_config(url: String) -> EndpointConfig {
        EndpointConfig {
            url,
            model: "test-model".to_string(),
            retries: 2,
            backoff_ms: 1,
            timeout_secs: 5,
            ..EndpointConfig::default()
        }
    }

    #[test]
    fn http_client_retries_server_errors_then_succeeds() {
        let (url, handle) = serve(vec![
            (500, "boom".to_string()),
            (200, r#"{"text": "The answer is 4."}"#.to_string()),
        ]);
        let client = HttpClient::new(test_config(url)).unwrap();
        let completion =
            client.complete(&CompletionRequest { prompt: "Q: how many?", meta: None }).unwrap();
        assert_eq!(completion.text, "The answer is 4.");
        assert_eq!(completion.attempts, 2);
        let seen = handle.join().unwrap();
        assert_eq!(seen.len(), 2);
        assert!(seen[1].contains(r#""prompt":"Q: how many?""#));
    }

    #[test]
    fn http_client_fails_fast_on_client_errors() {
        let (url, handle) = serve(vec![(400, "bad request".to_string())]);
        let client = HttpClient::new(test_config(url)).unwrap();
        let err = client.complete(&CompletionRequest { prompt: "p", meta: None }).unwrap_err();
        assert!(matches!(err, ClientError::Endpoint { status: 400, .. }));
        handle.join().unwrap();
    }

    #[test]
    fn http_client_sends_chat_bodies_and_bearer_tokens() {
        let (url, handle) = serve(vec![(
            200,
            r#"{"choices": [{"message": {"content": "Yes."}}]}"#.to_string(),
        )]);
        std::env::set_var("GRAPHEVAL_TEST_KEY", "sk-test-123");
        let config = EndpointConfig {
            chat: true,
            api_key_env: Some("GRAPHEVAL_TEST_KEY".to_string()),
            ..test_config(url)
        };
        let client = HttpClient::new(config).unwrap();
        let completion = client.complete(&CompletionRequest { prompt: "hi", meta: None }).unwrap();
        assert_eq!(completion.text, "Yes.");
        let seen = handle.join().unwrap().remove(0).to_lowercase();
        assert!(seen.contains("authorization: bearer sk-test-123"));
        assert!(seen.contains(r#""messages""#));
    }

    #[test]
    fn http_client_requires_configured_key_to_be_present() {
        let config = EndpointConfig {
            url: "http://localhost:1/x".to_string(),
            api_key_env: Some("GRAPHEVAL_ABSENT_KEY".to_string()),
            ..EndpointConfig::default()
        };
        assert!(matches!(
            HttpClient::new(config).err().unwrap(),
            ClientError::MissingApiKey(v) if v == "GRAPHEVAL_ABSENT_KEY"
        ));
        assert!(matches!(
            HttpClient::new(EndpointConfig::default()).err().unwrap(),
            ClientError::EmptyUrl
        ));
    }
}
