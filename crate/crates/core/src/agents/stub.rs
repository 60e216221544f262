//! A minimal chat-completions server for hermetic tests and demos.
//!
//! Replies come from a script, in order; once it runs out, every further
//! request gets the fallback reply. Each request body is recorded.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::Duration;

use serde_json::{json, Value};

use crate::actions::Action;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StubReply {
    /// Becomes `choices[0].message.content`.
    Content(String),
    /// A bare HTTP error status with the given body.
    Status(u16, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordedRequest {
    pub path: String,
    pub authorization: Option<String>,
    pub body: Value,
}

/// `{"think": ..., "act": ...}` as a model would write it.
pub fn decision_json(think: &str, act: &str) -> String {
    json!({ "think": think, "act": act }).to_string()
}

struct Shared {
    script: Mutex<std::collections::VecDeque<StubReply>>,
    fallback: StubReply,
    requests: Mutex<Vec<RecordedRequest>>,
    stop: AtomicBool,
}

pub struct StubServer {
    addr: SocketAddr,
    shared: Arc<Shared>,
    handle: Option<JoinHandle<()>>,
}

impl StubServer {
    /// Listens on an ephemeral localhost port.
    pub fn start(script: Vec<StubReply>) -> io::Result<Self> {
        Self::start_on("127.0.0.1:0", script)
    }

    pub fn start_on(addr: &str, script: Vec<StubReply>) -> io::Result<Self> {
        let listener = TcpListener::bind(addr)?;
        let addr = listener.local_addr()?;
        let shared = Arc::new(Shared {
            script: Mutex::new(script.into()),
            fallback: StubReply::Content(decision_json("Nothing left to do.", "stop")),
            requests: Mutex::new(Vec::new()),
            stop: AtomicBool::new(false),
        });
        let worker = shared.clone();
        let handle = std::thread::spawn(move || {
            for stream in listener.incoming() {
                if worker.stop.load(Ordering::SeqCst) {
                    break;
                }
                if let Ok(s) = stream {
                    if let Err(e) = serve(&worker, s) {
                        log::debug!("stub connection error: {e}");
                    }
                }
            }
        });
        Ok(Self { addr, shared, handle: Some(handle) })
    }

    /// Replies that walk through `plan` and then stop.
    pub fn following(plan: &[Action]) -> io::Result<Self> {
        let script = plan
            .iter()
            .enumerate()
            .map(|(i, a)| StubReply::Content(decision_json(&format!("Step {} of the plan.", i + 1), &a.to_string())))
            .collect();
        Self::start(script)
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// The chat-completions URL to point a client at.
    pub fn url(&self) -> String {
        format!("http://{}/v1/chat/completions", self.addr)
    }

    pub fn requests(&self) -> Vec<RecordedRequest> {
        self.shared.requests.lock().unwrap().clone()
    }

    /// Blocks the calling thread until the process is killed.
    pub fn serve_forever(mut self) {
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

impl Drop for StubServer {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        let _ = TcpStream::connect(self.addr);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn serve(shared: &Shared, stream: TcpStream) -> io::Result<()> {
    stream.set_read_timeout(Some(Duration::from_secs(5)))?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut line = String::new();
    if reader.read_line(&mut line)? == 0 {
        return Ok(());
    }
    let path = line.split_whitespace().nth(1).unwrap_or("/").to_string();
    let mut len = 0usize;
    let mut authorization = None;
    loop {
        let mut h = String::new();
        if reader.read_line(&mut h)? == 0 || h.trim().is_empty() {
            break;
        }
        if let Some((name, value)) = h.split_once(':') {
            let value = value.trim();
            if name.eq_ignore_ascii_case("content-length") {
                len = value.parse().unwrap_or(0);
            } else if name.eq_ignore_ascii_case("authorization") {
                authorization = Some(value.to_string());
            }
        }
    }
    let mut body = vec![0u8; len];
    reader.read_exact(&mut body)?;
    let body: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
    shared.requests.lock().unwrap().push(RecordedRequest { path, authorization, body });

    let reply = shared.script.lock().unwrap().pop_front().unwrap_or_else(|| shared.fallback.clone());
    let (code, payload) = match reply {
        StubReply::Content(c) => (
            200,
            json!({
                "id": "stub",
                "object": "chat.completion",
                "choices": [{"index": 0, "message": {"role": "assistant", "content": c}, "finish_reason": "stop"}],
            })
            .to_string(),
        ),
        StubReply::Status(code, body) => (code, body),
    };
    let mut out = stream;
    write!(
        out,
        "HTTP/1.1 {code} {}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        if code == 200 { "OK" } else { "Error" },
        payload.len()
    )?;
    out.flush()
}
