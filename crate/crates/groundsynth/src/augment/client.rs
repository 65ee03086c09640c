//! Shared client for the description models.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use base64::Engine;
use serde::{Deserialize, Serialize};

use groundsynth_core::snapshot::{Attributes, ElementRecord};

use super::limit::{InFlight, TokenBucket};
use super::prompts::{condense_prompt, describe_prompt, DirectStyle};
use super::transport::{HttpTransport, Transport, TransportError, WireMessage, WireRequest, WireResponse};

/// Client settings. Temperature and other decoding parameters are left to the
/// service unless set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentConfig {
    pub endpoint: Option<String>,
    pub model_describe: String,
    pub model_condense: String,
    pub model_direct: String,
    pub mock: bool,
    /// Total tries per request, first one included.
    pub attempts: u32,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff_ms: u64,
    /// Token-bucket rate; `None` disables pacing.
    pub requests_per_sec: Option<f64>,
    pub max_in_flight: usize,
    pub temperature: Option<f64>,
    pub timeout_secs: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            endpoint: None,
            model_describe: "describe".into(),
            model_condense: "condense".into(),
            model_direct: "direct".into(),
            mock: false,
            attempts: 3,
            backoff_ms: 500,
            requests_per_sec: None,
            max_in_flight: 8,
            temperature: None,
            timeout_secs: 60,
        }
    }
}

impl AugmentConfig {
    /// Reads `AUG_ENDPOINT`, `AUG_MODEL_DESCRIBE`, `AUG_MODEL_CONDENSE`,
    /// `AUG_MODEL_DIRECT` and `AUG_MOCK`.
    pub fn from_env() -> Self {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup(get: impl Fn(&str) -> Option<String>) -> Self {
        let mut c = Self::default();
        c.apply_lookup(get);
        c
    }

    /// Overrides fields from the given variables where set.
    pub fn apply_lookup(&mut self, get: impl Fn(&str) -> Option<String>) {
        if let Some(v) = get("AUG_ENDPOINT").filter(|v| !v.is_empty()) {
            self.endpoint = Some(v);
        }
        for (key, slot) in [
            ("AUG_MODEL_DESCRIBE", &mut self.model_describe),
            ("AUG_MODEL_CONDENSE", &mut self.model_condense),
            ("AUG_MODEL_DIRECT", &mut self.model_direct),
        ] {
            if let Some(v) = get(key).filter(|v| !v.is_empty()) {
                *slot = v;
            }
        }
        if let Some(v) = get("AUG_MOCK") {
            self.mock = matches!(v.trim(), "1" | "true" | "yes");
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AugmentError {
    #[error("augmentation not configured: {0}")]
    Config(String),
    #[error("malformed augmentation request: {0}")]
    Request(String),
    #[error("remote service rejected request: {0}")]
    Remote(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestKind {
    DescribeCrop,
    Condense,
    DirectFree,
    DirectFunctional,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AugmentationRequest {
    pub kind: Option<RequestKind>,
    /// PNG bytes.
    pub image: Option<Vec<u8>>,
    pub attributes: Option<Attributes>,
    pub text: Option<String>,
}

impl AugmentationRequest {
    pub fn describe(crop_png: Vec<u8>, attributes: Attributes) -> Self {
        Self { kind: Some(RequestKind::DescribeCrop), image: Some(crop_png), attributes: Some(attributes), text: None }
    }

    pub fn condense(text: impl Into<String>) -> Self {
        Self { kind: Some(RequestKind::Condense), text: Some(text.into()), ..Default::default() }
    }

    pub fn direct(annotated_png: Vec<u8>, style: DirectStyle) -> Self {
        let kind = match style {
            DirectStyle::Free => RequestKind::DirectFree,
            DirectStyle::Functional => RequestKind::DirectFunctional,
        };
        Self { kind: Some(kind), image: Some(annotated_png), ..Default::default() }
    }

    pub fn validate(&self) -> Result<RequestKind, AugmentError> {
        let kind = self.kind.ok_or_else(|| AugmentError::Request("missing kind".into()))?;
        let ok = match kind {
            RequestKind::DescribeCrop => self.image.is_some() && self.attributes.is_some(),
            RequestKind::Condense => self.text.as_deref().is_some_and(|t| !t.trim().is_empty()),
            RequestKind::DirectFree | RequestKind::DirectFunctional => self.image.is_some(),
        };
        if ok {
            Ok(kind)
        } else {
            Err(AugmentError::Request(format!("{kind:?} request lacks a required part")))
        }
    }

    pub fn prompt(&self) -> Result<String, AugmentError> {
        Ok(match self.validate()? {
            RequestKind::DescribeCrop => describe_prompt(self.attributes.as_ref().unwrap()),
            RequestKind::Condense => condense_prompt(self.text.as_deref().unwrap()),
            RequestKind::DirectFree => DirectStyle::Free.prompt().into(),
            RequestKind::DirectFunctional => DirectStyle::Functional.prompt().into(),
        })
    }

    /// The wire payload for `model` under correlation id `id`.
    pub fn to_wire(&self, id: String, model: &str, temperature: Option<f64>) -> Result<WireRequest, AugmentError> {
        let content = self.prompt()?;
        let image = self
            .image
            .as_ref()
            .map(|png| format!("data:image/png;base64,{}", base64::engine::general_purpose::STANDARD.encode(png)));
        Ok(WireRequest {
            id,
            model: model.into(),
            messages: vec![WireMessage { role: "user".into(), content, image }],
            temperature,
        })
    }
}

/// Reply of the marker-based description step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectResult {
    pub visible: bool,
    pub description: String,
}

/// Extracts the JSON object from a reply, tolerating code fences and prose
/// around it. `None` when there is no usable object.
pub fn parse_direct(text: &str, style: DirectStyle) -> Option<DirectResult> {
    let start = text.find('{')?;
    let end = text.rfind('}')?;
    let v: serde_json::Value = serde_json::from_str(text.get(start..=end)?).ok()?;
    let visible = v.get("visible")?.as_bool()?;
    let description = [style.reply_key(), "description", "action"]
        .iter()
        .find_map(|k| v.get(*k).and_then(|d| d.as_str()))
        .map(|d| d.trim().to_string())
        .unwrap_or_default();
    if visible && description.is_empty() {
        return None;
    }
    Some(DirectResult { visible, description })
}

/// Strips whitespace and one layer of matching quotes.
pub fn clean_reply(text: &str) -> &str {
    let t = text.trim();
    for (open, close) in [('"', '"'), ('\'', '\''), ('“', '”')] {
        if let Some(inner) = t.strip_prefix(open).and_then(|s| s.strip_suffix(close)) {
            return inner.trim();
        }
    }
    t
}

/// First `n` whitespace-separated words.
pub fn first_words(text: &str, n: usize) -> String {
    text.split_whitespace().take(n).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClientStats {
    pub requests: u64,
    pub retries: u64,
    pub skipped: u64,
}

enum Reply {
    Text(String),
    Skipped,
}

pub struct AugmentClient {
    cfg: AugmentConfig,
    transport: Option<Box<dyn Transport>>,
    bucket: Option<TokenBucket>,
    in_flight: InFlight,
    next_id: AtomicU64,
    requests: AtomicU64,
    retries: AtomicU64,
    skipped: AtomicU64,
}

impl AugmentClient {
    /// Mock clients need no endpoint; others talk HTTP to `cfg.endpoint`.
    pub fn new(cfg: AugmentConfig) -> Result<Self, AugmentError> {
        if cfg.mock {
            return Ok(Self::build(cfg, None));
        }
        let endpoint = cfg
            .endpoint
            .clone()
            .ok_or_else(|| AugmentError::Config("set AUG_ENDPOINT or enable mock mode".into()))?;
        let t = HttpTransport::new(endpoint, Duration::from_secs(cfg.timeout_secs));
        Ok(Self::build(cfg, Some(Box::new(t))))
    }

    pub fn with_transport(cfg: AugmentConfig, transport: impl Transport + 'static) -> Self {
        Self::build(cfg, Some(Box::new(transport)))
    }

    fn build(cfg: AugmentConfig, transport: Option<Box<dyn Transport>>) -> Self {
        let bucket = cfg.requests_per_sec.filter(|r| *r > 0.0).map(|r| TokenBucket::new(r, r.max(1.0)));
        let in_flight = InFlight::new(cfg.max_in_flight);
        Self {
            cfg,
            transport,
            bucket,
            in_flight,
            next_id: AtomicU64::new(1),
            requests: AtomicU64::new(0),
            retries: AtomicU64::new(0),
            skipped: AtomicU64::new(0),
        }
    }

    pub fn is_mock(&self) -> bool {
        self.transport.is_none()
    }

    pub fn config(&self) -> &AugmentConfig {
        &self.cfg
    }

    pub fn stats(&self) -> ClientStats {
        ClientStats {
            requests: self.requests.load(Ordering::Relaxed),
            retries: self.retries.load(Ordering::Relaxed),
            skipped: self.skipped.load(Ordering::Relaxed),
        }
    }

    fn call(&self, model: &str, req: &AugmentationRequest) -> Result<Reply, AugmentError> {
        let transport = self.transport.as_ref().ok_or_else(|| AugmentError::Config("mock client has no transport".into()))?;
        let id = format!("req-{}", self.next_id.fetch_add(1, Ordering::Relaxed));
        let wire = req.to_wire(id.clone(), model, self.cfg.temperature)?;
        for attempt in 0..self.cfg.attempts.max(1) {
            if attempt > 0 {
                self.retries.fetch_add(1, Ordering::Relaxed);
                let delay = self.cfg.backoff_ms.saturating_mul(1 << (attempt - 1).min(16));
                std::thread::sleep(Duration::from_millis(delay));
            }
            if let Some(b) = &self.bucket {
                b.acquire();
            }
            let result = {
                let _slot = self.in_flight.acquire();
                self.requests.fetch_add(1, Ordering::Relaxed);
                transport.send(&wire)
            };
            match result {
                Ok(body) => match serde_json::from_str::<WireResponse>(&body) {
                    Ok(r) if r.id.as_deref().is_some_and(|rid| rid != id) => {
                        log::warn!("{id}: reply carries id {:?}, retrying", r.id);
                    }
                    Ok(r) if !r.text.trim().is_empty() => return Ok(Reply::Text(r.text)),
                    _ => return Ok(self.skip(&id, "empty or malformed reply")),
                },
                Err(TransportError::Retryable(m)) => log::warn!("{id}: attempt {} failed: {m}", attempt + 1),
                Err(TransportError::Fatal(m)) => return Err(AugmentError::Remote(m)),
            }
        }
        Ok(self.skip(&id, "retries exhausted"))
    }

    fn skip(&self, id: &str, why: &str) -> Reply {
        log::debug!("{id}: augmentation skipped ({why})");
        self.skipped.fetch_add(1, Ordering::Relaxed);
        Reply::Skipped
    }

    /// Model description of an element crop. `Ok(None)` means skipped.
    pub fn describe_element(&self, crop_png: Option<Vec<u8>>, element: &ElementRecord) -> Result<Option<String>, AugmentError> {
        if self.is_mock() {
            return Ok(Some(format!("mock-desc:{}", element.id)));
        }
        let crop = crop_png.ok_or_else(|| AugmentError::Request("describe needs the element crop".into()))?;
        let req = AugmentationRequest::describe(crop, element.attributes.clone());
        Ok(match self.call(&self.cfg.model_describe, &req)? {
            Reply::Text(t) => Some(t),
            Reply::Skipped => None,
        })
    }

    /// Shortens a long description into a referring phrase.
    pub fn condense_description(&self, long_desc: &str) -> Result<Option<String>, AugmentError> {
        if self.is_mock() {
            return Ok(Some(first_words(long_desc, 10)));
        }
        let req = AugmentationRequest::condense(long_desc);
        Ok(match self.call(&self.cfg.model_condense, &req)? {
            Reply::Text(t) => Some(clean_reply(&t).to_string()).filter(|s| !s.is_empty()),
            Reply::Skipped => None,
        })
    }

    /// Description of the element marked on an annotated screenshot.
    pub fn direct_describe(&self, annotated_png: Vec<u8>, style: DirectStyle) -> Result<Option<DirectResult>, AugmentError> {
        if self.is_mock() {
            return Ok(Some(DirectResult { visible: true, description: "mock-direct".into() }));
        }
        let req = AugmentationRequest::direct(annotated_png, style);
        Ok(match self.call(&self.cfg.model_direct, &req)? {
            Reply::Text(t) => {
                let r = parse_direct(&t, style);
                if r.is_none() {
                    self.skipped.fetch_add(1, Ordering::Relaxed);
                }
                r
            }
            Reply::Skipped => None,
        })
    }
}
