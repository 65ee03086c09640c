//! Wire format and HTTP transport for the model endpoint.

use std::time::Duration;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMessage {
    pub role: String,
    pub content: String,
    /// `data:image/png;base64,...`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireRequest {
    /// Correlation id, echoed back by the service.
    pub id: String,
    pub model: String,
    pub messages: Vec<WireMessage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireResponse {
    #[serde(default)]
    pub id: Option<String>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    /// Network failure, timeout, 429 or 5xx.
    #[error("retryable: {0}")]
    Retryable(String),
    /// Any other rejection; retrying will not help.
    #[error("fatal: {0}")]
    Fatal(String),
}

/// Sends one request and returns the raw response body.
pub trait Transport: Send + Sync {
    fn send(&self, req: &WireRequest) -> Result<String, TransportError>;
}

impl<F> Transport for F
where
    F: Fn(&WireRequest) -> Result<String, TransportError> + Send + Sync,
{
    fn send(&self, req: &WireRequest) -> Result<String, TransportError> {
        self(req)
    }
}

pub fn classify_status(status: u16, body: &str) -> Result<(), TransportError> {
    match status {
        200..=299 => Ok(()),
        429 | 500..=599 => Err(TransportError::Retryable(format!("HTTP {status}"))),
        _ => Err(TransportError::Fatal(format!("HTTP {status}: {}", body.chars().take(200).collect::<String>()))),
    }
}

pub struct HttpTransport {
    endpoint: String,
    agent: ureq::Agent,
}

impl HttpTransport {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self { endpoint: endpoint.into(), agent }
    }
}

impl Transport for HttpTransport {
    fn send(&self, req: &WireRequest) -> Result<String, TransportError> {
        let mut resp = self
            .agent
            .post(&self.endpoint)
            .send_json(req)
            .map_err(|e| TransportError::Retryable(e.to_string()))?;
        let status = resp.status().as_u16();
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| TransportError::Retryable(e.to_string()))?;
        classify_status(status, &body)?;
        Ok(body)
    }
}
