//! Blocking upload client.

use std::time::Duration;

use ureq::Agent;

use probelink::oui::OuiTable;
use probelink::store::{IngestSummary, ScanBatch};

use crate::server::DEVICE_HEADER;
use crate::wire::encode_batch;

const TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, thiserror::Error)]
pub enum UploadError {
    #[error("{endpoint} is unreachable: {reason}")]
    EndpointUnreachable { endpoint: String, reason: String },
    #[error("server rejected upload with status {status}: {body}")]
    ServerRejected { status: u16, body: String },
}

/// Encode `batch` and POST it to `{endpoint}/upload`, tagged with the
/// batch's device id. A transport failure is retried once.
pub fn upload(endpoint: &str, batch: &ScanBatch, oui: &OuiTable) -> Result<IngestSummary, UploadError> {
    let url = format!("{}/upload", endpoint.trim_end_matches('/'));
    let body = encode_batch(batch, oui);
    let agent: Agent = Agent::config_builder().http_status_as_error(false).timeout_global(Some(TIMEOUT)).build().into();
    let send = || {
        agent
            .post(&url)
            .header(DEVICE_HEADER, batch.device_id())
            .header("content-type", "application/json")
            .send(body.as_str())
    };
    let mut response = match send() {
        Ok(r) => r,
        Err(_) => send().map_err(|e| UploadError::EndpointUnreachable { endpoint: endpoint.to_string(), reason: e.to_string() })?,
    };
    let status = response.status().as_u16();
    let text = response.body_mut().read_to_string().unwrap_or_default();
    if status != 200 {
        return Err(UploadError::ServerRejected { status, body: text });
    }
    serde_json::from_str(&text).map_err(|_| UploadError::ServerRejected { status, body: text })
}
