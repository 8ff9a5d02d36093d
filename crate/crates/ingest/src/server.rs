//! HTTP ingestion service.
//!
//! `POST /upload` takes an upload document with the sender in the
//! `X-Device-Id` header, `GET /stats` returns store statistics and
//! `GET /mac/{mac}` the report for one address. The store sits behind a
//! lock, so each upload is applied as one atomic batch.

use std::net::{SocketAddr, TcpListener};
use std::sync::{Arc, RwLock};
use std::thread::JoinHandle;

use axum::extract::{Path, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::sync::oneshot;

use probelink::oui::OuiTable;
use probelink::store::Store;
use probelink::MacAddress;

use crate::wire::decode_batch;

pub const DEVICE_HEADER: &str = "x-device-id";
/// Device id recorded when an upload carries no `X-Device-Id` header.
pub const ANONYMOUS_DEVICE: &str = "unknown";

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    BindFailure { addr: SocketAddr, source: std::io::Error },
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub bind: SocketAddr,
    pub worker_threads: usize,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig { bind: SocketAddr::from(([127, 0, 0, 1], 8080)), worker_threads: 2 }
    }
}

pub type SharedStore = Arc<RwLock<Store>>;

#[derive(Clone)]
struct AppState {
    store: SharedStore,
    oui: Arc<OuiTable>,
}

/// A running service. Dropping the handle shuts the service down.
pub struct ServiceHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<std::io::Result<()>>>,
}

impl ServiceHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    /// Base URL for clients, e.g. `http://127.0.0.1:8080`.
    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    /// Stop accepting requests, finish in-flight ones and wait.
    pub fn shutdown(mut self) -> std::io::Result<()> {
        self.stop()
    }

    /// Block until the service exits on its own.
    pub fn wait(mut self) -> std::io::Result<()> {
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| Err(std::io::Error::other("service thread panicked"))),
            None => Ok(()),
        }
    }

    fn stop(&mut self) -> std::io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        match self.thread.take() {
            Some(t) => t.join().unwrap_or_else(|_| Err(std::io::Error::other("service thread panicked"))),
            None => Ok(()),
        }
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        let _ = self.stop();
    }
}

pub fn router(store: SharedStore, oui: Arc<OuiTable>) -> Router {
    Router::new()
        .route("/upload", post(upload))
        .route("/stats", get(stats))
        .route("/mac/{mac}", get(mac_report))
        .with_state(AppState { store, oui })
}

/// Bind and start serving on a background thread with its own runtime.
/// Binding happens before this returns, so port 0 can be used and the
/// chosen port read from [`ServiceHandle::local_addr`].
pub fn serve(store: SharedStore, oui: Arc<OuiTable>, config: &ServeConfig) -> Result<ServiceHandle, ServeError> {
    let bind_err = |source| ServeError::BindFailure { addr: config.bind, source };
    let listener = TcpListener::bind(config.bind).map_err(bind_err)?;
    listener.set_nonblocking(true).map_err(bind_err)?;
    let addr = listener.local_addr().map_err(bind_err)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .worker_threads(config.worker_threads.max(1))
        .enable_io()
        .build()
        .map_err(bind_err)?;
    let app = router(store, oui);
    let (tx, rx) = oneshot::channel::<()>();
    let thread = std::thread::spawn(move || {
        runtime.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener)?;
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await
        })
    });
    Ok(ServiceHandle { addr, shutdown: Some(tx), thread: Some(thread) })
}

fn reject(status: StatusCode, reason: impl ToString) -> Response {
    (status, reason.to_string()).into_response()
}

async fn upload(State(app): State<AppState>, headers: HeaderMap, body: String) -> Response {
    let device = match headers.get(DEVICE_HEADER).map(|v| v.to_str()) {
        None => ANONYMOUS_DEVICE,
        Some(Ok(v)) if !v.trim().is_empty() => v.trim(),
        Some(_) => return reject(StatusCode::BAD_REQUEST, "X-Device-Id must be non-empty visible ASCII"),
    };
    let batch = match decode_batch(&body) {
        Ok(b) => b.with_device_id(device),
        Err(e) => return reject(StatusCode::BAD_REQUEST, e),
    };
    let Ok(mut store) = app.store.write() else {
        return reject(StatusCode::INTERNAL_SERVER_ERROR, "store lock poisoned");
    };
    match store.upsert_batch(&batch, &app.oui) {
        Ok(summary) => Json(summary).into_response(),
        Err(e) => reject(StatusCode::INTERNAL_SERVER_ERROR, e),
    }
}

async fn stats(State(app): State<AppState>) -> Response {
    match app.store.read() {
        Ok(store) => Json(store.stats()).into_response(),
        Err(_) => reject(StatusCode::INTERNAL_SERVER_ERROR, "store lock poisoned"),
    }
}

async fn mac_report(State(app): State<AppState>, Path(text): Path<String>) -> Response {
    let Ok(mac) = text.parse::<MacAddress>() else {
        return reject(StatusCode::BAD_REQUEST, format!("bad MAC address {text:?}"));
    };
    let Ok(store) = app.store.read() else {
        return reject(StatusCode::INTERNAL_SERVER_ERROR, "store lock poisoned");
    };
    match store.query_mac(&mac) {
        Some(report) => Json(report).into_response(),
        None => reject(StatusCode::NOT_FOUND, format!("{mac} has not been seen")),
    }
}
