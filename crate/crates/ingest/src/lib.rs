//! Upload wire format and the HTTP service that feeds a shared store.
//!
//! Sniffing devices encode each scan with [`encode_batch`] and send it with
//! [`upload`]; [`serve`] runs the receiving end.

pub mod client;
pub mod server;
pub mod wire;

pub use client::{upload, UploadError};
pub use server::{router, serve, ServeConfig, ServeError, ServiceHandle, SharedStore};
pub use wire::{decode_batch, encode_batch, WireError};
