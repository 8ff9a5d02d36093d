//! Probe-request sighting pipeline and MAC-to-person identification.
//!
//! The crate is split along the data flow:
//!
//! - [`frame`]: classic pcap reading and 802.11 probe-request dissection.
//! - [`oui`]: manufacturer lookup from a tab-separated OUI registry.
//! - [`store`]: per-scan deduplication and the persistent sighting store.
//! - [`simlab`]: seeded lecture-attendance experiments with a hidden ground truth.
//! - [`identify`]: the occupancy-grid co-occurrence engine, scoring and regression.

pub mod frame;
pub mod identify;
pub mod oui;
pub mod simlab;
pub mod store;

pub use frame::{MacAddress, ProbeRequest, Ssid};
