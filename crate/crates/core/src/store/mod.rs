//! Sightings and the persistent sighting store.
//!
//! A scan produces bursts of identical probes; [`dedup_scan`] keeps one
//! sighting per (MAC, SSID label) with the earliest timestamp. Batches of
//! sightings are applied to a [`Store`] atomically.

mod db;

use std::collections::HashMap;
use std::fmt;

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::frame::{MacAddress, ProbeRequest};

pub use db::{
    Backend, FileBackend, IngestSummary, MacRecord, MacReport, MemoryBackend, OwnerRecord, Stats, SsidLocation,
    Store, StoreError, StoreState, StoredSighting, STORE_MAGIC, STORE_VERSION, UNKNOWN_MANUFACTURER,
};

pub const BROADCAST_LABEL: &str = "Broadcast";

/// SSID as stored: `Broadcast` for undirected probes, else the SSID text.
///
/// A directed probe whose SSID is literally `Broadcast` cannot be told apart
/// once it has passed through the text form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SsidLabel {
    Broadcast,
    Named(String),
}

impl SsidLabel {
    pub fn from_text(text: &str) -> Self {
        if text == BROADCAST_LABEL {
            SsidLabel::Broadcast
        } else {
            SsidLabel::Named(text.to_string())
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            SsidLabel::Broadcast => BROADCAST_LABEL,
            SsidLabel::Named(s) => s,
        }
    }

    pub fn named(&self) -> Option<&str> {
        match self {
            SsidLabel::Broadcast => None,
            SsidLabel::Named(s) => Some(s),
        }
    }
}

impl fmt::Display for SsidLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SsidLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for SsidLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Ok(SsidLabel::from_text(&String::deserialize(deserializer)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("coordinates ({lat}, {lon}) out of range")]
pub struct BadCoordinates {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self, BadCoordinates> {
        if (-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon) {
            Ok(GeoPoint { lat, lon })
        } else {
            Err(BadCoordinates { lat, lon })
        }
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }
}

impl TryFrom<(f64, f64)> for GeoPoint {
    type Error = BadCoordinates;

    fn try_from((lat, lon): (f64, f64)) -> Result<Self, Self::Error> {
        GeoPoint::new(lat, lon)
    }
}

impl From<GeoPoint> for (f64, f64) {
    fn from(p: GeoPoint) -> Self {
        (p.lat, p.lon)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sighting {
    pub mac: MacAddress,
    pub ssid: SsidLabel,
    pub seen_at: DateTime<Utc>,
    pub gps: Option<GeoPoint>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BatchError {
    #[error("scan length must be positive")]
    ZeroLength,
    #[error("sighting of {mac} at {seen_at} falls outside the scan window")]
    OutsideWindow { mac: MacAddress, seen_at: DateTime<Utc> },
}

/// One device's scan output, the unit of upload.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanBatch {
    device_id: String,
    scan_start: DateTime<Utc>,
    scan_len_s: u32,
    sightings: Vec<Sighting>,
}

impl ScanBatch {
    /// Every sighting must fall in `[scan_start, scan_start + scan_len_s]`.
    pub fn new(
        device_id: impl Into<String>,
        scan_start: DateTime<Utc>,
        scan_len_s: u32,
        sightings: Vec<Sighting>,
    ) -> Result<Self, BatchError> {
        if scan_len_s == 0 {
            return Err(BatchError::ZeroLength);
        }
        let end = scan_start + Duration::seconds(i64::from(scan_len_s));
        if let Some(s) = sightings.iter().find(|s| s.seen_at < scan_start || s.seen_at > end) {
            return Err(BatchError::OutsideWindow { mac: s.mac, seen_at: s.seen_at });
        }
        Ok(ScanBatch { device_id: device_id.into(), scan_start, scan_len_s, sightings })
    }

    /// A batch whose window is the tightest whole-second span covering the
    /// sightings. An empty batch starts at the Unix epoch.
    pub fn spanning(device_id: impl Into<String>, sightings: Vec<Sighting>) -> Self {
        let start = sightings.iter().map(|s| s.seen_at).min().unwrap_or(DateTime::UNIX_EPOCH);
        let end = sightings.iter().map(|s| s.seen_at).max().unwrap_or(start);
        let span = (end - start).num_microseconds().unwrap_or(i64::MAX - 999_999);
        let len = ((span + 999_999) / 1_000_000).clamp(1, i64::from(u32::MAX)) as u32;
        ScanBatch::new(device_id, start, len, sightings).expect("window covers every sighting")
    }

    pub fn device_id(&self) -> &str {
        &self.device_id
    }

    pub fn with_device_id(mut self, device_id: impl Into<String>) -> Self {
        self.device_id = device_id.into();
        self
    }

    pub fn scan_start(&self) -> DateTime<Utc> {
        self.scan_start
    }

    pub fn scan_len_s(&self) -> u32 {
        self.scan_len_s
    }

    pub fn sightings(&self) -> &[Sighting] {
        &self.sightings
    }

    pub fn is_empty(&self) -> bool {
        self.sightings.is_empty()
    }

    pub fn into_sightings(self) -> Vec<Sighting> {
        self.sightings
    }
}

/// Collapse one scan window's probes to one sighting per (MAC, SSID label),
/// keeping the earliest capture time. Output is ordered by time.
pub fn dedup_scan(probes: &[ProbeRequest], gps: Option<GeoPoint>) -> Vec<Sighting> {
    let mut first: HashMap<(MacAddress, SsidLabel), usize> = HashMap::new();
    let mut out: Vec<Sighting> = Vec::new();
    for probe in probes {
        let label = match &probe.ssid {
            None => SsidLabel::Broadcast,
            Some(ssid) => SsidLabel::Named(ssid.to_text()),
        };
        match first.get(&(probe.mac, label.clone())) {
            Some(&i) => {
                if probe.captured_at < out[i].seen_at {
                    out[i].seen_at = probe.captured_at;
                }
            }
            None => {
                first.insert((probe.mac, label.clone()), out.len());
                out.push(Sighting { mac: probe.mac, ssid: label, seen_at: probe.captured_at, gps });
            }
        }
    }
    out.sort_by_key(|s| s.seen_at);
    out
}
