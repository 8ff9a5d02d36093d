use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Timelike, Utc};
use serde::{Deserialize, Serialize};

use super::{GeoPoint, ScanBatch, Sighting};
use crate::frame::MacAddress;
use crate::oui::OuiTable;

pub const STORE_MAGIC: &str = "PROBELINK-STORE";
pub const STORE_VERSION: u32 = 1;
pub const UNKNOWN_MANUFACTURER: &str = "Unknown";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}: not a probelink store")]
    BadMagic(PathBuf),
    #[error("{path}: store version {found} is not supported (expected {STORE_VERSION})")]
    UnsupportedVersion { path: PathBuf, found: String },
    #[error("{path}: corrupt store: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("storage failure: {0}")]
    StorageFailure(String),
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("no owner named {0:?}")]
    UnknownOwner(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacRecord {
    pub address: MacAddress,
    pub manufacturer: String,
    pub times_seen: u64,
    pub locally_administered: bool,
    pub known_ssids: BTreeSet<String>,
}

/// Manually curated; no ingestion path writes to owners.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OwnerRecord {
    pub name: String,
    pub contact: String,
    pub linked_macs: BTreeSet<MacAddress>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredSighting {
    pub device_id: String,
    #[serde(flatten)]
    pub sighting: Sighting,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub new_macs: usize,
    pub new_ssids: usize,
    pub sightings_added: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub total_sightings: usize,
    pub unique_macs: usize,
    pub manufacturer_count: usize,
    pub unique_ssids: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsidLocation {
    pub ssid: String,
    pub lat: f64,
    pub lon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacReport {
    pub record: MacRecord,
    pub sightings: Vec<StoredSighting>,
    pub ssid_locations: Vec<SsidLocation>,
}

/// Everything the store persists.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StoreState {
    macs: BTreeMap<MacAddress, MacRecord>,
    ssids: BTreeSet<String>,
    sightings: Vec<StoredSighting>,
    ssid_locations: BTreeMap<String, GeoPoint>,
    owners: BTreeMap<String, OwnerRecord>,
}

impl StoreState {
    /// Versioned text encoding: a magic line followed by JSON.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("{STORE_MAGIC} {STORE_VERSION}\n").into_bytes();
        serde_json::to_writer_pretty(&mut out, self).expect("store state serializes");
        out.push(b'\n');
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self, StoreError> {
        let newline = bytes.iter().position(|&b| b == b'\n').unwrap_or(bytes.len());
        let header = std::str::from_utf8(&bytes[..newline]).map_err(|_| StoreError::BadMagic(path.into()))?;
        let Some(version) = header.strip_prefix(STORE_MAGIC).and_then(|v| v.strip_prefix(' ')) else {
            return Err(StoreError::BadMagic(path.into()));
        };
        if version.trim() != STORE_VERSION.to_string() {
            return Err(StoreError::UnsupportedVersion { path: path.into(), found: version.trim().into() });
        }
        serde_json::from_slice(&bytes[newline..])
            .map_err(|e| StoreError::Corrupt { path: path.into(), reason: e.to_string() })
    }

    /// JSON of the owner table alone.
    pub fn owner_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(&self.owners).expect("owners serialize")
    }
}

/// Where committed state goes.
pub trait Backend: Send + Sync {
    fn commit(&mut self, state: &StoreState) -> Result<(), StoreError>;
}

#[derive(Debug, Default)]
pub struct MemoryBackend;

impl Backend for MemoryBackend {
    fn commit(&mut self, _state: &StoreState) -> Result<(), StoreError> {
        Ok(())
    }
}

/// Single-file persistence. Writes go to a sibling temp file which is
/// synced and renamed over the target.
#[derive(Debug)]
pub struct FileBackend {
    path: PathBuf,
}

impl FileBackend {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        FileBackend { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Backend for FileBackend {
    fn commit(&mut self, state: &StoreState) -> Result<(), StoreError> {
        let io = |source| StoreError::Io { path: self.path.clone(), source };
        let mut tmp = self.path.clone().into_os_string();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(&state.to_bytes()).map_err(io)?;
        file.sync_all().map_err(io)?;
        drop(file);
        fs::rename(&tmp, &self.path).map_err(io)
    }
}

pub struct Store {
    state: StoreState,
    backend: Box<dyn Backend>,
}

impl std::fmt::Debug for Store {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Store").field("state", &self.state).finish_non_exhaustive()
    }
}

impl Store {
    pub fn in_memory() -> Self {
        Store::with_backend(StoreState::default(), Box::new(MemoryBackend))
    }

    pub fn with_backend(state: StoreState, backend: Box<dyn Backend>) -> Self {
        Store { state, backend }
    }

    /// Open a store file, creating an empty one if it does not exist.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref();
        let mut backend = FileBackend::new(path);
        let state = match fs::read(path) {
            Ok(bytes) => StoreState::from_bytes(&bytes, path)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                let state = StoreState::default();
                backend.commit(&state)?;
                state
            }
            Err(source) => return Err(StoreError::Io { path: path.into(), source }),
        };
        Ok(Store::with_backend(state, Box::new(backend)))
    }

    pub fn state(&self) -> &StoreState {
        &self.state
    }

    fn commit(&mut self, next: StoreState) -> Result<(), StoreError> {
        self.backend.commit(&next)?;
        self.state = next;
        Ok(())
    }

    /// Apply one batch. Either the whole batch is committed or the store is
    /// left as it was.
    pub fn upsert_batch(&mut self, batch: &ScanBatch, oui: &OuiTable) -> Result<IngestSummary, StoreError> {
        if batch.is_empty() {
            return Ok(IngestSummary::default());
        }
        let mut next = self.state.clone();
        let mut summary = IngestSummary::default();
        for s in batch.sightings() {
            let record = next.macs.entry(s.mac).or_insert_with(|| {
                summary.new_macs += 1;
                MacRecord {
                    address: s.mac,
                    manufacturer: oui.lookup(&s.mac).unwrap_or(UNKNOWN_MANUFACTURER).to_string(),
                    times_seen: 0,
                    locally_administered: s.mac.is_locally_administered(),
                    known_ssids: BTreeSet::new(),
                }
            });
            record.times_seen += 1;
            if let Some(name) = s.ssid.named() {
                record.known_ssids.insert(name.to_string());
                if next.ssids.insert(name.to_string()) {
                    summary.new_ssids += 1;
                }
            }
            next.sightings.push(StoredSighting { device_id: batch.device_id().to_string(), sighting: s.clone() });
            summary.sightings_added += 1;
        }
        self.commit(next)?;
        Ok(summary)
    }

    pub fn stats(&self) -> Stats {
        let manufacturers: BTreeSet<&str> = self
            .state
            .macs
            .values()
            .map(|r| r.manufacturer.as_str())
            .filter(|m| *m != UNKNOWN_MANUFACTURER)
            .collect();
        Stats {
            total_sightings: self.state.sightings.len(),
            unique_macs: self.state.macs.len(),
            manufacturer_count: manufacturers.len(),
            unique_ssids: self.state.ssids.len(),
        }
    }

    pub fn query_mac(&self, mac: &MacAddress) -> Option<MacReport> {
        let record = self.state.macs.get(mac)?.clone();
        let mut sightings: Vec<StoredSighting> =
            self.state.sightings.iter().filter(|s| s.sighting.mac == *mac).cloned().collect();
        sightings.sort_by_key(|s| s.sighting.seen_at);
        let ssid_locations = record
            .known_ssids
            .iter()
            .filter_map(|ssid| {
                let p = self.state.ssid_locations.get(ssid)?;
                Some(SsidLocation { ssid: ssid.clone(), lat: p.lat(), lon: p.lon() })
            })
            .collect();
        Some(MacReport { record, sightings, ssid_locations })
    }

    /// Replace the SSID location table from `ssid,lat,lon` lines. An optional
    /// `ssid,lat,lon` header line is skipped. SSIDs may contain commas.
    pub fn load_ssid_locations(&mut self, text: &str) -> Result<usize, StoreError> {
        let mut table = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || (i == 0 && line.trim() == "ssid,lat,lon") {
                continue;
            }
            let bad = |reason: String| StoreError::MalformedLine { line: i + 1, reason };
            let mut fields = line.rsplitn(3, ',');
            let (Some(lon), Some(lat), Some(ssid)) = (fields.next(), fields.next(), fields.next()) else {
                return Err(bad("expected ssid,lat,lon".into()));
            };
            if ssid.is_empty() {
                return Err(bad("empty ssid".into()));
            }
            let lat: f64 = lat.trim().parse().map_err(|_| bad(format!("bad latitude {lat:?}")))?;
            let lon: f64 = lon.trim().parse().map_err(|_| bad(format!("bad longitude {lon:?}")))?;
            let point = GeoPoint::new(lat, lon).map_err(|e| bad(e.to_string()))?;
            table.insert(ssid.to_string(), point);
        }
        let count = table.len();
        let mut next = self.state.clone();
        next.ssid_locations = table;
        self.commit(next)?;
        Ok(count)
    }

    pub fn add_owner(&mut self, name: &str, contact: &str) -> Result<(), StoreError> {
        let mut next = self.state.clone();
        let owner = next.owners.entry(name.to_string()).or_insert_with(|| OwnerRecord {
            name: name.to_string(),
            contact: String::new(),
            linked_macs: BTreeSet::new(),
        });
        owner.contact = contact.to_string();
        self.commit(next)
    }

    pub fn link_owner(&mut self, name: &str, mac: MacAddress) -> Result<(), StoreError> {
        let mut next = self.state.clone();
        let owner = next.owners.get_mut(name).ok_or_else(|| StoreError::UnknownOwner(name.into()))?;
        owner.linked_macs.insert(mac);
        self.commit(next)
    }

    pub fn owners(&self) -> impl Iterator<Item = &OwnerRecord> {
        self.state.owners.values()
    }

    pub fn records(&self) -> impl Iterator<Item = &MacRecord> {
        self.state.macs.values()
    }

    pub fn sightings(&self) -> &[StoredSighting] {
        &self.state.sightings
    }

    /// Distinct MACs per manufacturer, most common first, ties by name.
    /// `Unknown` is included so callers can show it; it is excluded from
    /// [`Stats::manufacturer_count`].
    pub fn manufacturer_counts(&self) -> Vec<(String, usize)> {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in self.state.macs.values() {
            *counts.entry(&r.manufacturer).or_default() += 1;
        }
        let mut out: Vec<(String, usize)> = counts.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Sightings bucketed by UTC hour.
    pub fn hourly_counts(&self) -> BTreeMap<DateTime<Utc>, usize> {
        let mut out = BTreeMap::new();
        for s in &self.state.sightings {
            let t = s.sighting.seen_at;
            let hour = t
                .with_minute(0)
                .and_then(|t| t.with_second(0))
                .and_then(|t| t.with_nanosecond(0))
                .expect("valid hour truncation");
            *out.entry(hour).or_default() += 1;
        }
        out
    }
}
