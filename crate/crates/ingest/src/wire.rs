//! The upload document: a JSON object keyed by MAC text.
//!
//! ```json
//! {"80:7a:bf:3b:bd:d9": {
//!     "detections": [["2016-12-04 19:23:54", "UCD Wireless", [53.3461, -6.3032]],
//!                    ["2016-12-04 19:24:32", "Broadcast", [53.3461, -6.3032]]],
//!     "times_seen": 2,
//!     "manufacturer": "Apple"}}
//! ```
//!
//! Sightings without a position carry `null` in the coordinate slot. The
//! decoder also accepts `[null, null]`.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};

use probelink::oui::OuiTable;
use probelink::store::{GeoPoint, ScanBatch, Sighting, SsidLabel, UNKNOWN_MANUFACTURER};
use probelink::MacAddress;

/// `YYYY-MM-DD HH:MM:SS`, always UTC.
pub const TIMESTAMP_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WireError {
    #[error("malformed document at line {line}, column {column}: {reason}")]
    MalformedDocument { line: usize, column: usize, reason: String },
    #[error("bad MAC address {0:?}")]
    BadMacText(String),
    #[error("bad timestamp {0:?}, expected YYYY-MM-DD HH:MM:SS")]
    BadTimestamp(String),
}

impl From<serde_json::Error> for WireError {
    fn from(e: serde_json::Error) -> Self {
        WireError::MalformedDocument { line: e.line(), column: e.column(), reason: e.to_string() }
    }
}

type Coordinates = Option<(Option<f64>, Option<f64>)>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Detection(String, String, Coordinates);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    detections: Vec<Detection>,
    times_seen: u64,
    manufacturer: String,
}

pub fn format_timestamp(t: DateTime<Utc>) -> String {
    t.format(TIMESTAMP_FORMAT).to_string()
}

pub fn parse_timestamp(text: &str) -> Result<DateTime<Utc>, WireError> {
    NaiveDateTime::parse_from_str(text, TIMESTAMP_FORMAT)
        .map(|t| t.and_utc())
        .map_err(|_| WireError::BadTimestamp(text.to_string()))
}

/// Render a batch as upload JSON. Sub-second parts of timestamps are
/// dropped. `manufacturer` is filled from `oui`, falling back to `Unknown`.
pub fn encode_batch(batch: &ScanBatch, oui: &OuiTable) -> String {
    let mut doc: BTreeMap<MacAddress, Entry> = BTreeMap::new();
    for s in batch.sightings() {
        let entry = doc.entry(s.mac).or_insert_with(|| Entry {
            detections: Vec::new(),
            times_seen: 0,
            manufacturer: oui.lookup(&s.mac).unwrap_or(UNKNOWN_MANUFACTURER).to_string(),
        });
        entry.detections.push(Detection(
            format_timestamp(s.seen_at),
            s.ssid.as_str().to_string(),
            s.gps.map(|g| (Some(g.lat()), Some(g.lon()))),
        ));
        entry.times_seen += 1;
    }
    let keyed: BTreeMap<String, Entry> = doc.into_iter().map(|(mac, e)| (mac.to_string(), e)).collect();
    serde_json::to_string(&keyed).expect("upload document always serializes")
}

/// Parse upload JSON into a batch whose window spans its sightings. The
/// body has no device slot, so the batch's device id is empty; see
/// [`ScanBatch::with_device_id`]. The client's `manufacturer` field is not
/// trusted and is discarded.
pub fn decode_batch(text: &str) -> Result<ScanBatch, WireError> {
    let doc: BTreeMap<String, Entry> = serde_json::from_str(text)?;
    let mut sightings = Vec::new();
    for (key, entry) in doc {
        let mac: MacAddress = key.parse().map_err(|_| WireError::BadMacText(key.clone()))?;
        if entry.times_seen != entry.detections.len() as u64 {
            return Err(semantic(format!(
                "{key}: times_seen is {} but there are {} detections",
                entry.times_seen,
                entry.detections.len()
            )));
        }
        for Detection(ts, label, coords) in entry.detections {
            let gps = match coords {
                None | Some((None, None)) => None,
                Some((Some(lat), Some(lon))) => {
                    Some(GeoPoint::new(lat, lon).map_err(|e| semantic(format!("{key}: {e}")))?)
                }
                Some(_) => return Err(semantic(format!("{key}: half-missing coordinates"))),
            };
            sightings.push(Sighting { mac, ssid: SsidLabel::from_text(&label), seen_at: parse_timestamp(&ts)?, gps });
        }
    }
    Ok(ScanBatch::spanning("", sightings))
}

fn semantic(reason: String) -> WireError {
    WireError::MalformedDocument { line: 0, column: 0, reason }
}
