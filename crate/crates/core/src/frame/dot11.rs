use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{FrameError, MacAddress};

pub const MGMT_HEADER_LEN: usize = 24;
pub const MAX_SSID_LEN: usize = 32;

const FC_PROBE_REQUEST: u8 = 0x40;
const ELEMENT_SSID: u8 = 0;

/// Raw SSID bytes. Empty means a wildcard (undirected) probe.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct Ssid(Vec<u8>);

impl Ssid {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self, FrameError> {
        let bytes = bytes.into();
        if bytes.len() > MAX_SSID_LEN {
            return Err(FrameError::OversizedSsid(bytes.len()));
        }
        Ok(Ssid(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn is_wildcard(&self) -> bool {
        self.0.is_empty()
    }

    /// Text form for display and storage; invalid UTF-8 is replaced lossily.
    pub fn to_text(&self) -> String {
        String::from_utf8_lossy(&self.0).into_owned()
    }
}

impl TryFrom<Vec<u8>> for Ssid {
    type Error = FrameError;

    fn try_from(bytes: Vec<u8>) -> Result<Self, Self::Error> {
        Ssid::new(bytes)
    }
}

impl From<Ssid> for Vec<u8> {
    fn from(ssid: Ssid) -> Self {
        ssid.0
    }
}

impl fmt::Debug for Ssid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ssid({:?})", String::from_utf8_lossy(&self.0))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeRequest {
    pub mac: MacAddress,
    /// `None` for undirected probes.
    pub ssid: Option<Ssid>,
    /// Taken from the capture record header.
    pub captured_at: DateTime<Utc>,
}

impl ProbeRequest {
    pub fn is_directed(&self) -> bool {
        self.ssid.is_some()
    }
}

/// Offset of the 802.11 frame inside a radiotap-prefixed packet.
pub fn radiotap_payload_offset(frame: &[u8]) -> Result<usize, FrameError> {
    if frame.len() < 4 {
        return Err(FrameError::HeaderLongerThanFrame { declared: 4, available: frame.len() });
    }
    if frame[0] != 0 {
        return Err(FrameError::BadRadiotapVersion(frame[0]));
    }
    let declared = usize::from(u16::from_le_bytes([frame[2], frame[3]]));
    if declared > frame.len() {
        return Err(FrameError::HeaderLongerThanFrame { declared, available: frame.len() });
    }
    Ok(declared)
}

/// Parse a bare 802.11 frame. Frames other than probe requests yield `Ok(None)`.
pub fn parse_probe_request(
    frame: &[u8],
    ts: DateTime<Utc>,
) -> Result<Option<ProbeRequest>, FrameError> {
    let Some(&fc) = frame.first() else {
        return Err(FrameError::TruncatedFrame { len: 0 });
    };
    // low two bits are the protocol version
    if fc & 0xfc != FC_PROBE_REQUEST {
        return Ok(None);
    }
    if frame.len() < MGMT_HEADER_LEN {
        return Err(FrameError::TruncatedFrame { len: frame.len() });
    }
    let mac = MacAddress::from_slice(&frame[10..16]).expect("six bytes");

    let mut at = MGMT_HEADER_LEN;
    let ssid = loop {
        if frame.len() < at + 2 {
            return Err(FrameError::MissingSsidElement);
        }
        let (id, len) = (frame[at], usize::from(frame[at + 1]));
        let body = at + 2;
        if frame.len() < body + len {
            return Err(FrameError::TruncatedFrame { len: frame.len() });
        }
        if id == ELEMENT_SSID {
            break &frame[body..body + len];
        }
        at = body + len;
    };
    let ssid = if ssid.is_empty() { None } else { Some(Ssid::new(ssid)?) };
    Ok(Some(ProbeRequest { mac, ssid, captured_at: ts }))
}
