//! Synthetic capture builder for fixtures and tests.

use chrono::{DateTime, Utc};

use super::pcap::{LinkType, MAGIC};
use super::MacAddress;

/// One frame to place in a synthetic capture.
#[derive(Debug, Clone)]
pub enum FrameSpec {
    Probe { mac: MacAddress, ssid: Option<Vec<u8>> },
    Beacon { bssid: MacAddress },
    /// Bytes used as the 802.11 frame verbatim.
    Raw(Vec<u8>),
}

impl FrameSpec {
    pub fn probe(mac: MacAddress, ssid: Option<&[u8]>) -> Self {
        FrameSpec::Probe { mac, ssid: ssid.map(<[u8]>::to_vec) }
    }
}

/// Encode a probe request: 24-byte management header, SSID element, then a
/// supported-rates element.
pub fn probe_frame(mac: MacAddress, ssid: Option<&[u8]>) -> Vec<u8> {
    let mut f = mgmt_header(0x40, [0xff; 6], mac, [0xff; 6]);
    let ssid = ssid.unwrap_or_default();
    f.push(0x00);
    f.push(ssid.len() as u8);
    f.extend_from_slice(ssid);
    f.extend_from_slice(&[0x01, 0x04, 0x02, 0x04, 0x0b, 0x16]);
    f
}

pub fn beacon_frame(bssid: MacAddress) -> Vec<u8> {
    let mut f = mgmt_header(0x80, [0xff; 6], bssid, bssid.octets());
    f.extend_from_slice(&[0u8; 8]); // timestamp
    f.extend_from_slice(&[0x64, 0x00, 0x01, 0x04]); // interval, capabilities
    f.extend_from_slice(&[0x00, 0x04]);
    f.extend_from_slice(b"Beac");
    f
}

fn mgmt_header(fc: u8, addr1: [u8; 6], addr2: MacAddress, addr3: [u8; 6]) -> Vec<u8> {
    let mut f = Vec::with_capacity(64);
    f.extend_from_slice(&[fc, 0x00, 0x00, 0x00]);
    f.extend_from_slice(&addr1);
    f.extend_from_slice(&addr2.octets());
    f.extend_from_slice(&addr3);
    f.extend_from_slice(&[0x00, 0x00]);
    f
}

/// Minimal 8-byte radiotap header with an empty present bitmap.
pub const RADIOTAP_MIN: [u8; 8] = [0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00];

#[derive(Debug, Clone)]
pub struct Builder {
    link: LinkType,
    big_endian: bool,
    records: Vec<(DateTime<Utc>, Vec<u8>)>,
}

impl Builder {
    pub fn new(link: LinkType) -> Self {
        Builder { link, big_endian: false, records: Vec::new() }
    }

    pub fn big_endian(&mut self, yes: bool) -> &mut Self {
        self.big_endian = yes;
        self
    }

    pub fn push(&mut self, ts: DateTime<Utc>, frame: FrameSpec) -> &mut Self {
        let dot11 = match frame {
            FrameSpec::Probe { mac, ssid } => probe_frame(mac, ssid.as_deref()),
            FrameSpec::Beacon { bssid } => beacon_frame(bssid),
            FrameSpec::Raw(bytes) => bytes,
        };
        let packet = match self.link {
            LinkType::Bare80211 => dot11,
            LinkType::Radiotap => [&RADIOTAP_MIN[..], &dot11].concat(),
        };
        self.records.push((ts, packet));
        self
    }

    pub fn to_pcap(&self) -> Vec<u8> {
        let be = self.big_endian;
        let u32b = |v: u32| if be { v.to_be_bytes() } else { v.to_le_bytes() };
        let u16b = |v: u16| if be { v.to_be_bytes() } else { v.to_le_bytes() };
        let mut out = Vec::new();
        out.extend_from_slice(&u32b(MAGIC));
        out.extend_from_slice(&u16b(2));
        out.extend_from_slice(&u16b(4));
        out.extend_from_slice(&[0u8; 8]);
        out.extend_from_slice(&u32b(65_535));
        out.extend_from_slice(&u32b(self.link.code()));
        for (ts, data) in &self.records {
            out.extend_from_slice(&u32b(ts.timestamp() as u32));
            out.extend_from_slice(&u32b(ts.timestamp_subsec_micros()));
            out.extend_from_slice(&u32b(data.len() as u32));
            out.extend_from_slice(&u32b(data.len() as u32));
            out.extend_from_slice(data);
        }
        out
    }
}
