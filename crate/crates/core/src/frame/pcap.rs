//! Classic libpcap container (version 2.4, microsecond timestamps).

use chrono::{DateTime, Utc};

use super::FrameError;

pub const MAGIC: u32 = 0xa1b2_c3d4;
pub const MAGIC_SWAPPED: u32 = 0xd4c3_b2a1;
pub const GLOBAL_HEADER_LEN: usize = 24;
pub const RECORD_HEADER_LEN: usize = 16;

pub const LINKTYPE_IEEE802_11: u32 = 105;
pub const LINKTYPE_IEEE802_11_RADIOTAP: u32 = 127;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkType {
    Radiotap,
    Bare80211,
}

impl LinkType {
    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            LINKTYPE_IEEE802_11_RADIOTAP => Some(LinkType::Radiotap),
            LINKTYPE_IEEE802_11 => Some(LinkType::Bare80211),
            _ => None,
        }
    }

    pub fn code(self) -> u32 {
        match self {
            LinkType::Radiotap => LINKTYPE_IEEE802_11_RADIOTAP,
            LinkType::Bare80211 => LINKTYPE_IEEE802_11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureRecord {
    pub timestamp: DateTime<Utc>,
    pub data: Vec<u8>,
}

/// A fully read capture: link type plus records in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaptureFile {
    pub link_type: LinkType,
    pub records: Vec<CaptureRecord>,
}

#[derive(Clone, Copy)]
enum Endian {
    Little,
    Big,
}

impl Endian {
    fn u32_at(self, bytes: &[u8], at: usize) -> u32 {
        let raw: [u8; 4] = bytes[at..at + 4].try_into().unwrap();
        match self {
            Endian::Little => u32::from_le_bytes(raw),
            Endian::Big => u32::from_be_bytes(raw),
        }
    }

    fn u16_at(self, bytes: &[u8], at: usize) -> u16 {
        let raw: [u8; 2] = bytes[at..at + 2].try_into().unwrap();
        match self {
            Endian::Little => u16::from_le_bytes(raw),
            Endian::Big => u16::from_be_bytes(raw),
        }
    }
}

pub fn read_capture(bytes: &[u8]) -> Result<CaptureFile, FrameError> {
    if bytes.len() < GLOBAL_HEADER_LEN {
        return Err(FrameError::TruncatedHeader { len: bytes.len() });
    }
    // The magic is written in the writer's native order; reading it as
    // little-endian tells us which order the rest of the file uses.
    let magic = u32::from_le_bytes(bytes[0..4].try_into().unwrap());
    let endian = match magic {
        MAGIC => Endian::Little,
        MAGIC_SWAPPED => Endian::Big,
        other => return Err(FrameError::UnsupportedMagic(other)),
    };
    let major = endian.u16_at(bytes, 4);
    let minor = endian.u16_at(bytes, 6);
    if (major, minor) != (2, 4) {
        return Err(FrameError::UnsupportedVersion { major, minor });
    }
    let link_code = endian.u32_at(bytes, 20);
    let link_type =
        LinkType::from_code(link_code).ok_or(FrameError::UnsupportedLinkType(link_code))?;

    let mut records = Vec::new();
    let mut at = GLOBAL_HEADER_LEN;
    while at < bytes.len() {
        let index = records.len();
        if bytes.len() - at < RECORD_HEADER_LEN {
            return Err(FrameError::TruncatedRecord { index });
        }
        let ts_sec = endian.u32_at(bytes, at);
        let ts_usec = endian.u32_at(bytes, at + 4);
        let incl_len = endian.u32_at(bytes, at + 8) as usize;
        at += RECORD_HEADER_LEN;
        if bytes.len() - at < incl_len {
            return Err(FrameError::TruncatedRecord { index });
        }
        if ts_usec >= 1_000_000 {
            return Err(FrameError::BadTimestamp { index, ts_sec, ts_usec });
        }
        let timestamp = DateTime::from_timestamp(i64::from(ts_sec), ts_usec * 1000)
            .ok_or(FrameError::BadTimestamp { index, ts_sec, ts_usec })?;
        records.push(CaptureRecord { timestamp, data: bytes[at..at + incl_len].to_vec() });
        at += incl_len;
    }
    Ok(CaptureFile { link_type, records })
}
