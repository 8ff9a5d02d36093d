//! Probe-request extraction from classic pcap captures.
//!
//! Captures may be bare 802.11 (link type 105) or radiotap-prefixed (127).
//! Only management frames of subtype 4 are returned; of their tagged
//! parameters only the SSID element is read.

mod dot11;
mod mac;
mod pcap;
pub mod synth;

pub use dot11::{parse_probe_request, radiotap_payload_offset, ProbeRequest, Ssid, MAX_SSID_LEN, MGMT_HEADER_LEN};
pub use mac::{MacAddress, ParseMacError, BROADCAST};
pub use pcap::{read_capture, CaptureFile, CaptureRecord, LinkType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("capture shorter than the 24-byte global header ({len} bytes)")]
    TruncatedHeader { len: usize },
    #[error("unsupported pcap magic {0:#010x}")]
    UnsupportedMagic(u32),
    #[error("unsupported pcap version {major}.{minor}")]
    UnsupportedVersion { major: u16, minor: u16 },
    #[error("unsupported link type {0}")]
    UnsupportedLinkType(u32),
    #[error("record {index} is shorter than its declared captured length")]
    TruncatedRecord { index: usize },
    #[error("record {index} has an invalid timestamp {ts_sec}.{ts_usec:06}")]
    BadTimestamp { index: usize, ts_sec: u32, ts_usec: u32 },
    #[error("unsupported radiotap version {0}")]
    BadRadiotapVersion(u8),
    #[error("radiotap header claims {declared} bytes but frame has {available}")]
    HeaderLongerThanFrame { declared: usize, available: usize },
    #[error("truncated 802.11 frame ({len} bytes)")]
    TruncatedFrame { len: usize },
    #[error("probe request carries no SSID element")]
    MissingSsidElement,
    #[error("SSID of {0} bytes exceeds 32")]
    OversizedSsid(usize),
}

/// Result of running a whole capture through the probe parser.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub probes: Vec<ProbeRequest>,
    pub frames_read: usize,
    /// Well-formed frames that were not probe requests.
    pub other_frames: usize,
    /// Records that failed radiotap or 802.11 parsing.
    pub malformed: usize,
}

pub fn extract_probes(capture: &CaptureFile) -> Extraction {
    let mut out = Extraction { frames_read: capture.records.len(), ..Default::default() };
    for record in &capture.records {
        let frame = match capture.link_type {
            LinkType::Bare80211 => Ok(&record.data[..]),
            LinkType::Radiotap => radiotap_payload_offset(&record.data).map(|at| &record.data[at..]),
        };
        match frame.and_then(|f| parse_probe_request(f, record.timestamp)) {
            Ok(Some(probe)) => out.probes.push(probe),
            Ok(None) => out.other_frames += 1,
            Err(_) => out.malformed += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::synth::{Builder, FrameSpec};
    use super::*;
    use chrono::{DateTime, Utc};
    use proptest::prelude::*;

    fn at(sec: i64) -> DateTime<Utc> {
        DateTime::from_timestamp(sec, 0).unwrap()
    }

    fn mac(last: u8) -> MacAddress {
        MacAddress::new([0x80, 0x7a, 0xbf, 0x3b, 0xbd, last])
    }

    #[test]
    fn empty_capture() {
        let cap = CaptureFile { link_type: LinkType::Radiotap, records: vec![] };
        assert_eq!(extract_probes(&cap), Extraction::default());
    }

    #[test]
    fn probes_and_beacons() {
        let mut b = Builder::new(LinkType::Radiotap);
        for i in 0..3 {
            b.push(at(100 + i), FrameSpec::probe(mac(i as u8), None));
            if i < 2 {
                b.push(at(100 + i), FrameSpec::Beacon { bssid: mac(0xee) });
            }
        }
        let ex = extract_probes(&read_capture(&b.to_pcap()).unwrap());
        assert_eq!(ex.probes.len(), 3);
        assert_eq!(ex.other_frames, 2);
        assert_eq!(ex.malformed, 0);
        assert_eq!(ex.frames_read, 5);
    }

    #[test]
    fn truncated_frame_is_counted() {
        let mut b = Builder::new(LinkType::Bare80211);
        b.push(at(1), FrameSpec::probe(mac(1), Some(b"UCD Wireless")));
        b.push(at(2), FrameSpec::Raw(vec![0x40, 0x00, 0x00, 0x00, 0xff, 0xff]));
        b.push(at(3), FrameSpec::probe(mac(2), None));
        let ex = extract_probes(&read_capture(&b.to_pcap()).unwrap());
        assert_eq!(ex.probes.len(), 2);
        assert_eq!(ex.malformed, 1);
    }

    fn arb_probe() -> impl Strategy<Value = (MacAddress, Option<Vec<u8>>, i64, u32)> {
        (
            any::<[u8; 6]>().prop_map(MacAddress::new),
            proptest::option::of(proptest::collection::vec(any::<u8>(), 1..=32)),
            0i64..4_000_000_000,
            0u32..1_000_000,
        )
    }

    proptest! {
        #[test]
        fn builder_round_trip(
            probes in proptest::collection::vec(arb_probe(), 0..12),
            radiotap in any::<bool>(),
            big_endian in any::<bool>(),
        ) {
            let link = if radiotap { LinkType::Radiotap } else { LinkType::Bare80211 };
            let mut b = Builder::new(link);
            b.big_endian(big_endian);
            let mut expected = Vec::new();
            for (m, ssid, sec, usec) in &probes {
                let ts = DateTime::from_timestamp(*sec, usec * 1000).unwrap();
                b.push(ts, FrameSpec::probe(*m, ssid.as_deref()));
                expected.push(ProbeRequest {
                    mac: *m,
                    ssid: ssid.clone().map(|s| Ssid::new(s).unwrap()),
                    captured_at: ts,
                });
            }
            let cap = read_capture(&b.to_pcap()).unwrap();
            let ex = extract_probes(&cap);
            prop_assert_eq!(ex.probes.len(), cap.records.len());
            prop_assert_eq!(ex.probes, expected);
        }

        #[test]
        fn never_oversized_and_bounded(frames in proptest::collection::vec(proptest::collection::vec(any::<u8>(), 0..80), 0..20)) {
            let mut b = Builder::new(LinkType::Bare80211);
            for (i, f) in frames.iter().enumerate() {
                let mut f = f.clone();
                if i % 2 == 0 && !f.is_empty() {
                    f[0] = 0x40;
                }
                b.push(at(i as i64), FrameSpec::Raw(f));
            }
            let cap = read_capture(&b.to_pcap()).unwrap();
            let ex = extract_probes(&cap);
            prop_assert!(ex.probes.len() <= cap.records.len());
            prop_assert_eq!(ex.probes.len() + ex.other_frames + ex.malformed, cap.records.len());
            for p in &ex.probes {
                prop_assert!(p.ssid.as_ref().is_none_or(|s| s.as_bytes().len() <= MAX_SSID_LEN));
            }
        }
    }
}
