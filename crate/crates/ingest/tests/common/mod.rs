#![allow(dead_code)]

use chrono::DateTime;
use probelink::oui::{load_oui, OuiTable};
use probelink::store::{GeoPoint, ScanBatch, Sighting, SsidLabel};
use probelink::MacAddress;
use proptest::prelude::*;

/// The two-detection upload example, with the detections list closed once.
pub const EXAMPLE_DOCUMENT: &str = r#"{
    "80:7a:bf:3b:bd:d9":{
    "detections":[
    ["2016-12-04 19:23:54","UCD Wireless",[53.3461, -6.3032]],
    ["2016-12-04 19:24:32","Broadcast",[53.3461, -6.3032]]],
    "times_seen":2,
    "manufacturer":"Apple"}
}"#;

pub fn oui() -> OuiTable {
    let (table, bad) = load_oui("80:7A:BF\tApple\n00:00:0C\tCisco\n");
    assert!(bad.is_empty());
    table
}

fn sighting() -> impl Strategy<Value = Sighting> {
    let mac = (prop::sample::select(vec![[0x80, 0x7a, 0xbf], [0x00, 0x00, 0x0c], [0x02, 0x11, 0x22]]), 0u8..6)
        .prop_map(|(oui, last)| MacAddress::new([oui[0], oui[1], oui[2], 0, 0, last]));
    let label = prop_oneof![
        Just(SsidLabel::Broadcast),
        "[a-zA-Z0-9 _\\-\"\\\\é]{1,32}".prop_filter_map("reserved", |s| (s != "Broadcast").then_some(SsidLabel::Named(s))),
    ];
    let gps = prop::option::of((-90.0f64..=90.0, -180.0f64..=180.0).prop_map(|(a, b)| GeoPoint::new(a, b).unwrap()));
    (mac, label, 1_400_000_000i64..1_900_000_000, gps).prop_map(|(mac, ssid, t, gps)| Sighting {
        mac,
        ssid,
        seen_at: DateTime::from_timestamp(t, 0).unwrap(),
        gps,
    })
}

pub fn batch(device: &'static str) -> impl Strategy<Value = ScanBatch> {
    prop::collection::vec(sighting(), 0..24).prop_map(move |s| ScanBatch::spanning(device, s))
}
