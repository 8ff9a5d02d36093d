//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line; the process fails if
//! any criterion does.

use std::sync::{Arc, RwLock};
use std::time::{Duration, Instant};

use chrono::DateTime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use probelink::frame::{extract_probes, read_capture};
use probelink::identify::{run_identification, AssignmentMode, IdentifyParams};
use probelink::oui::{load_oui, OuiTable};
use probelink::simlab::{default_roster, run_experiment, ExperimentConfig, Transcript};
use probelink::store::{dedup_scan, GeoPoint, ScanBatch, Sighting, SsidLabel, Store};
use probelink::MacAddress;
use probelink_cli::{sweep, SweepGrid};
use probelink_ingest::{decode_batch, encode_batch, serve, ServeConfig};

const SEEDS: std::ops::RangeInclusive<u64> = 1..=20;

const EXAMPLE_DOCUMENT: &str = r#"{
    "80:7a:bf:3b:bd:d9":{
    "detections":[
    ["2016-12-04 19:23:54","UCD Wireless",[53.3461, -6.3032]],
    ["2016-12-04 19:24:32","Broadcast",[53.3461, -6.3032]]],
    "times_seen":2,
    "manufacturer":"Apple"}
}"#;

type Criterion = (&'static str, fn() -> Outcome, u64);

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(outcome: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    let detail = format!("{}; {:.2}s (limit {}s)", outcome.detail, elapsed.as_secs_f64(), limit.as_secs());
    check(outcome.pass && elapsed < limit, detail)
}

// ---- hand-assembled capture bytes -------------------------------------

fn u16b(v: u16, big: bool) -> [u8; 2] {
    if big { v.to_be_bytes() } else { v.to_le_bytes() }
}

fn u32b(v: u32, big: bool) -> [u8; 4] {
    if big { v.to_be_bytes() } else { v.to_le_bytes() }
}

fn mgmt_header(fc: u8, addr1: [u8; 6], addr2: [u8; 6], addr3: [u8; 6]) -> Vec<u8> {
    let mut f = vec![fc, 0x00, 0x00, 0x00];
    f.extend_from_slice(&addr1);
    f.extend_from_slice(&addr2);
    f.extend_from_slice(&addr3);
    f.extend_from_slice(&[0x10, 0x00]);
    f
}

fn probe_bytes(sender: [u8; 6], ssid: &[u8]) -> Vec<u8> {
    let mut f = mgmt_header(0x40, [0xff; 6], sender, [0xff; 6]);
    f.push(0x00);
    f.push(ssid.len() as u8);
    f.extend_from_slice(ssid);
    f.extend_from_slice(&[0x01, 0x04, 0x82, 0x84, 0x8b, 0x96]);
    f
}

fn beacon_bytes(bssid: [u8; 6], ssid: &[u8]) -> Vec<u8> {
    let mut f = mgmt_header(0x80, [0xff; 6], bssid, bssid);
    f.extend_from_slice(&[0; 8]);
    f.extend_from_slice(&[0x64, 0x00, 0x01, 0x04]);
    f.push(0x00);
    f.push(ssid.len() as u8);
    f.extend_from_slice(ssid);
    f
}

fn probe_response_bytes(bssid: [u8; 6], to: [u8; 6], ssid: &[u8]) -> Vec<u8> {
    let mut f = beacon_bytes(bssid, ssid);
    f[0] = 0x50;
    f[4..10].copy_from_slice(&to);
    f
}

fn pcap_bytes(link: u32, big: bool, records: &[(u32, u32, Vec<u8>)]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&u32b(0xa1b2c3d4, big));
    out.extend_from_slice(&u16b(2, big));
    out.extend_from_slice(&u16b(4, big));
    out.extend_from_slice(&[0; 8]);
    out.extend_from_slice(&u32b(65535, big));
    out.extend_from_slice(&u32b(link, big));
    for (sec, usec, frame) in records {
        let data: Vec<u8> = if link == 127 {
            let mut r = vec![0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x00, 0x00];
            r.extend_from_slice(frame);
            r
        } else {
            frame.clone()
        };
        out.extend_from_slice(&u32b(*sec, big));
        out.extend_from_slice(&u32b(*usec, big));
        out.extend_from_slice(&u32b(data.len() as u32, big));
        out.extend_from_slice(&u32b(data.len() as u32, big));
        out.extend_from_slice(&data);
    }
    out
}

const PHONE: [u8; 6] = [0x80, 0x7a, 0xbf, 0x3b, 0xbd, 0xd9];
const LAPTOP: [u8; 6] = [0x00, 0x1b, 0x63, 0x12, 0x34, 0x56];
const AP: [u8; 6] = [0x00, 0x00, 0x0c, 0xaa, 0xbb, 0xcc];

fn golden_records() -> Vec<(u32, u32, Vec<u8>)> {
    vec![
        (1480879434, 0, probe_bytes(PHONE, b"UCD Wireless")),
        (1480879435, 0, beacon_bytes(AP, b"UCD Wireless")),
        (1480879436, 500, probe_bytes(LAPTOP, b"")),
        (1480879437, 0, probe_response_bytes(AP, LAPTOP, b"UCD Wireless")),
        (1480879472, 999_999, probe_bytes(PHONE, b"")),
        (1480879473, 0, probe_bytes(LAPTOP, b"eduroam")),
    ]
}

fn criterion_1() -> Outcome {
    let expected: Vec<(MacAddress, Option<Vec<u8>>, i64, u32)> = vec![
        (MacAddress::new(PHONE), Some(b"UCD Wireless".to_vec()), 1480879434, 0),
        (MacAddress::new(LAPTOP), None, 1480879436, 500),
        (MacAddress::new(PHONE), None, 1480879472, 999_999),
        (MacAddress::new(LAPTOP), Some(b"eduroam".to_vec()), 1480879473, 0),
    ];
    let mut failures = Vec::new();
    for (link, big) in [(127, false), (127, true), (105, false), (105, true)] {
        let bytes = pcap_bytes(link, big, &golden_records());
        let got = match read_capture(&bytes) {
            Ok(c) => {
                let ex = extract_probes(&c);
                if ex.frames_read != 6 || ex.other_frames != 2 || ex.malformed != 0 {
                    failures.push(format!("link {link} big {big}: counts {}/{}/{}", ex.frames_read, ex.other_frames, ex.malformed));
                }
                ex.probes
                    .iter()
                    .map(|p| {
                        let us = p.captured_at.timestamp_subsec_micros();
                        (p.mac, p.ssid.as_ref().map(|s| s.as_bytes().to_vec()), p.captured_at.timestamp(), us)
                    })
                    .collect::<Vec<_>>()
            }
            Err(e) => {
                failures.push(format!("link {link} big {big}: {e}"));
                continue;
            }
        };
        if got != expected {
            failures.push(format!("link {link} big {big}: got {got:?}"));
        }
    }
    check(failures.is_empty(), if failures.is_empty() { "4 fixtures byte-exact".into() } else { failures.join("; ") })
}

fn criterion_2() -> Outcome {
    let mut records = Vec::new();
    for burst in 0..8u32 {
        for m in 0..100u32 {
            let mac = [0x02, 0x00, 0x00, 0x00, (m >> 8) as u8, m as u8];
            records.push((1_500_000_000 + burst * 5, m * 10, probe_bytes(mac, b"")));
        }
    }
    let capture = read_capture(&pcap_bytes(127, false, &records)).expect("synthetic capture parses");
    let probes = extract_probes(&capture).probes;
    let sightings = dedup_scan(&probes, None);
    let earliest_ok = sightings.iter().all(|s| s.seen_at.timestamp() == 1_500_000_000);
    check(
        probes.len() == 800 && sightings.len() == 100 && earliest_ok,
        format!("{} probes -> {} sightings", probes.len(), sightings.len()),
    )
}

fn apple_oui() -> OuiTable {
    load_oui("80:7A:BF\tApple\n").0
}

fn http(agent: &ureq::Agent, method: &str, url: &str, body: &str) -> (u16, String) {
    let mut resp = match method {
        "POST" => agent.post(url).header("X-Device-Id", "acceptance").send(body),
        _ => agent.get(url).call(),
    }
    .expect("service reachable");
    (resp.status().as_u16(), resp.body_mut().read_to_string().unwrap_or_default())
}

fn criterion_3() -> Outcome {
    let mac: MacAddress = "80:7a:bf:3b:bd:d9".parse().unwrap();
    let batch = match decode_batch(EXAMPLE_DOCUMENT) {
        Ok(b) => b.with_device_id("acceptance"),
        Err(e) => return check(false, format!("decode failed: {e}")),
    };
    let store = Arc::new(RwLock::new(Store::in_memory()));
    let config = ServeConfig { bind: "127.0.0.1:0".parse().unwrap(), worker_threads: 2 };
    let handle = serve(store.clone(), Arc::new(apple_oui()), &config).expect("bind loopback");
    let agent: ureq::Agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
    let base = handle.endpoint();

    let (status, _) = http(&agent, "POST", &format!("{base}/upload"), EXAMPLE_DOCUMENT);
    let report = store.read().unwrap().query_mac(&mac);
    let Some(report) = report else {
        return check(false, format!("upload status {status}, MAC not stored"));
    };
    let re_exported = encode_batch(
        &ScanBatch::spanning("", report.sightings.iter().map(|s| s.sighting.clone()).collect()),
        &apple_oui(),
    );
    let same_doc = serde_json::from_str::<serde_json::Value>(&re_exported).ok()
        == serde_json::from_str::<serde_json::Value>(EXAMPLE_DOCUMENT).ok();

    let (_, before) = http(&agent, "GET", &format!("{base}/stats"), "");
    let (bad_status, _) = http(&agent, "POST", &format!("{base}/upload"), "{\"80:7a:bf:3b:bd:d9\": [");
    let (_, after) = http(&agent, "GET", &format!("{base}/stats"), "");
    drop(handle);

    let pass = status == 200
        && batch.sightings().len() == 2
        && report.record.times_seen == 2
        && report.record.manufacturer == "Apple"
        && report.sightings.len() == 2
        && same_doc
        && bad_status == 400
        && before == after;
    check(
        pass,
        format!(
            "times_seen={} manufacturer={} sightings={} re-export identical={same_doc} malformed status={bad_status} stats unchanged={}",
            report.record.times_seen,
            report.record.manufacturer,
            report.sightings.len(),
            before == after
        ),
    )
}

fn transcript(people: usize, lectures: usize, att: f64, probe: f64, seed: u64) -> Transcript {
    run_experiment(&ExperimentConfig::new(people, lectures, att, probe, seed), &default_roster(people))
        .expect("valid experiment")
}

fn accuracy_series(probe: f64, mode: AssignmentMode) -> Vec<Vec<f64>> {
    let params = IdentifyParams { mode, ..Default::default() };
    SEEDS
        .map(|seed| run_identification(&transcript(50, 30, 0.7, probe, seed), &params).expect("identification runs").accuracy)
        .collect()
}

fn mean_final(series: &[Vec<f64>]) -> f64 {
    series.iter().map(|s| *s.last().unwrap()).sum::<f64>() / series.len() as f64
}

fn criterion_4() -> Outcome {
    let series = accuracy_series(0.95, AssignmentMode::DuplicatesAllowed);
    let n = series.len() as f64;
    let mean: Vec<f64> = (0..30).map(|i| series.iter().map(|s| s[i]).sum::<f64>() / n).collect();
    let smooth: Vec<f64> = mean.windows(3).map(|w| w.iter().sum::<f64>() / 3.0).collect();
    let drops: Vec<(usize, f64)> = smooth
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[1] < w[0])
        .map(|(i, w)| (i + 2, w[0] - w[1]))
        .collect();
    let final_acc = mean_final(&series);
    check(
        final_acc >= 0.90 && drops.is_empty(),
        format!("mean final accuracy {final_acc:.4} (need >= 0.90); smoothed decreases {drops:?}"),
    )
}

fn criterion_5() -> Outcome {
    let high = mean_final(&accuracy_series(0.95, AssignmentMode::DuplicatesAllowed));
    let low = mean_final(&accuracy_series(0.60, AssignmentMode::DuplicatesAllowed));
    check(high - low >= 0.10, format!("probe 0.95 -> {high:.4}, probe 0.60 -> {low:.4}, gap {:.4} (need >= 0.10)", high - low))
}

fn criterion_6() -> Outcome {
    let grid = SweepGrid {
        people: 50,
        lectures: vec![5, 10, 15, 20, 25, 30],
        probe: vec![0.6, 0.7, 0.8, 0.9, 0.95],
        attendance: vec![0.5, 0.6, 0.7, 0.8, 0.9],
        seeds: (1..=3).collect(),
        noise: 0,
        noise_pool: 0,
        params: IdentifyParams::default(),
    };
    let samples = match sweep(&grid) {
        Ok(s) => s,
        Err(e) => return check(false, format!("sweep failed: {e}")),
    };
    let fit = match probelink::identify::fit_regression(&samples) {
        Ok(f) => f,
        Err(e) => return check(false, format!("fit failed: {e}")),
    };
    let c = fit.coefficients;
    let pass = samples.len() >= 400 && c.iter().all(|&b| b > 0.0) && fit.r_square >= 0.5;
    check(
        pass,
        format!(
            "{} samples; coefficients observation={:.5} probe={:.5} attendance={:.5}; r_square={:.4}",
            samples.len(),
            c[0],
            c[1],
            c[2],
            fit.r_square
        ),
    )
}

fn criterion_7() -> Outcome {
    let dup = mean_final(&accuracy_series(0.95, AssignmentMode::DuplicatesAllowed));
    let unique = mean_final(&accuracy_series(0.95, AssignmentMode::UniqueAssignments));
    check(dup >= unique, format!("duplicates allowed {dup:.4}, unique assignments {unique:.4}"))
}

fn timed(transcripts: &[Transcript]) -> Duration {
    let params = IdentifyParams::default();
    (0..5)
        .map(|_| {
            let start = Instant::now();
            for t in transcripts {
                std::hint::black_box(run_identification(t, &params).expect("identification runs"));
            }
            start.elapsed()
        })
        .min()
        .unwrap()
}

fn criterion_8() -> Outcome {
    let set = |people, lectures| (1..=4).map(|seed| transcript(people, lectures, 0.7, 0.95, seed)).collect::<Vec<_>>();
    let base = timed(&set(50, 30));
    let people = timed(&set(100, 30));
    let lectures = timed(&set(50, 60));
    let rp = people.as_secs_f64() / base.as_secs_f64();
    let rl = lectures.as_secs_f64() / base.as_secs_f64();
    check(rp < 2.5 && rl < 2.5, format!("people x2 -> {rp:.2}x, lectures x2 -> {rl:.2}x (limit 2.5x)"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut store = Store::in_memory();
    store.add_owner("Ada", "ada@example.org").unwrap();
    store.add_owner("Grace", "").unwrap();
    store.link_owner("Ada", "80:7a:bf:3b:bd:d9".parse().unwrap()).unwrap();
    store.link_owner("Grace", "02:00:00:00:00:07".parse().unwrap()).unwrap();
    let before = store.state().owner_bytes();
    let oui = apple_oui();
    let ssids = ["UCD Wireless", "eduroam", "Broadcast", "home"];
    let mut applied = 0;
    for _ in 0..100 {
        let n = rng.random_range(0..20);
        let sightings = (0..n)
            .map(|_| {
                let mac = if rng.random_bool(0.2) {
                    MacAddress::new(PHONE)
                } else {
                    MacAddress::new([0x02, 0, 0, 0, 0, rng.random_range(0..32)])
                };
                Sighting {
                    mac,
                    ssid: SsidLabel::from_text(ssids[rng.random_range(0..ssids.len())]),
                    seen_at: DateTime::from_timestamp(1_480_000_000 + rng.random_range(0..86_400), 0).unwrap(),
                    gps: rng.random_bool(0.5).then(|| GeoPoint::new(53.3461, -6.3032).unwrap()),
                }
            })
            .collect();
        let batch = ScanBatch::spanning(format!("dev-{}", rng.random_range(0..4)), sightings);
        // through the wire format, as a device would send it
        let decoded = decode_batch(&encode_batch(&batch, &oui)).expect("own encoding decodes");
        store.upsert_batch(&decoded.with_device_id(batch.device_id()), &oui).unwrap();
        applied += 1;
    }
    let after = store.state().owner_bytes();
    check(
        before == after,
        format!("{applied} batches, {} sightings stored, owner table identical={}", store.stats().total_sightings, before == after),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("frame parsing golden suite", criterion_1, 1),
        ("dedup factor of eight", criterion_2, 1),
        ("wire round-trip", criterion_3, 1),
        ("identification convergence", criterion_4, 30),
        ("probe-probability dominance", criterion_5, 60),
        ("regression direction", criterion_6, 300),
        ("assignment-mode ordering", criterion_7, 60),
        ("complexity scaling", criterion_8, 120),
        ("owner-table immutability", criterion_9, 10),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match std::panic::catch_unwind(run) {
            Ok(o) => o,
            Err(_) => check(false, "panicked"),
        };
        let outcome = within(outcome, start.elapsed(), Duration::from_secs(*limit));
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {verdict} ({})", i + 1, outcome.detail);
        if !outcome.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
