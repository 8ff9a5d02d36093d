use std::fs;

use anyhow::{Context, Result};
use chrono::Duration;

use probelink::frame::{extract_probes, read_capture};
use probelink::store::{dedup_scan, GeoPoint, ScanBatch};
use probelink_ingest::wire::parse_timestamp;
use probelink_ingest::encode_batch;

use crate::registry::load_registry;
use crate::ParseArgs;

pub(crate) fn parse(args: &ParseArgs) -> Result<()> {
    let bytes = fs::read(&args.capture).with_context(|| format!("reading {}", args.capture.display()))?;
    let capture = read_capture(&bytes).with_context(|| format!("parsing {}", args.capture.display()))?;
    let extraction = extract_probes(&capture);
    let gps = match (args.lat, args.lon) {
        (Some(lat), Some(lon)) => Some(GeoPoint::new(lat, lon)?),
        _ => None,
    };
    let mut probes = extraction.probes;
    let found = probes.len();
    if let Some(start) = &args.scan_start {
        let start = parse_timestamp(start)?;
        let end = start + Duration::seconds(args.scan_len.into());
        probes.retain(|p| p.captured_at >= start && p.captured_at <= end);
    }
    let sightings = dedup_scan(&probes, gps);
    let kept = sightings.len();
    let batch = ScanBatch::spanning("", sightings);
    let document = encode_batch(&batch, &load_registry(args.oui.as_deref())?);
    match &args.out {
        Some(path) => fs::write(path, &document).with_context(|| format!("writing {}", path.display()))?,
        None => println!("{document}"),
    }
    eprintln!(
        "frames read: {}, probes found: {found}, in window: {}, sightings kept: {kept}, malformed: {}",
        extraction.frames_read,
        probes.len(),
        extraction.malformed
    );
    Ok(())
}
