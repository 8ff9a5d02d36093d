use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use probelink::store::Store;
use probelink::MacAddress;

use crate::{OwnerCommand, ReportArgs};

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

pub(crate) fn report(args: &ReportArgs) -> Result<()> {
    let store = Store::open(&args.store)?;
    let stats = store.stats();
    println!("{}", serde_json::to_string_pretty(&stats)?);
    let manufacturers = store.manufacturer_counts();
    println!("manufacturer\tmacs");
    for (name, count) in manufacturers.iter().take(args.top) {
        println!("{name}\t{count}");
    }

    let Some(dir) = &args.out_dir else {
        return Ok(());
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write(&dir.join("stats.json"), serde_json::to_string_pretty(&stats)?.as_bytes())?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["manufacturer", "macs"])?;
    for (name, count) in &manufacturers {
        csv.write_record([name.as_str(), &count.to_string()])?;
    }
    write(&dir.join("manufacturers.csv"), &csv.into_inner()?)?;

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["hour", "sightings"])?;
    for (hour, count) in store.hourly_counts() {
        csv.write_record([hour.format("%Y-%m-%d %H:00").to_string(), count.to_string()])?;
    }
    write(&dir.join("hourly.csv"), &csv.into_inner()?)?;

    let reports: Vec<_> = store.records().filter_map(|r| store.query_mac(&r.address)).collect();
    write(&dir.join("macs.json"), serde_json::to_string_pretty(&reports)?.as_bytes())?;
    write(&dir.join("sightings.json"), serde_json::to_string_pretty(store.sightings())?.as_bytes())?;
    Ok(())
}

pub(crate) fn owner(cmd: &OwnerCommand) -> Result<()> {
    match cmd {
        OwnerCommand::Add { store, name, contact } => Store::open(store)?.add_owner(name, contact)?,
        OwnerCommand::Link { store, name, mac } => {
            let mac: MacAddress = mac.parse()?;
            Store::open(store)?.link_owner(name, mac)?;
        }
        OwnerCommand::List { store } => {
            for o in Store::open(store)?.owners() {
                let macs: Vec<String> = o.linked_macs.iter().map(|m| m.to_string()).collect();
                println!("{}\t{}\t{}", o.name, o.contact, macs.join(","));
            }
        }
    }
    Ok(())
}
