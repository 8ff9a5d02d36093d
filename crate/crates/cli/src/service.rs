use std::fs;
use std::sync::{Arc, RwLock};

use anyhow::{Context, Result};

use probelink::store::Store;
use probelink_ingest::{decode_batch, ServeConfig};

use crate::registry::load_registry;
use crate::{ServeArgs, UploadArgs};

pub(crate) fn upload(args: &UploadArgs) -> Result<()> {
    let text = fs::read_to_string(&args.batch).with_context(|| format!("reading {}", args.batch.display()))?;
    let batch = decode_batch(&text)?.with_device_id(args.device_id.as_str());
    let summary = probelink_ingest::upload(&args.endpoint, &batch, &load_registry(args.oui.as_deref())?)?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

pub(crate) fn serve(args: &ServeArgs) -> Result<()> {
    let mut store = Store::open(&args.store)?;
    if let Some(path) = &args.locations {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let n = store.load_ssid_locations(&text)?;
        eprintln!("loaded {n} SSID locations");
    }
    let oui = load_registry(args.oui.as_deref())?;
    let config = ServeConfig { bind: args.bind, worker_threads: args.workers };
    let handle = probelink_ingest::serve(Arc::new(RwLock::new(store)), Arc::new(oui), &config)?;
    println!("listening on {}", handle.endpoint());
    handle.wait()?;
    Ok(())
}
