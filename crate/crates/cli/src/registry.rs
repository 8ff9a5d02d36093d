use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use probelink::oui::{convert_ieee_dump, load_oui, OuiTable};
use probelink::MacAddress;

use crate::OuiCommand;

/// Load a registry file, warning about lines that were skipped. No path
/// gives an empty table.
pub(crate) fn load_registry(path: Option<&Path>) -> Result<OuiTable> {
    let Some(path) = path else {
        return Ok(OuiTable::new());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let (table, bad) = load_oui(&text);
    for line in &bad {
        eprintln!("warning: {}: {line}", path.display());
    }
    Ok(table)
}

pub(crate) fn oui(cmd: &OuiCommand) -> Result<()> {
    match cmd {
        OuiCommand::Convert { input, out } => {
            let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
            let converted = convert_ieee_dump(&text);
            fs::write(out, &converted).with_context(|| format!("writing {}", out.display()))?;
            eprintln!("{} entries", converted.lines().count());
        }
        OuiCommand::Lookup { oui, macs } => {
            let table = load_registry(Some(oui))?;
            for text in macs {
                let mac: MacAddress = text.parse()?;
                let name = table.lookup(&mac).unwrap_or(probelink::store::UNKNOWN_MANUFACTURER);
                println!("{mac}\t{name}");
            }
        }
    }
    Ok(())
}
