//! OUI registry: first three MAC octets to manufacturer name.
//!
//! The registry format is one `XX:XX:XX<TAB>Manufacturer` entry per line,
//! with `#` comments and blank lines ignored. [`convert_ieee_dump`] turns
//! the IEEE `oui.txt` listing into that form.

use std::collections::HashMap;

use crate::frame::MacAddress;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {reason}")]
pub struct MalformedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OuiTable {
    entries: HashMap<[u8; 3], String>,
}

impl OuiTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, prefix: [u8; 3], name: impl Into<String>) {
        self.entries.insert(prefix, name.into());
    }

    /// Uses the raw first three octets; locally administered addresses are
    /// looked up like any other and normally miss.
    pub fn lookup(&self, mac: &MacAddress) -> Option<&str> {
        self.entries.get(&mac.oui()).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

fn parse_prefix(text: &str) -> Option<[u8; 3]> {
    let sep = if text.contains('-') { '-' } else { ':' };
    let mut out = [0u8; 3];
    let mut parts = text.split(sep);
    for slot in out.iter_mut() {
        let part = parts.next()?;
        if part.len() != 2 || !part.bytes().all(|b| b.is_ascii_hexdigit()) {
            return None;
        }
        *slot = u8::from_str_radix(part, 16).ok()?;
    }
    parts.next().is_none().then_some(out)
}

/// Parse a registry document. Bad lines are reported and skipped.
pub fn load_oui(text: &str) -> (OuiTable, Vec<MalformedLine>) {
    let mut table = OuiTable::new();
    let mut errors = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let bad = |reason: &str| MalformedLine { line: i + 1, reason: reason.to_string() };
        let Some((prefix, name)) = line.split_once('\t') else {
            errors.push(bad("expected PREFIX<TAB>NAME"));
            continue;
        };
        let Some(prefix) = parse_prefix(prefix.trim()) else {
            errors.push(bad("prefix is not three hex octets"));
            continue;
        };
        let name = name.trim();
        if name.is_empty() {
            errors.push(bad("empty manufacturer name"));
            continue;
        }
        table.insert(prefix, name);
    }
    (table, errors)
}

/// Convert the IEEE `oui.txt` listing (`00-00-0C   (hex)\t\tCisco Systems, Inc`)
/// into registry lines. Lines not in that shape are dropped.
pub fn convert_ieee_dump(text: &str) -> String {
    let mut out = String::new();
    for line in text.lines() {
        let Some((prefix, rest)) = line.split_once("(hex)") else { continue };
        let (Some(prefix), name) = (parse_prefix(prefix.trim()), rest.trim()) else { continue };
        if name.is_empty() {
            continue;
        }
        out.push_str(&format!("{:02X}:{:02X}:{:02X}\t{}\n", prefix[0], prefix[1], prefix[2], name));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mac(s: &str) -> MacAddress {
        s.parse().unwrap()
    }

    #[test]
    fn empty_document() {
        let (t, errs) = load_oui("");
        assert!(t.is_empty());
        assert!(errs.is_empty());
        assert_eq!(t.lookup(&mac("80:7a:bf:3b:bd:d9")), None);
    }

    #[test]
    fn apple_prefix() {
        let (t, errs) = load_oui("80:7a:bf\tApple");
        assert!(errs.is_empty());
        assert_eq!(t.lookup(&mac("80:7a:bf:3b:bd:d9")), Some("Apple"));
        assert_eq!(t.lookup(&mac("80:7a:bf:00:00:01")), Some("Apple"));
        assert_eq!(t.lookup(&mac("80:7a:c0:00:00:01")), None);
    }

    #[test]
    fn malformed_lines_reported() {
        let (t, errs) = load_oui("zz:00:00\tBad");
        assert!(t.is_empty());
        assert_eq!(errs, vec![MalformedLine { line: 1, reason: "prefix is not three hex octets".into() }]);

        let doc = "# header\n\n00:03:93\tApple\nnotab\n00:03:94\t \n00:03:95\tOther\r\n";
        let (t, errs) = load_oui(doc);
        assert_eq!(t.len(), 2);
        assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), vec![4, 5]);
        assert_eq!(t.lookup(&mac("00:03:95:00:00:00")), Some("Other"));
    }

    #[test]
    fn later_duplicates_win() {
        let (t, _) = load_oui("00:03:93\tFirst\n00:03:93\tSecond");
        assert_eq!(t.lookup(&mac("00:03:93:01:02:03")), Some("Second"));
    }

    #[test]
    fn ieee_dump_conversion() {
        let dump = "OUI/MA-L\t\tOrganization\n80-7A-BF   (hex)\t\tApple, Inc.\n807ABF     (base 16)\t\tApple, Inc.\n\t\t\t\tCupertino\n";
        let converted = convert_ieee_dump(dump);
        assert_eq!(converted, "80:7A:BF\tApple, Inc.\n");
        let (t, errs) = load_oui(&converted);
        assert!(errs.is_empty());
        assert_eq!(t.lookup(&mac("80:7a:bf:3b:bd:d9")), Some("Apple, Inc."));
    }

    proptest! {
        #[test]
        fn lookup_ignores_suffix(prefix in any::<[u8; 3]>(), a in any::<[u8; 3]>(), b in any::<[u8; 3]>()) {
            let doc = format!("{:02x}:{:02x}:{:02x}\tVendor\n", prefix[0], prefix[1], prefix[2]);
            let (t, _) = load_oui(&doc);
            let m1 = MacAddress::new([prefix[0], prefix[1], prefix[2], a[0], a[1], a[2]]);
            let m2 = MacAddress::new([prefix[0], prefix[1], prefix[2], b[0], b[1], b[2]]);
            prop_assert_eq!(t.lookup(&m1), t.lookup(&m2));
            prop_assert_eq!(t.lookup(&m1), Some("Vendor"));
        }

        #[test]
        fn self_concatenation_is_idempotent(lines in proptest::collection::vec((any::<[u8; 3]>(), "[A-Za-z]{1,8}"), 0..10)) {
            let doc: String = lines
                .iter()
                .map(|(p, n)| format!("{:02x}:{:02x}:{:02x}\t{}\n", p[0], p[1], p[2], n))
                .collect();
            let (once, _) = load_oui(&doc);
            let (twice, _) = load_oui(&format!("{doc}{doc}"));
            prop_assert_eq!(once, twice);
        }
    }
}
