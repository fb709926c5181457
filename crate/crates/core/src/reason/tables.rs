//! Lookup tables the rules draw on: OUI prefixes, port-based OS heuristics,
//! and well-known port services.
//!
//! Each table is a tab-separated text file with a `# eamine:<name> v1`
//! header line. Built-in copies ship with the crate; a configuration can
//! point at replacement files.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::{Error, Result};

fn data_lines<'a>(
    text: &'a str,
    expected_header: &str,
    what: &str,
) -> Result<impl Iterator<Item = &'a str>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default().trim();
    if header != expected_header {
        return Err(Error::RuleFile(format!(
            "{what} table must start with {expected_header:?}, found {header:?}"
        )));
    }
    Ok(lines
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#')))
}

/// MAC address prefix table: maps the first three octets to a device type
/// and a vendor label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuiTable {
    entries: BTreeMap<String, (String, String)>,
}

impl OuiTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for line in data_lines(text, "# eamine:oui v1", "oui")? {
            let fields: Vec<&str> = line.split('\t').collect();
            let [prefix, device_type, vendor] = fields[..] else {
                return Err(Error::RuleFile(format!("bad oui row {line:?}")));
            };
            let prefix = prefix.trim().to_ascii_lowercase();
            if prefix.split(':').count() != 3 {
                return Err(Error::RuleFile(format!("bad oui prefix {prefix:?}")));
            }
            entries.insert(prefix, (device_type.trim().to_string(), vendor.trim().to_string()));
        }
        if entries.is_empty() {
            return Err(Error::RuleFile("oui table is empty".to_string()));
        }
        Ok(OuiTable { entries })
    }

    pub fn builtin() -> Self {
        OuiTable::parse(include_str!("../../data/oui.tsv")).expect("bundled oui table parses")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        OuiTable::parse(&text)
    }

    /// Looks up a canonical MAC by its first three octets.
    pub fn by_mac(&self, mac: &str) -> Option<(&str, &str)> {
        let prefix = mac.get(0..8)?;
        self.entries
            .get(prefix)
            .map(|(t, v)| (t.as_str(), v.as_str()))
    }

    /// Fallback: matches a scanner-reported vendor string against the
    /// vendor labels, containment in either direction, case-insensitive.
    pub fn by_vendor(&self, vendor: &str) -> Option<(&str, &str)> {
        let folded = vendor.trim().to_ascii_lowercase();
        if folded.is_empty() {
            return None;
        }
        self.entries.values().find_map(|(t, v)| {
            let label = v.to_ascii_lowercase();
            (label.contains(&folded) || folded.contains(&label))
                .then_some((t.as_str(), v.as_str()))
        })
    }
}

/// Ordered OS heuristics: the first, largest port set fully contained in a
/// node's open ports wins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OsHeuristics {
    entries: Vec<(BTreeSet<u16>, String)>,
}

impl OsHeuristics {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for line in data_lines(text, "# eamine:os-heuristics v1", "os heuristics")? {
            let Some((ports, label)) = line.split_once('\t') else {
                return Err(Error::RuleFile(format!("bad os heuristic row {line:?}")));
            };
            let mut set = BTreeSet::new();
            for p in ports.split(',') {
                let port: u16 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::RuleFile(format!("bad port {p:?} in os heuristics")))?;
                set.insert(port);
            }
            if set.is_empty() || label.trim().is_empty() {
                return Err(Error::RuleFile(format!("bad os heuristic row {line:?}")));
            }
            entries.push((set, label.trim().to_string()));
        }
        if entries.is_empty() {
            return Err(Error::RuleFile("os heuristics table is empty".to_string()));
        }
        Ok(OsHeuristics { entries })
    }

    pub fn builtin() -> Self {
        OsHeuristics::parse(include_str!("../../data/os-heuristics.tsv"))
            .expect("bundled os heuristics parse")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        OsHeuristics::parse(&text)
    }

    /// Best label for a set of open ports: the matching entry with the most
    /// ports, first in file order on ties.
    pub fn guess(&self, open_ports: &BTreeSet<u16>) -> Option<&str> {
        self.entries
            .iter()
            .filter(|(ports, _)| ports.is_subset(open_ports))
            .max_by(|(a, _), (b, _)| a.len().cmp(&b.len()))
            .map(|(_, label)| label.as_str())
    }
}

/// Well-known port numbers and the service each one implies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortServices {
    entries: BTreeMap<u16, String>,
}

impl PortServices {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for line in data_lines(text, "# eamine:port-services v1", "port services")? {
            let Some((port, name)) = line.split_once('\t') else {
                return Err(Error::RuleFile(format!("bad port service row {line:?}")));
            };
            let port: u16 = port
                .trim()
                .parse()
                .map_err(|_| Error::RuleFile(format!("bad port {port:?} in port services")))?;
            if name.trim().is_empty() {
                return Err(Error::RuleFile(format!("empty service name for port {port}")));
            }
            entries.insert(port, name.trim().to_string());
        }
        if entries.is_empty() {
            return Err(Error::RuleFile("port services table is empty".to_string()));
        }
        Ok(PortServices { entries })
    }

    pub fn builtin() -> Self {
        PortServices::parse(include_str!("../../data/port-services.tsv"))
            .expect("bundled port services parse")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PortServices::parse(&text)
    }

    pub fn service_for(&self, port: u16) -> Option<&str> {
        self.entries.get(&port).map(String::as_str)
    }
}
