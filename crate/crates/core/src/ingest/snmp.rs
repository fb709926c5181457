//! Adapter for `snmpwalk` output.
//!
//! Each useful line has the shape `OID = TYPE: value`. Only three kinds of
//! record feed the pipeline: the system name, the system description, and
//! entries under a configurable account subtree whose values are account
//! names. Everything else a walk contains is deliberately ignored. The
//! walked agent's address comes from the source descriptor or, failing
//! that, from an IP-shaped file name stem.

use std::collections::BTreeMap;
use std::path::Path;

use crate::addr;
use crate::error::Result;
use crate::ingest::ParseOutcome;
use crate::observation::{Observation, ObservationKind, SourceDescriptor};

/// svUserTable of the LAN Manager MIB: one row per local account.
pub const DEFAULT_ACCOUNT_SUBTREE: &str = "1.3.6.1.4.1.77.1.2.25";

const SYS_NAME: &str = "1.3.6.1.2.1.1.5";
const SYS_DESCR: &str = "1.3.6.1.2.1.1.1";

/// The record kinds the adapter extracts from a walk.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnmpField {
    SysName,
    SysDescr,
    Account,
}

impl SnmpField {
    pub fn name(self) -> &'static str {
        match self {
            SnmpField::SysName => "sys_name",
            SnmpField::SysDescr => "sys_descr",
            SnmpField::Account => "account",
        }
    }
}

/// Maps an OID, numeric or MIB-named, onto the fields the pipeline uses.
pub fn classify_oid(oid: &str, account_subtree: &str) -> Option<SnmpField> {
    let numeric = normalize_numeric(oid);
    if let Some(numeric) = &numeric {
        if oid_in_subtree(numeric, SYS_NAME) {
            return Some(SnmpField::SysName);
        }
        if oid_in_subtree(numeric, SYS_DESCR) {
            return Some(SnmpField::SysDescr);
        }
        if oid_in_subtree(numeric, account_subtree) {
            return Some(SnmpField::Account);
        }
    }
    if oid.contains("sysName") {
        return Some(SnmpField::SysName);
    }
    if oid.contains("sysDescr") {
        return Some(SnmpField::SysDescr);
    }
    None
}

fn normalize_numeric(oid: &str) -> Option<String> {
    let stripped = oid.trim().trim_start_matches('.');
    let replaced = if let Some(rest) = stripped.strip_prefix("iso.") {
        format!("1.{rest}")
    } else {
        stripped.to_string()
    };
    if replaced.split('.').all(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit())) {
        Some(replaced)
    } else {
        None
    }
}

fn oid_in_subtree(oid: &str, subtree: &str) -> bool {
    oid == subtree || oid.starts_with(&format!("{subtree}."))
}

pub fn agent_ip_for(source: &SourceDescriptor) -> Option<String> {
    if let Some(ip) = &source.agent_ip {
        return addr::canonical_ip(ip);
    }
    let stem = Path::new(&source.path).file_stem()?.to_str()?;
    addr::canonical_ip(&stem.replace('_', "."))
}

pub fn parse(
    path: &str,
    content: &str,
    agent_ip: Option<&str>,
    account_subtree: &str,
) -> Result<ParseOutcome> {
    let mut outcome = ParseOutcome::default();
    let mut seq = 0u64;
    for line in content.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((oid, rest)) = line.split_once(" = ") else {
            outcome.skipped += 1;
            continue;
        };
        let oid = oid.trim();
        let Some(field) = classify_oid(oid, account_subtree) else {
            outcome.ignored += 1;
            continue;
        };
        let value = strip_type_prefix(rest).trim().trim_matches('"').to_string();
        if value.is_empty() {
            outcome.skipped += 1;
            continue;
        }
        let mut attrs: BTreeMap<String, String> = [
            ("oid".to_string(), oid.to_string()),
            ("field".to_string(), field.name().to_string()),
            ("value".to_string(), value),
        ]
        .into_iter()
        .collect();
        if let Some(ip) = agent_ip {
            attrs.insert("agent_ip".to_string(), ip.to_string());
        }
        outcome
            .observations
            .push(Observation::new(path, seq, ObservationKind::SnmpRecord, attrs, None));
        seq += 1;
    }
    Ok(outcome)
}

/// Drops the `TYPE:` marker snmpwalk prints before values.
fn strip_type_prefix(rest: &str) -> &str {
    const TYPES: [&str; 10] = [
        "STRING", "INTEGER", "OID", "IpAddress", "Timeticks", "Counter32", "Counter64",
        "Gauge32", "Hex-STRING", "OCTET STRING",
    ];
    let rest = rest.trim_start();
    for t in TYPES {
        if let Some(after) = rest.strip_prefix(t) {
            if let Some(value) = after.trim_start().strip_prefix(':') {
                return value;
            }
        }
    }
    rest
}
