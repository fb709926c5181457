//! Harmonized evidence records and the sources they come from.
//!
//! Every adapter reduces its input to flat [`Observation`] records: a kind,
//! a string attribute map, and an optional timestamp. Attribute keys are
//! fixed per kind:
//!
//! | kind            | required                                      | optional                         |
//! |-----------------|-----------------------------------------------|----------------------------------|
//! | `host`          | `ip`                                           | `mac`, `vendor`, `os_guess`      |
//! | `port`          | `ip`, `port`, `proto`                          | `service_name`                   |
//! | `flow`          | `src_ip`, `dst_ip`, `src_port`, `dst_port`, `proto` |                             |
//! | `log-event`     | `host`, `app`, `message`                       |                                  |
//! | `snmp-record`   | `oid`, `field`, `value`                        | `agent_ip`                       |
//! | `process-event` | `case_id`, `activity`                          | (timestamp is a top-level field) |
//!
//! Addresses are stored in canonical form (see [`crate::addr`]). The
//! observation id is a content hash, so re-reading the same source yields
//! the same ids.

use std::collections::BTreeMap;
use std::fmt;

use chrono::{DateTime, Utc};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ids;

/// The input format a source is parsed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdapterKind {
    NmapXml,
    FlowCsv,
    Syslog,
    SnmpWalk,
    EventLogCsv,
}

impl AdapterKind {
    pub const ALL: [AdapterKind; 5] = [
        AdapterKind::NmapXml,
        AdapterKind::FlowCsv,
        AdapterKind::Syslog,
        AdapterKind::SnmpWalk,
        AdapterKind::EventLogCsv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdapterKind::NmapXml => "nmap-xml",
            AdapterKind::FlowCsv => "flow-csv",
            AdapterKind::Syslog => "syslog",
            AdapterKind::SnmpWalk => "snmp-walk",
            AdapterKind::EventLogCsv => "event-log-csv",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let folded = name.trim().to_ascii_lowercase();
        AdapterKind::ALL.into_iter().find(|a| a.name() == folded)
    }
}

impl fmt::Display for AdapterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for AdapterKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for AdapterKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        AdapterKind::parse(&s).ok_or_else(|| D::Error::custom(format!("unknown adapter {s:?}")))
    }
}

/// One configured input. The `path` string is the source identity: it is
/// hashed into observation ids exactly as written in the configuration, so
/// runs are reproducible regardless of where the tree is checked out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceDescriptor {
    pub path: String,
    pub adapter: AdapterKind,
    /// Lower values win attribute conflicts when evidence overlaps.
    pub priority: u32,
    /// Address of the walked agent, for `snmp-walk` sources whose records
    /// should attach to a known node. Canonical form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_ip: Option<String>,
}

/// What an observation describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObservationKind {
    Host,
    Port,
    Flow,
    LogEvent,
    SnmpRecord,
    ProcessEvent,
}

impl ObservationKind {
    pub const ALL: [ObservationKind; 6] = [
        ObservationKind::Host,
        ObservationKind::Port,
        ObservationKind::Flow,
        ObservationKind::LogEvent,
        ObservationKind::SnmpRecord,
        ObservationKind::ProcessEvent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObservationKind::Host => "host",
            ObservationKind::Port => "port",
            ObservationKind::Flow => "flow",
            ObservationKind::LogEvent => "log-event",
            ObservationKind::SnmpRecord => "snmp-record",
            ObservationKind::ProcessEvent => "process-event",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let folded = name.trim().to_ascii_lowercase();
        ObservationKind::ALL.into_iter().find(|k| k.name() == folded)
    }

    /// The complete attribute key set an adapter may emit for this kind.
    pub fn allowed_attrs(self) -> &'static [&'static str] {
        match self {
            ObservationKind::Host => &["ip", "mac", "vendor", "os_guess"],
            ObservationKind::Port => &["ip", "port", "proto", "service_name"],
            ObservationKind::Flow => &["src_ip", "dst_ip", "src_port", "dst_port", "proto"],
            ObservationKind::LogEvent => &["host", "app", "message"],
            ObservationKind::SnmpRecord => &["oid", "field", "value", "agent_ip"],
            ObservationKind::ProcessEvent => &["case_id", "activity"],
        }
    }
}

impl fmt::Display for ObservationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for ObservationKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ObservationKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ObservationKind::parse(&s)
            .ok_or_else(|| D::Error::custom(format!("unknown observation kind {s:?}")))
    }
}

/// One harmonized evidence record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub obs_id: String,
    /// The source path as written in the configuration.
    pub source_id: String,
    /// Position within the source, in input order.
    pub seq: u64,
    pub kind: ObservationKind,
    pub attrs: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
}

impl Observation {
    pub fn new(
        source_id: &str,
        seq: u64,
        kind: ObservationKind,
        attrs: BTreeMap<String, String>,
        timestamp: Option<DateTime<Utc>>,
    ) -> Self {
        let obs_id = ids::observation_id(source_id, seq, kind.name(), &attrs);
        Observation {
            obs_id,
            source_id: source_id.to_string(),
            seq,
            kind,
            attrs,
            timestamp,
        }
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observation_id_is_content_derived() {
        let attrs: BTreeMap<String, String> =
            [("ip".to_string(), "10.5.0.10".to_string())].into_iter().collect();
        let a = Observation::new("scan.xml", 0, ObservationKind::Host, attrs.clone(), None);
        let b = Observation::new("scan.xml", 0, ObservationKind::Host, attrs, None);
        assert_eq!(a.obs_id, b.obs_id);
        assert_eq!(a, b);
    }

    #[test]
    fn adapter_and_kind_names_round_trip() {
        for a in AdapterKind::ALL {
            assert_eq!(AdapterKind::parse(a.name()), Some(a));
        }
        for k in ObservationKind::ALL {
            assert_eq!(ObservationKind::parse(k.name()), Some(k));
        }
        assert_eq!(AdapterKind::parse("NMAP-XML"), Some(AdapterKind::NmapXml));
        assert_eq!(AdapterKind::parse("csv"), None);
    }

    #[test]
    fn serde_round_trip_preserves_timestamp() {
        let ts: DateTime<Utc> = "2026-01-12T03:14:07Z".parse().unwrap();
        let attrs: BTreeMap<String, String> = [
            ("case_id".to_string(), "c1".to_string()),
            ("activity".to_string(), "A".to_string()),
        ]
        .into_iter()
        .collect();
        let obs = Observation::new("log.csv", 3, ObservationKind::ProcessEvent, attrs, Some(ts));
        let json = serde_json::to_string(&obs).unwrap();
        let back: Observation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, obs);
    }
}
