//! Shared input builders for the benchmark harness.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use eamine_core::{Observation, ObservationKind, RunConfig};

/// Directory of the three-zone evaluation fixture.
pub fn netinvm_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/netinvm")
}

pub fn netinvm_config() -> RunConfig {
    RunConfig::load(&netinvm_dir().join("config.toml")).expect("fixture config parses")
}

/// Scan document with `hosts` addressable hosts, two open ports each.
pub fn synthetic_scan(hosts: usize) -> String {
    let mut xml = String::from("<nmaprun>");
    for i in 0..hosts {
        let ip = format!("10.{}.{}.{}", (i >> 16) & 0xff, (i >> 8) & 0xff, (i & 0xfe) + 1);
        xml.push_str(&format!(
            "<host><status state=\"up\"/>\
             <address addr=\"{ip}\" addrtype=\"ipv4\"/>\
             <address addr=\"00:50:56:{:02x}:{:02x}:{:02x}\" addrtype=\"mac\"/>\
             <ports>\
             <port protocol=\"tcp\" portid=\"22\"><state state=\"open\"/></port>\
             <port protocol=\"tcp\" portid=\"443\"><state state=\"open\"/></port>\
             </ports>\
             <os><osmatch name=\"Linux 5.0 - 5.4\"/></os>\
             </host>",
            (i >> 16) & 0xff,
            (i >> 8) & 0xff,
            i & 0xff
        ));
    }
    xml.push_str("</nmaprun>");
    xml
}

/// Event stream of `cases` cases with `length` activities each, activity
/// labels cycling through a small alphabet.
pub fn synthetic_event_log(cases: usize, length: usize) -> Vec<Observation> {
    let mut events = Vec::with_capacity(cases * length);
    let mut seq = 0u64;
    for case in 0..cases {
        for step in 0..length {
            let attrs: BTreeMap<String, String> = [
                ("case_id".to_string(), format!("c{case}")),
                ("activity".to_string(), format!("act-{}", (case + step) % 7)),
            ]
            .into();
            let ts = format!(
                "2026-01-01T{:02}:{:02}:{:02}Z",
                (step / 3600) % 24,
                (step / 60) % 60,
                step % 60
            )
            .parse()
            .ok();
            events.push(Observation::new(
                "bench.csv",
                seq,
                ObservationKind::ProcessEvent,
                attrs,
                ts,
            ));
            seq += 1;
        }
    }
    events
}
