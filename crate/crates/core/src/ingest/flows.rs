//! Adapter for connection records in CSV form.
//!
//! The file must carry the exact header
//! `src_ip,dst_ip,src_port,dst_port,proto`; anything else is a schema
//! error. Rows with unparseable addresses or ports are skipped, not fatal.

use std::collections::BTreeMap;

use crate::addr;
use crate::error::{Error, Result};
use crate::ingest::ParseOutcome;
use crate::observation::{Observation, ObservationKind};

const HEADER: [&str; 5] = ["src_ip", "dst_ip", "src_port", "dst_port", "proto"];

pub fn parse(path: &str, content: &str) -> Result<ParseOutcome> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(content.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::Schema {
            path: path.to_string(),
            message: format!("unreadable header: {e}"),
        })?
        .clone();
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != HEADER {
        return Err(Error::Schema {
            path: path.to_string(),
            message: format!("expected header {:?}, found {:?}", HEADER.join(","), got.join(",")),
        });
    }

    let mut outcome = ParseOutcome::default();
    let mut seq = 0u64;
    for record in reader.records() {
        let Ok(record) = record else {
            outcome.skipped += 1;
            continue;
        };
        if record.len() != HEADER.len() {
            outcome.skipped += 1;
            continue;
        }
        let src_ip = addr::canonical_ip(&record[0]);
        let dst_ip = addr::canonical_ip(&record[1]);
        let src_port = record[2].trim().parse::<u16>().ok();
        let dst_port = record[3].trim().parse::<u16>().ok();
        let proto = record[4].trim().to_ascii_lowercase();
        let (Some(src_ip), Some(dst_ip), Some(src_port), Some(dst_port)) =
            (src_ip, dst_ip, src_port, dst_port)
        else {
            outcome.skipped += 1;
            continue;
        };
        if proto.is_empty() {
            outcome.skipped += 1;
            continue;
        }
        let attrs: BTreeMap<String, String> = [
            ("src_ip".to_string(), src_ip),
            ("dst_ip".to_string(), dst_ip),
            ("src_port".to_string(), src_port.to_string()),
            ("dst_port".to_string(), dst_port.to_string()),
            ("proto".to_string(), proto),
        ]
        .into_iter()
        .collect();
        outcome
            .observations
            .push(Observation::new(path, seq, ObservationKind::Flow, attrs, None));
        seq += 1;
    }
    Ok(outcome)
}
