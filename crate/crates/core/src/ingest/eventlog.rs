//! Adapter for process event logs in CSV form.
//!
//! The file must carry the exact header `case_id,activity,timestamp`.
//! Timestamps are RFC 3339; a naive `YYYY-MM-DDTHH:MM:SS` is accepted and
//! read as UTC. Rows with unparseable timestamps or empty fields are
//! skipped. Rows are emitted in file order; sorting happens during mining.

use std::collections::BTreeMap;

use chrono::{DateTime, NaiveDateTime, Utc};

use crate::error::{Error, Result};
use crate::ingest::ParseOutcome;
use crate::observation::{Observation, ObservationKind};

const HEADER: [&str; 3] = ["case_id", "activity", "timestamp"];

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
        let case_id = record[0].trim();
        let activity = record[1].trim();
        let Some(timestamp) = parse_timestamp(record[2].trim()) else {
            outcome.skipped += 1;
            continue;
        };
        if case_id.is_empty() || activity.is_empty() {
            outcome.skipped += 1;
            continue;
        }
        let attrs: BTreeMap<String, String> = [
            ("case_id".to_string(), case_id.to_string()),
            ("activity".to_string(), activity.to_string()),
        ]
        .into_iter()
        .collect();
        outcome.observations.push(Observation::new(
            path,
            seq,
            ObservationKind::ProcessEvent,
            attrs,
            Some(timestamp),
        ));
        seq += 1;
    }
    Ok(outcome)
}

fn parse_timestamp(raw: &str) -> Option<DateTime<Utc>> {
    if let Ok(ts) = DateTime::parse_from_rfc3339(raw) {
        return Some(ts.with_timezone(&Utc));
    }
    NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .map(|naive| naive.and_utc())
}
