//! Adapter for classic BSD-style syslog lines.
//!
//! Recognizes `MMM dd HH:MM:SS host tag[pid]: message`. The timestamp has
//! no year and no zone, so it is dropped rather than guessed; the pid is
//! stripped from the tag. Non-matching non-empty lines count as skipped.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;

use crate::error::Result;
use crate::ingest::ParseOutcome;
use crate::observation::{Observation, ObservationKind};

fn line_pattern() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^(?P<ts>[A-Z][a-z]{2}\s+\d{1,2}\s\d{2}:\d{2}:\d{2})\s+(?P<host>\S+)\s+(?P<tag>[^:\s]+?)(?:\[(?P<pid>\d+)\])?:\s*(?P<msg>.*)$",
        )
        .expect("syslog pattern compiles")
    })
}

pub fn parse(path: &str, content: &str) -> Result<ParseOutcome> {
    let mut outcome = ParseOutcome::default();
    let mut seq = 0u64;
    for line in content.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let Some(caps) = line_pattern().captures(line) else {
            outcome.skipped += 1;
            continue;
        };
        let attrs: BTreeMap<String, String> = [
            ("host".to_string(), caps["host"].to_string()),
            ("app".to_string(), caps["tag"].to_string()),
            ("message".to_string(), caps["msg"].trim().to_string()),
        ]
        .into_iter()
        .collect();
        outcome
            .observations
            .push(Observation::new(path, seq, ObservationKind::LogEvent, attrs, None));
        seq += 1;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_line_is_parsed() {
        let outcome = parse(
            "sys.log",
            "Jan 12 03:14:07 dmzb ftpd[812]: connection from 10.5.0.10\n",
        )
        .unwrap();
        assert_eq!(outcome.observations.len(), 1);
        let obs = &outcome.observations[0];
        assert_eq!(obs.kind, ObservationKind::LogEvent);
        assert_eq!(obs.attr("host"), Some("dmzb"));
        assert_eq!(obs.attr("app"), Some("ftpd"));
        assert_eq!(obs.attr("message"), Some("connection from 10.5.0.10"));
        assert!(obs.timestamp.is_none(), "yearless timestamps are dropped");
    }

    #[test]
    fn tag_without_pid_is_accepted() {
        let outcome = parse("sys.log", "Feb  3 12:00:00 gw sshd: session opened\n").unwrap();
        assert_eq!(outcome.observations[0].attr("app"), Some("sshd"));
    }

    #[test]
    fn garbage_lines_are_counted_not_fatal() {
        let content = "Jan 12 03:14:07 dmzb ftpd[812]: connection from 10.5.0.10\n\
                       this is not syslog\n\
                       \n\
                       Jan 12 03:20:11 inta sshd[4410]: Accepted publickey for ops\n";
        let outcome = parse("sys.log", content).unwrap();
        assert_eq!(outcome.observations.len(), 2);
        assert_eq!(outcome.skipped, 1, "blank lines are not counted");
    }

    #[test]
    fn empty_input_is_empty_outcome() {
        assert_eq!(parse("sys.log", "").unwrap(), ParseOutcome::default());
    }
}
