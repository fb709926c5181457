//! Adapter for nmap XML reports.
//!
//! Emits one `host` observation per host that is up, followed by one `port`
//! observation per open port of that host, in document order. Hosts that
//! are down, hosts without a usable IP address, and ports in any state
//! other than `open` are counted as ignored. Hostnames are not extracted;
//! naming is left to later stages.

use std::collections::BTreeMap;

use roxmltree::{Document, Node};

use crate::addr;
use crate::error::{Error, Result};
use crate::ingest::ParseOutcome;
use crate::observation::{Observation, ObservationKind};

pub fn parse(path: &str, content: &str) -> Result<ParseOutcome> {
    // Real nmap reports carry a `<!DOCTYPE nmaprun>` declaration.
    let opts = roxmltree::ParsingOptions {
        allow_dtd: true,
        ..roxmltree::ParsingOptions::default()
    };
    let doc = Document::parse_with_options(content, opts).map_err(|e| {
        let pos = e.pos();
        Error::Xml {
            path: path.to_string(),
            line: pos.row,
            message: e.to_string(),
        }
    })?;
    let root = doc.root_element();
    if root.tag_name().name() != "nmaprun" {
        return Err(Error::UnsupportedFormat {
            path: path.to_string(),
            message: format!("expected <nmaprun> root, found <{}>", root.tag_name().name()),
        });
    }

    let mut outcome = ParseOutcome::default();
    let mut seq = 0u64;
    for host in root.children().filter(|n| n.has_tag_name("host")) {
        if !host_is_up(&host) {
            outcome.ignored += 1;
            continue;
        }
        let mut attrs = BTreeMap::new();
        let mut ip = None;
        for address in host.children().filter(|n| n.has_tag_name("address")) {
            let raw = address.attribute("addr").unwrap_or_default();
            match address.attribute("addrtype") {
                Some("ipv4") | Some("ipv6") => {
                    if let Some(canonical) = addr::canonical_ip(raw) {
                        ip.get_or_insert(canonical);
                    }
                }
                Some("mac") => {
                    if let Some(mac) = addr::canonical_mac(raw) {
                        attrs.insert("mac".to_string(), mac);
                    }
                    if let Some(vendor) = address.attribute("vendor") {
                        if !vendor.is_empty() {
                            attrs.insert("vendor".to_string(), vendor.to_string());
                        }
                    }
                }
                _ => {}
            }
        }
        let Some(ip) = ip else {
            outcome.ignored += 1;
            continue;
        };
        attrs.insert("ip".to_string(), ip.clone());
        if let Some(os) = best_os_match(&host) {
            attrs.insert("os_guess".to_string(), os);
        }
        outcome
            .observations
            .push(Observation::new(path, seq, ObservationKind::Host, attrs, None));
        seq += 1;

        for port in host
            .children()
            .filter(|n| n.has_tag_name("ports"))
            .flat_map(|ports| ports.children().filter(|n| n.has_tag_name("port")))
        {
            let state_open = port
                .children()
                .find(|n| n.has_tag_name("state"))
                .and_then(|s| s.attribute("state"))
                .map(|s| s == "open")
                .unwrap_or(false);
            if !state_open {
                outcome.ignored += 1;
                continue;
            }
            let (Some(portid), Some(proto)) = (port.attribute("portid"), port.attribute("protocol"))
            else {
                outcome.skipped += 1;
                continue;
            };
            if portid.parse::<u16>().is_err() {
                outcome.skipped += 1;
                continue;
            }
            let mut pattrs = BTreeMap::new();
            pattrs.insert("ip".to_string(), ip.clone());
            pattrs.insert("port".to_string(), portid.to_string());
            pattrs.insert("proto".to_string(), proto.to_ascii_lowercase());
            if let Some(service) = port
                .children()
                .find(|n| n.has_tag_name("service"))
                .and_then(|s| s.attribute("name"))
            {
                if !service.is_empty() {
                    pattrs.insert("service_name".to_string(), service.to_string());
                }
            }
            outcome
                .observations
                .push(Observation::new(path, seq, ObservationKind::Port, pattrs, None));
            seq += 1;
        }
    }
    Ok(outcome)
}

fn host_is_up(host: &Node) -> bool {
    host.children()
        .find(|n| n.has_tag_name("status"))
        .and_then(|s| s.attribute("state"))
        .map(|s| s == "up")
        .unwrap_or(true)
}

fn best_os_match(host: &Node) -> Option<String> {
    host.children()
        .find(|n| n.has_tag_name("os"))?
        .children()
        .find(|n| n.has_tag_name("osmatch"))?
        .attribute("name")
        .map(str::to_string)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE_HOST: &str = r#"<?xml version="1.0"?>
<nmaprun scanner="nmap" start="1700000000">
  <host>
    <status state="up" reason="arp-response"/>
    <address addr="10.5.0.10" addrtype="ipv4"/>
    <address addr="00:50:56:00:00:0A" addrtype="mac" vendor="VMware"/>
    <ports>
      <port protocol="tcp" portid="22">
        <state state="open" reason="syn-ack"/>
        <service name="ssh" method="table"/>
      </port>
      <port protocol="tcp" portid="23">
        <state state="closed" reason="reset"/>
      </port>
    </ports>
    <os>
      <osmatch name="Linux 5.0 - 5.4" accuracy="95"/>
    </os>
  </host>
  <host>
    <status state="down" reason="no-response"/>
    <address addr="10.5.0.99" addrtype="ipv4"/>
  </host>
</nmaprun>
"#;

    #[test]
    fn up_host_yields_host_then_open_ports() {
        let outcome = parse("scan.xml", SINGLE_HOST).unwrap();
        assert_eq!(outcome.observations.len(), 2);
        assert_eq!(outcome.ignored, 2, "down host and closed port");
        assert_eq!(outcome.skipped, 0);

        let host = &outcome.observations[0];
        assert_eq!(host.kind, ObservationKind::Host);
        assert_eq!(host.attr("ip"), Some("10.5.0.10"));
        assert_eq!(host.attr("mac"), Some("00:50:56:00:00:0a"));
        assert_eq!(host.attr("vendor"), Some("VMware"));
        assert_eq!(host.attr("os_guess"), Some("Linux 5.0 - 5.4"));

        let port = &outcome.observations[1];
        assert_eq!(port.kind, ObservationKind::Port);
        assert_eq!(port.attr("ip"), Some("10.5.0.10"));
        assert_eq!(port.attr("port"), Some("22"));
        assert_eq!(port.attr("proto"), Some("tcp"));
        assert_eq!(port.attr("service_name"), Some("ssh"));
    }

    #[test]
    fn report_without_hosts_is_empty_not_an_error() {
        let outcome = parse("scan.xml", "<nmaprun scanner=\"nmap\"></nmaprun>").unwrap();
        assert_eq!(outcome, ParseOutcome::default());
    }

    #[test]
    fn malformed_xml_reports_line() {
        let err = parse("scan.xml", "<nmaprun>\n<host>\n</nmaprun>").unwrap_err();
        match err {
            Error::Xml { path, line, .. } => {
                assert_eq!(path, "scan.xml");
                assert!(line >= 2, "line was {line}");
            }
            other => panic!("expected xml error, got {other}"),
        }
    }

    #[test]
    fn wrong_root_is_unsupported_format() {
        let err = parse("scan.xml", "<scan></scan>").unwrap_err();
        assert!(matches!(err, Error::UnsupportedFormat { .. }));
    }

    #[test]
    fn fixture_dmz_host_exposes_three_services() {
        let outcome = parse(
            "dmz.xml",
            include_str!("../../tests/fixtures/netinvm/dmz.xml"),
        )
        .unwrap();
        let ports: Vec<&str> = outcome
            .observations
            .iter()
            .filter(|o| o.kind == ObservationKind::Port)
            .map(|o| o.attr("port").unwrap())
            .collect();
        assert_eq!(ports, vec!["21", "80", "443"]);
    }

    #[test]
    fn host_without_address_is_ignored() {
        let xml = "<nmaprun><host><status state=\"up\"/></host></nmaprun>";
        let outcome = parse("scan.xml", xml).unwrap();
        assert!(outcome.observations.is_empty());
        assert_eq!(outcome.ignored, 1);
    }
}
