//! Rule-based mapping from observations to the generic model.
//!
//! Identity rules: a scanned host becomes a Node keyed by MAC when one was
//! seen, otherwise by IP; an open port becomes an ApplicationInterface
//! keyed `ip:port/proto`; a well-known port additionally implies an
//! ITService keyed per node. SNMP system names rename the agent's node,
//! system descriptions attach as attributes, and account rows become
//! BusinessActors. Flow and process-event observations pass through here
//! untouched; path derivation and process mining consume them later.
//! Log events have no mapping rule yet and are reported as unmapped.

pub mod enrich;

use crate::catalogue::{Catalogue, ElementKind, RelationKind};
use crate::error::Result;
use crate::finding::{Finding, FindingCategory, Severity};
use crate::model::GenericModel;
use crate::observation::{Observation, ObservationKind};
use crate::reason::tables::PortServices;
use crate::store::ObservationStore;

pub use enrich::{apply_manual_enrichment, EnrichmentDoc, EnrichSummary};

/// What mapping produced: the initial model plus mapping findings.
#[derive(Debug, Default)]
pub struct MapOutcome {
    pub model: GenericModel,
    pub findings: Vec<Finding>,
    /// Observations no rule consumed (excluding flows and process events,
    /// which later stages own).
    pub unmapped: u64,
}

/// Finds the Node an IP address belongs to, preferring observed nodes over
/// dummies, then lowest element id.
pub fn node_by_ip<'a>(model: &'a GenericModel, ip: &str) -> Option<&'a crate::model::GenericElement> {
    let mut best: Option<&crate::model::GenericElement> = None;
    for elem in model.of_kind(ElementKind::Node) {
        if elem.attrs.get("ip").map(String::as_str) != Some(ip) {
            continue;
        }
        match best {
            None => best = Some(elem),
            Some(current) if current.dummy && !elem.dummy => best = Some(elem),
            _ => {}
        }
    }
    best
}

/// Runs every mapping rule over the store in its canonical order. Pure
/// function of the store contents: same store, same model.
pub fn map_observations(
    store: &ObservationStore,
    cat: &Catalogue,
    ports: &PortServices,
) -> Result<MapOutcome> {
    let mut out = MapOutcome::default();
    for obs in store.iter() {
        match obs.kind {
            ObservationKind::Host => map_host(&mut out, cat, obs),
            ObservationKind::Port => map_port(&mut out, cat, ports, obs)?,
            ObservationKind::SnmpRecord => map_snmp(&mut out, cat, obs),
            ObservationKind::Flow | ObservationKind::ProcessEvent => {}
            ObservationKind::LogEvent => {
                out.unmapped += 1;
                out.findings.push(Finding::new(
                    "map/log-event",
                    FindingCategory::UnmappedObservation,
                    Severity::Info,
                    &obs.obs_id,
                    format!(
                        "no mapping rule consumes log events yet; {} from {} kept in the store only",
                        obs.attr("app").unwrap_or("?"),
                        obs.attr("host").unwrap_or("?"),
                    ),
                ));
            }
        }
    }
    out.model.check_integrity()?;
    Ok(out)
}

/// The natural key a host observation implies: MAC evidence outranks IP.
pub fn host_key(obs: &Observation) -> Option<String> {
    if let Some(mac) = obs.attr("mac") {
        return Some(format!("mac:{mac}"));
    }
    obs.attr("ip").map(|ip| format!("ip:{ip}"))
}

fn map_host(out: &mut MapOutcome, cat: &Catalogue, obs: &Observation) {
    let Some(key) = host_key(obs) else {
        out.unmapped += 1;
        return;
    };
    let ip = obs.attr("ip").unwrap_or_default().to_string();
    let (node, _) = out.model.upsert_element(
        ElementKind::Node,
        &key,
        &ip,
        cat.automation(ElementKind::Node),
        false,
    );
    out.model.push_provenance(&node, &obs.obs_id);
    for field in ["ip", "mac", "vendor", "os_guess"] {
        if let Some(value) = obs.attr(field) {
            out.model.merge_attr(&node, field, value, Some(&obs.obs_id));
        }
    }
}

fn map_port(
    out: &mut MapOutcome,
    cat: &Catalogue,
    ports: &PortServices,
    obs: &Observation,
) -> Result<()> {
    let (Some(ip), Some(port), Some(proto)) = (obs.attr("ip"), obs.attr("port"), obs.attr("proto"))
    else {
        out.unmapped += 1;
        return Ok(());
    };
    let ip = ip.to_string();
    let port_label = port.to_string();
    let proto = proto.to_string();

    let node = match node_by_ip(&out.model, &ip) {
        Some(elem) => elem.elem_id.clone(),
        None => {
            // A port seen without its host record still proves a node.
            let (node, _) = out.model.upsert_element(
                ElementKind::Node,
                &format!("ip:{ip}"),
                &ip,
                cat.automation(ElementKind::Node),
                false,
            );
            out.model.merge_attr(&node, "ip", &ip, Some(&obs.obs_id));
            out.model.push_provenance(&node, &obs.obs_id);
            node
        }
    };
    let node_key = out.model.element(&node).expect("node stored").natural_key.clone();

    let iface_key = format!("{ip}:{port_label}/{proto}");
    let (iface, _) = out.model.upsert_element(
        ElementKind::ApplicationInterface,
        &iface_key,
        &iface_key,
        cat.automation(ElementKind::ApplicationInterface),
        false,
    );
    out.model.push_provenance(&iface, &obs.obs_id);
    for field in ["ip", "port", "proto", "service_name"] {
        if let Some(value) = obs.attr(field) {
            out.model.merge_attr(&iface, field, value, Some(&obs.obs_id));
        }
    }
    let prov = vec![obs.obs_id.clone()];
    out.model
        .add_relation(RelationKind::Assignment, &node, &iface, &prov)?;

    // Only well-known ports imply a service; the table is authoritative
    // over whatever name the scanner guessed.
    let service = port_label
        .parse::<u16>()
        .ok()
        .and_then(|p| ports.service_for(p))
        .map(str::to_string);
    if let Some(service) = service {
        let svc_key = format!("{node_key}/svc:{service}");
        let (svc, _) = out.model.upsert_element(
            ElementKind::ItService,
            &svc_key,
            &service,
            cat.automation(ElementKind::ItService),
            false,
        );
        out.model.push_provenance(&svc, &obs.obs_id);
        out.model
            .add_relation(RelationKind::Assignment, &node, &svc, &prov)?;
        out.model
            .add_relation(RelationKind::Serving, &svc, &iface, &prov)?;
    }
    Ok(())
}

fn map_snmp(out: &mut MapOutcome, cat: &Catalogue, obs: &Observation) {
    let field = obs.attr("field").unwrap_or_default();
    let value = obs.attr("value").unwrap_or_default().to_string();
    match field {
        "account" => {
            let (actor, _) = out.model.upsert_element(
                ElementKind::BusinessActor,
                &format!("account:{value}"),
                &value,
                cat.automation(ElementKind::BusinessActor),
                false,
            );
            out.model.push_provenance(&actor, &obs.obs_id);
        }
        "sys_name" | "sys_descr" => {
            let Some(node) = obs
                .attr("agent_ip")
                .and_then(|ip| node_by_ip(&out.model, ip))
                .map(|e| e.elem_id.clone())
            else {
                out.unmapped += 1;
                out.findings.push(Finding::new(
                    "map/snmp",
                    FindingCategory::UnmappedObservation,
                    Severity::Info,
                    &obs.obs_id,
                    format!(
                        "snmp {field} record has no node to attach to (agent ip {})",
                        obs.attr("agent_ip").unwrap_or("unknown"),
                    ),
                ));
                return;
            };
            out.model.push_provenance(&node, &obs.obs_id);
            if field == "sys_descr" {
                out.model.merge_attr(&node, "sys_descr", &value, Some(&obs.obs_id));
                return;
            }
            let kept = {
                let elem = out.model.element_mut(&node).expect("node stored");
                if elem.name_source.is_none() {
                    elem.name = value.clone();
                    elem.name_source = Some(obs.source_id.clone());
                    None
                } else if elem.name == value {
                    None
                } else {
                    Some(elem.name.clone())
                }
            };
            if let Some(kept) = kept {
                out.model
                    .record_conflict(&node, "name", &kept, &value, Some(&obs.obs_id));
            }
        }
        _ => {
            out.unmapped += 1;
        }
    }
}
