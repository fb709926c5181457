//! Rule-based completion of the generic model.
//!
//! Six operations run in a fixed order: subnet derivation, communication
//! path derivation, device classification, operating system estimation,
//! dummy insertion, and duplicate accounting. Each operation re-checks the
//! model invariants when it finishes.
//!
//! Every operation is idempotent against its own output: consequents are
//! guarded by checks on the model ("does this node already have system
//! software?") and findings are guarded by per-subject marks stored in the
//! model, so running the whole pass twice leaves the model unchanged and
//! emits nothing new. Evidence is monotonic: no operation removes
//! provenance.

pub mod tables;

use std::collections::{BTreeMap, BTreeSet};

use crate::addr;
use crate::catalogue::{Confidence, ElementKind, RelationKind};
use crate::error::{Error, Result};
use crate::finding::{Finding, FindingCategory, Severity};
use crate::model::GenericModel;
use crate::observation::ObservationKind;
use crate::store::ObservationStore;

pub use tables::{OsHeuristics, OuiTable, PortServices};

/// Tunable inputs to the rules.
#[derive(Clone, Debug)]
pub struct RuleConfig {
    /// Prefix length used to fold node addresses into networks.
    pub ipv4_prefix_len: u8,
    /// Minimum frequency for a mined directly-follows edge to survive.
    pub dfg_edge_threshold: u64,
    pub oui: OuiTable,
    pub os: OsHeuristics,
    pub ports: PortServices,
}

impl Default for RuleConfig {
    fn default() -> Self {
        RuleConfig {
            ipv4_prefix_len: 24,
            dfg_edge_threshold: 1,
            oui: OuiTable::builtin(),
            os: OsHeuristics::builtin(),
            ports: PortServices::builtin(),
        }
    }
}

impl RuleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(8..=30).contains(&self.ipv4_prefix_len) {
            return Err(Error::Config(format!(
                "ipv4_prefix_len {} outside 8..=30",
                self.ipv4_prefix_len
            )));
        }
        Ok(())
    }
}

/// Runs all operations in canonical order and returns the findings of this
/// pass.
pub fn run_reasoning(
    model: &mut GenericModel,
    store: &ObservationStore,
    cfg: &RuleConfig,
) -> Result<Vec<Finding>> {
    cfg.validate()?;
    let mut findings = Vec::new();
    derive_networks(model, cfg, &mut findings)?;
    model.check_integrity()?;
    derive_paths(model, store, &mut findings)?;
    model.check_integrity()?;
    classify_devices(model, cfg, &mut findings)?;
    model.check_integrity()?;
    estimate_os(model, cfg, &mut findings)?;
    model.check_integrity()?;
    insert_dummies(model, &mut findings)?;
    model.check_integrity()?;
    dedup_merge(model, store, &mut findings)?;
    model.check_integrity()?;
    Ok(findings)
}

fn emit(
    model: &mut GenericModel,
    findings: &mut Vec<Finding>,
    rule: &str,
    category: FindingCategory,
    severity: Severity,
    subject: &str,
    message: String,
) {
    if model.mark_reported(format!("{rule}:{}:{subject}", category.name())) {
        findings.push(Finding::new(rule, category, severity, subject, message));
    }
}

fn dummy_finding(
    model: &mut GenericModel,
    findings: &mut Vec<Finding>,
    rule: &str,
    subject: &str,
    message: String,
) {
    emit(
        model,
        findings,
        rule,
        FindingCategory::DummyInserted,
        Severity::Warning,
        subject,
        message,
    );
}

/// Folds every observed node address into a CommunicationNetwork and
/// associates the node with it. Only observed (non-dummy) nodes imply
/// networks; invented endpoints carry no topology evidence.
pub fn derive_networks(
    model: &mut GenericModel,
    cfg: &RuleConfig,
    findings: &mut Vec<Finding>,
) -> Result<()> {
    const RULE: &str = "derive-networks";
    let nodes: Vec<(String, Option<String>, Vec<String>)> = model
        .of_kind(ElementKind::Node)
        .filter(|n| !n.dummy)
        .map(|n| (n.elem_id.clone(), n.attrs.get("ip").cloned(), n.provenance.clone()))
        .collect();
    for (node, ip, provenance) in nodes {
        let cidr = ip.as_deref().and_then(|ip| addr::ipv4_subnet(ip, cfg.ipv4_prefix_len));
        let Some(cidr) = cidr else {
            let what = match ip {
                Some(ip) => format!("address {ip:?} is not subnettable IPv4"),
                None => "no address evidence".to_string(),
            };
            emit(
                model,
                findings,
                RULE,
                FindingCategory::LowConfidence,
                Severity::Verify,
                &node,
                format!("network derivation skipped: {what}"),
            );
            continue;
        };
        let (net, _) = model.upsert_element(
            ElementKind::CommunicationNetwork,
            &format!("net:{cidr}"),
            &cidr,
            Confidence::Auto,
            false,
        );
        for obs in &provenance {
            model.push_provenance(&net, obs);
        }
        model.add_relation(RelationKind::Association, &node, &net, &provenance)?;
    }
    Ok(())
}

/// Derives one Path element per communicating node pair from flow
/// observations. Unknown endpoints become dummy nodes so that observed
/// traffic is never dropped on the floor. Flows inside one node are
/// skipped.
pub fn derive_paths(
    model: &mut GenericModel,
    store: &ObservationStore,
    findings: &mut Vec<Finding>,
) -> Result<()> {
    const RULE: &str = "derive-paths";
    // ip -> node id, observed nodes shadowing dummies.
    let mut index: BTreeMap<String, String> = BTreeMap::new();
    for node in model.of_kind(ElementKind::Node) {
        if let Some(ip) = node.attrs.get("ip") {
            match index.get(ip) {
                None => {
                    index.insert(ip.clone(), node.elem_id.clone());
                }
                Some(current) => {
                    let current_dummy = model.element(current).map(|e| e.dummy).unwrap_or(false);
                    if current_dummy && !node.dummy {
                        index.insert(ip.clone(), node.elem_id.clone());
                    }
                }
            }
        }
    }

    let flows: Vec<(String, String, String)> = store
        .of_kind(ObservationKind::Flow)
        .filter_map(|o| {
            Some((
                o.attr("src_ip")?.to_string(),
                o.attr("dst_ip")?.to_string(),
                o.obs_id.clone(),
            ))
        })
        .collect();

    for (src_ip, dst_ip, obs_id) in flows {
        let src = endpoint_node(model, &mut index, &src_ip, RULE, findings);
        let dst = endpoint_node(model, &mut index, &dst_ip, RULE, findings);
        if src == dst {
            continue;
        }
        let (a, b) = if src <= dst { (src, dst) } else { (dst, src) };
        let name = {
            let label = |id: &str| {
                let elem = model.element(id).expect("endpoint stored");
                elem.attrs.get("ip").cloned().unwrap_or_else(|| elem.name.clone())
            };
            format!("{} <-> {}", label(&a), label(&b))
        };
        let prov = vec![obs_id];
        let (path, _) = model.upsert_element(
            ElementKind::Path,
            &format!("path:{a}|{b}"),
            &name,
            Confidence::Auto,
            false,
        );
        for obs in &prov {
            model.push_provenance(&path, obs);
        }
        model.add_relation(RelationKind::Flow, &a, &path, &prov)?;
        model.add_relation(RelationKind::Flow, &path, &b, &prov)?;
    }
    Ok(())
}

fn endpoint_node(
    model: &mut GenericModel,
    index: &mut BTreeMap<String, String>,
    ip: &str,
    rule: &str,
    findings: &mut Vec<Finding>,
) -> String {
    if let Some(node) = index.get(ip) {
        return node.clone();
    }
    let (node, created) = model.upsert_element(
        ElementKind::Node,
        &format!("ip:{ip}"),
        ip,
        Confidence::SemiAuto,
        true,
    );
    if created {
        if let Some(elem) = model.element_mut(&node) {
            elem.attrs.insert("ip".to_string(), ip.to_string());
        }
    }
    dummy_finding(
        model,
        findings,
        rule,
        &node,
        format!("flow endpoint {ip} was never scanned; dummy node stands in for it"),
    );
    index.insert(ip.to_string(), node.clone());
    node
}

/// Attaches a Device to every node whose hardware the OUI table, or
/// failing that the scanner's vendor string, can identify. Nodes without a
/// classification get a verify-level finding instead of a guess.
pub fn classify_devices(
    model: &mut GenericModel,
    cfg: &RuleConfig,
    findings: &mut Vec<Finding>,
) -> Result<()> {
    const RULE: &str = "classify-devices";
    let nodes: Vec<String> = model.of_kind(ElementKind::Node).map(|n| n.elem_id.clone()).collect();
    for node in nodes {
        let elem = model.element(&node).expect("snapshotted");
        let key = elem.natural_key.clone();
        if model.find_by_key(ElementKind::Device, &format!("{key}/device")).is_some() {
            continue;
        }
        let mac = elem.attrs.get("mac").cloned();
        let vendor_attr = elem.attrs.get("vendor").cloned();
        let provenance = elem.provenance.clone();
        let classified = mac
            .as_deref()
            .and_then(|m| cfg.oui.by_mac(m))
            .or_else(|| vendor_attr.as_deref().and_then(|v| cfg.oui.by_vendor(v)))
            .map(|(t, v)| (t.to_string(), v.to_string()));
        let Some((device_type, vendor)) = classified else {
            let why = if mac.is_some() {
                "hardware address has no table entry"
            } else {
                "no hardware address evidence"
            };
            emit(
                model,
                findings,
                RULE,
                FindingCategory::LowConfidence,
                Severity::Verify,
                &node,
                format!("device classification skipped: {why}"),
            );
            continue;
        };
        let (device, _) = model.upsert_element(
            ElementKind::Device,
            &format!("{key}/device"),
            &device_type,
            Confidence::Auto,
            false,
        );
        model.merge_attr(&device, "device_type", &device_type, None);
        model.merge_attr(&device, "vendor", &vendor, None);
        for obs in &provenance {
            model.push_provenance(&device, obs);
        }
        model.add_relation(RelationKind::Assignment, &node, &device, &provenance)?;
    }
    Ok(())
}

/// Gives every node exactly one SystemSoftware: the scanner's fingerprint
/// when present, a port-profile heuristic otherwise, and an explicit
/// "unknown OS" dummy when there is no evidence at all.
pub fn estimate_os(
    model: &mut GenericModel,
    cfg: &RuleConfig,
    findings: &mut Vec<Finding>,
) -> Result<()> {
    const RULE: &str = "estimate-os";
    let nodes: Vec<String> = model.of_kind(ElementKind::Node).map(|n| n.elem_id.clone()).collect();
    for node in nodes {
        let has_sw = model
            .relations_from(RelationKind::Assignment, &node)
            .any(|r| {
                model
                    .element(&r.target)
                    .map(|e| e.kind == ElementKind::SystemSoftware)
                    .unwrap_or(false)
            });
        if has_sw {
            continue;
        }
        let elem = model.element(&node).expect("snapshotted");
        let key = elem.natural_key.clone();
        let os_guess = elem.attrs.get("os_guess").cloned();
        let node_prov = elem.provenance.clone();

        let (name, confidence, dummy, provenance) = if let Some(os) = os_guess {
            (os, Confidence::Auto, false, node_prov)
        } else {
            let mut ports: BTreeSet<u16> = BTreeSet::new();
            let mut port_prov: Vec<String> = Vec::new();
            for rel in model.relations_from(RelationKind::Assignment, &node) {
                if let Some(target) = model.element(&rel.target) {
                    if target.kind == ElementKind::ApplicationInterface {
                        if let Some(port) = target.attrs.get("port").and_then(|p| p.parse().ok()) {
                            ports.insert(port);
                            for obs in &target.provenance {
                                if !port_prov.contains(obs) {
                                    port_prov.push(obs.clone());
                                }
                            }
                        }
                    }
                }
            }
            match cfg.os.guess(&ports) {
                Some(label) => (label.to_string(), Confidence::SemiAuto, false, port_prov),
                None => ("unknown OS".to_string(), Confidence::SemiAuto, true, Vec::new()),
            }
        };

        let (sw, created) = model.upsert_element(
            ElementKind::SystemSoftware,
            &format!("{key}/os"),
            &name,
            confidence,
            dummy,
        );
        if !created {
            continue;
        }
        for obs in &provenance {
            model.push_provenance(&sw, obs);
        }
        model.add_relation(RelationKind::Assignment, &node, &sw, &provenance)?;
        if dummy {
            dummy_finding(
                model,
                findings,
                RULE,
                &sw,
                format!("no operating system evidence for node {key}; dummy stands in"),
            );
        }
    }
    Ok(())
}

/// Completes structurally deficient elements with flagged dummies, to a
/// fixpoint. Three completion rules: a service nothing realizes gets a
/// realizing component; a component no node hosts gets a hosting node; a
/// process nobody performs gets a performing role. Each rule fires at most
/// once per deficient element because the inserted dummy satisfies the
/// check it failed.
pub fn insert_dummies(model: &mut GenericModel, findings: &mut Vec<Finding>) -> Result<()> {
    let max_rounds = (model.element_count() + 2) * 3;
    let mut rounds = 0;
    loop {
        let mut fired = false;

        // Unrealized service -> dummy realizing component, hosted where the
        // service runs so the component rule stays quiet for it.
        let services: Vec<String> = model
            .of_kind(ElementKind::ItService)
            .map(|e| e.elem_id.clone())
            .collect();
        for svc in services {
            let realized = model.relations_to(RelationKind::Realization, &svc).any(|r| {
                model
                    .element(&r.source)
                    .map(|e| {
                        matches!(
                            e.kind,
                            ElementKind::SystemSoftware | ElementKind::ApplicationComponent
                        )
                    })
                    .unwrap_or(false)
            });
            if realized {
                continue;
            }
            let (svc_key, svc_name) = {
                let e = model.element(&svc).expect("snapshotted");
                (e.natural_key.clone(), e.name.clone())
            };
            let hosts: Vec<String> = model
                .relations_to(RelationKind::Assignment, &svc)
                .filter(|r| {
                    model
                        .element(&r.source)
                        .map(|e| e.kind == ElementKind::Node)
                        .unwrap_or(false)
                })
                .map(|r| r.source.clone())
                .collect();
            let (comp, _) = model.upsert_element(
                ElementKind::ApplicationComponent,
                &format!("dummy-component:{svc_key}"),
                &format!("{svc_name} component (dummy)"),
                Confidence::SemiAuto,
                true,
            );
            model.add_relation(RelationKind::Realization, &comp, &svc, &[])?;
            for host in hosts {
                model.add_relation(RelationKind::Assignment, &host, &comp, &[])?;
            }
            dummy_finding(
                model,
                findings,
                "insert-dummies/service-realization",
                &comp,
                format!("nothing realizes service {svc_name}; dummy component stands in"),
            );
            fired = true;
        }

        // Unhosted component -> dummy hosting node.
        let components: Vec<String> = model
            .of_kind(ElementKind::ApplicationComponent)
            .map(|e| e.elem_id.clone())
            .collect();
        for comp in components {
            let hosted = model.relations_to(RelationKind::Assignment, &comp).any(|r| {
                model
                    .element(&r.source)
                    .map(|e| e.kind == ElementKind::Node)
                    .unwrap_or(false)
            });
            if hosted {
                continue;
            }
            let (comp_key, comp_name) = {
                let e = model.element(&comp).expect("snapshotted");
                (e.natural_key.clone(), e.name.clone())
            };
            let (node, _) = model.upsert_element(
                ElementKind::Node,
                &format!("dummy-node:{comp_key}"),
                &format!("host of {comp_name} (dummy)"),
                Confidence::SemiAuto,
                true,
            );
            model.add_relation(RelationKind::Assignment, &node, &comp, &[])?;
            dummy_finding(
                model,
                findings,
                "insert-dummies/component-host",
                &node,
                format!("no node hosts component {comp_name}; dummy node stands in"),
            );
            fired = true;
        }

        // Unperformed process -> dummy performing role.
        let processes: Vec<String> = model
            .of_kind(ElementKind::TechnologyProcess)
            .map(|e| e.elem_id.clone())
            .collect();
        for proc in processes {
            let performed = model.relations_to(RelationKind::Assignment, &proc).any(|r| {
                model
                    .element(&r.source)
                    .map(|e| matches!(e.kind, ElementKind::BusinessActor | ElementKind::BusinessRole))
                    .unwrap_or(false)
            });
            if performed {
                continue;
            }
            let (proc_key, proc_name) = {
                let e = model.element(&proc).expect("snapshotted");
                (e.natural_key.clone(), e.name.clone())
            };
            let (role, _) = model.upsert_element(
                ElementKind::BusinessRole,
                &format!("dummy-role:{proc_key}"),
                &format!("role for {proc_name} (dummy)"),
                Confidence::SemiAuto,
                true,
            );
            model.add_relation(RelationKind::Assignment, &role, &proc, &[])?;
            dummy_finding(
                model,
                findings,
                "insert-dummies/process-actor",
                &role,
                format!("nobody performs process {proc_name}; dummy role stands in"),
            );
            fired = true;
        }

        if !fired {
            return Ok(());
        }
        rounds += 1;
        if rounds > max_rounds {
            return Err(Error::Integrity(format!(
                "dummy insertion did not reach a fixpoint within {max_rounds} rounds"
            )));
        }
    }
}

/// Accounts for elements whose evidence spans several sources or carries
/// conflicting values. Identity-keyed upserts already merged them; this
/// pass makes each merge visible as a finding.
pub fn dedup_merge(
    model: &mut GenericModel,
    store: &ObservationStore,
    findings: &mut Vec<Finding>,
) -> Result<()> {
    const RULE: &str = "dedup-merge";
    let elements: Vec<String> = model.elements().map(|e| e.elem_id.clone()).collect();
    for elem_id in elements {
        let elem = model.element(&elem_id).expect("snapshotted");
        let sources: BTreeSet<String> = elem
            .provenance
            .iter()
            .filter_map(|obs| store.get(obs).map(|o| o.source_id.clone()))
            .collect();
        let conflicts: Vec<String> = model
            .conflicts_for(&elem_id)
            .map(|c| {
                let origin = c
                    .dropped_obs
                    .as_deref()
                    .and_then(|obs| store.get(obs))
                    .map(|o| format!(" from {}", o.source_id))
                    .unwrap_or_default();
                format!("kept {}={:?}, dropped {:?}{origin}", c.field, c.kept, c.dropped)
            })
            .collect();
        if sources.len() < 2 && conflicts.is_empty() {
            continue;
        }
        let kind = elem.kind;
        let mut message = format!(
            "evidence from {} source(s) [{}] merged into one {kind}",
            sources.len(),
            sources.iter().cloned().collect::<Vec<_>>().join(", "),
        );
        if !conflicts.is_empty() {
            message.push_str("; ");
            message.push_str(&conflicts.join("; "));
        }
        emit(
            model,
            findings,
            RULE,
            FindingCategory::DuplicateMerged,
            Severity::Info,
            &elem_id,
            message,
        );
    }
    Ok(())
}
