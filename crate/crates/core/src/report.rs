//! Verification report: everything a reviewer needs to trust or fix a
//! mined model.
//!
//! The report is data first (a serializable struct) and text second (a
//! Markdown rendering of that struct), so the same content backs both the
//! human and the machine artifact. Building it re-validates the books:
//! dummy findings must account for exactly the dummy elements in the
//! model, and finding ids must be unique.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::catalogue::Catalogue;
use crate::error::{Error, Result};
use crate::finding::{Finding, FindingCategory};
use crate::jsonfmt;
use crate::model::GenericModel;
use crate::store::ObservationStore;
use crate::transform::{ChangeLog, TargetModel};

pub const REPORT_FORMAT: &str = "eamine-report";
pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSummary {
    pub path: String,
    pub adapter: String,
    pub priority: u32,
    pub observations: usize,
    /// Rows or entries that failed to parse and were passed over.
    pub skipped: usize,
    /// Entries that parsed but carry nothing the pipeline uses.
    pub ignored: usize,
}

/// Facts about the run itself, not the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    /// Set only when the run configuration pins a timestamp; otherwise the
    /// report is timeless and byte-reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<DateTime<Utc>>,
    pub config_digest: String,
    pub target: String,
    pub sources: Vec<SourceSummary>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub observations: usize,
    pub elements: usize,
    pub relations: usize,
    pub elements_by_kind: BTreeMap<String, usize>,
    pub elements_by_layer: BTreeMap<String, usize>,
    pub dummies: usize,
    pub attr_conflicts: usize,
    pub target_elements: usize,
    pub target_relations: usize,
    pub target_by_type: BTreeMap<String, usize>,
    pub unmapped_elements: usize,
    pub findings_by_severity: BTreeMap<String, usize>,
}

/// One dummy element, as the reviewer's work list sees it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DummyEntry {
    pub elem_id: String,
    pub kind: String,
    pub name: String,
    /// Rule that inserted it.
    pub rule: String,
}

/// One element the target framework had no place for.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnmappedEntry {
    pub elem_id: String,
    pub kind: String,
    pub name: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub version: u32,
    pub meta: RunMeta,
    pub stats: Stats,
    pub dummies: Vec<DummyEntry>,
    pub unmapped: Vec<UnmappedEntry>,
    /// All findings, most urgent first.
    pub findings: Vec<Finding>,
    pub checklist: Vec<String>,
}

/// Follow-up work no automation can settle. Static by design: the list is
/// the method, the model is the input.
fn checklist() -> Vec<String> {
    [
        "Replace each dummy element with its real counterpart, or remove it with a note",
        "Confirm semi-automatic elements (services, actors, mined activities) against operational knowledge",
        "Model collaborations, interactions, and business processes in the enrichment file; observation cannot see them",
        "Check derived paths and networks against the intended segmentation",
        "Re-run on fresh observations after fixes and compare reports",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// Assembles and validates the report.
pub fn build_report(
    meta: RunMeta,
    store: &ObservationStore,
    model: &GenericModel,
    target: &TargetModel,
    changelog: &ChangeLog,
    findings: &[Finding],
    catalogue: &Catalogue,
) -> Result<Report> {
    // Finding ids must be unique: two findings with one id means a rule
    // reported the same subject twice.
    let mut seen = BTreeSet::new();
    for f in findings {
        if !seen.insert(&f.finding_id) {
            return Err(Error::Report(format!(
                "duplicate finding {} ({} on {})",
                f.finding_id, f.rule, f.subject
            )));
        }
    }

    // The dummy register comes from findings and must match the model
    // exactly; a mismatch means bookkeeping broke somewhere upstream.
    let flagged: BTreeMap<&str, &Finding> = findings
        .iter()
        .filter(|f| f.category == FindingCategory::DummyInserted)
        .map(|f| (f.subject.as_str(), f))
        .collect();
    let mut dummies = Vec::new();
    for elem in model.elements().filter(|e| e.dummy) {
        let Some(finding) = flagged.get(elem.elem_id.as_str()) else {
            return Err(Error::Report(format!(
                "dummy element {} ({} {:?}) has no insertion finding",
                elem.elem_id, elem.kind, elem.name
            )));
        };
        dummies.push(DummyEntry {
            elem_id: elem.elem_id.clone(),
            kind: elem.kind.name().to_string(),
            name: elem.name.clone(),
            rule: finding.rule.clone(),
        });
    }
    if dummies.len() != flagged.len() {
        let orphans: Vec<&str> = flagged
            .keys()
            .filter(|id| model.element(id).map(|e| !e.dummy).unwrap_or(true))
            .copied()
            .collect();
        return Err(Error::Report(format!(
            "{} dummy finding(s) point at elements that are not dummies: {}",
            orphans.len(),
            orphans.join(", ")
        )));
    }

    let mut unmapped = Vec::new();
    for elem_id in changelog.dropped_elements() {
        let Some(elem) = model.element(elem_id) else {
            return Err(Error::Report(format!(
                "change log drops unknown element {elem_id}"
            )));
        };
        unmapped.push(UnmappedEntry {
            elem_id: elem.elem_id.clone(),
            kind: elem.kind.name().to_string(),
            name: elem.name.clone(),
        });
    }

    let mut stats = Stats {
        observations: store.len(),
        elements: model.element_count(),
        relations: model.relation_count(),
        dummies: model.dummy_count(),
        attr_conflicts: model.conflicts().len(),
        target_elements: target.elements.len(),
        target_relations: target.relations.len(),
        unmapped_elements: unmapped.len(),
        ..Stats::default()
    };
    for elem in model.elements() {
        *stats.elements_by_kind.entry(elem.kind.name().to_string()).or_insert(0) += 1;
        let layer = catalogue.layer(elem.kind);
        *stats.elements_by_layer.entry(layer.name().to_string()).or_insert(0) += 1;
    }
    for elem in target.elements.values() {
        *stats.target_by_type.entry(elem.type_name.clone()).or_insert(0) += 1;
    }
    for f in findings {
        *stats
            .findings_by_severity
            .entry(f.severity.name().to_string())
            .or_insert(0) += 1;
    }

    let mut sorted_findings = findings.to_vec();
    sorted_findings.sort_by(|a, b| {
        b.severity
            .cmp(&a.severity)
            .then_with(|| a.category.name().cmp(b.category.name()))
            .then_with(|| a.finding_id.cmp(&b.finding_id))
    });

    Ok(Report {
        format: REPORT_FORMAT.to_string(),
        version: REPORT_VERSION,
        meta,
        stats,
        dummies,
        unmapped,
        findings: sorted_findings,
        checklist: checklist(),
    })
}

/// Sorted-key JSON form; `parse_structured` reads it back.
pub fn render_structured(report: &Report) -> Result<String> {
    jsonfmt::to_pretty(report)
}

pub fn parse_structured(text: &str) -> Result<Report> {
    let report: Report = serde_json::from_str(text)
        .map_err(|e| Error::Report(format!("structured report did not parse: {e}")))?;
    if report.format != REPORT_FORMAT {
        return Err(Error::Report(format!("not a report file: format {:?}", report.format)));
    }
    if report.version != REPORT_VERSION {
        return Err(Error::Report(format!(
            "unsupported report version {}",
            report.version
        )));
    }
    Ok(report)
}

/// Human rendering of the same content.
pub fn render_markdown(report: &Report) -> String {
    let mut out = String::new();
    out.push_str("# Mining run report\n\n");
    match &report.meta.timestamp {
        Some(ts) => out.push_str(&format!("- generated: {}\n", ts.to_rfc3339())),
        None => out.push_str("- generated: (not timestamped; reproducible run)\n"),
    }
    out.push_str(&format!("- target framework: {}\n", report.meta.target));
    out.push_str(&format!("- configuration digest: {}\n\n", report.meta.config_digest));

    out.push_str("## Sources\n\n");
    out.push_str("| path | adapter | priority | observations | skipped | ignored |\n");
    out.push_str("| --- | --- | ---: | ---: | ---: | ---: |\n");
    for s in &report.meta.sources {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            s.path, s.adapter, s.priority, s.observations, s.skipped, s.ignored
        ));
    }

    let st = &report.stats;
    out.push_str("\n## Model\n\n");
    out.push_str(&format!(
        "{} observations became {} elements and {} relations; {} element(s) are dummies and {} attribute value(s) lost a merge.\n\n",
        st.observations, st.elements, st.relations, st.dummies, st.attr_conflicts
    ));
    out.push_str("| kind | count |\n| --- | ---: |\n");
    for (kind, count) in &st.elements_by_kind {
        out.push_str(&format!("| {kind} | {count} |\n"));
    }
    out.push_str("\n| layer | count |\n| --- | ---: |\n");
    for (layer, count) in &st.elements_by_layer {
        out.push_str(&format!("| {layer} | {count} |\n"));
    }

    out.push_str(&format!(
        "\n## Target model ({})\n\n{} element(s), {} relation(s); {} source element(s) had no place in this framework.\n\n",
        report.meta.target, st.target_elements, st.target_relations, st.unmapped_elements
    ));
    out.push_str("| type | count |\n| --- | ---: |\n");
    for (type_name, count) in &st.target_by_type {
        out.push_str(&format!("| {type_name} | {count} |\n"));
    }

    out.push_str(&format!("\n## Dummy elements ({})\n\n", report.dummies.len()));
    if report.dummies.is_empty() {
        out.push_str("None; every element rests on evidence.\n");
    } else {
        out.push_str("| element | kind | name | inserted by |\n| --- | --- | --- | --- |\n");
        for d in &report.dummies {
            out.push_str(&format!(
                "| {} | {} | {} | {} |\n",
                d.elem_id, d.kind, d.name, d.rule
            ));
        }
    }

    out.push_str(&format!("\n## Unmapped elements ({})\n\n", report.unmapped.len()));
    if report.unmapped.is_empty() {
        out.push_str("None; the framework covered every kind in the model.\n");
    } else {
        out.push_str("| element | kind | name |\n| --- | --- | --- |\n");
        for u in &report.unmapped {
            out.push_str(&format!("| {} | {} | {} |\n", u.elem_id, u.kind, u.name));
        }
    }

    out.push_str(&format!("\n## Findings ({})\n\n", report.findings.len()));
    if report.findings.is_empty() {
        out.push_str("None.\n");
    } else {
        for f in &report.findings {
            out.push_str(&format!(
                "- [{}] {} on {}: {}\n",
                f.severity.name(),
                f.rule,
                f.subject,
                f.message
            ));
        }
    }

    out.push_str("\n## Manual follow-up\n\n");
    for item in &report.checklist {
        out.push_str(&format!("- [ ] {item}\n"));
    }
    out
}
