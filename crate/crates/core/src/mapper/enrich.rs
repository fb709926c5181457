//! Manual enrichment: the controlled channel for human knowledge.
//!
//! An enrichment document is JSON with three optional lists. `elements`
//! adds manual-confidence elements, `relations` connects elements, and
//! `overrides` renames or re-attributes existing ones. Elements are
//! addressed either by id (`id-...`) or by `Kind/natural-key`. The whole
//! document is validated before anything is applied: a bad entry leaves
//! the model untouched.

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;

use crate::catalogue::{Catalogue, Confidence, ElementKind, RelationKind};
use crate::error::{Error, Result};
use crate::model::GenericModel;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnrichmentDoc {
    #[serde(default = "default_version")]
    pub version: u32,
    #[serde(default)]
    pub elements: Vec<ElementAdd>,
    #[serde(default)]
    pub relations: Vec<RelationAdd>,
    #[serde(default)]
    pub overrides: Vec<OverrideEntry>,
}

fn default_version() -> u32 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementAdd {
    pub kind: String,
    pub name: String,
    /// Natural key; defaults to a slug of the name.
    #[serde(default)]
    pub key: Option<String>,
    #[serde(default)]
    pub attrs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationAdd {
    pub kind: String,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideEntry {
    pub element: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub attrs: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnrichSummary {
    pub elements_added: usize,
    pub relations_added: usize,
    pub overrides_applied: usize,
}

pub fn parse_enrichment(text: &str) -> Result<EnrichmentDoc> {
    let doc: EnrichmentDoc = serde_json::from_str(text)
        .map_err(|e| Error::Enrichment(format!("unreadable document: {e}")))?;
    if doc.version != 1 {
        return Err(Error::Enrichment(format!(
            "unsupported enrichment version {}",
            doc.version
        )));
    }
    Ok(doc)
}

fn slug(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut last_dash = true;
    for c in name.chars() {
        if c.is_alphanumeric() {
            out.extend(c.to_lowercase());
            last_dash = false;
        } else if !last_dash {
            out.push('-');
            last_dash = true;
        }
    }
    out.trim_end_matches('-').to_string()
}

/// Where a selector points: an element already in the model, or one staged
/// for addition by this document.
#[derive(Clone, Debug)]
enum Resolved {
    Existing(String),
    Staged(ElementKind, String),
}

fn resolve(
    model: &GenericModel,
    staged: &BTreeSet<(ElementKind, String)>,
    selector: &str,
    cat: &Catalogue,
    at: &str,
) -> Result<Resolved> {
    if selector.starts_with("id-") {
        if model.element(selector).is_some() {
            return Ok(Resolved::Existing(selector.to_string()));
        }
        return Err(Error::Enrichment(format!(
            "{at}: no element with id {selector:?}"
        )));
    }
    let Some((kind_name, key)) = selector.split_once('/') else {
        return Err(Error::Enrichment(format!(
            "{at}: selector {selector:?} is neither an id nor Kind/natural-key"
        )));
    };
    let (kind, _) = cat
        .lookup_kind(kind_name)
        .map_err(|e| Error::Enrichment(format!("{at}: {e}")))?;
    if let Some(elem) = model.find_by_key(kind, key) {
        return Ok(Resolved::Existing(elem.elem_id.clone()));
    }
    if staged.contains(&(kind, key.to_string())) {
        return Ok(Resolved::Staged(kind, key.to_string()));
    }
    Err(Error::Enrichment(format!(
        "{at}: no element {} with key {key:?}",
        kind.name()
    )))
}

/// Validates and applies a document. On error the model is unchanged.
pub fn apply_manual_enrichment(
    model: &mut GenericModel,
    cat: &Catalogue,
    doc: &EnrichmentDoc,
) -> Result<EnrichSummary> {
    // Validation pass: resolve every reference before mutating anything.
    let mut staged: BTreeSet<(ElementKind, String)> = BTreeSet::new();
    let mut adds: Vec<(ElementKind, String, &ElementAdd)> = Vec::new();
    for (i, add) in doc.elements.iter().enumerate() {
        let at = format!("elements[{i}]");
        let (kind, _) = cat
            .lookup_kind(&add.kind)
            .map_err(|e| Error::Enrichment(format!("{at}: {e}")))?;
        let key = add.key.clone().unwrap_or_else(|| slug(&add.name));
        if key.is_empty() {
            return Err(Error::Enrichment(format!("{at}: empty natural key")));
        }
        if model.find_by_key(kind, &key).is_some() {
            return Err(Error::Enrichment(format!(
                "{at}: element {}/{key} already exists; use an override to change it",
                kind.name()
            )));
        }
        if !staged.insert((kind, key.clone())) {
            return Err(Error::Enrichment(format!(
                "{at}: element {}/{key} added twice",
                kind.name()
            )));
        }
        adds.push((kind, key, add));
    }

    let mut rels: Vec<(RelationKind, Resolved, Resolved)> = Vec::new();
    for (i, rel) in doc.relations.iter().enumerate() {
        let at = format!("relations[{i}]");
        let kind = RelationKind::parse(&rel.kind)
            .ok_or_else(|| Error::Enrichment(format!("{at}: unknown relation kind {:?}", rel.kind)))?;
        let source = resolve(model, &staged, &rel.source, cat, &format!("{at}.source"))?;
        let target = resolve(model, &staged, &rel.target, cat, &format!("{at}.target"))?;
        rels.push((kind, source, target));
    }

    let mut overrides: Vec<(Resolved, &OverrideEntry)> = Vec::new();
    for (i, entry) in doc.overrides.iter().enumerate() {
        let at = format!("overrides[{i}]");
        let resolved = resolve(model, &staged, &entry.element, cat, &format!("{at}.element"))?;
        overrides.push((resolved, entry));
    }

    // Apply pass: everything below is known to succeed, except self-loop
    // checks which depend on resolved ids; treat those as validation too.
    let mut summary = EnrichSummary::default();
    for (kind, key, add) in &adds {
        let (elem_id, created) =
            model.upsert_element(*kind, key, &add.name, Confidence::Manual, false);
        debug_assert!(created);
        for (field, value) in &add.attrs {
            model.merge_attr(&elem_id, field, value, None);
        }
        let elem = model.element_mut(&elem_id).expect("just inserted");
        elem.name_source = Some("enrichment".to_string());
        summary.elements_added += 1;
    }

    let to_id = |r: &Resolved| -> String {
        match r {
            Resolved::Existing(id) => id.clone(),
            Resolved::Staged(kind, key) => crate::ids::element_id(kind.name(), key),
        }
    };
    for (kind, source, target) in &rels {
        let (_, created) = model.add_relation(*kind, &to_id(source), &to_id(target), &[])?;
        if created {
            summary.relations_added += 1;
        }
    }

    for (resolved, entry) in &overrides {
        let elem_id = to_id(resolved);
        let elem = model.element_mut(&elem_id).expect("resolved above");
        if let Some(name) = &entry.name {
            elem.name = name.clone();
            elem.name_source = Some("enrichment".to_string());
        }
        for (field, value) in &entry.attrs {
            // Manual values overwrite automatic ones by design.
            elem.attrs.insert(field.clone(), value.clone());
        }
        summary.overrides_applied += 1;
    }

    model.check_integrity()?;
    Ok(summary)
}
