//! Generic model to target framework transformation.
//!
//! The transformation is total and accounted: every generic element and
//! relation either appears in the target model or gets a change-log entry
//! saying why it does not. It never fails on model content; only broken
//! framework definitions or integrity violations are errors. The function
//! is pure, so equal inputs give byte-equal outputs.

pub mod metamodel;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::catalogue::Confidence;
use crate::error::{Error, Result};
use crate::finding::{Finding, FindingCategory, Severity};
use crate::model::GenericModel;

pub use metamodel::{FrameworkDef, MappingRule};

/// An element expressed in the target vocabulary. Ids carry over from the
/// generic model, so evidence stays traceable across the transformation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetElement {
    pub id: String,
    #[serde(rename = "type")]
    pub type_name: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, String>,
    #[serde(default)]
    pub dummy: bool,
    pub confidence: Confidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetRelation {
    pub id: String,
    #[serde(rename = "type")]
    pub type_name: String,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub attrs: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetModel {
    pub metamodel: String,
    pub elements: BTreeMap<String, TargetElement>,
    pub relations: BTreeMap<String, TargetRelation>,
}

impl TargetModel {
    pub fn new(metamodel: &str) -> Self {
        TargetModel {
            metamodel: metamodel.to_string(),
            elements: BTreeMap::new(),
            relations: BTreeMap::new(),
        }
    }

    pub fn dummy_count(&self) -> usize {
        self.elements.values().filter(|e| e.dummy).count()
    }

    /// Structural invariants: keys match ids, endpoints exist, types are
    /// drawn from the framework vocabulary.
    pub fn check_integrity(&self, fw: &FrameworkDef) -> Result<()> {
        for (id, elem) in &self.elements {
            if id != &elem.id {
                return Err(Error::Integrity(format!("element key {id} holds id {}", elem.id)));
            }
            if !fw.element_types.contains(&elem.type_name) {
                return Err(Error::Integrity(format!(
                    "element {id} has type {:?} outside the {} vocabulary",
                    elem.type_name, fw.name
                )));
            }
        }
        for (id, rel) in &self.relations {
            if id != &rel.id {
                return Err(Error::Integrity(format!("relation key {id} holds id {}", rel.id)));
            }
            if !fw.relation_types.contains(&rel.type_name) {
                return Err(Error::Integrity(format!(
                    "relation {id} has type {:?} outside the {} vocabulary",
                    rel.type_name, fw.name
                )));
            }
            for endpoint in [&rel.source, &rel.target] {
                if !self.elements.contains_key(endpoint) {
                    return Err(Error::Integrity(format!(
                        "relation {id} endpoint {endpoint} is not in the target model"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// What happened to one generic model item during transformation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeAction {
    /// Element mapped through a conditional rule.
    Mapped,
    /// Relation kind had no translation; the default relation stood in.
    Defaulted,
    /// Relation type was implausible; the default relation stood in.
    Downgraded,
    /// Item has no place in the target framework and was left out.
    Dropped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeSubject {
    Element,
    Relation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChangeEntry {
    pub action: ChangeAction,
    pub subject: ChangeSubject,
    /// Generic model id of the item.
    pub id: String,
    pub detail: String,
}

/// Accounting trail of a transformation, in processing order: elements in
/// id order, then relations in id order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChangeLog {
    pub entries: Vec<ChangeEntry>,
}

impl ChangeLog {
    fn push(&mut self, action: ChangeAction, subject: ChangeSubject, id: &str, detail: String) {
        self.entries.push(ChangeEntry {
            action,
            subject,
            id: id.to_string(),
            detail,
        });
    }

    /// Ids of elements that did not reach the target model.
    pub fn dropped_elements(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter(|e| e.action == ChangeAction::Dropped && e.subject == ChangeSubject::Element)
            .map(|e| e.id.as_str())
    }
}

/// Expresses the generic model in the target framework.
pub fn transform_model(
    model: &GenericModel,
    fw: &FrameworkDef,
) -> Result<(TargetModel, ChangeLog, Vec<Finding>)> {
    let mut target = TargetModel::new(&fw.name);
    let mut log = ChangeLog::default();
    let mut findings = Vec::new();

    for elem in model.elements() {
        match fw.assign(elem.kind, &elem.attrs) {
            None => {
                log.push(
                    ChangeAction::Dropped,
                    ChangeSubject::Element,
                    &elem.elem_id,
                    format!("{} has no mapping in {}", elem.kind, fw.name),
                );
            }
            Some(rule) => {
                if !rule.when.is_empty() {
                    let conds: Vec<String> =
                        rule.when.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    log.push(
                        ChangeAction::Mapped,
                        ChangeSubject::Element,
                        &elem.elem_id,
                        format!("{} -> {} via {}", elem.kind, rule.to, conds.join(", ")),
                    );
                }
                target.elements.insert(
                    elem.elem_id.clone(),
                    TargetElement {
                        id: elem.elem_id.clone(),
                        type_name: rule.to.clone(),
                        name: elem.name.clone(),
                        attrs: elem.attrs.clone(),
                        dummy: elem.dummy,
                        confidence: elem.confidence,
                    },
                );
            }
        }
    }

    for rel in model.relations() {
        let (Some(src), Some(dst)) =
            (target.elements.get(&rel.source), target.elements.get(&rel.target))
        else {
            log.push(
                ChangeAction::Dropped,
                ChangeSubject::Relation,
                &rel.rel_id,
                "an endpoint did not reach the target model".to_string(),
            );
            continue;
        };
        let (src_type, dst_type) = (src.type_name.clone(), dst.type_name.clone());

        let mut type_name = match fw.translate(rel.kind) {
            Some(t) => t.to_string(),
            None => {
                log.push(
                    ChangeAction::Defaulted,
                    ChangeSubject::Relation,
                    &rel.rel_id,
                    format!("{} has no translation in {}; using {}", rel.kind, fw.name, fw.default_relation),
                );
                fw.default_relation.clone()
            }
        };
        if !fw.allowed(&src_type, &type_name, &dst_type) {
            log.push(
                ChangeAction::Downgraded,
                ChangeSubject::Relation,
                &rel.rel_id,
                format!(
                    "{src_type} -{type_name}-> {dst_type} is not plausible in {}; downgraded to {}",
                    fw.name, fw.default_relation
                ),
            );
            findings.push(Finding::new(
                "transform/plausibility",
                FindingCategory::RelationDowngraded,
                Severity::Verify,
                &rel.rel_id,
                format!(
                    "{src_type} -{type_name}-> {dst_type} is not plausible in {}; kept as {}",
                    fw.name, fw.default_relation
                ),
            ));
            type_name = fw.default_relation.clone();
        }
        target.relations.insert(
            rel.rel_id.clone(),
            TargetRelation {
                id: rel.rel_id.clone(),
                type_name,
                source: rel.source.clone(),
                target: rel.target.clone(),
                attrs: rel.attrs.clone(),
            },
        );
    }

    target.check_integrity(fw)?;
    Ok((target, log, findings))
}
