//! The framework-neutral model: elements, relations, and merge bookkeeping.
//!
//! Element identity is the pair (kind, natural key). The natural key is
//! built from the strongest stable evidence available, e.g. `mac:...` for a
//! scanned host, `10.5.1.20:443/tcp` for an interface, which is what makes
//! evidence from overlapping sources converge on one element instead of
//! producing near-duplicates. Identifiers are content hashes of that pair,
//! so they are stable across runs.
//!
//! Invariants, enforced by [`GenericModel::check_integrity`]:
//! relations only connect stored elements; natural keys are unique per
//! kind; stored ids equal the recomputed content hash; dummy elements carry
//! no provenance (they exist precisely because there is none); the only
//! self-loops allowed are associations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::catalogue::{Confidence, ElementKind, RelationKind};
use crate::error::{Error, Result};
use crate::ids;

/// One model element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericElement {
    pub elem_id: String,
    pub kind: ElementKind,
    pub name: String,
    pub natural_key: String,
    pub attrs: BTreeMap<String, String>,
    /// True when the element was invented to complete the model rather
    /// than observed.
    pub dummy: bool,
    /// Observation ids the element rests on. Append-only, insertion order.
    pub provenance: Vec<String>,
    pub confidence: Confidence,
    /// Set once an explicit naming rule (e.g. an SNMP system name or an
    /// enrichment override) has fixed the display name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name_source: Option<String>,
}

/// One directed relation between stored elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenericRelation {
    pub rel_id: String,
    pub kind: RelationKind,
    pub source: String,
    pub target: String,
    pub attrs: BTreeMap<String, String>,
    pub provenance: Vec<String>,
}

/// Record of an attribute value that lost a merge. The kept value belongs
/// to the evidence that arrived first in store order, i.e. the highest
/// priority source.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttrConflict {
    pub elem_id: String,
    pub field: String,
    pub kept: String,
    pub dropped: String,
    /// Observation that carried the dropped value, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dropped_obs: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenericModel {
    elements: BTreeMap<String, GenericElement>,
    relations: BTreeMap<String, GenericRelation>,
    conflicts: Vec<AttrConflict>,
    /// Keys of findings already emitted, `rule:category:subject`. Re-running
    /// a rule consults this so a second pass stays silent.
    reported: BTreeSet<String>,
}

impl GenericModel {
    pub fn new() -> Self {
        GenericModel::default()
    }

    pub fn elements(&self) -> impl Iterator<Item = &GenericElement> {
        self.elements.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &GenericRelation> {
        self.relations.values()
    }

    pub fn element(&self, elem_id: &str) -> Option<&GenericElement> {
        self.elements.get(elem_id)
    }

    pub fn element_mut(&mut self, elem_id: &str) -> Option<&mut GenericElement> {
        self.elements.get_mut(elem_id)
    }

    pub fn relation(&self, rel_id: &str) -> Option<&GenericRelation> {
        self.relations.get(rel_id)
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn of_kind(&self, kind: ElementKind) -> impl Iterator<Item = &GenericElement> {
        self.elements().filter(move |e| e.kind == kind)
    }

    /// Looks an element up by identity. Identity hashes to the element id,
    /// so this is a direct map lookup.
    pub fn find_by_key(&self, kind: ElementKind, natural_key: &str) -> Option<&GenericElement> {
        self.elements.get(&ids::element_id(kind.name(), natural_key))
    }

    /// Creates the element named by (kind, natural key) unless it already
    /// exists. Returns the element id and whether it was created. An
    /// existing element keeps its name, flags, and confidence.
    pub fn upsert_element(
        &mut self,
        kind: ElementKind,
        natural_key: &str,
        name: &str,
        confidence: Confidence,
        dummy: bool,
    ) -> (String, bool) {
        let elem_id = ids::element_id(kind.name(), natural_key);
        if self.elements.contains_key(&elem_id) {
            return (elem_id, false);
        }
        self.elements.insert(
            elem_id.clone(),
            GenericElement {
                elem_id: elem_id.clone(),
                kind,
                name: name.to_string(),
                natural_key: natural_key.to_string(),
                attrs: BTreeMap::new(),
                dummy,
                provenance: Vec::new(),
                confidence,
                name_source: None,
            },
        );
        (elem_id, true)
    }

    /// Appends an observation to an element's evidence trail. Dummies stay
    /// evidence-free by definition.
    pub fn push_provenance(&mut self, elem_id: &str, obs_id: &str) {
        if let Some(elem) = self.elements.get_mut(elem_id) {
            if !elem.dummy && !elem.provenance.iter().any(|p| p == obs_id) {
                elem.provenance.push(obs_id.to_string());
            }
        }
    }

    /// First-writer-wins attribute merge. In store order the first writer
    /// is the highest priority source, so conflicts keep the value that
    /// outranks. Losing values are recorded, never silently dropped.
    pub fn merge_attr(&mut self, elem_id: &str, field: &str, value: &str, via_obs: Option<&str>) {
        let Some(elem) = self.elements.get_mut(elem_id) else {
            return;
        };
        match elem.attrs.get(field) {
            None => {
                elem.attrs.insert(field.to_string(), value.to_string());
            }
            Some(existing) if existing == value => {}
            Some(existing) => {
                let kept = existing.clone();
                self.record_conflict(elem_id, field, &kept, value, via_obs);
            }
        }
    }

    /// Notes a value that lost a merge decision outside the attribute map,
    /// e.g. a conflicting rename.
    pub fn record_conflict(
        &mut self,
        elem_id: &str,
        field: &str,
        kept: &str,
        dropped: &str,
        via_obs: Option<&str>,
    ) {
        self.conflicts.push(AttrConflict {
            elem_id: elem_id.to_string(),
            field: field.to_string(),
            kept: kept.to_string(),
            dropped: dropped.to_string(),
            dropped_obs: via_obs.map(str::to_string),
        });
    }

    /// Adds a relation, or appends provenance to the identical existing
    /// one. Both endpoints must be stored. Self-loops are rejected except
    /// for associations.
    pub fn add_relation(
        &mut self,
        kind: RelationKind,
        source: &str,
        target: &str,
        provenance: &[String],
    ) -> Result<(String, bool)> {
        if !self.elements.contains_key(source) {
            return Err(Error::Integrity(format!(
                "relation source {source} is not a stored element"
            )));
        }
        if !self.elements.contains_key(target) {
            return Err(Error::Integrity(format!(
                "relation target {target} is not a stored element"
            )));
        }
        if source == target && kind != RelationKind::Association {
            return Err(Error::Integrity(format!(
                "self-loop of kind {kind} on {source}"
            )));
        }
        let rel_id = ids::relation_id(kind.name(), source, target);
        if let Some(existing) = self.relations.get_mut(&rel_id) {
            for obs in provenance {
                if !existing.provenance.iter().any(|p| p == obs) {
                    existing.provenance.push(obs.clone());
                }
            }
            return Ok((rel_id, false));
        }
        self.relations.insert(
            rel_id.clone(),
            GenericRelation {
                rel_id: rel_id.clone(),
                kind,
                source: source.to_string(),
                target: target.to_string(),
                attrs: BTreeMap::new(),
                provenance: provenance.to_vec(),
            },
        );
        Ok((rel_id, true))
    }

    pub fn relation_attr(&mut self, rel_id: &str, field: &str, value: &str) {
        if let Some(rel) = self.relations.get_mut(rel_id) {
            rel.attrs.insert(field.to_string(), value.to_string());
        }
    }

    /// Relations of `kind` pointing at `target`, in id order.
    pub fn relations_to(
        &self,
        kind: RelationKind,
        target: &str,
    ) -> impl Iterator<Item = &GenericRelation> {
        let target = target.to_string();
        self.relations
            .values()
            .filter(move |r| r.kind == kind && r.target == target)
    }

    /// Relations of `kind` leaving `source`, in id order.
    pub fn relations_from(
        &self,
        kind: RelationKind,
        source: &str,
    ) -> impl Iterator<Item = &GenericRelation> {
        let source = source.to_string();
        self.relations
            .values()
            .filter(move |r| r.kind == kind && r.source == source)
    }

    pub fn conflicts(&self) -> &[AttrConflict] {
        &self.conflicts
    }

    pub fn conflicts_for(&self, elem_id: &str) -> impl Iterator<Item = &AttrConflict> {
        let elem_id = elem_id.to_string();
        self.conflicts.iter().filter(move |c| c.elem_id == elem_id)
    }

    /// Marks `rule:category:subject` as reported. Returns true when the key
    /// is new, i.e. the caller should emit the finding now.
    pub fn mark_reported(&mut self, key: String) -> bool {
        self.reported.insert(key)
    }

    pub fn dummy_count(&self) -> usize {
        self.elements().filter(|e| e.dummy).count()
    }

    /// Verifies the structural invariants. Stages call this after mutating
    /// the model; a violation is a bug, not an input problem.
    pub fn check_integrity(&self) -> Result<()> {
        let mut keys: BTreeSet<(ElementKind, &str)> = BTreeSet::new();
        for (id, elem) in &self.elements {
            if *id != elem.elem_id {
                return Err(Error::Integrity(format!(
                    "element stored under {id} names itself {}",
                    elem.elem_id
                )));
            }
            let expected = ids::element_id(elem.kind.name(), &elem.natural_key);
            if elem.elem_id != expected {
                return Err(Error::Integrity(format!(
                    "element {id} does not match its content hash"
                )));
            }
            if !keys.insert((elem.kind, elem.natural_key.as_str())) {
                return Err(Error::Integrity(format!(
                    "natural key {:?} duplicated within kind {}",
                    elem.natural_key, elem.kind
                )));
            }
            if elem.dummy && !elem.provenance.is_empty() {
                return Err(Error::Integrity(format!(
                    "dummy element {id} carries provenance"
                )));
            }
        }
        for (id, rel) in &self.relations {
            if *id != rel.rel_id {
                return Err(Error::Integrity(format!(
                    "relation stored under {id} names itself {}",
                    rel.rel_id
                )));
            }
            if !self.elements.contains_key(&rel.source) {
                return Err(Error::Integrity(format!(
                    "relation {id} sources missing element {}",
                    rel.source
                )));
            }
            if !self.elements.contains_key(&rel.target) {
                return Err(Error::Integrity(format!(
                    "relation {id} targets missing element {}",
                    rel.target
                )));
            }
            if rel.source == rel.target && rel.kind != RelationKind::Association {
                return Err(Error::Integrity(format!(
                    "self-loop of kind {} on {}",
                    rel.kind, rel.source
                )));
            }
        }
        Ok(())
    }
}
