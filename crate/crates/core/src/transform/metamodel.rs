//! Declarative target-framework definitions.
//!
//! A framework file names the target type vocabulary, maps generic element
//! kinds onto it through ordered rules, translates generic relation kinds,
//! and restricts which (source type, relation, target type) triples are
//! plausible. Two definitions ship built in: `archimate-3` and `naf-lite`.
//! Everything about a target framework lives in its file; the transformer
//! itself knows no type names.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;

use crate::catalogue::{ElementKind, RelationKind};
use crate::error::{Error, Result};

pub const BUNDLED_ARCHIMATE3: &str = include_str!("../../data/archimate-3.toml");
pub const BUNDLED_NAF_LITE: &str = include_str!("../../data/naf-lite.toml");

/// One plausibility exception. Fields are target type names, a relation
/// type name, or `*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptRow {
    pub source: String,
    pub relation: String,
    pub target: String,
}

/// One element mapping rule. Rules with conditions match only elements
/// carrying all the given attribute values, and win over the kind's
/// unconditional rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingRule {
    pub from: ElementKind,
    pub to: String,
    pub when: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct FrameworkDef {
    pub name: String,
    /// Target element vocabulary, in file order.
    pub element_types: Vec<String>,
    /// Target relation vocabulary, in file order.
    pub relation_types: Vec<String>,
    /// Fallback relation type; implausible and untranslatable relations
    /// land here, so it is always plausible by construction.
    pub default_relation: String,
    /// Matrix polarity: `true` means triples are allowed unless excepted.
    pub allowed_default: bool,
    pub excepts: Vec<ExceptRow>,
    pub relation_map: BTreeMap<RelationKind, String>,
    /// Element rules, in file order.
    pub rules: Vec<MappingRule>,
}

fn default_true() -> bool {
    true
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    metamodel: RawMeta,
    #[serde(default)]
    relations: BTreeMap<String, String>,
    #[serde(default, rename = "rule")]
    rules: Vec<RawRule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeta {
    name: String,
    element_types: Vec<String>,
    relation_types: Vec<String>,
    default_relation: String,
    #[serde(default = "default_true")]
    allowed_default: bool,
    #[serde(default, rename = "except")]
    excepts: Vec<RawExcept>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExcept {
    source: String,
    relation: String,
    target: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRule {
    from: String,
    to: String,
    #[serde(default)]
    when: BTreeMap<String, String>,
}

impl FrameworkDef {
    /// Loads one of the bundled definitions by name.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "archimate-3" => Self::from_toml_str(BUNDLED_ARCHIMATE3),
            "naf-lite" => Self::from_toml_str(BUNDLED_NAF_LITE),
            other => Err(Error::Config(format!(
                "unknown target framework {other:?}; built in: archimate-3, naf-lite"
            ))),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawDoc =
            toml::from_str(text).map_err(|e| Error::Config(format!("framework file: {e}")))?;
        let meta = raw.metamodel;
        let name = meta.name.trim().to_string();
        if name.is_empty() {
            return Err(Error::Config("framework name must not be empty".into()));
        }
        let fail = |msg: String| Err(Error::Config(format!("framework {name}: {msg}")));

        if meta.element_types.is_empty() {
            return fail("element_types must not be empty".into());
        }
        let mut seen = BTreeSet::new();
        for t in &meta.element_types {
            if t.trim().is_empty() || !seen.insert(t.as_str()) {
                return fail(format!("element type {t:?} is empty or repeated"));
            }
        }
        if meta.relation_types.is_empty() {
            return fail("relation_types must not be empty".into());
        }
        let mut seen = BTreeSet::new();
        for t in &meta.relation_types {
            if t.trim().is_empty() || !seen.insert(t.as_str()) {
                return fail(format!("relation type {t:?} is empty or repeated"));
            }
        }
        if !meta.relation_types.contains(&meta.default_relation) {
            return fail(format!(
                "default_relation {:?} is not in relation_types",
                meta.default_relation
            ));
        }

        let mut excepts = Vec::new();
        for (i, row) in meta.excepts.into_iter().enumerate() {
            let endpoint_ok = |t: &str| t == "*" || meta.element_types.iter().any(|e| e == t);
            if !endpoint_ok(&row.source) {
                return fail(format!("except[{i}].source {:?} is not a known type", row.source));
            }
            if !endpoint_ok(&row.target) {
                return fail(format!("except[{i}].target {:?} is not a known type", row.target));
            }
            if row.relation != "*" && !meta.relation_types.contains(&row.relation) {
                return fail(format!(
                    "except[{i}].relation {:?} is not a known relation type",
                    row.relation
                ));
            }
            if row.relation == meta.default_relation {
                return fail(format!(
                    "except[{i}] names the default relation, which is always allowed"
                ));
            }
            excepts.push(ExceptRow {
                source: row.source,
                relation: row.relation,
                target: row.target,
            });
        }

        let mut relation_map = BTreeMap::new();
        for (key, value) in raw.relations {
            let Some(kind) = RelationKind::parse(&key) else {
                return fail(format!("relations key {key:?} is not a relation kind"));
            };
            if !meta.relation_types.contains(&value) {
                return fail(format!("relations.{key} = {value:?} is not a known relation type"));
            }
            relation_map.insert(kind, value);
        }

        let mut rules = Vec::new();
        let mut unconditional: BTreeSet<ElementKind> = BTreeSet::new();
        for (i, rule) in raw.rules.into_iter().enumerate() {
            let Some(from) = ElementKind::parse(&rule.from) else {
                return fail(format!("rule[{i}].from {:?} is not an element kind", rule.from));
            };
            if !meta.element_types.contains(&rule.to) {
                return fail(format!("rule[{i}].to {:?} is not a known type", rule.to));
            }
            if rule.when.is_empty() && !unconditional.insert(from) {
                return fail(format!(
                    "rule[{i}]: second unconditional rule for {}",
                    from.name()
                ));
            }
            rules.push(MappingRule {
                from,
                to: rule.to,
                when: rule.when,
            });
        }

        Ok(FrameworkDef {
            name,
            element_types: meta.element_types,
            relation_types: meta.relation_types,
            default_relation: meta.default_relation,
            allowed_default: meta.allowed_default,
            excepts,
            relation_map,
            rules,
        })
    }

    /// Picks the mapping rule for an element: the first conditional rule
    /// whose attributes all match, else the kind's unconditional rule.
    pub fn assign(
        &self,
        kind: ElementKind,
        attrs: &BTreeMap<String, String>,
    ) -> Option<&MappingRule> {
        self.rules
            .iter()
            .find(|r| {
                r.from == kind
                    && !r.when.is_empty()
                    && r.when.iter().all(|(k, v)| attrs.get(k) == Some(v))
            })
            .or_else(|| self.rules.iter().find(|r| r.from == kind && r.when.is_empty()))
    }

    /// Target relation type for a generic kind, if the framework maps it.
    pub fn translate(&self, kind: RelationKind) -> Option<&str> {
        self.relation_map.get(&kind).map(String::as_str)
    }

    /// Whether a (source type, relation type, target type) triple is
    /// plausible. The default relation is always plausible; other triples
    /// consult the exception rows against the matrix polarity.
    pub fn allowed(&self, source: &str, relation: &str, target: &str) -> bool {
        if relation == self.default_relation {
            return true;
        }
        let hit = self.excepts.iter().any(|row| {
            (row.source == "*" || row.source == source)
                && (row.relation == "*" || row.relation == relation)
                && (row.target == "*" || row.target == target)
        });
        if hit {
            !self.allowed_default
        } else {
            self.allowed_default
        }
    }
}
