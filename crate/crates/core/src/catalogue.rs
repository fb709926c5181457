//! The framework-neutral vocabulary: element kinds, relation kinds, layers,
//! structure categories, and the degree of automation expected for each kind.
//!
//! The kind set is closed. A catalogue definition file can restate the
//! classification of the built-in kinds but cannot introduce new ones;
//! anything outside the vocabulary is a hard error, never a silent coercion.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Architecture layer an element kind belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Layer {
    Business,
    Application,
    Technology,
}

impl Layer {
    pub fn name(self) -> &'static str {
        match self {
            Layer::Business => "business",
            Layer::Application => "application",
            Layer::Technology => "technology",
        }
    }
}

/// Structural role of an element kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureCategory {
    Passive,
    Active,
    Behaviour,
}

impl StructureCategory {
    pub fn name(self) -> &'static str {
        match self {
            StructureCategory::Passive => "passive",
            StructureCategory::Active => "active",
            StructureCategory::Behaviour => "behaviour",
        }
    }
}

/// How much human attention an element needs. `Auto` elements are fully
/// derivable from evidence, `SemiAuto` elements are derived but should be
/// reviewed, `Manual` elements only enter the model through enrichment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Confidence {
    Auto,
    SemiAuto,
    Manual,
}

impl Confidence {
    pub fn name(self) -> &'static str {
        match self {
            Confidence::Auto => "auto",
            Confidence::SemiAuto => "semi-auto",
            Confidence::Manual => "manual",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "auto" => Some(Confidence::Auto),
            "semi-auto" | "semiauto" => Some(Confidence::SemiAuto),
            "manual" => Some(Confidence::Manual),
            _ => None,
        }
    }
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Confidence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Confidence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Confidence::parse(&s).ok_or_else(|| D::Error::custom(format!("unknown confidence {s:?}")))
    }
}

/// The sixteen element kinds the generic model can contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ElementKind {
    Node,
    Device,
    SystemSoftware,
    ApplicationInterface,
    ApplicationComponent,
    ApplicationCollaboration,
    ItService,
    Path,
    CommunicationNetwork,
    TechnologyFunction,
    TechnologyProcess,
    TechnologyInteraction,
    TechnologyEvent,
    BusinessActor,
    BusinessRole,
    BusinessProcess,
}

impl ElementKind {
    pub const ALL: [ElementKind; 16] = [
        ElementKind::Node,
        ElementKind::Device,
        ElementKind::SystemSoftware,
        ElementKind::ApplicationInterface,
        ElementKind::ApplicationComponent,
        ElementKind::ApplicationCollaboration,
        ElementKind::ItService,
        ElementKind::Path,
        ElementKind::CommunicationNetwork,
        ElementKind::TechnologyFunction,
        ElementKind::TechnologyProcess,
        ElementKind::TechnologyInteraction,
        ElementKind::TechnologyEvent,
        ElementKind::BusinessActor,
        ElementKind::BusinessRole,
        ElementKind::BusinessProcess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Node => "Node",
            ElementKind::Device => "Device",
            ElementKind::SystemSoftware => "SystemSoftware",
            ElementKind::ApplicationInterface => "ApplicationInterface",
            ElementKind::ApplicationComponent => "ApplicationComponent",
            ElementKind::ApplicationCollaboration => "ApplicationCollaboration",
            ElementKind::ItService => "ITService",
            ElementKind::Path => "Path",
            ElementKind::CommunicationNetwork => "CommunicationNetwork",
            ElementKind::TechnologyFunction => "TechnologyFunction",
            ElementKind::TechnologyProcess => "TechnologyProcess",
            ElementKind::TechnologyInteraction => "TechnologyInteraction",
            ElementKind::TechnologyEvent => "TechnologyEvent",
            ElementKind::BusinessActor => "BusinessActor",
            ElementKind::BusinessRole => "BusinessRole",
            ElementKind::BusinessProcess => "BusinessProcess",
        }
    }

    /// Case-insensitive lookup that also tolerates spaces, hyphens, and
    /// underscores, so `"IT Service"` and `"system_software"` resolve.
    pub fn parse(name: &str) -> Option<Self> {
        let folded: String = name
            .chars()
            .filter(|c| !matches!(c, ' ' | '-' | '_'))
            .flat_map(char::to_lowercase)
            .collect();
        ElementKind::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase() == folded)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for ElementKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for ElementKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ElementKind::parse(&s).ok_or_else(|| D::Error::custom(format!("unknown element kind {s:?}")))
    }
}

/// The seven relation kinds of the generic model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RelationKind {
    Association,
    Assignment,
    Realization,
    Serving,
    Composition,
    Flow,
    Access,
}

impl RelationKind {
    pub const ALL: [RelationKind; 7] = [
        RelationKind::Association,
        RelationKind::Assignment,
        RelationKind::Realization,
        RelationKind::Serving,
        RelationKind::Composition,
        RelationKind::Flow,
        RelationKind::Access,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::Association => "association",
            RelationKind::Assignment => "assignment",
            RelationKind::Realization => "realization",
            RelationKind::Serving => "serving",
            RelationKind::Composition => "composition",
            RelationKind::Flow => "flow",
            RelationKind::Access => "access",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let folded = name.trim().to_ascii_lowercase();
        RelationKind::ALL.into_iter().find(|k| k.name() == folded)
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RelationKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for RelationKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        RelationKind::parse(&s).ok_or_else(|| D::Error::custom(format!("unknown relation kind {s:?}")))
    }
}

/// Classification of one element kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindInfo {
    pub layer: Layer,
    pub category: StructureCategory,
    pub automation: Confidence,
}

/// The complete kind classification table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Catalogue {
    kinds: BTreeMap<ElementKind, KindInfo>,
}

impl Default for Catalogue {
    fn default() -> Self {
        Catalogue::builtin()
    }
}

const fn info(layer: Layer, category: StructureCategory, automation: Confidence) -> KindInfo {
    KindInfo {
        layer,
        category,
        automation,
    }
}

impl Catalogue {
    /// The built-in classification. The bundled definition file restates
    /// exactly this table.
    pub fn builtin() -> Self {
        use Confidence::{Auto, Manual, SemiAuto};
        use ElementKind::*;
        use Layer::{Application, Business, Technology};
        use StructureCategory::{Active, Behaviour};
        let rows = [
            (Node, info(Technology, Active, Auto)),
            (Device, info(Technology, Active, Auto)),
            (SystemSoftware, info(Technology, Active, Auto)),
            (ApplicationInterface, info(Application, Active, Auto)),
            (ApplicationComponent, info(Application, Active, SemiAuto)),
            (ApplicationCollaboration, info(Application, Active, Manual)),
            (ItService, info(Technology, Behaviour, SemiAuto)),
            (Path, info(Technology, Active, Auto)),
            (CommunicationNetwork, info(Technology, Active, Auto)),
            (TechnologyFunction, info(Technology, Behaviour, SemiAuto)),
            (TechnologyProcess, info(Technology, Behaviour, SemiAuto)),
            (TechnologyInteraction, info(Technology, Behaviour, Manual)),
            (TechnologyEvent, info(Technology, Behaviour, SemiAuto)),
            (BusinessActor, info(Business, Active, SemiAuto)),
            (BusinessRole, info(Business, Active, SemiAuto)),
            (BusinessProcess, info(Business, Behaviour, Manual)),
        ];
        Catalogue {
            kinds: rows.into_iter().collect(),
        }
    }

    /// Resolves a kind by name, returning the kind and its classification.
    /// Unknown names are an error: the vocabulary is closed.
    pub fn lookup_kind(&self, name: &str) -> Result<(ElementKind, KindInfo)> {
        let kind = ElementKind::parse(name)
            .ok_or_else(|| Error::Catalogue(format!("unknown element kind {name:?}")))?;
        Ok((kind, self.kinds[&kind]))
    }

    pub fn info(&self, kind: ElementKind) -> KindInfo {
        self.kinds[&kind]
    }

    pub fn automation(&self, kind: ElementKind) -> Confidence {
        self.kinds[&kind].automation
    }

    pub fn layer(&self, kind: ElementKind) -> Layer {
        self.kinds[&kind].layer
    }

    /// Parses a declarative catalogue definition. The file must classify
    /// every built-in kind exactly once and may not add kinds.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct FileFormat {
            version: u32,
            #[serde(default)]
            element: Vec<ElementRow>,
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct ElementRow {
            name: String,
            layer: Layer,
            category: StructureCategory,
            automation: Confidence,
        }

        let file: FileFormat =
            toml::from_str(text).map_err(|e| Error::Catalogue(format!("parse failure: {e}")))?;
        if file.version != 1 {
            return Err(Error::Catalogue(format!(
                "unsupported catalogue version {}",
                file.version
            )));
        }
        let mut kinds = BTreeMap::new();
        for row in &file.element {
            let kind = ElementKind::parse(&row.name)
                .ok_or_else(|| Error::Catalogue(format!("unknown element kind {:?}", row.name)))?;
            let prev = kinds.insert(
                kind,
                info(row.layer, row.category, row.automation),
            );
            if prev.is_some() {
                return Err(Error::Catalogue(format!(
                    "element kind {} classified twice",
                    kind.name()
                )));
            }
        }
        for kind in ElementKind::ALL {
            if !kinds.contains_key(&kind) {
                return Err(Error::Catalogue(format!(
                    "element kind {} missing from definition",
                    kind.name()
                )));
            }
        }
        Ok(Catalogue { kinds })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Catalogue::from_toml_str(&text)
    }
}

/// The bundled catalogue definition file, identical to [`Catalogue::builtin`].
pub const BUNDLED_CATALOGUE: &str = include_str!("../data/catalogue.toml");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_is_case_insensitive_and_closed() {
        let cat = Catalogue::builtin();
        let (kind, info) = cat.lookup_kind("Node").unwrap();
        assert_eq!(kind, ElementKind::Node);
        assert_eq!(info.layer, Layer::Technology);
        assert_eq!(info.category, StructureCategory::Active);
        let (kind2, _) = cat.lookup_kind("node").unwrap();
        assert_eq!(kind, kind2);
        let (svc, _) = cat.lookup_kind("IT Service").unwrap();
        assert_eq!(svc, ElementKind::ItService);
        assert!(matches!(cat.lookup_kind("Widget"), Err(Error::Catalogue(_))));
    }

    #[test]
    fn automation_degrees_cover_all_kinds() {
        let cat = Catalogue::builtin();
        let auto: Vec<ElementKind> = ElementKind::ALL
            .into_iter()
            .filter(|k| cat.automation(*k) == Confidence::Auto)
            .collect();
        assert_eq!(
            auto,
            vec![
                ElementKind::Node,
                ElementKind::Device,
                ElementKind::SystemSoftware,
                ElementKind::ApplicationInterface,
                ElementKind::Path,
                ElementKind::CommunicationNetwork,
            ]
        );
        let manual: Vec<ElementKind> = ElementKind::ALL
            .into_iter()
            .filter(|k| cat.automation(*k) == Confidence::Manual)
            .collect();
        assert_eq!(
            manual,
            vec![
                ElementKind::ApplicationCollaboration,
                ElementKind::TechnologyInteraction,
                ElementKind::BusinessProcess,
            ]
        );
    }

    #[test]
    fn serde_names_are_canonical() {
        assert_eq!(
            serde_json::to_string(&ElementKind::ItService).unwrap(),
            "\"ITService\""
        );
        assert_eq!(
            serde_json::from_str::<ElementKind>("\"ITService\"").unwrap(),
            ElementKind::ItService
        );
        assert_eq!(
            serde_json::to_string(&RelationKind::Assignment).unwrap(),
            "\"assignment\""
        );
        assert!(serde_json::from_str::<ElementKind>("\"Widget\"").is_err());
    }

    #[test]
    fn bundled_definition_matches_builtin() {
        let loaded = Catalogue::from_toml_str(BUNDLED_CATALOGUE).unwrap();
        assert_eq!(loaded, Catalogue::builtin());
    }

    #[test]
    fn definition_must_be_complete_and_unique() {
        let missing = "version = 1\n[[element]]\nname = \"Node\"\nlayer = \"technology\"\ncategory = \"active\"\nautomation = \"auto\"\n";
        assert!(matches!(
            Catalogue::from_toml_str(missing),
            Err(Error::Catalogue(m)) if m.contains("missing")
        ));
        let unknown = "version = 1\n[[element]]\nname = \"Widget\"\nlayer = \"technology\"\ncategory = \"active\"\nautomation = \"auto\"\n";
        assert!(matches!(
            Catalogue::from_toml_str(unknown),
            Err(Error::Catalogue(m)) if m.contains("Widget")
        ));
    }

    #[test]
    fn every_kind_parses_its_own_name() {
        for kind in ElementKind::ALL {
            assert_eq!(ElementKind::parse(kind.name()), Some(kind));
        }
        for kind in RelationKind::ALL {
            assert_eq!(RelationKind::parse(kind.name()), Some(kind));
        }
    }
}
