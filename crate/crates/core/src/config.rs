//! Run configuration.
//!
//! One TOML file names the sources, the target framework, and every rule
//! table the run depends on. Relative paths resolve against the file's
//! directory, but source path strings keep their configured spelling: the
//! string is the source identity that observation ids hash, so moving the
//! tree does not change the model.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::Deserialize;

use crate::catalogue::Catalogue;
use crate::error::{Error, Result};
use crate::ids;
use crate::ingest::IngestOptions;
use crate::mapper::enrich::{parse_enrichment, EnrichmentDoc};
use crate::observation::SourceDescriptor;
use crate::reason::{OsHeuristics, OuiTable, PortServices, RuleConfig};
use crate::transform::FrameworkDef;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRules {
    ipv4_prefix_len: Option<u8>,
    dfg_edge_threshold: Option<u64>,
    oui_table: Option<String>,
    os_heuristics: Option<String>,
    port_services: Option<String>,
    snmp_account_subtree: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnrichment {
    path: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalogue {
    path: String,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    version: u32,
    run_name: String,
    #[serde(default = "default_target")]
    target: String,
    #[serde(default = "default_output_dir")]
    output_dir: String,
    /// RFC 3339. Absent means artifacts carry no clock reading at all.
    timestamp: Option<String>,
    #[serde(rename = "source")]
    sources: Vec<SourceDescriptor>,
    #[serde(default)]
    rules: RawRules,
    enrichment: Option<RawEnrichment>,
    #[serde(default)]
    frameworks: BTreeMap<String, String>,
    catalogue: Option<RawCatalogue>,
}

fn default_target() -> String {
    "archimate-3".to_string()
}

fn default_output_dir() -> String {
    "out".to_string()
}

/// A validated run configuration. Construction is the only way to get one,
/// so holding a `RunConfig` means the file was sound.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub run_name: String,
    pub target: String,
    pub output_dir: PathBuf,
    pub timestamp: Option<DateTime<Utc>>,
    pub sources: Vec<SourceDescriptor>,
    pub ipv4_prefix_len: u8,
    pub dfg_edge_threshold: u64,
    pub oui_table: Option<PathBuf>,
    pub os_heuristics: Option<PathBuf>,
    pub port_services: Option<PathBuf>,
    pub snmp_account_subtree: Option<String>,
    pub enrichment: Option<PathBuf>,
    pub frameworks: BTreeMap<String, PathBuf>,
    pub catalogue: Option<PathBuf>,
    /// Content digest of the configuration text; lands in the report.
    pub digest: String,
    /// Directory all relative paths resolve against.
    pub base_dir: PathBuf,
}

fn valid_run_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::from_toml_str(&text, &base_dir)
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("configuration: {e}")))?;
        if raw.version != CONFIG_VERSION {
            return Err(Error::Config(format!(
                "unsupported configuration version {}; this build reads version {CONFIG_VERSION}",
                raw.version
            )));
        }
        if !valid_run_name(&raw.run_name) {
            return Err(Error::Config(format!(
                "run_name {:?} must be non-empty and use only letters, digits, '-', '_', '.'",
                raw.run_name
            )));
        }
        if raw.target.trim().is_empty() {
            return Err(Error::Config("target must not be empty".into()));
        }
        if raw.sources.is_empty() {
            return Err(Error::Config("at least one [[source]] is required".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &raw.sources {
            if s.path.trim().is_empty() {
                return Err(Error::Config("source path must not be empty".into()));
            }
            if !seen.insert(s.path.as_str()) {
                return Err(Error::Config(format!("source {:?} is listed twice", s.path)));
            }
        }
        let timestamp = match &raw.timestamp {
            None => None,
            Some(text) => Some(text.parse::<DateTime<Utc>>().map_err(|e| {
                Error::Config(format!("timestamp {text:?} is not RFC 3339: {e}"))
            })?),
        };
        let ipv4_prefix_len = raw.rules.ipv4_prefix_len.unwrap_or(24);
        if !(8..=30).contains(&ipv4_prefix_len) {
            return Err(Error::Config(format!(
                "ipv4_prefix_len {ipv4_prefix_len} outside 8..=30"
            )));
        }
        let dfg_edge_threshold = raw.rules.dfg_edge_threshold.unwrap_or(1);
        if dfg_edge_threshold == 0 {
            return Err(Error::Config("dfg_edge_threshold must be at least 1".into()));
        }

        let resolve = |p: &str| crate::ingest::resolve_path(base_dir, p);
        let config = RunConfig {
            run_name: raw.run_name,
            target: raw.target,
            output_dir: resolve(&raw.output_dir),
            timestamp,
            sources: raw.sources,
            ipv4_prefix_len,
            dfg_edge_threshold,
            oui_table: raw.rules.oui_table.as_deref().map(resolve),
            os_heuristics: raw.rules.os_heuristics.as_deref().map(resolve),
            port_services: raw.rules.port_services.as_deref().map(resolve),
            snmp_account_subtree: raw.rules.snmp_account_subtree,
            enrichment: raw.enrichment.as_ref().map(|e| resolve(&e.path)),
            frameworks: raw
                .frameworks
                .iter()
                .map(|(name, path)| (name.clone(), resolve(path)))
                .collect(),
            catalogue: raw.catalogue.as_ref().map(|c| resolve(&c.path)),
            digest: ids::digest16(&[text]),
            base_dir: base_dir.to_path_buf(),
        };
        Ok(config)
    }

    /// Ingest options derived from this configuration.
    pub fn ingest_options(&self) -> IngestOptions {
        match &self.snmp_account_subtree {
            Some(subtree) => IngestOptions {
                snmp_account_subtree: subtree.clone(),
            },
            None => IngestOptions::default(),
        }
    }

    /// Loads the rule tables, bundled or overridden.
    pub fn rule_config(&self) -> Result<RuleConfig> {
        Ok(RuleConfig {
            ipv4_prefix_len: self.ipv4_prefix_len,
            dfg_edge_threshold: self.dfg_edge_threshold,
            oui: match &self.oui_table {
                Some(path) => OuiTable::load(path)?,
                None => OuiTable::builtin(),
            },
            os: match &self.os_heuristics {
                Some(path) => OsHeuristics::load(path)?,
                None => OsHeuristics::builtin(),
            },
            ports: match &self.port_services {
                Some(path) => PortServices::load(path)?,
                None => PortServices::builtin(),
            },
        })
    }

    /// Loads the element kind catalogue, bundled or overridden.
    pub fn catalogue(&self) -> Result<Catalogue> {
        match &self.catalogue {
            Some(path) => Catalogue::load(path),
            None => Ok(Catalogue::builtin()),
        }
    }

    /// Loads a framework definition by name: a configured file if one is
    /// mapped to that name, the bundled definition otherwise.
    pub fn framework(&self, name: &str) -> Result<FrameworkDef> {
        match self.frameworks.get(name) {
            Some(path) => {
                let fw = FrameworkDef::load(path)?;
                if fw.name != name {
                    return Err(Error::Config(format!(
                        "framework file {} defines {:?}, expected {name:?}",
                        path.display(),
                        fw.name
                    )));
                }
                Ok(fw)
            }
            None => FrameworkDef::builtin(name),
        }
    }

    /// Loads the enrichment document, if one is configured.
    pub fn enrichment_doc(&self) -> Result<Option<EnrichmentDoc>> {
        let Some(path) = &self.enrichment else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Some(parse_enrichment(&text)?))
    }
}
