//! The observation store: every harmonized record of a run, in one place.
//!
//! Observations are keyed by `(source priority, source path, sequence)`,
//! and iteration follows that order, so later stages see evidence in a
//! reproducible sequence regardless of ingest order. Appending an
//! observation whose content hash is already present is a no-op, which
//! makes re-reading a source harmless.
//!
//! Snapshots are JSON lines: a header object
//! `{"format":"eamine-store","version":1,"sources":N,"observations":M}`,
//! then N source records, then M observation records, all with sorted keys.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids;
use crate::jsonfmt;
use crate::observation::{Observation, ObservationKind, SourceDescriptor};

type StoreKey = (u32, String, u64);

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ObservationStore {
    sources: BTreeMap<String, SourceDescriptor>,
    records: BTreeMap<StoreKey, Observation>,
    by_id: BTreeMap<String, StoreKey>,
}

const FORMAT: &str = "eamine-store";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    sources: usize,
    observations: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
enum Line {
    Source { source: SourceDescriptor },
    Observation { observation: Observation },
}

impl ObservationStore {
    pub fn new() -> Self {
        ObservationStore::default()
    }

    /// Registers a source. Paths are unique within a run.
    pub fn register_source(&mut self, source: SourceDescriptor) -> Result<()> {
        if self.sources.contains_key(&source.path) {
            return Err(Error::Store(format!(
                "source {:?} registered twice",
                source.path
            )));
        }
        self.sources.insert(source.path.clone(), source);
        Ok(())
    }

    pub fn source(&self, path: &str) -> Option<&SourceDescriptor> {
        self.sources.get(path)
    }

    pub fn sources(&self) -> impl Iterator<Item = &SourceDescriptor> {
        self.sources.values()
    }

    /// Appends observations from one registered source, skipping any whose
    /// content hash is already stored. Returns how many were inserted.
    pub fn append_all(&mut self, source_path: &str, observations: &[Observation]) -> Result<usize> {
        let priority = self
            .sources
            .get(source_path)
            .ok_or_else(|| Error::Store(format!("source {source_path:?} not registered")))?
            .priority;
        let mut inserted = 0;
        for obs in observations {
            if obs.source_id != source_path {
                return Err(Error::Store(format!(
                    "observation {} claims source {:?}, appended under {:?}",
                    obs.obs_id, obs.source_id, source_path
                )));
            }
            if self.by_id.contains_key(&obs.obs_id) {
                continue;
            }
            let key = (priority, source_path.to_string(), obs.seq);
            if self.records.contains_key(&key) {
                return Err(Error::Store(format!(
                    "sequence {} of source {:?} holds two different records",
                    obs.seq, source_path
                )));
            }
            self.by_id.insert(obs.obs_id.clone(), key.clone());
            self.records.insert(key, obs.clone());
            inserted += 1;
        }
        Ok(inserted)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// All observations, ordered by (priority, source path, sequence).
    pub fn iter(&self) -> impl Iterator<Item = &Observation> {
        self.records.values()
    }

    pub fn of_kind(&self, kind: ObservationKind) -> impl Iterator<Item = &Observation> {
        self.iter().filter(move |o| o.kind == kind)
    }

    pub fn from_source<'a>(&'a self, path: &'a str) -> impl Iterator<Item = &'a Observation> {
        self.iter().filter(move |o| o.source_id == path)
    }

    pub fn get(&self, obs_id: &str) -> Option<&Observation> {
        self.by_id.get(obs_id).and_then(|key| self.records.get(key))
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut out = String::new();
        out.push_str(&jsonfmt::to_line(&Header {
            format: FORMAT.to_string(),
            version: VERSION,
            sources: self.sources.len(),
            observations: self.records.len(),
        })?);
        out.push('\n');
        for source in self.sources.values() {
            out.push_str(&jsonfmt::to_line(&Line::Source {
                source: source.clone(),
            })?);
            out.push('\n');
        }
        for obs in self.records.values() {
            out.push_str(&jsonfmt::to_line(&Line::Observation {
                observation: obs.clone(),
            })?);
            out.push('\n');
        }
        Ok(out.into_bytes())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| Error::Store("snapshot is not valid utf-8".to_string()))?;
        let mut lines = text.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Store("empty snapshot".to_string()))?;
        let header: Header = serde_json::from_str(header_line)
            .map_err(|e| Error::Store(format!("unreadable snapshot header: {e}")))?;
        if header.format != FORMAT {
            return Err(Error::Store(format!(
                "not an observation snapshot (format {:?})",
                header.format
            )));
        }
        if header.version != VERSION {
            return Err(Error::Store(format!(
                "unsupported snapshot version {}",
                header.version
            )));
        }

        let mut store = ObservationStore::new();
        let mut sources_seen = 0usize;
        let mut observations_seen = 0usize;
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let record: Line = serde_json::from_str(line)
                .map_err(|e| Error::Store(format!("unreadable snapshot record: {e}")))?;
            match record {
                Line::Source { source } => {
                    if observations_seen > 0 {
                        return Err(Error::Store(
                            "snapshot source record after observations".to_string(),
                        ));
                    }
                    store.register_source(source)?;
                    sources_seen += 1;
                }
                Line::Observation { observation } => {
                    let expected = ids::observation_id(
                        &observation.source_id,
                        observation.seq,
                        observation.kind.name(),
                        &observation.attrs,
                    );
                    if observation.obs_id != expected {
                        return Err(Error::Store(format!(
                            "observation {} does not match its content hash",
                            observation.obs_id
                        )));
                    }
                    if store.get(&observation.obs_id).is_some() {
                        return Err(Error::Store(format!(
                            "duplicate observation {} in snapshot",
                            observation.obs_id
                        )));
                    }
                    let source_id = observation.source_id.clone();
                    store.append_all(&source_id, std::slice::from_ref(&observation))?;
                    observations_seen += 1;
                }
            }
        }
        if sources_seen != header.sources || observations_seen != header.observations {
            return Err(Error::Store(format!(
                "truncated snapshot: header promises {} sources and {} observations, found {} and {}",
                header.sources, header.observations, sources_seen, observations_seen
            )));
        }
        Ok(store)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        ObservationStore::from_bytes(&bytes)
    }
}
