//! eamine-core mines enterprise architecture models from technical evidence
//! about an IT landscape.
//!
//! The pipeline has three stages. Ingest adapters harmonize heterogeneous
//! inputs (network scans, flow records, syslog, SNMP walks, process event
//! logs) into uniform [`Observation`] records held in an
//! [`ObservationStore`]. Mapping and reasoning rules lift those observations
//! into a framework-neutral [`GenericModel`] whose vocabulary is fixed by the
//! [`Catalogue`]; gaps in the evidence are filled with explicitly flagged
//! dummy elements rather than silently dropped. Finally the generic model is
//! transformed into a target framework ([`TargetModel`]), exported as an
//! ArchiMate model exchange file or GraphViz DOT, and summarized in a
//! verification [`Report`] that records every finding, dummy object, and
//! transformation decision for a human modeler to review.
//!
//! All stages are deterministic: identifiers are content hashes, collections
//! iterate in sorted order, and the same inputs produce byte-identical
//! artifacts.

pub mod addr;
pub mod catalogue;
pub mod config;
pub mod error;
pub mod export;
pub mod finding;
pub mod ids;
pub mod ingest;
pub mod jsonfmt;
pub mod mapper;
pub mod model;
pub mod observation;
pub mod pipeline;
pub mod procmine;
pub mod reason;
pub mod report;
pub mod store;
pub mod transform;

pub use catalogue::{Catalogue, Confidence, ElementKind, Layer, RelationKind, StructureCategory};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use finding::{Finding, FindingCategory, Severity};
pub use model::{AttrConflict, GenericElement, GenericModel, GenericRelation};
pub use observation::{AdapterKind, Observation, ObservationKind, SourceDescriptor};
pub use pipeline::{run_pipeline, PipelineRun};
pub use procmine::DirectlyFollowsGraph;
pub use reason::RuleConfig;
pub use report::Report;
pub use store::ObservationStore;
pub use transform::{
    ChangeAction, ChangeEntry, ChangeLog, ChangeSubject, FrameworkDef, MappingRule,
    TargetElement, TargetModel, TargetRelation,
};
