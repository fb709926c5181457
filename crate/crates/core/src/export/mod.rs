//! Artifact rendering for target models.
//!
//! `archimate-3` models render to exchange XML; every framework also has a
//! structured JSON form and a Graphviz view. All three are pure string
//! producers with byte-deterministic output.

pub mod archimate;
pub mod dot;

use crate::error::Result;
use crate::jsonfmt;
use crate::transform::TargetModel;

pub use archimate::to_xml;
pub use dot::to_dot;

/// Sorted-key JSON rendering of the target model, for frameworks without
/// a dedicated exchange format.
pub fn to_structured_json(target: &TargetModel) -> Result<String> {
    jsonfmt::to_pretty(target)
}
