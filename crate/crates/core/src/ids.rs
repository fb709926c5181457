//! Content-derived identifiers.
//!
//! Every identifier in the pipeline is a prefixed, truncated SHA-256 digest
//! of the record's identity fields. Equal content always hashes to the same
//! identifier, across runs and machines, which is what makes snapshots,
//! exports, and reports byte-reproducible. Each part is length-prefixed
//! before hashing so that `("ab", "c")` and `("a", "bc")` cannot collide.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

/// 16 hex characters of SHA-256 over length-prefixed parts. The length
/// prefix keeps `["ab","c"]` and `["a","bc"]` distinct.
pub fn digest16(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_be_bytes());
        hasher.update(part.as_bytes());
    }
    hex::encode(&hasher.finalize()[..8])
}

/// Identifier for an observation: hash of source path, sequence number,
/// observation kind, and the sorted attribute map.
pub fn observation_id(
    source_path: &str,
    seq: u64,
    kind: &str,
    attrs: &BTreeMap<String, String>,
) -> String {
    let seq = seq.to_string();
    let mut parts = vec![source_path, seq.as_str(), kind];
    for (k, v) in attrs {
        parts.push(k);
        parts.push(v);
    }
    format!("obs-{}", digest16(&parts))
}

/// Identifier for a model element: hash of kind and natural key. The `id-`
/// prefix keeps identifiers valid as XML IDs, which must not start with a
/// digit.
pub fn element_id(kind: &str, natural_key: &str) -> String {
    format!("id-{}", digest16(&["element", kind, natural_key]))
}

/// Identifier for a relation: hash of relation kind and endpoint ids.
pub fn relation_id(kind: &str, source: &str, target: &str) -> String {
    format!("id-{}", digest16(&["relation", kind, source, target]))
}

/// Identifier for a finding: hash of the producing rule, category, and
/// subject.
pub fn finding_id(rule: &str, category: &str, subject: &str) -> String {
    format!("f-{}", digest16(&["finding", rule, category, subject]))
}
