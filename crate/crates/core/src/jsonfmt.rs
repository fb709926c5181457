//! JSON serialization with sorted object keys.
//!
//! Artifacts must be byte-identical across runs and machines. Routing every
//! value through `serde_json::Value`, whose object type is a `BTreeMap`,
//! sorts keys regardless of struct field order.

use serde::Serialize;

use crate::error::{Error, Result};

pub fn to_value<T: Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| Error::Store(format!("serialization failure: {e}")))
}

/// Compact one-line JSON with sorted keys.
pub fn to_line<T: Serialize>(value: &T) -> Result<String> {
    Ok(to_value(value)?.to_string())
}

/// Pretty-printed JSON with sorted keys and a trailing newline.
pub fn to_pretty<T: Serialize>(value: &T) -> Result<String> {
    let v = to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)
        .map_err(|e| Error::Store(format!("serialization failure: {e}")))?;
    s.push('\n');
    Ok(s)
}
