//! Findings: the pipeline's channel for telling a human what it did on
//! their behalf and what it could not do.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ids;

/// How urgently a finding needs attention. `Warning` findings make a strict
/// run exit non-zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Info,
    Verify,
    Warning,
}

impl Severity {
    pub fn name(self) -> &'static str {
        match self {
            Severity::Info => "info",
            Severity::Verify => "verify",
            Severity::Warning => "warning",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "info" => Some(Severity::Info),
            "verify" => Some(Severity::Verify),
            "warning" => Some(Severity::Warning),
            _ => None,
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Severity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Severity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Severity::parse(&s).ok_or_else(|| D::Error::custom(format!("unknown severity {s:?}")))
    }
}

/// The closed set of things the pipeline reports on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FindingCategory {
    DummyInserted,
    DuplicateMerged,
    UnmappedObservation,
    LowConfidence,
    RelationDowngraded,
}

impl FindingCategory {
    pub const ALL: [FindingCategory; 5] = [
        FindingCategory::DummyInserted,
        FindingCategory::DuplicateMerged,
        FindingCategory::UnmappedObservation,
        FindingCategory::LowConfidence,
        FindingCategory::RelationDowngraded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FindingCategory::DummyInserted => "dummy-inserted",
            FindingCategory::DuplicateMerged => "duplicate-merged",
            FindingCategory::UnmappedObservation => "unmapped-observation",
            FindingCategory::LowConfidence => "low-confidence",
            FindingCategory::RelationDowngraded => "relation-downgraded",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let folded = name.trim().to_ascii_lowercase();
        FindingCategory::ALL.into_iter().find(|c| c.name() == folded)
    }
}

impl fmt::Display for FindingCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for FindingCategory {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for FindingCategory {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        FindingCategory::parse(&s)
            .ok_or_else(|| D::Error::custom(format!("unknown finding category {s:?}")))
    }
}

/// One reviewable fact about the run. `subject` names the affected record:
/// an element id, relation id, or observation id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub finding_id: String,
    pub severity: Severity,
    pub category: FindingCategory,
    pub subject: String,
    pub message: String,
    /// The rule that produced the finding, e.g. `insert-dummies/host`.
    pub rule: String,
}

impl Finding {
    pub fn new(
        rule: &str,
        category: FindingCategory,
        severity: Severity,
        subject: &str,
        message: impl Into<String>,
    ) -> Self {
        Finding {
            finding_id: ids::finding_id(rule, category.name(), subject),
            severity,
            category,
            subject: subject.to_string(),
            message: message.into(),
            rule: rule.to_string(),
        }
    }
}
