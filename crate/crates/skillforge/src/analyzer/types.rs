//! Failure-analysis domain types: dimensions, severities, issue vocabularies.

use serde::{Deserialize, Serialize};

/// The four parallel analysis axes. Declaration order is the tie-break
/// priority: knowledge > tool > clarification > style.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Knowledge,
    Tool,
    Clarification,
    Style,
}

pub const DIMENSIONS: [Dimension; 4] =
    [Dimension::Knowledge, Dimension::Tool, Dimension::Clarification, Dimension::Style];

impl Dimension {
    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Knowledge => "knowledge",
            Dimension::Tool => "tool",
            Dimension::Clarification => "clarification",
            Dimension::Style => "style",
        }
    }

    pub fn parse(s: &str) -> Option<Dimension> {
        match s {
            "knowledge" => Some(Dimension::Knowledge),
            "tool" => Some(Dimension::Tool),
            "clarification" => Some(Dimension::Clarification),
            "style" => Some(Dimension::Style),
            _ => None,
        }
    }

    /// Lower rank wins ties on the primary category.
    pub fn priority_rank(self) -> u8 {
        match self {
            Dimension::Knowledge => 0,
            Dimension::Tool => 1,
            Dimension::Clarification => 2,
            Dimension::Style => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    High,
    Medium,
    Low,
    None,
}

pub const SEVERITIES: [Severity; 4] =
    [Severity::High, Severity::Medium, Severity::Low, Severity::None];

impl Severity {
    /// Higher rank is more severe; used for max aggregation.
    pub fn rank(self) -> u8 {
        match self {
            Severity::High => 3,
            Severity::Medium => 2,
            Severity::Low => 1,
            Severity::None => 0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Severity::High => "high",
            Severity::Medium => "medium",
            Severity::Low => "low",
            Severity::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Severity> {
        match s {
            "high" => Some(Severity::High),
            "medium" => Some(Severity::Medium),
            "low" => Some(Severity::Low),
            "none" => Some(Severity::None),
            _ => None,
        }
    }
}

/// Closed issue vocabulary per dimension.
pub fn vocabulary(dimension: Dimension) -> &'static [&'static str] {
    match dimension {
        Dimension::Knowledge => {
            &["missing", "incorrect", "contradictory", "outdated", "misapplied", "not_surfaced"]
        }
        Dimension::Tool => &[
            "missed_call",
            "wrong_tool",
            "wrong_params",
            "repeated_call",
            "result_misread",
            "underutilized",
            "tool_missing",
        ],
        Dimension::Clarification => {
            &["over_clarification", "under_clarification", "wrong_focus"]
        }
        Dimension::Style => &["robotic", "verbose", "cold", "inappropriate_tone"],
    }
}

/// One dimension's structured analysis of a bad case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionFinding {
    pub dimension: Dimension,
    pub severity: Severity,
    #[serde(default)]
    pub issue_types: Vec<String>,
    #[serde(default)]
    pub evidence: Vec<String>,
    #[serde(default)]
    pub hint: String,
}

impl DimensionFinding {
    pub fn none(dimension: Dimension) -> Self {
        DimensionFinding {
            dimension,
            severity: Severity::None,
            issue_types: Vec::new(),
            evidence: Vec::new(),
            hint: String::new(),
        }
    }

    /// Structural validity: issue types come from the dimension vocabulary
    /// and severity `none` carries no issues.
    pub fn validate(&self) -> Result<(), String> {
        if self.severity == Severity::None && !self.issue_types.is_empty() {
            return Err(format!(
                "{} finding has severity none but lists issues",
                self.dimension.as_str()
            ));
        }
        if self.severity != Severity::None && self.issue_types.is_empty() {
            return Err(format!(
                "{} finding has severity {} but lists no issue types",
                self.dimension.as_str(),
                self.severity.as_str()
            ));
        }
        let vocab = vocabulary(self.dimension);
        for issue in &self.issue_types {
            if !vocab.contains(&issue.as_str()) {
                return Err(format!(
                    "issue type {issue:?} is not in the {} vocabulary {:?}",
                    self.dimension.as_str(),
                    vocab
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverallVerdict {
    Fail,
    Marginal,
    Acceptable,
}

impl OverallVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            OverallVerdict::Fail => "fail",
            OverallVerdict::Marginal => "marginal",
            OverallVerdict::Acceptable => "acceptable",
        }
    }
}

/// Per-case output of the four-dimension analysis plus the deterministic
/// verdict fields. Field names match the persisted JSONL records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub case_id: String,
    /// Exactly one finding per dimension, in priority order.
    pub findings: Vec<DimensionFinding>,
    pub failure_categories: Vec<Dimension>,
    pub overall_severity: Severity,
    pub overall_verdict: OverallVerdict,
    pub primary_category: Option<Dimension>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_summary: Option<String>,
    #[serde(default)]
    pub diagnostic_hints: Vec<String>,
}

impl FailureRecord {
    pub fn finding(&self, dimension: Dimension) -> Option<&DimensionFinding> {
        self.findings.iter().find(|f| f.dimension == dimension)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_closed_sets() {
        assert_eq!(vocabulary(Dimension::Clarification).len(), 3);
        assert!(vocabulary(Dimension::Tool).contains(&"tool_missing"));
    }

    #[test]
    fn finding_validation() {
        let mut f = DimensionFinding::none(Dimension::Style);
        assert!(f.validate().is_ok());
        f.issue_types.push("verbose".into());
        assert!(f.validate().is_err());
        f.severity = Severity::Low;
        assert!(f.validate().is_ok());
        f.issue_types.push("hallucination".into());
        assert!(f.validate().is_err());
    }

    #[test]
    fn severity_ordering() {
        assert!(Severity::High.rank() > Severity::Medium.rank());
        assert!(Severity::Low.rank() > Severity::None.rank());
    }
}
