//! Deterministic aggregation of the four dimension findings.

use super::types::{
    Dimension, DimensionFinding, OverallVerdict, Severity, DIMENSIONS,
};

#[derive(Debug, thiserror::Error)]
pub enum CombineError {
    #[error("malformed findings: {0}")]
    MalformedFindings(String),
}

impl CombineError {
    pub fn code(&self) -> &'static str {
        "malformed_findings"
    }
}

/// Verdict fields computed from exactly one finding per dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedVerdict {
    pub failure_categories: Vec<Dimension>,
    pub overall_severity: Severity,
    pub overall_verdict: OverallVerdict,
    pub primary_category: Option<Dimension>,
}

/// Combination rules:
/// - overall severity is the maximum across dimensions;
/// - verdict is `fail` when any dimension is high or at least two are
///   medium, else `marginal` when one is medium or any is low, else
///   `acceptable` (the fail rule is evaluated first, so a high plus a
///   medium is a fail, not a marginal);
/// - the primary category is the dimension attaining the maximum severity,
///   ties broken knowledge > tool > clarification > style; acceptable cases
///   have no primary category.
pub fn combine_findings(findings: &[DimensionFinding]) -> Result<CombinedVerdict, CombineError> {
    if findings.len() != DIMENSIONS.len() {
        return Err(CombineError::MalformedFindings(format!(
            "expected {} findings, got {}",
            DIMENSIONS.len(),
            findings.len()
        )));
    }
    let mut ordered: Vec<&DimensionFinding> = Vec::with_capacity(DIMENSIONS.len());
    for dim in DIMENSIONS {
        let matches: Vec<&DimensionFinding> =
            findings.iter().filter(|f| f.dimension == dim).collect();
        match matches.len() {
            1 => ordered.push(matches[0]),
            0 => {
                return Err(CombineError::MalformedFindings(format!(
                    "missing {} finding",
                    dim.as_str()
                )))
            }
            n => {
                return Err(CombineError::MalformedFindings(format!(
                    "{n} findings for {}",
                    dim.as_str()
                )))
            }
        }
    }

    let n_high = ordered.iter().filter(|f| f.severity == Severity::High).count();
    let n_medium = ordered.iter().filter(|f| f.severity == Severity::Medium).count();
    let n_low = ordered.iter().filter(|f| f.severity == Severity::Low).count();

    let overall_severity = ordered
        .iter()
        .map(|f| f.severity)
        .max_by_key(|s| s.rank())
        .expect("four findings");

    let overall_verdict = if n_high >= 1 || n_medium >= 2 {
        OverallVerdict::Fail
    } else if n_medium == 1 || n_low >= 1 {
        OverallVerdict::Marginal
    } else {
        OverallVerdict::Acceptable
    };

    let primary_category = if overall_verdict == OverallVerdict::Acceptable {
        None
    } else {
        ordered.iter().find(|f| f.severity == overall_severity).map(|f| f.dimension)
    };

    let failure_categories: Vec<Dimension> = ordered
        .iter()
        .filter(|f| f.severity != Severity::None)
        .map(|f| f.dimension)
        .collect();

    Ok(CombinedVerdict {
        failure_categories,
        overall_severity,
        overall_verdict,
        primary_category,
    })
}
