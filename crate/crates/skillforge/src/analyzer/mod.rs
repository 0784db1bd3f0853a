//! Multi-dimensional failure analysis of bad cases.
//!
//! Each bad case routed by the judge is analyzed independently across the
//! knowledge, tool, clarification, and style dimensions; the four findings
//! combine through deterministic rules into a [`FailureRecord`]. An optional
//! model call adds a divergence summary; deterministic mode skips it and
//! passes the per-dimension hints through.

pub mod combine;
pub mod types;

use crate::gateway::{schemas, ChatMessage, ChatRequest, Gateway, GatewayError};

pub use combine::{combine_findings, CombineError, CombinedVerdict};
pub use types::{
    vocabulary, Dimension, DimensionFinding, FailureRecord, OverallVerdict, Severity, DIMENSIONS,
};

/// Inputs for analyzing one bad case.
#[derive(Debug, Clone)]
pub struct CaseBundle {
    pub case_id: String,
    /// Global ticket summary.
    pub summary: String,
    /// Expert reference response for the task.
    pub reference: String,
    /// The agent's customer-facing reply.
    pub response: String,
    /// Rendered execution trace (thoughts, tool calls, tool results).
    pub trace: String,
}

#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub finding: DimensionFinding,
    /// True when the model output was unusable and the finding was zeroed
    /// instead of fabricated.
    pub audited: bool,
}

fn dimension_guidance(dimension: Dimension) -> &'static str {
    match dimension {
        Dimension::Knowledge => {
            "Look for domain-knowledge problems in the agent response: information that is \
             absent (missing), factually wrong (incorrect), self-conflicting (contradictory), \
             stale (outdated), applied in the wrong situation (misapplied), or present in the \
             skill assets but never surfaced to the customer (not_surfaced)."
        }
        Dimension::Tool => {
            "Examine tool invocation behavior in the trace: calls that should have happened but \
             did not (missed_call), the wrong tool chosen (wrong_tool), bad arguments \
             (wrong_params), redundant repeats (repeated_call), results read incorrectly \
             (result_misread), available tools barely exploited (underutilized), or a needed \
             tool absent from the skill's tool set entirely (tool_missing)."
        }
        Dimension::Clarification => {
            "Assess the information-gathering strategy: asking for data the customer already \
             provided or that is unnecessary (over_clarification), failing to request data the \
             resolution needs (under_clarification), or probing the wrong aspect (wrong_focus)."
        }
        Dimension::Style => {
            "Review expression quality: mechanical checklist phrasing (robotic), answers far \
             longer than needed (verbose), lack of empathy (cold), or a register that does not \
             fit the situation (inappropriate_tone). Raise style issues only when the semantic \
             content is otherwise correct."
        }
    }
}

fn analysis_prompt(bundle: &CaseBundle, dimension: Dimension) -> Vec<ChatMessage> {
    let vocab = vocabulary(dimension).join(", ");
    let system = format!(
        "You are a support-quality analyst. Analyze exactly one dimension of a failed \
         customer-support interaction: {dim}. {guidance}\n\
         Severity levels: high, medium, low, none. Use none when the dimension shows no \
         problem, and then report no issue types.\n\
         Allowed issue types for this dimension: {vocab}.\n\
         Reply with only a JSON object: {{\"dimension\": \"{dim}\", \"severity\": ..., \
         \"issue_types\": [...], \"evidence\": [\"trace excerpt\", ...], \"hint\": \
         \"one concrete improvement suggestion\"}}",
        dim = dimension.as_str(),
        guidance = dimension_guidance(dimension),
    );
    let user = format!(
        "Ticket summary:\n{}\n\nExpert reference response:\n{}\n\nAgent response:\n{}\n\n\
         Execution trace:\n{}",
        bundle.summary, bundle.reference, bundle.response, bundle.trace
    );
    vec![ChatMessage::system(system), ChatMessage::user(user)]
}

/// Runs one dimension analysis. Unusable model output (schema violations
/// after retries, or a finding for the wrong dimension) yields a severity
/// `none` finding flagged for audit; findings are never fabricated.
pub fn analyze_dimension(
    gateway: &Gateway,
    bundle: &CaseBundle,
    dimension: Dimension,
) -> Result<AnalysisOutcome, GatewayError> {
    let req = ChatRequest::new(analysis_prompt(bundle, dimension))
        .with_schema(schemas::DIMENSION_FINDING)
        .with_tags(vec![
            format!("analyze:{}", dimension.as_str()),
            format!("case:{}", bundle.case_id),
        ]);
    match gateway.complete(&req) {
        Ok(resp) => {
            let value = resp.parsed.expect("schema-validated response");
            let finding: DimensionFinding =
                serde_json::from_value(value).map_err(|e| GatewayError::JsonParse(e.to_string()))?;
            if finding.dimension != dimension {
                log::warn!(
                    "case {}: model analyzed {} instead of {}; zeroing",
                    bundle.case_id,
                    finding.dimension.as_str(),
                    dimension.as_str()
                );
                return Ok(AnalysisOutcome {
                    finding: DimensionFinding::none(dimension),
                    audited: true,
                });
            }
            Ok(AnalysisOutcome { finding, audited: false })
        }
        Err(GatewayError::SchemaViolation(problem)) => {
            log::warn!(
                "case {}: {} analysis unusable ({problem}); zeroing",
                bundle.case_id,
                dimension.as_str()
            );
            Ok(AnalysisOutcome { finding: DimensionFinding::none(dimension), audited: true })
        }
        Err(other) => Err(other),
    }
}

/// Adds the optional natural-language layer on top of the combined verdict.
/// In deterministic mode (or when the model call fails) the summary stays
/// empty and the per-dimension hints pass through in priority order.
pub fn summarize_case(
    gateway: &Gateway,
    bundle: &CaseBundle,
    findings: &[DimensionFinding],
    deterministic: bool,
) -> (Option<String>, Vec<String>) {
    let passthrough: Vec<String> = findings
        .iter()
        .filter(|f| !f.hint.trim().is_empty())
        .map(|f| f.hint.clone())
        .collect();
    if deterministic {
        return (None, passthrough);
    }
    let findings_json =
        serde_json::to_string_pretty(findings).expect("findings serialize");
    let req = ChatRequest::new(vec![
        ChatMessage::system(
            "Summarize how the agent response diverged from the expert reference, based on the \
             per-dimension findings, and list actionable improvement hints. Reply with only a \
             JSON object: {\"divergence_summary\": \"...\", \"diagnostic_hints\": [\"...\"]}",
        ),
        ChatMessage::user(format!(
            "Ticket summary:\n{}\n\nReference:\n{}\n\nAgent response:\n{}\n\nFindings:\n{}",
            bundle.summary, bundle.reference, bundle.response, findings_json
        )),
    ])
    .with_schema(schemas::CASE_SUMMARY)
    .with_tags(vec!["analyze:summary".into(), format!("case:{}", bundle.case_id)]);
    match gateway.complete(&req) {
        Ok(resp) => {
            let value = resp.parsed.expect("schema-validated response");
            let summary = value["divergence_summary"].as_str().map(String::from);
            let hints: Vec<String> = value["diagnostic_hints"]
                .as_array()
                .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
                .unwrap_or_default();
            let hints = if hints.is_empty() { passthrough } else { hints };
            (summary, hints)
        }
        Err(e) => {
            log::warn!("case {}: summary call failed ({e}); degrading", bundle.case_id);
            (None, passthrough)
        }
    }
}

#[derive(Debug, Clone)]
pub struct CaseAnalysis {
    pub record: FailureRecord,
    /// Dimensions whose finding was zeroed due to unusable model output.
    pub audited_dimensions: Vec<Dimension>,
}

#[derive(Debug, thiserror::Error)]
pub enum AnalyzerError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Combine(#[from] CombineError),
}

/// Full per-case analysis: four dimension calls, deterministic combination,
/// optional summary.
pub fn analyze_case(
    gateway: &Gateway,
    bundle: &CaseBundle,
    deterministic_summary: bool,
) -> Result<CaseAnalysis, AnalyzerError> {
    let mut findings = Vec::with_capacity(DIMENSIONS.len());
    let mut audited = Vec::new();
    for dim in DIMENSIONS {
        let outcome = analyze_dimension(gateway, bundle, dim)?;
        if outcome.audited {
            audited.push(dim);
        }
        findings.push(outcome.finding);
    }
    let combined = combine_findings(&findings)?;
    let (divergence_summary, diagnostic_hints) =
        if combined.overall_verdict == OverallVerdict::Acceptable {
            (None, Vec::new())
        } else {
            summarize_case(gateway, bundle, &findings, deterministic_summary)
        };
    Ok(CaseAnalysis {
        record: FailureRecord {
            case_id: bundle.case_id.clone(),
            findings,
            failure_categories: combined.failure_categories,
            overall_severity: combined.overall_severity,
            overall_verdict: combined.overall_verdict,
            primary_category: combined.primary_category,
            divergence_summary,
            diagnostic_hints,
        },
        audited_dimensions: audited,
    })
}
