//! Structured-output schemas for model responses.
//!
//! A [`ChatRequest`](super::ChatRequest) names one of these schemas; the
//! gateway extracts JSON from the completion and validates it here before
//! handing it to the caller. Validation failures trigger repair retries.

use serde_json::Value;

use crate::analyzer::types::{vocabulary, Dimension, Severity};

pub const JUDGE_VERDICT: &str = "judge_verdict";
pub const DIMENSION_FINDING: &str = "dimension_finding";
pub const AGENT_STEP: &str = "agent_step";
pub const WORKFLOW_RECORD: &str = "workflow_record";
pub const CASE_TYPE_LABEL: &str = "case_type_label";
pub const CASE_SUMMARY: &str = "case_summary";
pub const RELEVANCE: &str = "relevance";
pub const CONDENSED_DOC: &str = "condensed_doc";
pub const DIAGNOSTICIAN_STEP: &str = "diagnostician_step";
pub const EDIT_CONTENT: &str = "edit_content";

/// Validates `value` against the named schema.
pub fn validate(schema: &str, value: &Value) -> Result<(), String> {
    match schema {
        JUDGE_VERDICT => judge_verdict(value),
        DIMENSION_FINDING => dimension_finding(value),
        AGENT_STEP => agent_step(value),
        WORKFLOW_RECORD => workflow_record(value),
        CASE_TYPE_LABEL => nonempty_str_field(value, "label"),
        CASE_SUMMARY => case_summary(value),
        RELEVANCE => bool_field(value, "relevant"),
        CONDENSED_DOC => {
            nonempty_str_field(value, "title")?;
            nonempty_str_field(value, "body")
        }
        DIAGNOSTICIAN_STEP => diagnostician_step(value),
        EDIT_CONTENT => edit_content(value),
        other => Err(format!("unknown schema {other:?}")),
    }
}

fn obj<'v>(value: &'v Value) -> Result<&'v serde_json::Map<String, Value>, String> {
    value.as_object().ok_or_else(|| "expected a JSON object".to_string())
}

fn nonempty_str_field(value: &Value, field: &str) -> Result<(), String> {
    match value.get(field).and_then(Value::as_str) {
        Some(s) if !s.trim().is_empty() => Ok(()),
        Some(_) => Err(format!("field {field:?} must be nonempty")),
        None => Err(format!("missing string field {field:?}")),
    }
}

fn bool_field(value: &Value, field: &str) -> Result<(), String> {
    value
        .get(field)
        .and_then(Value::as_bool)
        .map(|_| ())
        .ok_or_else(|| format!("missing boolean field {field:?}"))
}

fn str_array<'v>(value: &'v Value, field: &str) -> Result<Vec<&'v str>, String> {
    let arr = value
        .get(field)
        .and_then(Value::as_array)
        .ok_or_else(|| format!("missing array field {field:?}"))?;
    arr.iter()
        .map(|v| v.as_str().ok_or_else(|| format!("{field:?} must contain strings")))
        .collect()
}

fn judge_verdict(value: &Value) -> Result<(), String> {
    obj(value)?;
    let verdict = value
        .get("verdict")
        .and_then(Value::as_str)
        .ok_or("missing string field \"verdict\"")?;
    if !["consistent", "partial", "inconsistent"].contains(&verdict) {
        return Err(format!(
            "verdict {verdict:?} not in {{consistent, partial, inconsistent}}"
        ));
    }
    for field in ["ref_core_action", "actual_action", "reason"] {
        nonempty_str_field(value, field)?;
    }
    Ok(())
}

fn dimension_finding(value: &Value) -> Result<(), String> {
    obj(value)?;
    let dim_str = value
        .get("dimension")
        .and_then(Value::as_str)
        .ok_or("missing string field \"dimension\"")?;
    let dimension =
        Dimension::parse(dim_str).ok_or_else(|| format!("unknown dimension {dim_str:?}"))?;
    let sev_str = value
        .get("severity")
        .and_then(Value::as_str)
        .ok_or("missing string field \"severity\"")?;
    let severity =
        Severity::parse(sev_str).ok_or_else(|| format!("unknown severity {sev_str:?}"))?;
    let issues = str_array(value, "issue_types")?;
    if severity == Severity::None && !issues.is_empty() {
        return Err("severity none must carry no issue types".into());
    }
    if severity != Severity::None && issues.is_empty() {
        return Err(format!("severity {sev_str} requires at least one issue type"));
    }
    let vocab = vocabulary(dimension);
    for issue in issues {
        if !vocab.contains(&issue) {
            return Err(format!(
                "issue type {issue:?} not in the {dim_str} vocabulary {vocab:?}"
            ));
        }
    }
    Ok(())
}

fn agent_step(value: &Value) -> Result<(), String> {
    obj(value)?;
    match value.get("action").and_then(Value::as_str) {
        Some("tool_call") => {
            nonempty_str_field(value, "tool")?;
            match value.get("args") {
                Some(Value::Object(_)) | None => Ok(()),
                Some(_) => Err("\"args\" must be an object".into()),
            }
        }
        Some("final") => nonempty_str_field(value, "response"),
        Some(other) => Err(format!("action {other:?} not in {{tool_call, final}}")),
        None => Err("missing string field \"action\"".into()),
    }
}

fn workflow_record(value: &Value) -> Result<(), String> {
    obj(value)?;
    nonempty_str_field(value, "core_issue")?;
    let path = value
        .get("resolution_path")
        .and_then(Value::as_array)
        .ok_or("missing array field \"resolution_path\"")?;
    if path.is_empty() {
        return Err("resolution_path must be nonempty".into());
    }
    for step in path {
        let tag = step.get("tag").and_then(Value::as_str).ok_or("step missing \"tag\"")?;
        if !["clarify", "gather", "diagnose", "resolve", "escalate"].contains(&tag) {
            return Err(format!("unknown resolution step tag {tag:?}"));
        }
        nonempty_str_field(step, "text")?;
    }
    if let Some(items) = value.get("accumulated_experience").and_then(Value::as_array) {
        for item in items {
            nonempty_str_field(item, "text")?;
            let polarity =
                item.get("polarity").and_then(Value::as_str).ok_or("lesson missing polarity")?;
            if !["positive", "negative"].contains(&polarity) {
                return Err(format!("polarity {polarity:?} not in {{positive, negative}}"));
            }
        }
    }
    if let Some(items) = value.get("exemplar_responses").and_then(Value::as_array) {
        for item in items {
            nonempty_str_field(item, "text")?;
            nonempty_str_field(item, "usage_context")?;
        }
    }
    Ok(())
}

fn case_summary(value: &Value) -> Result<(), String> {
    obj(value)?;
    nonempty_str_field(value, "divergence_summary")?;
    str_array(value, "diagnostic_hints").map(|_| ())
}

fn diagnostician_step(value: &Value) -> Result<(), String> {
    obj(value)?;
    match value.get("action").and_then(Value::as_str) {
        Some("tool_call") => nonempty_str_field(value, "tool"),
        Some("final_report") => match value.get("report") {
            Some(Value::Object(_)) => Ok(()),
            _ => Err("final_report requires an object field \"report\"".into()),
        },
        Some(other) => Err(format!("action {other:?} not in {{tool_call, final_report}}")),
        None => Err("missing string field \"action\"".into()),
    }
}

const CONTENT_KINDS: [&str; 6] =
    ["knowledge", "tool_rule", "clarification_rule", "style_rule", "example", "faq_entry"];

fn edit_content(value: &Value) -> Result<(), String> {
    obj(value)?;
    let edits = value
        .get("edits")
        .and_then(Value::as_array)
        .ok_or("missing array field \"edits\"")?;
    if edits.is_empty() {
        return Err("edits must be nonempty".into());
    }
    for edit in edits {
        let kind = edit
            .get("content_kind")
            .and_then(Value::as_str)
            .ok_or("edit missing \"content_kind\"")?;
        if !CONTENT_KINDS.contains(&kind) {
            return Err(format!("content_kind {kind:?} not in {CONTENT_KINDS:?}"));
        }
        nonempty_str_field(edit, "text")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn judge_verdict_closed_set() {
        let good = json!({
            "verdict": "partial",
            "ref_core_action": "ask for the domain",
            "actual_action": "gave generic advice",
            "reason": "missing the key request"
        });
        assert!(validate(JUDGE_VERDICT, &good).is_ok());
        let bad = json!({
            "verdict": "maybe",
            "ref_core_action": "x", "actual_action": "y", "reason": "z"
        });
        assert!(validate(JUDGE_VERDICT, &bad).is_err());
    }

    #[test]
    fn dimension_finding_vocabulary_enforced() {
        let good = json!({
            "dimension": "knowledge", "severity": "high",
            "issue_types": ["missing"], "evidence": [], "hint": "add the rule"
        });
        assert!(validate(DIMENSION_FINDING, &good).is_ok());
        let bad = json!({
            "dimension": "style", "severity": "high",
            "issue_types": ["hallucination"], "evidence": [], "hint": ""
        });
        let err = validate(DIMENSION_FINDING, &bad).unwrap_err();
        assert!(err.contains("vocabulary"));
    }

    #[test]
    fn agent_step_variants() {
        assert!(validate(AGENT_STEP, &json!({"action": "final", "response": "hi"})).is_ok());
        assert!(validate(
            AGENT_STEP,
            &json!({"action": "tool_call", "tool": "read_file", "args": {"path": "/x"}})
        )
        .is_ok());
        assert!(validate(AGENT_STEP, &json!({"action": "ponder"})).is_err());
    }

    #[test]
    fn workflow_record_tags() {
        let good = json!({
            "core_issue": "upload fails",
            "resolution_path": [
                {"tag": "clarify", "text": "asked for the bucket"},
                {"tag": "resolve", "text": "fixed the policy"}
            ],
            "accumulated_experience": [{"text": "check ACL first", "polarity": "positive"}],
            "exemplar_responses": [{"text": "Happy to help", "usage_context": "greeting"}]
        });
        assert!(validate(WORKFLOW_RECORD, &good).is_ok());
        let bad = json!({"core_issue": "x", "resolution_path": [{"tag": "guess", "text": "y"}]});
        assert!(validate(WORKFLOW_RECORD, &bad).is_err());
    }
}
