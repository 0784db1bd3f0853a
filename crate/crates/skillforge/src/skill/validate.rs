//! Structural validation of skill packages.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::budget::check_budget;
use super::doc::SectionKind;
use super::SkillPackage;

/// Phrases marking an escalation fallback inside a handling section.
pub const ESCALATION_MARKERS: &[&str] = &["escalat", "转人工", "人工客服", "人工支持"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationSeverity {
    /// Breaks package integrity; blocks version commits.
    Structural,
    /// Quality gate for the creator and optimizer only.
    Advisory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: String,
    pub subject: String,
    pub detail: String,
    pub severity: ViolationSeverity,
}

impl Violation {
    fn structural(code: &str, subject: &str, detail: String) -> Self {
        Violation {
            code: code.into(),
            subject: subject.into(),
            detail,
            severity: ViolationSeverity::Structural,
        }
    }

    fn advisory(code: &str, subject: &str, detail: String) -> Self {
        Violation {
            code: code.into(),
            subject: subject.into(),
            detail,
            severity: ViolationSeverity::Advisory,
        }
    }
}

fn tool_mention_regexes() -> &'static (Regex, Regex) {
    static RE: OnceLock<(Regex, Regex)> = OnceLock::new();
    RE.get_or_init(|| {
        (
            // "Tool: `name`" and "... tool `name` ..."
            Regex::new(r"(?i)tool[^`\n]*`([A-Za-z][A-Za-z0-9_\-]*)`").unwrap(),
            // "`name` tool" and "invoke `name` ... tool"
            Regex::new(r"(?i)`([A-Za-z][A-Za-z0-9_\-]*)`[^`\n]*tool").unwrap(),
        )
    })
}

/// Tool names mentioned by workflow text, per the `Tool:`-plus-backticks
/// writing convention used throughout skill documents.
pub fn mentioned_tools(body: &str) -> Vec<String> {
    let (before, after) = tool_mention_regexes();
    let mut names = Vec::new();
    for line in body.lines() {
        for re in [before, after] {
            for cap in re.captures_iter(line) {
                let name = cap[1].to_string();
                if !names.contains(&name) {
                    names.push(name);
                }
            }
        }
    }
    names
}

/// Checks every package invariant and returns violations as data; an empty
/// list means the package conforms.
pub fn validate_package(pkg: &SkillPackage) -> Vec<Violation> {
    let mut out = Vec::new();
    let doc = &pkg.skill_md;

    for kind in [SectionKind::CaseTypeTriage, SectionKind::Faq, SectionKind::ReferenceIndex] {
        let n = doc.sections_of(kind).count();
        if n > 1 {
            out.push(Violation::structural(
                "duplicate_section",
                &format!("{kind:?}"),
                format!("{n} sections of a singleton kind"),
            ));
        }
    }

    for section in doc.sections_of(SectionKind::CaseTypeHandling) {
        let lower = section.body.to_lowercase();
        if !ESCALATION_MARKERS.iter().any(|m| lower.contains(m)) {
            out.push(Violation::advisory(
                "missing_escalation",
                &section.title,
                "handling section lacks an escalation fallback line".into(),
            ));
        }
    }

    let declared: Vec<&str> = pkg.tools.iter().map(|t| t.name.as_str()).collect();
    for section in &doc.sections {
        if matches!(section.kind, SectionKind::ReferenceIndex) {
            continue;
        }
        for name in mentioned_tools(&section.body) {
            if !declared.contains(&name.as_str()) {
                out.push(Violation::structural(
                    "unknown_tool",
                    &section.title,
                    format!("workflow references undeclared tool `{name}`"),
                ));
            }
        }
    }

    static REF_CITE: OnceLock<Regex> = OnceLock::new();
    let ref_cite = REF_CITE
        .get_or_init(|| Regex::new(r"references/([A-Za-z0-9][A-Za-z0-9_\-.]*)").unwrap());
    if let Some(index) = doc.section(SectionKind::ReferenceIndex) {
        for cap in ref_cite.captures_iter(&index.body) {
            let name = &cap[1];
            if name != "tools.json" && !pkg.references.contains_key(name) {
                out.push(Violation::structural(
                    "missing_reference",
                    name,
                    "reference index cites a file absent from the package".into(),
                ));
            }
        }
    }

    let mut seen = Vec::new();
    for tool in &pkg.tools {
        if seen.contains(&tool.name.as_str()) {
            out.push(Violation::structural(
                "duplicate_tool",
                &tool.name,
                "tool name declared twice".into(),
            ));
        } else {
            seen.push(tool.name.as_str());
        }
        for param in &tool.parameters {
            if param.required && param.description.trim().is_empty() {
                out.push(Violation::advisory(
                    "missing_param_description",
                    &format!("{}::{}", tool.name, param.name),
                    "required parameter has no description".into(),
                ));
            }
        }
    }

    let budget = check_budget(doc);
    if !budget.within_budget {
        out.push(Violation::advisory(
            "budget_exceeded",
            "SKILL.md",
            format!(
                "{} lines / {} chars (over by {} lines, {} chars)",
                budget.line_count, budget.char_count, budget.overflow_lines, budget.overflow_chars
            ),
        ));
    }

    out
}

/// True when any violation is structural.
pub fn has_structural(violations: &[Violation]) -> bool {
    violations.iter().any(|v| v.severity == ViolationSeverity::Structural)
}
