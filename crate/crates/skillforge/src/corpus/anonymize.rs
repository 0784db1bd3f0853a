//! Anonymization checks for ticket-derived text.
//!
//! Mined text must use typed placeholders like `<DOMAIN_1>` or `<PHONE_2>`
//! instead of raw identifiers. The scanner flags patterns that look like
//! phone numbers, email addresses, or bare domain names.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnonKind {
    Phone,
    Email,
    Domain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnonFinding {
    pub kind: AnonKind,
    pub excerpt: String,
}

fn patterns() -> &'static [(AnonKind, Regex)] {
    static PATTERNS: OnceLock<Vec<(AnonKind, Regex)>> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        vec![
            (AnonKind::Phone, Regex::new(r"\b\d{3}[-. ]\d{4}\b").unwrap()),
            (AnonKind::Phone, Regex::new(r"\b\+?\d{11,13}\b").unwrap()),
            (
                AnonKind::Email,
                Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}").unwrap(),
            ),
            // Lowercase only: typed placeholders are uppercase and never
            // carry a dotted TLD.
            (
                AnonKind::Domain,
                Regex::new(r"\b[a-z0-9][a-z0-9\-]*\.(?:com|net|org|io|cn|co|dev|app|ai)\b")
                    .unwrap(),
            ),
        ]
    })
}

/// Scans `text` for identifier-looking patterns outside placeholder syntax.
pub fn check_anonymization(text: &str) -> Vec<AnonFinding> {
    let mut hits: Vec<(usize, AnonFinding)> = Vec::new();
    for (kind, re) in patterns() {
        for m in re.find_iter(text) {
            hits.push((m.start(), AnonFinding { kind: *kind, excerpt: m.as_str().to_string() }));
        }
    }
    hits.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.excerpt.cmp(&b.1.excerpt)));
    hits.into_iter().map(|(_, f)| f).collect()
}
