//! SKILL.md section model.
//!
//! A skill document is a preamble followed by `## `-headed sections. Parsing
//! keeps raw bytes so that serialize(parse(text)) reproduces normalized input
//! (LF newlines, trailing newline) exactly.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionKind {
    BackgroundKnowledge,
    CaseTypeTriage,
    CaseTypeHandling,
    Faq,
    ReferenceIndex,
    Other,
}

impl SectionKind {
    /// Position of this kind in the canonical template order. Sections are
    /// created at the spot this rank dictates.
    pub fn template_rank(self) -> u8 {
        match self {
            SectionKind::BackgroundKnowledge => 0,
            SectionKind::CaseTypeTriage => 1,
            SectionKind::CaseTypeHandling => 2,
            SectionKind::Other => 3,
            SectionKind::Faq => 4,
            SectionKind::ReferenceIndex => 5,
        }
    }
}

/// Heading-keyword table mapping a section title to its kind. Matching is
/// case-insensitive and checked in this order so that e.g. "Case-Type
/// Triage" resolves to triage, not handling.
pub fn detect_kind(title: &str) -> SectionKind {
    let t = title.to_lowercase();
    let any = |keys: &[&str]| keys.iter().any(|k| t.contains(k));
    if any(&["triage", "分诊", "类型路由"]) {
        SectionKind::CaseTypeTriage
    } else if any(&["faq", "frequently asked", "常见问题"]) {
        SectionKind::Faq
    } else if any(&["reference index", "references", "参考索引", "引用索引"]) {
        SectionKind::ReferenceIndex
    } else if any(&["background", "背景知识", "背景"]) {
        SectionKind::BackgroundKnowledge
    } else if any(&["case type", "case-type", "handling", "案例类型", "处理流程"]) {
        SectionKind::CaseTypeHandling
    } else {
        SectionKind::Other
    }
}

/// One `## `-headed section. `body` holds the raw text between this heading
/// line and the next one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub kind: SectionKind,
    pub title: String,
    pub body: String,
}

impl Section {
    pub fn new(title: &str, body: &str) -> Self {
        Section { kind: detect_kind(title), title: title.to_string(), body: body.to_string() }
    }

    /// 1-based line number of this section's heading within `doc_text`.
    pub fn heading_line(&self, doc_text: &str) -> Option<usize> {
        let needle = format!("## {}", self.title);
        doc_text.lines().position(|l| l == needle).map(|i| i + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillDoc {
    /// Raw text before the first section heading (title line, scenario tag).
    pub preamble: String,
    pub sections: Vec<Section>,
}

impl SkillDoc {
    pub fn parse(text: &str) -> SkillDoc {
        let mut heading_offsets = Vec::new();
        let mut line_start = 0usize;
        loop {
            if text[line_start..].starts_with("## ") {
                heading_offsets.push(line_start);
            }
            match text[line_start..].find('\n') {
                Some(rel) => line_start += rel + 1,
                None => break,
            }
            if line_start >= text.len() {
                break;
            }
        }
        let preamble_end = heading_offsets.first().copied().unwrap_or(text.len());
        let preamble = text[..preamble_end].to_string();
        let mut sections = Vec::new();
        for (i, &start) in heading_offsets.iter().enumerate() {
            let end = heading_offsets.get(i + 1).copied().unwrap_or(text.len());
            let chunk = &text[start..end];
            let (heading, body) = match chunk.find('\n') {
                Some(nl) => (&chunk[..nl], &chunk[nl + 1..]),
                None => (chunk, ""),
            };
            let title = heading.trim_start_matches("## ").trim_end_matches('\r').to_string();
            sections.push(Section {
                kind: detect_kind(&title),
                title,
                body: body.to_string(),
            });
        }
        SkillDoc { preamble, sections }
    }

    pub fn serialize(&self) -> String {
        let mut out = self.preamble.clone();
        for s in &self.sections {
            out.push_str("## ");
            out.push_str(&s.title);
            out.push('\n');
            out.push_str(&s.body);
        }
        out
    }

    pub fn line_count(&self) -> usize {
        self.serialize().lines().count()
    }

    pub fn char_count(&self) -> usize {
        self.serialize().chars().count()
    }

    /// First section of the given kind.
    pub fn section(&self, kind: SectionKind) -> Option<&Section> {
        self.sections.iter().find(|s| s.kind == kind)
    }

    pub fn section_mut(&mut self, kind: SectionKind) -> Option<&mut Section> {
        self.sections.iter_mut().find(|s| s.kind == kind)
    }

    pub fn section_by_title(&self, title: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.title == title)
    }

    pub fn section_by_title_mut(&mut self, title: &str) -> Option<&mut Section> {
        self.sections.iter_mut().find(|s| s.title == title)
    }

    pub fn sections_of(&self, kind: SectionKind) -> impl Iterator<Item = &Section> {
        self.sections.iter().filter(move |s| s.kind == kind)
    }

    /// Inserts a section at its template-order position: after the last
    /// section whose kind ranks at or before the new one. Returns the index
    /// it landed at.
    pub fn insert_section(&mut self, section: Section) -> usize {
        let rank = section.kind.template_rank();
        let idx = self
            .sections
            .iter()
            .position(|s| s.kind.template_rank() > rank)
            .unwrap_or(self.sections.len());
        self.sections.insert(idx, section);
        idx
    }

    /// Scenario routing tag declared in the preamble (`Scenario: <tag>`).
    pub fn scenario_tag(&self) -> Option<String> {
        for line in self.preamble.lines() {
            let stripped = line.trim().trim_matches('_').trim_matches('*');
            if let Some(rest) = stripped
                .strip_prefix("Scenario:")
                .or_else(|| stripped.strip_prefix("scenario:"))
            {
                let tag = rest.trim().to_string();
                if !tag.is_empty() {
                    return Some(tag);
                }
            }
        }
        None
    }
}
