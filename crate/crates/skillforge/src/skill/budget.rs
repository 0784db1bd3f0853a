//! Size budget enforcement and detail offloading.
//!
//! SKILL.md stays within 500 lines and 10K characters. Going over is a flag
//! at parse time, but the creator and optimizer treat it as a hard gate and
//! offload detail to reference files, keeping decision logic in place.

use std::collections::BTreeMap;

use super::doc::{Section, SectionKind, SkillDoc};

pub const MAX_LINES: usize = 500;
pub const MAX_CHARS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetReport {
    pub within_budget: bool,
    pub line_count: usize,
    pub char_count: usize,
    pub overflow_lines: usize,
    pub overflow_chars: usize,
}

pub fn check_budget(doc: &SkillDoc) -> BudgetReport {
    let line_count = doc.line_count();
    let char_count = doc.char_count();
    BudgetReport {
        within_budget: line_count <= MAX_LINES && char_count <= MAX_CHARS,
        line_count,
        char_count,
        overflow_lines: line_count.saturating_sub(MAX_LINES),
        overflow_chars: char_count.saturating_sub(MAX_CHARS),
    }
}

#[derive(Debug, thiserror::Error)]
#[error("decision logic alone exceeds the size budget ({lines} lines / {chars} chars)")]
pub struct BudgetUnresolvable {
    pub lines: usize,
    pub chars: usize,
}

/// Moves detail content out of `doc` into reference files until the document
/// fits the budget. Offload candidates, in order: exemplar quote blocks,
/// then indented detail bullets. Triage and Reference Index sections are
/// never touched; workflow and branching lines stay in place.
///
/// Returns the names of reference files created or extended.
pub fn offload_detail(
    doc: &mut SkillDoc,
    references: &mut BTreeMap<String, String>,
) -> Result<Vec<String>, BudgetUnresolvable> {
    let mut touched = Vec::new();
    if check_budget(doc).within_budget {
        return Ok(touched);
    }

    for pass in [OffloadPass::QuoteBlocks, OffloadPass::DetailBullets] {
        let indices: Vec<usize> = (0..doc.sections.len()).collect();
        for idx in indices {
            if check_budget(doc).within_budget {
                break;
            }
            let offloadable = matches!(
                doc.sections[idx].kind,
                SectionKind::CaseTypeHandling
                    | SectionKind::BackgroundKnowledge
                    | SectionKind::Faq
                    | SectionKind::Other
            );
            if !offloadable {
                continue;
            }
            let section = &doc.sections[idx];
            let (kept, moved) = split_section_body(&section.body, pass);
            if moved.trim().is_empty() {
                continue;
            }
            let ref_name = format!("details_{}.md", slug(&doc.sections[idx].title));
            let pointer = format!("- Detail moved to references/{ref_name}\n");
            let mut new_body = kept;
            if !new_body.contains(pointer.trim_end()) {
                if !new_body.ends_with('\n') && !new_body.is_empty() {
                    new_body.push('\n');
                }
                new_body.push_str(&pointer);
            }
            let title = doc.sections[idx].title.clone();
            doc.sections[idx].body = new_body;
            let entry = references.entry(ref_name.clone()).or_default();
            if entry.is_empty() {
                entry.push_str(&format!("# Offloaded detail: {title}\n\n"));
            }
            entry.push_str(&moved);
            if !entry.ends_with('\n') {
                entry.push('\n');
            }
            ensure_reference_indexed(doc, &ref_name, &title);
            if !touched.contains(&ref_name) {
                touched.push(ref_name);
            }
        }
        if check_budget(doc).within_budget {
            break;
        }
    }

    let report = check_budget(doc);
    if report.within_budget {
        Ok(touched)
    } else {
        Err(BudgetUnresolvable { lines: report.line_count, chars: report.char_count })
    }
}

#[derive(Clone, Copy, PartialEq)]
enum OffloadPass {
    /// Blocks of `> ` quoted exemplar lines.
    QuoteBlocks,
    /// Two-space indented list items (elaboration under a decision line).
    DetailBullets,
}

fn split_section_body(body: &str, pass: OffloadPass) -> (String, String) {
    let mut kept = String::new();
    let mut moved = String::new();
    for line in body.lines() {
        let is_detail = match pass {
            OffloadPass::QuoteBlocks => line.starts_with("> "),
            OffloadPass::DetailBullets => {
                line.starts_with("  - ") || line.starts_with("  * ")
            }
        };
        if is_detail {
            moved.push_str(line);
            moved.push('\n');
        } else {
            kept.push_str(line);
            kept.push('\n');
        }
    }
    if !body.ends_with('\n') {
        // lines() dropped the missing trailing newline; keep bytes stable.
        if kept.ends_with('\n') {
            kept.pop();
        }
    }
    (kept, moved)
}

fn ensure_reference_indexed(doc: &mut SkillDoc, ref_name: &str, source_title: &str) {
    let line = format!("- references/{ref_name} — offloaded detail for {source_title}\n");
    match doc.section_mut(SectionKind::ReferenceIndex) {
        Some(s) => {
            if !s.body.contains(&format!("references/{ref_name}")) {
                s.body.push_str(&line);
            }
        }
        None => {
            doc.insert_section(Section::new("Reference Index", &line));
        }
    }
}

fn slug(title: &str) -> String {
    let mut out = String::new();
    for ch in title.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('_') && !out.is_empty() {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}
