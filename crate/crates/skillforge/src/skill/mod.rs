//! Skill packages: parse, validate, serialize, and version.
//!
//! A package is a directory tree:
//!
//! ```text
//! skill_name/
//! |-- SKILL.md           # core instructions and workflows
//! +-- references/
//!     |-- tools.json     # verified tool schemas
//!     |-- knowledge_*.md # domain knowledge documents
//!     +-- ...
//! ```
//!
//! Packages are immutable values; mutation happens by editing a [`Vfs`] tree
//! and committing, which snapshots the state under the next version label.

pub mod budget;
pub mod doc;
pub mod tools;
pub mod validate;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use budget::{check_budget, offload_detail, BudgetReport, MAX_CHARS, MAX_LINES};
pub use doc::{detect_kind, Section, SectionKind, SkillDoc};
pub use tools::{parse_tools_json, render_tools_json, ToolParam, ToolSchema};
pub use validate::{has_structural, mentioned_tools, validate_package, Violation, ViolationSeverity};

use crate::vfs::{path as vpath, Vfs};

#[derive(Debug, thiserror::Error)]
pub enum SkillError {
    #[error("missing SKILL.md under {0}")]
    MissingSkillMd(String),
    #[error("malformed tools.json: {0}")]
    BadToolsJson(String),
    #[error("package fails structural validation: {0:?}")]
    InvalidSkill(Vec<Violation>),
    #[error("version label {0} already committed")]
    DuplicateVersion(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl SkillError {
    pub fn code(&self) -> &'static str {
        match self {
            SkillError::MissingSkillMd(_) => "missing_skill_md",
            SkillError::BadToolsJson(_) => "bad_tools_json",
            SkillError::InvalidSkill(_) => "invalid_skill",
            SkillError::DuplicateVersion(_) => "duplicate_version",
            SkillError::Io(_) => "io",
        }
    }
}

/// A parsed, versioned skill artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillPackage {
    pub name: String,
    pub version: u32,
    pub skill_md: SkillDoc,
    pub tools: Vec<ToolSchema>,
    /// Reference documents by file name under `references/` (tools.json is
    /// carried separately in `tools`).
    pub references: BTreeMap<String, String>,
}

impl SkillPackage {
    /// Parses a package from a VFS subtree rooted at `root`.
    pub fn parse_from_vfs(vfs: &Vfs, root: &str) -> Result<SkillPackage, SkillError> {
        let root = crate::vfs::normalize_path(root, vfs.cwd())
            .map_err(|_| SkillError::MissingSkillMd(root.to_string()))?;
        let md_path = vpath::join(&root, "SKILL.md");
        let md = vfs.read_file(&md_path);
        let Some(text) = md.text() else {
            return Err(SkillError::MissingSkillMd(root));
        };
        let skill_md = SkillDoc::parse(text);

        let refs_dir = vpath::join(&root, "references");
        let mut tools = Vec::new();
        let mut references = BTreeMap::new();
        if let Some(node) = vfs.node(&refs_dir) {
            if node.is_dir() {
                let prefix = format!("{refs_dir}/");
                for (k, n) in vfs.nodes().iter() {
                    let Some(rel) = k.strip_prefix(&prefix) else { continue };
                    let Some(content) = n.content.as_deref() else { continue };
                    if rel == "tools.json" {
                        tools = parse_tools_json(content)
                            .map_err(|e| SkillError::BadToolsJson(e.to_string()))?;
                    } else {
                        references.insert(rel.to_string(), content.to_string());
                    }
                }
            }
        }

        let name = if vpath::basename(&root).is_empty() {
            "skill".to_string()
        } else {
            vpath::basename(&root).to_string()
        };
        Ok(SkillPackage { name, version: 0, skill_md, tools, references })
    }

    pub fn with_version(mut self, version: u32) -> Self {
        self.version = version;
        self
    }

    /// Writes the package into a VFS subtree, replacing whatever was there.
    pub fn write_to_vfs(&self, vfs: &mut Vfs, root: &str) {
        if vfs.exists(root) {
            vfs.delete(root, true);
        }
        vfs.mkdir(root);
        vfs.write_file(&vpath::join(root, "SKILL.md"), &self.skill_md.serialize());
        let refs = vpath::join(root, "references");
        vfs.mkdir(&refs);
        vfs.write_file(&vpath::join(&refs, "tools.json"), &render_tools_json(&self.tools));
        for (name, text) in &self.references {
            vfs.write_file(&vpath::join(&refs, name), text);
        }
    }

    /// Loads a package from an on-disk directory tree.
    pub fn load_from_dir(dir: &Path) -> Result<SkillPackage, SkillError> {
        let mut vfs = Vfs::new();
        let name = dir
            .file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_else(|| "skill".to_string());
        let root = format!("/{name}");
        vfs.import_tree(dir, &root)?;
        SkillPackage::parse_from_vfs(&vfs, &root)
    }

    /// Exports the package as an on-disk directory tree.
    pub fn save_to_dir(&self, dir: &Path) -> Result<(), SkillError> {
        let mut vfs = Vfs::new();
        self.write_to_vfs(&mut vfs, "/pkg");
        vfs.export_tree("/pkg", dir)?;
        Ok(())
    }

    /// The scenario this skill routes, read from the document preamble.
    pub fn scenario(&self) -> Option<String> {
        self.skill_md.scenario_tag()
    }
}

/// Commits the mutated skill tree under `root` as the next version: the
/// package must pass structural validation, and the VFS state is captured
/// under the label `v{n+1}`.
pub fn commit_version(
    vfs: &mut Vfs,
    root: &str,
    current_version: u32,
) -> Result<SkillPackage, SkillError> {
    let pkg = SkillPackage::parse_from_vfs(vfs, root)
        .map_err(|e| match e {
            SkillError::MissingSkillMd(_) | SkillError::BadToolsJson(_) => {
                SkillError::InvalidSkill(vec![Violation {
                    code: e.code().into(),
                    subject: root.into(),
                    detail: e.to_string(),
                    severity: ViolationSeverity::Structural,
                }])
            }
            other => other,
        })?;
    let violations = validate_package(&pkg);
    if has_structural(&violations) {
        let structural: Vec<Violation> = violations
            .into_iter()
            .filter(|v| v.severity == ViolationSeverity::Structural)
            .collect();
        return Err(SkillError::InvalidSkill(structural));
    }
    let next = current_version + 1;
    let label = format!("v{next}");
    let snap = vfs.snapshot(&label);
    if !snap.success {
        return Err(SkillError::DuplicateVersion(label));
    }
    Ok(pkg.with_version(next))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical_md() -> String {
        "\
# Storage support

_Scenario: storage_

## Background Knowledge
- Buckets are private by default.

## Case-Type Triage
- If access is denied → see \"Case Type: Access denied\".

## Case Type: Access denied
- Tool: `bucket_info` — inspect the ACL
- If the ACL is private: explain signed URL access.
- If unresolved after the above, escalate to a human specialist.

## FAQ
**Q:** Can a signed URL reach a private object? **A:** Yes, while valid.

## Reference Index
- references/tools.json — verified tool schemas
- references/knowledge_access.md — access rules
"
        .to_string()
    }

    fn canonical_package(vfs: &mut Vfs) {
        vfs.write_file("/skill/SKILL.md", &canonical_md());
        vfs.write_file(
            "/skill/references/tools.json",
            &render_tools_json(&[ToolSchema::new("bucket_info", "查询 bucket 配置")]),
        );
        vfs.write_file("/skill/references/knowledge_access.md", "# Access rules\n");
    }

    #[test]
    fn parses_canonical_package() {
        let mut vfs = Vfs::new();
        canonical_package(&mut vfs);
        let pkg = SkillPackage::parse_from_vfs(&vfs, "/skill").unwrap();
        assert_eq!(pkg.name, "skill");
        assert_eq!(pkg.skill_md.sections.len(), 5);
        assert_eq!(pkg.tools.len(), 1);
        assert_eq!(pkg.references.len(), 1);
        assert_eq!(pkg.scenario().as_deref(), Some("storage"));
        assert!(validate_package(&pkg).is_empty());
    }

    #[test]
    fn package_without_references_dir() {
        let mut vfs = Vfs::new();
        vfs.write_file("/bare/SKILL.md", "## Background Knowledge\n- x\n");
        let pkg = SkillPackage::parse_from_vfs(&vfs, "/bare").unwrap();
        assert!(pkg.tools.is_empty());
        assert!(pkg.references.is_empty());
    }

    #[test]
    fn missing_skill_md_errors() {
        let vfs = Vfs::new();
        let err = SkillPackage::parse_from_vfs(&vfs, "/nope").unwrap_err();
        assert_eq!(err.code(), "missing_skill_md");
    }

    #[test]
    fn malformed_tools_json_errors() {
        let mut vfs = Vfs::new();
        vfs.write_file("/s/SKILL.md", "## FAQ\n");
        vfs.write_file("/s/references/tools.json", "{broken");
        let err = SkillPackage::parse_from_vfs(&vfs, "/s").unwrap_err();
        assert_eq!(err.code(), "bad_tools_json");
    }

    #[test]
    fn serialize_round_trip_byte_identical() {
        let mut vfs = Vfs::new();
        canonical_package(&mut vfs);
        let pkg = SkillPackage::parse_from_vfs(&vfs, "/skill").unwrap();
        assert_eq!(pkg.skill_md.serialize(), canonical_md());

        let mut out = Vfs::new();
        pkg.write_to_vfs(&mut out, "/skill");
        let again = SkillPackage::parse_from_vfs(&out, "/skill").unwrap();
        assert_eq!(again.skill_md, pkg.skill_md);
        assert_eq!(again.tools, pkg.tools);
        assert_eq!(again.references, pkg.references);
    }

    #[test]
    fn disk_round_trip() {
        let mut vfs = Vfs::new();
        canonical_package(&mut vfs);
        let pkg = SkillPackage::parse_from_vfs(&vfs, "/skill").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("storage_support");
        pkg.save_to_dir(&target).unwrap();
        let back = SkillPackage::load_from_dir(&target).unwrap();
        assert_eq!(back.skill_md, pkg.skill_md);
        assert_eq!(back.name, "storage_support");
    }

    #[test]
    fn commit_increments_and_snapshots() {
        let mut vfs = Vfs::new();
        canonical_package(&mut vfs);
        let v3 = commit_version(&mut vfs, "/skill", 2).unwrap();
        assert_eq!(v3.version, 3);
        assert!(vfs.find_snapshot("v3").is_some());
        // Committing again without mutation yields v4 with identical content.
        let v4 = commit_version(&mut vfs, "/skill", 3).unwrap();
        assert_eq!(v4.version, 4);
        assert_eq!(v4.skill_md, v3.skill_md);
        assert_eq!(
            vfs.find_snapshot("v3").unwrap().nodes(),
            vfs.find_snapshot("v4").unwrap().nodes()
        );
    }

    #[test]
    fn commit_requires_skill_md() {
        let mut vfs = Vfs::new();
        vfs.mkdir("/skill");
        let err = commit_version(&mut vfs, "/skill", 0).unwrap_err();
        assert_eq!(err.code(), "invalid_skill");
    }

    #[test]
    fn commit_rejects_structural_violations() {
        let mut vfs = Vfs::new();
        vfs.write_file("/skill/SKILL.md", "## Case Type: X\n- Tool: `ghost` — ?\n- escalate\n");
        let err = commit_version(&mut vfs, "/skill", 0).unwrap_err();
        assert_eq!(err.code(), "invalid_skill");
    }

    #[test]
    fn snapshot_restores_reparse_identically() {
        let mut vfs = Vfs::new();
        canonical_package(&mut vfs);
        let v1 = commit_version(&mut vfs, "/skill", 0).unwrap();
        vfs.write_file("/skill/SKILL.md", "## FAQ\nmutated\n");
        let snap = vfs.find_snapshot("v1").unwrap();
        vfs.restore(&snap);
        let again = SkillPackage::parse_from_vfs(&vfs, "/skill").unwrap();
        assert_eq!(again.skill_md, v1.skill_md);
    }
}
