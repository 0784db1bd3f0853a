//! Pure in-memory file system for skill-bearing agents.
//!
//! The store maps absolute normalized paths to nodes. Agents mutate skill
//! assets exclusively through these operations, which never panic on bad
//! input: every failure comes back as an [`OpResult`] with `success=false`.
//! Snapshots capture the full node mapping for versioning and rollback.
//!
//! Timestamps are logical: a per-instance monotone counter advanced once per
//! mutating operation, so tests and replays are deterministic.

pub mod path;
pub mod result;

use std::collections::BTreeMap;
use std::io;
use std::path::Path;
use std::sync::Arc;

use regex::Regex;
use serde::{Deserialize, Serialize};

pub use path::normalize_path;
pub use result::{codes, DirEntry, GrepMatch, OpData, OpResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    File,
    Directory,
}

/// A single file or directory node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VfsNode {
    pub name: String,
    pub kind: NodeKind,
    pub created_at: u64,
    pub modified_at: u64,
    /// File text; directories carry no content.
    pub content: Option<String>,
}

impl VfsNode {
    fn dir(name: &str, tick: u64) -> Self {
        VfsNode {
            name: name.to_string(),
            kind: NodeKind::Directory,
            created_at: tick,
            modified_at: tick,
            content: None,
        }
    }

    fn file(name: &str, content: &str, tick: u64) -> Self {
        VfsNode {
            name: name.to_string(),
            kind: NodeKind::File,
            created_at: tick,
            modified_at: tick,
            content: Some(content.to_string()),
        }
    }

    pub fn is_dir(&self) -> bool {
        self.kind == NodeKind::Directory
    }

    /// Byte length of the content; 0 for directories.
    pub fn size(&self) -> usize {
        self.content.as_ref().map(|c| c.len()).unwrap_or(0)
    }
}

/// Immutable capture of the node mapping under a version label.
#[derive(Debug, Clone)]
pub struct VfsSnapshot {
    pub label: String,
    nodes: Arc<BTreeMap<String, VfsNode>>,
}

impl VfsSnapshot {
    pub fn nodes(&self) -> &BTreeMap<String, VfsNode> {
        &self.nodes
    }
}

/// In-memory file system with a session working directory and snapshots.
#[derive(Debug, Clone)]
pub struct Vfs {
    nodes: BTreeMap<String, VfsNode>,
    cwd: String,
    clock: u64,
    snapshots: Vec<VfsSnapshot>,
}

impl Default for Vfs {
    fn default() -> Self {
        Self::new()
    }
}

impl Vfs {
    pub fn new() -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert("/".to_string(), VfsNode::dir("", 0));
        Vfs { nodes, cwd: "/".to_string(), clock: 0, snapshots: Vec::new() }
    }

    pub fn cwd(&self) -> &str {
        &self.cwd
    }

    pub fn node(&self, path: &str) -> Option<&VfsNode> {
        let p = normalize_path(path, &self.cwd).ok()?;
        self.nodes.get(&p)
    }

    pub fn exists(&self, path: &str) -> bool {
        self.node(path).is_some()
    }

    /// All stored paths in lexicographic order.
    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.nodes.keys().map(|s| s.as_str())
    }

    pub fn nodes(&self) -> &BTreeMap<String, VfsNode> {
        &self.nodes
    }

    fn tick(&mut self) -> u64 {
        self.clock += 1;
        self.clock
    }

    fn resolve(&self, raw: &str) -> Result<String, OpResult> {
        normalize_path(raw, &self.cwd)
            .map_err(|_| OpResult::err(codes::MALFORMED_PATH, format!("malformed path: {raw:?}")))
    }

    /// Creates missing ancestor directories of `path` at `tick`. Fails when
    /// an ancestor already exists as a file.
    fn ensure_parents(&mut self, path: &str, tick: u64) -> Result<(), OpResult> {
        let mut missing = Vec::new();
        let mut cur = path::parent(path);
        while let Some(p) = cur {
            match self.nodes.get(&p) {
                Some(n) if n.is_dir() => break,
                Some(_) => {
                    return Err(OpResult::err(
                        codes::NOT_A_DIRECTORY,
                        format!("{p} exists and is not a directory"),
                    ))
                }
                None => {
                    cur = path::parent(&p);
                    missing.push(p);
                }
            }
        }
        for p in missing.into_iter().rev() {
            let name = path::basename(&p).to_string();
            self.nodes.insert(p, VfsNode::dir(&name, tick));
        }
        Ok(())
    }

    // ---- file operations ------------------------------------------------

    pub fn write_file(&mut self, raw: &str, content: &str) -> OpResult {
        let p = match self.resolve(raw) {
            Ok(p) => p,
            Err(e) => return e,
        };
        if let Some(n) = self.nodes.get(&p) {
            if n.is_dir() {
                return OpResult::err(codes::IS_DIRECTORY, format!("{p} is a directory"));
            }
        }
        let tick = self.tick();
        if let Err(e) = self.ensure_parents(&p, tick) {
            return e;
        }
        let name = path::basename(&p).to_string();
        match self.nodes.get_mut(&p) {
            Some(n) => {
                n.content = Some(content.to_string());
                n.modified_at = tick;
            }
            None => {
                self.nodes.insert(p.clone(), VfsNode::file(&name, content, tick));
            }
        }
        OpResult::ok_with(OpData::Path(p.clone()), format!("wrote {p}"))
    }

    pub fn read_file(&self, raw: &str) -> OpResult {
        let p = match self.resolve(raw) {
            Ok(p) => p,
            Err(e) => return e,
        };
        match self.nodes.get(&p) {
            None => OpResult::err(codes::NOT_FOUND, format!("{p} not found")),
            Some(n) if n.is_dir() => {
                OpResult::err(codes::IS_DIRECTORY, format!("{p} is a directory"))
            }
            Some(n) => OpResult::ok_with(
                OpData::Text(n.content.clone().unwrap_or_default()),
                format!("read {p}"),
            ),
        }
    }

    pub fn mkdir(&mut self, raw: &str) -> OpResult {
        let p = match self.resolve(raw) {
            Ok(p) => p,
            Err(e) => return e,
        };
        match self.nodes.get(&p) {
            Some(n) if n.is_dir() => {
                return OpResult::ok_with(OpData::Path(p.clone()), format!("{p} already exists"))
            }
            Some(_) => {
                return OpResult::err(codes::NOT_A_DIRECTORY, format!("{p} exists and is a file"))
            }
            None => {}
        }
        let tick = self.tick();
        if let Err(e) = self.ensure_parents(&p, tick) {
            return e;
        }
        let name = path::basename(&p).to_string();
        self.nodes.insert(p.clone(), VfsNode::dir(&name, tick));
        OpResult::ok_with(OpData::Path(p.clone()), format!("created {p}"))
    }

    /// Deletes a file, or a directory when it is empty or `recursive` is set.
    pub fn delete(&mut self, raw: &str, recursive: bool) -> OpResult {
        let p = match self.resolve(raw) {
            Ok(p) => p,
            Err(e) => return e,
        };
        if p == "/" {
            return OpResult::err(codes::INVALID_TARGET, "cannot delete the root");
        }
        let node = match self.nodes.get(&p) {
            None => return OpResult::err(codes::NOT_FOUND, format!("{p} not found")),
            Some(n) => n.clone(),
        };
        if node.is_dir() {
            let has_children = self.child_paths(&p).next().is_some();
            if has_children && !recursive {
                return OpResult::err(codes::NOT_EMPTY, format!("{p} is not empty"));
            }
            let doomed: Vec<String> =
                self.nodes.keys().filter(|k| path::is_within(k, &p)).cloned().collect();
            for k in doomed {
                self.nodes.remove(&k);
            }
        } else {
            self.nodes.remove(&p);
        }
        if !path::is_within(&self.cwd, "/") || !self.nodes.contains_key(&self.cwd) {
            self.cwd = "/".to_string();
        }
        OpResult::ok(format!("deleted {p}"))
    }

    pub fn rename(&mut self, raw_src: &str, raw_dst: &str) -> OpResult {
        let (src, dst) = match (self.resolve(raw_src), self.resolve(raw_dst)) {
            (Ok(s), Ok(d)) => (s, d),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        if src == "/" {
            return OpResult::err(codes::INVALID_TARGET, "cannot rename the root");
        }
        if !self.nodes.contains_key(&src) {
            return OpResult::err(codes::NOT_FOUND, format!("{src} not found"));
        }
        if self.nodes.contains_key(&dst) {
            return OpResult::err(codes::ALREADY_EXISTS, format!("{dst} already exists"));
        }
        if path::is_within(&dst, &src) {
            return OpResult::err(codes::INVALID_TARGET, format!("{dst} is inside {src}"));
        }
        let tick = self.tick();
        if let Err(e) = self.ensure_parents(&dst, tick) {
            return e;
        }
        let moved: Vec<String> =
            self.nodes.keys().filter(|k| path::is_within(k, &src)).cloned().collect();
        for old in moved {
            let mut node = self.nodes.remove(&old).expect("key listed above");
            let new = format!("{dst}{}", &old[src.len()..]);
            node.name = path::basename(&new).to_string();
            self.nodes.insert(new, node);
        }
        if path::is_within(&self.cwd, &src) || !self.nodes.contains_key(&self.cwd) {
            self.cwd = "/".to_string();
        }
        OpResult::ok_with(OpData::Path(dst.clone()), format!("renamed {src} to {dst}"))
    }

    pub fn copy(&mut self, raw_src: &str, raw_dst: &str) -> OpResult {
        let (src, dst) = match (self.resolve(raw_src), self.resolve(raw_dst)) {
            (Ok(s), Ok(d)) => (s, d),
            (Err(e), _) | (_, Err(e)) => return e,
        };
        if !self.nodes.contains_key(&src) {
            return OpResult::err(codes::NOT_FOUND, format!("{src} not found"));
        }
        if self.nodes.contains_key(&dst) {
            return OpResult::err(codes::ALREADY_EXISTS, format!("{dst} already exists"));
        }
        if path::is_within(&dst, &src) {
            return OpResult::err(codes::INVALID_TARGET, format!("{dst} is inside {src}"));
        }
        let tick = self.tick();
        if let Err(e) = self.ensure_parents(&dst, tick) {
            return e;
        }
        let copied: Vec<(String, VfsNode)> = self
            .nodes
            .iter()
            .filter(|(k, _)| path::is_within(k, &src))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        for (old, node) in copied {
            let new = format!("{dst}{}", &old[src.len()..]);
            let fresh = VfsNode {
                name: path::basename(&new).to_string(),
                kind: node.kind,
                created_at: tick,
                modified_at: tick,
                content: node.content,
            };
            self.nodes.insert(new, fresh);
        }
        OpResult::ok_with(OpData::Path(dst.clone()), format!("copied {src} to {dst}"))
    }

    // ---- directory operations -------------------------------------------

    fn child_paths<'a>(&'a self, dir: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        let prefix = if dir == "/" { String::new() } else { dir.to_string() };
        self.nodes.keys().filter_map(move |k| {
            if k == dir {
                return None;
            }
            let rest = k.strip_prefix(&prefix)?;
            let rest = rest.strip_prefix('/')?;
            if rest.is_empty() || rest.contains('/') {
                None
            } else {
                Some(k.as_str())
            }
        })
    }

    pub fn list(&self, raw: &str) -> OpResult {
        let p = match self.resolve(raw) {
            Ok(p) => p,
            Err(e) => return e,
        };
        match self.nodes.get(&p) {
            None => return OpResult::err(codes::NOT_FOUND, format!("{p} not found")),
            Some(n) if !n.is_dir() => {
                return OpResult::err(codes::NOT_A_DIRECTORY, format!("{p} is a file"))
            }
            Some(_) => {}
        }
        let entries: Vec<DirEntry> = self
            .child_paths(&p)
            .map(|k| {
                let n = &self.nodes[k];
                DirEntry { name: n.name.clone(), kind: n.kind, size: n.size() }
            })
            .collect();
        OpResult::ok_with(OpData::Entries(entries), format!("listed {p}"))
    }

    pub fn chdir(&mut self, raw: &str) -> OpResult {
        let p = match self.resolve(raw) {
            Ok(p) => p,
            Err(e) => return e,
        };
        match self.nodes.get(&p) {
            None => OpResult::err(codes::NOT_FOUND, format!("{p} not found")),
            Some(n) if !n.is_dir() => {
                OpResult::err(codes::NOT_A_DIRECTORY, format!("{p} is a file"))
            }
            Some(_) => {
                self.cwd = p.clone();
                OpResult::ok_with(OpData::Path(p.clone()), format!("cwd is {p}"))
            }
        }
    }

    // ---- unix-like utilities ---------------------------------------------

    pub fn head(&self, raw: &str, n: usize) -> OpResult {
        self.file_lines(raw, |lines| lines.iter().take(n).cloned().collect())
    }

    pub fn tail(&self, raw: &str, n: usize) -> OpResult {
        self.file_lines(raw, |lines| {
            let skip = lines.len().saturating_sub(n);
            lines.iter().skip(skip).cloned().collect()
        })
    }

    fn file_lines(&self, raw: &str, pick: impl Fn(&[String]) -> Vec<String>) -> OpResult {
        let p = match self.resolve(raw) {
            Ok(p) => p,
            Err(e) => return e,
        };
        match self.nodes.get(&p) {
            None => OpResult::err(codes::NOT_FOUND, format!("{p} not found")),
            Some(n) if n.is_dir() => {
                OpResult::err(codes::IS_DIRECTORY, format!("{p} is a directory"))
            }
            Some(n) => {
                let all: Vec<String> = n
                    .content
                    .as_deref()
                    .unwrap_or("")
                    .lines()
                    .map(String::from)
                    .collect();
                OpResult::ok_with(OpData::Lines(pick(&all)), format!("lines of {p}"))
            }
        }
    }

    /// Finds nodes under `raw_start` whose name matches a glob pattern
    /// (`*` and `?` wildcards). A missing start path yields an empty list.
    pub fn find(&self, raw_start: &str, name_glob: &str) -> OpResult {
        let start = match self.resolve(raw_start) {
            Ok(p) => p,
            Err(e) => return e,
        };
        let re = match glob_to_regex(name_glob) {
            Ok(re) => re,
            Err(_) => return OpResult::err(codes::BAD_PATTERN, format!("bad glob {name_glob:?}")),
        };
        if !self.nodes.contains_key(&start) {
            return OpResult::ok_with(OpData::Paths(Vec::new()), "no such start path");
        }
        let hits: Vec<String> = self
            .nodes
            .iter()
            .filter(|(k, _)| path::is_within(k, &start))
            .filter(|(k, n)| k.as_str() != "/" && re.is_match(&n.name))
            .map(|(k, _)| k.clone())
            .collect();
        OpResult::ok_with(OpData::Paths(hits), format!("find under {start}"))
    }

    /// Searches file contents under `raw_prefix` with a regular expression.
    /// Matches come back in lexicographic path order with 1-based line
    /// numbers. A missing prefix is an empty result, not an error.
    pub fn grep(&self, pattern: &str, raw_prefix: &str) -> OpResult {
        let re = match Regex::new(pattern) {
            Ok(re) => re,
            Err(e) => return OpResult::err(codes::BAD_PATTERN, format!("bad pattern: {e}")),
        };
        let prefix = match self.resolve(raw_prefix) {
            Ok(p) => p,
            Err(e) => return e,
        };
        if !self.nodes.contains_key(&prefix) {
            return OpResult::ok_with(OpData::Matches(Vec::new()), "no such prefix");
        }
        let mut hits = Vec::new();
        for (k, n) in self.nodes.iter().filter(|(k, _)| path::is_within(k, &prefix)) {
            let Some(content) = n.content.as_deref() else { continue };
            for (i, line) in content.lines().enumerate() {
                if re.is_match(line) {
                    hits.push(GrepMatch {
                        path: k.clone(),
                        line_number: i + 1,
                        line: line.to_string(),
                    });
                }
            }
        }
        OpResult::ok_with(OpData::Matches(hits), format!("grep {pattern:?}"))
    }

    // ---- snapshots --------------------------------------------------------

    /// Captures the current node mapping under `label`. Labels are unique
    /// within a session.
    pub fn snapshot(&mut self, label: &str) -> OpResult {
        if self.snapshots.iter().any(|s| s.label == label) {
            return OpResult::err(codes::DUPLICATE_VERSION, format!("label {label:?} taken"));
        }
        let snap =
            VfsSnapshot { label: label.to_string(), nodes: Arc::new(self.nodes.clone()) };
        self.snapshots.push(snap);
        OpResult::ok_with(OpData::Label(label.to_string()), format!("snapshot {label}"))
    }

    pub fn find_snapshot(&self, label: &str) -> Option<VfsSnapshot> {
        self.snapshots.iter().find(|s| s.label == label).cloned()
    }

    pub fn snapshots(&self) -> &[VfsSnapshot] {
        &self.snapshots
    }

    /// Replaces the node mapping with the snapshot's capture. The logical
    /// clock keeps running forward so node timestamps never regress.
    pub fn restore(&mut self, snap: &VfsSnapshot) -> OpResult {
        self.nodes = snap.nodes().clone();
        if !self.nodes.get(&self.cwd).map(|n| n.is_dir()).unwrap_or(false) {
            self.cwd = "/".to_string();
        }
        OpResult::ok(format!("restored {}", snap.label))
    }

    // ---- disk import/export ------------------------------------------------

    /// Loads a UTF-8 directory tree from disk under `vfs_root` (1:1 path
    /// mapping).
    pub fn import_tree(&mut self, disk: &Path, vfs_root: &str) -> io::Result<()> {
        let root = normalize_path(vfs_root, &self.cwd)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
        let r = self.mkdir(&root);
        if !r.success {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, r.message));
        }
        self.import_dir_rec(disk, &root)
    }

    fn import_dir_rec(&mut self, disk: &Path, vfs_dir: &str) -> io::Result<()> {
        let mut entries: Vec<_> =
            std::fs::read_dir(disk)?.collect::<Result<Vec<_>, _>>()?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let name = entry.file_name().to_string_lossy().to_string();
            let target = path::join(vfs_dir, &name);
            let ft = entry.file_type()?;
            if ft.is_dir() {
                self.mkdir(&target);
                self.import_dir_rec(&entry.path(), &target)?;
            } else if ft.is_file() {
                let text = std::fs::read_to_string(entry.path())?;
                let r = self.write_file(&target, &text);
                if !r.success {
                    return Err(io::Error::new(io::ErrorKind::InvalidInput, r.message));
                }
            }
        }
        Ok(())
    }

    /// Writes the subtree rooted at `vfs_root` to disk (1:1 path mapping).
    pub fn export_tree(&self, vfs_root: &str, disk: &Path) -> io::Result<()> {
        let root = normalize_path(vfs_root, &self.cwd)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
        if !self.nodes.contains_key(&root) {
            return Err(io::Error::new(io::ErrorKind::NotFound, format!("{root} not in vfs")));
        }
        std::fs::create_dir_all(disk)?;
        for (k, n) in self.nodes.iter().filter(|(k, _)| path::is_within(k, &root)) {
            if k == &root {
                continue;
            }
            let rel = k[root.len()..].trim_start_matches('/');
            let target = disk.join(rel);
            match n.kind {
                NodeKind::Directory => std::fs::create_dir_all(&target)?,
                NodeKind::File => {
                    if let Some(parent) = target.parent() {
                        std::fs::create_dir_all(parent)?;
                    }
                    std::fs::write(&target, n.content.as_deref().unwrap_or(""))?;
                }
            }
        }
        Ok(())
    }

    // ---- agent tool surface -------------------------------------------------

    /// Read-only tool dispatch for agents. Unknown tools and malformed
    /// arguments come back as failed results, never panics.
    pub fn read_only_call(&self, tool: &str, args: &serde_json::Value) -> OpResult {
        let str_arg = |key: &str| args.get(key).and_then(|v| v.as_str()).map(String::from);
        let num_arg =
            |key: &str, default: usize| args.get(key).and_then(|v| v.as_u64()).map(|v| v as usize).unwrap_or(default);
        match tool {
            "read_file" => match str_arg("path") {
                Some(p) => self.read_file(&p),
                None => OpResult::err(codes::BAD_ARGS, "read_file requires path"),
            },
            "list" => self.list(&str_arg("path").unwrap_or_else(|| "/".into())),
            "grep" => match str_arg("pattern") {
                Some(pat) => self.grep(&pat, &str_arg("path").unwrap_or_else(|| "/".into())),
                None => OpResult::err(codes::BAD_ARGS, "grep requires pattern"),
            },
            "head" => match str_arg("path") {
                Some(p) => self.head(&p, num_arg("n", 10)),
                None => OpResult::err(codes::BAD_ARGS, "head requires path"),
            },
            "tail" => match str_arg("path") {
                Some(p) => self.tail(&p, num_arg("n", 10)),
                None => OpResult::err(codes::BAD_ARGS, "tail requires path"),
            },
            "find" => match str_arg("name") {
                Some(name) => self.find(&str_arg("path").unwrap_or_else(|| "/".into()), &name),
                None => OpResult::err(codes::BAD_ARGS, "find requires name"),
            },
            other => OpResult::err(codes::UNKNOWN_OPERATION, format!("no such tool {other:?}")),
        }
    }

    /// Verifies the structural invariants of the store. Returns the first
    /// violation found, if any.
    pub fn check_invariants(&self) -> Result<(), String> {
        let root = self.nodes.get("/").ok_or("root missing")?;
        if !root.is_dir() {
            return Err("root is not a directory".into());
        }
        match self.nodes.get(&self.cwd) {
            Some(n) if n.is_dir() => {}
            _ => return Err(format!("cwd {} missing or not a directory", self.cwd)),
        }
        for (k, n) in &self.nodes {
            if k != "/" {
                let normalized = normalize_path(k, "/").map_err(|e| e.to_string())?;
                if &normalized != k {
                    return Err(format!("key {k} not normalized"));
                }
                let parent = path::parent(k).ok_or_else(|| format!("no parent for {k}"))?;
                match self.nodes.get(&parent) {
                    Some(p) if p.is_dir() => {}
                    _ => return Err(format!("parent of {k} missing or not a directory")),
                }
                if n.name != path::basename(k) {
                    return Err(format!("name of {k} is {:?}", n.name));
                }
            }
            if n.is_dir() && n.content.is_some() {
                return Err(format!("directory {k} has content"));
            }
            if n.modified_at < n.created_at {
                return Err(format!("{k} modified before created"));
            }
            if n.modified_at > self.clock {
                return Err(format!("{k} stamped after the clock"));
            }
        }
        Ok(())
    }
}

fn glob_to_regex(glob: &str) -> Result<Regex, regex::Error> {
    let mut pat = String::from("^");
    for ch in glob.chars() {
        match ch {
            '*' => pat.push_str(".*"),
            '?' => pat.push('.'),
            other => pat.push_str(&regex::escape(&other.to_string())),
        }
    }
    pat.push('$');
    Regex::new(&pat)
}

#[cfg(test)]
mod tests;
