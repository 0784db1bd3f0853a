use super::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

#[test]
fn write_then_read_round_trip() {
    let mut vfs = Vfs::new();
    let w = vfs.write_file("/s/SKILL.md", "# Skill\nbody\n");
    assert!(w.success, "{w:?}");
    let r = vfs.read_file("/s/SKILL.md");
    assert!(r.success);
    assert_eq!(r.text(), Some("# Skill\nbody\n"));
}

#[test]
fn write_to_directory_fails() {
    let mut vfs = Vfs::new();
    assert!(vfs.mkdir("/s").success);
    let w = vfs.write_file("/s", "nope");
    assert!(!w.success);
    assert_eq!(w.code(), Some(codes::IS_DIRECTORY));
}

#[test]
fn write_auto_creates_parents_like_explicit_mkdirs() {
    // Oracle: an explicit mkdir-then-write sequence must land in the same
    // structural state (paths, kinds, contents).
    let mut auto = Vfs::new();
    assert!(auto.write_file("/a/b/c.txt", "x").success);

    let mut explicit = Vfs::new();
    assert!(explicit.mkdir("/a").success);
    assert!(explicit.mkdir("/a/b").success);
    assert!(explicit.write_file("/a/b/c.txt", "x").success);

    let shape = |v: &Vfs| {
        v.nodes()
            .iter()
            .map(|(k, n)| (k.clone(), n.kind, n.content.clone()))
            .collect::<Vec<_>>()
    };
    assert_eq!(shape(&auto), shape(&explicit));
    auto.check_invariants().unwrap();
}

#[test]
fn read_missing_and_directory() {
    let mut vfs = Vfs::new();
    assert_eq!(vfs.read_file("/nope").code(), Some(codes::NOT_FOUND));
    vfs.mkdir("/d");
    assert_eq!(vfs.read_file("/d").code(), Some(codes::IS_DIRECTORY));
}

#[test]
fn delete_file_and_directory_rules() {
    let mut vfs = Vfs::new();
    vfs.write_file("/d/a.txt", "1");
    vfs.write_file("/d/b.txt", "2");
    assert_eq!(vfs.delete("/d", false).code(), Some(codes::NOT_EMPTY));
    assert!(vfs.delete("/d/a.txt", false).success);
    assert!(!vfs.exists("/d/a.txt"));
    assert!(vfs.delete("/d", true).success);
    assert!(!vfs.exists("/d/b.txt"));
    assert_eq!(vfs.delete("/d", false).code(), Some(codes::NOT_FOUND));
    assert_eq!(vfs.delete("/", true).code(), Some(codes::INVALID_TARGET));
}

#[test]
fn list_reflects_writes_and_deletes() {
    let mut vfs = Vfs::new();
    vfs.write_file("/dir/x", "1");
    let names = |v: &Vfs| {
        v.list("/dir").entries().unwrap().iter().map(|e| e.name.clone()).collect::<Vec<_>>()
    };
    assert_eq!(names(&vfs), vec!["x"]);
    vfs.delete("/dir/x", false);
    assert!(names(&vfs).is_empty());
    assert_eq!(vfs.list("/missing").code(), Some(codes::NOT_FOUND));
    vfs.write_file("/f", "");
    assert_eq!(vfs.list("/f").code(), Some(codes::NOT_A_DIRECTORY));
}

#[test]
fn rename_moves_subtrees() {
    let mut vfs = Vfs::new();
    vfs.write_file("/a/one.txt", "1");
    vfs.write_file("/a/sub/two.txt", "2");
    assert!(vfs.rename("/a", "/b").success);
    assert!(!vfs.exists("/a"));
    assert_eq!(vfs.read_file("/b/one.txt").text(), Some("1"));
    assert_eq!(vfs.read_file("/b/sub/two.txt").text(), Some("2"));
    assert_eq!(vfs.rename("/missing", "/x").code(), Some(codes::NOT_FOUND));
    vfs.write_file("/c", "3");
    assert_eq!(vfs.rename("/c", "/b").code(), Some(codes::ALREADY_EXISTS));
    assert_eq!(vfs.rename("/b", "/b/inner").code(), Some(codes::INVALID_TARGET));
    vfs.check_invariants().unwrap();
}

#[test]
fn copy_duplicates_subtrees() {
    let mut vfs = Vfs::new();
    vfs.write_file("/src/f.txt", "data");
    assert!(vfs.copy("/src", "/dst").success);
    assert_eq!(vfs.read_file("/src/f.txt").text(), Some("data"));
    assert_eq!(vfs.read_file("/dst/f.txt").text(), Some("data"));
    assert_eq!(vfs.copy("/src", "/dst").code(), Some(codes::ALREADY_EXISTS));
    assert_eq!(vfs.copy("/src", "/src/inner").code(), Some(codes::INVALID_TARGET));
}

#[test]
fn chdir_resolves_relative_paths() {
    let mut vfs = Vfs::new();
    vfs.write_file("/skill/docs/x.md", "hi");
    assert!(vfs.chdir("/skill").success);
    assert_eq!(vfs.cwd(), "/skill");
    assert_eq!(vfs.read_file("docs/x.md").text(), Some("hi"));
    assert_eq!(vfs.chdir("/skill/docs/x.md").code(), Some(codes::NOT_A_DIRECTORY));
    assert_eq!(vfs.chdir("/nope").code(), Some(codes::NOT_FOUND));
}

#[test]
fn head_and_tail_slice_lines() {
    let mut vfs = Vfs::new();
    vfs.write_file("/f", "l1\nl2\nl3\nl4\n");
    assert_eq!(vfs.head("/f", 2).lines().unwrap(), ["l1", "l2"]);
    assert_eq!(vfs.tail("/f", 2).lines().unwrap(), ["l3", "l4"]);
    assert_eq!(vfs.head("/f", 99).lines().unwrap().len(), 4);
    assert_eq!(vfs.head("/missing", 1).code(), Some(codes::NOT_FOUND));
    vfs.mkdir("/d");
    assert_eq!(vfs.tail("/d", 1).code(), Some(codes::IS_DIRECTORY));
}

#[test]
fn find_globs_names() {
    let mut vfs = Vfs::new();
    vfs.write_file("/skill/SKILL.md", "");
    vfs.write_file("/skill/references/tools.json", "[]");
    vfs.write_file("/skill/references/knowledge_dns.md", "");
    let r = vfs.find("/skill", "*.md");
    assert_eq!(r.paths().unwrap(), ["/skill/SKILL.md", "/skill/references/knowledge_dns.md"]);
    let r = vfs.find("/skill", "tools.json");
    assert_eq!(r.paths().unwrap(), ["/skill/references/tools.json"]);
    let r = vfs.find("/nowhere", "*");
    assert!(r.success);
    assert!(r.paths().unwrap().is_empty());
}

#[test]
fn grep_single_hit_with_line_number() {
    let mut vfs = Vfs::new();
    vfs.write_file("/skill/SKILL.md", "# Skill\n\n- If unresolved: Escalation path\n");
    vfs.write_file("/skill/references/a.md", "nothing here\n");
    let r = vfs.grep("Escalation", "/");
    let hits = r.matches().unwrap();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].path, "/skill/SKILL.md");
    assert_eq!(hits[0].line_number, 3);
}

#[test]
fn grep_empty_vfs_and_bad_pattern() {
    let vfs = Vfs::new();
    let r = vfs.grep("anything", "/");
    assert!(r.success);
    assert!(r.matches().unwrap().is_empty());
    assert_eq!(vfs.grep("(", "/").code(), Some(codes::BAD_PATTERN));
    // Missing prefix is vacuous, not an error.
    assert!(vfs.grep("x", "/no/such").success);
}

#[test]
fn grep_matches_linear_scan_oracle() {
    let mut vfs = Vfs::new();
    let docs = [
        ("/a/one.md", "alpha beta\ngamma\nalpha again\n"),
        ("/a/two.md", "beta\n\nALPHA\n"),
        ("/b/three.txt", "nothing\n"),
    ];
    for (p, c) in docs {
        vfs.write_file(p, c);
    }
    let hits = vfs.grep("alpha", "/").matches().unwrap().to_vec();
    // Independent scan over the same fixture.
    let mut expect = Vec::new();
    for (p, c) in docs {
        for (i, line) in c.lines().enumerate() {
            if line.contains("alpha") {
                expect.push((p.to_string(), i + 1, line.to_string()));
            }
        }
    }
    expect.sort();
    let got: Vec<(String, usize, String)> =
        hits.into_iter().map(|m| (m.path, m.line_number, m.line)).collect();
    assert_eq!(got, expect);
}

#[test]
fn snapshot_restore_is_exact_inverse() {
    let mut vfs = Vfs::new();
    vfs.write_file("/s/SKILL.md", "v0 content");
    assert!(vfs.snapshot("v0").success);
    let before = vfs.nodes().clone();

    vfs.delete("/s/SKILL.md", false);
    vfs.write_file("/s/other.md", "noise");
    let snap = vfs.find_snapshot("v0").unwrap();
    assert!(vfs.restore(&snap).success);
    assert_eq!(vfs.nodes(), &before);

    // Restoring twice lands in the identical state both times.
    vfs.write_file("/mutate", "x");
    assert!(vfs.restore(&snap).success);
    assert_eq!(vfs.nodes(), &before);
}

#[test]
fn snapshot_labels_are_unique() {
    let mut vfs = Vfs::new();
    assert!(vfs.snapshot("v1").success);
    assert_eq!(vfs.snapshot("v1").code(), Some(codes::DUPLICATE_VERSION));
}

#[test]
fn restore_then_recapture_is_identical() {
    let mut vfs = Vfs::new();
    vfs.write_file("/a", "1");
    vfs.snapshot("first");
    vfs.write_file("/b", "2");
    let snap = vfs.find_snapshot("first").unwrap();
    vfs.restore(&snap);
    vfs.snapshot("second");
    assert_eq!(
        vfs.find_snapshot("first").unwrap().nodes(),
        vfs.find_snapshot("second").unwrap().nodes()
    );
}

#[test]
fn import_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut vfs = Vfs::new();
    vfs.write_file("/skill/SKILL.md", "# Skill\n");
    vfs.write_file("/skill/references/tools.json", "[]\n");
    vfs.mkdir("/skill/references/empty");
    vfs.export_tree("/skill", dir.path()).unwrap();

    let mut back = Vfs::new();
    back.import_tree(dir.path(), "/skill").unwrap();
    let files = |v: &Vfs| {
        v.nodes()
            .iter()
            .filter_map(|(k, n)| n.content.clone().map(|c| (k.clone(), c)))
            .collect::<Vec<_>>()
    };
    assert_eq!(files(&vfs), files(&back));
    assert!(back.node("/skill/references/empty").unwrap().is_dir());
}

#[test]
fn read_only_call_dispatch() {
    let mut vfs = Vfs::new();
    vfs.write_file("/skill/SKILL.md", "alpha\nbeta\n");
    let r = vfs.read_only_call("read_file", &serde_json::json!({"path": "/skill/SKILL.md"}));
    assert_eq!(r.text(), Some("alpha\nbeta\n"));
    let r = vfs.read_only_call("grep", &serde_json::json!({"pattern": "beta"}));
    assert_eq!(r.matches().unwrap().len(), 1);
    let r = vfs.read_only_call("write_file", &serde_json::json!({"path": "/x"}));
    assert_eq!(r.code(), Some(codes::UNKNOWN_OPERATION));
    let r = vfs.read_only_call("read_file", &serde_json::json!({}));
    assert_eq!(r.code(), Some(codes::BAD_ARGS));
}

#[test]
fn timestamps_never_decrease() {
    let mut vfs = Vfs::new();
    vfs.write_file("/f", "a");
    let t1 = vfs.node("/f").unwrap().modified_at;
    vfs.write_file("/f", "b");
    let t2 = vfs.node("/f").unwrap().modified_at;
    assert!(t2 > t1);
    assert_eq!(vfs.node("/f").unwrap().created_at, t1);
}

// Shadow-model oracle: replay a random operation sequence against a plain
// (files map, dirs set) model and require identical observable state and
// error codes after every step.
#[derive(Default)]
struct ModelFs {
    files: std::collections::BTreeMap<String, String>,
    dirs: BTreeSet<String>,
}

impl ModelFs {
    fn new() -> Self {
        let mut m = ModelFs::default();
        m.dirs.insert("/".to_string());
        m
    }

    fn exists(&self, p: &str) -> bool {
        self.files.contains_key(p) || self.dirs.contains(p)
    }

    fn ancestor_file(&self, p: &str) -> bool {
        let mut cur = path::parent(p);
        while let Some(a) = cur {
            if self.files.contains_key(&a) {
                return true;
            }
            cur = path::parent(&a);
        }
        false
    }

    fn add_parents(&mut self, p: &str) {
        let mut cur = path::parent(p);
        while let Some(a) = cur {
            self.dirs.insert(a.clone());
            cur = path::parent(&a);
        }
    }

    fn within(&self, prefix: &str) -> Vec<String> {
        self.files
            .keys()
            .chain(self.dirs.iter())
            .filter(|k| path::is_within(k, prefix))
            .cloned()
            .collect()
    }

    fn write(&mut self, p: &str, c: &str) -> Result<(), &'static str> {
        if self.dirs.contains(p) {
            return Err(codes::IS_DIRECTORY);
        }
        if self.ancestor_file(p) {
            return Err(codes::NOT_A_DIRECTORY);
        }
        self.add_parents(p);
        self.files.insert(p.to_string(), c.to_string());
        Ok(())
    }

    fn mkdir(&mut self, p: &str) -> Result<(), &'static str> {
        if self.files.contains_key(p) {
            return Err(codes::NOT_A_DIRECTORY);
        }
        if self.ancestor_file(p) {
            return Err(codes::NOT_A_DIRECTORY);
        }
        self.add_parents(p);
        self.dirs.insert(p.to_string());
        Ok(())
    }

    fn delete(&mut self, p: &str, recursive: bool) -> Result<(), &'static str> {
        if p == "/" {
            return Err(codes::INVALID_TARGET);
        }
        if self.files.remove(p).is_some() {
            return Ok(());
        }
        if self.dirs.contains(p) {
            let inside: Vec<String> = self.within(p).into_iter().filter(|k| k != p).collect();
            if !inside.is_empty() && !recursive {
                return Err(codes::NOT_EMPTY);
            }
            for k in self.within(p) {
                self.files.remove(&k);
                self.dirs.remove(&k);
            }
            return Ok(());
        }
        Err(codes::NOT_FOUND)
    }

    fn rename(&mut self, src: &str, dst: &str) -> Result<(), &'static str> {
        if src == "/" {
            return Err(codes::INVALID_TARGET);
        }
        if !self.exists(src) {
            return Err(codes::NOT_FOUND);
        }
        if self.exists(dst) {
            return Err(codes::ALREADY_EXISTS);
        }
        if path::is_within(dst, src) {
            return Err(codes::INVALID_TARGET);
        }
        if self.ancestor_file(dst) {
            return Err(codes::NOT_A_DIRECTORY);
        }
        self.add_parents(dst);
        for k in self.within(src) {
            let new = format!("{dst}{}", &k[src.len()..]);
            if let Some(c) = self.files.remove(&k) {
                self.files.insert(new, c);
            } else if self.dirs.remove(&k) {
                self.dirs.insert(new);
            }
        }
        Ok(())
    }

    fn copy(&mut self, src: &str, dst: &str) -> Result<(), &'static str> {
        if !self.exists(src) {
            return Err(codes::NOT_FOUND);
        }
        if self.exists(dst) {
            return Err(codes::ALREADY_EXISTS);
        }
        if path::is_within(dst, src) {
            return Err(codes::INVALID_TARGET);
        }
        if self.ancestor_file(dst) {
            return Err(codes::NOT_A_DIRECTORY);
        }
        self.add_parents(dst);
        for k in self.within(src) {
            let new = format!("{dst}{}", &k[src.len()..]);
            if let Some(c) = self.files.get(&k).cloned() {
                self.files.insert(new, c);
            } else {
                self.dirs.insert(new);
            }
        }
        Ok(())
    }
}

fn random_path(rng: &mut ChaCha8Rng) -> String {
    let names = ["a", "b", "c", "d", "x.txt", "y.md"];
    let depth = rng.gen_range(1..4);
    let segs: Vec<&str> = (0..depth).map(|_| names[rng.gen_range(0..names.len())]).collect();
    format!("/{}", segs.join("/"))
}

fn compare_state(vfs: &Vfs, model: &ModelFs) {
    vfs.check_invariants().expect("vfs invariants");
    let vfs_files: Vec<(String, String)> = vfs
        .nodes()
        .iter()
        .filter_map(|(k, n)| n.content.clone().map(|c| (k.clone(), c)))
        .collect();
    let model_files: Vec<(String, String)> =
        model.files.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    assert_eq!(vfs_files, model_files, "file state diverged");
    let vfs_dirs: BTreeSet<String> = vfs
        .nodes()
        .iter()
        .filter(|(_, n)| n.is_dir())
        .map(|(k, _)| k.clone())
        .collect();
    assert_eq!(vfs_dirs, model.dirs, "directory state diverged");
}

#[test]
fn random_sequences_match_shadow_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..50 {
        let mut vfs = Vfs::new();
        let mut model = ModelFs::new();
        for step in 0..60 {
            let p = random_path(&mut rng);
            let (got, want) = match rng.gen_range(0..5) {
                0 => {
                    let content = format!("content-{step}");
                    (vfs.write_file(&p, &content), model.write(&p, &content))
                }
                1 => (vfs.mkdir(&p), model.mkdir(&p)),
                2 => {
                    let rec = rng.gen_bool(0.5);
                    (vfs.delete(&p, rec), model.delete(&p, rec))
                }
                3 => {
                    let q = random_path(&mut rng);
                    (vfs.rename(&p, &q), model.rename(&p, &q))
                }
                _ => {
                    let q = random_path(&mut rng);
                    (vfs.copy(&p, &q), model.copy(&p, &q))
                }
            };
            match want {
                Ok(()) => assert!(got.success, "expected success: {got:?}"),
                Err(code) => assert_eq!(got.code(), Some(code), "wrong code: {got:?}"),
            }
            compare_state(&vfs, &model);
        }
    }
}
