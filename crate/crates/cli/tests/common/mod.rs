//! Shared fixtures: scripted Git repositories with generated Java
//! content, and a three-project synthetic corpus that exercises the
//! whole pipeline.
#![allow(dead_code)] // each test binary uses a different subset

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

pub const BASE_TS: i64 = 1_577_836_800; // 2020-01-01T00:00:00Z

pub fn coevo_bin() -> &'static str {
    env!("CARGO_BIN_EXE_coevo")
}

/// Run the binary; returns (exit_code, stdout, stderr).
pub fn run_coevo(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(coevo_bin()).args(args).output().expect("spawn coevo");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
        String::from_utf8_lossy(&output.stderr).into_owned(),
    )
}

pub struct ScriptedRepo {
    pub path: PathBuf,
    commit_count: usize,
    /// Commit ids in creation order.
    pub commit_ids: Vec<String>,
}

impl ScriptedRepo {
    pub fn init(path: &Path) -> ScriptedRepo {
        std::fs::create_dir_all(path).unwrap();
        git(path, &["init", "-q", "-b", "main"], None);
        ScriptedRepo { path: path.to_path_buf(), commit_count: 0, commit_ids: Vec::new() }
    }

    /// Write/delete files and commit; one hour between commits.
    pub fn commit(&mut self, author: &str, message: &str, files: &[(String, Option<String>)]) -> String {
        for (rel, content) in files {
            let full = self.path.join(rel);
            match content {
                Some(text) => {
                    if let Some(parent) = full.parent() {
                        std::fs::create_dir_all(parent).unwrap();
                    }
                    std::fs::write(&full, text).unwrap();
                }
                None => std::fs::remove_file(&full).unwrap(),
            }
        }
        git(&self.path, &["add", "-A"], None);
        let ts = BASE_TS + self.commit_count as i64 * 3_600;
        self.commit_count += 1;
        git(&self.path, &["commit", "-q", "--allow-empty", "-m", message], Some((author, ts)));
        let id = String::from_utf8(
            Command::new("git")
                .args(["-C"])
                .arg(&self.path)
                .args(["rev-parse", "HEAD"])
                .output()
                .unwrap()
                .stdout,
        )
        .unwrap()
        .trim()
        .to_string();
        self.commit_ids.push(id.clone());
        id
    }

    /// Branch off, apply one scripted commit there, and merge it back
    /// with --no-ff so a real merge commit lands on the main chain.
    pub fn merge_side_commit(
        &mut self,
        author: &str,
        message: &str,
        files: &[(String, Option<String>)],
    ) {
        git(&self.path, &["checkout", "-q", "-b", "side"], None);
        self.commit(author, message, files);
        git(&self.path, &["checkout", "-q", "main"], None);
        let ts = BASE_TS + self.commit_count as i64 * 3_600;
        self.commit_count += 1;
        git(
            &self.path,
            &["merge", "-q", "--no-ff", "side", "-m", "merge side work"],
            Some((author, ts)),
        );
        git(&self.path, &["branch", "-q", "-D", "side"], None);
    }
}

fn git(repo: &Path, args: &[&str], identity: Option<(&str, i64)>) {
    let (author, ts) = identity.unwrap_or(("setup", BASE_TS));
    let email = format!("{author}@example.com");
    let date = format!("{ts} +0000");
    let status = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .env("GIT_AUTHOR_NAME", author)
        .env("GIT_AUTHOR_EMAIL", &email)
        .env("GIT_COMMITTER_NAME", author)
        .env("GIT_COMMITTER_EMAIL", &email)
        .env("GIT_AUTHOR_DATE", &date)
        .env("GIT_COMMITTER_DATE", &date)
        .status()
        .unwrap();
    assert!(status.success(), "git {args:?} failed in {}", repo.display());
}

// ---------------------------------------------------------------------
// Synthetic corpus
// ---------------------------------------------------------------------

#[derive(Clone)]
struct ClassModel {
    name: String,
    test: bool,
    /// (method name, body version); bumping the version edits statements.
    methods: Vec<(String, usize)>,
}

fn render_class(class: &ClassModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("public class {} {{\n", class.name));
    if !class.test {
        out.push_str("    private int state = 0;\n");
    }
    for (name, version) in &class.methods {
        if class.test {
            out.push_str(&format!(
                concat!(
                    "    @Test\n",
                    "    public void {name}() {{\n",
                    "        int expected = {v};\n",
                    "        assertEquals(expected, subject.compute({v}));\n",
                    "    }}\n"
                ),
                name = name,
                v = version
            ));
        } else {
            // The guard threshold moves only every second version, so
            // condition changes do not track statement edits 1:1.
            out.push_str(&format!(
                concat!(
                    "    public int {name}(int input) {{\n",
                    "        int value = input + {v};\n",
                    "        if (value > {threshold}) {{ value = value - 1; }}\n",
                    "        state = value;\n",
                    "        return value;\n",
                    "    }}\n"
                ),
                name = name,
                v = version,
                threshold = version / 2
            ));
        }
    }
    out.push_str("}\n");
    out
}

/// One scripted action against the evolving file model.
enum Act {
    AddClass { stem: &'static str, test: bool, methods: &'static [&'static str] },
    AddMethod { stem: &'static str, name: &'static str },
    EditMethod { stem: &'static str, name: &'static str },
    RemoveMethod { stem: &'static str, name: &'static str },
    RemoveClass { stem: &'static str },
    NonJava { path: &'static str, content: &'static str },
}

struct Step {
    author: &'static str,
    message: &'static str,
    /// Ground-truth label, when this commit is part of the labeled set.
    label: Option<&'static str>,
    acts: Vec<Act>,
}

pub struct SynthCommit {
    pub id: String,
    pub message: String,
    pub label: Option<&'static str>,
}

pub struct SynthProject {
    pub name: &'static str,
    pub path: PathBuf,
    pub commits: Vec<SynthCommit>,
}

pub struct SynthCorpus {
    pub projects: Vec<SynthProject>,
    pub repos_file: PathBuf,
    pub ground_truth_file: PathBuf,
}

fn apply_step(
    repo: &mut ScriptedRepo,
    classes: &mut BTreeMap<&'static str, ClassModel>,
    step: &Step,
) -> String {
    let mut files: Vec<(String, Option<String>)> = Vec::new();
    for act in &step.acts {
        match act {
            Act::AddClass { stem, test, methods } => {
                let class = ClassModel {
                    name: stem.to_string(),
                    test: *test,
                    methods: methods.iter().map(|m| (m.to_string(), 1)).collect(),
                };
                files.push((class_path(stem, *test), Some(render_class(&class))));
                classes.insert(stem, class);
            }
            Act::AddMethod { stem, name } => {
                let class = classes.get_mut(stem).unwrap();
                class.methods.push((name.to_string(), 1));
                files.push((class_path(stem, class.test), Some(render_class(class))));
            }
            Act::EditMethod { stem, name } => {
                let class = classes.get_mut(stem).unwrap();
                let slot = class.methods.iter_mut().find(|(m, _)| m == name).unwrap();
                slot.1 += 1;
                files.push((class_path(stem, class.test), Some(render_class(class))));
            }
            Act::RemoveMethod { stem, name } => {
                let class = classes.get_mut(stem).unwrap();
                class.methods.retain(|(m, _)| m != name);
                files.push((class_path(stem, class.test), Some(render_class(class))));
            }
            Act::RemoveClass { stem } => {
                let class = classes.remove(stem).unwrap();
                files.push((class_path(stem, class.test), None));
            }
            Act::NonJava { path, content } => {
                files.push((path.to_string(), Some(content.to_string())));
            }
        }
    }
    // Later acts on the same file win.
    let mut deduped: BTreeMap<String, Option<String>> = BTreeMap::new();
    for (path, content) in files {
        deduped.insert(path, content);
    }
    let files: Vec<(String, Option<String>)> = deduped.into_iter().collect();
    repo.commit(step.author, step.message, &files)
}

fn class_path(stem: &str, test: bool) -> String {
    if test {
        format!("src/test/java/{stem}.java")
    } else {
        format!("src/main/java/{stem}.java")
    }
}

fn alpha_steps() -> Vec<Step> {
    use Act::*;
    vec![
        Step { author: "alice", message: "add widget core feature", label: Some("adaptive"), acts: vec![
            AddClass { stem: "Widget", test: false, methods: &["render", "update"] },
        ]},
        Step { author: "alice", message: "add parser feature support", label: Some("adaptive"), acts: vec![
            AddClass { stem: "Parser", test: false, methods: &["parse"] },
        ]},
        Step { author: "bob", message: "add widget test suite", label: Some("adaptive"), acts: vec![
            AddClass { stem: "WidgetTest", test: true, methods: &["testRender"] },
        ]},
        Step { author: "alice", message: "fix overflow bug in widget render", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Widget", name: "render" },
        ]},
        Step { author: "bob", message: "fix crash bug in parser", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Parser", name: "parse" },
        ]},
        Step { author: "alice", message: "fix null bug in widget update", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Widget", name: "update" },
        ]},
        Step { author: "alice", message: "update changelog notes", label: None, acts: vec![
            NonJava { path: "CHANGELOG.md", content: "notes\n" },
        ]},
        Step { author: "bob", message: "fix parse bug for empty input", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Parser", name: "parse" },
        ]},
        Step { author: "alice", message: "fix state bug under load", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Widget", name: "render" },
        ]},
        Step { author: "bob", message: "fix regression bug and cover it", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Widget", name: "update" },
            AddMethod { stem: "WidgetTest", name: "testUpdateRegression" },
        ]},
        Step { author: "alice", message: "fix rounding bug in render path", label: None, acts: vec![
            EditMethod { stem: "Widget", name: "render" },
        ]},
        Step { author: "carol", message: "fix flaky test setup", label: None, acts: vec![
            EditMethod { stem: "WidgetTest", name: "testRender" },
        ]},
        Step { author: "alice", message: "add export feature to widget", label: Some("adaptive"), acts: vec![
            AddMethod { stem: "Widget", name: "export" },
        ]},
        Step { author: "bob", message: "fix export bug on empty state", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Widget", name: "export" },
        ]},
        Step { author: "alice", message: "refactor parser internals for clarity", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Parser", name: "parse" },
            AddMethod { stem: "Parser", name: "parseHeader" },
        ]},
        Step { author: "carol", message: "refactor move test helpers into suites", label: None, acts: vec![
            AddClass { stem: "ParserTest", test: true, methods: &[
                "testParse", "testParseHeader", "testEmpty", "testSpaces", "testUnicode",
                "testHuge", "testNested", "testBroken",
            ]},
            AddMethod { stem: "WidgetTest", name: "testExport" },
            AddMethod { stem: "WidgetTest", name: "testRenderTwice" },
            // Production edit keeps this high-churn commit out of the
            // test-only exclusion so the outlier fence sees it.
            EditMethod { stem: "Widget", name: "render" },
        ]},
        Step { author: "alice", message: "fix header bug found in review", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Parser", name: "parseHeader" },
        ]},
        Step { author: "bob", message: "fix concurrency bug in state handling", label: None, acts: vec![
            EditMethod { stem: "Widget", name: "update" },
        ]},
        Step { author: "alice", message: "fix version bug in export", label: None, acts: vec![
            EditMethod { stem: "Widget", name: "export" },
        ]},
        Step { author: "carol", message: "fix assertion bug in widget suite", label: None, acts: vec![
            EditMethod { stem: "WidgetTest", name: "testExport" },
        ]},
    ]
}

fn beta_steps() -> Vec<Step> {
    use Act::*;
    vec![
        Step { author: "dave", message: "add engine feature module", label: Some("adaptive"), acts: vec![
            AddClass { stem: "Engine", test: false, methods: &["start", "stop"] },
        ]},
        Step { author: "dave", message: "add scheduler feature", label: Some("adaptive"), acts: vec![
            AddClass { stem: "Scheduler", test: false, methods: &["schedule"] },
        ]},
        Step { author: "erin", message: "fix startup bug", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Engine", name: "start" },
        ]},
        Step { author: "erin", message: "refactor scheduler for clarity", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Scheduler", name: "schedule" },
        ]},
        Step { author: "dave", message: "add retry feature to scheduler", label: Some("adaptive"), acts: vec![
            AddMethod { stem: "Scheduler", name: "retry" },
        ]},
        Step { author: "erin", message: "fix retry bug under contention", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Scheduler", name: "retry" },
        ]},
        Step { author: "dave", message: "add engine smoke test", label: Some("adaptive"), acts: vec![
            AddClass { stem: "EngineTest", test: true, methods: &["testStart"] },
        ]},
        Step { author: "erin", message: "refactor engine lifecycle handling", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Engine", name: "start" },
            EditMethod { stem: "Engine", name: "stop" },
        ]},
        Step { author: "dave", message: "fix shutdown bug and test it", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Engine", name: "stop" },
            AddMethod { stem: "EngineTest", name: "testStop" },
        ]},
        Step { author: "erin", message: "refactor remove dead scheduler path", label: Some("perfective"), acts: vec![
            RemoveMethod { stem: "Scheduler", name: "retry" },
        ]},
        Step { author: "dave", message: "add metrics feature", label: Some("adaptive"), acts: vec![
            AddMethod { stem: "Engine", name: "metrics" },
        ]},
        Step { author: "erin", message: "fix metrics bug for zero uptime", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Engine", name: "metrics" },
        ]},
        Step { author: "dave", message: "refactor extract scheduler utilities", label: Some("perfective"), acts: vec![
            AddClass { stem: "SchedulerSupport", test: false, methods: &["cron"] },
            EditMethod { stem: "Scheduler", name: "schedule" },
        ]},
        Step { author: "erin", message: "fix cron bug on leap days", label: None, acts: vec![
            EditMethod { stem: "SchedulerSupport", name: "cron" },
        ]},
        Step { author: "dave", message: "refactor drop support class", label: Some("perfective"), acts: vec![
            RemoveClass { stem: "SchedulerSupport" },
            EditMethod { stem: "Scheduler", name: "schedule" },
        ]},
        Step { author: "erin", message: "add pause feature with coverage", label: Some("adaptive"), acts: vec![
            AddMethod { stem: "Engine", name: "pause" },
            AddMethod { stem: "EngineTest", name: "testPause" },
            AddMethod { stem: "EngineTest", name: "testPauseTwice" },
        ]},
        Step { author: "dave", message: "fix pause bug when stopped", label: None, acts: vec![
            EditMethod { stem: "Engine", name: "pause" },
        ]},
        Step { author: "erin", message: "refactor tighten engine invariants", label: None, acts: vec![
            EditMethod { stem: "Engine", name: "start" },
        ]},
    ]
}

fn gamma_steps() -> Vec<Step> {
    use Act::*;
    vec![
        Step { author: "frank", message: "add store feature", label: Some("adaptive"), acts: vec![
            AddClass { stem: "Store", test: false, methods: &["put", "get"] },
        ]},
        Step { author: "frank", message: "add store test suite", label: Some("adaptive"), acts: vec![
            AddClass { stem: "StoreTest", test: true, methods: &["testPut", "testGet"] },
        ]},
        Step { author: "grace", message: "refactor store read path and its tests", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Store", name: "get" },
            EditMethod { stem: "StoreTest", name: "testGet" },
        ]},
        Step { author: "frank", message: "refactor store write path with coverage", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Store", name: "put" },
            AddMethod { stem: "StoreTest", name: "testPutTwice" },
            AddMethod { stem: "StoreTest", name: "testPutEmpty" },
        ]},
        Step { author: "grace", message: "add index feature and tests", label: Some("adaptive"), acts: vec![
            AddClass { stem: "Index", test: false, methods: &["build"] },
            AddClass { stem: "IndexTest", test: true, methods: &["testBuild"] },
        ]},
        Step { author: "frank", message: "refactor index construction", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Index", name: "build" },
            EditMethod { stem: "IndexTest", name: "testBuild" },
        ]},
        Step { author: "grace", message: "refactor unify store naming", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Store", name: "put" },
            EditMethod { stem: "Store", name: "get" },
        ]},
        Step { author: "frank", message: "fix lookup bug in index", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Index", name: "build" },
        ]},
        Step { author: "grace", message: "refactor extract compaction with tests", label: Some("perfective"), acts: vec![
            AddMethod { stem: "Store", name: "compact" },
            AddMethod { stem: "StoreTest", name: "testCompact" },
            AddMethod { stem: "StoreTest", name: "testCompactEmpty" },
        ]},
        Step { author: "frank", message: "refactor compaction thresholds", label: Some("perfective"), acts: vec![
            EditMethod { stem: "Store", name: "compact" },
            EditMethod { stem: "StoreTest", name: "testCompact" },
        ]},
        Step { author: "grace", message: "add snapshot feature with tests", label: Some("adaptive"), acts: vec![
            AddMethod { stem: "Store", name: "snapshot" },
            AddMethod { stem: "StoreTest", name: "testSnapshot" },
            AddMethod { stem: "StoreTest", name: "testSnapshotEmpty" },
        ]},
        Step { author: "frank", message: "fix snapshot bug on empty store", label: Some("corrective"), acts: vec![
            EditMethod { stem: "Store", name: "snapshot" },
        ]},
        Step { author: "grace", message: "refactor split query helpers and tests", label: Some("perfective"), acts: vec![
            AddClass { stem: "QueryTest", test: true, methods: &["testSimple", "testRange"] },
            EditMethod { stem: "Index", name: "build" },
        ]},
        Step { author: "frank", message: "refactor prune index test overlap", label: Some("perfective"), acts: vec![
            RemoveMethod { stem: "IndexTest", name: "testBuild" },
            AddMethod { stem: "IndexTest", name: "testBuildIncremental" },
        ]},
        Step { author: "grace", message: "refactor store state transitions", label: None, acts: vec![
            EditMethod { stem: "Store", name: "put" },
        ]},
        Step { author: "frank", message: "refactor align test fixtures", label: None, acts: vec![
            EditMethod { stem: "StoreTest", name: "testPut" },
            EditMethod { stem: "QueryTest", name: "testSimple" },
        ]},
        Step { author: "grace", message: "add range scan feature and tests", label: None, acts: vec![
            AddMethod { stem: "Index", name: "scan" },
            AddMethod { stem: "IndexTest", name: "testScan" },
            AddMethod { stem: "IndexTest", name: "testScanEdge" },
        ]},
        Step { author: "frank", message: "refactor scan batching with tests", label: None, acts: vec![
            EditMethod { stem: "Index", name: "scan" },
            EditMethod { stem: "IndexTest", name: "testScan" },
        ]},
        Step { author: "grace", message: "fix scan bug at page boundaries", label: None, acts: vec![
            EditMethod { stem: "Index", name: "scan" },
        ]},
        Step { author: "frank", message: "refactor final cleanup of store suite", label: None, acts: vec![
            EditMethod { stem: "StoreTest", name: "testGet" },
        ]},
    ]
}

/// Build the three-project corpus under `root` and write the repos list
/// and ground-truth CSV beside it.
pub fn build_synth_corpus(root: &Path) -> SynthCorpus {
    let specs: [(&'static str, Vec<Step>); 3] =
        [("alpha", alpha_steps()), ("beta", beta_steps()), ("gamma", gamma_steps())];
    let mut projects = Vec::new();
    let mut ground_truth = String::from("commit_id,label\n");
    for (name, steps) in specs {
        let mut repo = ScriptedRepo::init(&root.join(name));
        let mut classes: BTreeMap<&'static str, ClassModel> = BTreeMap::new();
        let mut commits = Vec::new();
        for step in &steps {
            let id = apply_step(&mut repo, &mut classes, step);
            if let Some(label) = step.label {
                ground_truth.push_str(&format!("{id},{label}\n"));
            }
            commits.push(SynthCommit {
                id,
                message: step.message.to_string(),
                label: step.label,
            });
        }
        projects.push(SynthProject { name, path: repo.path.clone(), commits });
    }
    let repos_file = root.join("repos.txt");
    let list: String = projects
        .iter()
        .map(|p| format!("{}\n", p.path.display()))
        .collect();
    std::fs::write(&repos_file, list).unwrap();
    let ground_truth_file = root.join("ground_truth.csv");
    std::fs::write(&ground_truth_file, ground_truth).unwrap();
    SynthCorpus { projects, repos_file, ground_truth_file }
}
