//! History enumeration against scripted Git fixture repositories.

use coevo_core::vcs::{
    compute_project_stats, enumerate_commits, head_java_sources, replay_to_tree, VcsError,
};
use std::path::{Path, PathBuf};
use std::process::Command;
use tempfile::TempDir;

const BASE_TS: i64 = 1_600_000_000;

struct Repo {
    dir: TempDir,
    commit_count: usize,
}

impl Repo {
    fn new() -> Repo {
        let dir = TempDir::new().unwrap();
        run(dir.path(), &["init", "-q", "-b", "main"]);
        Repo { dir, commit_count: 0 }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    /// One commit: write/update the given files (None deletes), author
    /// name selects the identity, and the timestamp advances one day per
    /// commit from a fixed base.
    fn commit(&mut self, author: &str, message: &str, files: &[(&str, Option<&str>)]) {
        for (path, content) in files {
            let full: PathBuf = self.path().join(path);
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
        run(self.path(), &["add", "-A"]);
        let ts = BASE_TS + self.commit_count as i64 * 86_400;
        self.commit_count += 1;
        commit_with_env(self.path(), author, message, ts, &["commit", "-q", "-m", message]);
    }

    fn merge_side_branch(&mut self, author: &str, side_files: &[(&str, Option<&str>)]) {
        run(self.path(), &["checkout", "-q", "-b", "side"]);
        self.commit(author, "side work", side_files);
        run(self.path(), &["checkout", "-q", "main"]);
        let ts = BASE_TS + self.commit_count as i64 * 86_400;
        self.commit_count += 1;
        commit_with_env(
            self.path(),
            author,
            "merge side",
            ts,
            &["merge", "-q", "--no-ff", "side", "-m", "merge side"],
        );
    }
}

fn run(repo: &Path, args: &[&str]) {
    let status = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .env("GIT_AUTHOR_NAME", "Setup")
        .env("GIT_AUTHOR_EMAIL", "setup@example.com")
        .env("GIT_COMMITTER_NAME", "Setup")
        .env("GIT_COMMITTER_EMAIL", "setup@example.com")
        .status()
        .unwrap();
    assert!(status.success(), "git {args:?} failed");
}

fn commit_with_env(repo: &Path, author: &str, _message: &str, ts: i64, args: &[&str]) {
    let email = format!("{}@example.com", author.to_lowercase());
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
    assert!(status.success(), "git {args:?} failed");
}

#[test]
fn empty_repository_yields_empty_history() {
    let repo = Repo::new();
    let outcome = enumerate_commits(repo.path(), None).unwrap();
    assert!(outcome.commits.is_empty());
    assert!(outcome.diagnostics.is_empty());
    assert!(head_java_sources(repo.path()).unwrap().is_empty());
}

#[test]
fn missing_repository_is_a_fatal_error() {
    let err = enumerate_commits(Path::new("/nonexistent/nowhere"), None).unwrap_err();
    match err {
        VcsError::RepoUnreadable { path, .. } => assert!(path.contains("nowhere")),
        other => panic!("expected RepoUnreadable, got {other}"),
    }
}

#[test]
fn non_java_commits_are_not_emitted() {
    let mut repo = Repo::new();
    repo.commit("Alice", "add class", &[("src/A.java", Some("class A {}\n"))]);
    repo.commit("Alice", "docs only", &[("README.md", Some("hello\n"))]);
    repo.commit("Bob", "touch class", &[("src/A.java", Some("class A { int x; }\n"))]);
    let outcome = enumerate_commits(repo.path(), None).unwrap();
    assert_eq!(outcome.commits.len(), 2);
    assert_eq!(outcome.commits[0].message, "add class");
    assert_eq!(outcome.commits[1].message, "touch class");
    // Chronological, ascending.
    assert!(outcome.commits[0].timestamp < outcome.commits[1].timestamp);
    // Normalized author identity.
    assert_eq!(outcome.commits[0].author_id, "alice <alice@example.com>");
}

#[test]
fn added_and_removed_files_have_one_sided_deltas() {
    let mut repo = Repo::new();
    repo.commit("Alice", "add", &[("A.java", Some("class A {}\n"))]);
    repo.commit("Alice", "remove", &[("A.java", None), ("B.java", Some("class B {}\n"))]);
    let outcome = enumerate_commits(repo.path(), None).unwrap();
    let added = &outcome.commits[0].file_deltas[0];
    assert!(added.before_source.is_none());
    assert_eq!(added.after_source.as_deref(), Some("class A {}\n"));
    let second = &outcome.commits[1];
    let removed = second.file_deltas.iter().find(|d| d.path == "A.java").unwrap();
    assert!(removed.after_source.is_none());
    assert_eq!(removed.before_source.as_deref(), Some("class A {}\n"));
    let b = second.file_deltas.iter().find(|d| d.path == "B.java").unwrap();
    assert!(b.before_source.is_none());
}

#[test]
fn merge_commits_diff_against_first_parent() {
    let mut repo = Repo::new();
    repo.commit("Alice", "base", &[("A.java", Some("class A {}\n"))]);
    repo.merge_side_branch("Bob", &[("B.java", Some("class B {}\n"))]);
    let outcome = enumerate_commits(repo.path(), None).unwrap();
    // The side-branch commit itself is not on the first-parent chain;
    // its changes surface in the merge commit's delta.
    assert_eq!(outcome.commits.len(), 2);
    assert_eq!(outcome.commits[1].message, "merge side");
    let delta = &outcome.commits[1].file_deltas[0];
    assert_eq!(delta.path, "B.java");
    assert!(delta.before_source.is_none());
}

#[test]
fn renames_surface_as_remove_plus_add() {
    let mut repo = Repo::new();
    repo.commit("Alice", "add", &[("Old.java", Some("class Old {}\n"))]);
    repo.commit(
        "Alice",
        "rename",
        &[("Old.java", None), ("New.java", Some("class Old {}\n"))],
    );
    let outcome = enumerate_commits(repo.path(), None).unwrap();
    let rename = &outcome.commits[1];
    assert_eq!(rename.file_deltas.len(), 2);
    let old = rename.file_deltas.iter().find(|d| d.path == "Old.java").unwrap();
    assert!(old.after_source.is_none());
    let new = rename.file_deltas.iter().find(|d| d.path == "New.java").unwrap();
    assert!(new.before_source.is_none());
}

#[test]
fn replay_reconstructs_head_state() {
    let mut repo = Repo::new();
    repo.commit("Alice", "c1", &[("a/A.java", Some("class A { void f() {} }\n"))]);
    repo.commit("Bob", "c2", &[
        ("a/A.java", Some("class A { void f() { g(); } }\n")),
        ("b/B.java", Some("class B {}\n")),
    ]);
    repo.merge_side_branch("Carol", &[("c/C.java", Some("class C {}\n"))]);
    repo.commit("Alice", "c3", &[("b/B.java", None), ("a/A.java", Some("class A {}\n"))]);
    repo.commit("Alice", "c4", &[("b/B.java", Some("class B { int reborn; }\n"))]);

    let outcome = enumerate_commits(repo.path(), None).unwrap();
    let replayed = replay_to_tree(&outcome.commits);
    let head: std::collections::BTreeMap<String, String> =
        head_java_sources(repo.path()).unwrap().into_iter().collect();
    assert_eq!(replayed, head);
    assert!(head.contains_key("c/C.java"));
}

#[test]
fn enumeration_is_deterministic() {
    let mut repo = Repo::new();
    repo.commit("Alice", "c1", &[("A.java", Some("class A {}\n"))]);
    repo.commit("Bob", "c2", &[("A.java", Some("class A { int x; }\n"))]);
    let first = enumerate_commits(repo.path(), None).unwrap();
    let second = enumerate_commits(repo.path(), None).unwrap();
    assert_eq!(first.commits, second.commits);
}

#[test]
fn since_filter_drops_older_commits() {
    let mut repo = Repo::new();
    repo.commit("Alice", "c1", &[("A.java", Some("class A {}\n"))]);
    repo.commit("Alice", "c2", &[("A.java", Some("class A { int x; }\n"))]);
    repo.commit("Alice", "c3", &[("A.java", Some("class A { int x, y; }\n"))]);
    let cutoff = BASE_TS + 86_400; // second commit's timestamp
    let outcome = enumerate_commits(repo.path(), Some(cutoff)).unwrap();
    assert_eq!(outcome.commits.len(), 2);
    assert_eq!(outcome.commits[0].message, "c2");
}

#[test]
fn project_stats_from_fixture() {
    let mut repo = Repo::new();
    repo.commit("Alice", "c1", &[("A.java", Some("line1\n".repeat(10).as_str()))]);
    let outcome = enumerate_commits(repo.path(), None).unwrap();
    let head: Vec<String> =
        head_java_sources(repo.path()).unwrap().into_iter().map(|(_, s)| s).collect();
    let stats = compute_project_stats(&outcome.commits, &head).unwrap();
    assert_eq!(stats.loc, 10);
    assert_eq!(stats.developers, 1);
    assert_eq!(stats.age_days, 0);
    assert_eq!(stats.java_commit_count, 1);

    // Two authors, commits three days apart (block above advanced one
    // day; add commits on day 1 and day 3 offsets).
    let mut repo = Repo::new();
    repo.commit("Alice", "c1", &[("A.java", Some("class A {}\n"))]);
    repo.commit("Bob", "c2", &[("A.java", Some("class A { int x; }\n"))]);
    repo.commit_count = 3; // jump the clock so the next commit lands on day 3
    repo.commit("Bob", "c3", &[("A.java", Some("class A { int x, y; }\n"))]);
    let outcome = enumerate_commits(repo.path(), None).unwrap();
    let head: Vec<String> =
        head_java_sources(repo.path()).unwrap().into_iter().map(|(_, s)| s).collect();
    let stats = compute_project_stats(&outcome.commits, &head).unwrap();
    assert_eq!(stats.developers, 2);
    assert_eq!(stats.age_days, 3);

    // Empty history is an error; a head without Java files counts 0 LOC.
    assert!(matches!(compute_project_stats(&[], &[]), Err(VcsError::NoHistory)));
    let stats = compute_project_stats(&outcome.commits, &[]).unwrap();
    assert_eq!(stats.loc, 0);
}
