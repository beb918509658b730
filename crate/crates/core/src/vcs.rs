//! Repository history replay.
//!
//! Enumerates a local Git clone along its first-parent chain in
//! chronological order and yields, per commit that touched Java files,
//! the before/after text of every changed file. Applying the emitted
//! deltas sequentially to an empty tree reproduces the head state of
//! every Java file byte-exactly; merge commits are diffed against their
//! first parent so the chain forms a sequential patch series.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

const EMPTY_TREE: &str = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";
const RECORD_SEP: char = '\u{1e}';
const FIELD_SEP: char = '\u{1f}';

#[derive(Debug, thiserror::Error)]
pub enum VcsError {
    #[error("unreadable repository at {path}: {detail}")]
    RepoUnreadable { path: String, detail: String },
    #[error("git command failed: {0}")]
    Git(String),
    #[error("failed to launch git: {0}")]
    Spawn(#[from] std::io::Error),
    #[error("no history")]
    NoHistory,
}

/// One changed Java file within a commit. A missing `before_source`
/// means the file was added; a missing `after_source` means it was
/// removed. Never both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDelta {
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub after_source: Option<String>,
}

/// One commit that changed at least one Java file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub commit_id: String,
    /// Normalized `lowercase(name) <lowercase(email)>`.
    pub author_id: String,
    /// Committer timestamp, UTC seconds.
    pub timestamp: i64,
    pub message: String,
    pub file_deltas: Vec<FileDelta>,
}

/// Project-level statistics over the mined history and head state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectStats {
    /// Raw line count over head-state Java sources, blanks and comments
    /// included.
    pub loc: u64,
    pub developers: u64,
    pub age_days: u64,
    pub java_commit_count: u64,
}

/// Enumerated history plus per-commit diagnostics for records that had
/// to be skipped.
#[derive(Debug, Clone, Default)]
pub struct MiningOutcome {
    pub commits: Vec<CommitRecord>,
    pub diagnostics: Vec<String>,
}

fn run_git(repo: &Path, args: &[&str]) -> Result<Vec<u8>, VcsError> {
    let output = Command::new("git").arg("-C").arg(repo).args(args).output()?;
    if !output.status.success() {
        return Err(VcsError::Git(format!(
            "git {} failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&output.stderr).trim()
        )));
    }
    Ok(output.stdout)
}

fn is_java(path: &str) -> bool {
    path.ends_with(".java")
}

/// Enumerate the repository's first-parent chain, oldest first, keeping
/// only commits that changed at least one Java file. With `since`, only
/// commits at or after that timestamp are emitted (their deltas are
/// still computed against the true first parent).
pub fn enumerate_commits(
    repo_path: &Path,
    since: Option<i64>,
) -> Result<MiningOutcome, VcsError> {
    if let Err(e) = run_git(repo_path, &["rev-parse", "--git-dir"]) {
        return Err(VcsError::RepoUnreadable {
            path: repo_path.display().to_string(),
            detail: e.to_string(),
        });
    }
    // An unborn HEAD (fresh `git init`) is an empty history, not a failure.
    if run_git(repo_path, &["rev-parse", "--verify", "HEAD"]).is_err() {
        return Ok(MiningOutcome::default());
    }

    let log = run_git(
        repo_path,
        &[
            "log",
            "--first-parent",
            "--reverse",
            "--format=%H%x1f%an%x1f%ae%x1f%ct%x1f%B%x1e",
            "HEAD",
        ],
    )?;
    let log = String::from_utf8_lossy(&log);

    let mut outcome = MiningOutcome::default();
    let mut previous_hash: Option<String> = None;
    for record in log.split(RECORD_SEP) {
        let record = record.trim_start_matches('\n');
        if record.is_empty() {
            continue;
        }
        let fields: Vec<&str> = record.splitn(5, FIELD_SEP).collect();
        if fields.len() != 5 {
            outcome
                .diagnostics
                .push(format!("skipped malformed log record: {:?}", &record[..record.len().min(60)]));
            continue;
        }
        let commit_id = fields[0].to_string();
        let timestamp: i64 = match fields[3].parse() {
            Ok(t) => t,
            Err(_) => {
                // Leaving previous_hash untouched folds this commit's
                // changes into the next delta, keeping replay complete.
                outcome.diagnostics.push(format!(
                    "skipped commit {commit_id}: unparsable timestamp {:?}",
                    fields[3]
                ));
                continue;
            }
        };
        let parent = previous_hash.clone().unwrap_or_else(|| EMPTY_TREE.to_string());
        previous_hash = Some(commit_id.clone());
        if let Some(cutoff) = since {
            if timestamp < cutoff {
                continue;
            }
        }

        let deltas = match java_deltas(repo_path, &parent, &commit_id) {
            Ok(d) => d,
            Err(e) => {
                outcome
                    .diagnostics
                    .push(format!("skipped commit {commit_id}: {e}"));
                continue;
            }
        };
        if deltas.is_empty() {
            continue;
        }
        let author_id = format!(
            "{} <{}>",
            fields[1].trim().to_lowercase(),
            fields[2].trim().to_lowercase()
        );
        outcome.commits.push(CommitRecord {
            commit_id,
            author_id,
            timestamp,
            message: fields[4].trim_end().to_string(),
            file_deltas: deltas,
        });
    }
    Ok(outcome)
}

fn java_deltas(repo: &Path, parent: &str, commit: &str) -> Result<Vec<FileDelta>, VcsError> {
    let raw = run_git(repo, &["diff", "--name-status", "--no-renames", "-z", parent, commit])?;
    let raw = String::from_utf8_lossy(&raw);
    let mut parts = raw.split('\0');
    let mut deltas = Vec::new();
    while let Some(status) = parts.next() {
        if status.is_empty() {
            break;
        }
        let Some(path) = parts.next() else { break };
        if !is_java(path) {
            continue;
        }
        let status_char = status.chars().next().unwrap_or('M');
        let (before, after) = match status_char {
            'A' => (None, Some(show_file(repo, commit, path)?)),
            'D' => (Some(show_file(repo, parent, path)?), None),
            // Modifications and type changes carry both sides.
            _ => (
                Some(show_file(repo, parent, path)?),
                Some(show_file(repo, commit, path)?),
            ),
        };
        deltas.push(FileDelta {
            path: path.to_string(),
            before_source: before,
            after_source: after,
        });
    }
    deltas.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(deltas)
}

fn show_file(repo: &Path, rev: &str, path: &str) -> Result<String, VcsError> {
    let bytes = run_git(repo, &["show", &format!("{rev}:{path}")])?;
    Ok(String::from_utf8_lossy(&bytes).into_owned())
}

/// Java paths and contents at HEAD. Empty for an empty repository.
pub fn head_java_sources(repo_path: &Path) -> Result<Vec<(String, String)>, VcsError> {
    if run_git(repo_path, &["rev-parse", "--verify", "HEAD"]).is_err() {
        return Ok(Vec::new());
    }
    let raw = run_git(repo_path, &["ls-tree", "-r", "-z", "--name-only", "HEAD"])?;
    let raw = String::from_utf8_lossy(&raw);
    let mut sources = Vec::new();
    for path in raw.split('\0') {
        if path.is_empty() || !is_java(path) {
            continue;
        }
        sources.push((path.to_string(), show_file(repo_path, "HEAD", path)?));
    }
    sources.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(sources)
}

/// Apply a commit sequence's deltas to an empty tree; the result maps
/// path to content for every surviving Java file.
pub fn replay_to_tree(commits: &[CommitRecord]) -> BTreeMap<String, String> {
    let mut tree = BTreeMap::new();
    for commit in commits {
        for delta in &commit.file_deltas {
            match &delta.after_source {
                Some(content) => {
                    tree.insert(delta.path.clone(), content.clone());
                }
                None => {
                    tree.remove(&delta.path);
                }
            }
        }
    }
    tree
}

/// Aggregate project statistics from the mined commits and the
/// head-state Java sources.
pub fn compute_project_stats(
    commits: &[CommitRecord],
    head_sources: &[String],
) -> Result<ProjectStats, VcsError> {
    if commits.is_empty() {
        return Err(VcsError::NoHistory);
    }
    let loc: u64 = head_sources.iter().map(|s| s.lines().count() as u64).sum();
    let developers = {
        let mut authors: Vec<&str> = commits.iter().map(|c| c.author_id.as_str()).collect();
        authors.sort_unstable();
        authors.dedup();
        authors.len() as u64
    };
    let first = commits.iter().map(|c| c.timestamp).min().unwrap_or(0);
    let last = commits.iter().map(|c| c.timestamp).max().unwrap_or(0);
    let age_days = ((last - first).max(0) / 86_400) as u64;
    Ok(ProjectStats { loc, developers, age_days, java_commit_count: commits.len() as u64 })
}
