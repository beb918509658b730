use crate::checkpoint::{self, HeadFile, Workspace};
use crate::config::read_repo_list;
use crate::{usage_error, AppResult};
use coevo_core::vcs::{
    compute_project_stats, enumerate_commits, head_java_sources, ProjectStats, VcsError,
};
use std::path::Path;

pub fn run(repos: &Path, out: &Path) -> AppResult<()> {
    let entries = read_repo_list(repos)?;
    let ws = Workspace::new(out);
    for entry in entries {
        let outcome = match enumerate_commits(&entry.path, None) {
            Ok(o) => o,
            Err(e @ VcsError::RepoUnreadable { .. }) => return usage_error(e.to_string()),
            Err(e) => return Err(e.into()),
        };
        let head: Vec<HeadFile> = head_java_sources(&entry.path)?
            .into_iter()
            .map(|(path, source)| HeadFile { path, source })
            .collect();
        let stats = if outcome.commits.is_empty() {
            ProjectStats { loc: 0, developers: 0, age_days: 0, java_commit_count: 0 }
        } else {
            let sources: Vec<String> = head.iter().map(|h| h.source.clone()).collect();
            compute_project_stats(&outcome.commits, &sources)?
        };

        ws.ensure_project_dir(&entry.project_id)?;
        checkpoint::write_jsonl(&ws.commits_jsonl(&entry.project_id), &outcome.commits)?;
        checkpoint::write_jsonl(&ws.head_jsonl(&entry.project_id), &head)?;
        checkpoint::write_json(&ws.stats_json(&entry.project_id), &stats)?;
        if !outcome.diagnostics.is_empty() {
            checkpoint::write_text(
                &ws.diagnostics_txt(&entry.project_id),
                &(outcome.diagnostics.join("\n") + "\n"),
            )?;
        }
        println!(
            "mine {}: {} commits, {} head files, {} diagnostics",
            entry.project_id,
            outcome.commits.len(),
            head.len(),
            outcome.diagnostics.len()
        );
    }
    Ok(())
}
