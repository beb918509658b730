use super::parse_delta;
use crate::checkpoint::{self, Workspace};
use crate::AppResult;
use coevo_core::distill::{distill, sort_changes, SourceChange};
use std::path::Path;

pub fn run(out: &Path) -> AppResult<()> {
    let ws = Workspace::new(out);
    for project in ws.mined_projects()? {
        let commits = checkpoint::load_commits(&ws, &project)?;
        let mut all_changes: Vec<SourceChange> = Vec::new();
        let mut undistillable: Vec<String> = Vec::new();
        for commit in &commits {
            let mut commit_changes = Vec::new();
            for delta in &commit.file_deltas {
                let trees = parse_delta(
                    &commit.commit_id,
                    &delta.path,
                    delta.before_source.as_deref(),
                    delta.after_source.as_deref(),
                );
                if let Some(failure) = trees.failure {
                    undistillable.push(failure);
                    continue;
                }
                commit_changes.extend(distill(
                    trees.before.as_ref(),
                    trees.after.as_ref(),
                    &delta.path,
                    &commit.commit_id,
                ));
            }
            sort_changes(&mut commit_changes);
            all_changes.extend(commit_changes);
        }
        checkpoint::write_jsonl(&ws.changes_jsonl(&project), &all_changes)?;
        if !undistillable.is_empty() {
            checkpoint::write_text(
                &ws.undistillable_txt(&project),
                &(undistillable.join("\n") + "\n"),
            )?;
        }
        println!(
            "distill {project}: {} changes over {} commits ({} undistillable files)",
            all_changes.len(),
            commits.len(),
            undistillable.len()
        );
    }
    Ok(())
}
