use super::analyze_commit;
use crate::checkpoint::{self, HeadFile, HeadTests, Workspace};
use crate::AppResult;
use coevo_core::ast::parse_compilation_unit;
use coevo_core::testdet::{count_head_tests, derive_profile};
use std::path::Path;

pub fn run(out: &Path) -> AppResult<()> {
    let ws = Workspace::new(out);
    for project in ws.mined_projects()? {
        let commits = checkpoint::load_commits(&ws, &project)?;
        let changes = checkpoint::load_changes_by_commit(&ws, &project)?;
        let mut rows = Vec::with_capacity(commits.len());
        for commit in &commits {
            let sides = analyze_commit(commit);
            let commit_changes = changes
                .get(&commit.commit_id)
                .map(|c| c.as_slice())
                .unwrap_or(&[]);
            let profile = derive_profile(commit_changes, &sides.index);
            rows.push((commit.commit_id.clone(), profile));
        }
        checkpoint::write_profiles_csv(&ws.profiles_csv(&project), &rows)?;

        let head: Vec<HeadFile> = checkpoint::read_jsonl(&ws.head_jsonl(&project), "detect")?;
        let head_trees: Vec<_> = head
            .iter()
            .filter_map(|f| parse_compilation_unit(&f.source).ok())
            .collect();
        let (test_methods, test_classes) = count_head_tests(head_trees.iter());
        checkpoint::write_json(
            &ws.head_tests_json(&project),
            &HeadTests { test_methods, test_classes },
        )?;
        let with_maintenance = rows.iter().filter(|(_, p)| p.total() > 0).count();
        println!(
            "detect {project}: {}/{} commits with test maintenance, head tests {}m/{}c",
            with_maintenance,
            rows.len(),
            test_methods,
            test_classes
        );
    }
    Ok(())
}
