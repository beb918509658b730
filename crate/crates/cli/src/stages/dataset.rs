use super::analyze_commit;
use crate::checkpoint::{self, ExclusionSummary, HeadTests, ProjectRow, Workspace};
use crate::{AppError, AppResult};
use coevo_core::dataset::{
    build_commit_dataset, build_project_observation, production_change_counts,
    CommitObservation, OutlierScope,
};
use coevo_core::classify::MaintenanceActivity;
use std::path::Path;

pub fn run(out: &Path, per_project_outliers: bool) -> AppResult<()> {
    let ws = Workspace::new(out);
    let dataset_dir = ws.dataset_dir();
    std::fs::create_dir_all(&dataset_dir)?;

    let mut all_rows: Vec<CommitObservation> = Vec::new();
    let mut project_rows: Vec<ProjectRow> = Vec::new();
    for project in ws.mined_projects()? {
        let commits = checkpoint::load_commits(&ws, &project)?;
        let changes = checkpoint::load_changes_by_commit(&ws, &project)?;
        let profiles = checkpoint::read_profiles_csv(&ws.profiles_csv(&project), "dataset")?;
        let activities =
            checkpoint::read_activities_csv(&ws.activities_csv(&project), "dataset")?;
        let stats = checkpoint::read_stats(&ws, &project, "dataset")?;
        let head_tests: HeadTests =
            checkpoint::read_json(&ws.head_tests_json(&project), "dataset")?;

        let mut ordered_activities: Vec<MaintenanceActivity> = Vec::with_capacity(commits.len());
        for commit in &commits {
            let missing = |what: &str| {
                AppError::Runtime(anyhow::anyhow!(
                    "dataset: no {what} for commit {} in project {project}",
                    commit.commit_id
                ))
            };
            let activity =
                *activities.get(&commit.commit_id).ok_or_else(|| missing("activity label"))?;
            let profile =
                *profiles.get(&commit.commit_id).ok_or_else(|| missing("test profile"))?;
            ordered_activities.push(activity);
            let sides = analyze_commit(commit);
            let commit_changes =
                changes.get(&commit.commit_id).map(|c| c.as_slice()).unwrap_or(&[]);
            all_rows.push(CommitObservation {
                project_id: project.clone(),
                commit_id: commit.commit_id.clone(),
                author_id: commit.author_id.clone(),
                activity,
                profile,
                change_type_counts: production_change_counts(commit_changes, &sides.test_files),
                is_test_only: sides.is_test_only,
            });
        }

        if !commits.is_empty() {
            let obs = build_project_observation(
                &project,
                stats,
                &ordered_activities,
                head_tests.test_methods,
                head_tests.test_classes,
            )
            .map_err(anyhow::Error::from)?;
            project_rows.push(ProjectRow {
                project: obs.project_id,
                loc: obs.stats.loc,
                developers: obs.stats.developers,
                age_days: obs.stats.age_days,
                java_commit_count: obs.stats.java_commit_count,
                corrective: obs.corrective,
                perfective: obs.perfective,
                adaptive: obs.adaptive,
                test_methods: obs.test_methods,
                test_classes: obs.test_classes,
            });
        }
    }

    checkpoint::write_commit_observations_csv(&dataset_dir.join("commits_all.csv"), &all_rows)?;

    let scope =
        if per_project_outliers { OutlierScope::PerProject } else { OutlierScope::Pooled };
    let input_rows = all_rows.len();
    let dataset = build_commit_dataset(all_rows, scope).map_err(anyhow::Error::from)?;
    checkpoint::write_commit_observations_csv(
        &dataset_dir.join("commits.csv"),
        &dataset.observations,
    )?;
    checkpoint::write_json(
        &dataset_dir.join("exclusions.json"),
        &ExclusionSummary {
            test_only_excluded: dataset.test_only_excluded,
            outlier_excluded: dataset.outlier_excluded,
            exclusion_rate: dataset.exclusion_rate(),
        },
    )?;
    checkpoint::write_projects_csv(&dataset_dir.join("projects.csv"), &project_rows)?;

    println!(
        "dataset: {} commits in, {} kept ({} test-only excluded, {} outliers excluded, rate {:.3}); {} projects",
        input_rows,
        dataset.observations.len(),
        dataset.test_only_excluded,
        dataset.outlier_excluded,
        dataset.exclusion_rate(),
        project_rows.len()
    );
    Ok(())
}
