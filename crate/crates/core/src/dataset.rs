//! Analysis datasets: join distilled changes, test-maintenance profiles
//! and activity labels into the per-commit and per-project observation
//! tables the models consume.

use crate::ast::{EntityKind, EntityNode};
use crate::classify::MaintenanceActivity;
use crate::distill::{ChangeType, SourceChange};
use crate::stats::{adjusted_boxplot_filter, StatsError};
use crate::testdet::{has_test_maintenance, is_test_class, TestMaintenanceProfile};
use crate::vcs::ProjectStats;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("activity labels cover {labeled} commits but the project mined {mined}")]
    ActivityCountMismatch { labeled: usize, mined: u64 },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// One analyzed commit.
#[derive(Debug, Clone, PartialEq)]
pub struct CommitObservation {
    pub project_id: String,
    pub commit_id: String,
    pub author_id: String,
    pub activity: MaintenanceActivity,
    pub profile: TestMaintenanceProfile,
    /// Change-type counts over production files only.
    pub change_type_counts: BTreeMap<ChangeType, u32>,
    /// Every changed file in the commit is a test file.
    pub is_test_only: bool,
}

/// One project row for the count models.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectObservation {
    pub project_id: String,
    pub stats: ProjectStats,
    pub corrective: u64,
    pub perfective: u64,
    pub adaptive: u64,
    pub test_methods: u64,
    pub test_classes: u64,
}

/// A file is a test file iff its first top-level class is a test class.
/// Files without any class declaration count as production.
pub fn is_test_file(root: &EntityNode) -> bool {
    root.children_of_kind(EntityKind::Class)
        .next()
        .map(|c| is_test_class(&c.name))
        .unwrap_or(false)
}

/// Change-type counts restricted to production files.
pub fn production_change_counts(
    changes: &[SourceChange],
    test_files: &BTreeSet<String>,
) -> BTreeMap<ChangeType, u32> {
    let mut counts = BTreeMap::new();
    for change in changes {
        if test_files.contains(&change.file_path) {
            continue;
        }
        *counts.entry(change.change_type).or_insert(0) += 1;
    }
    counts
}

/// How the outlier fence is applied across projects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutlierScope {
    /// One fence over the whole dataset (the default cleanup pass).
    #[default]
    Pooled,
    /// A separate fence per project, for sensitivity analysis.
    PerProject,
}

/// The filtered commit dataset plus the two exclusion counts, reported
/// separately.
#[derive(Debug, Clone)]
pub struct CommitDataset {
    pub observations: Vec<CommitObservation>,
    pub test_only_excluded: usize,
    pub outlier_excluded: usize,
}

impl CommitDataset {
    /// Fraction of the input rows removed by both exclusions together.
    pub fn exclusion_rate(&self) -> f64 {
        let input =
            self.observations.len() + self.test_only_excluded + self.outlier_excluded;
        if input == 0 {
            0.0
        } else {
            (self.test_only_excluded + self.outlier_excluded) as f64 / input as f64
        }
    }
}

/// Build the commit-level analysis dataset: drop test-only commits, then
/// drop commits above the adjusted-boxplot fence on positive
/// test-maintenance totals. Commits with a zero total are always kept —
/// the fence is defined on positive values only.
pub fn build_commit_dataset(
    rows: Vec<CommitObservation>,
    scope: OutlierScope,
) -> Result<CommitDataset, DatasetError> {
    let (kept, test_only): (Vec<_>, Vec<_>) =
        rows.into_iter().partition(|r| !r.is_test_only);
    let test_only_excluded = test_only.len();

    let mut drop = vec![false; kept.len()];
    match scope {
        OutlierScope::Pooled => {
            apply_fence(&kept, (0..kept.len()).collect(), &mut drop)?;
        }
        OutlierScope::PerProject => {
            let mut by_project: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for (i, row) in kept.iter().enumerate() {
                by_project.entry(row.project_id.as_str()).or_default().push(i);
            }
            for (_, indices) in by_project {
                apply_fence(&kept, indices, &mut drop)?;
            }
        }
    }

    let outlier_excluded = drop.iter().filter(|&&d| d).count();
    let observations = kept
        .into_iter()
        .zip(drop)
        .filter_map(|(row, dropped)| (!dropped).then_some(row))
        .collect();
    Ok(CommitDataset { observations, test_only_excluded, outlier_excluded })
}

fn apply_fence(
    rows: &[CommitObservation],
    indices: Vec<usize>,
    drop: &mut [bool],
) -> Result<(), DatasetError> {
    let positive: Vec<usize> = indices
        .into_iter()
        .filter(|&i| rows[i].profile.total() > 0)
        .collect();
    if positive.is_empty() {
        return Ok(());
    }
    let values: Vec<f64> = positive.iter().map(|&i| rows[i].profile.total() as f64).collect();
    let keep = adjusted_boxplot_filter(&values)?;
    for (&i, &kept) in positive.iter().zip(&keep) {
        if !kept {
            drop[i] = true;
        }
    }
    Ok(())
}

/// Aggregate one project's row for the count models. `activities` must
/// label every mined commit of the project, test-only ones included.
pub fn build_project_observation(
    project_id: &str,
    stats: ProjectStats,
    activities: &[MaintenanceActivity],
    test_methods: u64,
    test_classes: u64,
) -> Result<ProjectObservation, DatasetError> {
    if activities.len() as u64 != stats.java_commit_count {
        return Err(DatasetError::ActivityCountMismatch {
            labeled: activities.len(),
            mined: stats.java_commit_count,
        });
    }
    let count = |a: MaintenanceActivity| activities.iter().filter(|&&x| x == a).count() as u64;
    Ok(ProjectObservation {
        project_id: project_id.to_string(),
        stats,
        corrective: count(MaintenanceActivity::Corrective),
        perfective: count(MaintenanceActivity::Perfective),
        adaptive: count(MaintenanceActivity::Adaptive),
        test_methods,
        test_classes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Project,
    /// Per developer per project, so one person's work on two projects
    /// yields two groups.
    Developer,
}

/// Fraction of commits involving test maintenance for one group and
/// activity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProportionRow {
    pub group: String,
    pub activity: MaintenanceActivity,
    pub commits: usize,
    pub with_test_maintenance: usize,
    pub fraction: f64,
}

/// Per-group, per-activity fraction of commits with test maintenance.
/// Groups with no commits of an activity are omitted for that activity.
pub fn proportions_by_activity(
    observations: &[CommitObservation],
    group_by: GroupBy,
) -> Vec<ProportionRow> {
    let mut tallies: BTreeMap<(String, MaintenanceActivity), (usize, usize)> = BTreeMap::new();
    for obs in observations {
        let group = match group_by {
            GroupBy::Project => obs.project_id.clone(),
            GroupBy::Developer => format!("{}/{}", obs.project_id, obs.author_id),
        };
        let entry = tallies.entry((group, obs.activity)).or_insert((0, 0));
        entry.0 += 1;
        if has_test_maintenance(&obs.profile) {
            entry.1 += 1;
        }
    }
    tallies
        .into_iter()
        .map(|((group, activity), (commits, with_tm))| ProportionRow {
            group,
            activity,
            commits,
            with_test_maintenance: with_tm,
            fraction: with_tm as f64 / commits as f64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::parse_compilation_unit;

    fn obs(
        project: &str,
        commit: &str,
        author: &str,
        activity: MaintenanceActivity,
        total_as_method_updates: u32,
        is_test_only: bool,
    ) -> CommitObservation {
        CommitObservation {
            project_id: project.into(),
            commit_id: commit.into(),
            author_id: author.into(),
            activity,
            profile: TestMaintenanceProfile {
                method_updated: total_as_method_updates,
                ..Default::default()
            },
            change_type_counts: BTreeMap::new(),
            is_test_only,
        }
    }

    #[test]
    fn test_file_rule_uses_first_top_level_class() {
        let test = parse_compilation_unit("class FooTest { } class Helper { }").unwrap();
        assert!(is_test_file(&test));
        let prod = parse_compilation_unit("class Foo { } class BarTest { }").unwrap();
        assert!(!is_test_file(&prod));
        let empty = parse_compilation_unit("").unwrap();
        assert!(!is_test_file(&empty));
    }

    #[test]
    fn test_only_commits_are_excluded_and_counted() {
        let rows = vec![
            obs("p", "c1", "a", MaintenanceActivity::Corrective, 1, true),
            obs("p", "c2", "a", MaintenanceActivity::Perfective, 0, false),
            obs("p", "c3", "a", MaintenanceActivity::Adaptive, 2, false),
        ];
        let dataset = build_commit_dataset(rows, OutlierScope::Pooled).unwrap();
        assert_eq!(dataset.test_only_excluded, 1);
        assert_eq!(dataset.outlier_excluded, 0);
        assert_eq!(dataset.observations.len(), 2);
        assert!((dataset.exclusion_rate() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_total_commits_survive_the_fence() {
        // One extreme outlier among positives; zero-total rows untouched.
        let mut rows: Vec<CommitObservation> = (0..10)
            .map(|i| {
                obs("p", &format!("c{i}"), "a", MaintenanceActivity::Corrective, (i % 4) as u32 + 1, false)
            })
            .collect();
        rows.push(obs("p", "zero", "a", MaintenanceActivity::Corrective, 0, false));
        rows.push(obs("p", "spike", "a", MaintenanceActivity::Corrective, 500, false));
        let dataset = build_commit_dataset(rows, OutlierScope::Pooled).unwrap();
        assert_eq!(dataset.outlier_excluded, 1);
        assert!(dataset.observations.iter().any(|o| o.commit_id == "zero"));
        assert!(!dataset.observations.iter().any(|o| o.commit_id == "spike"));
    }

    #[test]
    fn project_observation_checks_label_coverage() {
        let stats = ProjectStats { loc: 100, developers: 1, age_days: 3, java_commit_count: 3 };
        let acts = [
            MaintenanceActivity::Corrective,
            MaintenanceActivity::Corrective,
            MaintenanceActivity::Adaptive,
        ];
        let row = build_project_observation("p", stats, &acts, 4, 1).unwrap();
        assert_eq!((row.corrective, row.perfective, row.adaptive), (2, 0, 1));
        assert_eq!(row.corrective + row.perfective + row.adaptive, stats.java_commit_count);
        assert!(build_project_observation("p", stats, &acts[..2], 4, 1).is_err());
    }

    #[test]
    fn proportions_per_group_and_activity() {
        let rows = vec![
            obs("p", "c1", "dev", MaintenanceActivity::Corrective, 1, false),
            obs("p", "c2", "dev", MaintenanceActivity::Corrective, 0, false),
            obs("p", "c3", "dev", MaintenanceActivity::Corrective, 0, false),
            obs("p", "c4", "dev", MaintenanceActivity::Corrective, 0, false),
            obs("p", "c5", "other", MaintenanceActivity::Perfective, 3, false),
        ];
        let by_dev = proportions_by_activity(&rows, GroupBy::Developer);
        let dev_row = by_dev.iter().find(|r| r.group == "p/dev").unwrap();
        assert_eq!(dev_row.commits, 4);
        assert!((dev_row.fraction - 0.25).abs() < 1e-12);
        // A single commit with test maintenance gives fraction 1.0.
        let other = by_dev.iter().find(|r| r.group == "p/other").unwrap();
        assert_eq!(other.fraction, 1.0);
        // No adaptive rows anywhere: omitted rather than reported as 0/0.
        assert!(by_dev.iter().all(|r| r.activity != MaintenanceActivity::Adaptive));

        let by_project = proportions_by_activity(&rows, GroupBy::Project);
        assert_eq!(by_project.len(), 2); // (p, corrective), (p, perfective)
    }
}
