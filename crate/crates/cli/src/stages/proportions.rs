use crate::charts;
use crate::checkpoint::{self, Workspace};
use crate::AppResult;
use coevo_core::classify::MaintenanceActivity;
use coevo_core::dataset::{proportions_by_activity, GroupBy};
use coevo_core::stats::{quantile_type7, wilcoxon_mann_whitney};
use std::path::Path;

/// RQ2-style view: what fraction of each group's commits of each
/// activity involve test maintenance. Runs over the unfiltered commit
/// table — exclusions exist for the regression models, not for the
/// descriptive proportions.
pub fn run(out: &Path, by_developer: bool) -> AppResult<()> {
    let ws = Workspace::new(out);
    let reports = ws.reports_dir();
    std::fs::create_dir_all(&reports)?;
    let rows = checkpoint::read_commit_observations_csv(
        &ws.dataset_dir().join("commits_all.csv"),
        "proportions",
    )?;
    let (group_by, scope) = if by_developer {
        (GroupBy::Developer, "developer")
    } else {
        (GroupBy::Project, "project")
    };
    let proportions = proportions_by_activity(&rows, group_by);

    let mut csv = String::from("group,activity,commits,with_test_maintenance,fraction\n");
    for row in &proportions {
        csv.push_str(&format!(
            "{},{},{},{},{:.6}\n",
            row.group, row.activity, row.commits, row.with_test_maintenance, row.fraction
        ));
    }
    checkpoint::write_text(&reports.join(format!("proportions_{scope}.csv")), &csv)?;

    // Five-number summaries of the per-group fractions, per activity.
    let mut boxes: Vec<(String, [f64; 5])> = Vec::new();
    let mut box_csv = String::from("activity,min,q1,median,q3,max,groups\n");
    let fractions_of = |activity: MaintenanceActivity| -> Vec<f64> {
        let mut f: Vec<f64> = proportions
            .iter()
            .filter(|r| r.activity == activity)
            .map(|r| r.fraction)
            .collect();
        f.sort_by(|a, b| a.partial_cmp(b).unwrap());
        f
    };
    let mut per_activity = Vec::new();
    for activity in MaintenanceActivity::ALL {
        let fractions = fractions_of(activity);
        if fractions.is_empty() {
            continue;
        }
        let five = [
            fractions[0],
            quantile_type7(&fractions, 0.25),
            quantile_type7(&fractions, 0.5),
            quantile_type7(&fractions, 0.75),
            fractions[fractions.len() - 1],
        ];
        box_csv.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{}\n",
            activity, five[0], five[1], five[2], five[3], five[4],
            fractions.len()
        ));
        boxes.push((activity.to_string(), five));
        per_activity.push((activity, fractions));
    }
    checkpoint::write_text(&reports.join(format!("proportions_{scope}_box.csv")), &box_csv)?;
    checkpoint::write_text(
        &reports.join(format!("proportions_{scope}_box.svg")),
        &charts::box_plot(
            &format!("Test maintenance share per {scope} and activity"),
            &boxes,
        ),
    )?;

    // Rank tests: corrective against each other activity.
    let mut wmw_csv = String::from("comparison,u,p_value\n");
    let corrective = per_activity
        .iter()
        .find(|(a, _)| *a == MaintenanceActivity::Corrective)
        .map(|(_, f)| f.clone());
    if let Some(corrective) = corrective {
        for (activity, fractions) in &per_activity {
            if *activity == MaintenanceActivity::Corrective || fractions.is_empty() {
                continue;
            }
            let test = wilcoxon_mann_whitney(&corrective, fractions)
                .map_err(|e| crate::AppError::Runtime(e.into()))?;
            wmw_csv.push_str(&format!(
                "corrective_vs_{},{:.4},{:.6}\n",
                activity, test.u, test.p_value
            ));
        }
    }
    checkpoint::write_text(&reports.join(format!("proportions_{scope}_wmw.csv")), &wmw_csv)?;

    println!(
        "proportions ({scope}): {} groups x activity rows over {} commits",
        proportions.len(),
        rows.len()
    );
    Ok(())
}
