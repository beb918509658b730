use super::analyze_commit;
use crate::checkpoint::{self, Workspace};
use crate::{usage_error, AppError, AppResult};
use coevo_core::classify::{
    build_vocabulary, classify, extract_features, train, ForestConfig, GroundTruthEntry,
    MaintenanceActivity,
};
use coevo_core::distill::SourceChange;
use std::collections::BTreeMap;
use std::path::Path;

struct CommitFeaturesInput {
    message: String,
    production_changes: Vec<SourceChange>,
}

pub fn run(ground_truth: &Path, out: &Path, seed: u64) -> AppResult<()> {
    let entries = read_ground_truth(ground_truth)?;
    let ws = Workspace::new(out);
    let projects = ws.mined_projects()?;

    // Per-project commit inputs, keyed by commit id for label joins.
    let mut inputs: BTreeMap<String, CommitFeaturesInput> = BTreeMap::new();
    let mut project_commit_order: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for project in &projects {
        let commits = checkpoint::load_commits(&ws, project)?;
        let changes = checkpoint::load_changes_by_commit(&ws, project)?;
        let mut order = Vec::with_capacity(commits.len());
        for commit in &commits {
            let sides = analyze_commit(commit);
            let production: Vec<SourceChange> = changes
                .get(&commit.commit_id)
                .map(|list| {
                    list.iter()
                        .filter(|c| !sides.test_files.contains(&c.file_path))
                        .cloned()
                        .collect()
                })
                .unwrap_or_default();
            order.push(commit.commit_id.clone());
            inputs.insert(
                commit.commit_id.clone(),
                CommitFeaturesInput {
                    message: commit.message.clone(),
                    production_changes: production,
                },
            );
        }
        project_commit_order.insert(project.clone(), order);
    }

    // Ground-truth commits must exist in the mined history.
    let mut labeled_messages = Vec::new();
    for entry in &entries {
        match inputs.get(&entry.commit_id) {
            Some(input) => labeled_messages.push((input.message.clone(), entry.label)),
            None => {
                return usage_error(format!(
                    "ground truth references unknown commit {}",
                    entry.commit_id
                ))
            }
        }
    }
    let vocab = build_vocabulary(&labeled_messages).map_err(anyhow::Error::from)?;

    let examples: Vec<_> = entries
        .iter()
        .map(|entry| {
            let input = &inputs[&entry.commit_id];
            (
                extract_features(&input.message, &input.production_changes, &vocab),
                entry.label,
            )
        })
        .collect();
    let model = train(&examples, &vocab, ForestConfig { trees: 101, seed })
        .map_err(anyhow::Error::from)?;

    std::fs::create_dir_all(ws.model_dir())?;
    checkpoint::write_json(&ws.model_dir().join("vocabulary.json"), &vocab)?;
    checkpoint::write_text(&ws.model_dir().join("forest.json"), &(model.to_json() + "\n"))?;

    let training_accuracy = {
        let correct = examples
            .iter()
            .filter(|(fv, label)| classify(&model, fv).map(|p| p == *label).unwrap_or(false))
            .count();
        correct as f64 / examples.len() as f64
    };

    for project in &projects {
        let order = &project_commit_order[project];
        let mut rows: Vec<(String, MaintenanceActivity)> = Vec::with_capacity(order.len());
        for commit_id in order {
            let input = &inputs[commit_id];
            let features = extract_features(&input.message, &input.production_changes, &vocab);
            let label = classify(&model, &features)
                .map_err(|e| AppError::Runtime(anyhow::anyhow!("classify {commit_id}: {e}")))?;
            rows.push((commit_id.clone(), label));
        }
        checkpoint::write_activities_csv(&ws.activities_csv(project), &rows)?;
        println!("classify {project}: {} commits labeled", rows.len());
    }
    println!(
        "classify: vocabulary {} words, {} ground-truth commits, training accuracy {:.3}",
        vocab.words.len(),
        entries.len(),
        training_accuracy
    );
    Ok(())
}

fn read_ground_truth(path: &Path) -> AppResult<Vec<GroundTruthEntry>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            return usage_error(format!("cannot read ground truth {}: {e}", path.display()))
        }
    };
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line == "commit_id,label" {
            continue;
        }
        let Some((commit_id, label)) = line.split_once(',') else {
            return usage_error(format!(
                "{}:{}: expected `commit_id,label`",
                path.display(),
                lineno + 1
            ));
        };
        let label = MaintenanceActivity::from_label(label)
            .map_err(|e| AppError::Usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        entries.push(GroundTruthEntry { commit_id: commit_id.trim().to_string(), label });
    }
    if entries.is_empty() {
        return usage_error(format!("ground truth {} is empty", path.display()));
    }
    Ok(entries)
}
