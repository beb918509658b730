//! Checkpoint layout and IO. Every stage reads its inputs from and
//! writes its outputs to a fixed location under the --out directory so
//! stages can run separately or fused.

use crate::{usage_error, AppError, AppResult};
use coevo_core::classify::MaintenanceActivity;
use coevo_core::dataset::CommitObservation;
use coevo_core::distill::{ChangeType, SourceChange};
use coevo_core::testdet::{has_test_maintenance, TestMaintenanceProfile};
use coevo_core::vcs::{CommitRecord, ProjectStats};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone)]
pub struct Workspace {
    out: PathBuf,
}

/// One Java file at head state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HeadFile {
    pub path: String,
    pub source: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HeadTests {
    pub test_methods: u64,
    pub test_classes: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExclusionSummary {
    pub test_only_excluded: usize,
    pub outlier_excluded: usize,
    pub exclusion_rate: f64,
}

impl Workspace {
    pub fn new(out: &Path) -> Workspace {
        Workspace { out: out.to_path_buf() }
    }

    fn project_dir(&self, project: &str) -> PathBuf {
        self.out.join("projects").join(project)
    }

    pub fn commits_jsonl(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("commits.jsonl")
    }

    pub fn head_jsonl(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("head.jsonl")
    }

    pub fn stats_json(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("stats.json")
    }

    pub fn diagnostics_txt(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("diagnostics.txt")
    }

    pub fn changes_jsonl(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("changes.jsonl")
    }

    pub fn undistillable_txt(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("undistillable.txt")
    }

    pub fn profiles_csv(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("profiles.csv")
    }

    pub fn head_tests_json(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("head_tests.json")
    }

    pub fn activities_csv(&self, project: &str) -> PathBuf {
        self.project_dir(project).join("activities.csv")
    }

    pub fn model_dir(&self) -> PathBuf {
        self.out.join("model")
    }

    pub fn dataset_dir(&self) -> PathBuf {
        self.out.join("dataset")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.out.join("reports")
    }

    pub fn ensure_project_dir(&self, project: &str) -> AppResult<PathBuf> {
        let dir = self.project_dir(project);
        std::fs::create_dir_all(&dir)?;
        Ok(dir)
    }

    /// Project ids with mined checkpoints, sorted.
    pub fn mined_projects(&self) -> AppResult<Vec<String>> {
        let projects_dir = self.out.join("projects");
        if !projects_dir.is_dir() {
            return usage_error(format!(
                "no mined checkpoints under {}; run the mine stage first",
                self.out.display()
            ));
        }
        let mut ids = Vec::new();
        for entry in std::fs::read_dir(&projects_dir)? {
            let entry = entry?;
            if entry.path().is_dir() {
                if let Some(name) = entry.file_name().to_str() {
                    ids.push(name.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> AppResult<()> {
    let mut buf = Vec::new();
    for item in items {
        serde_json::to_writer(&mut buf, item).map_err(anyhow::Error::from)?;
        buf.push(b'\n');
    }
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path, needed_by: &str) -> AppResult<Vec<T>> {
    let text = require(path, needed_by)?;
    let mut items = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let item = serde_json::from_str(line).map_err(|e| {
            AppError::Runtime(anyhow::anyhow!(
                "{}:{}: malformed checkpoint line: {e}",
                path.display(),
                lineno + 1
            ))
        })?;
        items.push(item);
    }
    Ok(items)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(anyhow::Error::from)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path, needed_by: &str) -> AppResult<T> {
    let text = require(path, needed_by)?;
    serde_json::from_str(&text).map_err(|e| {
        AppError::Runtime(anyhow::anyhow!("{}: malformed checkpoint: {e}", path.display()))
    })
}

/// Read a checkpoint file, turning absence into a usage error naming the
/// stage that produces it.
pub fn require(path: &Path, needed_by: &str) -> AppResult<String> {
    match std::fs::read_to_string(path) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => usage_error(format!(
            "{} stage input missing: {} (run the earlier stages first)",
            needed_by,
            path.display()
        )),
        Err(e) => Err(e.into()),
    }
}

pub fn load_commits(ws: &Workspace, project: &str) -> AppResult<Vec<CommitRecord>> {
    read_jsonl(&ws.commits_jsonl(project), "distill/detect/classify/dataset")
}

pub fn load_changes_by_commit(
    ws: &Workspace,
    project: &str,
) -> AppResult<BTreeMap<String, Vec<SourceChange>>> {
    let changes: Vec<SourceChange> =
        read_jsonl(&ws.changes_jsonl(project), "detect/classify/dataset")?;
    let mut by_commit: BTreeMap<String, Vec<SourceChange>> = BTreeMap::new();
    for change in changes {
        by_commit.entry(change.commit_id.clone()).or_default().push(change);
    }
    Ok(by_commit)
}

pub const PROFILE_HEADER: [&str; 9] = [
    "commit_id",
    "method_added",
    "method_removed",
    "method_updated",
    "class_added",
    "class_removed",
    "class_updated",
    "total",
    "hasTestMaintenance",
];

pub fn write_profiles_csv(
    path: &Path,
    rows: &[(String, TestMaintenanceProfile)],
) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(PROFILE_HEADER).map_err(anyhow::Error::from)?;
    for (commit_id, p) in rows {
        w.write_record([
            commit_id.as_str(),
            &p.method_added.to_string(),
            &p.method_removed.to_string(),
            &p.method_updated.to_string(),
            &p.class_added.to_string(),
            &p.class_removed.to_string(),
            &p.class_updated.to_string(),
            &p.total().to_string(),
            if has_test_maintenance(p) { "true" } else { "false" },
        ])
        .map_err(anyhow::Error::from)?;
    }
    finish_csv(path, w)
}

pub fn read_profiles_csv(
    path: &Path,
    needed_by: &str,
) -> AppResult<BTreeMap<String, TestMaintenanceProfile>> {
    let text = require(path, needed_by)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut map = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(anyhow::Error::from)?;
        let get = |i: usize| -> AppResult<u32> {
            record
                .get(i)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| AppError::Runtime(anyhow::anyhow!("bad profile row in {}", path.display())))
        };
        let profile = TestMaintenanceProfile {
            method_added: get(1)?,
            method_removed: get(2)?,
            method_updated: get(3)?,
            class_added: get(4)?,
            class_removed: get(5)?,
            class_updated: get(6)?,
        };
        map.insert(record.get(0).unwrap_or_default().to_string(), profile);
    }
    Ok(map)
}

pub fn write_activities_csv(
    path: &Path,
    rows: &[(String, MaintenanceActivity)],
) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["commit_id", "activity"]).map_err(anyhow::Error::from)?;
    for (commit_id, activity) in rows {
        w.write_record([commit_id.as_str(), activity.as_str()])
            .map_err(anyhow::Error::from)?;
    }
    finish_csv(path, w)
}

pub fn read_activities_csv(
    path: &Path,
    needed_by: &str,
) -> AppResult<BTreeMap<String, MaintenanceActivity>> {
    let text = require(path, needed_by)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut map = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(anyhow::Error::from)?;
        let commit = record.get(0).unwrap_or_default().to_string();
        let label = record.get(1).unwrap_or_default();
        let activity = MaintenanceActivity::from_label(label).map_err(anyhow::Error::from)?;
        map.insert(commit, activity);
    }
    Ok(map)
}

/// Column order of dataset/commits.csv: identity and profile columns,
/// then one column per change type (production files only).
pub fn commit_csv_header() -> Vec<String> {
    let mut header: Vec<String> = [
        "project",
        "commit_id",
        "author",
        "activity",
        "method_added",
        "method_removed",
        "method_updated",
        "class_added",
        "class_removed",
        "class_updated",
        "total",
        "has_test_maintenance",
        "is_test_only",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    header.extend(ChangeType::ALL.iter().map(|ct| ct.as_str().to_string()));
    header
}

pub fn write_commit_observations_csv(
    path: &Path,
    rows: &[CommitObservation],
) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(commit_csv_header()).map_err(anyhow::Error::from)?;
    for row in rows {
        let mut record: Vec<String> = vec![
            row.project_id.clone(),
            row.commit_id.clone(),
            row.author_id.clone(),
            row.activity.as_str().to_string(),
            row.profile.method_added.to_string(),
            row.profile.method_removed.to_string(),
            row.profile.method_updated.to_string(),
            row.profile.class_added.to_string(),
            row.profile.class_removed.to_string(),
            row.profile.class_updated.to_string(),
            row.profile.total().to_string(),
            has_test_maintenance(&row.profile).to_string(),
            row.is_test_only.to_string(),
        ];
        for ct in ChangeType::ALL {
            record.push(row.change_type_counts.get(&ct).copied().unwrap_or(0).to_string());
        }
        w.write_record(&record).map_err(anyhow::Error::from)?;
    }
    finish_csv(path, w)
}

pub fn read_commit_observations_csv(
    path: &Path,
    needed_by: &str,
) -> AppResult<Vec<CommitObservation>> {
    let text = require(path, needed_by)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(anyhow::Error::from)?;
        let field = |i: usize| record.get(i).unwrap_or_default().to_string();
        let num = |i: usize| -> u32 { record.get(i).and_then(|v| v.parse().ok()).unwrap_or(0) };
        let mut change_type_counts = BTreeMap::new();
        for (k, ct) in ChangeType::ALL.iter().enumerate() {
            let count = num(13 + k);
            if count > 0 {
                change_type_counts.insert(*ct, count);
            }
        }
        rows.push(CommitObservation {
            project_id: field(0),
            commit_id: field(1),
            author_id: field(2),
            activity: MaintenanceActivity::from_label(&field(3)).map_err(anyhow::Error::from)?,
            profile: TestMaintenanceProfile {
                method_added: num(4),
                method_removed: num(5),
                method_updated: num(6),
                class_added: num(7),
                class_removed: num(8),
                class_updated: num(9),
            },
            change_type_counts,
            is_test_only: field(12) == "true",
        });
    }
    Ok(rows)
}

/// One decoded row of dataset/projects.csv.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjectRow {
    pub project: String,
    pub loc: u64,
    pub developers: u64,
    pub age_days: u64,
    pub java_commit_count: u64,
    pub corrective: u64,
    pub perfective: u64,
    pub adaptive: u64,
    pub test_methods: u64,
    pub test_classes: u64,
}

pub fn write_projects_csv(path: &Path, rows: &[ProjectRow]) -> AppResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(anyhow::Error::from)?;
    }
    finish_csv(path, w)
}

pub fn read_projects_csv(path: &Path, needed_by: &str) -> AppResult<Vec<ProjectRow>> {
    let text = require(path, needed_by)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for row in reader.deserialize() {
        rows.push(row.map_err(anyhow::Error::from)?);
    }
    Ok(rows)
}

fn finish_csv(path: &Path, w: csv::Writer<Vec<u8>>) -> AppResult<()> {
    let bytes = w.into_inner().map_err(|e| AppError::Runtime(anyhow::anyhow!("{e}")))?;
    std::fs::write(path, bytes)?;
    Ok(())
}

pub fn write_text(path: &Path, content: &str) -> AppResult<()> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(content.as_bytes())?;
    Ok(())
}

pub fn read_stats(ws: &Workspace, project: &str, needed_by: &str) -> AppResult<ProjectStats> {
    read_json(&ws.stats_json(project), needed_by)
}
