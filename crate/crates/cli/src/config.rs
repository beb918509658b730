use crate::{usage_error, AppResult};
use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

/// One mined repository: a stable project id plus its on-disk location.
#[derive(Debug, Clone)]
pub struct RepoEntry {
    pub project_id: String,
    pub path: PathBuf,
}

/// Parse the repository list: one path per line, blank lines and
/// `#`-comments ignored. The project id is the final path component.
pub fn read_repo_list(list_path: &Path) -> AppResult<Vec<RepoEntry>> {
    let text = match std::fs::read_to_string(list_path) {
        Ok(t) => t,
        Err(e) => {
            return usage_error(format!(
                "cannot read repository list {}: {e}",
                list_path.display()
            ))
        }
    };
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let path = PathBuf::from(line);
        let project_id = match path.file_name().and_then(|n| n.to_str()) {
            Some(name) => name.to_string(),
            None => {
                return usage_error(format!(
                    "{}:{}: cannot derive a project id from {line:?}",
                    list_path.display(),
                    lineno + 1
                ))
            }
        };
        if !seen.insert(project_id.clone()) {
            return usage_error(format!(
                "duplicate project id {project_id:?} in {}",
                list_path.display()
            ));
        }
        entries.push(RepoEntry { project_id, path });
    }
    if entries.is_empty() {
        return usage_error(format!("repository list {} is empty", list_path.display()));
    }
    Ok(entries)
}
