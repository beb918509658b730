//! Commit classification into maintenance activities.
//!
//! Features combine commit-message keyword frequencies (the ten most
//! frequent non-stop-words per activity in a labeled ground-truth set)
//! with semantic change-type frequencies. The model is a bagged ensemble
//! of randomized decision trees with majority voting.

mod forest;
mod vocab;

pub use forest::{train, classify, ClassifierModel, ForestConfig, TreeNode};
pub use vocab::{build_vocabulary, extract_features, tokenize_message, FeatureVector, Vocabulary};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Mockus-style maintenance activity of a commit.
///
/// The declaration order doubles as the fixed tie-break order for
/// classifier votes.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum MaintenanceActivity {
    /// Fixing faults, functional and non-functional.
    Corrective,
    /// Improving the system and its design.
    Perfective,
    /// Introducing new features.
    Adaptive,
}

impl MaintenanceActivity {
    pub const ALL: [MaintenanceActivity; 3] = [
        MaintenanceActivity::Corrective,
        MaintenanceActivity::Perfective,
        MaintenanceActivity::Adaptive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MaintenanceActivity::Corrective => "corrective",
            MaintenanceActivity::Perfective => "perfective",
            MaintenanceActivity::Adaptive => "adaptive",
        }
    }

    /// Case-insensitive parse of a ground-truth label.
    pub fn from_label(label: &str) -> Result<MaintenanceActivity, ClassifyError> {
        match label.trim().to_ascii_lowercase().as_str() {
            "corrective" => Ok(MaintenanceActivity::Corrective),
            "perfective" => Ok(MaintenanceActivity::Perfective),
            "adaptive" => Ok(MaintenanceActivity::Adaptive),
            other => Err(ClassifyError::UnknownLabel(other.to_string())),
        }
    }
}

impl fmt::Display for MaintenanceActivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One manually labeled ground-truth commit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruthEntry {
    pub commit_id: String,
    pub label: MaintenanceActivity,
}

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("unknown maintenance activity label `{0}`")]
    UnknownLabel(String),
    #[error("ground truth has no {0} commits")]
    MissingActivity(MaintenanceActivity),
    #[error("empty ground truth")]
    EmptyGroundTruth,
    #[error("training data contains a single class ({0}); at least two are required")]
    SingleClass(MaintenanceActivity),
    #[error("too few training examples for {activity}: {count} < {minimum}")]
    TooFewExamples { activity: MaintenanceActivity, count: usize, minimum: usize },
    #[error("feature vector uses words outside the trained vocabulary: {0:?}")]
    VocabularyMismatch(Vec<String>),
    #[error("tree count must be odd, got {0}")]
    EvenTreeCount(usize),
    #[error("unsupported model version {0}")]
    UnsupportedVersion(u32),
}
