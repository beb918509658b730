use super::{ClassifyError, MaintenanceActivity};
use crate::distill::{ChangeType, SourceChange};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Words per maintenance activity kept in the vocabulary.
pub const WORDS_PER_ACTIVITY: usize = 10;

/// Fixed English stop-word list applied before word-frequency analysis.
const STOP_WORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "cannot", "could", "did", "do", "does", "doing", "down", "during", "each",
    "few", "for", "from", "further", "had", "has", "have", "having", "he", "her", "here",
    "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it",
    "its", "itself", "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "now",
    "of", "off", "on", "once", "only", "or", "other", "our", "ours", "ourselves", "out",
    "over", "own", "same", "she", "should", "so", "some", "such", "than", "that", "the",
    "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
    "those", "through", "to", "too", "under", "until", "up", "very", "was", "we", "were",
    "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with", "would",
    "you", "your", "yours", "yourself", "yourselves",
];

/// Lowercase and split a commit message on non-alphanumeric characters.
pub fn tokenize_message(message: &str) -> Vec<String> {
    message
        .to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Per-activity top-10 word lists and their union.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub corrective: Vec<String>,
    pub perfective: Vec<String>,
    pub adaptive: Vec<String>,
    /// Sorted union of the three lists; the keyword feature layout.
    pub words: Vec<String>,
}

impl Vocabulary {
    pub fn activity_words(&self, activity: MaintenanceActivity) -> &[String] {
        match activity {
            MaintenanceActivity::Corrective => &self.corrective,
            MaintenanceActivity::Perfective => &self.perfective,
            MaintenanceActivity::Adaptive => &self.adaptive,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.binary_search_by(|w| w.as_str().cmp(word)).is_ok()
    }
}

/// Build the classification vocabulary from labeled commit messages: the
/// ten most frequent stop-word-filtered words per activity, ties broken
/// lexicographically.
pub fn build_vocabulary(
    labeled_messages: &[(String, MaintenanceActivity)],
) -> Result<Vocabulary, ClassifyError> {
    if labeled_messages.is_empty() {
        return Err(ClassifyError::EmptyGroundTruth);
    }
    let mut per_activity: BTreeMap<MaintenanceActivity, BTreeMap<String, u64>> = BTreeMap::new();
    for (message, activity) in labeled_messages {
        let counts = per_activity.entry(*activity).or_default();
        for token in tokenize_message(message) {
            if STOP_WORDS.binary_search(&token.as_str()).is_ok() {
                continue;
            }
            *counts.entry(token).or_insert(0) += 1;
        }
    }
    let top = |activity: MaintenanceActivity| -> Result<Vec<String>, ClassifyError> {
        let counts = per_activity
            .get(&activity)
            .ok_or(ClassifyError::MissingActivity(activity))?;
        let mut words: Vec<(&String, &u64)> = counts.iter().collect();
        // Highest count first; the BTreeMap already orders ties
        // lexicographically, kept stable by the sort.
        words.sort_by(|a, b| b.1.cmp(a.1));
        Ok(words.into_iter().take(WORDS_PER_ACTIVITY).map(|(w, _)| w.clone()).collect())
    };
    let corrective = top(MaintenanceActivity::Corrective)?;
    let perfective = top(MaintenanceActivity::Perfective)?;
    let adaptive = top(MaintenanceActivity::Adaptive)?;
    let mut words: Vec<String> =
        corrective.iter().chain(&perfective).chain(&adaptive).cloned().collect();
    words.sort();
    words.dedup();
    Ok(Vocabulary { corrective, perfective, adaptive, words })
}

/// Keyword and change-type frequencies for one commit.
///
/// Only non-zero keyword counts are stored; keys are always vocabulary
/// words.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub keyword_counts: BTreeMap<String, u32>,
    pub change_type_counts: BTreeMap<ChangeType, u32>,
}

/// Extract the feature vector of a commit: vocabulary-word counts over
/// its message, change-type counts over the given (production-side)
/// changes.
pub fn extract_features(
    message: &str,
    changes: &[SourceChange],
    vocab: &Vocabulary,
) -> FeatureVector {
    let mut features = FeatureVector::default();
    for token in tokenize_message(message) {
        if vocab.contains(&token) {
            *features.keyword_counts.entry(token).or_insert(0) += 1;
        }
    }
    for change in changes {
        *features.change_type_counts.entry(change.change_type).or_insert(0) += 1;
    }
    features
}
