use super::vocab::{FeatureVector, Vocabulary};
use super::{ClassifyError, MaintenanceActivity};
use crate::distill::ChangeType;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const MODEL_FORMAT_VERSION: u32 = 1;
const MIN_EXAMPLES_PER_CLASS: usize = 5;

/// Ensemble hyperparameters. The defaults are the documented fixed
/// choices: 101 trees, per-tree bootstrap, √F feature candidates per
/// split, Gini impurity, unlimited depth.
#[derive(Debug, Clone, Copy)]
pub struct ForestConfig {
    pub trees: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig { trees: 101, seed: 0 }
    }
}

/// One node of a trained decision tree. `feature` indexes the dense
/// layout: vocabulary words in sorted order, then every change type in
/// canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode {
    Split { feature: usize, threshold: f64, left: Box<TreeNode>, right: Box<TreeNode> },
    Leaf { label: MaintenanceActivity },
}

/// A trained commit classifier, serializable to versioned JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub version: u32,
    pub seed: u64,
    /// Keyword feature layout; must match the vocabulary used to extract
    /// features at classification time.
    pub vocabulary: Vec<String>,
    pub trees: Vec<TreeNode>,
}

impl ClassifierModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<ClassifierModel, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn n_features(&self) -> usize {
        self.vocabulary.len() + ChangeType::ALL.len()
    }
}

/// Flatten a feature vector against a vocabulary layout. Errors when the
/// vector references words outside the vocabulary.
fn to_dense(features: &FeatureVector, vocabulary: &[String]) -> Result<Vec<f64>, ClassifyError> {
    let unknown: Vec<String> = features
        .keyword_counts
        .keys()
        .filter(|w| vocabulary.binary_search(w).is_err())
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(ClassifyError::VocabularyMismatch(unknown));
    }
    let mut dense = Vec::with_capacity(vocabulary.len() + ChangeType::ALL.len());
    for word in vocabulary {
        dense.push(*features.keyword_counts.get(word).unwrap_or(&0) as f64);
    }
    for ct in ChangeType::ALL {
        dense.push(*features.change_type_counts.get(&ct).unwrap_or(&0) as f64);
    }
    Ok(dense)
}

/// Train the bagged ensemble. Deterministic under a fixed seed, and
/// insensitive to the order of the training examples (they are sorted
/// canonically before any randomness is drawn).
pub fn train(
    examples: &[(FeatureVector, MaintenanceActivity)],
    vocab: &Vocabulary,
    config: ForestConfig,
) -> Result<ClassifierModel, ClassifyError> {
    if config.trees % 2 == 0 {
        return Err(ClassifyError::EvenTreeCount(config.trees));
    }
    if examples.is_empty() {
        return Err(ClassifyError::EmptyGroundTruth);
    }
    let mut class_counts = [0usize; 3];
    for (_, label) in examples {
        class_counts[*label as usize] += 1;
    }
    let present: Vec<MaintenanceActivity> = MaintenanceActivity::ALL
        .into_iter()
        .filter(|a| class_counts[*a as usize] > 0)
        .collect();
    if present.len() == 1 {
        return Err(ClassifyError::SingleClass(present[0]));
    }
    for activity in MaintenanceActivity::ALL {
        let count = class_counts[activity as usize];
        if count < MIN_EXAMPLES_PER_CLASS {
            return Err(ClassifyError::TooFewExamples {
                activity,
                count,
                minimum: MIN_EXAMPLES_PER_CLASS,
            });
        }
    }

    let mut data: Vec<(Vec<f64>, MaintenanceActivity)> = examples
        .iter()
        .map(|(fv, label)| Ok((to_dense(fv, &vocab.words)?, *label)))
        .collect::<Result<_, ClassifyError>>()?;
    data.sort_by(|a, b| {
        a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1))
    });

    let n_features = vocab.words.len() + ChangeType::ALL.len();
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let tree_seeds: Vec<u64> = (0..config.trees).map(|_| master.next_u64()).collect();
    let trees: Vec<TreeNode> = tree_seeds
        .into_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let indices: Vec<usize> =
                (0..data.len()).map(|_| rng.random_range(0..data.len())).collect();
            build_tree(&data, &indices, n_features, &mut rng)
        })
        .collect();

    Ok(ClassifierModel {
        version: MODEL_FORMAT_VERSION,
        seed: config.seed,
        vocabulary: vocab.words.clone(),
        trees,
    })
}

fn build_tree(
    data: &[(Vec<f64>, MaintenanceActivity)],
    indices: &[usize],
    n_features: usize,
    rng: &mut ChaCha8Rng,
) -> TreeNode {
    let first = data[indices[0]].1;
    if indices.iter().all(|&i| data[i].1 == first) {
        return TreeNode::Leaf { label: first };
    }
    let k = (n_features as f64).sqrt().ceil() as usize;
    let mut candidates: Vec<usize> =
        rand::seq::index::sample(rng, n_features, k.min(n_features)).into_vec();
    candidates.sort_unstable();

    let parent_impurity = gini(data, indices);
    let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
    for &feature in &candidates {
        let mut values: Vec<f64> = indices.iter().map(|&i| data[i].0[feature]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for pair in values.windows(2) {
            let threshold = (pair[0] + pair[1]) / 2.0;
            let (left, right): (Vec<usize>, Vec<usize>) =
                indices.iter().partition(|&&i| data[i].0[feature] <= threshold);
            if left.is_empty() || right.is_empty() {
                continue;
            }
            let weighted = (left.len() as f64 * gini(data, &left)
                + right.len() as f64 * gini(data, &right))
                / indices.len() as f64;
            let gain = parent_impurity - weighted;
            let better = match best {
                None => gain > 1e-12,
                Some((bg, bf, bt)) => {
                    gain > bg + 1e-12
                        || ((gain - bg).abs() <= 1e-12 && (feature, threshold) < (bf, bt))
                }
            };
            if better {
                best = Some((gain, feature, threshold));
            }
        }
    }
    match best {
        None => TreeNode::Leaf { label: majority(data, indices) },
        Some((_, feature, threshold)) => {
            let (left, right): (Vec<usize>, Vec<usize>) =
                indices.iter().partition(|&&i| data[i].0[feature] <= threshold);
            TreeNode::Split {
                feature,
                threshold,
                left: Box::new(build_tree(data, &left, n_features, rng)),
                right: Box::new(build_tree(data, &right, n_features, rng)),
            }
        }
    }
}

fn gini(data: &[(Vec<f64>, MaintenanceActivity)], indices: &[usize]) -> f64 {
    let mut counts = [0usize; 3];
    for &i in indices {
        counts[data[i].1 as usize] += 1;
    }
    let n = indices.len() as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn majority(data: &[(Vec<f64>, MaintenanceActivity)], indices: &[usize]) -> MaintenanceActivity {
    let mut counts = [0usize; 3];
    for &i in indices {
        counts[data[i].1 as usize] += 1;
    }
    plurality(&counts)
}

/// Plurality with ties broken by the fixed activity order.
fn plurality(counts: &[usize; 3]) -> MaintenanceActivity {
    let mut best = MaintenanceActivity::Corrective;
    let mut best_count = counts[0];
    for activity in MaintenanceActivity::ALL {
        if counts[activity as usize] > best_count {
            best = activity;
            best_count = counts[activity as usize];
        }
    }
    best
}

/// Classify a feature vector: every tree votes, majority wins.
pub fn classify(
    model: &ClassifierModel,
    features: &FeatureVector,
) -> Result<MaintenanceActivity, ClassifyError> {
    if model.version != MODEL_FORMAT_VERSION {
        return Err(ClassifyError::UnsupportedVersion(model.version));
    }
    let dense = to_dense(features, &model.vocabulary)?;
    let mut votes = [0usize; 3];
    for tree in &model.trees {
        let mut node = tree;
        loop {
            match node {
                TreeNode::Leaf { label } => {
                    votes[*label as usize] += 1;
                    break;
                }
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if dense[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }
    Ok(plurality(&votes))
}
