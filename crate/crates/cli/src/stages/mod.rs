pub mod classify;
pub mod dataset;
pub mod detect;
pub mod distill;
pub mod mine;
pub mod model;
pub mod proportions;

use coevo_core::ast::{parse_compilation_unit, EntityNode};
use coevo_core::dataset::is_test_file;
use coevo_core::testdet::TestEntityIndex;
use coevo_core::vcs::CommitRecord;
use std::collections::BTreeSet;

/// Parsed view of one commit: the test-entity index over both sides of
/// every delta, which changed files are test files, and whether the
/// commit touched test files only. Parse failures are not tracked here;
/// the distill stage records them as undistillable files.
pub(crate) struct CommitSides {
    pub index: TestEntityIndex,
    pub test_files: BTreeSet<String>,
    pub is_test_only: bool,
}

/// A delta's two parsed sides; `failure` marks the file undistillable
/// for this commit.
pub(crate) struct DeltaTrees {
    pub before: Option<EntityNode>,
    pub after: Option<EntityNode>,
    pub failure: Option<String>,
}

pub(crate) fn parse_delta(commit_id: &str, path: &str, before: Option<&str>, after: Option<&str>) -> DeltaTrees {
    let mut failure = None;
    let mut parse_side = |side: Option<&str>, which: &str| -> Option<EntityNode> {
        let source = side?;
        match parse_compilation_unit(source) {
            Ok(tree) => Some(tree),
            Err(e) => {
                failure = Some(format!("{commit_id} {path} ({which}): {e}"));
                None
            }
        }
    };
    let before = parse_side(before, "before");
    let after = parse_side(after, "after");
    DeltaTrees { before, after, failure }
}

pub(crate) fn analyze_commit(record: &CommitRecord) -> CommitSides {
    let mut index = TestEntityIndex::new();
    let mut test_files = BTreeSet::new();
    let mut all_test = !record.file_deltas.is_empty();
    for delta in &record.file_deltas {
        let trees = parse_delta(
            &record.commit_id,
            &delta.path,
            delta.before_source.as_deref(),
            delta.after_source.as_deref(),
        );
        for tree in trees.before.iter().chain(trees.after.iter()) {
            index.add_tree(tree);
        }
        // Classification follows the current side of the file; for
        // removals the before side is all there is. Unparsable files
        // count as production.
        let classified = trees.after.as_ref().or(trees.before.as_ref());
        match classified {
            Some(tree) if is_test_file(tree) => {
                test_files.insert(delta.path.clone());
            }
            _ => all_test = false,
        }
    }
    CommitSides { index, test_files, is_test_only: all_test }
}
