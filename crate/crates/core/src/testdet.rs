//! Test-entity detection and per-commit test-maintenance profiles.
//!
//! A class is a test class when its simple name starts with `Test` or
//! ends with `Test`, `Tests` or `TestCase` (case-sensitive). A method is
//! a test method when it carries a `Test` annotation, or when its name
//! starts with `test` and it resides in a test class.

use crate::ast::{EntityKind, EntityNode};
use crate::distill::{ChangeType, SourceChange};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

const TEST_CLASS_SUFFIXES: &[&str] = &["Test", "Tests", "TestCase"];

/// Naming heuristic for JUnit-style test classes (suites).
pub fn is_test_class(class_name: &str) -> bool {
    class_name.starts_with("Test")
        || TEST_CLASS_SUFFIXES.iter().any(|s| class_name.ends_with(s))
}

/// A method is a test method (case) when it has a `Test` annotation —
/// simple or fully qualified — or when its name starts with `test` and
/// its enclosing class is a test class.
pub fn is_test_method(method: &EntityNode, enclosing_class_name: &str) -> bool {
    method.has_annotation("Test")
        || (method.name.starts_with("test") && is_test_class(enclosing_class_name))
}

/// The six per-commit test-activity counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestMaintenanceProfile {
    pub method_added: u32,
    pub method_removed: u32,
    pub method_updated: u32,
    pub class_added: u32,
    pub class_removed: u32,
    pub class_updated: u32,
}

impl TestMaintenanceProfile {
    /// Total number of test activities in the commit.
    pub fn total(&self) -> u32 {
        self.method_added
            + self.method_removed
            + self.method_updated
            + self.class_added
            + self.class_removed
            + self.class_updated
    }
}

/// `HasTestMaintenance`: the binary form of the profile total.
pub fn has_test_maintenance(profile: &TestMaintenanceProfile) -> bool {
    profile.total() > 0
}

/// Qualified names of the test classes and test methods visible in a set
/// of entity trees. Built from both sides of a commit so removed
/// entities stay recognizable.
#[derive(Debug, Clone, Default)]
pub struct TestEntityIndex {
    test_classes: BTreeSet<String>,
    test_methods: BTreeSet<String>,
}

impl TestEntityIndex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_trees<'a>(trees: impl IntoIterator<Item = &'a EntityNode>) -> Self {
        let mut index = Self::new();
        for tree in trees {
            index.add_tree(tree);
        }
        index
    }

    pub fn add_tree(&mut self, root: &EntityNode) {
        for class in root.children_of_kind(EntityKind::Class) {
            self.add_class(class);
        }
    }

    fn add_class(&mut self, class: &EntityNode) {
        let class_is_test = is_test_class(&class.name);
        if class_is_test {
            self.test_classes.insert(class.qualified_name.clone());
        }
        for method in class.children_of_kind(EntityKind::Method) {
            if is_test_method(method, &class.name) {
                self.test_methods.insert(method.qualified_name.clone());
            }
        }
        for nested in class.children_of_kind(EntityKind::Class) {
            self.add_class(nested);
        }
    }

    pub fn is_test_class_qname(&self, qualified: &str) -> bool {
        self.test_classes.contains(qualified)
    }

    pub fn is_test_method_qname(&self, qualified: &str) -> bool {
        self.test_methods.contains(qualified)
    }
}

/// Fold one commit's changes into its test-maintenance profile.
///
/// The four class/method add/remove types count only when the entity
/// itself qualifies as a test entity. Every other change type counts as
/// a method update when its parent scope is a test method, else as a
/// class update when its enclosing class is a test class.
pub fn derive_profile(changes: &[SourceChange], index: &TestEntityIndex) -> TestMaintenanceProfile {
    let mut profile = TestMaintenanceProfile::default();
    for change in changes {
        match change.change_type {
            ChangeType::AdditionalFunctionality => {
                if index.is_test_method_qname(&change.entity_qualified_name()) {
                    profile.method_added += 1;
                }
            }
            ChangeType::RemovedFunctionality => {
                if index.is_test_method_qname(&change.entity_qualified_name()) {
                    profile.method_removed += 1;
                }
            }
            ChangeType::AdditionalClass => {
                if index.is_test_class_qname(&change.entity_qualified_name()) {
                    profile.class_added += 1;
                }
            }
            ChangeType::RemovedClass => {
                if index.is_test_class_qname(&change.entity_qualified_name()) {
                    profile.class_removed += 1;
                }
            }
            _ => {
                if index.is_test_method_qname(&change.parent) {
                    profile.method_updated += 1;
                } else if enclosing_test_class(index, &change.parent) {
                    profile.class_updated += 1;
                }
            }
        }
    }
    profile
}

/// True when `parent` is a test class or lies inside one (e.g. the parent
/// of a statement change is a method; its own parent is the class).
fn enclosing_test_class(index: &TestEntityIndex, parent: &str) -> bool {
    let mut scope = parent;
    loop {
        if index.is_test_class_qname(scope) {
            return true;
        }
        match scope.rsplit_once('.') {
            Some((outer, _)) => scope = outer,
            None => return false,
        }
    }
}

/// Count the test methods and test classes in a project's head state.
pub fn count_head_tests<'a>(
    head_trees: impl IntoIterator<Item = &'a EntityNode>,
) -> (u64, u64) {
    let mut methods = 0u64;
    let mut classes = 0u64;
    for tree in head_trees {
        for class in tree.children_of_kind(EntityKind::Class) {
            count_in_class(class, &mut methods, &mut classes);
        }
    }
    (methods, classes)
}

fn count_in_class(class: &EntityNode, methods: &mut u64, classes: &mut u64) {
    if is_test_class(&class.name) {
        *classes += 1;
    }
    for method in class.children_of_kind(EntityKind::Method) {
        if is_test_method(method, &class.name) {
            *methods += 1;
        }
    }
    for nested in class.children_of_kind(EntityKind::Class) {
        count_in_class(nested, methods, classes);
    }
}
