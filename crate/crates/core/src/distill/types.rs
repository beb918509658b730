use crate::ast::EntityKind;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Classified semantic change types.
///
/// This is the subset of the Fluri taxonomy the analysis consumes, plus
/// `Unclassified` as the catch-all for structural edits outside the
/// subset (attribute type changes, parameter renames, class modifier
/// edits, ...). Unclassified changes are counted per commit but excluded
/// from regression predictors.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChangeType {
    AdditionalFunctionality,
    RemovedFunctionality,
    AdditionalClass,
    RemovedClass,
    AdditionalObjectState,
    RemovedObjectState,
    StatementInsert,
    StatementDelete,
    StatementUpdate,
    StatementOrderingChange,
    ReturnTypeChange,
    RemovingMethodOverridability,
    AddingMethodOverridability,
    MethodRenaming,
    ParameterInsert,
    ParameterDelete,
    ConditionExpressionChange,
    ElsePartInsert,
    ElsePartDelete,
    #[serde(rename = "UNCLASSIFIED_CHANGE")]
    Unclassified,
}

impl ChangeType {
    /// Every variant, in canonical (declaration) order.
    pub const ALL: [ChangeType; 20] = [
        ChangeType::AdditionalFunctionality,
        ChangeType::RemovedFunctionality,
        ChangeType::AdditionalClass,
        ChangeType::RemovedClass,
        ChangeType::AdditionalObjectState,
        ChangeType::RemovedObjectState,
        ChangeType::StatementInsert,
        ChangeType::StatementDelete,
        ChangeType::StatementUpdate,
        ChangeType::StatementOrderingChange,
        ChangeType::ReturnTypeChange,
        ChangeType::RemovingMethodOverridability,
        ChangeType::AddingMethodOverridability,
        ChangeType::MethodRenaming,
        ChangeType::ParameterInsert,
        ChangeType::ParameterDelete,
        ChangeType::ConditionExpressionChange,
        ChangeType::ElsePartInsert,
        ChangeType::ElsePartDelete,
        ChangeType::Unclassified,
    ];

    /// Serialized (wire/CSV) name.
    pub fn as_str(self) -> &'static str {
        match self {
            ChangeType::AdditionalFunctionality => "ADDITIONAL_FUNCTIONALITY",
            ChangeType::RemovedFunctionality => "REMOVED_FUNCTIONALITY",
            ChangeType::AdditionalClass => "ADDITIONAL_CLASS",
            ChangeType::RemovedClass => "REMOVED_CLASS",
            ChangeType::AdditionalObjectState => "ADDITIONAL_OBJECT_STATE",
            ChangeType::RemovedObjectState => "REMOVED_OBJECT_STATE",
            ChangeType::StatementInsert => "STATEMENT_INSERT",
            ChangeType::StatementDelete => "STATEMENT_DELETE",
            ChangeType::StatementUpdate => "STATEMENT_UPDATE",
            ChangeType::StatementOrderingChange => "STATEMENT_ORDERING_CHANGE",
            ChangeType::ReturnTypeChange => "RETURN_TYPE_CHANGE",
            ChangeType::RemovingMethodOverridability => "REMOVING_METHOD_OVERRIDABILITY",
            ChangeType::AddingMethodOverridability => "ADDING_METHOD_OVERRIDABILITY",
            ChangeType::MethodRenaming => "METHOD_RENAMING",
            ChangeType::ParameterInsert => "PARAMETER_INSERT",
            ChangeType::ParameterDelete => "PARAMETER_DELETE",
            ChangeType::ConditionExpressionChange => "CONDITION_EXPRESSION_CHANGE",
            ChangeType::ElsePartInsert => "ELSE_PART_INSERT",
            ChangeType::ElsePartDelete => "ELSE_PART_DELETE",
            ChangeType::Unclassified => "UNCLASSIFIED_CHANGE",
        }
    }

    /// Parse a serialized name back into the enum.
    pub fn from_str_name(name: &str) -> Option<ChangeType> {
        ChangeType::ALL.iter().copied().find(|c| c.as_str() == name)
    }
}

impl fmt::Display for ChangeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One distilled semantic change.
///
/// `parent` carries the qualified name of the scope owning the change:
/// the enclosing class for method/field/nested-class changes, the
/// enclosing method for statement-level and declaration-part changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceChange {
    #[serde(rename = "commit")]
    pub commit_id: String,
    #[serde(rename = "file")]
    pub file_path: String,
    #[serde(rename = "changeType")]
    pub change_type: ChangeType,
    #[serde(rename = "entityKind")]
    pub entity_kind: EntityKind,
    #[serde(rename = "entityName")]
    pub entity_name: String,
    #[serde(rename = "parent")]
    pub parent: String,
}

impl SourceChange {
    /// Qualified name of the changed entity itself, when it has one.
    pub fn entity_qualified_name(&self) -> String {
        if self.parent.is_empty() {
            self.entity_name.clone()
        } else {
            format!("{}.{}", self.parent, self.entity_name)
        }
    }
}

/// Deterministic output order for change lists.
pub fn sort_changes(changes: &mut [SourceChange]) {
    changes.sort_by(|a, b| {
        (&a.file_path, &a.parent, a.change_type, &a.entity_name, a.entity_kind).cmp(&(
            &b.file_path,
            &b.parent,
            b.change_type,
            &b.entity_name,
            b.entity_kind,
        ))
    });
}
