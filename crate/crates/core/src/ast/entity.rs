use serde::{Deserialize, Serialize};

/// Kind of a node in the normalized entity tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntityKind {
    Class,
    Method,
    Field,
    Statement,
    Annotation,
    Modifier,
    ReturnType,
    Parameter,
    ElsePart,
    Condition,
}

impl EntityKind {
    /// Serialized (wire) name of the kind.
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Class => "CLASS",
            EntityKind::Method => "METHOD",
            EntityKind::Field => "FIELD",
            EntityKind::Statement => "STATEMENT",
            EntityKind::Annotation => "ANNOTATION",
            EntityKind::Modifier => "MODIFIER",
            EntityKind::ReturnType => "RETURN_TYPE",
            EntityKind::Parameter => "PARAMETER",
            EntityKind::ElsePart => "ELSE_PART",
            EntityKind::Condition => "CONDITION",
        }
    }
}

/// Structural flavor of a statement node. Only the distinctions the
/// distiller needs are kept; everything terminated by `;` is `Simple`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StatementKind {
    If,
    Loop,
    Switch,
    Try,
    Block,
    Simple,
}

/// One node of the entity tree.
///
/// `text` holds the node's own normalized token text: the full statement
/// for `Simple` statements, the header for composite statements (their
/// condition lives in a `Condition` child), the type text for parameters
/// and return types. Use [`EntityNode::full_text`] for the flattened text
/// of a whole subtree.
#[derive(Debug, Clone, PartialEq)]
pub struct EntityNode {
    pub kind: EntityKind,
    /// Simple name; empty for statements, conditions and the root.
    pub name: String,
    /// Dotted path from the compilation unit; children extend their parent's.
    pub qualified_name: String,
    /// Normalized token text owned by this node (see type docs).
    pub text: String,
    /// 1-based (start_line, end_line).
    pub span: (u32, u32),
    pub children: Vec<EntityNode>,
    /// Set iff `kind == Statement`.
    pub stmt_kind: Option<StatementKind>,
}

impl EntityNode {
    pub(crate) fn new(kind: EntityKind, name: &str, qualified_name: String) -> Self {
        EntityNode {
            kind,
            name: name.to_string(),
            qualified_name,
            text: String::new(),
            span: (0, 0),
            children: Vec::new(),
            stmt_kind: None,
        }
    }

    /// True for the synthetic compilation-unit root.
    pub fn is_compilation_unit(&self) -> bool {
        self.kind == EntityKind::Class && self.qualified_name.is_empty()
    }

    pub fn children_of_kind(&self, kind: EntityKind) -> impl Iterator<Item = &EntityNode> {
        self.children.iter().filter(move |c| c.kind == kind)
    }

    /// Number of declared parameters (methods only).
    pub fn arity(&self) -> usize {
        self.children_of_kind(EntityKind::Parameter).count()
    }

    /// Comma-joined parameter type text, used to disambiguate overloads.
    pub fn parameter_signature(&self) -> String {
        self.children_of_kind(EntityKind::Parameter)
            .map(|p| p.text.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Return-type text of a method, empty for constructors.
    pub fn return_type_text(&self) -> &str {
        self.children_of_kind(EntityKind::ReturnType)
            .next()
            .map(|n| n.text.as_str())
            .unwrap_or("")
    }

    /// Sorted modifier names attached to this declaration.
    pub fn modifier_names(&self) -> Vec<&str> {
        let mut mods: Vec<&str> = self
            .children_of_kind(EntityKind::Modifier)
            .map(|m| m.name.as_str())
            .collect();
        mods.sort_unstable();
        mods
    }

    /// True if an annotation with the given simple name is attached, either
    /// as `@Name` or as the tail of a fully qualified `@pkg.Name`.
    pub fn has_annotation(&self, simple: &str) -> bool {
        self.children_of_kind(EntityKind::Annotation).any(|a| {
            a.name == simple || a.name.rsplit('.').next() == Some(simple)
        })
    }

    /// Flattened token text of this node and everything below it.
    pub fn full_text(&self) -> String {
        let mut out = String::new();
        self.collect_text(&mut out);
        out
    }

    fn collect_text(&self, out: &mut String) {
        if !self.text.is_empty() {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&self.text);
        }
        for child in &self.children {
            child.collect_text(out);
        }
    }

    /// Statement body text of a method, ignoring its declaration parts.
    /// Two methods with equal body text are considered identical bodies.
    pub fn body_text(&self) -> String {
        let mut out = String::new();
        for stmt in self.children_of_kind(EntityKind::Statement) {
            let t = stmt.full_text();
            if !t.is_empty() {
                if !out.is_empty() {
                    out.push(' ');
                }
                out.push_str(&t);
            }
        }
        out
    }
}
