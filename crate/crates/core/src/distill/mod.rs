//! Change distilling: classify the semantic difference between two
//! versions of one Java file as a list of [`SourceChange`]s.
//!
//! Entity matching works top-down: classes and fields match by qualified
//! name, methods by name plus arity (with parameter-signature
//! disambiguation for overloads), statements by best textual similarity
//! (token-multiset Dice coefficient, threshold 0.6). An added or removed
//! class additionally expands into one method-level change per directly
//! contained method, recursively for nested classes.
//!
//! Unmatched statements are reported as a single change for the whole
//! subtree rather than one change per nested node.

mod types;

pub use types::{sort_changes, ChangeType, SourceChange};

use crate::ast::{EntityKind, EntityNode, StatementKind};
use std::collections::BTreeMap;

/// Similarity threshold above which two statements are considered the
/// same (possibly updated) statement.
pub const STATEMENT_MATCH_THRESHOLD: f64 = 0.6;

/// Distill the semantic changes between two versions of one file.
///
/// `before` is absent when the file was added in the commit, `after` when
/// it was removed. Passing two `None`s yields no changes. The returned
/// list is sorted deterministically.
pub fn distill(
    before: Option<&EntityNode>,
    after: Option<&EntityNode>,
    file_path: &str,
    commit_id: &str,
) -> Vec<SourceChange> {
    let mut ctx = Ctx { file: file_path, commit: commit_id, out: Vec::new() };
    match (before, after) {
        (None, None) => {}
        (None, Some(a)) => {
            for class in a.children_of_kind(EntityKind::Class) {
                emit_class_added(class, &mut ctx);
            }
        }
        (Some(b), None) => {
            for class in b.children_of_kind(EntityKind::Class) {
                emit_class_removed(class, &mut ctx);
            }
        }
        (Some(b), Some(a)) => {
            diff_class_lists(
                b.children_of_kind(EntityKind::Class).collect(),
                a.children_of_kind(EntityKind::Class).collect(),
                &mut ctx,
            );
        }
    }
    let mut out = ctx.out;
    sort_changes(&mut out);
    out
}

struct Ctx<'a> {
    file: &'a str,
    commit: &'a str,
    out: Vec<SourceChange>,
}

impl Ctx<'_> {
    fn push(&mut self, change_type: ChangeType, kind: EntityKind, name: &str, parent: &str) {
        self.out.push(SourceChange {
            commit_id: self.commit.to_string(),
            file_path: self.file.to_string(),
            change_type,
            entity_kind: kind,
            entity_name: name.to_string(),
            parent: parent.to_string(),
        });
    }
}

fn enclosing_of(qualified: &str) -> &str {
    qualified.rsplit_once('.').map(|(p, _)| p).unwrap_or("")
}

/// Class addition expands into one ADDITIONAL_FUNCTIONALITY per directly
/// contained method, recursively for nested classes.
fn emit_class_added(class: &EntityNode, ctx: &mut Ctx) {
    ctx.push(
        ChangeType::AdditionalClass,
        EntityKind::Class,
        &class.name,
        enclosing_of(&class.qualified_name),
    );
    for method in class.children_of_kind(EntityKind::Method) {
        ctx.push(
            ChangeType::AdditionalFunctionality,
            EntityKind::Method,
            &method.name,
            &class.qualified_name,
        );
    }
    for nested in class.children_of_kind(EntityKind::Class) {
        emit_class_added(nested, ctx);
    }
}

fn emit_class_removed(class: &EntityNode, ctx: &mut Ctx) {
    ctx.push(
        ChangeType::RemovedClass,
        EntityKind::Class,
        &class.name,
        enclosing_of(&class.qualified_name),
    );
    for method in class.children_of_kind(EntityKind::Method) {
        ctx.push(
            ChangeType::RemovedFunctionality,
            EntityKind::Method,
            &method.name,
            &class.qualified_name,
        );
    }
    for nested in class.children_of_kind(EntityKind::Class) {
        emit_class_removed(nested, ctx);
    }
}

fn diff_class_lists(before: Vec<&EntityNode>, after: Vec<&EntityNode>, ctx: &mut Ctx) {
    let (matched, removed, added) = pair_by_key(&before, &after, |c| c.name.clone());
    for class in removed {
        emit_class_removed(class, ctx);
    }
    for class in added {
        emit_class_added(class, ctx);
    }
    for (b, a) in matched {
        diff_class(b, a, ctx);
    }
}

fn diff_class(before: &EntityNode, after: &EntityNode, ctx: &mut Ctx) {
    let class_q = &after.qualified_name;
    diff_modifiers(before, after, class_q, None, ctx);
    diff_annotations(before, after, class_q, ctx);

    // Fields match by name; edits to a matched field (type or initializer)
    // fall outside the taxonomy subset.
    let (matched, removed, added) = pair_by_key(
        &before.children_of_kind(EntityKind::Field).collect::<Vec<_>>(),
        &after.children_of_kind(EntityKind::Field).collect::<Vec<_>>(),
        |f| f.name.clone(),
    );
    for f in removed {
        ctx.push(ChangeType::RemovedObjectState, EntityKind::Field, &f.name, class_q);
    }
    for f in added {
        ctx.push(ChangeType::AdditionalObjectState, EntityKind::Field, &f.name, class_q);
    }
    for (fb, fa) in matched {
        if fb.text != fa.text {
            ctx.push(ChangeType::Unclassified, EntityKind::Field, &fa.name, class_q);
        }
    }

    diff_methods(before, after, class_q, ctx);
    diff_class_lists(
        before.children_of_kind(EntityKind::Class).collect(),
        after.children_of_kind(EntityKind::Class).collect(),
        ctx,
    );
}

/// Pairs two entity lists by a key, preserving source order within equal
/// keys. Returns (matched pairs, unmatched before, unmatched after).
fn pair_by_key<'a, K: Ord>(
    before: &[&'a EntityNode],
    after: &[&'a EntityNode],
    key: impl Fn(&EntityNode) -> K,
) -> (
    Vec<(&'a EntityNode, &'a EntityNode)>,
    Vec<&'a EntityNode>,
    Vec<&'a EntityNode>,
) {
    let mut by_key: BTreeMap<K, (Vec<&EntityNode>, Vec<&EntityNode>)> = BTreeMap::new();
    for n in before {
        by_key.entry(key(n)).or_default().0.push(n);
    }
    for n in after {
        by_key.entry(key(n)).or_default().1.push(n);
    }
    let mut matched = Vec::new();
    let mut removed = Vec::new();
    let mut added = Vec::new();
    for (_, (bs, afters)) in by_key {
        let common = bs.len().min(afters.len());
        for i in 0..common {
            matched.push((bs[i], afters[i]));
        }
        removed.extend(bs.into_iter().skip(common));
        added.extend(afters.into_iter().skip(common));
    }
    (matched, removed, added)
}

fn diff_methods(before: &EntityNode, after: &EntityNode, class_q: &str, ctx: &mut Ctx) {
    let bs: Vec<&EntityNode> = before.children_of_kind(EntityKind::Method).collect();
    let as_: Vec<&EntityNode> = after.children_of_kind(EntityKind::Method).collect();

    // Pass 1: exact signature. Pass 2: name + arity. Pass 3: name only,
    // paired in canonical (arity, signature, position) order so that an
    // arity change surfaces as parameter insert/delete rather than a
    // remove + add of the whole method.
    let mut matched: Vec<(&EntityNode, &EntityNode)> = Vec::new();
    let mut left_b = bs;
    let mut left_a = as_;
    for pass in 0..3 {
        let (m, rb, ra) = match pass {
            0 => pair_by_key(&left_b, &left_a, |m| {
                (m.name.clone(), m.arity(), m.parameter_signature())
            }),
            1 => pair_by_key(&left_b, &left_a, |m| {
                (m.name.clone(), m.arity(), String::new())
            }),
            _ => {
                let mut sb = left_b.clone();
                let mut sa = left_a.clone();
                sb.sort_by_key(|m| (m.name.clone(), m.arity(), m.parameter_signature()));
                sa.sort_by_key(|m| (m.name.clone(), m.arity(), m.parameter_signature()));
                pair_by_key(&sb, &sa, |m| m.name.clone())
            }
        };
        matched.extend(m);
        left_b = rb;
        left_a = ra;
    }

    // Rename: exactly one method removed and one added in this class with
    // identical bodies.
    if left_b.len() == 1 && left_a.len() == 1 && left_b[0].body_text() == left_a[0].body_text() {
        ctx.push(ChangeType::MethodRenaming, EntityKind::Method, &left_a[0].name, class_q);
    } else {
        for m in &left_b {
            ctx.push(ChangeType::RemovedFunctionality, EntityKind::Method, &m.name, class_q);
        }
        for m in &left_a {
            ctx.push(ChangeType::AdditionalFunctionality, EntityKind::Method, &m.name, class_q);
        }
    }

    for (mb, ma) in matched {
        diff_method(mb, ma, ctx);
    }
}

fn diff_method(before: &EntityNode, after: &EntityNode, ctx: &mut Ctx) {
    let method_q = &after.qualified_name;

    if before.return_type_text() != after.return_type_text() {
        ctx.push(
            ChangeType::ReturnTypeChange,
            EntityKind::ReturnType,
            after.return_type_text(),
            method_q,
        );
    }

    diff_modifiers(before, after, method_q, Some(()), ctx);
    diff_annotations(before, after, method_q, ctx);
    diff_parameters(before, after, method_q, ctx);

    let b_stmts: Vec<&EntityNode> = before.children_of_kind(EntityKind::Statement).collect();
    let a_stmts: Vec<&EntityNode> = after.children_of_kind(EntityKind::Statement).collect();
    diff_statement_lists(&b_stmts, &a_stmts, method_q, ctx);
}

/// Modifier diffs. On methods the `final` keyword maps to the
/// overridability change types; every other modifier edit (and all class
/// modifier edits) is outside the subset.
fn diff_modifiers(
    before: &EntityNode,
    after: &EntityNode,
    parent_q: &str,
    method_level: Option<()>,
    ctx: &mut Ctx,
) {
    let b: Vec<&str> = before.modifier_names();
    let a: Vec<&str> = after.modifier_names();
    for m in a.iter().filter(|m| !b.contains(m)) {
        if method_level.is_some() && *m == "final" {
            ctx.push(
                ChangeType::RemovingMethodOverridability,
                EntityKind::Modifier,
                "final",
                parent_q,
            );
        } else {
            ctx.push(ChangeType::Unclassified, EntityKind::Modifier, m, parent_q);
        }
    }
    for m in b.iter().filter(|m| !a.contains(m)) {
        if method_level.is_some() && *m == "final" {
            ctx.push(
                ChangeType::AddingMethodOverridability,
                EntityKind::Modifier,
                "final",
                parent_q,
            );
        } else {
            ctx.push(ChangeType::Unclassified, EntityKind::Modifier, m, parent_q);
        }
    }
}

/// Annotation set changes have no type of their own in the subset.
fn diff_annotations(before: &EntityNode, after: &EntityNode, parent_q: &str, ctx: &mut Ctx) {
    let key = |n: &EntityNode| (n.name.clone(), n.text.clone());
    let (_, removed, added) = pair_by_key(
        &before.children_of_kind(EntityKind::Annotation).collect::<Vec<_>>(),
        &after.children_of_kind(EntityKind::Annotation).collect::<Vec<_>>(),
        key,
    );
    for ann in removed.iter().chain(added.iter()) {
        ctx.push(ChangeType::Unclassified, EntityKind::Annotation, &ann.name, parent_q);
    }
}

/// Positional parameter alignment: extra trailing parameters surface as
/// inserts/deletes, in-place type or name edits as unclassified changes.
fn diff_parameters(before: &EntityNode, after: &EntityNode, method_q: &str, ctx: &mut Ctx) {
    let b: Vec<&EntityNode> = before.children_of_kind(EntityKind::Parameter).collect();
    let a: Vec<&EntityNode> = after.children_of_kind(EntityKind::Parameter).collect();
    let common = b.len().min(a.len());
    for i in 0..common {
        if b[i].text != a[i].text || b[i].name != a[i].name {
            ctx.push(ChangeType::Unclassified, EntityKind::Parameter, &a[i].name, method_q);
        }
    }
    for p in &b[common..] {
        ctx.push(ChangeType::ParameterDelete, EntityKind::Parameter, &p.name, method_q);
    }
    for p in &a[common..] {
        ctx.push(ChangeType::ParameterInsert, EntityKind::Parameter, &p.name, method_q);
    }
}

/// Token-multiset Dice coefficient over the flattened statement text.
fn similarity(b: &str, a: &str) -> f64 {
    let bt: Vec<&str> = b.split_whitespace().collect();
    let at: Vec<&str> = a.split_whitespace().collect();
    if bt.is_empty() && at.is_empty() {
        return 1.0;
    }
    if bt.is_empty() || at.is_empty() {
        return 0.0;
    }
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for t in &bt {
        counts.entry(t).or_default().0 += 1;
    }
    for t in &at {
        counts.entry(t).or_default().1 += 1;
    }
    let overlap: usize = counts.values().map(|(x, y)| x.min(y)).sum();
    2.0 * overlap as f64 / (bt.len() + at.len()) as f64
}

fn diff_statement_lists(
    before: &[&EntityNode],
    after: &[&EntityNode],
    method_q: &str,
    ctx: &mut Ctx,
) {
    // Candidate pairs above the threshold, best similarity first.
    let b_texts: Vec<String> = before.iter().map(|s| s.full_text()).collect();
    let a_texts: Vec<String> = after.iter().map(|s| s.full_text()).collect();
    let mut candidates: Vec<(i64, usize, usize)> = Vec::new();
    for (i, b) in before.iter().enumerate() {
        for (j, a) in after.iter().enumerate() {
            if b.stmt_kind != a.stmt_kind {
                continue;
            }
            let sim = similarity(&b_texts[i], &a_texts[j]);
            if sim >= STATEMENT_MATCH_THRESHOLD {
                // Scaled to an integer so ordering is total.
                candidates.push((-((sim * 1e12) as i64), i, j));
            }
        }
    }
    candidates.sort_unstable();
    let mut b_used = vec![false; before.len()];
    let mut a_used = vec![false; after.len()];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (_, i, j) in candidates {
        if !b_used[i] && !a_used[j] {
            b_used[i] = true;
            a_used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();

    for (i, used) in b_used.iter().enumerate() {
        if !used {
            ctx.push(ChangeType::StatementDelete, EntityKind::Statement, &b_texts[i], method_q);
        }
    }
    for (j, used) in a_used.iter().enumerate() {
        if !used {
            ctx.push(ChangeType::StatementInsert, EntityKind::Statement, &a_texts[j], method_q);
        }
    }

    // Matched pairs whose relative order inverted: everything outside the
    // longest increasing subsequence of after-positions moved. Only
    // textually identical statements are reported as pure moves.
    let in_lis = longest_increasing_mask(&pairs.iter().map(|&(_, j)| j).collect::<Vec<_>>());
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        if !in_lis[idx] && b_texts[i] == a_texts[j] {
            ctx.push(
                ChangeType::StatementOrderingChange,
                EntityKind::Statement,
                &a_texts[j],
                method_q,
            );
        }
    }

    for &(i, j) in &pairs {
        diff_statement(before[i], after[j], method_q, ctx);
    }
}

fn longest_increasing_mask(seq: &[usize]) -> Vec<bool> {
    let n = seq.len();
    let mut best_len = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    let mut best_end = 0usize;
    for i in 0..n {
        for j in 0..i {
            if seq[j] < seq[i] && best_len[j] + 1 > best_len[i] {
                best_len[i] = best_len[j] + 1;
                prev[i] = j;
            }
        }
        if best_len[i] > best_len[best_end] {
            best_end = i;
        }
    }
    let mut mask = vec![false; n];
    if n > 0 {
        let mut k = best_end;
        loop {
            mask[k] = true;
            if prev[k] == usize::MAX {
                break;
            }
            k = prev[k];
        }
    }
    mask
}

fn condition_text(stmt: &EntityNode) -> &str {
    stmt.children_of_kind(EntityKind::Condition)
        .next()
        .map(|c| c.text.as_str())
        .unwrap_or("")
}

fn else_part(stmt: &EntityNode) -> Option<&EntityNode> {
    stmt.children_of_kind(EntityKind::ElsePart).next()
}

fn diff_statement(before: &EntityNode, after: &EntityNode, method_q: &str, ctx: &mut Ctx) {
    match after.stmt_kind {
        Some(StatementKind::Simple) => {
            if before.text != after.text {
                ctx.push(ChangeType::StatementUpdate, EntityKind::Statement, &after.text, method_q);
            }
        }
        Some(StatementKind::If) | Some(StatementKind::Loop) | Some(StatementKind::Switch) => {
            if condition_text(before) != condition_text(after) {
                ctx.push(
                    ChangeType::ConditionExpressionChange,
                    EntityKind::Condition,
                    condition_text(after),
                    method_q,
                );
            }
            diff_statement_children(before, after, method_q, ctx);
            match (else_part(before), else_part(after)) {
                (None, Some(e)) => {
                    ctx.push(ChangeType::ElsePartInsert, EntityKind::ElsePart, &e.full_text(), method_q);
                }
                (Some(e), None) => {
                    ctx.push(ChangeType::ElsePartDelete, EntityKind::ElsePart, &e.full_text(), method_q);
                }
                (Some(eb), Some(ea)) => {
                    diff_statement_children(eb, ea, method_q, ctx);
                }
                (None, None) => {}
            }
        }
        Some(StatementKind::Try) | Some(StatementKind::Block) => {
            if before.text != after.text {
                ctx.push(ChangeType::StatementUpdate, EntityKind::Statement, &after.text, method_q);
            }
            diff_statement_children(before, after, method_q, ctx);
        }
        None => {}
    }
}

fn diff_statement_children(
    before: &EntityNode,
    after: &EntityNode,
    method_q: &str,
    ctx: &mut Ctx,
) {
    let b: Vec<&EntityNode> = before.children_of_kind(EntityKind::Statement).collect();
    let a: Vec<&EntityNode> = after.children_of_kind(EntityKind::Statement).collect();
    diff_statement_lists(&b, &a, method_q, ctx);
}
