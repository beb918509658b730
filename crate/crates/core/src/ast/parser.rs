use super::entity::{EntityKind, EntityNode, StatementKind};
use super::lexer::{tokenize, Token};

/// Syntax error with source position.
#[derive(Debug, Clone, thiserror::Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: u32, col: u32, message: &str) -> Self {
        ParseError { line, col, message: message.to_string() }
    }
}

/// Parse Java source text into a normalized entity tree.
///
/// The root is a synthetic compilation-unit container (kind `Class`, empty
/// name) whose children are the top-level type declarations. Method bodies
/// are decomposed into statement nodes; annotations, modifiers, return
/// types and parameters are attached as typed children of their
/// declaration. Comments never enter the tree.
pub fn parse_compilation_unit(source: &str) -> Result<EntityNode, ParseError> {
    let tokens = tokenize(source)?;
    let last_line = tokens.last().map(|t| t.line).unwrap_or(1);
    let mut parser = Parser { tokens, pos: 0 };
    let mut root = EntityNode::new(EntityKind::Class, "", String::new());
    root.span = (1, last_line);
    while !parser.eof() {
        if parser.at("package") || parser.at("import") {
            parser.skip_until_semicolon()?;
            continue;
        }
        if parser.at(";") {
            parser.bump();
            continue;
        }
        let decl = parser.parse_type_decl()?;
        root.children.push(decl);
    }
    assign_qualified_names(&mut root);
    Ok(root)
}

fn assign_qualified_names(root: &mut EntityNode) {
    root.qualified_name = String::new();
    for (idx, child) in root.children.iter_mut().enumerate() {
        assign_rec(child, "", idx);
    }
}

fn assign_rec(node: &mut EntityNode, parent: &str, idx: usize) {
    let segment = if node.name.is_empty() { format!("#{idx}") } else { node.name.clone() };
    node.qualified_name =
        if parent.is_empty() { segment } else { format!("{parent}.{segment}") };
    let q = node.qualified_name.clone();
    for (i, child) in node.children.iter_mut().enumerate() {
        assign_rec(child, &q, i);
    }
}

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default", "sealed",
];

const TYPE_KEYWORDS: &[&str] = &["class", "interface", "enum", "record"];

#[derive(Default)]
struct Prelude {
    annotations: Vec<(String, String, u32)>, // (dotted name, argument text, line)
    modifiers: Vec<(String, u32)>,
    start_line: Option<u32>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn eof(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_text(&self, offset: usize) -> &str {
        self.tokens.get(self.pos + offset).map(|t| t.text.as_str()).unwrap_or("")
    }

    fn at(&self, text: &str) -> bool {
        self.peek_text(0) == text
    }

    fn bump(&mut self) -> &Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn cur_line(&self) -> u32 {
        self.peek().map(|t| t.line).unwrap_or_else(|| self.prev_line())
    }

    fn prev_line(&self) -> u32 {
        if self.pos == 0 {
            1
        } else {
            self.tokens[self.pos - 1].line
        }
    }

    fn error_here(&self, message: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(t.line, t.col, message),
            None => ParseError::new(self.prev_line(), 0, &format!("{message} (unexpected end of input)")),
        }
    }

    fn expect(&mut self, text: &str) -> Result<(), ParseError> {
        if self.at(text) {
            self.bump();
            Ok(())
        } else {
            Err(self.error_here(&format!("expected `{text}`")))
        }
    }

    fn expect_ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(t) if is_ident(&t.text) => Ok(self.bump().text.clone()),
            _ => Err(self.error_here("expected identifier")),
        }
    }

    fn skip_until_semicolon(&mut self) -> Result<(), ParseError> {
        while !self.eof() {
            if self.bump().text == ";" {
                return Ok(());
            }
        }
        Err(self.error_here("expected `;`"))
    }

    /// Consumes a balanced `<...>` type-argument/parameter section.
    fn skip_type_args(&mut self) -> Result<(), ParseError> {
        let mut depth = 0i32;
        while !self.eof() {
            match self.bump().text.as_str() {
                "<" => depth += 1,
                ">" => depth -= 1,
                ">>" => depth -= 2,
                ">>>" => depth -= 3,
                _ => {}
            }
            if depth <= 0 {
                return Ok(());
            }
        }
        Err(self.error_here("unbalanced `<`"))
    }

    /// Consumes tokens from the current opening bracket to its matching
    /// close and returns the inner tokens (brackets excluded).
    fn collect_balanced(&mut self) -> Result<Vec<Token>, ParseError> {
        let open = self.peek_text(0).to_string();
        let close = match open.as_str() {
            "(" => ")",
            "{" => "}",
            "[" => "]",
            _ => return Err(self.error_here("expected opening bracket")),
        };
        self.bump();
        let mut depth = 1;
        let mut inner = Vec::new();
        while !self.eof() {
            let t = self.bump().clone();
            if t.text == open {
                depth += 1;
            } else if t.text == close {
                depth -= 1;
                if depth == 0 {
                    return Ok(inner);
                }
            }
            inner.push(t);
        }
        Err(self.error_here(&format!("unbalanced `{open}`")))
    }

    /// Annotations and modifiers preceding a declaration. Stops before
    /// `@interface` so the caller can treat it as a type keyword.
    fn parse_prelude(&mut self) -> Result<Prelude, ParseError> {
        let mut prelude = Prelude::default();
        loop {
            if self.at("@") && self.peek_text(1) != "interface" {
                let line = self.cur_line();
                prelude.start_line.get_or_insert(line);
                self.bump();
                let mut name = self.expect_ident()?;
                while self.at(".") {
                    self.bump();
                    name.push('.');
                    name.push_str(&self.expect_ident()?);
                }
                let args = if self.at("(") {
                    join_tokens(&self.collect_balanced()?)
                } else {
                    String::new()
                };
                prelude.annotations.push((name, args, line));
                continue;
            }
            let text = self.peek_text(0);
            if MODIFIERS.contains(&text) {
                // `static { ... }` initializer blocks and `default:` labels
                // are not modifiers; the member parser handles them.
                if text == "static" && self.peek_text(1) == "{" {
                    break;
                }
                let line = self.cur_line();
                prelude.start_line.get_or_insert(line);
                prelude.modifiers.push((self.bump().text.clone(), line));
                continue;
            }
            break;
        }
        Ok(prelude)
    }

    fn at_type_keyword(&self) -> bool {
        let t = self.peek_text(0);
        if TYPE_KEYWORDS.contains(&t) {
            // `record` is contextual; require an identifier after it.
            return t != "record" || is_ident(self.peek_text(1));
        }
        t == "@" && self.peek_text(1) == "interface"
    }

    fn parse_type_decl(&mut self) -> Result<EntityNode, ParseError> {
        let prelude = self.parse_prelude()?;
        self.parse_type_decl_with(prelude)
    }

    fn parse_type_decl_with(&mut self, prelude: Prelude) -> Result<EntityNode, ParseError> {
        if !self.at_type_keyword() {
            return Err(self.error_here("expected type declaration"));
        }
        let start_line = prelude.start_line.unwrap_or_else(|| self.cur_line());
        let keyword = if self.at("@") {
            self.bump();
            self.bump(); // `interface`
            "@interface".to_string()
        } else {
            self.bump().text.clone()
        };
        let name = self.expect_ident()?;
        let mut node = EntityNode::new(EntityKind::Class, &name, String::new());
        attach_prelude(&mut node, prelude);
        if self.at("<") {
            self.skip_type_args()?;
        }
        if keyword == "record" && self.at("(") {
            self.collect_balanced()?;
        }
        while !self.eof() && !self.at("{") {
            self.bump();
        }
        self.expect("{")?;
        if keyword == "enum" {
            self.parse_enum_constants(&mut node)?;
        }
        self.parse_members(&mut node, &name)?;
        node.span = (start_line, self.prev_line());
        Ok(node)
    }

    fn parse_enum_constants(&mut self, class: &mut EntityNode) -> Result<(), ParseError> {
        loop {
            if self.at(";") {
                self.bump();
                return Ok(());
            }
            if self.at("}") {
                return Ok(()); // closing brace consumed by the member loop
            }
            // Constant annotations fold into its text.
            let start = self.cur_line();
            let mut text = String::new();
            while self.at("@") {
                self.bump();
                push_token(&mut text, "@");
                let name = self.expect_ident()?;
                push_token(&mut text, &name);
                if self.at("(") {
                    let args = join_tokens(&self.collect_balanced()?);
                    push_token(&mut text, &format!("( {args} )"));
                }
            }
            let name = self.expect_ident()?;
            push_token(&mut text, &name);
            if self.at("(") {
                let args = join_tokens(&self.collect_balanced()?);
                push_token(&mut text, &format!("( {args} )"));
            }
            if self.at("{") {
                // Constant class bodies stay opaque.
                let body = join_tokens(&self.collect_balanced()?);
                push_token(&mut text, &format!("{{ {body} }}"));
            }
            let mut field = EntityNode::new(EntityKind::Field, &name, String::new());
            field.text = text;
            field.span = (start, self.prev_line());
            class.children.push(field);
            if self.at(",") {
                self.bump();
            }
        }
    }

    fn parse_members(&mut self, class: &mut EntityNode, class_name: &str) -> Result<(), ParseError> {
        let mut initializer_count = 0usize;
        loop {
            if self.eof() {
                return Err(self.error_here("expected `}`"));
            }
            if self.at("}") {
                self.bump();
                return Ok(());
            }
            if self.at(";") {
                self.bump();
                continue;
            }
            if self.at("{") || (self.at("static") && self.peek_text(1) == "{") {
                let start = self.cur_line();
                let is_static = self.at("static");
                if is_static {
                    self.bump();
                }
                let name = format!("<init#{initializer_count}>");
                initializer_count += 1;
                let mut node = EntityNode::new(EntityKind::Method, &name, String::new());
                if is_static {
                    let mut m = EntityNode::new(EntityKind::Modifier, "static", String::new());
                    m.span = (start, start);
                    node.children.push(m);
                }
                self.expect("{")?;
                let body = self.parse_block_statements()?;
                node.children.extend(body);
                node.span = (start, self.prev_line());
                class.children.push(node);
                continue;
            }
            let prelude = self.parse_prelude()?;
            if self.at_type_keyword() {
                let nested = self.parse_type_decl_with(prelude)?;
                class.children.push(nested);
                continue;
            }
            let member = self.parse_field_or_method(prelude, class_name)?;
            class.children.extend(member);
        }
    }

    /// Decides between a method and a field by scanning the declaration
    /// header: the first top-level `(` preceded by an identifier means a
    /// method; `=` or `;` first means a field.
    fn parse_field_or_method(
        &mut self,
        prelude: Prelude,
        class_name: &str,
    ) -> Result<Vec<EntityNode>, ParseError> {
        let start_line = prelude.start_line.unwrap_or_else(|| self.cur_line());
        if self.at("<") {
            self.skip_type_args()?; // generic method type parameters
        }
        let mut angle: i32 = 0;
        let mut shape = None;
        let mut offset = 0usize;
        while self.pos + offset < self.tokens.len() {
            let text = self.tokens[self.pos + offset].text.as_str();
            match text {
                "<" => angle += 1,
                ">" => angle -= 1,
                ">>" => angle -= 2,
                ">>>" => angle -= 3,
                "(" if angle == 0 => {
                    shape = Some(if offset > 0 && is_ident(&self.tokens[self.pos + offset - 1].text) {
                        MemberShape::Method { name_offset: offset - 1 }
                    } else {
                        MemberShape::Field
                    });
                    break;
                }
                "=" | ";" if angle == 0 => {
                    shape = Some(MemberShape::Field);
                    break;
                }
                "{" if angle == 0 => {
                    // Record compact constructor: `public Point { ... }`.
                    shape = Some(if offset > 0 && is_ident(&self.tokens[self.pos + offset - 1].text) {
                        MemberShape::Method { name_offset: offset - 1 }
                    } else {
                        MemberShape::Field
                    });
                    break;
                }
                _ => {}
            }
            offset += 1;
        }
        match shape {
            Some(MemberShape::Method { name_offset }) => {
                Ok(vec![self.parse_method(prelude, name_offset, start_line, class_name)?])
            }
            Some(MemberShape::Field) => self.parse_field(prelude, start_line),
            None => Err(self.error_here("unterminated member declaration")),
        }
    }

    fn parse_method(
        &mut self,
        prelude: Prelude,
        name_offset: usize,
        start_line: u32,
        _class_name: &str,
    ) -> Result<EntityNode, ParseError> {
        let return_type: Vec<Token> =
            self.tokens[self.pos..self.pos + name_offset].to_vec();
        self.pos += name_offset;
        let name = self.expect_ident()?;
        let mut node = EntityNode::new(EntityKind::Method, &name, String::new());
        attach_prelude(&mut node, prelude);
        let ret_text = join_tokens(&return_type);
        if !ret_text.is_empty() {
            let mut rt = EntityNode::new(EntityKind::ReturnType, &ret_text, String::new());
            rt.text = ret_text;
            rt.span = (start_line, start_line);
            node.children.push(rt);
        }
        if self.at("(") {
            let params = self.collect_balanced()?;
            for param in split_parameters(&params) {
                node.children.push(param);
            }
        }
        // throws clause, @interface `default` values, etc.
        while !self.eof() && !self.at("{") && !self.at(";") {
            self.bump();
        }
        if self.at(";") {
            self.bump(); // abstract / interface method without a body
        } else {
            self.expect("{")?;
            let body = self.parse_block_statements()?;
            node.children.extend(body);
        }
        node.span = (start_line, self.prev_line());
        Ok(node)
    }

    fn parse_field(
        &mut self,
        prelude: Prelude,
        start_line: u32,
    ) -> Result<Vec<EntityNode>, ParseError> {
        // Collect the whole declaration up to its terminating `;`, then
        // split into declarators at top-level commas.
        let mut tokens = Vec::new();
        let mut depth = 0i32;
        loop {
            if self.eof() {
                return Err(self.error_here("expected `;`"));
            }
            let t = self.bump().clone();
            match t.text.as_str() {
                "(" | "{" | "[" => depth += 1,
                ")" | "}" | "]" => depth -= 1,
                ";" if depth == 0 => break,
                _ => {}
            }
            tokens.push(t);
        }
        let end_line = self.prev_line();
        let declarators = split_declarators(&tokens);
        let mut fields = Vec::new();
        let shared_prelude = prelude;
        for (name, text) in declarators {
            let mut field = EntityNode::new(EntityKind::Field, &name, String::new());
            field.text = text;
            field.span = (start_line, end_line);
            for (n, args, line) in &shared_prelude.annotations {
                let mut a = EntityNode::new(EntityKind::Annotation, n, String::new());
                a.text = args.clone();
                a.span = (*line, *line);
                field.children.push(a);
            }
            for (m, line) in &shared_prelude.modifiers {
                let mut node = EntityNode::new(EntityKind::Modifier, m, String::new());
                node.span = (*line, *line);
                field.children.push(node);
            }
            fields.push(field);
        }
        Ok(fields)
    }

    fn parse_block_statements(&mut self) -> Result<Vec<EntityNode>, ParseError> {
        let mut stmts = Vec::new();
        loop {
            if self.eof() {
                return Err(self.error_here("expected `}`"));
            }
            if self.at("}") {
                self.bump();
                return Ok(stmts);
            }
            stmts.push(self.parse_statement()?);
        }
    }

    fn parse_statement(&mut self) -> Result<EntityNode, ParseError> {
        let start = self.cur_line();
        let text = self.peek_text(0).to_string();
        let mut node = match text.as_str() {
            "{" => {
                self.bump();
                let children = self.parse_block_statements()?;
                let mut n = stmt_node(StatementKind::Block, "");
                n.children = children;
                n
            }
            "if" => {
                self.bump();
                let mut n = stmt_node(StatementKind::If, "if");
                n.children.push(self.parse_condition()?);
                let then_branch = self.parse_statement()?;
                absorb_branch(&mut n.children, then_branch);
                if self.at("else") {
                    self.bump();
                    let else_branch = self.parse_statement()?;
                    let mut else_part =
                        EntityNode::new(EntityKind::ElsePart, "", String::new());
                    else_part.text = "else".to_string();
                    else_part.span = (self.prev_line(), self.prev_line());
                    absorb_branch(&mut else_part.children, else_branch);
                    n.children.push(else_part);
                }
                n
            }
            "while" => {
                self.bump();
                let mut n = stmt_node(StatementKind::Loop, "while");
                n.children.push(self.parse_condition()?);
                let body = self.parse_statement()?;
                absorb_branch(&mut n.children, body);
                n
            }
            "do" => {
                self.bump();
                let mut n = stmt_node(StatementKind::Loop, "do");
                let body = self.parse_statement()?;
                self.expect("while")?;
                let cond = self.parse_condition()?;
                n.children.push(cond);
                absorb_branch(&mut n.children, body);
                if self.at(";") {
                    self.bump();
                }
                n
            }
            "for" => {
                self.bump();
                let mut n = stmt_node(StatementKind::Loop, "for");
                n.children.push(self.parse_condition()?);
                let body = self.parse_statement()?;
                absorb_branch(&mut n.children, body);
                n
            }
            "switch" => {
                self.bump();
                let mut n = stmt_node(StatementKind::Switch, "switch");
                n.children.push(self.parse_condition()?);
                self.expect("{")?;
                loop {
                    if self.eof() {
                        return Err(self.error_here("expected `}`"));
                    }
                    if self.at("}") {
                        self.bump();
                        break;
                    }
                    if self.at("case") || self.at("default") {
                        let label_line = self.cur_line();
                        let mut label = String::new();
                        push_token(&mut label, &self.bump().text);
                        let mut depth = 0i32;
                        while !self.eof() {
                            let t = self.peek_text(0);
                            if depth == 0 && (t == ":" || t == "->") {
                                push_token(&mut label, &self.bump().text);
                                break;
                            }
                            match t {
                                "(" | "[" => depth += 1,
                                ")" | "]" => depth -= 1,
                                _ => {}
                            }
                            push_token(&mut label, &self.bump().text);
                        }
                        let mut ln = stmt_node(StatementKind::Simple, &label);
                        ln.span = (label_line, self.prev_line());
                        n.children.push(ln);
                        continue;
                    }
                    let stmt = self.parse_statement()?;
                    n.children.push(stmt);
                }
                n
            }
            "try" => {
                self.bump();
                let mut header = String::from("try");
                if self.at("(") {
                    let res = join_tokens(&self.collect_balanced()?);
                    header.push_str(&format!(" ( {res} )"));
                }
                let mut n = stmt_node(StatementKind::Try, &header);
                self.expect("{")?;
                n.children.extend(self.parse_block_statements()?);
                loop {
                    if self.at("catch") {
                        let line = self.cur_line();
                        self.bump();
                        let param = join_tokens(&self.collect_balanced()?);
                        let mut clause =
                            stmt_node(StatementKind::Block, &format!("catch ( {param} )"));
                        self.expect("{")?;
                        clause.children = self.parse_block_statements()?;
                        clause.span = (line, self.prev_line());
                        n.children.push(clause);
                        continue;
                    }
                    if self.at("finally") {
                        let line = self.cur_line();
                        self.bump();
                        let mut clause = stmt_node(StatementKind::Block, "finally");
                        self.expect("{")?;
                        clause.children = self.parse_block_statements()?;
                        clause.span = (line, self.prev_line());
                        n.children.push(clause);
                        continue;
                    }
                    break;
                }
                n
            }
            "synchronized" => {
                self.bump();
                let guard = join_tokens(&self.collect_balanced()?);
                let mut n =
                    stmt_node(StatementKind::Block, &format!("synchronized ( {guard} )"));
                self.expect("{")?;
                n.children = self.parse_block_statements()?;
                n
            }
            _ => {
                // Labeled statement: `name : stmt` (but not `case`/`::`).
                if is_ident(&text) && self.peek_text(1) == ":" {
                    let label = self.bump().text.clone();
                    self.bump();
                    let mut inner = self.parse_statement()?;
                    inner.text = format!("{label} : {}", inner.text).trim_end().to_string();
                    inner.span.0 = start;
                    return Ok(inner);
                }
                self.parse_simple_statement()?
            }
        };
        node.span = (start, self.prev_line());
        Ok(node)
    }

    fn parse_condition(&mut self) -> Result<EntityNode, ParseError> {
        let line = self.cur_line();
        if !self.at("(") {
            return Err(self.error_here("expected `(`"));
        }
        let inner = self.collect_balanced()?;
        let mut cond = EntityNode::new(EntityKind::Condition, "", String::new());
        cond.text = join_tokens(&inner);
        cond.span = (line, self.prev_line());
        Ok(cond)
    }

    /// Everything up to the terminating `;` at bracket depth zero, which
    /// keeps lambdas and anonymous class bodies opaque inside the text.
    fn parse_simple_statement(&mut self) -> Result<EntityNode, ParseError> {
        let mut text = String::new();
        let mut depth = 0i32;
        loop {
            if self.eof() {
                return Err(self.error_here("expected `;`"));
            }
            let t = self.bump().clone();
            match t.text.as_str() {
                "(" | "{" | "[" => depth += 1,
                ")" | "}" | "]" => depth -= 1,
                _ => {}
            }
            push_token(&mut text, &t.text);
            if t.text == ";" && depth == 0 {
                break;
            }
        }
        Ok(stmt_node(StatementKind::Simple, &text))
    }
}

enum MemberShape {
    Method { name_offset: usize },
    Field,
}

fn stmt_node(kind: StatementKind, text: &str) -> EntityNode {
    let mut n = EntityNode::new(EntityKind::Statement, "", String::new());
    n.stmt_kind = Some(kind);
    n.text = text.to_string();
    n
}

/// If a branch is a bare block, its statements become direct children of
/// the parent statement; any other statement is kept as a single child.
fn absorb_branch(children: &mut Vec<EntityNode>, branch: EntityNode) {
    if branch.stmt_kind == Some(StatementKind::Block) && branch.text.is_empty() {
        children.extend(branch.children);
    } else {
        children.push(branch);
    }
}

fn attach_prelude(node: &mut EntityNode, prelude: Prelude) {
    for (name, args, line) in prelude.annotations {
        let mut a = EntityNode::new(EntityKind::Annotation, &name, String::new());
        a.text = args;
        a.span = (line, line);
        node.children.push(a);
    }
    for (name, line) in prelude.modifiers {
        let mut m = EntityNode::new(EntityKind::Modifier, &name, String::new());
        m.span = (line, line);
        node.children.push(m);
    }
}

fn is_ident(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '$')
}

fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    for t in tokens {
        push_token(&mut out, &t.text);
    }
    out
}

fn push_token(out: &mut String, text: &str) {
    if !out.is_empty() {
        out.push(' ');
    }
    out.push_str(text);
}

/// Splits a parameter list at top-level commas into `Parameter` nodes
/// (name = parameter name, text = type text).
fn split_parameters(tokens: &[Token]) -> Vec<EntityNode> {
    let mut params = Vec::new();
    let mut current: Vec<&Token> = Vec::new();
    let mut depth = 0i32;
    let mut angle = 0i32;
    for t in tokens {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            "<" => angle += 1,
            ">" => angle -= 1,
            ">>" => angle -= 2,
            ">>>" => angle -= 3,
            "," if depth == 0 && angle <= 0 => {
                if let Some(p) = parameter_node(&current) {
                    params.push(p);
                }
                current.clear();
                angle = 0;
                continue;
            }
            _ => {}
        }
        current.push(t);
    }
    if let Some(p) = parameter_node(&current) {
        params.push(p);
    }
    params
}

fn parameter_node(tokens: &[&Token]) -> Option<EntityNode> {
    // Drop leading `final` and annotations; the name is the last
    // identifier after skipping trailing `[]` pairs.
    let mut toks: Vec<&Token> = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let t = tokens[i];
        if t.text == "final" {
            i += 1;
            continue;
        }
        if t.text == "@" {
            i += 2; // `@` + name; argument lists on parameter annotations are rare
            while i < tokens.len() && tokens[i].text == "." {
                i += 2;
            }
            if i < tokens.len() && tokens[i].text == "(" {
                let mut depth = 0;
                while i < tokens.len() {
                    match tokens[i].text.as_str() {
                        "(" => depth += 1,
                        ")" => {
                            depth -= 1;
                            if depth == 0 {
                                i += 1;
                                break;
                            }
                        }
                        _ => {}
                    }
                    i += 1;
                }
            }
            continue;
        }
        toks.push(t);
        i += 1;
    }
    if toks.is_empty() {
        return None;
    }
    let mut name_idx = toks.len();
    let mut j = toks.len();
    while j > 0 {
        let t = &toks[j - 1].text;
        if t == "]" || t == "[" {
            j -= 1;
            continue;
        }
        if is_ident(t) {
            name_idx = j - 1;
        }
        break;
    }
    if name_idx >= toks.len() {
        return None;
    }
    let name = toks[name_idx].text.clone();
    let type_text = toks[..name_idx]
        .iter()
        .map(|t| t.text.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    let mut p = EntityNode::new(EntityKind::Parameter, &name, String::new());
    p.text = type_text;
    p.span = (toks[0].line, toks[toks.len() - 1].line);
    Some(p)
}

/// Splits a field declaration (without its `;`) into declarators,
/// returning (name, full text including the shared type) per declarator.
fn split_declarators(tokens: &[Token]) -> Vec<(String, String)> {
    // Locate the first declarator name: the identifier followed by
    // `=`, `,`, `[` or end-of-declaration at top level.
    let mut angle = 0i32;
    let mut name_idx = None;
    for (i, t) in tokens.iter().enumerate() {
        match t.text.as_str() {
            "<" => angle += 1,
            ">" => angle -= 1,
            ">>" => angle -= 2,
            ">>>" => angle -= 3,
            _ => {}
        }
        if angle == 0 && is_ident(&t.text) {
            let next = tokens.get(i + 1).map(|t| t.text.as_str()).unwrap_or("");
            if next == "=" || next == "," || next == "[" || next.is_empty() {
                name_idx = Some(i);
                break;
            }
        }
    }
    let Some(first_name) = name_idx else {
        // Not shaped like a field; degrade to a single unnamed declarator.
        let text = tokens.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
        return vec![(String::new(), text)];
    };
    let type_text =
        tokens[..first_name].iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" ");
    let mut declarators = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut depth = 0i32;
    let mut in_init = false;
    let mut angle = 0i32;
    for t in &tokens[first_name..] {
        match t.text.as_str() {
            "(" | "[" | "{" => depth += 1,
            ")" | "]" | "}" => depth -= 1,
            "<" if !in_init => angle += 1,
            ">" if !in_init => angle -= 1,
            "=" if depth == 0 => in_init = true,
            "," if depth == 0 && (in_init || angle == 0) => {
                flush_declarator(&type_text, &current, &mut declarators);
                current.clear();
                in_init = false;
                angle = 0;
                continue;
            }
            _ => {}
        }
        current.push(&t.text);
    }
    flush_declarator(&type_text, &current, &mut declarators);
    declarators
}

fn flush_declarator(type_text: &str, tokens: &[&str], out: &mut Vec<(String, String)>) {
    if tokens.is_empty() {
        return;
    }
    let name = tokens[0].to_string();
    let mut text = String::new();
    if !type_text.is_empty() {
        text.push_str(type_text);
    }
    for t in tokens {
        push_token(&mut text, t);
    }
    out.push((name, text));
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class<'a>(root: &'a EntityNode, name: &str) -> &'a EntityNode {
        root.children_of_kind(EntityKind::Class).find(|c| c.name == name).unwrap()
    }

    fn method<'a>(class: &'a EntityNode, name: &str) -> &'a EntityNode {
        class.children_of_kind(EntityKind::Method).find(|m| m.name == name).unwrap()
    }

    #[test]
    fn minimal_class_and_method() {
        let root = parse_compilation_unit("class A { void f() {} }").unwrap();
        assert!(root.is_compilation_unit());
        let a = class(&root, "A");
        assert_eq!(a.qualified_name, "A");
        let f = method(a, "f");
        assert_eq!(f.qualified_name, "A.f");
        assert_eq!(f.children_of_kind(EntityKind::Statement).count(), 0);
        assert_eq!(f.return_type_text(), "void");
    }

    #[test]
    fn method_with_two_statements() {
        let src = "class A { int f() { int x = 1; return x; } }";
        let root = parse_compilation_unit(src).unwrap();
        let f = method(class(&root, "A"), "f");
        let stmts: Vec<_> = f.children_of_kind(EntityKind::Statement).collect();
        assert_eq!(stmts.len(), 2);
        assert_eq!(stmts[0].text, "int x = 1 ;");
        assert_eq!(stmts[1].text, "return x ;");
    }

    #[test]
    fn annotations_and_modifiers_attach_to_methods() {
        let src = "class A { @Test public final int f(int a, String b) { return a; } }";
        let root = parse_compilation_unit(src).unwrap();
        let f = method(class(&root, "A"), "f");
        assert!(f.has_annotation("Test"));
        assert_eq!(f.modifier_names(), vec!["final", "public"]);
        assert_eq!(f.arity(), 2);
        assert_eq!(f.parameter_signature(), "int,String");
        let params: Vec<_> = f.children_of_kind(EntityKind::Parameter).collect();
        assert_eq!(params[0].name, "a");
        assert_eq!(params[1].name, "b");
    }

    #[test]
    fn qualified_annotations_keep_their_dotted_name() {
        let src = "class A { @org.junit.Test void f() {} }";
        let root = parse_compilation_unit(src).unwrap();
        let f = method(class(&root, "A"), "f");
        assert!(f.has_annotation("Test"));
        assert_eq!(f.children_of_kind(EntityKind::Annotation).next().unwrap().name, "org.junit.Test");
    }

    #[test]
    fn nested_classes_extend_qualified_names() {
        let src = "class Outer { class Inner { void f() {} } int x; }";
        let root = parse_compilation_unit(src).unwrap();
        let outer = class(&root, "Outer");
        let inner = outer.children_of_kind(EntityKind::Class).next().unwrap();
        assert_eq!(inner.qualified_name, "Outer.Inner");
        assert_eq!(method(inner, "f").qualified_name, "Outer.Inner.f");
        let field = outer.children_of_kind(EntityKind::Field).next().unwrap();
        assert_eq!(field.name, "x");
        assert_eq!(field.qualified_name, "Outer.x");
    }

    #[test]
    fn if_statements_carry_condition_and_else_part() {
        let src = r#"
            class A {
                void f(int x) {
                    if (x > 0) { a(); b(); } else { c(); }
                }
            }
        "#;
        let root = parse_compilation_unit(src).unwrap();
        let f = method(class(&root, "A"), "f");
        let stmt = f.children_of_kind(EntityKind::Statement).next().unwrap();
        assert_eq!(stmt.stmt_kind, Some(StatementKind::If));
        let cond = stmt.children_of_kind(EntityKind::Condition).next().unwrap();
        assert_eq!(cond.text, "x > 0");
        // Then-branch statements flattened onto the if node.
        assert_eq!(stmt.children_of_kind(EntityKind::Statement).count(), 2);
        let else_part = stmt.children_of_kind(EntityKind::ElsePart).next().unwrap();
        assert_eq!(else_part.children_of_kind(EntityKind::Statement).count(), 1);
    }

    #[test]
    fn loops_switches_and_try_blocks_parse() {
        let src = r#"
            class A {
                void f(int n) {
                    while (n > 0) { n--; }
                    for (int i = 0; i < n; i++) { g(i); }
                    do { n++; } while (n < 10);
                    switch (n) {
                        case 1: g(1); break;
                        default: g(2);
                    }
                    try (Reader r = open()) { read(r); }
                    catch (IOException e) { log(e); }
                    finally { close(); }
                    synchronized (this) { n = 0; }
                }
            }
        "#;
        let root = parse_compilation_unit(src).unwrap();
        let f = method(class(&root, "A"), "f");
        let stmts: Vec<_> = f.children_of_kind(EntityKind::Statement).collect();
        assert_eq!(stmts.len(), 6);
        assert_eq!(stmts[0].stmt_kind, Some(StatementKind::Loop));
        assert_eq!(stmts[1].stmt_kind, Some(StatementKind::Loop));
        assert_eq!(stmts[2].stmt_kind, Some(StatementKind::Loop));
        assert_eq!(stmts[3].stmt_kind, Some(StatementKind::Switch));
        assert_eq!(stmts[4].stmt_kind, Some(StatementKind::Try));
        assert!(stmts[4].text.contains("try"));
        // catch and finally clauses are children of the try.
        let clauses: Vec<_> = stmts[4].children_of_kind(EntityKind::Statement).collect();
        assert!(clauses.iter().any(|c| c.text.starts_with("catch")));
        assert!(clauses.iter().any(|c| c.text == "finally"));
        assert_eq!(stmts[5].stmt_kind, Some(StatementKind::Block));
    }

    #[test]
    fn interfaces_enums_and_records_are_classes() {
        let src = r#"
            interface Runner { void run(); default int twice(int x) { return x + x; } }
            enum Color { RED, GREEN(2), BLUE { int w() { return 1; } }; int f() { return 0; } }
            record Point(int x, int y) { int sum() { return x + y; } }
        "#;
        let root = parse_compilation_unit(src).unwrap();
        let runner = class(&root, "Runner");
        assert_eq!(method(runner, "run").children_of_kind(EntityKind::Statement).count(), 0);
        assert_eq!(method(runner, "twice").children_of_kind(EntityKind::Statement).count(), 1);
        let color = class(&root, "Color");
        let constants: Vec<_> = color.children_of_kind(EntityKind::Field).collect();
        assert_eq!(constants.len(), 3);
        assert_eq!(constants[0].name, "RED");
        assert!(constants[2].text.contains("{"));
        assert!(method(color, "f").qualified_name.ends_with("Color.f"));
        let point = class(&root, "Point");
        assert_eq!(method(point, "sum").arity(), 0);
    }

    #[test]
    fn statements_swallow_lambdas_and_anonymous_classes() {
        let src = r#"
            class A {
                void f() {
                    list.forEach(x -> { use(x); });
                    Runnable r = new Runnable() { public void run() { work(); } };
                }
            }
        "#;
        let root = parse_compilation_unit(src).unwrap();
        let f = method(class(&root, "A"), "f");
        let stmts: Vec<_> = f.children_of_kind(EntityKind::Statement).collect();
        assert_eq!(stmts.len(), 2);
        assert!(stmts[0].text.contains("->"));
        assert!(stmts[1].text.contains("run"));
    }

    #[test]
    fn multi_declarator_fields_split() {
        let src = "class A { int a = 1, b, c = f(x, y); Map<String, Integer> m; }";
        let root = parse_compilation_unit(src).unwrap();
        let a = class(&root, "A");
        let names: Vec<&str> =
            a.children_of_kind(EntityKind::Field).map(|f| f.name.as_str()).collect();
        assert_eq!(names, vec!["a", "b", "c", "m"]);
    }

    #[test]
    fn spans_cover_declarations() {
        let src = "class A {\n  void f() {\n    g();\n  }\n}\n";
        let root = parse_compilation_unit(src).unwrap();
        let a = class(&root, "A");
        assert_eq!(a.span, (1, 5));
        let f = method(a, "f");
        assert_eq!(f.span, (2, 4));
        fn check(node: &EntityNode) {
            for child in &node.children {
                assert!(child.span.0 >= node.span.0 && child.span.1 <= node.span.1,
                    "child {:?} outside parent {:?}", child.qualified_name, node.qualified_name);
                check(child);
            }
        }
        check(&root);
    }

    #[test]
    fn parse_is_pure() {
        let src = "class A { void f(int x) { if (x > 0) { g(); } } }";
        assert_eq!(parse_compilation_unit(src).unwrap(), parse_compilation_unit(src).unwrap());
    }

    #[test]
    fn invalid_source_reports_position() {
        let err = parse_compilation_unit("class A { void f() { int x = ; ").unwrap_err();
        assert!(err.line >= 1);
        assert!(!err.message.is_empty());
        let err = parse_compilation_unit("class \"oops\"").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn static_initializers_become_methods() {
        let src = "class A { static { setup(); } { tweak(); } }";
        let root = parse_compilation_unit(src).unwrap();
        let a = class(&root, "A");
        let methods: Vec<_> = a.children_of_kind(EntityKind::Method).collect();
        assert_eq!(methods.len(), 2);
        assert!(methods[0].name.starts_with("<init#"));
        assert_eq!(methods[0].modifier_names(), vec!["static"]);
    }

    #[test]
    fn generic_methods_and_varargs() {
        let src = "class A { <T extends Number> List<T> pick(Map<String, T> m, int... ks) { return null; } }";
        let root = parse_compilation_unit(src).unwrap();
        let pick = method(class(&root, "A"), "pick");
        assert_eq!(pick.return_type_text(), "List < T >");
        assert_eq!(pick.arity(), 2);
        let params: Vec<_> = pick.children_of_kind(EntityKind::Parameter).collect();
        assert_eq!(params[0].name, "m");
        assert_eq!(params[1].name, "ks");
        assert_eq!(params[1].text, "int ...");
    }
}
