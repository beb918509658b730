use super::parser::ParseError;

/// One lexical token. Comments and whitespace are dropped during lexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub text: String,
    pub line: u32,
    pub col: u32,
}

const MULTI_CHAR_OPS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "<<", ">>", "->", "::", "==", "!=", "<=", ">=", "&&",
    "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
];

pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        if c.is_whitespace() {
            advance!();
            continue;
        }
        // Comments.
        if c == '/' && i + 1 < chars.len() {
            if chars[i + 1] == '/' {
                while i < chars.len() && chars[i] != '\n' {
                    advance!();
                }
                continue;
            }
            if chars[i + 1] == '*' {
                advance!();
                advance!();
                let mut closed = false;
                while i < chars.len() {
                    if chars[i] == '*' && i + 1 < chars.len() && chars[i + 1] == '/' {
                        advance!();
                        advance!();
                        closed = true;
                        break;
                    }
                    advance!();
                }
                if !closed {
                    return Err(ParseError::new(tline, tcol, "unterminated block comment"));
                }
                continue;
            }
        }
        // Text block or string literal.
        if c == '"' {
            let is_block = i + 2 < chars.len() && chars[i + 1] == '"' && chars[i + 2] == '"';
            let mut text = String::new();
            if is_block {
                text.push_str("\"\"\"");
                advance!();
                advance!();
                advance!();
                let mut closed = false;
                while i < chars.len() {
                    if chars[i] == '"'
                        && i + 2 < chars.len()
                        && chars[i + 1] == '"'
                        && chars[i + 2] == '"'
                    {
                        text.push_str("\"\"\"");
                        advance!();
                        advance!();
                        advance!();
                        closed = true;
                        break;
                    }
                    text.push(chars[i]);
                    advance!();
                }
                if !closed {
                    return Err(ParseError::new(tline, tcol, "unterminated text block"));
                }
            } else {
                text.push('"');
                advance!();
                let mut closed = false;
                while i < chars.len() {
                    let ch = chars[i];
                    if ch == '\\' && i + 1 < chars.len() {
                        text.push(ch);
                        text.push(chars[i + 1]);
                        advance!();
                        advance!();
                        continue;
                    }
                    text.push(ch);
                    advance!();
                    if ch == '"' {
                        closed = true;
                        break;
                    }
                    if ch == '\n' {
                        return Err(ParseError::new(tline, tcol, "unterminated string literal"));
                    }
                }
                if !closed {
                    return Err(ParseError::new(tline, tcol, "unterminated string literal"));
                }
            }
            tokens.push(Token { text, line: tline, col: tcol });
            continue;
        }
        // Character literal.
        if c == '\'' {
            let mut text = String::from("'");
            advance!();
            let mut closed = false;
            while i < chars.len() {
                let ch = chars[i];
                if ch == '\\' && i + 1 < chars.len() {
                    text.push(ch);
                    text.push(chars[i + 1]);
                    advance!();
                    advance!();
                    continue;
                }
                text.push(ch);
                advance!();
                if ch == '\'' {
                    closed = true;
                    break;
                }
                if ch == '\n' {
                    break;
                }
            }
            if !closed {
                return Err(ParseError::new(tline, tcol, "unterminated character literal"));
            }
            tokens.push(Token { text, line: tline, col: tcol });
            continue;
        }
        // Identifier or keyword.
        if c.is_alphabetic() || c == '_' || c == '$' {
            let mut text = String::new();
            while i < chars.len() {
                let ch = chars[i];
                if ch.is_alphanumeric() || ch == '_' || ch == '$' {
                    text.push(ch);
                    advance!();
                } else {
                    break;
                }
            }
            tokens.push(Token { text, line: tline, col: tcol });
            continue;
        }
        // Number literal (greedy; exactness of numeric grammar is irrelevant
        // to structural parsing).
        if c.is_ascii_digit() {
            let mut text = String::new();
            while i < chars.len() {
                let ch = chars[i];
                let prev = text.chars().last().unwrap_or('0');
                let is_exp_sign = (ch == '+' || ch == '-')
                    && matches!(prev, 'e' | 'E' | 'p' | 'P');
                if ch.is_ascii_alphanumeric() || ch == '_' || is_exp_sign {
                    text.push(ch);
                    advance!();
                } else if ch == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    text.push(ch);
                    advance!();
                } else {
                    break;
                }
            }
            tokens.push(Token { text, line: tline, col: tcol });
            continue;
        }
        // Operators and punctuation.
        let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
        let mut matched = None;
        for op in MULTI_CHAR_OPS {
            if rest.starts_with(op) {
                matched = Some(*op);
                break;
            }
        }
        if let Some(op) = matched {
            for _ in 0..op.len() {
                advance!();
            }
            tokens.push(Token { text: op.to_string(), line: tline, col: tcol });
        } else {
            let mut text = String::new();
            text.push(c);
            advance!();
            tokens.push(Token { text, line: tline, col: tcol });
        }
    }
    Ok(tokens)
}
