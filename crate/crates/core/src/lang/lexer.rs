use num_bigint::BigInt;

use super::{LangError, Span};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits `src` into tokens. Whitespace (including newlines) separates tokens.
pub fn tokenize(src: &str) -> Result<Vec<Token>, LangError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, ch) = chars[i];
        let start = Span {
            start: pos,
            end: pos + ch.len_utf8(),
            line,
            col,
        };
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let simple = match ch {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, span: start });
            col += 1;
            i += 1;
            continue;
        }
        if ch.is_ascii_digit() || ch.is_ascii_alphabetic() || ch == '_' {
            let digits = ch.is_ascii_digit();
            let mut j = i;
            while j < chars.len() {
                let c = chars[j].1;
                let ok = if digits {
                    c.is_ascii_digit()
                } else {
                    c.is_ascii_alphanumeric() || c == '_'
                };
                if !ok {
                    break;
                }
                j += 1;
            }
            let end = chars.get(j).map(|c| c.0).unwrap_or(src.len());
            let text = &src[pos..end];
            let tok = if digits {
                Tok::Int(text.parse().expect("ascii digits"))
            } else {
                Tok::Ident(text.to_string())
            };
            out.push(Token {
                tok,
                span: Span { end, ..start },
            });
            col += j - i;
            i = j;
            continue;
        }
        return Err(LangError::syntax(start, format!("unexpected character {ch:?}")));
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span {
            start: src.len(),
            end: src.len(),
            line,
            col,
        },
    });
    Ok(out)
}
