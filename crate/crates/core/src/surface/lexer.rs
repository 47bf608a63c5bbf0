use std::fmt;

use super::ast::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    Str(String),
    Kw(Kw),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Dot,
    Arrow,
    FatArrow,
    Equals,
    Lambda,
    Sigma,
    Hole,
    /// `⊕`, or its ASCII spelling `(+)`.
    Oplus,
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Primitive,
    Postulate,
    Def,
    Rewrite,
    Check,
    Fail,
    Entail,
    Norm,
    Import,
    Type,
    Type1,
    Fst,
    Snd,
    Pair,
}

impl Kw {
    const TABLE: [(&'static str, Kw); 14] = [
        ("primitive", Kw::Primitive),
        ("postulate", Kw::Postulate),
        ("def", Kw::Def),
        ("rewrite", Kw::Rewrite),
        ("check", Kw::Check),
        ("fail", Kw::Fail),
        ("entail", Kw::Entail),
        ("norm", Kw::Norm),
        ("import", Kw::Import),
        ("Type", Kw::Type),
        ("Type1", Kw::Type1),
        ("fst", Kw::Fst),
        ("snd", Kw::Snd),
        ("pair", Kw::Pair),
    ];

    pub fn text(self) -> &'static str {
        Kw::TABLE
            .iter()
            .find(|(_, k)| *k == self)
            .map(|(s, _)| *s)
            .unwrap_or("?")
    }

    /// Keywords that begin a top-level declaration.
    pub fn starts_declaration(self) -> bool {
        matches!(
            self,
            Kw::Primitive
                | Kw::Postulate
                | Kw::Def
                | Kw::Rewrite
                | Kw::Check
                | Kw::Fail
                | Kw::Entail
                | Kw::Norm
                | Kw::Import
        )
    }
}

pub fn is_reserved(word: &str) -> bool {
    word == "Sigma" || Kw::TABLE.iter().any(|(s, _)| *s == word)
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Nat(n) => write!(f, "number {n}"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Kw(k) => write!(f, "`{}`", k.text()),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::Lambda => f.write_str("`\\`"),
            Tok::Sigma => f.write_str("`Σ`"),
            Tok::Hole => f.write_str("`_`"),
            Tok::Oplus => f.write_str("`⊕`"),
            Tok::Plus => f.write_str("`+`"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub message: String,
    pub span: Span,
}

fn ident_start(c: char) -> bool {
    (c.is_alphabetic() && c != 'λ') || c == '_'
}

fn ident_continue(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '′' | '^' | '⋆')
}

struct Cursor<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    line: u32,
    col: u32,
    src: &'a str,
}

impl Cursor<'_> {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).map(|(_, c)| *c)
    }

    fn offset(&self) -> usize {
        self.chars
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span_from(&self, start: usize, line: u32, col: u32) -> Span {
        Span {
            start,
            end: self.offset(),
            line,
            col,
        }
    }
}

/// Splits source text into tokens. Illegal characters are reported and
/// skipped so that later declarations still parse.
pub fn tokenize(src: &str) -> (Vec<Token>, Vec<LexError>) {
    let mut cur = Cursor {
        chars: src.char_indices().collect(),
        pos: 0,
        line: 1,
        col: 1,
        src,
    };
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    while let Some(c) = cur.peek(0) {
        let (start, line, col) = (cur.offset(), cur.line, cur.col);
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '-' && cur.peek(1) == Some('-') {
            while cur.peek(0).is_some_and(|c| c != '\n') {
                cur.bump();
            }
            continue;
        }
        let tok = if c == '(' && cur.peek(1) == Some('+') && cur.peek(2) == Some(')') {
            (0..3).for_each(|_| {
                cur.bump();
            });
            Tok::Oplus
        } else if c == '-' && cur.peek(1) == Some('>') || c == '=' && cur.peek(1) == Some('>') {
            cur.bump();
            cur.bump();
            if c == '-' {
                Tok::Arrow
            } else {
                Tok::FatArrow
            }
        } else if c.is_ascii_digit() {
            let mut n: u64 = 0;
            let mut overflow = false;
            while let Some(d) = cur.peek(0).and_then(|c| c.to_digit(10)) {
                cur.bump();
                match n.checked_mul(10).and_then(|n| n.checked_add(d as u64)) {
                    Some(v) => n = v,
                    None => overflow = true,
                }
            }
            if overflow {
                errors.push(LexError {
                    message: "numeric literal too large".into(),
                    span: cur.span_from(start, line, col),
                });
                continue;
            }
            Tok::Nat(n)
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            loop {
                match cur.bump() {
                    Some('"') => break,
                    Some('\n') | None => {
                        errors.push(LexError {
                            message: "unterminated string literal".into(),
                            span: cur.span_from(start, line, col),
                        });
                        break;
                    }
                    Some(ch) => s.push(ch),
                }
            }
            Tok::Str(s)
        } else if (c == 'Σ' || c == '⊕') && !cur.peek(1).is_some_and(ident_continue) {
            cur.bump();
            if c == 'Σ' {
                Tok::Sigma
            } else {
                Tok::Oplus
            }
        } else if ident_start(c) || c == 'Σ' || c == '⊕' {
            let mut word = String::new();
            while let Some(ch) = cur
                .peek(0)
                .filter(|ch| ident_continue(*ch) || word.is_empty())
            {
                word.push(ch);
                cur.bump();
            }
            match word.as_str() {
                "_" => Tok::Hole,
                "Sigma" => Tok::Sigma,
                w => match Kw::TABLE.iter().find(|(s, _)| *s == w) {
                    Some((_, k)) => Tok::Kw(*k),
                    None => Tok::Ident(word),
                },
            }
        } else {
            cur.bump();
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '=' => Tok::Equals,
                '\\' | 'λ' => Tok::Lambda,
                '→' => Tok::Arrow,
                '⇒' => Tok::FatArrow,
                '+' => Tok::Plus,
                other => {
                    errors.push(LexError {
                        message: format!("illegal character {other:?}"),
                        span: cur.span_from(start, line, col),
                    });
                    continue;
                }
            }
        };
        tokens.push(Token {
            tok,
            span: cur.span_from(start, line, col),
        });
    }
    (tokens, errors)
}
