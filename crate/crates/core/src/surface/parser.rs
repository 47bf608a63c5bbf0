//! Recursive-descent parser for `.tel` files.
//!
//! Declarations need no terminator: each one ends where the next
//! declaration keyword begins, which is also where recovery resumes.

use super::ast::{Binder, Decl, DeclKind, Expr, ExprKind, Op, ParseError, Span};
use super::lexer::{tokenize, Kw, Tok, Token};
use crate::kernel::ErrorClass;

type PResult<T> = Result<T, ParseError>;

/// Parses a whole file, collecting every error instead of stopping at the first.
pub fn parse_file(src: &str) -> (Vec<Decl>, Vec<ParseError>) {
    let (tokens, lex_errors) = tokenize(src);
    let mut errors: Vec<ParseError> = lex_errors
        .into_iter()
        .map(|e| ParseError {
            class: ErrorClass::IllegalCharacter,
            message: e.message,
            span: e.span,
            expected: vec![],
        })
        .collect();
    let mut p = Parser::new(tokens, src.len());
    let mut decls = Vec::new();
    while !p.at_end() {
        let start = p.pos;
        match p.declaration() {
            Ok(ds) => {
                if p.at_end() || p.at_declaration() {
                    decls.extend(ds);
                } else {
                    errors.push(p.error_here(&["a declaration keyword"]));
                    p.recover(start);
                }
            }
            Err(e) => {
                errors.push(e);
                p.recover(start);
            }
        }
    }
    errors.sort_by_key(|e| e.span.start);
    (decls, errors)
}

/// Parses a single expression spanning the whole input.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let (tokens, lex_errors) = tokenize(src);
    if let Some(e) = lex_errors.into_iter().next() {
        return Err(ParseError {
            class: ErrorClass::IllegalCharacter,
            message: e.message,
            span: e.span,
            expected: vec![],
        });
    }
    let mut p = Parser::new(tokens, src.len());
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.error_here(&["end of input"]));
    }
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: Span,
}

impl Parser {
    fn new(toks: Vec<Token>, len: usize) -> Self {
        let eof = match toks.last() {
            Some(t) => Span {
                start: len,
                end: len,
                line: t.span.line,
                col: t.span.col + (t.span.end - t.span.start) as u32,
            },
            None => Span {
                start: len,
                end: len,
                line: 1,
                col: 1,
            },
        };
        Parser { toks, pos: 0, eof }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn span(&self) -> Span {
        self.toks.get(self.pos).map(|t| t.span).unwrap_or(self.eof)
    }

    fn prev_span(&self) -> Span {
        self.pos
            .checked_sub(1)
            .and_then(|i| self.toks.get(i))
            .map(|t| t.span)
            .unwrap_or(self.eof)
    }

    fn at_declaration(&self) -> bool {
        matches!(self.peek(), Some(Tok::Kw(k)) if k.starts_declaration())
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_here(&self, expected: &[&str]) -> ParseError {
        let found = self
            .peek()
            .map(|t| t.to_string())
            .unwrap_or_else(|| "end of input".into());
        ParseError {
            class: ErrorClass::ParseError,
            message: format!("expected {}, found {found}", expected.join(" or ")),
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    /// Skips to the next declaration keyword, always making progress.
    fn recover(&mut self, start: usize) {
        if self.pos <= start {
            self.pos = start + 1;
        }
        while !self.at_end() && !self.at_declaration() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<Span> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().expect("peeked").span)
        } else {
            Err(self.error_here(&[what]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error_here(&["an identifier"])),
        }
    }

    /// A declared name: an identifier, or `⊕`.
    fn decl_name(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Oplus) => {
                self.bump();
                Ok("⊕".into())
            }
            _ => self.ident(),
        }
    }

    fn binder_name(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Hole) => {
                self.bump();
                Ok("_".into())
            }
            _ => self.ident(),
        }
    }

    fn declaration(&mut self) -> PResult<Vec<Decl>> {
        let start = self.span();
        let kw = match self.peek() {
            Some(Tok::Kw(k)) if k.starts_declaration() => *k,
            _ => return Err(self.error_here(&["a declaration keyword"])),
        };
        self.bump();
        let finish = |p: &Parser, kind| Decl {
            kind,
            span: start.to(p.prev_span()),
        };
        match kw {
            Kw::Postulate => {
                let mut names = vec![self.decl_name()?];
                while matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Oplus)) {
                    names.push(self.decl_name()?);
                }
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.expr()?;
                Ok(names
                    .into_iter()
                    .map(|name| {
                        finish(
                            self,
                            DeclKind::Postulate {
                                name,
                                ty: ty.clone(),
                            },
                        )
                    })
                    .collect())
            }
            Kw::Primitive => {
                let name = self.decl_name()?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.expr()?;
                Ok(vec![finish(self, DeclKind::Primitive { name, ty })])
            }
            Kw::Def => {
                let name = self.decl_name()?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.expr()?;
                self.expect(Tok::Equals, "`=`")?;
                let body = self.expr()?;
                Ok(vec![finish(self, DeclKind::Def { name, ty, body })])
            }
            Kw::Rewrite => {
                let mut telescope = Vec::new();
                while matches!(self.peek(), Some(Tok::LParen) | Some(Tok::LBrace)) {
                    telescope.push(self.binder_group()?);
                }
                self.expect(Tok::Colon, "`:`")?;
                let lhs = self.expr()?;
                self.expect(Tok::Equals, "`=`")?;
                let rhs = self.expr()?;
                Ok(vec![finish(
                    self,
                    DeclKind::Rewrite {
                        telescope,
                        lhs,
                        rhs,
                    },
                )])
            }
            Kw::Check => {
                let expr = self.expr()?;
                self.expect(Tok::Colon, "`:`")?;
                let ty = self.expr()?;
                Ok(vec![finish(self, DeclKind::Check { expr, ty })])
            }
            Kw::Fail => {
                let class_span = self.span();
                let class_name = self.ident()?;
                let class: ErrorClass = class_name.parse().map_err(|message| ParseError {
                    class: ErrorClass::ParseError,
                    message,
                    span: class_span,
                    expected: vec!["an error class".into()],
                })?;
                if self.peek() == Some(&Tok::Kw(Kw::Check)) {
                    self.bump();
                    let expr = self.expr()?;
                    self.expect(Tok::Colon, "`:`")?;
                    let ty = self.expr()?;
                    return Ok(vec![finish(self, DeclKind::FailCheck { class, expr, ty })]);
                }
                let inner = self.declaration()?;
                Ok(inner
                    .into_iter()
                    .map(|d| {
                        finish(
                            self,
                            DeclKind::Reject {
                                class,
                                decl: Box::new(d),
                            },
                        )
                    })
                    .collect())
            }
            Kw::Entail => {
                let name = self.decl_name()?;
                self.expect(Tok::Colon, "`:`")?;
                let hyp = self.expr()?;
                self.expect(Tok::FatArrow, "`=>`")?;
                let concl = self.expr()?;
                self.expect(Tok::Equals, "`=`")?;
                let witness = self.expr()?;
                Ok(vec![finish(
                    self,
                    DeclKind::Entail {
                        name,
                        hyp,
                        concl,
                        witness,
                    },
                )])
            }
            Kw::Norm => {
                let expr = self.expr()?;
                self.expect(Tok::Equals, "`=`")?;
                let expected = self.expr()?;
                Ok(vec![finish(self, DeclKind::Norm { expr, expected })])
            }
            Kw::Import => match self.peek() {
                Some(Tok::Str(s)) => {
                    let path = s.clone();
                    self.bump();
                    Ok(vec![finish(self, DeclKind::Import { path })])
                }
                _ => Err(self.error_here(&["a quoted path"])),
            },
            _ => unreachable!("guarded by starts_declaration"),
        }
    }

    /// `(x y : A)` or `{x : A}`.
    fn binder_group(&mut self) -> PResult<Binder> {
        let implicit = self.peek() == Some(&Tok::LBrace);
        self.bump();
        let mut names = vec![self.binder_name()?];
        while matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Hole)) {
            names.push(self.binder_name()?);
        }
        self.expect(Tok::Colon, "`:`")?;
        let ty = self.expr()?;
        if implicit {
            self.expect(Tok::RBrace, "`}`")?;
        } else {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(Binder {
            names,
            ty,
            implicit,
        })
    }

    fn binder_ahead(&self) -> bool {
        if !matches!(self.peek(), Some(Tok::LParen) | Some(Tok::LBrace)) {
            return false;
        }
        let mut k = 1;
        while matches!(self.peek_at(k), Some(Tok::Ident(_)) | Some(Tok::Hole)) {
            k += 1;
        }
        k > 1 && self.peek_at(k) == Some(&Tok::Colon)
    }

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Some(Tok::Lambda) => {
                self.bump();
                let mut names = vec![self.binder_name()?];
                while matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::Hole)) {
                    names.push(self.binder_name()?);
                }
                self.expect(Tok::Dot, "`.`")?;
                let body = self.expr()?;
                Ok(Expr {
                    span: start.to(body.span),
                    kind: ExprKind::Lam(names, Box::new(body)),
                })
            }
            Some(Tok::Sigma) => {
                self.bump();
                self.expect(Tok::LParen, "`(`")?;
                let name = self.binder_name()?;
                self.expect(Tok::Colon, "`:`")?;
                let dom = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                if self.peek() == Some(&Tok::Dot) {
                    self.bump();
                }
                let body = self.expr()?;
                Ok(Expr {
                    span: start.to(body.span),
                    kind: ExprKind::Sigma(name, Box::new(dom), Box::new(body)),
                })
            }
            _ if self.binder_ahead() => {
                let mut groups = Vec::new();
                while self.binder_ahead() {
                    groups.push(self.binder_group()?);
                }
                self.expect(Tok::Arrow, "`->`")?;
                let body = self.expr()?;
                Ok(Expr {
                    span: start.to(body.span),
                    kind: ExprKind::Pi(groups, Box::new(body)),
                })
            }
            _ => {
                let lhs = self.op_expr()?;
                if self.peek() == Some(&Tok::Arrow) {
                    self.bump();
                    let rhs = self.expr()?;
                    Ok(Expr {
                        span: start.to(rhs.span),
                        kind: ExprKind::Arrow(Box::new(lhs), Box::new(rhs)),
                    })
                } else {
                    Ok(lhs)
                }
            }
        }
    }

    fn op_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.app_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Oplus) => Op::Oplus,
                Some(Tok::Plus) => Op::Plus,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.app_expr()?;
            lhs = Expr {
                span: lhs.span.to(rhs.span),
                kind: ExprKind::Infix(op, Box::new(lhs), Box::new(rhs)),
            };
        }
    }

    fn atom_start(&self) -> bool {
        matches!(
            self.peek(),
            Some(
                Tok::Ident(_)
                    | Tok::Hole
                    | Tok::Nat(_)
                    | Tok::LParen
                    | Tok::Kw(Kw::Type)
                    | Tok::Kw(Kw::Type1)
            )
        )
    }

    fn app_expr(&mut self) -> PResult<Expr> {
        let mut head = self.head_expr()?;
        loop {
            if self.peek() == Some(&Tok::LBrace) {
                self.bump();
                let arg = self.expr()?;
                let close = self.expect(Tok::RBrace, "`}`")?;
                head = Expr {
                    span: head.span.to(close),
                    kind: ExprKind::App(Box::new(head), Box::new(arg), true),
                };
            } else if self.atom_start() {
                let arg = self.atom()?;
                head = Expr {
                    span: head.span.to(arg.span),
                    kind: ExprKind::App(Box::new(head), Box::new(arg), false),
                };
            } else {
                return Ok(head);
            }
        }
    }

    fn head_expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        match self.peek() {
            Some(Tok::Kw(k @ (Kw::Fst | Kw::Snd))) => {
                let first = *k == Kw::Fst;
                self.bump();
                let project = |e: Expr| {
                    if first {
                        ExprKind::Fst(Box::new(e))
                    } else {
                        ExprKind::Snd(Box::new(e))
                    }
                };
                if self.atom_start() {
                    let arg = self.atom()?;
                    Ok(Expr {
                        span: start.to(arg.span),
                        kind: project(arg),
                    })
                } else {
                    // A bare projection stands for its eta-expansion.
                    let var = Expr {
                        kind: ExprKind::Ident("p".into()),
                        span: start,
                    };
                    let body = Expr {
                        kind: project(var),
                        span: start,
                    };
                    Ok(Expr {
                        kind: ExprKind::Lam(vec!["p".into()], Box::new(body)),
                        span: start,
                    })
                }
            }
            Some(Tok::Kw(Kw::Pair)) => {
                self.bump();
                let a = self.atom()?;
                let b = self.atom()?;
                Ok(Expr {
                    span: start.to(b.span),
                    kind: ExprKind::Pair(Box::new(a), Box::new(b)),
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span();
        let kind = match self.peek() {
            Some(Tok::Ident(s)) => ExprKind::Ident(s.clone()),
            Some(Tok::Hole) => ExprKind::Hole,
            Some(Tok::Nat(n)) => ExprKind::Nat(*n),
            Some(Tok::Kw(Kw::Type)) => ExprKind::Universe(0),
            Some(Tok::Kw(Kw::Type1)) => ExprKind::Universe(1),
            Some(Tok::LParen) => return self.paren(),
            _ => return Err(self.error_here(&["an expression"])),
        };
        self.bump();
        Ok(Expr { kind, span: start })
    }

    /// Parenthesised expression, right-nested tuple, or `(⊕)`.
    fn paren(&mut self) -> PResult<Expr> {
        let open = self.expect(Tok::LParen, "`(`")?;
        if self.peek() == Some(&Tok::Oplus) && self.peek_at(1) == Some(&Tok::RParen) {
            self.bump();
            let close = self.bump().expect("peeked").span;
            return Ok(Expr {
                kind: ExprKind::Ident("⊕".into()),
                span: open.to(close),
            });
        }
        let mut items = vec![self.expr()?];
        while self.peek() == Some(&Tok::Comma) {
            self.bump();
            items.push(self.expr()?);
        }
        let close = self.expect(
            Tok::RParen,
            if items.len() == 1 {
                "`)` or `,`"
            } else {
                "`)`"
            },
        )?;
        let mut it = items.into_iter().rev();
        let mut acc = it.next().expect("at least one item");
        for e in it {
            acc = Expr {
                span: e.span.to(acc.span),
                kind: ExprKind::Pair(Box::new(e), Box::new(acc)),
            };
        }
        acc.span = open.to(close);
        Ok(acc)
    }
}
