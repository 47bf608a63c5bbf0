use serde::Serialize;

use crate::kernel::ErrorClass;

/// Byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn to(self, other: Span) -> Span {
        Span {
            start: self.start,
            end: other.end.max(self.end),
            line: self.line,
            col: self.col,
        }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Oplus,
    Plus,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Ident(String),
    Hole,
    Nat(u64),
    Universe(u8),
    /// The flag marks a `{...}` argument.
    App(Box<Expr>, Box<Expr>, bool),
    Lam(Vec<String>, Box<Expr>),
    Pi(Vec<Binder>, Box<Expr>),
    Arrow(Box<Expr>, Box<Expr>),
    Sigma(String, Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    Infix(Op, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Binder {
    pub names: Vec<String>,
    pub ty: Expr,
    pub implicit: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decl {
    pub kind: DeclKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DeclKind {
    Primitive {
        name: String,
        ty: Expr,
    },
    Postulate {
        name: String,
        ty: Expr,
    },
    Def {
        name: String,
        ty: Expr,
        body: Expr,
    },
    Rewrite {
        telescope: Vec<Binder>,
        lhs: Expr,
        rhs: Expr,
    },
    Check {
        expr: Expr,
        ty: Expr,
    },
    /// `fail Class check e : T`.
    FailCheck {
        class: ErrorClass,
        expr: Expr,
        ty: Expr,
    },
    /// `fail Class <declaration>`: the declaration must be rejected.
    Reject {
        class: ErrorClass,
        decl: Box<Decl>,
    },
    /// `entail name : H => C = witness`, sugar for a definition at `H -> C`.
    Entail {
        name: String,
        hyp: Expr,
        concl: Expr,
        witness: Expr,
    },
    Norm {
        expr: Expr,
        expected: Expr,
    },
    Import {
        path: String,
    },
}

impl DeclKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            DeclKind::Primitive { .. } => "primitive",
            DeclKind::Postulate { .. } => "postulate",
            DeclKind::Def { .. } => "def",
            DeclKind::Rewrite { .. } => "rewrite",
            DeclKind::Check { .. } => "check",
            DeclKind::FailCheck { .. } | DeclKind::Reject { .. } => "fail",
            DeclKind::Entail { .. } => "entail",
            DeclKind::Norm { .. } => "norm",
            DeclKind::Import { .. } => "import",
        }
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            DeclKind::Primitive { name, .. }
            | DeclKind::Postulate { name, .. }
            | DeclKind::Def { name, .. }
            | DeclKind::Entail { name, .. } => Some(name),
            DeclKind::Reject { decl, .. } => decl.kind.name(),
            _ => None,
        }
    }
}

/// A parse or lex failure with the tokens that would have been accepted.
#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub class: ErrorClass,
    pub message: String,
    pub span: Span,
    pub expected: Vec<String>,
}
