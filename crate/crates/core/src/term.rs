//! Core terms in de Bruijn form.
//!
//! Constants carry their argument spine directly; `Term::app` keeps that
//! shape when a substitution turns an application head into a constant.

use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;
pub type MetaId = usize;

#[derive(Clone, Debug)]
pub enum Term {
    Var(usize),
    Const(Name, Vec<Term>),
    /// `Universe(0)` is `Type`, `Universe(1)` is `Type1`.
    Universe(u8),
    /// Binder name hints are ignored by equality.
    Pi(Name, Box<Term>, Box<Term>),
    Lam(Name, Box<Term>),
    App(Box<Term>, Box<Term>),
    Sigma(Name, Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    Nat(u64),
    Meta(MetaId, Vec<Term>),
}

impl Term {
    pub fn constant(name: &str) -> Term {
        Term::Const(name.into(), Vec::new())
    }

    pub fn apply_const(name: &str, args: Vec<Term>) -> Term {
        Term::Const(name.into(), args)
    }

    /// Application that folds arguments into a constant's spine.
    pub fn app(f: Term, a: Term) -> Term {
        match f {
            Term::Const(c, mut args) => {
                args.push(a);
                Term::Const(c, args)
            }
            f => Term::App(Box::new(f), Box::new(a)),
        }
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn pi(hint: &str, dom: Term, cod: Term) -> Term {
        Term::Pi(hint.into(), Box::new(dom), Box::new(cod))
    }

    /// Non-dependent function type; `cod` lives in the outer scope.
    pub fn arrow(dom: Term, cod: Term) -> Term {
        Term::Pi("_".into(), Box::new(dom), Box::new(shift(&cod, 1, 0)))
    }

    pub fn sigma(hint: &str, dom: Term, cod: Term) -> Term {
        Term::Sigma(hint.into(), Box::new(dom), Box::new(cod))
    }

    pub fn lam(hint: &str, body: Term) -> Term {
        Term::Lam(hint.into(), Box::new(body))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn fst(p: Term) -> Term {
        Term::Fst(Box::new(p))
    }

    pub fn snd(p: Term) -> Term {
        Term::Snd(Box::new(p))
    }

    pub fn has_metas(&self) -> bool {
        let mut found = false;
        self.visit(&mut |t| found |= matches!(t, Term::Meta(..)));
        found
    }

    /// Every constant name mentioned anywhere in the term.
    pub fn constants(&self, out: &mut Vec<Name>) {
        self.visit(&mut |t| {
            if let Term::Const(c, _) = t {
                out.push(c.clone());
            }
        });
    }

    /// Pre-order traversal over all subterms.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Universe(_) | Term::Nat(_) => {}
            Term::Const(_, args) | Term::Meta(_, args) => args.iter().for_each(|a| a.visit(f)),
            Term::Pi(_, a, b) | Term::Sigma(_, a, b) | Term::App(a, b) | Term::Pair(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Term::Lam(_, b) | Term::Fst(b) | Term::Snd(b) => b.visit(f),
        }
    }

    /// Whether `Var(index)` occurs free.
    pub fn mentions_var(&self, index: usize) -> bool {
        fn go(t: &Term, k: usize) -> bool {
            match t {
                Term::Var(i) => *i == k,
                Term::Universe(_) | Term::Nat(_) => false,
                Term::Const(_, args) | Term::Meta(_, args) => args.iter().any(|a| go(a, k)),
                Term::Pi(_, a, b) | Term::Sigma(_, a, b) => go(a, k) || go(b, k + 1),
                Term::App(a, b) | Term::Pair(a, b) => go(a, k) || go(b, k),
                Term::Lam(_, b) => go(b, k + 1),
                Term::Fst(b) | Term::Snd(b) => go(b, k),
            }
        }
        go(self, index)
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

/// Rebuilds a term, mapping each variable through `f(depth, index)`.
fn map_vars(t: &Term, depth: usize, f: &impl Fn(usize, usize) -> Term) -> Term {
    match t {
        Term::Var(i) => f(depth, *i),
        Term::Const(c, args) => Term::Const(
            c.clone(),
            args.iter().map(|a| map_vars(a, depth, f)).collect(),
        ),
        Term::Meta(m, args) => Term::Meta(*m, args.iter().map(|a| map_vars(a, depth, f)).collect()),
        Term::Universe(_) | Term::Nat(_) => t.clone(),
        Term::Pi(x, a, b) => Term::Pi(
            x.clone(),
            Box::new(map_vars(a, depth, f)),
            Box::new(map_vars(b, depth + 1, f)),
        ),
        Term::Sigma(x, a, b) => Term::Sigma(
            x.clone(),
            Box::new(map_vars(a, depth, f)),
            Box::new(map_vars(b, depth + 1, f)),
        ),
        Term::Lam(x, b) => Term::Lam(x.clone(), Box::new(map_vars(b, depth + 1, f))),
        Term::App(a, b) => Term::app(map_vars(a, depth, f), map_vars(b, depth, f)),
        Term::Pair(a, b) => Term::pair(map_vars(a, depth, f), map_vars(b, depth, f)),
        Term::Fst(p) => Term::fst(map_vars(p, depth, f)),
        Term::Snd(p) => Term::snd(map_vars(p, depth, f)),
    }
}

/// Adds `by` to every free index at or above `cutoff`.
///
/// Panics if a negative shift would push a free index below zero.
pub fn shift(t: &Term, by: isize, cutoff: usize) -> Term {
    if by == 0 {
        return t.clone();
    }
    map_vars(t, 0, &|depth, i| {
        if i >= cutoff + depth {
            let j = i as isize + by;
            assert!(j >= 0, "shift drove variable {i} below zero");
            Term::Var(j as usize)
        } else {
            Term::Var(i)
        }
    })
}

/// Replaces `Var(index)` with `replacement` and closes the gap left behind.
pub fn subst(t: &Term, replacement: &Term, index: usize) -> Term {
    map_vars(t, 0, &|depth, i| {
        let target = index + depth;
        if i == target {
            shift(replacement, depth as isize, 0)
        } else if i > target {
            Term::Var(i - 1)
        } else {
            Term::Var(i)
        }
    })
}

/// Simultaneous substitution of the innermost `args.len()` variables.
///
/// `args[0]` replaces the outermost of them, so a telescope's values can be
/// passed in declaration order.
pub fn subst_many(t: &Term, args: &[Term]) -> Term {
    let n = args.len();
    if n == 0 {
        return t.clone();
    }
    map_vars(t, 0, &|depth, i| {
        if i < depth {
            Term::Var(i)
        } else if i - depth < n {
            shift(&args[n - 1 - (i - depth)], depth as isize, 0)
        } else {
            Term::Var(i - n)
        }
    })
}

/// Structural equality up to binder names.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a == b
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        use Term::*;
        match (self, other) {
            (Var(i), Var(j)) => i == j,
            (Const(c, xs), Const(d, ys)) => c == d && xs == ys,
            (Meta(m, xs), Meta(n, ys)) => m == n && xs == ys,
            (Universe(i), Universe(j)) => i == j,
            (Nat(m), Nat(n)) => m == n,
            (Pi(_, a, b), Pi(_, c, d)) | (Sigma(_, a, b), Sigma(_, c, d)) => a == c && b == d,
            (App(a, b), App(c, d)) | (Pair(a, b), Pair(c, d)) => a == c && b == d,
            (Lam(_, a), Lam(_, b)) | (Fst(a), Fst(b)) | (Snd(a), Snd(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

/// Raw debug rendering with de Bruijn indices; user-facing output goes
/// through `print`.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "#{i}"),
            Term::Const(c, args) if args.is_empty() => write!(f, "{c}"),
            Term::Const(c, args) => {
                write!(f, "({c}")?;
                args.iter().try_for_each(|a| write!(f, " {a}"))?;
                write!(f, ")")
            }
            Term::Meta(m, args) => {
                write!(f, "(?{m}")?;
                args.iter().try_for_each(|a| write!(f, " {a}"))?;
                write!(f, ")")
            }
            Term::Universe(0) => write!(f, "Type"),
            Term::Universe(l) => write!(f, "Type{l}"),
            Term::Pi(_, a, b) => write!(f, "(Π {a}. {b})"),
            Term::Sigma(_, a, b) => write!(f, "(Σ {a}. {b})"),
            Term::Lam(_, b) => write!(f, "(λ {b})"),
            Term::App(a, b) => write!(f, "({a} {b})"),
            Term::Pair(a, b) => write!(f, "({a}, {b})"),
            Term::Fst(p) => write!(f, "(fst {p})"),
            Term::Snd(p) => write!(f, "(snd {p})"),
            Term::Nat(n) => write!(f, "{n}"),
        }
    }
}

/// A typing context; entry types are stored relative to the entries before them.
#[derive(Clone, Debug, Default)]
pub struct Context {
    entries: Vec<(Name, Term)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn push(&mut self, name: Name, ty: Term) {
        self.entries.push((name, ty));
    }

    pub fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn extended(&self, name: Name, ty: Term) -> Context {
        let mut c = self.clone();
        c.push(name, ty);
        c
    }

    /// Type of `Var(index)`, shifted into the full context.
    pub fn lookup(&self, index: usize) -> Option<Term> {
        let n = self.entries.len();
        (index < n).then(|| shift(&self.entries[n - 1 - index].1, index as isize + 1, 0))
    }

    /// Binder names, outermost first.
    pub fn names(&self) -> Vec<Name> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }

    pub fn entries(&self) -> &[(Name, Term)] {
        &self.entries
    }

    /// Variables of this context as a spine, outermost first.
    pub fn spine(&self) -> Vec<Term> {
        (0..self.len()).rev().map(Term::Var).collect()
    }
}
