use super::{Constraint, KResult, KernelError, Tc};
use crate::term::{shift, Context, MetaId, Term};

impl Tc<'_> {
    /// Definitional equality, solving metas by first-order pattern
    /// unification. Problems blocked on an unsolved meta are postponed and
    /// reported as solved for now.
    pub fn conv(&mut self, a: &Term, b: &Term) -> KResult<bool> {
        if a == b {
            return Ok(true);
        }
        let a = self.whnf(a)?;
        let b = self.whnf(b)?;
        if a == b {
            return Ok(true);
        }
        use Term::*;
        let same = match (&a, &b) {
            (Meta(m, sp), Meta(n, sq)) if m == n && sp.len() == sq.len() => {
                if self.conv_all(sp, sq)? {
                    return Ok(true);
                }
                return self.postpone(&a, &b);
            }
            (Meta(m, sp), _) => return self.solve(*m, sp, &[], &b, &a, false),
            (_, Meta(m, sp)) => return self.solve(*m, sp, &[], &a, &b, false),
            (App(..), _) | (_, App(..)) if self.flex_app(&a).or(self.flex_app(&b)).is_some() => {
                return match self.flex_app(&a) {
                    Some((m, sp, extra)) => self.solve(m, &sp, &extra, &b, &a, false),
                    None => {
                        let (m, sp, extra) = self.flex_app(&b).expect("checked above");
                        self.solve(m, &sp, &extra, &a, &b, false)
                    }
                };
            }
            (Lam(_, x), Lam(_, y)) => self.conv(x, y)?,
            (Lam(_, x), t) | (t, Lam(_, x)) => {
                let expanded = Term::app(shift(t, 1, 0), Var(0));
                self.conv(x, &expanded)?
            }
            (Pair(a1, b1), Pair(a2, b2)) => self.conv(a1, a2)? && self.conv(b1, b2)?,
            (Pair(x, y), t) | (t, Pair(x, y)) => {
                self.conv(x, &Term::fst(t.clone()))? && self.conv(y, &Term::snd(t.clone()))?
            }
            (Var(i), Var(j)) => i == j,
            (Universe(i), Universe(j)) => i == j,
            (Nat(m), Nat(n)) => m == n,
            (Const(c, xs), Const(d, ys)) if c == d && xs.len() == ys.len() => {
                self.conv_all(xs, ys)?
            }
            (Pi(_, a1, b1), Pi(_, a2, b2)) | (Sigma(_, a1, b1), Sigma(_, a2, b2)) => {
                self.conv(a1, a2)? && self.conv(b1, b2)?
            }
            (App(f, x), App(g, y)) => self.conv(f, g)? && self.conv(x, y)?,
            (Fst(p), Fst(q)) | (Snd(p), Snd(q)) => self.conv(p, q)?,
            _ => false,
        };
        if !same && (self.is_flexible(&a) || self.is_flexible(&b)) {
            return self.postpone(&a, &b);
        }
        Ok(same)
    }

    fn conv_all(&mut self, xs: &[Term], ys: &[Term]) -> KResult<bool> {
        for (x, y) in xs.iter().zip(ys) {
            if !self.conv(x, y)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Type-directed entry point: expands at Π and Σ types before comparing.
    pub fn convertible_at(
        &mut self,
        ctx: &Context,
        a: &Term,
        b: &Term,
        ty: &Term,
    ) -> KResult<bool> {
        match self.whnf(ty)? {
            Term::Pi(x, dom, cod) => {
                let ctx = ctx.extended(x, *dom);
                let a = Term::app(shift(a, 1, 0), Term::Var(0));
                let b = Term::app(shift(b, 1, 0), Term::Var(0));
                self.convertible_at(&ctx, &a, &b, &cod)
            }
            Term::Sigma(_, dom, cod) => {
                let (a1, b1) = (Term::fst(a.clone()), Term::fst(b.clone()));
                if !self.convertible_at(ctx, &a1, &b1, &dom)? {
                    return Ok(false);
                }
                let cod = crate::term::subst(&cod, &a1, 0);
                self.convertible_at(ctx, &Term::snd(a.clone()), &Term::snd(b.clone()), &cod)
            }
            _ => self.conv(a, b),
        }
    }

    /// Whether the term could still change once some meta is solved.
    pub(crate) fn is_flexible(&self, t: &Term) -> bool {
        match t {
            Term::Meta(m, _) => self.metas.solution(*m).is_none(),
            Term::App(f, _) | Term::Fst(f) | Term::Snd(f) => self.is_flexible(f),
            Term::Const(c, args) => {
                let computes = self.sig.has_rules(c)
                    || self
                        .sig
                        .get(c)
                        .is_some_and(|e| e.kind == super::EntryKind::Primitive);
                computes && args.iter().any(|a| self.mentions_unsolved(a))
            }
            _ => false,
        }
    }

    fn mentions_unsolved(&self, t: &Term) -> bool {
        let mut found = false;
        t.visit(&mut |s| {
            if let Term::Meta(m, _) = s {
                found |= self.metas.solution(*m).is_none();
            }
        });
        found
    }

    fn postpone(&mut self, a: &Term, b: &Term) -> KResult<bool> {
        self.postponed.push(Constraint {
            lhs: a.clone(),
            rhs: b.clone(),
        });
        Ok(true)
    }

    /// An unsolved meta applied to arguments: the meta, its own spine and the
    /// extra arguments.
    fn flex_app(&self, t: &Term) -> Option<(MetaId, Vec<Term>, Vec<Term>)> {
        let mut extra = Vec::new();
        let mut head = t;
        while let Term::App(f, a) = head {
            extra.push((**a).clone());
            head = f;
        }
        match head {
            Term::Meta(m, sp) if !extra.is_empty() && self.metas.solution(*m).is_none() => {
                extra.reverse();
                Some((*m, sp.clone(), extra))
            }
            _ => None,
        }
    }

    /// Last resort for a stuck constraint with a flexible side: solve it
    /// while ignoring spine arguments that are not distinct variables. The
    /// solution is valid but may be less general than a pattern solution.
    /// Returns whether a meta was solved.
    pub(crate) fn solve_pruned(&mut self, a: &Term, b: &Term) -> KResult<bool> {
        let a = self.whnf(a)?;
        let b = self.whnf(b)?;
        let flex = |tc: &Self, t: &Term| match t {
            Term::Meta(m, sp) if tc.metas.solution(*m).is_none() => {
                Some((*m, sp.clone(), Vec::new()))
            }
            _ => tc.flex_app(t),
        };
        let Some(((m, sp, extra), flex_side, other)) = flex(self, &a)
            .map(|f| (f, &a, &b))
            .or_else(|| flex(self, &b).map(|f| (f, &b, &a)))
        else {
            return Ok(false);
        };
        let saved = self.postponed.len();
        self.solve(m, &sp, &extra, other, flex_side, true)?;
        self.postponed.truncate(saved);
        Ok(self.metas.solution(m).is_some())
    }

    /// Solves `?m spine extra := other` when the spine and the extra
    /// arguments are distinct variables and `other` only mentions those
    /// variables. The extra arguments become lambdas of the solution. With
    /// `prune`, other arguments are allowed and the solution ignores them.
    fn solve(
        &mut self,
        m: MetaId,
        spine: &[Term],
        extra: &[Term],
        other: &Term,
        flex: &Term,
        prune: bool,
    ) -> KResult<bool> {
        let mut vars = Vec::with_capacity(spine.len() + extra.len());
        for s in spine.iter().chain(extra) {
            match self.whnf(s)? {
                Term::Var(i) if !vars.contains(&Some(i)) => vars.push(Some(i)),
                _ if prune => vars.push(None),
                _ => return self.postpone(flex, other),
            }
        }
        let mut candidate = self.metas.zonk(other);
        let mut solution = invert(&candidate, &vars, m);
        if solution.is_none() {
            candidate = self.normalize(&candidate)?;
            solution = invert(&candidate, &vars, m);
        }
        let Some(solution) = solution else {
            // Occurs or scope failure: only a rigid mismatch if nothing else can move.
            return if self.is_flexible(&candidate) {
                self.postpone(flex, other)
            } else {
                Ok(false)
            };
        };
        let solution = extra.iter().fold(solution, |body, _| Term::lam("x", body));
        self.metas.assign(m, solution.clone());
        let entry = self.metas.get(m).clone();
        if let (Some(ctx), Some(ty)) = (entry.ctx, entry.ty) {
            self.check(&ctx, &solution, &ty).map_err(|e| match e {
                KernelError::TypeMismatch { expected, found } => KernelError::TypeMismatch {
                    expected,
                    found: format!("{found} (while solving ?{m})"),
                },
                e => e,
            })?;
        }
        Ok(true)
    }
}

/// Renames the free variables of `t` through the inverse of a pattern spine.
/// Fails on escaping variables and on occurrences of `m` itself.
fn invert(t: &Term, vars: &[Option<usize>], m: MetaId) -> Option<Term> {
    let n = vars.len();
    fn go(t: &Term, depth: usize, vars: &[Option<usize>], n: usize, m: MetaId) -> Option<Term> {
        Some(match t {
            Term::Var(i) if *i < depth => Term::Var(*i),
            Term::Var(i) => {
                let j = vars.iter().position(|v| *v == Some(i - depth))?;
                Term::Var(n - 1 - j + depth)
            }
            Term::Meta(k, _) if *k == m => return None,
            Term::Meta(k, sp) => Term::Meta(
                *k,
                sp.iter()
                    .map(|a| go(a, depth, vars, n, m))
                    .collect::<Option<_>>()?,
            ),
            Term::Const(c, args) => Term::Const(
                c.clone(),
                args.iter()
                    .map(|a| go(a, depth, vars, n, m))
                    .collect::<Option<_>>()?,
            ),
            Term::Universe(_) | Term::Nat(_) => t.clone(),
            Term::Pi(x, a, b) => Term::Pi(
                x.clone(),
                Box::new(go(a, depth, vars, n, m)?),
                Box::new(go(b, depth + 1, vars, n, m)?),
            ),
            Term::Sigma(x, a, b) => Term::Sigma(
                x.clone(),
                Box::new(go(a, depth, vars, n, m)?),
                Box::new(go(b, depth + 1, vars, n, m)?),
            ),
            Term::Lam(x, b) => Term::Lam(x.clone(), Box::new(go(b, depth + 1, vars, n, m)?)),
            Term::App(f, a) => Term::app(go(f, depth, vars, n, m)?, go(a, depth, vars, n, m)?),
            Term::Pair(a, b) => Term::pair(go(a, depth, vars, n, m)?, go(b, depth, vars, n, m)?),
            Term::Fst(p) => Term::fst(go(p, depth, vars, n, m)?),
            Term::Snd(p) => Term::snd(go(p, depth, vars, n, m)?),
        })
    }
    go(t, 0, vars, n, m)
}
