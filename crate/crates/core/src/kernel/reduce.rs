use super::signature::{EntryKind, Pattern};
use super::{builtins, KResult, Tc};
use crate::term::{subst, subst_many, Term};

/// How eagerly head definitions unfold.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Delta {
    All,
    /// Keep value-level definitions folded unless a redex needs their body.
    TypeFormers,
}

/// Applies a closed function body to a spine, contracting leading lambdas.
pub(crate) fn apply_spine(mut f: Term, args: &[Term]) -> Term {
    for a in args {
        f = match f {
            Term::Lam(_, body) => subst(&body, a, 0),
            f => Term::app(f, a.clone()),
        };
    }
    f
}

impl Tc<'_> {
    pub fn whnf(&mut self, t: &Term) -> KResult<Term> {
        self.whnf_with(t, Delta::All)
    }

    pub(crate) fn whnf_with(&mut self, t: &Term, delta: Delta) -> KResult<Term> {
        let mut t = t.clone();
        loop {
            self.tick()?;
            t = match t {
                Term::App(f, a) => match self.whnf_with(&f, delta)? {
                    Term::Lam(_, body) => subst(&body, &a, 0),
                    f @ Term::Const(..) => Term::app(f, *a),
                    f => return Ok(Term::App(Box::new(f), a)),
                },
                Term::Fst(p) => match self.whnf(&p)? {
                    Term::Pair(a, _) => *a,
                    w => return Ok(Term::fst(if delta == Delta::All { w } else { *p })),
                },
                Term::Snd(p) => match self.whnf(&p)? {
                    Term::Pair(_, b) => *b,
                    w => return Ok(Term::snd(if delta == Delta::All { w } else { *p })),
                },
                Term::Meta(m, spine) => match self.metas.instantiate(m, &spine) {
                    Some(v) => v,
                    None => return Ok(Term::Meta(m, spine)),
                },
                Term::Const(c, args) => match self.step_const(&c, &args, delta)? {
                    Some(next) => next,
                    None => return Ok(Term::Const(c, args)),
                },
                t => return Ok(t),
            };
        }
    }

    /// Primitive computation, then rewrite rules in declaration order, then
    /// definition unfolding.
    fn step_const(&mut self, c: &str, args: &[Term], delta: Delta) -> KResult<Option<Term>> {
        let sig = self.sig;
        let Some(entry) = sig.get(c) else {
            return Ok(None);
        };
        if entry.kind == EntryKind::Primitive {
            if let Some(t) = builtins::step(self, c, args)? {
                return Ok(Some(t));
            }
        }
        for rule in sig.rules_for(c) {
            let arity = rule.args.len();
            if args.len() < arity {
                continue;
            }
            let mut binds = vec![None; rule.telescope.len()];
            if self.match_all(&rule.args, &args[..arity], &mut binds)? {
                let binds: Vec<Term> = binds
                    .into_iter()
                    .map(|b| b.expect("validated at declaration"))
                    .collect();
                let rhs = subst_many(&rule.rhs, &binds);
                return Ok(Some(Term::apps(rhs, args[arity..].iter().cloned())));
            }
        }
        match &entry.body {
            Some(body) if delta == Delta::All || !entry.folded => {
                Ok(Some(apply_spine(body.clone(), args)))
            }
            _ => Ok(None),
        }
    }

    fn match_all(
        &mut self,
        pats: &[Pattern],
        args: &[Term],
        binds: &mut [Option<Term>],
    ) -> KResult<bool> {
        for (p, a) in pats.iter().zip(args) {
            if !self.match_pattern(p, a, binds)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// First-order matching; rigid positions are put in weak-head normal form.
    fn match_pattern(
        &mut self,
        p: &Pattern,
        t: &Term,
        binds: &mut [Option<Term>],
    ) -> KResult<bool> {
        match p {
            Pattern::Var(i) => {
                binds[*i] = Some(t.clone());
                Ok(true)
            }
            Pattern::Wild => Ok(true),
            Pattern::Const(c, ps) => match self.whnf(t)? {
                Term::Const(d, args) if *c == d && args.len() == ps.len() => {
                    self.match_all(ps, &args, binds)
                }
                _ => Ok(false),
            },
            Pattern::Pair(p1, p2) => match self.whnf(t)? {
                Term::Pair(a, b) => {
                    Ok(self.match_pattern(p1, &a, binds)? && self.match_pattern(p2, &b, binds)?)
                }
                _ => Ok(false),
            },
            Pattern::Nat(n) => Ok(matches!(self.whnf(t)?, Term::Nat(m) if m == *n)),
        }
    }

    /// Deep normal form. Value-level definitions that no redex needs stay
    /// folded, so results read like the declarations that produced them.
    pub fn normalize(&mut self, t: &Term) -> KResult<Term> {
        let w = self.whnf_with(t, Delta::TypeFormers)?;
        Ok(match w {
            Term::Const(c, args) => Term::Const(c, self.normalize_all(&args)?),
            Term::Meta(m, spine) => Term::Meta(m, self.normalize_all(&spine)?),
            Term::Pi(x, a, b) => Term::Pi(
                x,
                Box::new(self.normalize(&a)?),
                Box::new(self.normalize(&b)?),
            ),
            Term::Sigma(x, a, b) => Term::Sigma(
                x,
                Box::new(self.normalize(&a)?),
                Box::new(self.normalize(&b)?),
            ),
            Term::Lam(x, b) => Term::Lam(x, Box::new(self.normalize(&b)?)),
            Term::App(f, a) => Term::app(self.normalize(&f)?, self.normalize(&a)?),
            Term::Pair(a, b) => Term::pair(self.normalize(&a)?, self.normalize(&b)?),
            Term::Fst(p) => Term::fst(self.normalize(&p)?),
            Term::Snd(p) => Term::snd(self.normalize(&p)?),
            w @ (Term::Var(_) | Term::Universe(_) | Term::Nat(_)) => w,
        })
    }

    fn normalize_all(&mut self, ts: &[Term]) -> KResult<Vec<Term>> {
        ts.iter().map(|t| self.normalize(t)).collect()
    }
}
