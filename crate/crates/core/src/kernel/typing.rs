use super::{KResult, KernelError, Tc};
use crate::term::{shift, subst, subst_many, Context, Term};

impl Tc<'_> {
    pub fn infer(&mut self, ctx: &Context, t: &Term) -> KResult<Term> {
        match t {
            Term::Var(i) => ctx.lookup(*i).ok_or(KernelError::UnboundVariable(*i)),
            // Type2 only classifies large types such as `Bd -> Type1`; it
            // cannot be written in source and has no type itself.
            Term::Universe(l) if *l < super::TOP_UNIVERSE => Ok(Term::Universe(l + 1)),
            Term::Universe(l) => Err(KernelError::UniverseMismatch(format!(
                "Type{l} has no type"
            ))),
            Term::Nat(_) => Ok(Term::constant("Nat")),
            Term::Const(c, args) => {
                let entry = self
                    .sig
                    .get(c)
                    .ok_or_else(|| KernelError::UnknownConstant(c.clone()))?;
                let mut ty = entry.ty.clone();
                for a in args {
                    match self.whnf(&ty)? {
                        Term::Pi(_, dom, cod) => {
                            self.check(ctx, a, &dom)?;
                            ty = subst(&cod, a, 0);
                        }
                        other => return Err(KernelError::NotAFunction(self.show(ctx, &other))),
                    }
                }
                Ok(ty)
            }
            Term::Pi(x, a, b) | Term::Sigma(x, a, b) => {
                let i = self.infer_sort(ctx, a)?;
                let j = self.infer_sort(&ctx.extended(x.clone(), (**a).clone()), b)?;
                Ok(Term::Universe(i.max(j)))
            }
            Term::Lam(x, body) => {
                let dom = self.metas.fresh(ctx, None);
                let cod = self.infer(&ctx.extended(x.clone(), dom.clone()), body)?;
                Ok(Term::Pi(x.clone(), Box::new(dom), Box::new(cod)))
            }
            Term::App(f, a) => {
                let fty = self.infer(ctx, f)?;
                match self.whnf(&fty)? {
                    Term::Pi(_, dom, cod) => {
                        self.check(ctx, a, &dom)?;
                        Ok(subst(&cod, a, 0))
                    }
                    other => Err(KernelError::NotAFunction(self.show(ctx, &other))),
                }
            }
            Term::Pair(a, b) => {
                let ta = self.infer(ctx, a)?;
                let tb = self.infer(ctx, b)?;
                Ok(Term::Sigma(
                    "_".into(),
                    Box::new(ta),
                    Box::new(shift(&tb, 1, 0)),
                ))
            }
            Term::Fst(p) => {
                let pty = self.infer(ctx, p)?;
                match self.whnf(&pty)? {
                    Term::Sigma(_, a, _) => Ok(*a),
                    other => Err(KernelError::NotAPair(self.show(ctx, &other))),
                }
            }
            Term::Snd(p) => {
                let pty = self.infer(ctx, p)?;
                match self.whnf(&pty)? {
                    Term::Sigma(_, _, b) => Ok(subst(&b, &Term::fst((**p).clone()), 0)),
                    other => Err(KernelError::NotAPair(self.show(ctx, &other))),
                }
            }
            Term::Meta(m, spine) => {
                self.register(ctx, *m, spine);
                if let Some(v) = self.metas.instantiate(*m, spine) {
                    return self.infer(ctx, &v);
                }
                let entry = self.metas.get_mut(*m);
                match (&entry.ty, &entry.ctx) {
                    (Some(ty), Some(mctx)) if mctx.len() == spine.len() => {
                        Ok(subst_many(ty, spine))
                    }
                    (None, Some(mctx)) if mctx.len() == spine.len() => {
                        let mctx = mctx.clone();
                        let ty = self.metas.fresh(&mctx, None);
                        self.metas.get_mut(*m).ty = Some(ty.clone());
                        Ok(subst_many(&ty, spine))
                    }
                    _ => Err(KernelError::UnsolvedMeta(format!(
                        "cannot infer the type of ?{m}"
                    ))),
                }
            }
        }
    }

    pub fn check(&mut self, ctx: &Context, t: &Term, expected: &Term) -> KResult<()> {
        match t {
            Term::Lam(x, body) => match self.whnf(expected)? {
                Term::Pi(_, dom, cod) => self.check(&ctx.extended(x.clone(), *dom), body, &cod),
                w if self.is_flexible(&w) => self.check_by_inference(ctx, t, &w),
                w => Err(KernelError::TypeMismatch {
                    expected: self.show(ctx, &w),
                    found: "a function".into(),
                }),
            },
            Term::Pair(a, b) => match self.whnf(expected)? {
                Term::Sigma(_, dom, cod) => {
                    self.check(ctx, a, &dom)?;
                    self.check(ctx, b, &subst(&cod, a, 0))
                }
                w if self.is_flexible(&w) => self.check_by_inference(ctx, t, &w),
                w => Err(KernelError::TypeMismatch {
                    expected: self.show(ctx, &w),
                    found: "a pair".into(),
                }),
            },
            Term::Meta(m, spine) if self.metas.solution(*m).is_none() => {
                self.register(ctx, *m, spine);
                let entry = self.metas.get_mut(*m);
                if entry.ty.is_none()
                    && entry.ctx.as_ref().is_some_and(|c| c.len() == ctx.len())
                    && is_identity(spine)
                {
                    entry.ty = Some(expected.clone());
                    return Ok(());
                }
                self.check_by_inference(ctx, t, expected)
            }
            _ => self.check_by_inference(ctx, t, expected),
        }
    }

    fn check_by_inference(&mut self, ctx: &Context, t: &Term, expected: &Term) -> KResult<()> {
        let found = self.infer(ctx, t)?;
        if self.conv(&found, expected)? {
            Ok(())
        } else {
            Err(self.mismatch(ctx, expected, &found))
        }
    }

    /// The universe level of a type.
    pub fn infer_sort(&mut self, ctx: &Context, t: &Term) -> KResult<u8> {
        let ty = self.infer(ctx, t)?;
        match self.whnf(&ty)? {
            Term::Universe(l) => Ok(l),
            w @ Term::Meta(..) => {
                if self.conv(&w, &Term::Universe(0))? {
                    Ok(0)
                } else {
                    Err(KernelError::UniverseMismatch(format!(
                        "expected a type, found {}",
                        self.show(ctx, &w)
                    )))
                }
            }
            w => Err(KernelError::UniverseMismatch(format!(
                "expected a type, but {} has type {}",
                self.show(ctx, t),
                self.show(ctx, &w)
            ))),
        }
    }

    /// Records the context of a hole the first time the checker reaches it.
    fn register(&mut self, ctx: &Context, m: usize, spine: &[Term]) {
        let entry = self.metas.get_mut(m);
        if entry.ctx.is_none() && spine.len() == ctx.len() && is_identity(spine) {
            entry.ctx = Some(ctx.clone());
        }
    }
}

fn is_identity(spine: &[Term]) -> bool {
    let n = spine.len();
    spine
        .iter()
        .enumerate()
        .all(|(j, s)| matches!(s, Term::Var(i) if *i == n - 1 - j))
}
