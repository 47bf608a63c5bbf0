use super::signature::{Entry, EntryKind, Pattern, RewriteRule, Signature};
use super::{KResult, KernelError, Tc, PRIMITIVES};
use crate::term::{Context, Name, Term};

/// A fully elaborated, meta-free declaration.
#[derive(Clone, Debug)]
pub enum Declaration {
    Primitive {
        name: Name,
        ty: Term,
        implicit: Vec<bool>,
    },
    Postulate {
        name: Name,
        ty: Term,
        implicit: Vec<bool>,
    },
    Definition {
        name: Name,
        ty: Term,
        body: Term,
        implicit: Vec<bool>,
    },
    Rewrite {
        telescope: Context,
        lhs: Term,
        rhs: Term,
    },
}

/// Re-checks a declaration from scratch and adds it to the signature.
pub fn declare(sig: &mut Signature, decl: Declaration, fuel: u64) -> KResult<()> {
    match decl {
        Declaration::Primitive { name, ty, implicit } => {
            if !PRIMITIVES.contains(&&*name) {
                return Err(KernelError::UnknownConstant(name));
            }
            fresh_name(sig, &name)?;
            Tc::new(sig, fuel).infer_sort(&Context::new(), &ty)?;
            sig.insert(Entry {
                name,
                ty,
                kind: EntryKind::Primitive,
                body: None,
                implicit,
                folded: true,
            });
        }
        Declaration::Postulate { name, ty, implicit } => {
            fresh_name(sig, &name)?;
            closed(&ty)?;
            Tc::new(sig, fuel).infer_sort(&Context::new(), &ty)?;
            sig.insert(Entry {
                name,
                ty,
                kind: EntryKind::Postulate,
                body: None,
                implicit,
                folded: true,
            });
        }
        Declaration::Definition {
            name,
            ty,
            body,
            implicit,
        } => {
            fresh_name(sig, &name)?;
            closed(&ty)?;
            closed(&body)?;
            let mut tc = Tc::new(sig, fuel);
            let ctx = Context::new();
            tc.infer_sort(&ctx, &ty)?;
            tc.check(&ctx, &body, &ty)?;
            tc.solve_postponed()?;
            let folded = !tc.is_type_former(&ty)?;
            sig.insert(Entry {
                name,
                ty,
                kind: EntryKind::Definition,
                body: Some(body),
                implicit,
                folded,
            });
        }
        Declaration::Rewrite {
            telescope,
            lhs,
            rhs,
        } => {
            let rule = check_rewrite(sig, telescope, lhs, rhs, fuel)?;
            sig.insert_rule(rule);
        }
    }
    Ok(())
}

fn fresh_name(sig: &Signature, name: &Name) -> KResult<()> {
    if sig.contains(name) {
        Err(KernelError::DuplicateName(name.clone()))
    } else {
        Ok(())
    }
}

fn closed(t: &Term) -> KResult<()> {
    if t.has_metas() {
        Err(KernelError::UnsolvedMeta(format!(
            "declaration still contains holes: {t}"
        )))
    } else {
        Ok(())
    }
}

impl Tc<'_> {
    /// Whether a type ends in a universe once its Π telescope is peeled.
    fn is_type_former(&mut self, ty: &Term) -> KResult<bool> {
        let mut t = self.whnf(ty)?;
        loop {
            match t {
                Term::Pi(_, _, cod) => t = self.whnf(&cod)?,
                Term::Universe(_) => return Ok(true),
                _ => return Ok(false),
            }
        }
    }
}

fn check_rewrite(
    sig: &Signature,
    telescope: Context,
    lhs: Term,
    rhs: Term,
    fuel: u64,
) -> KResult<RewriteRule> {
    closed(&lhs)?;
    closed(&rhs)?;
    let mut tc = Tc::new(sig, fuel);
    let mut prefix = Context::new();
    for (name, ty) in telescope.entries() {
        closed(ty)?;
        tc.infer_sort(&prefix, ty)?;
        prefix.push(name.clone(), ty.clone());
    }
    let Term::Const(head, args) = &lhs else {
        return Err(KernelError::MalformedRewrite(
            "the left-hand side must be a constant applied to patterns".into(),
        ));
    };
    let entry = sig
        .get(head)
        .ok_or_else(|| KernelError::UnknownConstant(head.clone()))?;
    if entry.kind == EntryKind::Definition {
        return Err(KernelError::RewriteHeadIsDefinition(head.clone()));
    }
    let names = telescope.names();
    let n = names.len();
    let mut counts = vec![0usize; n];
    for (i, a) in args.iter().enumerate() {
        if !entry.is_implicit(i) {
            count_explicit(sig, a, n, &mut counts)?;
        }
    }
    if let Some(pos) = counts.iter().position(|c| *c > 1) {
        return Err(KernelError::NonlinearPattern(names[pos].clone()));
    }
    let mut bound = vec![false; n];
    let pats = args
        .iter()
        .enumerate()
        .map(|(i, a)| compile(sig, a, n, entry.is_implicit(i), &counts, &mut bound))
        .collect::<KResult<Vec<_>>>()?;
    if let Some(pos) = bound.iter().position(|b| !b) {
        return Err(KernelError::MalformedRewrite(format!(
            "pattern variable `{}` is not determined by the left-hand side",
            names[pos]
        )));
    }

    let lhs_ty = tc.infer(&telescope, &lhs)?;
    let preserved = tc
        .check(&telescope, &rhs, &lhs_ty)
        .and_then(|_| tc.solve_postponed());
    match preserved {
        Ok(()) => {}
        Err(KernelError::TypeMismatch { expected, found }) => {
            return Err(KernelError::RewriteTypeMismatch(format!(
                "left-hand side has type {expected}, right-hand side has type {found}"
            )))
        }
        Err(e) => return Err(e),
    }
    Ok(RewriteRule {
        head: head.clone(),
        args: pats,
        telescope,
        lhs,
        rhs,
    })
}

/// Counts pattern-variable occurrences at positions that matching inspects.
fn count_explicit(sig: &Signature, t: &Term, n: usize, counts: &mut [usize]) -> KResult<()> {
    match t {
        Term::Var(i) if *i < n => counts[n - 1 - i] += 1,
        Term::Const(c, args) => {
            let entry = sig
                .get(c)
                .ok_or_else(|| KernelError::UnknownConstant(c.clone()))?;
            for (i, a) in args.iter().enumerate() {
                if !entry.is_implicit(i) {
                    count_explicit(sig, a, n, counts)?;
                }
            }
        }
        Term::Pair(a, b) => {
            count_explicit(sig, a, n, counts)?;
            count_explicit(sig, b, n, counts)?;
        }
        Term::Nat(_) => {}
        other => {
            return Err(KernelError::MalformedRewrite(format!(
                "`{other}` is not a first-order pattern"
            )));
        }
    }
    Ok(())
}

/// Builds a pattern. Implicit ("soft") positions are determined by typing, so
/// they become wildcards unless they are the only place a variable can be read.
fn compile(
    sig: &Signature,
    t: &Term,
    n: usize,
    soft: bool,
    counts: &[usize],
    bound: &mut [bool],
) -> KResult<Pattern> {
    if soft {
        return Ok(match t {
            Term::Var(i) if *i < n && counts[n - 1 - i] == 0 && !bound[n - 1 - i] => {
                bound[n - 1 - i] = true;
                Pattern::Var(n - 1 - i)
            }
            _ => Pattern::Wild,
        });
    }
    Ok(match t {
        Term::Var(i) => {
            bound[n - 1 - i] = true;
            Pattern::Var(n - 1 - i)
        }
        Term::Const(c, args) => {
            let entry = sig
                .get(c)
                .ok_or_else(|| KernelError::UnknownConstant(c.clone()))?;
            let ps = args
                .iter()
                .enumerate()
                .map(|(i, a)| compile(sig, a, n, entry.is_implicit(i), counts, bound))
                .collect::<KResult<Vec<_>>>()?;
            Pattern::Const(c.clone(), ps)
        }
        Term::Pair(a, b) => Pattern::Pair(
            Box::new(compile(sig, a, n, false, counts, bound)?),
            Box::new(compile(sig, b, n, false, counts, bound)?),
        ),
        Term::Nat(k) => Pattern::Nat(*k),
        other => {
            return Err(KernelError::MalformedRewrite(format!(
                "`{other}` is not a first-order pattern"
            )))
        }
    })
}
