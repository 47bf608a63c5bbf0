//! From parsed declarations to kernel declarations.
//!
//! Names resolve to de Bruijn indices or constants, `_` and implicit
//! arguments become metavariables, and the kernel checks the result. Every
//! declaration that reaches the signature is re-checked meta-free by
//! `kernel::declare`.

use super::ast::{Binder, Decl, DeclKind, Expr, ExprKind, Op, Span};
use crate::kernel::{self, Declaration, ErrorClass, KernelError, MetaStore, Signature, Tc};
use crate::print;
use crate::term::{alpha_eq, Context, Name, Term};

/// A failure tied to a source location.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub class: ErrorClass,
    pub message: String,
    pub span: Span,
}

/// What a successfully processed declaration produced.
#[derive(Clone, Debug, Default)]
pub struct Elaborated {
    /// Rendered normal form, for `norm`.
    pub normal_form: Option<String>,
    /// Constants mentioned by the elaborated terms.
    pub constants: Vec<Name>,
}

/// Outcome of a declaration whose verdict may be an expected failure.
#[derive(Clone, Debug)]
pub struct Verdict {
    pub passed: bool,
    pub class: Option<ErrorClass>,
    pub message: Option<String>,
    pub elaborated: Elaborated,
}

fn kernel_diag(span: Span) -> impl Fn(KernelError) -> Diagnostic {
    move |e| Diagnostic {
        class: e.class(),
        message: e.to_string(),
        span,
    }
}

/// Processes one declaration against `sig`. `import` is the driver's job and
/// is rejected here.
pub fn elaborate(sig: &mut Signature, decl: &Decl, fuel: u64) -> Verdict {
    match &decl.kind {
        DeclKind::FailCheck { class, expr, ty } => {
            let outcome = check_claim(sig, expr, ty, decl.span, fuel);
            expect_failure(*class, outcome)
        }
        DeclKind::Reject { class, decl: inner } => {
            let mut scratch = sig.clone();
            let outcome = run(&mut scratch, inner, fuel);
            expect_failure(*class, outcome)
        }
        _ => match run(sig, decl, fuel) {
            Ok(elaborated) => Verdict {
                passed: true,
                class: None,
                message: None,
                elaborated,
            },
            Err(d) => Verdict {
                passed: false,
                class: Some(d.class),
                message: Some(d.message),
                elaborated: Elaborated::default(),
            },
        },
    }
}

fn expect_failure(expected: ErrorClass, outcome: Result<Elaborated, Diagnostic>) -> Verdict {
    match outcome {
        Ok(elaborated) => Verdict {
            passed: false,
            class: None,
            message: Some(format!(
                "expected a {expected} failure, but the declaration was accepted"
            )),
            elaborated,
        },
        Err(d) if d.class == expected => Verdict {
            passed: true,
            class: Some(d.class),
            message: Some(d.message),
            elaborated: Elaborated::default(),
        },
        Err(d) => Verdict {
            passed: false,
            class: Some(d.class),
            message: Some(format!(
                "expected a {expected} failure, got {}: {}",
                d.class, d.message
            )),
            elaborated: Elaborated::default(),
        },
    }
}

/// Elaborates and declares, reporting the first failure.
pub fn run(sig: &mut Signature, decl: &Decl, fuel: u64) -> Result<Elaborated, Diagnostic> {
    let span = decl.span;
    let kd = kernel_diag(span);
    match &decl.kind {
        DeclKind::Primitive { name, ty } | DeclKind::Postulate { name, ty } => {
            let ty_term = closed_type(sig, ty, span, fuel)?;
            let implicit = implicit_mask(ty);
            let constants = mentioned(&[&ty_term]);
            let name: Name = name.as_str().into();
            let d = if matches!(decl.kind, DeclKind::Primitive { .. }) {
                Declaration::Primitive {
                    name,
                    ty: ty_term,
                    implicit,
                }
            } else {
                Declaration::Postulate {
                    name,
                    ty: ty_term,
                    implicit,
                }
            };
            kernel::declare(sig, d, fuel).map_err(&kd)?;
            Ok(Elaborated {
                normal_form: None,
                constants,
            })
        }
        DeclKind::Def { name, ty, body } => define(sig, name, ty, body, span, fuel),
        DeclKind::Entail {
            name,
            hyp,
            concl,
            witness,
        } => {
            let ty = Expr {
                kind: ExprKind::Arrow(Box::new(hyp.clone()), Box::new(concl.clone())),
                span: hyp.span.to(concl.span),
            };
            define(sig, name, &ty, witness, span, fuel)
        }
        DeclKind::Rewrite {
            telescope,
            lhs,
            rhs,
        } => {
            let sig_ref: &Signature = sig;
            let mut tc = Tc::new(sig_ref, fuel);
            let mut scope = Vec::new();
            let mut ctx = Context::new();
            for group in telescope {
                for x in &group.names {
                    let t = Resolver {
                        sig: sig_ref,
                        metas: &mut tc.metas,
                    }
                    .resolve(&mut scope, &group.ty)?;
                    tc.infer_sort(&ctx, &t).map_err(&kd)?;
                    ctx.push(x.as_str().into(), t);
                    scope.push(x.clone());
                }
            }
            let l = Resolver {
                sig: sig_ref,
                metas: &mut tc.metas,
            }
            .resolve(&mut scope, lhs)?;
            let r = Resolver {
                sig: sig_ref,
                metas: &mut tc.metas,
            }
            .resolve(&mut scope, rhs)?;
            let lty = tc.infer(&ctx, &l).map_err(&kd)?;
            tc.check(&ctx, &r, &lty).and_then(|_| tc.solve_postponed()).map_err(|e| match e {
                KernelError::TypeMismatch { expected, found } => Diagnostic {
                    class: ErrorClass::RewriteTypeMismatch,
                    message: format!(
                        "rewrite does not preserve types: left-hand side has type {expected}, right-hand side has type {found}"
                    ),
                    span,
                },
                e => kd(e),
            })?;
            let mut tele = Context::new();
            for (x, t) in ctx.entries() {
                let t = tc.finish(&tele, t).map_err(&kd)?;
                tele.push(x.clone(), t);
            }
            let lhs_t = tc.finish(&tele, &l).map_err(&kd)?;
            let rhs_t = tc.finish(&tele, &r).map_err(&kd)?;
            drop(tc);
            let constants = mentioned(&[&lhs_t, &rhs_t]);
            kernel::declare(
                sig,
                Declaration::Rewrite {
                    telescope: tele,
                    lhs: lhs_t,
                    rhs: rhs_t,
                },
                fuel,
            )
            .map_err(&kd)?;
            Ok(Elaborated {
                normal_form: None,
                constants,
            })
        }
        DeclKind::Check { expr, ty } => check_claim(sig, expr, ty, span, fuel),
        DeclKind::FailCheck { .. } | DeclKind::Reject { .. } => {
            let v = elaborate(sig, decl, fuel);
            if v.passed {
                Ok(v.elaborated)
            } else {
                Err(Diagnostic {
                    class: v.class.unwrap_or(ErrorClass::TypeMismatch),
                    message: v.message.unwrap_or_default(),
                    span,
                })
            }
        }
        DeclKind::Norm { expr, expected } => {
            let ctx = Context::new();
            let mut metas = MetaStore::new();
            let e = Resolver {
                sig,
                metas: &mut metas,
            }
            .resolve(&mut Vec::new(), expr)?;
            let x = Resolver {
                sig,
                metas: &mut metas,
            }
            .resolve(&mut Vec::new(), expected)?;
            let mut tc = Tc::with_metas(sig, metas, fuel);
            let ty = tc.infer(&ctx, &e).map_err(&kd)?;
            tc.check(&ctx, &x, &ty)
                .and_then(|_| tc.solve_postponed())
                .map_err(&kd)?;
            let e = tc.finish(&ctx, &e).map_err(&kd)?;
            let x = tc.finish(&ctx, &x).map_err(&kd)?;
            let mut tc = Tc::new(sig, fuel);
            let ne = tc.normalize(&e).map_err(&kd)?;
            let nx = tc.normalize(&x).map_err(&kd)?;
            let shown = print::render(sig, &[], &ne);
            if !alpha_eq(&ne, &nx) {
                return Err(Diagnostic {
                    class: ErrorClass::TypeMismatch,
                    message: format!(
                        "normal form is {shown}, expected {}",
                        print::render(sig, &[], &nx)
                    ),
                    span,
                });
            }
            let constants = mentioned(&[&e, &x, &ne]);
            Ok(Elaborated {
                normal_form: Some(shown),
                constants,
            })
        }
        DeclKind::Import { path } => Err(Diagnostic {
            class: ErrorClass::ImportFailed,
            message: format!("cannot import \"{path}\" here"),
            span,
        }),
    }
}

fn define(
    sig: &mut Signature,
    name: &str,
    ty: &Expr,
    body: &Expr,
    span: Span,
    fuel: u64,
) -> Result<Elaborated, Diagnostic> {
    let kd = kernel_diag(span);
    let ctx = Context::new();
    let mut metas = MetaStore::new();
    let ty_t = Resolver {
        sig,
        metas: &mut metas,
    }
    .resolve(&mut Vec::new(), ty)?;
    let body_t = Resolver {
        sig,
        metas: &mut metas,
    }
    .resolve(&mut Vec::new(), body)?;
    let (ty_t, body_t) = {
        let mut tc = Tc::with_metas(sig, metas, fuel);
        tc.infer_sort(&ctx, &ty_t).map_err(&kd)?;
        tc.check(&ctx, &body_t, &ty_t)
            .and_then(|_| tc.solve_postponed())
            .map_err(&kd)?;
        (
            tc.finish(&ctx, &ty_t).map_err(&kd)?,
            tc.finish(&ctx, &body_t).map_err(&kd)?,
        )
    };
    let constants = mentioned(&[&ty_t, &body_t]);
    let d = Declaration::Definition {
        name: name.into(),
        ty: ty_t,
        body: body_t,
        implicit: implicit_mask(ty),
    };
    kernel::declare(sig, d, fuel).map_err(&kd)?;
    Ok(Elaborated {
        normal_form: None,
        constants,
    })
}

fn closed_type(sig: &Signature, ty: &Expr, span: Span, fuel: u64) -> Result<Term, Diagnostic> {
    let kd = kernel_diag(span);
    let ctx = Context::new();
    let mut metas = MetaStore::new();
    let t = Resolver {
        sig,
        metas: &mut metas,
    }
    .resolve(&mut Vec::new(), ty)?;
    let mut tc = Tc::with_metas(sig, metas, fuel);
    tc.infer_sort(&ctx, &t)
        .and_then(|_| tc.solve_postponed())
        .map_err(&kd)?;
    tc.finish(&ctx, &t).map_err(&kd)
}

fn check_claim(
    sig: &Signature,
    expr: &Expr,
    ty: &Expr,
    span: Span,
    fuel: u64,
) -> Result<Elaborated, Diagnostic> {
    let kd = kernel_diag(span);
    let ctx = Context::new();
    let mut metas = MetaStore::new();
    let ty_t = Resolver {
        sig,
        metas: &mut metas,
    }
    .resolve(&mut Vec::new(), ty)?;
    let e = Resolver {
        sig,
        metas: &mut metas,
    }
    .resolve(&mut Vec::new(), expr)?;
    let mut tc = Tc::with_metas(sig, metas, fuel);
    tc.infer_sort(&ctx, &ty_t).map_err(&kd)?;
    tc.check(&ctx, &e, &ty_t)
        .and_then(|_| tc.solve_postponed())
        .map_err(&kd)?;
    let ty_t = tc.finish(&ctx, &ty_t).map_err(&kd)?;
    let e = tc.finish(&ctx, &e).map_err(&kd)?;
    // Independent re-check of the meta-free result.
    kernel::check(sig, &mut MetaStore::new(), &ctx, &e, &ty_t).map_err(&kd)?;
    Ok(Elaborated {
        normal_form: None,
        constants: mentioned(&[&ty_t, &e]),
    })
}

fn mentioned(terms: &[&Term]) -> Vec<Name> {
    let mut out = Vec::new();
    for t in terms {
        t.constants(&mut out);
    }
    out.sort();
    out.dedup();
    out
}

/// Implicitness of the leading binders of a declared type.
pub fn implicit_mask(ty: &Expr) -> Vec<bool> {
    let mut mask = Vec::new();
    let mut cur = ty;
    loop {
        match &cur.kind {
            ExprKind::Pi(groups, body) => {
                for g in groups {
                    mask.extend(g.names.iter().map(|_| g.implicit));
                }
                cur = body;
            }
            ExprKind::Arrow(_, body) => {
                mask.push(false);
                cur = body;
            }
            _ => return mask,
        }
    }
}

/// Name resolution into core terms with fresh holes.
pub struct Resolver<'a> {
    pub sig: &'a Signature,
    pub metas: &'a mut MetaStore,
}

impl Resolver<'_> {
    pub fn resolve(&mut self, scope: &mut Vec<String>, e: &Expr) -> Result<Term, Diagnostic> {
        Ok(match &e.kind {
            ExprKind::Ident(_) | ExprKind::App(..) => self.application(scope, e)?,
            ExprKind::Infix(op, l, r) => {
                let head = match op {
                    Op::Oplus => "⊕",
                    Op::Plus => "plus",
                };
                self.constant_spine(scope, head, e.span, &[(&**l, false), (&**r, false)])?
            }
            ExprKind::Hole => self.metas.fresh_hole(scope.len()),
            ExprKind::Nat(n) => Term::Nat(*n),
            ExprKind::Universe(l) => Term::Universe(*l),
            ExprKind::Lam(names, body) => {
                scope.extend(names.iter().cloned());
                let b = self.resolve(scope, body);
                scope.truncate(scope.len() - names.len());
                names.iter().rev().fold(b?, |acc, x| Term::lam(x, acc))
            }
            ExprKind::Pi(groups, body) => self.pi(scope, groups, body)?,
            ExprKind::Arrow(a, b) => {
                let a = self.resolve(scope, a)?;
                scope.push(String::new());
                let b = self.resolve(scope, b);
                scope.pop();
                Term::Pi("_".into(), Box::new(a), Box::new(b?))
            }
            ExprKind::Sigma(x, a, b) => {
                let a = self.resolve(scope, a)?;
                scope.push(x.clone());
                let b = self.resolve(scope, b);
                scope.pop();
                Term::Sigma(x.as_str().into(), Box::new(a), Box::new(b?))
            }
            ExprKind::Pair(a, b) => Term::pair(self.resolve(scope, a)?, self.resolve(scope, b)?),
            ExprKind::Fst(p) => Term::fst(self.resolve(scope, p)?),
            ExprKind::Snd(p) => Term::snd(self.resolve(scope, p)?),
        })
    }

    fn pi(
        &mut self,
        scope: &mut Vec<String>,
        groups: &[Binder],
        body: &Expr,
    ) -> Result<Term, Diagnostic> {
        let mut doms = Vec::new();
        let pushed = scope.len();
        let mut result = Ok(());
        'outer: for g in groups {
            for x in &g.names {
                match self.resolve(scope, &g.ty) {
                    Ok(t) => doms.push((x.clone(), t)),
                    Err(d) => {
                        result = Err(d);
                        break 'outer;
                    }
                }
                scope.push(x.clone());
            }
        }
        let body = result.and_then(|_| self.resolve(scope, body));
        scope.truncate(pushed);
        Ok(doms
            .into_iter()
            .rev()
            .fold(body?, |acc, (x, a)| Term::pi(&x, a, acc)))
    }

    fn lookup_local(scope: &[String], name: &str) -> Option<usize> {
        scope
            .iter()
            .rposition(|s| s == name)
            .map(|k| scope.len() - 1 - k)
    }

    fn application(&mut self, scope: &mut Vec<String>, e: &Expr) -> Result<Term, Diagnostic> {
        let mut args: Vec<(&Expr, bool)> = Vec::new();
        let mut head = e;
        while let ExprKind::App(f, a, implicit) = &head.kind {
            args.push((a, *implicit));
            head = f;
        }
        args.reverse();
        if let ExprKind::Ident(name) = &head.kind {
            if Self::lookup_local(scope, name).is_none() {
                if self.sig.contains(name) {
                    return self.constant_spine(scope, name, head.span, &args);
                }
                return Err(Diagnostic {
                    class: ErrorClass::UnknownConstant,
                    message: format!("unknown identifier `{name}`"),
                    span: head.span,
                });
            }
        }
        let mut f = match &head.kind {
            ExprKind::Ident(name) => {
                Term::Var(Self::lookup_local(scope, name).expect("checked above"))
            }
            _ => self.resolve(scope, head)?,
        };
        for (a, implicit) in args {
            if implicit {
                return Err(Diagnostic {
                    class: ErrorClass::BadImplicit,
                    message: "only constants take `{...}` arguments".into(),
                    span: a.span,
                });
            }
            f = Term::app(f, self.resolve(scope, a)?);
        }
        Ok(f)
    }

    /// Applies a constant, inserting holes for implicit positions that the
    /// source leaves out.
    fn constant_spine(
        &mut self,
        scope: &mut Vec<String>,
        name: &str,
        span: Span,
        args: &[(&Expr, bool)],
    ) -> Result<Term, Diagnostic> {
        let entry = self.sig.get(name).ok_or_else(|| Diagnostic {
            class: ErrorClass::UnknownConstant,
            message: format!("unknown identifier `{name}`"),
            span,
        })?;
        let mask = entry.implicit.clone();
        let mut spine = Vec::new();
        for (a, implicit) in args {
            if *implicit {
                if !mask.get(spine.len()).copied().unwrap_or(false) {
                    return Err(Diagnostic {
                        class: ErrorClass::BadImplicit,
                        message: format!(
                            "`{name}` takes no implicit argument at position {}",
                            spine.len() + 1
                        ),
                        span: a.span,
                    });
                }
            } else {
                while mask.get(spine.len()).copied().unwrap_or(false) {
                    spine.push(self.metas.fresh_hole(scope.len()));
                }
            }
            spine.push(self.resolve(scope, a)?);
        }
        while mask.get(spine.len()).copied().unwrap_or(false) {
            spine.push(self.metas.fresh_hole(scope.len()));
        }
        Ok(Term::Const(name.into(), spine))
    }
}
