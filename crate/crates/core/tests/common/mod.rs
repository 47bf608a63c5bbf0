//! Random well-typed terms over the prelude plus a small lexicon, and the
//! kernel properties checked on them. Shared by the property tests and the
//! acceptance runner.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telic::kernel::{self, Declaration, MetaStore, Signature};
use telic::print;
use telic::surface::{self, Resolver};
use telic::term::{alpha_eq, shift, subst, Context, Name, Term};

/// The shapes of type the generator aims at.
#[derive(Clone, Debug, PartialEq)]
pub enum Ty {
    Nat,
    Fun(Box<Ty>, Box<Ty>),
    Pair(Box<Ty>, Box<Ty>),
    /// Instances of `AmountOf human quantity nu k`.
    Amount(u64),
    /// `Type` itself; its inhabitants are small types.
    Type,
}

const LEXICON: &str = "
postulate human : NP U
postulate oneHuman : El_NP (AmountOf human quantity nu 1)
postulate count : Nat -> Nat
def double : Nat -> Nat = \\n. n + n
def two : Nat = 2
";

/// The prelude plus the lexicon the generator draws constants from.
pub fn signature() -> Signature {
    let mut sig = telic::prelude::signature();
    telic::prelude::load_source(&mut sig, LEXICON, kernel::DEFAULT_FUEL)
        .expect("test lexicon loads");
    sig
}

fn amount(k: Term) -> Term {
    let np = Term::constant("human");
    let of = Term::apply_const(
        "AmountOf",
        vec![np, Term::constant("quantity"), Term::constant("nu"), k],
    );
    Term::apply_const("El_NP", vec![Term::constant("B"), of])
}

pub fn ty_term(ty: &Ty) -> Term {
    match ty {
        Ty::Nat => Term::constant("Nat"),
        Ty::Fun(a, b) => Term::arrow(ty_term(a), ty_term(b)),
        Ty::Pair(a, b) => Term::Sigma(
            "_".into(),
            Box::new(ty_term(a)),
            Box::new(shift(&ty_term(b), 1, 0)),
        ),
        Ty::Amount(k) => amount(Term::Nat(*k)),
        Ty::Type => Term::Universe(0),
    }
}

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn small_ty(&mut self, depth: u32) -> Ty {
        let pick = if depth == 0 {
            self.rng.gen_range(0..2)
        } else {
            self.rng.gen_range(0..5)
        };
        match pick {
            0 => Ty::Nat,
            1 => Ty::Amount(self.rng.gen_range(1..4)),
            2 => Ty::Fun(
                Box::new(self.small_ty(depth - 1)),
                Box::new(self.small_ty(depth - 1)),
            ),
            3 => Ty::Pair(
                Box::new(self.small_ty(depth - 1)),
                Box::new(self.small_ty(depth - 1)),
            ),
            _ => Ty::Nat,
        }
    }

    /// Types without function parts. Terms in positions whose type is only
    /// inferred get one of these, so every lambda the checker meets has a
    /// domain fixed by an argument or by the expected type.
    fn first_order_ty(&mut self, depth: u32) -> Ty {
        match self.rng.gen_range(0..if depth == 0 { 2 } else { 3 }) {
            0 => Ty::Nat,
            1 => Ty::Amount(self.rng.gen_range(1..4)),
            _ => Ty::Pair(
                Box::new(self.first_order_ty(depth - 1)),
                Box::new(self.first_order_ty(depth - 1)),
            ),
        }
    }

    /// A closed, well-typed term together with its type.
    pub fn closed(&mut self) -> (Term, Ty) {
        let ty = if self.rng.gen_bool(0.1) {
            Ty::Type
        } else {
            self.small_ty(2)
        };
        let t = self.term(&mut Vec::new(), &ty, 4);
        (t, ty)
    }

    /// A term of type `ty` in a context whose variables have types `ctx`
    /// (innermost last).
    pub fn term(&mut self, ctx: &mut Vec<Ty>, ty: &Ty, depth: u32) -> Term {
        let vars: Vec<usize> = ctx
            .iter()
            .rev()
            .enumerate()
            .filter(|(_, t)| *t == ty)
            .map(|(i, _)| i)
            .collect();
        if !vars.is_empty() && self.rng.gen_bool(0.3) {
            return Term::Var(vars[self.rng.gen_range(0..vars.len())]);
        }
        if depth > 0 {
            match self.rng.gen_range(0..6) {
                // Beta redex.
                0 => {
                    let arg_ty = self.first_order_ty(1);
                    ctx.push(arg_ty.clone());
                    let body = self.term(ctx, ty, depth - 1);
                    ctx.pop();
                    let arg = self.term(ctx, &arg_ty, depth - 1);
                    return Term::App(Box::new(Term::lam("x", body)), Box::new(arg));
                }
                // Projection redex.
                1 => {
                    let other = self.first_order_ty(1);
                    let here = self.term(ctx, ty, depth - 1);
                    let there = self.term(ctx, &other, depth - 1);
                    return if self.rng.gen_bool(0.5) {
                        Term::fst(Term::pair(here, there))
                    } else {
                        Term::snd(Term::pair(there, here))
                    };
                }
                // Application of a generated function.
                2 => {
                    let arg_ty = self.first_order_ty(1);
                    let f = self.term(
                        ctx,
                        &Ty::Fun(Box::new(arg_ty.clone()), Box::new(ty.clone())),
                        depth - 1,
                    );
                    let a = self.term(ctx, &arg_ty, depth - 1);
                    return Term::app(f, a);
                }
                _ => {}
            }
        }
        let d = depth.saturating_sub(1);
        match ty {
            Ty::Nat => match self.rng.gen_range(0..6) {
                0 if depth > 0 => Term::apply_const(
                    "plus",
                    vec![self.term(ctx, &Ty::Nat, d), self.term(ctx, &Ty::Nat, d)],
                ),
                1 if depth > 0 => Term::apply_const("suc", vec![self.term(ctx, &Ty::Nat, d)]),
                2 if depth > 0 => Term::apply_const("double", vec![self.term(ctx, &Ty::Nat, d)]),
                3 if depth > 0 => Term::apply_const("count", vec![self.term(ctx, &Ty::Nat, d)]),
                4 => Term::constant("two"),
                _ => Term::Nat(self.rng.gen_range(0..10)),
            },
            Ty::Fun(a, b) => {
                ctx.push((**a).clone());
                let body = self.term(ctx, b, d);
                ctx.pop();
                Term::lam("x", body)
            }
            Ty::Pair(a, b) => Term::pair(self.term(ctx, a, d), self.term(ctx, b, d)),
            Ty::Amount(k) if *k >= 2 && depth > 0 => {
                let m = self.rng.gen_range(1..*k);
                let n = k - m;
                let x = self.term(ctx, &Ty::Amount(m), d);
                let y = self.term(ctx, &Ty::Amount(n), d);
                let implicits = vec![
                    Term::constant("human"),
                    Term::constant("quantity"),
                    Term::constant("nu"),
                    Term::Nat(m),
                    Term::Nat(n),
                ];
                // The index of the sum is `m + n`, which computes to `k`.
                Term::apply_const("⊕", implicits.into_iter().chain([x, y]).collect())
            }
            Ty::Amount(k) => amount_leaf(*k),
            Ty::Type => match self.rng.gen_range(0..4) {
                0 => Term::constant("Nat"),
                1 => ty_term(&self.small_ty(1)),
                2 => Term::apply_const(
                    "El_NP",
                    vec![
                        Term::constant("B"),
                        Term::apply_const(
                            "several",
                            vec![
                                Term::constant("human"),
                                Term::constant("quantity"),
                                Term::constant("nu"),
                            ],
                        ),
                    ],
                ),
                _ => Term::pi("n", Term::constant("Nat"), amount(Term::Var(0))),
            },
        }
    }
}

/// A right-nested sum of `k` single humans.
fn amount_leaf(k: u64) -> Term {
    if k == 1 {
        return Term::constant("oneHuman");
    }
    let implicits = vec![
        Term::constant("human"),
        Term::constant("quantity"),
        Term::constant("nu"),
        Term::Nat(1),
        Term::Nat(k - 1),
    ];
    Term::apply_const(
        "⊕",
        implicits
            .into_iter()
            .chain([amount_leaf(1), amount_leaf(k - 1)])
            .collect(),
    )
}

pub type Outcome = Result<(), String>;

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn kerr(e: kernel::KernelError) -> String {
    e.to_string()
}

pub fn show(sig: &Signature, t: &Term) -> String {
    print::render_full(sig, &[], t)
}

/// Generated terms check against the type they were generated at.
pub fn prop_well_typed(sig: &Signature, seed: u64) -> Outcome {
    let (t, ty) = Gen::new(seed).closed();
    kernel::check(
        sig,
        &mut MetaStore::new(),
        &Context::new(),
        &t,
        &ty_term(&ty),
    )
    .map_err(|e| format!("{} : {:?} rejected: {e}", show(sig, &t), ty))
}

pub fn prop_normalize_idempotent(sig: &Signature, seed: u64) -> Outcome {
    let (t, _) = Gen::new(seed).closed();
    let n1 = kernel::normalize(sig, &t).map_err(kerr)?;
    let n2 = kernel::normalize(sig, &n1).map_err(kerr)?;
    ensure(alpha_eq(&n1, &n2), || {
        format!("{} normalizes again to {}", show(sig, &n1), show(sig, &n2))
    })
}

/// Open terms, so the cancellation is exercised on free variables too.
pub fn prop_shift_subst_cancel(sig: &Signature, seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let mut ctx = vec![Ty::Nat, Ty::Amount(1), Ty::Nat];
    let t = g.term(&mut ctx, &Ty::Nat, 4);
    let u = g.term(&mut ctx, &Ty::Nat, 2);
    let back = subst(&shift(&t, 1, 0), &u, 0);
    ensure(alpha_eq(&back, &t), || {
        format!("{} came back as {}", show(sig, &t), show(sig, &back))
    })?;
    let c = (seed % 4) as usize;
    ensure(alpha_eq(&shift(&t, 0, c), &t), || {
        format!("shift by 0 changed {}", show(sig, &t))
    })
}

pub fn prop_alpha_eq_equivalence(sig: &Signature, seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let (a, _) = g.closed();
    let (b, _) = g.closed();
    let renamed = rename_hints(&a);
    ensure(alpha_eq(&a, &a), || {
        format!("{} is not equal to itself", show(sig, &a))
    })?;
    ensure(alpha_eq(&a, &renamed) && alpha_eq(&renamed, &a), || {
        "renaming binder hints broke equality".into()
    })?;
    ensure(alpha_eq(&a, &b) == alpha_eq(&b, &a), || {
        "alpha_eq is not symmetric".into()
    })?;
    // Transitivity through the renamed copy.
    ensure(!alpha_eq(&renamed, &b) || alpha_eq(&a, &b), || {
        "alpha_eq is not transitive".into()
    })
}

fn rename_hints(t: &Term) -> Term {
    let r = |t: &Term| Box::new(rename_hints(t));
    match t {
        Term::Pi(_, a, b) => Term::Pi("renamed".into(), r(a), r(b)),
        Term::Sigma(_, a, b) => Term::Sigma("renamed".into(), r(a), r(b)),
        Term::Lam(_, b) => Term::Lam("renamed".into(), r(b)),
        Term::App(f, a) => Term::App(r(f), r(a)),
        Term::Pair(a, b) => Term::Pair(r(a), r(b)),
        Term::Fst(p) => Term::Fst(r(p)),
        Term::Snd(p) => Term::Snd(r(p)),
        Term::Const(c, args) => Term::Const(c.clone(), args.iter().map(rename_hints).collect()),
        Term::Meta(m, sp) => Term::Meta(*m, sp.iter().map(rename_hints).collect()),
        Term::Var(_) | Term::Universe(_) | Term::Nat(_) => t.clone(),
    }
}

fn conv(sig: &Signature, a: &Term, b: &Term, ty: &Ty) -> Result<bool, String> {
    kernel::convertible(sig, &Context::new(), a, b, &ty_term(ty)).map_err(kerr)
}

/// Reflexivity, symmetry and transitivity on a term, its normal form and an
/// identity-wrapped copy, plus symmetry against an unrelated sample.
pub fn prop_convertible_equivalence(sig: &Signature, seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let (a, ty) = g.closed();
    let b = kernel::normalize(sig, &a).map_err(kerr)?;
    let c = Term::App(Box::new(Term::lam("x", Term::Var(0))), Box::new(a.clone()));
    let d = g.term(&mut Vec::new(), &ty, 3);
    ensure(conv(sig, &a, &a, &ty)?, || {
        format!("{} is not convertible with itself", show(sig, &a))
    })?;
    let ab = conv(sig, &a, &b, &ty)?;
    let ba = conv(sig, &b, &a, &ty)?;
    ensure(ab && ba, || {
        format!(
            "{} and its normal form {} disagree",
            show(sig, &a),
            show(sig, &b)
        )
    })?;
    let bc = conv(sig, &b, &c, &ty)?;
    let ac = conv(sig, &a, &c, &ty)?;
    ensure(!(ab && bc) || ac, || {
        "convertibility is not transitive".into()
    })?;
    ensure(conv(sig, &a, &d, &ty)? == conv(sig, &d, &a, &ty)?, || {
        format!(
            "convertibility of {} and {} is not symmetric",
            show(sig, &a),
            show(sig, &d)
        )
    })?;
    // Transitivity with the unrelated sample in the middle.
    let ad = conv(sig, &a, &d, &ty)?;
    let db = conv(sig, &d, &b, &ty)?;
    ensure(!(ad && db) || ab, || {
        "convertibility is not transitive through a sample".into()
    })
}

/// Weak-head and full normal forms check against the type the term was
/// generated at, and when both inferred types are meta-free they agree.
pub fn prop_subject_reduction(sig: &Signature, seed: u64) -> Outcome {
    let (t, ty) = Gen::new(seed).closed();
    let ctx = Context::new();
    let expected = ty_term(&ty);
    let inferred = kernel::infer(sig, &mut MetaStore::new(), &ctx, &t)
        .ok()
        .filter(|t| !t.has_metas());
    for reduct in [
        kernel::whnf(sig, &t).map_err(kerr)?,
        kernel::normalize(sig, &t).map_err(kerr)?,
    ] {
        kernel::check(sig, &mut MetaStore::new(), &ctx, &reduct, &expected).map_err(|e| {
            format!(
                "reduct {} of {} does not check: {e}",
                show(sig, &reduct),
                show(sig, &t)
            )
        })?;
        let rty = kernel::infer(sig, &mut MetaStore::new(), &ctx, &reduct)
            .ok()
            .filter(|t| !t.has_metas());
        if let (Some(ty), Some(rty)) = (&inferred, &rty) {
            let same =
                kernel::convertible(sig, &ctx, ty, rty, &Term::Universe(kernel::TOP_UNIVERSE))
                    .map_err(kerr)?;
            ensure(same, || {
                format!(
                    "{} : {} but its reduct has type {}",
                    show(sig, &t),
                    show(sig, ty),
                    show(sig, rty)
                )
            })?;
        }
    }
    Ok(())
}

/// `\x. f x` is `f`, and `(fst p, snd p)` is `p`.
pub fn prop_eta(sig: &Signature, seed: u64) -> Outcome {
    let mut g = Gen::new(seed);
    let a = g.small_ty(1);
    let b = g.small_ty(1);
    let fun = Ty::Fun(Box::new(a.clone()), Box::new(b.clone()));
    let f = g.term(&mut Vec::new(), &fun, 3);
    let expanded = Term::lam("x", Term::app(shift(&f, 1, 0), Term::Var(0)));
    ensure(
        conv(sig, &expanded, &f, &fun)? && conv(sig, &f, &expanded, &fun)?,
        || format!("eta for functions fails on {}", show(sig, &f)),
    )?;
    let pair = Ty::Pair(Box::new(a), Box::new(b));
    let p = g.term(&mut Vec::new(), &pair, 3);
    let expanded = Term::pair(Term::fst(p.clone()), Term::snd(p.clone()));
    ensure(
        conv(sig, &expanded, &p, &pair)? && conv(sig, &p, &expanded, &pair)?,
        || format!("eta for pairs fails on {}", show(sig, &p)),
    )
}

/// Printing with implicit arguments shown and parsing back gives the same
/// term.
pub fn prop_print_parse_roundtrip(sig: &Signature, seed: u64) -> Outcome {
    let (t, _) = Gen::new(seed).closed();
    let text = print::render_full(sig, &[], &t);
    let expr = surface::parse_expr(&text).map_err(|e| format!("{text}: {}", e.message))?;
    let mut metas = MetaStore::new();
    let back = Resolver {
        sig,
        metas: &mut metas,
    }
    .resolve(&mut Vec::new(), &expr)
    .map_err(|d| format!("{text}: {}", d.message))?;
    ensure(alpha_eq(&back, &t), || {
        format!(
            "{text} parsed back as {}",
            print::render_full(sig, &[], &back)
        )
    })
}

/// `⊕` on amounts `m` and `n` has index `m + n` as a literal.
pub fn oplus_exhaustive(sig: &Signature, bound: u64) -> Outcome {
    for m in 0..=bound {
        for n in 0..=bound {
            let k = telic::prelude::oplus_index(sig, m, n)?;
            ensure(k == m + n, || format!("{m} ⊕ {n} has index {k}"))?;
        }
    }
    Ok(())
}

pub type Property = fn(&Signature, u64) -> Outcome;

pub const PROPERTIES: &[(&str, Property)] = &[
    ("generated terms are well typed", prop_well_typed),
    ("normalize is idempotent", prop_normalize_idempotent),
    ("shift then subst cancels", prop_shift_subst_cancel),
    ("alpha_eq is an equivalence", prop_alpha_eq_equivalence),
    (
        "convertible is an equivalence",
        prop_convertible_equivalence,
    ),
    ("reduction preserves types", prop_subject_reduction),
    ("eta for functions and pairs", prop_eta),
    (
        "printing round-trips through the parser",
        prop_print_parse_roundtrip,
    ),
];

/// Declares `name : ty` as a postulate.
pub fn postulate(sig: &mut Signature, name: &str, ty: Term) {
    kernel::declare(
        sig,
        Declaration::Postulate {
            name: Name::from(name),
            ty,
            implicit: Vec::new(),
        },
        kernel::DEFAULT_FUEL,
    )
    .unwrap_or_else(|e| panic!("postulate {name}: {e}"));
}

/// A session with the framework and `src` loaded; every declaration must pass.
pub fn session_with(src: &str) -> telic::driver::Session {
    let mut s = telic::corpus::embedded_session();
    for (path, text) in telic::corpus::AUXILIARY {
        s.add_source(*path, text);
    }
    let report = s.check_source("corpus/test.tel", src, Some(std::path::Path::new("corpus")));
    for r in &report.reports {
        assert!(r.passed(), "{}:{}: {:?}", r.line, r.kind, r.message);
    }
    s
}

/// Elaborates a closed expression, solving its implicit arguments.
pub fn elab(sig: &Signature, src: &str) -> Term {
    let expr = surface::parse_expr(src).unwrap_or_else(|e| panic!("{src}: {}", e.message));
    let mut metas = MetaStore::new();
    let t = Resolver {
        sig,
        metas: &mut metas,
    }
    .resolve(&mut Vec::new(), &expr)
    .unwrap_or_else(|d| panic!("{src}: {}", d.message));
    let mut tc = kernel::Tc::with_metas(sig, metas, kernel::DEFAULT_FUEL);
    let ctx = Context::new();
    tc.infer(&ctx, &t)
        .and_then(|_| tc.solve_postponed())
        .unwrap_or_else(|e| panic!("{src}: {e}"));
    tc.finish(&ctx, &t).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// Resolves a closed expression without checking it; holes stay metas.
pub fn resolve(sig: &Signature, metas: &mut MetaStore, src: &str) -> Term {
    let expr = surface::parse_expr(src).unwrap_or_else(|e| panic!("{src}: {}", e.message));
    Resolver { sig, metas }
        .resolve(&mut Vec::new(), &expr)
        .unwrap_or_else(|d| panic!("{src}: {}", d.message))
}
