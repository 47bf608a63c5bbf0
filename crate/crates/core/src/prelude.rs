//! The framework prelude, shipped as `.tel` source and loaded through the
//! same parser and elaborator as user lexica.

use std::borrow::Cow;
use std::fmt;

use serde::Serialize;

use crate::kernel::{self, Declaration, ErrorClass, MetaStore, Signature, Tc};
use crate::print;
use crate::surface::{self, DeclKind};
use crate::term::{subst_many, Context, Term};

pub const BUILTINS: &str = include_str!("../prelude/builtins.tel");
pub const FRAMEWORK: &str = include_str!("../prelude/framework.tel");

/// Environment variable naming a file that replaces the embedded framework.
pub const PRELUDE_ENV: &str = "TELIC_PRELUDE";

/// Every constant the framework declares, in declaration order.
pub const CATALOG: &[&str] = &[
    "Bd",
    "B",
    "U",
    "BdElim",
    "BdElim1",
    "NP",
    "El_NP",
    "NPfull",
    "El_NPfull",
    "Lift_NP",
    "Σ^NP",
    "Entity",
    "isA",
    "El_isA",
    "isArefl",
    "isAtrans",
    "Degree",
    "quantity",
    "Units",
    "nu",
    "AmountOf",
    "isCount",
    "NPIsOneNP",
    "OneNPIsNP",
    "ΣIsCount",
    "⊕",
    "several",
    "IntAdj",
    "El_IA",
    "IANPIsNP",
    "IARespectsIsA",
    "⊕PreservesIA",
    "Act",
    "act_NP",
    "act_Entity",
    "act_⋆",
    "Und",
    "und_NP",
    "und_Entity",
    "und_⋆",
    "UndFull",
    "Evt",
    "El_Evt",
    "Evt_A",
    "Evt_Und",
    "EvtFull",
    "El_EvtA",
    "El_EvtUnd",
    "Tel",
    "Atel",
    "Tel_A",
    "Tel_Und",
    "TelFull",
    "Atel_A",
    "Atel_Und",
    "AtelFull",
    "State",
    "El_State",
    "Result",
    "isCul",
    "Cul",
    "Cul_A",
    "Cul_Und",
    "CulFull",
    "CulOrAtel",
    "Occ",
    "Σ^Evt",
    "EvtAmtIsNP",
    "EvtEntIsNP",
    "funext",
];

/// Number of rewrite rules in the framework: two computation rules for each
/// Bd eliminator plus the four closure and culmination equalities.
pub const FRAMEWORK_RULES: usize = 8;

/// The framework source, honouring the environment override.
pub fn framework_source() -> std::io::Result<Cow<'static, str>> {
    match std::env::var_os(PRELUDE_ENV) {
        Some(path) => std::fs::read_to_string(path).map(Cow::Owned),
        None => Ok(Cow::Borrowed(FRAMEWORK)),
    }
}

/// A prelude declaration that failed to load.
#[derive(Clone, Debug, PartialEq)]
pub struct PreludeError {
    pub entry: String,
    pub line: u32,
    pub class: ErrorClass,
    pub message: String,
}

impl fmt::Display for PreludeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "prelude entry `{}` (line {}): {}: {}",
            self.entry, self.line, self.class, self.message
        )
    }
}

impl std::error::Error for PreludeError {}

/// Declares every entry of `src` into `sig`, stopping at the first failure.
pub fn load_source(sig: &mut Signature, src: &str, fuel: u64) -> Result<usize, PreludeError> {
    let (decls, errors) = surface::parse_file(src);
    if let Some(e) = errors.first() {
        return Err(PreludeError {
            entry: "<parse>".into(),
            line: e.span.line,
            class: e.class,
            message: e.message.clone(),
        });
    }
    for decl in &decls {
        if let Err(d) = surface::elab::run(sig, decl, fuel) {
            return Err(PreludeError {
                entry: label(src, decl),
                line: decl.span.line,
                class: d.class,
                message: d.message,
            });
        }
    }
    Ok(decls.len())
}

pub fn load_builtins(sig: &mut Signature) -> Result<usize, PreludeError> {
    load_source(sig, BUILTINS, kernel::DEFAULT_FUEL)
}

/// Loads the builtins and the embedded framework into `sig`.
pub fn load_prelude(sig: &mut Signature) -> Result<usize, PreludeError> {
    Ok(load_builtins(sig)? + load_source(sig, FRAMEWORK, kernel::DEFAULT_FUEL)?)
}

/// A fresh signature holding the builtins and the embedded framework.
pub fn signature() -> Signature {
    let mut sig = Signature::new();
    load_prelude(&mut sig).expect("embedded prelude loads");
    sig
}

fn label(src: &str, decl: &surface::Decl) -> String {
    match &decl.kind {
        DeclKind::Rewrite { lhs, .. } => {
            format!("rewrite {}", src[lhs.span.start..lhs.span.end].trim())
        }
        kind => kind
            .name()
            .map(str::to_string)
            .unwrap_or_else(|| kind.keyword().to_string()),
    }
}

/// Outcome of one self-check entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EntryCheck {
    pub entry: String,
    pub kind: &'static str,
    pub line: u32,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error_class: Option<ErrorClass>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct SelfCheck {
    pub entries: Vec<EntryCheck>,
}

impl SelfCheck {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &EntryCheck> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

/// Self-check of the embedded prelude.
pub fn prelude_self_check() -> SelfCheck {
    self_check_source(FRAMEWORK)
}

/// Loads the builtins and `framework`, re-checks every declared entry, fires
/// every rewrite on a synthetic instance, and checks the numeric index of
/// `⊕`. Failures are recorded and the run continues.
pub fn self_check_source(framework: &str) -> SelfCheck {
    let fuel = kernel::DEFAULT_FUEL;
    let mut sig = Signature::new();
    let mut report = SelfCheck::default();
    for src in [BUILTINS, framework] {
        let (decls, errors) = surface::parse_file(src);
        for e in errors {
            report.entries.push(EntryCheck {
                entry: "<parse>".into(),
                kind: "parse",
                line: e.span.line,
                passed: false,
                error_class: Some(e.class),
                message: Some(e.message),
            });
        }
        for decl in &decls {
            let before = sig.rule_count();
            let outcome = surface::elab::run(&mut sig, decl, fuel).and_then(|_| {
                let verdict = match &decl.kind {
                    DeclKind::Rewrite { .. } => match sig.rules().nth(before) {
                        Some(rule) => fire_synthetic(&sig, &rule.telescope, &rule.lhs, &rule.rhs),
                        None => Err("rule was not recorded".to_string()),
                    },
                    kind => match kind.name() {
                        Some(name) => recheck_entry(&sig, name),
                        None => Ok(()),
                    },
                };
                verdict.map_err(|message| surface::Diagnostic {
                    class: ErrorClass::TypeMismatch,
                    message,
                    span: decl.span,
                })
            });
            report.entries.push(EntryCheck {
                entry: label(src, decl),
                kind: decl.kind.keyword(),
                line: decl.span.line,
                passed: outcome.is_ok(),
                error_class: outcome.as_ref().err().map(|d| d.class),
                message: outcome.err().map(|d| d.message),
            });
        }
    }
    let oplus = oplus_index(&sig, 1, 1);
    report.entries.push(EntryCheck {
        entry: "⊕ on amounts 1 and 1".into(),
        kind: "synthetic",
        line: 0,
        passed: oplus.is_ok(),
        error_class: oplus.as_ref().err().map(|_| ErrorClass::TypeMismatch),
        message: oplus.err(),
    });
    report
}

/// Re-infers a declared entry from scratch with a fresh checker.
fn recheck_entry(sig: &Signature, name: &str) -> Result<(), String> {
    let entry = sig
        .get(name)
        .ok_or_else(|| format!("`{name}` missing after declaration"))?;
    let ctx = Context::new();
    let mut tc = Tc::new(sig, kernel::DEFAULT_FUEL);
    tc.infer_sort(&ctx, &entry.ty).map_err(|e| e.to_string())?;
    if let Some(body) = &entry.body {
        kernel::check(sig, &mut MetaStore::new(), &ctx, body, &entry.ty)
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Instantiates a rule's telescope with fresh postulates and checks that the
/// rule fires and that both sides have convertible types.
fn fire_synthetic(
    sig: &Signature,
    telescope: &Context,
    lhs: &Term,
    rhs: &Term,
) -> Result<(), String> {
    let mut scratch = sig.clone();
    let mut args = Vec::new();
    for (k, (x, ty)) in telescope.entries().iter().enumerate() {
        let name = format!("{x}@{k}");
        let ty = subst_many(ty, &args);
        kernel::declare(
            &mut scratch,
            Declaration::Postulate {
                name: name.as_str().into(),
                ty,
                implicit: Vec::new(),
            },
            kernel::DEFAULT_FUEL,
        )
        .map_err(|e| format!("telescope variable `{x}`: {e}"))?;
        args.push(Term::constant(&name));
    }
    let (l, r) = (subst_many(lhs, &args), subst_many(rhs, &args));
    let ctx = Context::new();
    let lty =
        kernel::infer(&scratch, &mut MetaStore::new(), &ctx, &l).map_err(|e| e.to_string())?;
    let rty =
        kernel::infer(&scratch, &mut MetaStore::new(), &ctx, &r).map_err(|e| e.to_string())?;
    if !kernel::convertible(&scratch, &ctx, &lty, &rty, &Term::Universe(1))
        .map_err(|e| e.to_string())?
    {
        return Err(format!(
            "instance changes type from {} to {}",
            print::render(&scratch, &[], &lty),
            print::render(&scratch, &[], &rty)
        ));
    }
    let fired = kernel::whnf(&scratch, &l).map_err(|e| e.to_string())?;
    let target = kernel::whnf(&scratch, &r).map_err(|e| e.to_string())?;
    if !crate::term::alpha_eq(&fired, &target) {
        return Err(format!(
            "rule does not fire: {} stays {}",
            print::render(&scratch, &[], &l),
            print::render(&scratch, &[], &fired)
        ));
    }
    Ok(())
}

/// Sums two postulated amounts with `⊕` and returns the literal index of the
/// result type, failing unless it equals `m + n`.
pub fn oplus_index(sig: &Signature, m: u64, n: u64) -> Result<u64, String> {
    let mut scratch = sig.clone();
    let amount = |k: u64| {
        Term::apply_const(
            "AmountOf",
            vec![
                Term::constant("np@"),
                Term::constant("quantity"),
                Term::constant("nu"),
                Term::Nat(k),
            ],
        )
    };
    let instance = |k: u64| Term::apply_const("El_NP", vec![Term::constant("B"), amount(k)]);
    let decls = [
        ("np@", Term::apply_const("NP", vec![Term::constant("U")])),
        ("x@", instance(m)),
        ("y@", instance(n)),
    ];
    for (name, ty) in decls {
        kernel::declare(
            &mut scratch,
            Declaration::Postulate {
                name: name.into(),
                ty,
                implicit: Vec::new(),
            },
            kernel::DEFAULT_FUEL,
        )
        .map_err(|e| e.to_string())?;
    }
    let mut metas = MetaStore::new();
    let mask = scratch
        .get("⊕")
        .ok_or("`⊕` is not declared")?
        .implicit
        .clone();
    let mut spine: Vec<Term> = mask
        .iter()
        .take_while(|i| **i)
        .map(|_| metas.fresh_hole(0))
        .collect();
    spine.extend([Term::constant("x@"), Term::constant("y@")]);
    let term = Term::Const("⊕".into(), spine);
    let ctx = Context::new();
    let ty = kernel::infer(&scratch, &mut metas, &ctx, &term).map_err(|e| e.to_string())?;
    let ty = kernel::normalize(&scratch, &metas.zonk(&ty)).map_err(|e| e.to_string())?;
    match &ty {
        Term::Const(el, args) if &**el == "El_NP" => match args.get(1) {
            Some(Term::Const(a, amount_args)) if &**a == "AmountOf" => match amount_args.get(3) {
                Some(Term::Nat(k)) if *k == m + n => Ok(*k),
                other => Err(format!("index is {other:?}, expected {}", m + n)),
            },
            _ => Err(format!(
                "unexpected result type {}",
                print::render(&scratch, &[], &ty)
            )),
        },
        _ => Err(format!(
            "unexpected result type {}",
            print::render(&scratch, &[], &ty)
        )),
    }
}
