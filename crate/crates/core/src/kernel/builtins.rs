use super::{KResult, Tc};
use crate::term::Term;

/// Names that may be introduced with `primitive`; the ones with computation
/// rules are handled in `step`.
pub const PRIMITIVES: &[&str] = &[
    "Prop", "Prf", "Nat", "suc", "plus", "Id", "refl", "J", "irr",
];

/// One computation step of a primitive applied to `args`, if it fires.
pub(super) fn step(tc: &mut Tc<'_>, name: &str, args: &[Term]) -> KResult<Option<Term>> {
    match (name, args.len()) {
        ("suc", 1) => match tc.whnf(&args[0])? {
            Term::Nat(n) => Ok(n.checked_add(1).map(Term::Nat)),
            _ => Ok(None),
        },
        ("plus", 2) => {
            let a = tc.whnf(&args[0])?;
            let b = tc.whnf(&args[1])?;
            Ok(match (a, b) {
                (Term::Nat(m), Term::Nat(n)) => m.checked_add(n).map(Term::Nat),
                (Term::Nat(0), _) => Some(args[1].clone()),
                (_, Term::Nat(0)) => Some(args[0].clone()),
                _ => None,
            })
        }
        // J {A} {a} C base {x} p, reducing to base when p is refl.
        ("J", n) if n >= 6 => match tc.whnf(&args[5])? {
            Term::Const(c, _) if &*c == "refl" => {
                Ok(Some(Term::apps(args[3].clone(), args[6..].iter().cloned())))
            }
            _ => Ok(None),
        },
        _ => Ok(None),
    }
}
