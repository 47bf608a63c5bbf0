//! Type-theoretic kernel: reduction, conversion, bidirectional checking and
//! declaration of constants and rewrite rules.

mod builtins;
mod conv;
mod declare;
mod error;
mod meta;
mod reduce;
mod signature;
mod typing;

pub use builtins::PRIMITIVES;
pub use declare::{declare, Declaration};
pub use error::{ErrorClass, KResult, KernelError};
pub use meta::{MetaEntry, MetaStore};
pub use signature::{Entry, EntryKind, Pattern, RewriteRule, Signature};

use crate::print;
use crate::term::{Context, Name, Term};

pub const DEFAULT_FUEL: u64 = 100_000;

/// The highest universe level. Source syntax reaches only `Type` and `Type1`.
pub const TOP_UNIVERSE: u8 = 2;

/// A conversion problem set aside until more metas are solved.
#[derive(Clone, Debug)]
struct Constraint {
    lhs: Term,
    rhs: Term,
}

/// Checker state for one elaboration unit: the frozen signature, the metas
/// created so far, and the remaining reduction budget.
pub struct Tc<'s> {
    pub sig: &'s Signature,
    pub metas: MetaStore,
    fuel: u64,
    postponed: Vec<Constraint>,
}

impl<'s> Tc<'s> {
    pub fn new(sig: &'s Signature, fuel: u64) -> Self {
        Tc {
            sig,
            metas: MetaStore::new(),
            fuel,
            postponed: Vec::new(),
        }
    }

    pub fn with_metas(sig: &'s Signature, metas: MetaStore, fuel: u64) -> Self {
        Tc {
            sig,
            metas,
            fuel,
            postponed: Vec::new(),
        }
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    fn tick(&mut self) -> KResult<()> {
        if self.fuel == 0 {
            return Err(KernelError::FuelExhausted);
        }
        self.fuel -= 1;
        Ok(())
    }

    /// Renders a term for a message; solved metas are substituted and the
    /// result is normalized when the budget allows.
    pub fn show(&mut self, ctx: &Context, t: &Term) -> String {
        let z = self.metas.zonk(t);
        let saved = self.fuel;
        self.fuel = self.fuel.max(DEFAULT_FUEL);
        let n = self.normalize(&z).unwrap_or(z);
        self.fuel = saved;
        print::render(self.sig, &ctx.names(), &n)
    }

    pub(crate) fn mismatch(&mut self, ctx: &Context, expected: &Term, found: &Term) -> KernelError {
        KernelError::TypeMismatch {
            expected: self.show(ctx, expected),
            found: self.show(ctx, found),
        }
    }

    /// Retries postponed constraints until none remain or none make progress.
    pub fn solve_postponed(&mut self) -> KResult<()> {
        loop {
            let pending = std::mem::take(&mut self.postponed);
            if pending.is_empty() {
                return Ok(());
            }
            let before = pending.len();
            for c in &pending {
                let (l, r) = (self.metas.zonk(&c.lhs), self.metas.zonk(&c.rhs));
                if !self.conv(&l, &r)? {
                    return Err(self.mismatch(&Context::new(), &r, &l));
                }
            }
            if self.postponed.len() >= before && !self.prune_one()? {
                let c = &self.postponed[0];
                let (l, r) = (self.metas.zonk(&c.lhs), self.metas.zonk(&c.rhs));
                let names: Vec<Name> = Vec::new();
                return Err(KernelError::UnsolvedMeta(format!(
                    "cannot solve constraint {} =?= {}",
                    print::render(self.sig, &names, &l),
                    print::render(self.sig, &names, &r)
                )));
            }
        }
    }

    /// Solves the first stuck constraint that admits a pruned solution and
    /// drops it; the rest stay postponed.
    fn prune_one(&mut self) -> KResult<bool> {
        let stuck = std::mem::take(&mut self.postponed);
        for (i, c) in stuck.iter().enumerate() {
            let (l, r) = (self.metas.zonk(&c.lhs), self.metas.zonk(&c.rhs));
            if self.solve_pruned(&l, &r)? {
                self.postponed.extend(
                    stuck
                        .into_iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, c)| c),
                );
                return Ok(true);
            }
        }
        self.postponed = stuck;
        Ok(false)
    }

    /// Zonks a finished term and insists that no metas remain.
    pub fn finish(&mut self, ctx: &Context, t: &Term) -> KResult<Term> {
        let z = self.metas.zonk(t);
        if let Some(m) = self.metas.unsolved_in(&z).first() {
            let entry = self.metas.get(*m);
            let ty = entry.ty.clone();
            let at = match ty {
                Some(ty) => {
                    let mctx = entry.ctx.clone().unwrap_or_default();
                    format!("?{m} : {}", self.show(&mctx, &ty))
                }
                None => format!("?{m}"),
            };
            return Err(KernelError::UnsolvedMeta(format!(
                "{at} in {}",
                print::render(self.sig, &ctx.names(), &z)
            )));
        }
        Ok(z)
    }
}

/// Weak-head normal form with the default budget.
pub fn whnf(sig: &Signature, t: &Term) -> KResult<Term> {
    Tc::new(sig, DEFAULT_FUEL).whnf(t)
}

/// Deep normal form with the default budget.
pub fn normalize(sig: &Signature, t: &Term) -> KResult<Term> {
    Tc::new(sig, DEFAULT_FUEL).normalize(t)
}

/// Definitional equality of meta-free terms at `at_type`.
pub fn convertible(
    sig: &Signature,
    ctx: &Context,
    t1: &Term,
    t2: &Term,
    at_type: &Term,
) -> KResult<bool> {
    if [t1, t2, at_type].iter().any(|t| t.has_metas()) {
        return Err(KernelError::UnsolvedMeta(
            "convertibility is only decided for meta-free terms".into(),
        ));
    }
    Tc::new(sig, DEFAULT_FUEL).convertible_at(ctx, t1, t2, at_type)
}

/// The type of `t`, with solved metas substituted.
pub fn infer(sig: &Signature, metas: &mut MetaStore, ctx: &Context, t: &Term) -> KResult<Term> {
    let mut tc = Tc::with_metas(sig, std::mem::take(metas), DEFAULT_FUEL);
    let out = tc
        .infer(ctx, t)
        .and_then(|ty| tc.solve_postponed().map(|_| tc.metas.zonk(&ty)));
    *metas = tc.metas;
    out
}

pub fn check(
    sig: &Signature,
    metas: &mut MetaStore,
    ctx: &Context,
    t: &Term,
    expected: &Term,
) -> KResult<()> {
    let mut tc = Tc::with_metas(sig, std::mem::take(metas), DEFAULT_FUEL);
    let out = tc
        .check(ctx, t, expected)
        .and_then(|_| tc.solve_postponed());
    *metas = tc.metas;
    out
}
