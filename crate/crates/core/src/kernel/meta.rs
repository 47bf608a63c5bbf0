use crate::term::{subst_many, Context, MetaId, Term};

#[derive(Clone, Debug, Default)]
pub struct MetaEntry {
    /// Context the meta was created in; its spine ranges over these variables.
    /// Unknown until the checker first visits the hole.
    pub ctx: Option<Context>,
    /// Expected type, relative to `ctx`.
    pub ty: Option<Term>,
    /// Solution, relative to `ctx`.
    pub solution: Option<Term>,
}

/// Metavariables of one elaboration unit. Solutions are written once.
#[derive(Clone, Debug, Default)]
pub struct MetaStore {
    entries: Vec<MetaEntry>,
}

impl MetaStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A hole over the innermost `depth` variables, to be typed when first checked.
    pub fn fresh_hole(&mut self, depth: usize) -> Term {
        let id = self.entries.len();
        self.entries.push(MetaEntry::default());
        Term::Meta(id, (0..depth).rev().map(Term::Var).collect())
    }

    pub fn fresh(&mut self, ctx: &Context, ty: Option<Term>) -> Term {
        let id = self.entries.len();
        self.entries.push(MetaEntry {
            ctx: Some(ctx.clone()),
            ty,
            solution: None,
        });
        Term::Meta(id, ctx.spine())
    }

    pub fn get(&self, id: MetaId) -> &MetaEntry {
        &self.entries[id]
    }

    pub(crate) fn get_mut(&mut self, id: MetaId) -> &mut MetaEntry {
        &mut self.entries[id]
    }

    pub fn solution(&self, id: MetaId) -> Option<&Term> {
        self.entries.get(id).and_then(|e| e.solution.as_ref())
    }

    pub(crate) fn assign(&mut self, id: MetaId, value: Term) {
        debug_assert!(
            self.entries[id].solution.is_none(),
            "meta ?{id} solved twice"
        );
        self.entries[id].solution = Some(value);
    }

    /// Instantiates a solved meta at a spine.
    pub fn instantiate(&self, id: MetaId, spine: &[Term]) -> Option<Term> {
        self.solution(id).map(|s| subst_many(s, spine))
    }

    /// Replaces every solved meta, recursively.
    pub fn zonk(&self, t: &Term) -> Term {
        match t {
            Term::Meta(m, spine) => {
                let spine: Vec<Term> = spine.iter().map(|a| self.zonk(a)).collect();
                match self.instantiate(*m, &spine) {
                    Some(v) => self.zonk(&v),
                    None => Term::Meta(*m, spine),
                }
            }
            Term::Var(_) | Term::Universe(_) | Term::Nat(_) => t.clone(),
            Term::Const(c, args) => {
                Term::Const(c.clone(), args.iter().map(|a| self.zonk(a)).collect())
            }
            Term::Pi(x, a, b) => {
                Term::Pi(x.clone(), Box::new(self.zonk(a)), Box::new(self.zonk(b)))
            }
            Term::Sigma(x, a, b) => {
                Term::Sigma(x.clone(), Box::new(self.zonk(a)), Box::new(self.zonk(b)))
            }
            Term::Lam(x, b) => Term::Lam(x.clone(), Box::new(self.zonk(b))),
            Term::App(f, a) => Term::app(self.zonk(f), self.zonk(a)),
            Term::Pair(a, b) => Term::pair(self.zonk(a), self.zonk(b)),
            Term::Fst(p) => Term::fst(self.zonk(p)),
            Term::Snd(p) => Term::snd(self.zonk(p)),
        }
    }

    /// Unsolved metas occurring in `t` after zonking.
    pub fn unsolved_in(&self, t: &Term) -> Vec<MetaId> {
        let mut out = Vec::new();
        self.zonk(t).visit(&mut |s| {
            if let Term::Meta(m, _) = s {
                if !out.contains(m) {
                    out.push(*m);
                }
            }
        });
        out
    }
}
