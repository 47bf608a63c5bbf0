use indexmap::IndexMap;

use crate::term::{Context, Name, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryKind {
    /// Built into the kernel, possibly with a computation rule of its own.
    Primitive,
    Postulate,
    Definition,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: Name,
    pub ty: Term,
    pub kind: EntryKind,
    /// Closed body of a definition.
    pub body: Option<Term>,
    /// One flag per leading binder of `ty`.
    pub implicit: Vec<bool>,
    /// Value-level definitions stay folded in normal forms; type formers unfold.
    pub folded: bool,
}

impl Entry {
    pub fn is_implicit(&self, position: usize) -> bool {
        self.implicit.get(position).copied().unwrap_or(false)
    }
}

/// First-order left-hand-side pattern.
#[derive(Clone, Debug, PartialEq)]
pub enum Pattern {
    /// Binds the telescope variable at this position (outermost is 0).
    Var(usize),
    /// Argument fixed by typing; never inspected.
    Wild,
    Const(Name, Vec<Pattern>),
    Pair(Box<Pattern>, Box<Pattern>),
    Nat(u64),
}

#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub head: Name,
    pub args: Vec<Pattern>,
    pub telescope: Context,
    pub lhs: Term,
    /// Lives in `telescope`.
    pub rhs: Term,
}

#[derive(Clone, Debug, Default)]
pub struct Signature {
    entries: IndexMap<Name, Entry>,
    rules: IndexMap<Name, Vec<RewriteRule>>,
    rule_order: Vec<(Name, usize)>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Entry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rules_for(&self, head: &str) -> &[RewriteRule] {
        self.rules.get(head).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_rules(&self, head: &str) -> bool {
        self.rules.contains_key(head)
    }

    /// All rules in declaration order.
    pub fn rules(&self) -> impl Iterator<Item = &RewriteRule> {
        self.rule_order
            .iter()
            .map(|(head, idx)| &self.rules[head][*idx])
    }

    pub fn rule_count(&self) -> usize {
        self.rule_order.len()
    }

    pub(crate) fn insert(&mut self, entry: Entry) {
        self.entries.insert(entry.name.clone(), entry);
    }

    pub(crate) fn insert_rule(&mut self, rule: RewriteRule) {
        let head = rule.head.clone();
        let bucket = self.rules.entry(head.clone()).or_default();
        self.rule_order.push((head, bucket.len()));
        bucket.push(rule);
    }
}
