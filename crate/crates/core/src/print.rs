//! Rendering of core terms as surface syntax.
//!
//! The display form hides implicit arguments; the full form writes them as
//! `{...}` so that the output parses back to the same term.

use crate::kernel::Signature;
use crate::surface::lexer::is_reserved;
use crate::term::{Name, Term};

const BINDER: u8 = 0;
const INFIX: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

pub fn render(sig: &Signature, names: &[Name], t: &Term) -> String {
    Printer { sig, full: false }.render(names, t)
}

pub fn render_full(sig: &Signature, names: &[Name], t: &Term) -> String {
    Printer { sig, full: true }.render(names, t)
}

struct Printer<'a> {
    sig: &'a Signature,
    full: bool,
}

impl Printer<'_> {
    fn render(&self, names: &[Name], t: &Term) -> String {
        let mut scope: Vec<String> = names.iter().map(|n| n.to_string()).collect();
        let mut out = String::new();
        self.go(&mut scope, t, BINDER, &mut out);
        out
    }

    fn fresh(&self, hint: &str, scope: &[String]) -> String {
        let mut name = if hint.is_empty() || hint == "_" {
            "x".to_string()
        } else {
            hint.to_string()
        };
        while scope.contains(&name) || self.sig.contains(&name) || is_reserved(&name) {
            name.push('\'');
        }
        name
    }

    fn go(&self, scope: &mut Vec<String>, t: &Term, prec: u8, out: &mut String) {
        let level = level_of(self, t);
        let paren = level < prec;
        if paren {
            out.push('(');
        }
        match t {
            Term::Var(i) => match scope.len().checked_sub(i + 1) {
                Some(k) => out.push_str(&scope[k]),
                None => out.push_str(&format!("#{i}")),
            },
            Term::Nat(n) => out.push_str(&n.to_string()),
            Term::Universe(0) => out.push_str("Type"),
            Term::Universe(l) => out.push_str(&format!("Type{l}")),
            Term::Meta(m, _) => out.push_str(&format!("?{m}")),
            Term::Const(c, args) => self.constant(scope, c, args, out),
            Term::App(f, a) => {
                self.go(scope, f, APP, out);
                out.push(' ');
                self.go(scope, a, ATOM, out);
            }
            Term::Fst(p) | Term::Snd(p) => {
                out.push_str(if matches!(t, Term::Fst(_)) {
                    "fst "
                } else {
                    "snd "
                });
                self.go(scope, p, ATOM, out);
            }
            Term::Pair(a, b) => {
                out.push('(');
                self.go(scope, a, BINDER, out);
                out.push_str(", ");
                self.go(scope, b, BINDER, out);
                out.push(')');
            }
            Term::Lam(..) => {
                let mut body = t;
                let mut bound = 0;
                out.push('\\');
                while let Term::Lam(x, b) = body {
                    let name = self.fresh(x, scope);
                    if bound > 0 {
                        out.push(' ');
                    }
                    out.push_str(&name);
                    scope.push(name);
                    bound += 1;
                    body = b;
                }
                out.push_str(". ");
                self.go(scope, body, BINDER, out);
                scope.truncate(scope.len() - bound);
            }
            Term::Pi(x, a, b) if b.mentions_var(0) => {
                let name = self.fresh(x, scope);
                out.push_str(&format!("({name} : "));
                self.go(scope, a, BINDER, out);
                out.push_str(") -> ");
                scope.push(name);
                self.go(scope, b, BINDER, out);
                scope.pop();
            }
            Term::Pi(_, a, b) => {
                self.go(scope, a, INFIX, out);
                out.push_str(" -> ");
                // The unused binder still occupies a de Bruijn slot.
                scope.push(String::new());
                self.go(scope, b, BINDER, out);
                scope.pop();
            }
            Term::Sigma(x, a, b) => {
                let name = if b.mentions_var(0) {
                    self.fresh(x, scope)
                } else {
                    "_".to_string()
                };
                out.push_str(&format!("Σ ({name} : "));
                self.go(scope, a, BINDER, out);
                out.push_str("). ");
                scope.push(name);
                self.go(scope, b, BINDER, out);
                scope.pop();
            }
        }
        if paren {
            out.push(')');
        }
    }

    fn constant(&self, scope: &mut Vec<String>, c: &Name, args: &[Term], out: &mut String) {
        if let Some((l, r)) = self.infix_operands(c, args) {
            self.go(scope, l, INFIX, out);
            out.push_str(if &**c == "plus" { " + " } else { " ⊕ " });
            self.go(scope, r, APP, out);
            return;
        }
        let entry = self.sig.get(c);
        out.push_str(if &**c == "⊕" { "(⊕)" } else { c });
        for (i, a) in args.iter().enumerate() {
            let implicit = entry.is_some_and(|e| e.is_implicit(i));
            if implicit && !self.full {
                continue;
            }
            out.push(' ');
            if implicit {
                out.push('{');
                self.go(scope, a, BINDER, out);
                out.push('}');
            } else {
                self.go(scope, a, ATOM, out);
            }
        }
    }

    /// Operands of `plus` or `⊕` when the application can be written infix
    /// without losing information.
    fn infix_operands<'t>(&self, c: &str, args: &'t [Term]) -> Option<(&'t Term, &'t Term)> {
        match (c, args.len()) {
            ("plus", 2) => Some((&args[0], &args[1])),
            ("⊕", n) if !self.full && n >= 2 => {
                let entry = self.sig.get(c)?;
                let explicit: Vec<&Term> = args
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !entry.is_implicit(*i))
                    .map(|(_, a)| a)
                    .collect();
                (explicit.len() == 2).then(|| (explicit[0], explicit[1]))
            }
            _ => None,
        }
    }
}

fn level_of(p: &Printer<'_>, t: &Term) -> u8 {
    match t {
        Term::Lam(..) | Term::Pi(..) | Term::Sigma(..) => BINDER,
        Term::App(..) | Term::Fst(_) | Term::Snd(_) => APP,
        Term::Const(c, args) => {
            if p.infix_operands(c, args).is_some() {
                INFIX
            } else {
                let entry = p.sig.get(c);
                let shown = args
                    .iter()
                    .enumerate()
                    .any(|(i, _)| p.full || !entry.is_some_and(|e| e.is_implicit(i)));
                if shown {
                    APP
                } else {
                    ATOM
                }
            }
        }
        _ => ATOM,
    }
}
