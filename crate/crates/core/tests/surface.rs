//! Lexing, parsing and elaboration of `.tel` source.

mod common;

use telic::kernel::{ErrorClass, DEFAULT_FUEL};
use telic::surface::lexer::Kw;
use telic::surface::{self, DeclKind, ExprKind, Tok};

fn toks(src: &str) -> Vec<Tok> {
    let (tokens, errors) = surface::tokenize(src);
    assert!(errors.is_empty(), "{errors:?}");
    tokens.into_iter().map(|t| t.tok).collect()
}

fn ident(s: &str) -> Tok {
    Tok::Ident(s.into())
}

#[test]
fn tokenize_postulate() {
    assert_eq!(
        toks("postulate human : NP U"),
        vec![
            Tok::Kw(Kw::Postulate),
            ident("human"),
            Tok::Colon,
            ident("NP"),
            ident("U")
        ]
    );
}

#[test]
fn tokenize_drops_comments() {
    assert!(toks("-- comment\n").is_empty());
    assert_eq!(toks("U -- trailing\nB"), vec![ident("U"), ident("B")]);
}

#[test]
fn tokenize_event_application() {
    let t = toks("eat john_Act (U , und_NP apple)");
    // eat, john_Act, `(`, U, `,`, und_NP, apple, `)`.
    assert_eq!(t.len(), 8);
    assert_eq!(
        t,
        vec![
            ident("eat"),
            ident("john_Act"),
            Tok::LParen,
            ident("U"),
            Tok::Comma,
            ident("und_NP"),
            ident("apple"),
            Tok::RParen
        ]
    );
}

#[test]
fn tokenize_unicode_and_ascii_aliases() {
    assert_eq!(toks("x ⊕ y"), toks("x (+) y"));
    assert_eq!(toks("Σ (p : A). B"), toks("Sigma (p : A). B"));
    assert_eq!(toks("λx. x"), toks("\\x. x"));
    assert_eq!(
        toks("pop^B evt1′ act_⋆"),
        vec![ident("pop^B"), ident("evt1′"), ident("act_⋆")]
    );
}

#[test]
fn tokenize_spans() {
    let (tokens, _) = surface::tokenize("def\n  x");
    assert_eq!((tokens[1].span.line, tokens[1].span.col), (2, 3));
    assert_eq!((tokens[1].span.start, tokens[1].span.end), (6, 7));
}

#[test]
fn tokenize_illegal_character() {
    let (_, errors) = surface::tokenize("postulate x : § A");
    assert_eq!(errors.len(), 1);
    assert_eq!(errors[0].span.col, 15);
    let (_, errors) = surface::parse_file("postulate x : § A");
    assert_eq!(errors[0].class, ErrorClass::IllegalCharacter);
}

#[test]
fn parse_definition() {
    let (decls, errors) = surface::parse_file(
        "def Tel : (a : Act) -> (und : Und B) -> Type = \\a. \\und. Evt B a und",
    );
    assert!(errors.is_empty());
    let [decl] = decls.as_slice() else {
        panic!("one declaration")
    };
    let DeclKind::Def { name, ty, body } = &decl.kind else {
        panic!("a definition")
    };
    assert_eq!(name, "Tel");
    assert!(matches!(&ty.kind, ExprKind::Pi(binders, _) if binders.len() == 1));
    assert!(matches!(&body.kind, ExprKind::Lam(xs, _) if xs == &["a"]));
}

#[test]
fn parse_rewrite() {
    let (decls, errors) = surface::parse_file(
        "rewrite (a : Act) (und : Und B) : Result (pop a (pair B und)) = popped und",
    );
    assert!(errors.is_empty(), "{errors:?}");
    let DeclKind::Rewrite {
        telescope,
        lhs,
        rhs,
    } = &decls[0].kind
    else {
        panic!("a rewrite")
    };
    assert_eq!(telescope.len(), 2);
    assert!(matches!(&lhs.kind, ExprKind::App(..)));
    assert!(matches!(&rhs.kind, ExprKind::App(..)));
    // `pair B und` is the prefix spelling of `(B, und)`.
    let (same, _) = surface::parse_file(
        "rewrite (a : Act) (und : Und B) : Result (pop a (B, und)) = popped und",
    );
    let DeclKind::Rewrite { lhs: lhs2, .. } = &same[0].kind else {
        panic!("a rewrite")
    };
    assert_eq!(strip(lhs), strip(lhs2));
}

/// The expression without its spans, for comparing two spellings.
fn strip(e: &surface::Expr) -> String {
    let s = format!("{:?}", e.kind);
    let mut out = String::new();
    let mut rest = s.as_str();
    while let Some(i) = rest.find("span: Span {") {
        out.push_str(&rest[..i]);
        let j = rest[i..].find('}').expect("closing brace");
        rest = &rest[i + j + 1..];
    }
    out.push_str(rest);
    out
}

#[test]
fn parse_associativity() {
    let e = surface::parse_expr("f a b").unwrap();
    let ExprKind::App(head, _, false) = &e.kind else {
        panic!("application")
    };
    assert!(matches!(&head.kind, ExprKind::App(..)));
    let e = surface::parse_expr("A -> B -> C").unwrap();
    let ExprKind::Arrow(_, cod) = &e.kind else {
        panic!("arrow")
    };
    assert!(matches!(&cod.kind, ExprKind::Arrow(..)));
    let e = surface::parse_expr("\\x. f x -> B").unwrap();
    assert!(matches!(&e.kind, ExprKind::Lam(..)));
    let e = surface::parse_expr("(a, b, c)").unwrap();
    let ExprKind::Pair(_, rest) = &e.kind else {
        panic!("pair")
    };
    assert!(matches!(&rest.kind, ExprKind::Pair(..)));
    let e = surface::parse_expr("f {B} x").unwrap();
    let ExprKind::App(head, _, false) = &e.kind else {
        panic!("application")
    };
    assert!(matches!(&head.kind, ExprKind::App(_, _, true)));
}

#[test]
fn parse_truncated_check() {
    let (decls, errors) = surface::parse_file("check fst : ");
    assert!(decls.is_empty());
    let [e] = errors.as_slice() else {
        panic!("one error")
    };
    assert_eq!(e.class, ErrorClass::ParseError);
    assert_eq!(e.span.start, "check fst : ".len());
    assert!(!e.expected.is_empty());
}

#[test]
fn parse_recovers_at_next_declaration() {
    let src = "postulate A : Type\ncheck fst :\npostulate B : ) Type\npostulate C : Type\n";
    let (decls, errors) = surface::parse_file(src);
    assert_eq!(errors.len(), 2);
    assert_eq!(errors[0].span.line, 3);
    assert_eq!(errors[1].span.line, 3);
    let names: Vec<_> = decls.iter().filter_map(|d| d.kind.name()).collect();
    assert_eq!(names, ["A", "C"]);
}

#[test]
fn parse_multi_name_postulate() {
    let (decls, errors) = surface::parse_file("postulate human apple : NP U");
    assert!(errors.is_empty());
    let names: Vec<_> = decls.iter().filter_map(|d| d.kind.name()).collect();
    assert_eq!(names, ["human", "apple"]);
}

fn run(sig: &mut telic::kernel::Signature, src: &str) -> surface::Verdict {
    let (decls, errors) = surface::parse_file(src);
    assert!(errors.is_empty(), "{errors:?}");
    surface::elaborate(sig, &decls[0], DEFAULT_FUEL)
}

#[test]
fn elaborate_projection_entailment() {
    let mut s = common::session_with(include_str!("../corpus/john_ate_quickly.tel"));
    let v = run(
        &mut s.sig,
        "entail jaaq_to_jaa : El_Evt jaaQuickly => El_Evt jaa = fst",
    );
    assert!(v.passed, "{:?}", v.message);
    assert!(s.sig.contains("jaaq_to_jaa"));
}

#[test]
fn elaborate_expected_failure() {
    let mut s = common::session_with(include_str!("../corpus/ann_talks.tel"));
    let v = run(&mut s.sig, "fail TypeMismatch check talk ann : Prop");
    assert!(v.passed);
    assert_eq!(v.class, Some(ErrorClass::TypeMismatch));
    let v = run(&mut s.sig, "fail UnknownConstant check talk ann : Prop");
    assert!(!v.passed, "the wrong class must not count as a pass");
    let v = run(
        &mut s.sig,
        "fail TypeMismatch check talk annQuaHuman : Prop",
    );
    assert!(!v.passed, "an unexpected success must not count as a pass");
}

#[test]
fn elaborate_resulting_state() {
    let mut s = common::session_with(include_str!("../corpus/pop_culminating.tel"));
    let v = run(
        &mut s.sig,
        "check snd evt1′ : El_Evt evt1 -> Prf (El_State (popped threeBalloons_Und))",
    );
    assert!(v.passed, "{:?}", v.message);
}

#[test]
fn elaborate_norm_compares_normal_forms() {
    let mut sig = telic::prelude::signature();
    assert!(run(&mut sig, "norm plus 2 3 = 5").passed);
    let v = run(&mut sig, "norm plus 2 3 = 6");
    assert!(!v.passed);
    assert_eq!(v.class, Some(ErrorClass::TypeMismatch));
}

#[test]
fn elaborate_rejects_bad_implicit() {
    let mut s = common::session_with("postulate human : NP U\n");
    let v = run(&mut s.sig, "check act_NP {B} {human} : Act");
    assert_eq!(v.class, Some(ErrorClass::BadImplicit));
}

#[test]
fn elaborate_leaves_no_metas() {
    let mut s = common::session_with("postulate human : NP U\n");
    let v = run(&mut s.sig, "def x : Id Nat _ _ = refl");
    assert!(!v.passed);
    assert_eq!(v.class, Some(ErrorClass::UnsolvedMeta));
    assert!(!s.sig.contains("x"));
}

#[test]
fn error_spans_lie_within_declarations() {
    let mut session = common::session_with("");
    let src = include_str!("../corpus/negative.tel").replace("fail ", "");
    let report = session.check_source("neg.tel", &src, None);
    let (decls, _) = surface::parse_file(&src);
    let failed: Vec<_> = report.reports.iter().filter(|r| !r.passed()).collect();
    assert!(!failed.is_empty());
    for r in failed {
        assert!(
            decls
                .iter()
                .any(|d| d.span.start <= r.start && r.end <= d.span.end),
            "{r:?}"
        );
    }
}

#[test]
fn reports_are_deterministic() {
    let src = include_str!("../corpus/telicity.tel");
    let a = common::session_with("").check_source("t.tel", src, None);
    let b = common::session_with("").check_source("t.tel", src, None);
    assert_eq!(telic::driver::structured(&a), telic::driver::structured(&b));
}

#[test]
fn failed_postulate_halts_file() {
    let mut session = common::session_with("");
    let report = session.check_source("h.tel", "postulate x : Nope\ncheck 1 : Nat\n", None);
    assert_eq!(report.reports.len(), 1);
    assert!(report.reports[0]
        .message
        .as_deref()
        .unwrap()
        .ends_with("rest of file skipped"));
    let report = session.check_source("c.tel", "check 1 : Prop\ncheck 1 : Nat\n", None);
    assert_eq!((report.passes(), report.failures()), (1, 1));
}
