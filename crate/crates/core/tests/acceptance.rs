//! Acceptance run: one verdict line per criterion, non-zero exit if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use telic::corpus;
use telic::kernel::{self, ErrorClass, MetaStore};
use telic::prelude;
use telic::term::Context;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn root() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn telic(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_telic"))
        .args(args)
        .env_remove("TELIC_PRELUDE")
        .output()
        .expect("binary runs")
}

fn prelude_integrity() -> Verdict {
    let started = Instant::now();
    let out = telic(&["selftest"]);
    let elapsed = started.elapsed();
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let report = prelude::prelude_self_check();
    let failed = report.failures().count();
    let sig = prelude::signature();
    let missing: Vec<_> = prelude::CATALOG
        .iter()
        .filter(|c| !sig.contains(c))
        .collect();
    if !out.status.success() {
        return Err(format!("selftest exited with {:?}", out.status.code()));
    }
    if failed > 0 || !missing.is_empty() {
        return Err(format!("{failed} entries failed, missing {missing:?}"));
    }
    if !text.starts_with(&format!(
        "prelude: {} entries checked, 0 failed",
        report.entries.len()
    )) {
        return Err(format!(
            "unexpected report: {}",
            text.lines().next().unwrap_or_default()
        ));
    }
    if elapsed >= Duration::from_secs(1) {
        return Err(format!("selftest took {elapsed:?}"));
    }
    Ok(format!(
        "{} catalog constants, {} entries, 0 failed, {elapsed:.0?}",
        prelude::CATALOG.len(),
        report.entries.len()
    ))
}

fn corpus_fidelity() -> Verdict {
    let summary = corpus::run_corpus();
    if summary.cases.len() != 19 {
        return Err(format!("{} cases", summary.cases.len()));
    }
    let failed: Vec<String> = summary
        .cases
        .iter()
        .filter(|c| !c.passed())
        .map(|c| format!("{}: {}", c.case.file, c.problems.join("; ")))
        .collect();
    if !failed.is_empty() {
        return Err(failed.join(" | "));
    }
    let uncovered = summary.coverage.uncovered();
    if !uncovered.is_empty() {
        return Err(format!("uncovered constants {uncovered:?}"));
    }
    // The three rejections that carry the argument, by case and class.
    let first_fail = |file: &str| {
        corpus::CASES
            .iter()
            .find(|c| c.file.ends_with(file))
            .and_then(|c| c.fail_classes.first().copied())
    };
    for file in ["ann_talks.tel", "pop_balloons.tel", "negative.tel"] {
        if first_fail(file) != Some(ErrorClass::TypeMismatch) {
            return Err(format!("{file} does not reject with TypeMismatch"));
        }
    }
    Ok(format!("{} cases pass", summary.cases.len()))
}

struct Golden {
    name: &'static str,
    expr: &'static str,
    file: PathBuf,
}

fn equality_oracle() -> Verdict {
    let goldens = [
        Golden {
            name: "black_cat",
            expr: "El_NP blackCat",
            file: root().join("corpus/black_cat.tel"),
        },
        Golden {
            name: "several",
            expr: "El_NP (several apple quantity nu)",
            file: root().join("corpus/several.tel"),
        },
        Golden {
            name: "culmination",
            expr: "Prf (isCul e)",
            file: root().join("goldens/culmination.tel"),
        },
        Golden {
            name: "jaa_quickly",
            expr: "El_Evt jaaQuickly",
            file: root().join("corpus/john_ate_quickly.tel"),
        },
    ];
    for g in &goldens {
        let expected = std::fs::read(root().join("goldens").join(format!("{}.txt", g.name)))
            .map_err(|e| e.to_string())?;
        let out = telic(&["norm", "-e", g.expr, g.file.to_str().expect("utf-8 path")]);
        if !out.status.success() || out.stdout != expected {
            return Err(format!(
                "{}: got {:?}, expected {:?}",
                g.name,
                String::from_utf8_lossy(&out.stdout),
                String::from_utf8_lossy(&expected)
            ));
        }
    }
    Ok(format!("{} normal forms byte-exact", goldens.len()))
}

fn entailment_witnesses() -> Verdict {
    let cases: [(&str, &str); 6] = [
        ("john_ate_quickly", "check fst : El_Evt jaaQuickly -> El_Evt jaa"),
        ("pop_culminating", "check snd evt1′ : El_Evt evt1 -> Prf (El_State (popped threeBalloons_Und))"),
        ("pop_balloons", "check \\occ. occ : El_Evt evt1 -> El_EvtUnd evt2"),
        ("pop_balloons", "check \\occ. occ : El_EvtUnd evt2 -> El_Evt evt1"),
        (
            "further_entailments",
            "check \\occ. EvtAmtIsNP (eat john_Act) occ \
             : El_Evt (eat john_Act (B, und_NP threeApples)) -> El_Evt (eat john_Act (U, und_NP apple))",
        ),
        (
            "further_entailments",
            "check \\occ. EvtEntIsNP (\\und. eat tom_Act (B, und)) jerryAndMickey occ \
             : El_Evt (eat tom_Act (B, und_Entity ((B, twoMice), jerryAndMickey))) -> El_Evt (eat tom_Act (B, und_NP twoMice))",
        ),
    ];
    for (file, claim) in cases {
        let case = corpus::CASES
            .iter()
            .find(|c| c.file.ends_with(&format!("{file}.tel")))
            .expect("case exists");
        let (result, mut session) = corpus::run_case(case);
        if !result.passed() {
            return Err(format!("{file} does not load"));
        }
        let report = session.check_source("witness.tel", claim, None);
        if report.failures() > 0 || report.passes() != 1 {
            let msg = report
                .reports
                .first()
                .and_then(|r| r.message.clone())
                .unwrap_or_default();
            return Err(format!("{claim}: {msg}"));
        }
    }
    Ok(format!("{} witnesses check", cases.len()))
}

fn property_suite() -> Verdict {
    const CASES: usize = 1000;
    let started = Instant::now();
    let sig = common::signature();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e1c);
    for (name, property) in common::PROPERTIES {
        for _ in 0..CASES {
            let seed: u64 = rng.gen();
            property(&sig, seed).map_err(|e| format!("{name} (seed {seed}): {e}"))?;
        }
    }
    common::oplus_exhaustive(&sig, 20).map_err(|e| format!("⊕ index: {e}"))?;
    let elapsed = started.elapsed();
    if elapsed >= Duration::from_secs(30) {
        return Err(format!("suite took {elapsed:?}"));
    }
    Ok(format!(
        "{} properties x {CASES} cases, ⊕ on 0..=20 squared, {elapsed:.1?}",
        common::PROPERTIES.len()
    ))
}

fn non_identification() -> Verdict {
    let s = common::session_with("postulate P : Prop\npostulate p p' : Prf P\n");
    let (p, q, ty) = (
        common::elab(&s.sig, "p"),
        common::elab(&s.sig, "p'"),
        common::elab(&s.sig, "Prf P"),
    );
    if kernel::convertible(&s.sig, &Context::new(), &p, &q, &ty).map_err(|e| e.to_string())? {
        return Err("p and p' are judgmentally equal".into());
    }
    let mut metas = MetaStore::new();
    let witness = common::resolve(&s.sig, &mut metas, "irr p p'");
    let goal = common::elab(&s.sig, "Id (Prf P) p p'");
    kernel::check(&s.sig, &mut metas, &Context::new(), &witness, &goal)
        .map_err(|e| e.to_string())?;
    let refl = common::resolve(&s.sig, &mut metas, "refl");
    if kernel::check(&s.sig, &mut metas, &Context::new(), &refl, &goal).is_ok() {
        return Err("refl proves Id (Prf P) p p'".into());
    }
    Ok("p ≢ p' while irr p p' : Id (Prf P) p p'".into())
}

fn determinism() -> Verdict {
    let a = telic(&["selftest", "--format", "structured"]);
    let b = telic(&["selftest", "--format", "structured"]);
    if !a.status.success() {
        return Err(format!("selftest exited with {:?}", a.status.code()));
    }
    if a.stdout != b.stdout {
        return Err("structured selftest output differs between runs".into());
    }
    Ok(format!("{} bytes identical", a.stdout.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("prelude integrity", prelude_integrity),
        ("corpus fidelity", corpus_fidelity),
        ("equality oracle", equality_oracle),
        ("entailment witnesses", entailment_witnesses),
        ("kernel property suite", property_suite),
        ("proof irrelevance is not judgmental", non_identification),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
