//! The worked-example corpus: each case is a `.tel` file with expected
//! verdicts and a golden structured report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::Serialize;

use crate::driver::{self, FileReport, Format, Session};
use crate::kernel::{ErrorClass, DEFAULT_FUEL};
use crate::prelude::{self, SelfCheck};

pub struct CorpusCase {
    /// Path relative to the crate root, as it appears in reports.
    pub file: &'static str,
    /// The worked example the case reproduces.
    pub anchor: &'static str,
    pub source: &'static str,
    pub golden: &'static str,
    pub passes: usize,
    /// Classes of the `fail` directives, in source order.
    pub fail_classes: &'static [ErrorClass],
}

macro_rules! case {
    ($name:literal, $anchor:literal, $passes:literal, [$($class:ident),*]) => {
        CorpusCase {
            file: concat!("corpus/", $name, ".tel"),
            anchor: $anchor,
            source: include_str!(concat!("../corpus/", $name, ".tel")),
            golden: include_str!(concat!("../corpus/", $name, ".golden")),
            passes: $passes,
            fail_classes: &[$(ErrorClass::$class),*],
        }
    };
}

pub const CASES: &[CorpusCase] = &[
    case!("john_basics", "john is an instance of human", 6, []),
    case!(
        "ann_talks",
        "Ann regarded as a human via womanIsHuman",
        10,
        [TypeMismatch]
    ),
    case!(
        "amounts",
        "three humans and three kilograms of apples",
        11,
        []
    ),
    case!("john_and_mary", "John and Mary as two humans", 9, []),
    case!("several", "several apples means n apples for some n", 9, []),
    case!("black_cat", "Tom as an instance of black cat", 8, []),
    case!(
        "striped_black_cat",
        "striped black cats are striped cats",
        9,
        []
    ),
    case!(
        "two_black_cats",
        "two instances of black cat make two black cats",
        14,
        [UniverseMismatch]
    ),
    case!("black_two_cats", "a black instance of two cats", 14, []),
    case!(
        "actors_undergoers",
        "three kinds of actors and undergoers; die and run",
        17,
        [TypeMismatch]
    ),
    case!("john_ate", "John ate apples entails John ate", 11, []),
    case!(
        "pop_balloons",
        "causal-noncausal alternation of pop",
        15,
        [TypeMismatch, TypeMismatch]
    ),
    case!(
        "telicity",
        "telic and atelic readings of eat",
        24,
        [TypeMismatch]
    ),
    case!(
        "pop_culminating",
        "John popped three balloons culminates",
        9,
        []
    ),
    case!(
        "cul_or_atel",
        "pop′ typed by CulOrAtel through Bd elimination",
        19,
        []
    ),
    case!(
        "john_ate_quickly",
        "John ate apples quickly entails John ate apples",
        12,
        []
    ),
    case!(
        "further_entailments",
        "telic-to-atelic and entity-to-amount entailments",
        15,
        [TypeMismatch]
    ),
    case!(
        "perfective",
        "perfective verb forms yield culminating events",
        17,
        [TypeMismatch]
    ),
    case!(
        "negative",
        "structural rejections",
        15,
        [
            TypeMismatch,
            NonlinearPattern,
            RewriteHeadIsDefinition,
            RewriteTypeMismatch,
            DuplicateName,
            UnknownConstant,
            NotAFunction,
            NotAPair,
            UnsolvedMeta,
            UniverseMismatch,
            BadImplicit
        ]
    ),
];

/// Files that cases import, keyed by their path in reports.
pub const AUXILIARY: &[(&str, &str)] = &[(
    "corpus/pop_lexicon.tel",
    include_str!("../corpus/pop_lexicon.tel"),
)];

/// Directory holding the corpus sources and goldens in the source tree.
pub fn source_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub struct CaseResult {
    pub case: &'static CorpusCase,
    pub report: FileReport,
    pub problems: Vec<String>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// A session holding the builtins and the embedded framework, ignoring the
/// environment override so that goldens stay reproducible.
pub fn embedded_session() -> Session {
    let mut s = Session::bare(DEFAULT_FUEL);
    prelude::load_source(&mut s.sig, prelude::FRAMEWORK, DEFAULT_FUEL)
        .expect("embedded prelude loads");
    s
}

pub fn run_case(case: &'static CorpusCase) -> (CaseResult, Session) {
    let mut session = embedded_session();
    for (path, src) in AUXILIARY {
        session.add_source(*path, src);
    }
    let report = session.check_source(case.file, case.source, Path::new(case.file).parent());
    let mut problems = Vec::new();
    for r in report.reports.iter().filter(|r| !r.passed()) {
        problems.push(format!(
            "line {}: {} failed: {}",
            r.line,
            r.kind,
            r.message.as_deref().unwrap_or("no message")
        ));
    }
    if report.passes() != case.passes {
        problems.push(format!(
            "expected {} passing declarations, got {}",
            case.passes,
            report.passes()
        ));
    }
    let classes: Vec<ErrorClass> = report
        .reports
        .iter()
        .filter(|r| r.kind == "fail")
        .filter_map(|r| r.error_class)
        .collect();
    if classes != case.fail_classes {
        problems.push(format!(
            "expected failure classes {:?}, got {classes:?}",
            case.fail_classes
        ));
    }
    let actual = driver::structured(&report);
    if actual != case.golden {
        let line = actual
            .lines()
            .zip(case.golden.lines())
            .position(|(a, g)| a != g)
            .unwrap_or_else(|| actual.lines().count().min(case.golden.lines().count()));
        problems.push(format!(
            "structured report differs from golden at line {}",
            line + 1
        ));
    }
    (
        CaseResult {
            case,
            report,
            problems,
        },
        session,
    )
}

#[derive(Serialize)]
pub struct Coverage {
    /// Every catalog constant with the corpus files that mention it.
    pub map: IndexMap<&'static str, Vec<&'static str>>,
}

impl Coverage {
    pub fn uncovered(&self) -> Vec<&'static str> {
        self.map
            .iter()
            .filter(|(_, files)| files.is_empty())
            .map(|(c, _)| *c)
            .collect()
    }
}

pub struct CorpusSummary {
    pub cases: Vec<CaseResult>,
    pub coverage: Coverage,
}

impl CorpusSummary {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseResult::passed) && self.coverage.uncovered().is_empty()
    }
}

/// Runs every case in a fresh session and builds the coverage map.
pub fn run_corpus() -> CorpusSummary {
    let mut map: IndexMap<&'static str, Vec<&'static str>> =
        prelude::CATALOG.iter().map(|c| (*c, Vec::new())).collect();
    let mut cases = Vec::new();
    for case in CASES {
        let (result, session) = run_case(case);
        for (c, files) in map.iter_mut() {
            if session.used.contains(*c) {
                files.push(case.file);
            }
        }
        cases.push(result);
    }
    CorpusSummary {
        cases,
        coverage: Coverage { map },
    }
}

pub struct Selftest {
    pub prelude: SelfCheck,
    pub corpus: CorpusSummary,
}

pub fn selftest() -> Selftest {
    Selftest {
        prelude: prelude::prelude_self_check(),
        corpus: run_corpus(),
    }
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record<'a> {
    Prelude(&'a prelude::EntryCheck),
    Case {
        file: &'a str,
        anchor: &'a str,
        passes: usize,
        failures: usize,
        ok: bool,
        problems: &'a [String],
    },
    Coverage(&'a Coverage),
    Selftest {
        passed: bool,
    },
}

impl Selftest {
    pub fn passed(&self) -> bool {
        self.prelude.passed() && self.corpus.passed()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Plain => self.plain(),
            Format::Structured => self.structured(),
        }
    }

    fn structured(&self) -> String {
        let mut records: Vec<Record> = self.prelude.entries.iter().map(Record::Prelude).collect();
        records.extend(self.corpus.cases.iter().map(|r| Record::Case {
            file: r.case.file,
            anchor: r.case.anchor,
            passes: r.report.passes(),
            failures: r.report.failures(),
            ok: r.passed(),
            problems: &r.problems,
        }));
        records.push(Record::Coverage(&self.corpus.coverage));
        records.push(Record::Selftest {
            passed: self.passed(),
        });
        records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }

    fn plain(&self) -> String {
        let mut out = String::new();
        let failed: Vec<_> = self.prelude.failures().collect();
        let _ = writeln!(
            out,
            "prelude: {} entries checked, {} failed",
            self.prelude.entries.len(),
            failed.len()
        );
        for e in failed {
            let _ = writeln!(
                out,
                "  FAIL {} (line {}): {}",
                e.entry,
                e.line,
                e.message.as_deref().unwrap_or("no message")
            );
        }
        for r in &self.corpus.cases {
            let verdict = if r.passed() { "ok" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{verdict} {} ({}): {} passed, {} failed",
                r.case.file,
                r.case.anchor,
                r.report.passes(),
                r.report.failures()
            );
            for p in &r.problems {
                let _ = writeln!(out, "  {p}");
            }
        }
        let uncovered = self.corpus.coverage.uncovered();
        let total = self.corpus.coverage.map.len();
        let _ = writeln!(
            out,
            "coverage: {}/{total} prelude constants exercised",
            total - uncovered.len()
        );
        if !uncovered.is_empty() {
            let _ = writeln!(out, "  uncovered: {}", uncovered.join(", "));
        }
        let _ = writeln!(
            out,
            "selftest: {}",
            if self.passed() { "passed" } else { "FAILED" }
        );
        out
    }
}

/// Writes each case's current structured report over its golden file.
pub fn bless(summary: &Selftest, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for r in &summary.corpus.cases {
        let name = Path::new(r.case.file).with_extension("golden");
        let path = dir.join(name.file_name().expect("case files have names"));
        std::fs::write(&path, driver::structured(&r.report))?;
        written.push(path);
    }
    Ok(written)
}
