//! Batch processing of `.tel` files against one shared signature, with plain
//! and line-delimited JSON reporting.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::kernel::{self, ErrorClass, MetaStore, Signature, Tc};
use crate::prelude::{self, PreludeError};
use crate::print;
use crate::surface::{self, Decl, DeclKind, ParseError};
use crate::term::{Context, Name};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// Outcome of one declaration or parse error.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub start: usize,
    pub end: usize,
    pub kind: String,
    pub name: Option<String>,
    pub status: Status,
    pub error_class: Option<ErrorClass>,
    pub message: Option<String>,
    pub normal_form: Option<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FileReport {
    pub file: String,
    pub reports: Vec<Report>,
    pub duration: Duration,
}

impl FileReport {
    pub fn passes(&self) -> usize {
        self.reports.iter().filter(|r| r.passed()).count()
    }

    pub fn failures(&self) -> usize {
        self.reports.len() - self.passes()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Plain,
    Structured,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum Record<'a> {
    Decl(&'a Report),
    Summary {
        file: &'a str,
        passes: usize,
        failures: usize,
    },
}

/// One declaration record per line, then a summary line. Durations are left
/// out so that repeated runs produce identical bytes.
pub fn structured(file: &FileReport) -> String {
    let mut out = String::new();
    for r in &file.reports {
        out.push_str(&serde_json::to_string(&Record::Decl(r)).expect("reports serialize"));
        out.push('\n');
    }
    let summary = Record::Summary {
        file: &file.file,
        passes: file.passes(),
        failures: file.failures(),
    };
    out.push_str(&serde_json::to_string(&summary).expect("reports serialize"));
    out.push('\n');
    out
}

pub fn plain(file: &FileReport) -> String {
    let mut out = String::new();
    for r in &file.reports {
        let what = match &r.name {
            Some(n) => format!("{} {n}", r.kind),
            None => r.kind.clone(),
        };
        let status = if r.passed() { "pass" } else { "FAIL" };
        let _ = write!(out, "{}:{}:{}: {status} {what}", r.file, r.line, r.col);
        match (&r.error_class, &r.message) {
            (Some(c), Some(m)) => {
                let _ = write!(out, " [{c}] {m}");
            }
            (None, Some(m)) => {
                let _ = write!(out, " {m}");
            }
            _ => {}
        }
        if let Some(nf) = &r.normal_form {
            let _ = write!(out, " = {nf}");
        }
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "{}: {} passed, {} failed ({:.1} ms)",
        file.file,
        file.passes(),
        file.failures(),
        file.duration.as_secs_f64() * 1e3
    );
    out
}

pub fn render(file: &FileReport, format: Format) -> String {
    match format {
        Format::Plain => plain(file),
        Format::Structured => structured(file),
    }
}

/// A signature shared by the files of one run.
pub struct Session {
    pub sig: Signature,
    pub fuel: u64,
    imported: HashSet<PathBuf>,
    /// In-memory files that imports resolve to before the file system.
    sources: HashMap<PathBuf, &'static str>,
    /// Constants mentioned by accepted declarations.
    pub used: HashSet<Name>,
}

enum Item<'a> {
    Decl(&'a Decl),
    Parse(&'a ParseError),
}

impl Session {
    /// A session holding only the kernel primitives.
    pub fn bare(fuel: u64) -> Self {
        let mut sig = Signature::new();
        prelude::load_builtins(&mut sig).expect("builtins load");
        Session {
            sig,
            fuel,
            imported: HashSet::new(),
            sources: HashMap::new(),
            used: HashSet::new(),
        }
    }

    /// A session with the framework loaded, from `TELIC_PRELUDE` when set.
    pub fn with_prelude(fuel: u64) -> Result<Self, SessionError> {
        let mut s = Session::bare(fuel);
        let src = prelude::framework_source()
            .map_err(|e| SessionError::Io(prelude::PRELUDE_ENV.into(), e))?;
        prelude::load_source(&mut s.sig, &src, fuel).map_err(SessionError::Prelude)?;
        Ok(s)
    }

    /// Makes `path` importable without touching the file system.
    pub fn add_source(&mut self, path: impl Into<PathBuf>, src: &'static str) {
        self.sources.insert(path.into(), src);
    }

    /// Reads and checks a file. Only IO failures are errors.
    pub fn check_file(&mut self, path: &Path) -> Result<FileReport, SessionError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| SessionError::Io(path.display().to_string(), e))?;
        if let Ok(canon) = path.canonicalize() {
            self.imported.insert(canon);
        }
        Ok(self.check_source(&path.display().to_string(), &src, path.parent()))
    }

    /// Checks source text. Imports resolve against `base`. A failed
    /// postulate, definition or import stops the file.
    pub fn check_source(&mut self, file: &str, src: &str, base: Option<&Path>) -> FileReport {
        let started = Instant::now();
        let (decls, errors) = surface::parse_file(src);
        let mut items: Vec<(usize, Item)> = decls
            .iter()
            .map(|d| (d.span.start, Item::Decl(d)))
            .collect();
        items.extend(errors.iter().map(|e| (e.span.start, Item::Parse(e))));
        items.sort_by_key(|(start, _)| *start);

        let mut reports = Vec::new();
        for (_, item) in items {
            let decl = match item {
                Item::Parse(e) => {
                    reports.push(Report {
                        file: file.to_string(),
                        line: e.span.line,
                        col: e.span.col,
                        start: e.span.start,
                        end: e.span.end,
                        kind: "parse".into(),
                        name: None,
                        status: Status::Fail,
                        error_class: Some(e.class),
                        message: Some(e.message.clone()),
                        normal_form: None,
                    });
                    continue;
                }
                Item::Decl(d) => d,
            };
            let mut report = Report {
                file: file.to_string(),
                line: decl.span.line,
                col: decl.span.col,
                start: decl.span.start,
                end: decl.span.end,
                kind: decl.kind.keyword().to_string(),
                name: decl.kind.name().map(str::to_string),
                status: Status::Pass,
                error_class: None,
                message: None,
                normal_form: None,
            };
            let halts = matches!(
                decl.kind,
                DeclKind::Primitive { .. }
                    | DeclKind::Postulate { .. }
                    | DeclKind::Def { .. }
                    | DeclKind::Import { .. }
            );
            let outcome = match &decl.kind {
                DeclKind::Import { path } => self.import(path, base),
                _ => {
                    let v = surface::elaborate(&mut self.sig, decl, self.fuel);
                    if v.passed {
                        self.used.extend(v.elaborated.constants);
                        report.error_class = v.class;
                        report.message = v.message;
                        report.normal_form = v.elaborated.normal_form;
                        Ok(())
                    } else {
                        Err((
                            v.class.unwrap_or(ErrorClass::TypeMismatch),
                            v.message.unwrap_or_default(),
                        ))
                    }
                }
            };
            if let Err((class, message)) = outcome {
                report.status = Status::Fail;
                report.error_class = Some(class);
                report.message = Some(if halts {
                    format!("{message}; rest of file skipped")
                } else {
                    message
                });
                reports.push(report);
                if halts {
                    break;
                }
                continue;
            }
            reports.push(report);
        }
        FileReport {
            file: file.to_string(),
            reports,
            duration: started.elapsed(),
        }
    }

    fn import(&mut self, path: &str, base: Option<&Path>) -> Result<(), (ErrorClass, String)> {
        let full = base
            .map(|b| b.join(path))
            .unwrap_or_else(|| PathBuf::from(path));
        let sub = if let Some(src) = self.sources.get(&full).copied() {
            if !self.imported.insert(full.clone()) {
                return Ok(());
            }
            self.check_source(&full.display().to_string(), src, full.parent())
        } else {
            let canon = full.canonicalize().map_err(|e| {
                (
                    ErrorClass::ImportFailed,
                    format!("cannot read \"{}\": {e}", full.display()),
                )
            })?;
            if self.imported.contains(&canon) {
                return Ok(());
            }
            self.check_file(&full)
                .map_err(|e| (ErrorClass::ImportFailed, e.to_string()))?
        };
        match sub.reports.iter().find(|r| !r.passed()) {
            None => Ok(()),
            Some(r) => Err((
                ErrorClass::ImportFailed,
                format!(
                    "{}:{}:{}: {}",
                    r.file,
                    r.line,
                    r.col,
                    r.message.as_deref().unwrap_or("failed")
                ),
            )),
        }
    }

    /// Elaborates `src` as a closed expression and renders its normal form.
    pub fn norm(&self, src: &str) -> Result<String, surface::Diagnostic> {
        let expr = surface::parse_expr(src).map_err(|e| surface::Diagnostic {
            class: e.class,
            message: e.message,
            span: e.span,
        })?;
        let diag = |e: kernel::KernelError| surface::Diagnostic {
            class: e.class(),
            message: e.to_string(),
            span: expr.span,
        };
        let ctx = Context::new();
        let mut metas = MetaStore::new();
        let t = surface::Resolver {
            sig: &self.sig,
            metas: &mut metas,
        }
        .resolve(&mut Vec::new(), &expr)?;
        let mut tc = Tc::with_metas(&self.sig, metas, self.fuel);
        tc.infer(&ctx, &t)
            .and_then(|_| tc.solve_postponed())
            .map_err(diag)?;
        let t = tc.finish(&ctx, &t).map_err(diag)?;
        let n = Tc::new(&self.sig, self.fuel).normalize(&t).map_err(diag)?;
        Ok(print::render(&self.sig, &[], &n))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SessionError {
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error("{0}")]
    Prelude(PreludeError),
}
