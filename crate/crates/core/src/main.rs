use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use telic::corpus;
use telic::driver::{self, Format, Session};
use telic::kernel::DEFAULT_FUEL;

#[derive(Parser)]
#[command(
    name = "telic",
    version,
    about = "Check .tel lexica against the telicity framework"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check files in order against one shared signature.
    Check {
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        /// Start from the kernel primitives only.
        #[arg(long)]
        no_prelude: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the normal form of an expression in the context of the files.
    Norm {
        #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
        fuel: u64,
        #[arg(short = 'e', long = "expr")]
        expr: String,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Check the embedded prelude and run the corpus against its goldens.
    Selftest {
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
        /// Rewrite the golden files from the current output.
        #[arg(long)]
        bless: bool,
    },
}

fn session(fuel: u64, no_prelude: bool) -> Result<Session, ExitCode> {
    if no_prelude {
        return Ok(Session::bare(fuel));
    }
    Session::with_prelude(fuel).map_err(|e| {
        eprintln!("telic: {e}");
        ExitCode::from(2)
    })
}

/// Checks the files in order; `Err` carries the exit code to stop with.
fn check_files(
    s: &mut Session,
    files: &[PathBuf],
    format: Format,
    out: &mut impl Write,
) -> Result<bool, ExitCode> {
    let mut clean = true;
    for path in files {
        let report = s.check_file(path).map_err(|e| {
            eprintln!("telic: {e}");
            ExitCode::from(2)
        })?;
        clean &= report.failures() == 0;
        let _ = out.write_all(driver::render(&report, format).as_bytes());
    }
    Ok(clean)
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    match cli.command {
        Command::Check {
            fuel,
            format,
            no_prelude,
            files,
        } => {
            let mut s = session(fuel, no_prelude)?;
            let clean = check_files(&mut s, &files, format, &mut std::io::stdout().lock())?;
            Ok(if clean {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Norm { fuel, expr, files } => {
            let mut s = session(fuel, false)?;
            if !check_files(&mut s, &files, Format::Plain, &mut std::io::stderr().lock())? {
                return Ok(ExitCode::from(1));
            }
            match s.norm(&expr) {
                Ok(nf) => {
                    println!("{nf}");
                    Ok(ExitCode::SUCCESS)
                }
                Err(d) => {
                    eprintln!("telic: {}: {}", d.class, d.message);
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Selftest { format, bless } => {
            let summary = corpus::selftest();
            print!("{}", summary.render(format));
            if bless {
                let dir = corpus::source_dir();
                for written in corpus::bless(&summary, &dir).map_err(|e| {
                    eprintln!("telic: {e}");
                    ExitCode::from(2)
                })? {
                    eprintln!("blessed {}", written.display());
                }
                return Ok(ExitCode::SUCCESS);
            }
            Ok(if summary.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    run(cli).unwrap_or_else(|code| code)
}
