//! Command-line front end for the `tileupb` crate.
//!
//! Exit codes: 0 when every report entry has its expected status, 1 when
//! some entry does not, 2 for usage, input and I/O errors.

pub mod args;
pub mod construct;
pub mod diagram;
pub mod error;
pub mod report;
pub mod suites;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command, RunConfig, Suite};
pub use error::{CliError, CliResult};
pub use suites::{Entry, Report, Summary};

fn verify(a: &args::VerifyArgs) -> CliResult<i32> {
    let cfg = RunConfig::from_args(a)?;
    let report = suites::run(&cfg, a.suite)?;
    construct::ensure_dir(&cfg.out)?;
    let path = cfg.out.join("report.json");
    construct::write_json(&path, &report)?;
    for e in &report.entries {
        let note = if e.matches() { "" } else { "  <-- unexpected" };
        println!(
            "{:<32} {:<12} {:<9} expected {}{note}",
            e.id, e.certificate.status, e.certificate.confidence, e.expected
        );
    }
    let s = &report.summary;
    println!(
        "{} entries: {} pass ({} evidence), {} fail ({} expected), {} inconclusive; report at {}",
        s.total,
        s.pass,
        s.evidence_passes,
        s.fail,
        s.expected_failures,
        s.inconclusive,
        path.display()
    );
    Ok(if report.all_as_expected() { 0 } else { 1 })
}

fn summarize(a: &args::ReportArgs) -> CliResult<i32> {
    let files = report::collect_inputs(&a.inputs)?;
    let reports = files.iter().map(|f| report::load(f)).collect::<CliResult<Vec<_>>>()?;
    let table = report::render(&reports);
    if let Some(out) = &a.out {
        std::fs::write(out, &table).map_err(|e| CliError::io(out, e))?;
    }
    print!("{table}");
    Ok(0)
}

pub fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Construct(a) => {
            for p in construct::construct(a.d, a.variant, &a.out)? {
                println!("{}", p.display());
            }
            Ok(0)
        }
        Command::Verify(a) => verify(&a),
        Command::Diagram(a) => {
            let layout = tileupb::tiles::layout(a.d)?;
            construct::ensure_dir(&a.out)?;
            let path = a.out.join(format!("tiles_d{}.svg", a.d));
            std::fs::write(&path, diagram::render_svg(&layout)).map_err(|e| CliError::io(&path, e))?;
            println!("{}", path.display());
            Ok(0)
        }
        Command::Report(a) => summarize(&a),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
