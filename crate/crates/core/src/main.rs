use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use codebook_core::analysis::{codebook_report, ratio_report, AnalysisReport, Tier};
use codebook_core::constructions::{build_set, codebook, Construction, DEFAULT_ENTRY_CAP};
use codebook_core::io::{
    load_codebook, render_codebook, render_json, render_reports, verify_against_tower, BodyForm,
    FieldHeader, ReportFormat,
};
use codebook_core::table::{regenerate, render_text};
use codebook_core::verify::{parse_suites, run_suites};
use codebook_core::{Error, TowerCtx, TowerParams, DEFAULT_BUDGET};

/// Trace-function codebooks over finite-field towers.
#[derive(Parser)]
#[command(name = "codebook", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Tower {
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    t: u32,
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Largest q² that may be enumerated.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Build a codebook and write it in exponent form.
    Build {
        #[arg(long)]
        construction: Construction,
        #[command(flatten)]
        tower: Tower,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report N, K, I_max, the Welch bound and their ratio.
    Analyze {
        #[arg(long)]
        construction: Option<Construction>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 1)]
        t: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Analyze a codebook file instead of building one.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run exhaustive verification suites on one tower.
    Verify {
        /// gauss, fourier, trace, restriction, lemmaA, lemmaB, bent, PQ,
        /// distribution or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        tower: Tower,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a published parameter table (2: construction I, 3:
    /// construction II) and flag cells that disagree.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        section: u8,
        /// Comma-separated 1-based rows; all when absent.
        #[arg(long, value_delimiter = ',')]
        rows: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 4)]
        precision: usize,
        /// text, json or csv.
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a codebook in a chosen body form, from parameters or from an
    /// existing file.
    Export {
        #[arg(long)]
        construction: Option<Construction>,
        #[arg(long)]
        p: Option<u32>,
        #[arg(long, default_value_t = 1)]
        t: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "complex")]
        form: BodyForm,
        #[arg(long)]
        out: PathBuf,
    },
}

/// How a command ended, mapped onto the exit-code contract.
enum Outcome {
    Pass,
    Fail,
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn usage(msg: &str) -> Error {
    Error::Precondition(msg.to_string())
}

fn built(construction: Construction, params: TowerParams, budget: u64) -> Result<(TowerCtx, codebook_core::constructions::Codebook), Error> {
    construction.check_params(&params)?;
    let tower = TowerCtx::build(params, budget)?;
    let dset = build_set(&tower, construction)?;
    let cb = codebook(&tower, &dset, DEFAULT_ENTRY_CAP)?;
    Ok((tower, cb))
}

fn tier_note(r: &AnalysisReport) {
    let tier = match r.tier {
        Tier::Exhaustive => "exhaustive",
        Tier::Formula => "formula-only (q^2 beyond budget)",
    };
    eprintln!("construction {} (p={}, t={}, s={}): {tier}", r.construction, r.p, r.t, r.s);
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Build { construction, tower, out } => {
            let params = TowerParams::new(tower.p, tower.t, tower.s)?;
            let (tctx, cb) = built(construction, params, tower.budget)?;
            emit(out.as_deref(), &render_codebook(&cb, &FieldHeader::of(&tctx), BodyForm::Exponent))?;
            Ok(Outcome::Pass)
        }
        Command::Analyze { construction, p, t, s, budget, input, format, out } => {
            let report = match (input, construction, p) {
                (Some(path), _, _) => {
                    let file = load_codebook(&path)?;
                    let params = *file.codebook.params();
                    let tower = TowerCtx::build(params, budget)?;
                    verify_against_tower(&file, &tower)?;
                    codebook_report(&file.codebook)?
                }
                (None, Some(c), Some(p)) => ratio_report(c, &TowerParams::new(p, t, s)?, budget)?,
                _ => return Err(usage("analyze needs --input or both --construction and --p")),
            };
            tier_note(&report);
            emit(out.as_deref(), &render_reports(std::slice::from_ref(&report), format)?)?;
            Ok(if report.passed() { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Verify { suite, tower, format, out } => {
            let suites = parse_suites(&suite)?;
            let params = TowerParams::new(tower.p, tower.t, tower.s)?;
            let outcome = run_suites(&params, &suites, tower.budget, suite == "all")?;
            for r in &outcome.reports {
                eprintln!(
                    "{:<13} {} ({} checks, {} failed)",
                    r.suite,
                    if r.passed() { "pass" } else { "FAIL" },
                    r.checked,
                    r.failed
                );
            }
            for s in &outcome.skipped {
                eprintln!("{:<13} skipped: {}", s.suite, s.reason);
            }
            for s in &outcome.not_applicable {
                eprintln!("{s:<13} not applicable (needs p not dividing s)");
            }
            let text = match format {
                ReportFormat::Json => render_json(std::slice::from_ref(&outcome))?,
                ReportFormat::Csv => {
                    let mut t = String::from("suite,status,checked,failed,first_failure\n");
                    for r in &outcome.reports {
                        let first = r.failures.first().map_or(String::new(), |f| f.replace(',', ";"));
                        let status = if r.passed() { "pass" } else { "fail" };
                        t.push_str(&format!("{},{status},{},{},{first}\n", r.suite, r.checked, r.failed));
                    }
                    for s in &outcome.skipped {
                        t.push_str(&format!("{},skipped,0,0,{}\n", s.suite, s.reason.replace(',', ";")));
                    }
                    t
                }
            };
            emit(out.as_deref(), &text)?;
            Ok(if outcome.passed() { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Table { section, rows, budget, precision, format, out } => {
            let construction = if section == 2 { Construction::I } else { Construction::II };
            let table = regenerate(construction, &rows, budget, precision)?;
            let text = match format.as_str() {
                "text" => render_text(construction, &table, precision),
                "json" => render_json(std::slice::from_ref(&table))?,
                "csv" => {
                    let reports: Vec<AnalysisReport> = table.iter().map(|r| r.report.clone()).collect();
                    render_reports(&reports, ReportFormat::Csv)?
                }
                other => return Err(usage(&format!("unknown table format {other:?}"))),
            };
            emit(out.as_deref(), &text)?;
            let violations = table.iter().any(|r| !r.report.passed());
            Ok(if violations { Outcome::Fail } else { Outcome::Pass })
        }
        Command::Export { construction, p, t, s, budget, input, form, out } => {
            let (cb, fields) = match (input, construction, p) {
                (Some(path), _, _) => {
                    let file = load_codebook(&path)?;
                    (file.codebook, file.fields)
                }
                (None, Some(c), Some(p)) => {
                    let (tower, cb) = built(c, TowerParams::new(p, t, s)?, budget)?;
                    (cb, FieldHeader::of(&tower))
                }
                _ => return Err(usage("export needs --input or both --construction and --p")),
            };
            emit(Some(&out), &render_codebook(&cb, &fields, form))?;
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
