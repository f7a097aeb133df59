use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spillgrid::io::{dump_formula_map, dump_spill_map, dump_values, lint_report, load_workbook};
use spillgrid::Workbook;

/// Evaluate spreadsheet workbooks with dynamic-array spilling.
#[derive(Parser)]
#[command(name = "spillgrid", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recalculate a workbook and print a dump.
    Eval {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Dump::Values)]
        dump: Dump,
        /// Sheet for the values and formulas dumps (default: the first sheet).
        #[arg(long)]
        sheet: Option<String>,
        /// Write the dump here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List what a cell reads and what reads it.
    Trace { path: PathBuf, cell: String },
    /// Report every cell holding an error value.
    Lint { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dump {
    Values,
    Formulas,
    Spills,
}

fn load(path: &PathBuf) -> Result<Workbook, ExitCode> {
    load_workbook(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn eval(path: &PathBuf, dump: Dump, sheet: Option<&str>, out: Option<&PathBuf>) -> Result<ExitCode, ExitCode> {
    let wb = load(path)?;
    let sheet = sheet.or_else(|| wb.sheets().first().map(|s| s.name.as_str()));
    let text = match (dump, sheet) {
        (Dump::Spills, _) => Ok(dump_spill_map(&wb)),
        (_, None) => Ok(String::new()),
        (Dump::Values, Some(s)) => dump_values(&wb, s),
        (Dump::Formulas, Some(s)) => dump_formula_map(&wb, s),
    }
    .map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })?;
    match out {
        Some(file) => std::fs::write(file, text).map_err(|e| {
            eprintln!("error: {}: {e}", file.display());
            ExitCode::from(2)
        })?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn trace(path: &PathBuf, cell: &str) -> Result<ExitCode, ExitCode> {
    let wb = load(path)?;
    let Some(key) = wb.parse_cell_ref(cell) else {
        eprintln!("error: cannot resolve cell reference `{cell}`");
        return Err(ExitCode::from(2));
    };
    let t = wb.trace(key);
    println!("precedents:");
    for rect in &t.precedents {
        println!("  {}", wb.display_rect(rect));
    }
    for name in &t.precedent_names {
        println!("  {name}");
    }
    println!("dependents:");
    for anchor in &t.dependents {
        println!("  {}", wb.display_key(*anchor));
    }
    for name in &t.dependent_names {
        println!("  {name}");
    }
    Ok(ExitCode::SUCCESS)
}

fn lint(path: &PathBuf) -> Result<ExitCode, ExitCode> {
    let wb = load(path)?;
    let (report, errors) = lint_report(&wb);
    print!("{report}");
    Ok(if errors == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval { path, dump, sheet, out } => eval(path, *dump, sheet.as_deref(), out.as_ref()),
        Command::Trace { path, cell } => trace(path, cell),
        Command::Lint { path } => lint(path),
    };
    result.unwrap_or_else(|code| code)
}
