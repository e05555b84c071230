use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kahler::geometry::{catalog_names, model_curvature};
use kahler::scenario::{RunOptions, Scenario, DEFAULT_ORDER};

#[derive(Parser)]
#[command(name = "kahler", version, about = "Kähler curvature and holomorphic map checks from JSON scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario and emit the JSON report.
    Run(RunArgs),
    /// Emit only the curvature report for the scenario charts.
    Curvature(RunArgs),
    /// Catalog of model charts.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// List catalog charts with their curvature constants at unit scale.
    List,
}

#[derive(Args)]
struct RunArgs {
    manifest: PathBuf,
    /// Override every check tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override every seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override every sample count.
    #[arg(long)]
    points: Option<usize>,
    /// Jet order for left-hand sides (at least 2).
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: usize,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include per-point residuals.
    #[arg(long)]
    details: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            tol: self.tol,
            seed: self.seed,
            points: self.points,
            order: self.order,
            details: self.details,
            threads: self.threads,
        }
    }
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(format!("cannot write report: {e}")),
                _ => Ok(()),
            }
        }
    }
}

fn run(args: &RunArgs, curvature_only: bool) -> Result<u8, String> {
    if args.order < 2 {
        return Err(format!("--order must be at least 2, got {}", args.order));
    }
    let scenario = Scenario::from_path(&args.manifest).map_err(|e| e.to_string())?;
    let opts = args.options();
    if curvature_only {
        let doc = scenario.curvature(&opts).map_err(|e| e.to_string())?;
        emit(&doc.to_json(), args.output.as_ref())?;
        return Ok(0);
    }
    let doc = scenario.run(&opts).map_err(|e| e.to_string())?;
    emit(&doc.to_json(), args.output.as_ref())?;
    Ok(doc.exit_code() as u8)
}

fn list_catalog() {
    for name in catalog_names() {
        let dim = if *name == "poincare_disk" { 1 } else { 2 };
        match model_curvature(name, dim, None) {
            Ok(m) => println!(
                "{name:<26} dim {dim}: H in [{}, {}], bisectional in [{}, {}], Ric in [{}, {}], scalar {}",
                m.holomorphic_sectional.0,
                m.holomorphic_sectional.1,
                m.bisectional.0,
                m.bisectional.1,
                m.ricci.0,
                m.ricci.1,
                m.scalar
            ),
            Err(e) => println!("{name:<26} {e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run(args, false),
        Command::Curvature(args) => run(args, true),
        Command::Catalog { action: CatalogAction::List } => {
            list_catalog();
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
