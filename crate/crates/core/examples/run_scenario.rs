//! Load a scenario manifest, run it and print the summary. Pass a path, or run the
//! shipped Schwarz equality scenario.

use std::path::PathBuf;

use kahler::report::ReportEntry;
use kahler::scenario::{RunOptions, Scenario};

fn main() -> kahler::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/schwarz_disk_equality.json")
    });
    let scenario = Scenario::from_path(&path)?;
    let doc = scenario.run(&RunOptions { threads: Some(2), ..RunOptions::default() })?;
    for entry in &doc.checks {
        let detail = match entry {
            ReportEntry::Check(c) => format!("max residual {:.2e} over {} points", c.max_abs_residual.unwrap_or(f64::NAN), c.points_checked),
            ReportEntry::Bound(b) => format!("observed {:.10}, bound {:.10}", b.observed, b.bound),
            ReportEntry::Profile(p) => format!("{} rows", p.rows.len()),
        };
        println!("{:<28} {:?}  {detail}", entry.label(), entry.status());
    }
    println!("passed {}, failed {}, advisory {}", doc.summary.passed, doc.summary.failed, doc.summary.advisory);
    std::process::exit(doc.exit_code());
}
