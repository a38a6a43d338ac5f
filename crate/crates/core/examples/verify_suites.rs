//! Run the built-in verification suites and list each check.

use thermal_capacity::verify::{run, Level};


fn main() -> Result<(), Box<dyn std::error::Error>> {
    let level: Level = std::env::args().nth(1).as_deref().unwrap_or("quick").parse()?;
    let report = run(level, 7)?;
    for c in &report.checks {
        println!(
            "{} [{}] {}: {:.2e} (tol {:.0e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.invariant,
            c.max_discrepancy,
            c.tolerance
        );
    }
    println!("{} / {} passed", report.checks.len() - report.failures().count(), report.checks.len());
    Ok(())
}
