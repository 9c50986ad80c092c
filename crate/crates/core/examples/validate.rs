//! Runs every invariant suite on a handful of random instances.

use twrc::validate::{run_suite, Suite};

fn main() -> twrc::Result<()> {
    let checks = run_suite(Suite::All, 1, 3)?;
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    println!("{} checks, {} failed", checks.len(), failed.len());
    for c in failed {
        println!("FAIL {} {}: {}", c.suite, c.name, c.detail);
    }
    Ok(())
}
