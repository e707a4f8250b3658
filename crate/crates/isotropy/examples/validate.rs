//! Runs the desk-scale validation harness and prints the score matrix.
//!
//! ```text
//! cargo run --release --example validate
//! ```

use isotropy::harness::{self, HarnessConfig, Scale};
use isotropy::report::Metric;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = HarnessConfig::new(Scale::Desk, 0);
    let mut outcomes = Vec::new();
    for test in isotropy::harness::TestId::ALL {
        let start = std::time::Instant::now();
        let outcome = harness::run_test(&config, test)?;
        eprintln!(
            "test {:<2} {:<22} {:6.1}s",
            outcome.test.label(),
            outcome.test.name(),
            start.elapsed().as_secs_f64()
        );
        for (metric, verdict) in &outcome.verdicts {
            let mark = if verdict.pass { "pass" } else { "FAIL" };
            let why = verdict.violated.as_deref().unwrap_or("");
            eprintln!("    {:<12} {mark}  {why}", metric.name());
        }
        outcomes.push(outcome);
    }
    let matrix = harness::build_score_matrix(&outcomes)?;
    println!("{:<22}{}", "test", Metric::ALL.map(|m| format!("{:>13}", m.name())).join(""));
    for row in &matrix.rows {
        let cells = Metric::ALL
            .map(|m| format!("{:>13}", if row.cells[&m] { "pass" } else { "fail" }))
            .join("");
        println!("{:<22}{cells}", format!("{} {}", row.test, row.name));
    }
    Ok(())
}
