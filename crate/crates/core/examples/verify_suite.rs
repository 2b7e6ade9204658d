//! Run every randomized check over the generator catalogue.
//!
//! ```bash
//! cargo run --release --example verify_suite
//! ```

use gkemean::verify::{run_property_suite, CheckKind, TrialPlan};

fn main() -> gkemean::Result<()> {
    let plan = TrialPlan {
        trials: 30,
        ..TrialPlan::default()
    };
    let report = run_property_suite(&plan)?;
    for o in &report.outcomes {
        let kind = match o.kind {
            CheckKind::Assertion => "assert",
            CheckKind::Report => "report",
        };
        println!(
            "{:<18} {:<12} {kind}  trials {:>3}  violations {:>3}  skipped {:>3}  {}",
            o.name,
            o.generator,
            o.trials,
            o.violations,
            o.skipped,
            o.note.as_deref().unwrap_or("")
        );
    }
    println!("passed: {}", report.passed);
    Ok(())
}
