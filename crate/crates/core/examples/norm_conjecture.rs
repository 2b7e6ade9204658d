//! Compare ‖σ_g‖₂ with ‖g⁻¹(Σ wᵢ g(Aᵢ))‖₂ over random families.
//!
//! ```bash
//! cargo run --release --example norm_conjecture
//! ```

use gkemean::generator::Generator;
use gkemean::verify::{conjecture_search, TrialPlan};

fn main() -> gkemean::Result<()> {
    let plan = TrialPlan {
        trials: 200,
        ..TrialPlan::default()
    };
    println!("{:<12} {:>10} {:>10} {:>10} {:>8}", "g", "max", "mean", "min", "above 1");
    for g in Generator::catalogue() {
        let out = conjecture_search(&g, &plan)?;
        println!(
            "{:<12} {:>10.6} {:>10.6} {:>10.6} {:>8}",
            g.to_string(),
            out.stats["max_ratio"],
            out.stats["mean_ratio"],
            out.stats["min_ratio"],
            out.violations
        );
        if let Some(w) = &out.witness {
            println!("  worst family: trial {}, {} matrices of size {}", w.trial, w.matrices.len(), w.matrices[0].dim());
        }
    }
    Ok(())
}
