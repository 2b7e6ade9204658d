//! Ando–Hiai type implications for generalized Karcher means.
//!
//! ```bash
//! cargo run --release --example ando_hiai
//! ```

use gkemean::generator::Generator;
use gkemean::verify::{
    check_ando_hiai_1, check_ando_hiai_2, classify_deformation, TrialPlan, DEFAULT_P_LIST,
};

fn main() -> gkemean::Result<()> {
    let plan = TrialPlan {
        trials: 40,
        ..TrialPlan::default()
    };
    for g in Generator::catalogue() {
        let ah1 = check_ando_hiai_1(&g, &plan, &DEFAULT_P_LIST)?;
        print!(
            "{:<12} deformed: {} violations (worst {:+.1e})",
            g.to_string(),
            ah1.violations,
            ah1.worst_margin.unwrap_or(0.0)
        );
        match classify_deformation(&g, &DEFAULT_P_LIST) {
            Ok(direction) => {
                let ah2 = check_ando_hiai_2(&g, &plan, &DEFAULT_P_LIST)?;
                println!(
                    "; same generator, g_p {:?} g: {} violations, scalar grid {}/{} bad",
                    direction,
                    ah2.violations,
                    ah2.stats["scalar_violations"],
                    ah2.stats["scalar_points"]
                );
            }
            Err(e) => println!("; same generator: {e}"),
        }
    }
    Ok(())
}
